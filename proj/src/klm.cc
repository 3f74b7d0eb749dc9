// Copyright 2026 The fiberloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fiberloop/klm.h"

#include <algorithm>
#include <map>
#include <span>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fiberloop/rng.h"

namespace fiberloop {

namespace {

using std::numbers::pi;

void check_pair(ModePair p, std::size_t n_modes) {
    if (p.rail0 >= n_modes || p.rail1 >= n_modes) {
        throw std::out_of_range("qubit rail out of range");
    }
    if (p.rail0 == p.rail1) {
        throw std::invalid_argument("qubit rails must be distinct modes");
    }
}

}  // namespace

ModeUnitary embed(const Eigen::MatrixXcd &block, std::span<const std::size_t> modes, std::size_t dim) {
    if (block.rows() != static_cast<Eigen::Index>(modes.size()) || block.cols() != block.rows()) {
        throw std::invalid_argument("block size does not match mode list");
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < modes.size(); r++) {
        for (std::size_t c = 0; c < modes.size(); c++) {
            if (modes[r] >= dim || modes[c] >= dim) {
                throw std::out_of_range("embedded mode out of range");
            }
            m(static_cast<Eigen::Index>(modes[r]), static_cast<Eigen::Index>(modes[c])) =
                block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return ModeUnitary(std::move(m));
}

ModeUnitary ns_unitary() {
    auto first = ModeUnitary::beamsplitter(3, 1, 2, kNsTheta1, 0);
    auto middle = ModeUnitary::beamsplitter(3, 0, 1, kNsTheta2, 0);
    auto last = ModeUnitary::beamsplitter(3, 1, 2, kNsTheta3, 0);
    return last * middle * first;
}

ModeUnitary cz_gadget_unitary() {
    const std::size_t rails[] = {1, 3};
    const std::size_t ns_a[] = {1, 4, 5};
    const std::size_t ns_b[] = {3, 6, 7};
    Eigen::MatrixXcd ns = ns_unitary().matrix();
    auto mix = embed(beamsplitter_block(pi / 4, 0), rails, 8);
    auto unmix = embed(beamsplitter_block(pi / 4, pi), rails, 8);
    return unmix * embed(ns, ns_b, 8) * embed(ns, ns_a, 8) * mix;
}

FockState encode_dual_rail(cplx a0, cplx a1, ModePair pair, const FockState &context) {
    check_pair(pair, context.n_modes());
    if (std::abs(std::norm(a0) + std::norm(a1) - 1) > kNormTolerance) {
        throw std::invalid_argument("qubit amplitudes are not normalized");
    }
    FockState out(context.n_modes(), context.total_photons() + 1);
    for (const auto &[occ, amp] : context.terms()) {
        if (occ[pair.rail0] != 0 || occ[pair.rail1] != 0) {
            throw std::invalid_argument("target rails are already occupied");
        }
        Occupation zero = occ;
        zero[pair.rail0] = 1;
        out.add(zero, amp * a0);
        Occupation one = occ;
        one[pair.rail1] = 1;
        out.add(one, amp * a1);
    }
    return out.pruned();
}

FockState encode_dual_rail(cplx a0, cplx a1) {
    return encode_dual_rail(a0, a1, ModePair{0, 1}, FockState::vacuum(2));
}

std::array<cplx, 2> decode_dual_rail(const FockState &state, ModePair pair, double tol) {
    check_pair(pair, state.n_modes());
    std::map<Occupation, std::array<cplx, 2>> rows;
    double leaked = 0;
    for (const auto &[occ, amp] : state.terms()) {
        int r0 = occ[pair.rail0];
        int r1 = occ[pair.rail1];
        if (r0 + r1 != 1) {
            leaked += std::norm(amp);
            continue;
        }
        Occupation rest = occ;
        rest[pair.rail0] = 0;
        rest[pair.rail1] = 0;
        rows[rest][r0 == 1 ? 0 : 1] += amp;
    }
    double total = state.norm_squared();
    if (total == 0 || leaked / total > tol) {
        throw std::domain_error("state leaks out of the dual-rail subspace (weight " + std::to_string(leaked / total) + ")");
    }
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), 2);
    Eigen::Index r = 0;
    for (const auto &[rest, pair_amps] : rows) {
        m(r, 0) = pair_amps[0];
        m(r, 1) = pair_amps[1];
        r++;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinV);
    auto sv = svd.singularValues();
    double s1 = sv(0) * sv(0);
    double s2 = sv.size() > 1 ? sv(1) * sv(1) : 0.0;
    if (s2 / (s1 + s2) > tol) {
        throw std::domain_error("qubit is entangled with the remaining modes");
    }
    Eigen::Vector2cd v = svd.matrixV().col(0).conjugate();
    cplx ref = std::abs(v(0)) > 1e-12 ? v(0) : v(1);
    v *= std::polar(1.0, -std::arg(ref));
    v /= v.norm();
    return {v(0), v(1)};
}

PairwiseOp single_qubit_gate(const Eigen::Matrix2cd &v, ModePair qubit) {
    if ((v.adjoint() * v - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > kUnitarityTolerance) {
        throw std::invalid_argument("single-qubit gate is not unitary");
    }
    if (!(qubit.rail0 < qubit.rail1)) {
        throw std::invalid_argument("qubit rails must be ordered rail0 < rail1");
    }
    constexpr double eps = 1e-14;
    PairwiseOp op;
    op.i = qubit.rail0;
    op.j = qubit.rail1;
    op.theta = std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
    double psi0 = 0;
    double psi1 = 0;
    if (std::abs(v(0, 0)) > eps) {
        psi0 = std::arg(v(0, 0));
        psi1 = std::arg(v(1, 1));
        op.phi = std::abs(v(1, 0)) > eps ? std::arg(v(1, 0)) - psi1 : 0.0;
    } else {
        op.theta = pi / 2;
        psi1 = std::arg(v(1, 0));
        psi0 = std::arg(-v(0, 1));
    }
    op.trailing_phases = {psi0, psi1};
    return op;
}

FockState apply_single_qubit_gate(const FockState &state, const Eigen::Matrix2cd &v, ModePair qubit) {
    auto op = single_qubit_gate(v, qubit);
    auto s = apply_beamsplitter(state, op.i, op.j, op.theta, op.phi);
    std::vector<double> phases(state.n_modes(), 0.0);
    phases[op.i] = op.trailing_phases[0];
    phases[op.j] = op.trailing_phases[1];
    return apply_phases(s, phases);
}

HeraldedResult herald(
    const FockState &state,
    std::span<const std::size_t> modes,
    const Occupation &success_pattern,
    HeraldMode mode,
    Rng *rng) {
    auto sel = post_select(state, modes, success_pattern);
    HeraldedResult r;
    r.probability = sel.probability;
    if (mode == HeraldMode::kPostSelect) {
        r.success = sel.heralded();
        r.pattern = success_pattern;
        r.state = std::move(sel.state);
        return r;
    }
    if (rng == nullptr) {
        throw std::invalid_argument("sampling a herald needs a random source");
    }
    auto m = measure_modes(state, modes, *rng);
    r.success = m.outcome == success_pattern;
    r.pattern = std::move(m.outcome);
    r.state = std::move(m.state);
    return r;
}

HeraldedResult ns_gate(const FockState &state, std::size_t target, HeraldMode mode, Rng *rng) {
    if (target >= state.n_modes()) {
        throw std::out_of_range("NS target mode out of range");
    }
    for (const auto &[occ, amp] : state.terms()) {
        if (occ[target] > 2) {
            throw std::invalid_argument("NS gate acts on at most two photons in the target mode");
        }
    }
    std::size_t n = state.n_modes();
    FockState full = append_modes(state, kNsAncilla);
    const std::size_t modes[] = {target, n, n + 1};
    EvolveOptions opts;
    opts.check_unitary = false;
    full = apply_on_modes(full, modes, ns_unitary().matrix(), opts);
    const std::size_t herald_modes[] = {n, n + 1};
    return herald(full, herald_modes, kNsHerald, mode, rng);
}

HeraldedResult cz_gate(const FockState &state, ModePair a, ModePair b, HeraldMode mode, Rng *rng) {
    check_pair(a, state.n_modes());
    check_pair(b, state.n_modes());
    if (a.rail0 == b.rail0 || a.rail0 == b.rail1 || a.rail1 == b.rail0 || a.rail1 == b.rail1) {
        throw std::invalid_argument("CZ qubits must use disjoint rails");
    }
    std::size_t n = state.n_modes();
    FockState full = append_modes(state, kCzAncilla);
    EvolveOptions opts;
    opts.check_unitary = false;
    const std::size_t rails[] = {a.rail1, b.rail1};
    const std::size_t ns_a[] = {a.rail1, n, n + 1};
    const std::size_t ns_b[] = {b.rail1, n + 2, n + 3};
    Eigen::MatrixXcd ns = ns_unitary().matrix();
    full = apply_on_modes(full, rails, beamsplitter_block(pi / 4, 0), opts);
    full = apply_on_modes(full, ns_a, ns, opts);
    full = apply_on_modes(full, ns_b, ns, opts);
    full = apply_on_modes(full, rails, beamsplitter_block(pi / 4, pi), opts);
    const std::size_t herald_modes[] = {n, n + 1, n + 2, n + 3};
    return herald(full, herald_modes, kCzHerald, mode, rng);
}

KlmRunResult run_klm(
    const FockState &logical,
    const std::vector<KlmRoundSpec> &rounds,
    const HeraldPolicy &policy,
    const KlmController &controller) {
    const std::size_t n_logical = logical.n_modes();
    std::size_t max_ancilla = 0;
    for (const auto &r : rounds) {
        max_ancilla = std::max(max_ancilla, r.ancilla.n_modes());
    }
    LoopConfig config{1.0, n_logical, n_logical + max_ancilla + 1};
    auto passes_for = [&](const ModeUnitary &u, std::size_t n_ancilla) {
        if (u.dim() != n_logical + n_ancilla) {
            throw std::invalid_argument(
                "round unitary acts on " + std::to_string(u.dim()) + " bins, expected " +
                std::to_string(n_logical + n_ancilla));
        }
        LoopConfig round_config{config.tau, n_logical + n_ancilla, config.outer_delay_bins};
        return compile(u, round_config).rounds.front().passes;
    };

    LoopSchedule schedule;
    schedule.config = config;
    for (const auto &spec : rounds) {
        Round round;
        std::size_t n_ancilla = spec.ancilla.n_modes();
        if (n_ancilla > 0) {
            round.injection = spec.ancilla;
            for (std::size_t k = 0; k < n_ancilla; k++) {
                round.extraction.push_back(n_logical + k);
            }
        }
        round.passes = passes_for(spec.unitary, n_ancilla);
        schedule.rounds.push_back(std::move(round));
    }

    Controller loop_controller;
    if (controller) {
        loop_controller = [&](std::size_t next, const MeasurementRecord &record) -> std::optional<std::vector<PassSettings>> {
            auto u = controller(next, record);
            if (!u) {
                return std::nullopt;
            }
            return passes_for(*u, rounds[next].ancilla.n_modes());
        };
    }

    Machine machine(config);
    machine.load_pulse_train(logical);
    auto run = run_schedule(machine, schedule, policy, loop_controller);
    KlmRunResult out;
    out.logical = std::move(run.final_state);
    out.record = std::move(run.record);
    out.outcome_probabilities = std::move(run.outcome_probabilities);
    out.trace = std::move(run.trace);
    out.schedule = std::move(schedule);
    return out;
}

KlmRoundResult klm_round(
    const FockState &logical, const FockState &ancilla, const ModeUnitary &u, const HeraldPolicy &policy) {
    auto run = run_klm(logical, {KlmRoundSpec{ancilla, u}}, policy);
    KlmRoundResult r;
    r.logical = std::move(run.logical);
    if (!run.record.entries.empty()) {
        r.outcome = run.record.entries.back().outcome;
        r.probability = run.outcome_probabilities.back();
    } else {
        r.probability = 1;
    }
    return r;
}

}  // namespace fiberloop
