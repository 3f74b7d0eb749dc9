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

#include "fiberloop/reck.h"

#include <cmath>
#include <numbers>
#include <numeric>

namespace fiberloop {

namespace {

using std::numbers::pi;

// Where each logical mode currently sits in the train, and the phase it has
// picked up from being carried by full-transfer settings.
struct TrainTracker {
    std::vector<std::size_t> pos;
    std::vector<std::size_t> occupant;
    std::vector<cplx> phase;

    explicit TrainTracker(std::size_t n) : pos(n), occupant(n), phase(n, 1.0) {
        std::iota(pos.begin(), pos.end(), 0);
        std::iota(occupant.begin(), occupant.end(), 0);
    }

    // Full transfer at positions (p, p + 1): the lower content moves up and
    // gains e^{i phi}, the upper content moves down and gains -e^{-i phi}.
    void swap(PassSettings &pass, std::size_t p, double phi) {
        pass.coupling(p) = CentralSetting{pi / 2, phi};
        std::size_t up = occupant[p];
        std::size_t down = occupant[p + 1];
        phase[up] *= std::polar(1.0, phi);
        phase[down] *= -std::polar(1.0, -phi);
        occupant[p] = down;
        occupant[p + 1] = up;
        pos[up] = p + 1;
        pos[down] = p;
    }

    bool sorted() const {
        for (std::size_t k = 0; k < pos.size(); k++) {
            if (pos[k] != k) {
                return false;
            }
        }
        return true;
    }
};

CentralSetting setting_from_block(const Eigen::Matrix2cd &m) {
    double theta = std::atan2(std::abs(m(1, 0)), std::abs(m(0, 0)));
    double phi = std::abs(m(1, 0)) > 0 ? std::arg(m(1, 0)) : 0.0;
    return CentralSetting{theta, phi};
}

double wrap(double x) {
    return std::remainder(x, 2 * pi);
}

}  // namespace

Eigen::Matrix2cd PairwiseOp::block() const {
    Eigen::Matrix2cd b = beamsplitter_block(theta, phi);
    if (!trailing_phases.empty()) {
        if (trailing_phases.size() != 2) {
            throw std::invalid_argument("trailing phases must list exactly two phases");
        }
        b.row(0) *= std::polar(1.0, trailing_phases[0]);
        b.row(1) *= std::polar(1.0, trailing_phases[1]);
    }
    return b;
}

ReckDecomposition reck_decompose(const ModeUnitary &u, double tol) {
    double err = u.unitarity_error();
    if (!(err < tol)) {
        throw std::invalid_argument("input is not unitary (error " + std::to_string(err) + ")");
    }
    Eigen::MatrixXcd m = u.matrix();
    auto n = m.rows();
    ReckDecomposition out;
    for (Eigen::Index r = n - 1; r >= 1; r--) {
        for (Eigen::Index c = 0; c < r; c++) {
            cplx a = m(r, c);
            cplx b = m(r, r);
            PairwiseOp op;
            op.i = static_cast<std::size_t>(c);
            op.j = static_cast<std::size_t>(r);
            if (std::abs(a) > 0) {
                op.theta = std::atan2(std::abs(a), std::abs(b));
                op.phi = std::abs(b) > 0 ? wrap(std::arg(a) - std::arg(b)) : 0.0;
                // Right-multiply by the inverse op, mixing columns c and r.
                double cs = std::cos(op.theta);
                double sn = std::sin(op.theta);
                Eigen::VectorXcd col_c = m.col(c);
                Eigen::VectorXcd col_r = m.col(r);
                m.col(c) = cs * col_c - std::polar(sn, op.phi) * col_r;
                m.col(r) = std::polar(sn, -op.phi) * col_c + cs * col_r;
                m(r, c) = 0;
            }
            out.ops.push_back(op);
        }
    }
    for (Eigen::Index k = 0; k < n; k++) {
        out.phases.push_back(std::arg(m(k, k)));
    }
    return out;
}

ModeUnitary recompose(const std::vector<PairwiseOp> &ops, const std::vector<double> &phases) {
    std::size_t n = phases.size();
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto &op : ops) {
        if (op.i >= n || op.j >= n) {
            throw std::out_of_range("pairwise op index out of range");
        }
        if (op.i == op.j) {
            throw std::invalid_argument("pairwise op needs two distinct modes");
        }
        Eigen::Matrix2cd b = op.block();
        auto i = static_cast<Eigen::Index>(op.i);
        auto j = static_cast<Eigen::Index>(op.j);
        Eigen::RowVectorXcd ri = r.row(i);
        Eigen::RowVectorXcd rj = r.row(j);
        r.row(i) = b(0, 0) * ri + b(0, 1) * rj;
        r.row(j) = b(1, 0) * ri + b(1, 1) * rj;
    }
    for (std::size_t k = 0; k < n; k++) {
        r.row(static_cast<Eigen::Index>(k)) *= std::polar(1.0, phases[k]);
    }
    return ModeUnitary(std::move(r));
}

std::vector<PassSettings> pairwise_to_passes(const PairwiseOp &op, std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("pairwise ops need a train of at least two bins");
    }
    if (!(op.i < op.j) || op.j >= n) {
        throw std::invalid_argument("pairwise op needs indices i < j < n");
    }
    for (double p : op.trailing_phases) {
        if (std::abs(wrap(p)) > 0) {
            throw std::invalid_argument("pairwise op carries trailing phases; compile its full unitary instead");
        }
    }
    std::vector<PassSettings> passes;
    PassSettings carry = PassSettings::pass_through(n);
    for (std::size_t q = op.i; q + 1 < op.j; q++) {
        carry.coupling(q) = CentralSetting{pi / 2, 0};
    }
    carry.coupling(op.j - 1) = CentralSetting{op.theta, op.phi};
    passes.push_back(std::move(carry));
    // Walk bin i back down. phi = pi undoes the sign each displaced bin took
    // on its way down in the first pass.
    for (std::size_t p = op.j - 1; p > op.i; p--) {
        PassSettings back = PassSettings::pass_through(n);
        back.coupling(p - 1) = CentralSetting{pi / 2, pi};
        passes.push_back(std::move(back));
    }
    return passes;
}

LoopSchedule compile(const ModeUnitary &u, const LoopConfig &config, double tol) {
    config.validate();
    if (u.dim() != config.n_bins) {
        throw std::invalid_argument(
            "unitary dimension " + std::to_string(u.dim()) + " does not match the " + std::to_string(config.n_bins) +
            "-bin train");
    }
    const std::size_t n = config.n_bins;
    auto dec = reck_decompose(u);
    TrainTracker train(n);
    std::vector<PassSettings> passes;

    for (const auto &op : dec.ops) {
        if (op.theta == 0 && op.trailing_phases.empty()) {
            continue;
        }
        Eigen::Matrix2cd b = op.block();
        std::size_t lower = op.i;
        std::size_t upper = op.j;
        if (train.pos[lower] > train.pos[upper]) {
            std::swap(lower, upper);
            Eigen::Matrix2cd flipped;
            flipped << b(1, 1), b(1, 0), b(0, 1), b(0, 0);
            b = flipped;
        }
        PassSettings pass = PassSettings::pass_through(n);
        for (std::size_t q = train.pos[lower]; q + 1 < train.pos[upper]; q++) {
            train.swap(pass, q, 0);
        }
        Eigen::Matrix2cd lam = Eigen::Matrix2cd::Zero();
        lam(0, 0) = train.phase[lower];
        lam(1, 1) = train.phase[upper];
        Eigen::Matrix2cd physical = lam * b * lam.adjoint();
        if (!op.trailing_phases.empty() && std::abs(std::abs(physical(0, 0)) - physical(0, 0).real()) > 1e-12) {
            throw std::invalid_argument("pairwise op with trailing phases cannot be realized by one coupling");
        }
        pass.coupling(train.pos[upper] - 1) = setting_from_block(physical);
        passes.push_back(std::move(pass));
    }

    while (!train.sorted()) {
        PassSettings pass = PassSettings::pass_through(n);
        for (std::size_t t = 0; t + 1 < n; t++) {
            if (train.occupant[t] > train.occupant[t + 1]) {
                train.swap(pass, t, 0);
            }
        }
        passes.push_back(std::move(pass));
    }

    // Residual diagonal, up to a global phase. A pair of full transfers on
    // (k, k+1) with phases (beta, 0) gives diag(-e^{i beta}, -e^{-i beta}).
    std::vector<double> residual(n);
    bool flat = true;
    for (std::size_t k = 0; k < n; k++) {
        residual[k] = dec.phases[k] - std::arg(train.phase[k]);
        flat = flat && std::abs(wrap(residual[k] - residual[0])) < 1e-13;
    }
    if (!flat) {
        std::vector<double> pairs_at(n);
        double sum_pairs = 0;
        double sum_residual = 0;
        for (std::size_t k = 0; k < n; k++) {
            pairs_at[k] = (k > 0 ? 1 : 0) + (k + 1 < n ? 1 : 0);
            sum_pairs += pairs_at[k];
            sum_residual += residual[k];
        }
        double gamma = (pi * sum_pairs - sum_residual) / static_cast<double>(n);
        std::vector<double> beta(n - 1);
        double prev = 0;
        for (std::size_t k = 0; k + 1 < n; k++) {
            beta[k] = prev + residual[k] + gamma - pi * pairs_at[k];
            prev = beta[k];
        }
        for (std::size_t parity = 0; parity < 2 && parity + 1 < n; parity++) {
            PassSettings first = PassSettings::pass_through(n);
            PassSettings second = PassSettings::pass_through(n);
            for (std::size_t k = parity; k + 1 < n; k += 2) {
                first.coupling(k) = CentralSetting{pi / 2, wrap(beta[k])};
                second.coupling(k) = CentralSetting{pi / 2, 0};
            }
            passes.push_back(std::move(first));
            passes.push_back(std::move(second));
        }
    }

    auto schedule = LoopSchedule::passive(config, std::move(passes));
    auto check = verify_schedule(schedule, u, tol);
    if (!check.ok) {
        throw CompileError("compiled schedule misses the target by " + std::to_string(check.error), check.error);
    }
    return schedule;
}

Verification verify_schedule(const LoopSchedule &schedule, const ModeUnitary &u, double tol) {
    auto eu = effective_unitary(schedule);
    if (eu.dim() != u.dim()) {
        throw std::invalid_argument("schedule and target have different dimensions");
    }
    Verification v;
    v.error = phase_free_distance(eu.matrix(), u.matrix());
    v.ok = v.error < tol;
    return v;
}

}  // namespace fiberloop
