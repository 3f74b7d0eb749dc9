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

#include "fiberloop/loop_machine.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fiberloop/rng.h"

namespace fiberloop {

namespace {

constexpr double kBoundaryTol = 1e-12;

// Removes the last mode, which must be empty.
FockState drop_last_mode(const FockState &s) {
    FockState out(s.n_modes() - 1, s.total_photons());
    for (const auto &[occ, amp] : s.terms()) {
        if (occ.back() != 0) {
            throw std::logic_error("inner loop still holds a photon at the end of a pass");
        }
        out.add(Occupation(occ.begin(), occ.end() - 1), amp);
    }
    return out;
}

// Beamsplitter on (stored, incoming) followed by routing: the "out" port is
// left in the incoming slot and the "loop" port in the loop mode.
Eigen::Matrix2cd tick_matrix(const CentralSetting &s) {
    Eigen::Matrix2cd b = beamsplitter_block(s.theta, s.phi);
    Eigen::Matrix2cd routed;
    routed.row(0) = b.row(1);
    routed.row(1) = b.row(0);
    return routed;
}

}  // namespace

LoopConfig LoopConfig::for_train(std::size_t n_bins, double tau) {
    return LoopConfig{tau, n_bins, n_bins + 1};
}

void LoopConfig::validate() const {
    if (!(tau > 0) || !std::isfinite(tau)) {
        throw std::invalid_argument("tau must be positive");
    }
    if (n_bins == 0) {
        throw std::invalid_argument("pulse train needs at least one bin");
    }
    if (outer_delay_bins <= n_bins) {
        throw std::invalid_argument(
            "outer loop round trip (" + std::to_string(outer_delay_bins) + " bins) must exceed the train length (" +
            std::to_string(n_bins) + " bins)");
    }
}

PassSettings PassSettings::pass_through(std::size_t n_bins) {
    PassSettings p;
    p.entry.assign(n_bins, true);
    p.exit.assign(n_bins, true);
    p.central.assign(n_bins + 1, CentralSetting{});
    return p;
}

bool PassSettings::is_binary(double tol) const {
    for (const auto &c : central) {
        double s = std::abs(std::sin(c.theta));
        if (s > tol && std::abs(s - 1) > tol) {
            return false;
        }
    }
    return true;
}

void PassSettings::validate(std::size_t n_bins) const {
    if (central.size() != n_bins + 1) {
        throw std::invalid_argument(
            "pass has " + std::to_string(central.size()) + " central ticks, expected " + std::to_string(n_bins + 1));
    }
    if (entry.size() != n_bins || exit.size() != n_bins) {
        throw std::invalid_argument("switch settings must list one state per bin");
    }
    if (std::abs(central.front().theta) > kBoundaryTol || std::abs(central.back().theta) > kBoundaryTol) {
        throw std::invalid_argument("boundary ticks of a pass must be pass-through (theta = 0)");
    }
}

LoopSchedule LoopSchedule::passive(LoopConfig config, std::vector<PassSettings> passes) {
    LoopSchedule s;
    s.config = config;
    s.rounds.push_back(Round{std::nullopt, std::move(passes), {}});
    return s;
}

std::size_t LoopSchedule::pass_count() const {
    std::size_t n = 0;
    for (const auto &r : rounds) {
        n += r.passes.size();
    }
    return n;
}

bool LoopSchedule::is_passive() const {
    return std::all_of(rounds.begin(), rounds.end(), [](const Round &r) {
        return !r.injection.has_value() && r.extraction.empty();
    });
}

bool LoopSchedule::is_binary() const {
    for (const auto &r : rounds) {
        for (const auto &p : r.passes) {
            if (!p.is_binary()) {
                return false;
            }
        }
    }
    return true;
}

void LoopSchedule::validate() const {
    config.validate();
    std::size_t len = config.n_bins;
    for (std::size_t r = 0; r < rounds.size(); r++) {
        const auto &round = rounds[r];
        if (round.injection) {
            len += round.injection->n_modes();
            if (len >= config.outer_delay_bins) {
                throw std::invalid_argument("round " + std::to_string(r) + " injection overflows the outer loop");
            }
        }
        for (const auto &p : round.passes) {
            p.validate(len);
        }
        std::vector<std::size_t> bins = round.extraction;
        std::sort(bins.begin(), bins.end());
        for (std::size_t k = 0; k < bins.size(); k++) {
            if (bins[k] != len - bins.size() + k) {
                throw std::invalid_argument(
                    "round " + std::to_string(r) + " extraction is not the trailing segment of the train");
            }
        }
        len -= bins.size();
    }
}

Machine::Machine(LoopConfig config) : config_(config) {
    config_.validate();
}

void Machine::load_pulse_train(FockState state) {
    if (loaded_) {
        throw std::logic_error("pulse train already loaded");
    }
    if (state.n_modes() != config_.n_bins) {
        throw std::invalid_argument(
            "state has " + std::to_string(state.n_modes()) + " modes but the machine holds " +
            std::to_string(config_.n_bins) + " bins");
    }
    train_ = std::move(state);
    loaded_ = true;
}

void Machine::run_pass(const PassSettings &settings) {
    if (!loaded_) {
        throw std::logic_error("no pulse train loaded");
    }
    std::size_t n = train_length();
    settings.validate(n);
    if (!std::all_of(settings.entry.begin(), settings.entry.end(), [](bool b) { return b; }) ||
        !std::all_of(settings.exit.begin(), settings.exit.end(), [](bool b) { return b; })) {
        throw std::invalid_argument("a passive pass must keep every bin circulating; use inject/extract for routing");
    }

    EvolveOptions opts;
    opts.check_unitary = false;
    FockState s = append_modes(train_, {0});
    const std::size_t loop = n;
    for (std::size_t t = 0; t <= n; t++) {
        // The final tick has no arriving bin; mode 0 has been vacated by tick 0.
        std::size_t incoming = t < n ? t : 0;
        std::size_t modes[] = {loop, incoming};
        s = apply_on_modes(s, modes, tick_matrix(settings.central[t]), opts);

        TraceRecord rec;
        rec.round = round_;
        rec.stage = "pass";
        rec.pass = pass_in_round_;
        rec.tick = t;
        rec.entry = t < n ? settings.entry[t] : true;
        rec.exit = t > 0 ? settings.exit[t - 1] : true;
        rec.theta = settings.central[t].theta;
        rec.phi = settings.central[t].phi;
        trace_.push_back(rec);
    }
    // Output slot k sits in mode k + 1, except the last slot which sits in mode 0.
    std::vector<std::size_t> image(n + 1);
    for (std::size_t m = 1; m < n; m++) {
        image[m] = m - 1;
    }
    image[0] = n - 1;
    image[loop] = loop;
    s = permute_modes(s, image);
    train_ = drop_last_mode(s);
    if (round_trip_phase_ != 0) {
        train_ = train_.scaled(std::polar(1.0, round_trip_phase_));
    }
    pass_in_round_++;
}

void Machine::inject_ancilla(const FockState &ancilla) {
    if (!loaded_) {
        throw std::logic_error("no pulse train loaded");
    }
    std::size_t n = train_length();
    std::size_t len = n + ancilla.n_modes();
    if (len >= config_.outer_delay_bins) {
        throw std::length_error(
            "injecting " + std::to_string(ancilla.n_modes()) + " bins would overflow the outer loop (" +
            std::to_string(config_.outer_delay_bins) + " bins)");
    }
    if (ancilla.n_modes() == 0) {
        return;
    }
    train_ = tensor(train_, ancilla);
    for (std::size_t t = 0; t < len; t++) {
        TraceRecord rec;
        rec.round = round_;
        rec.stage = "inject";
        rec.tick = t;
        rec.entry = t < n;
        trace_.push_back(rec);
    }
}

void Machine::check_trailing(const std::vector<std::size_t> &bins) const {
    if (!loaded_) {
        throw std::logic_error("no pulse train loaded");
    }
    std::size_t n = train_length();
    std::vector<std::size_t> sorted = bins;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); k++) {
        if (sorted[k] >= n) {
            throw std::out_of_range("extraction bin " + std::to_string(sorted[k]) + " beyond the train");
        }
        if (sorted[k] != n - sorted.size() + k) {
            throw std::invalid_argument("extraction bins must be the trailing segment of the train");
        }
    }
}

Machine::Extraction Machine::finish_extraction(std::size_t count, Occupation outcome, FockState rest, double probability) {
    std::size_t n = train_length();
    train_ = std::move(rest);
    record_.entries.push_back({round_, outcome});
    for (std::size_t t = 0; t < n; t++) {
        TraceRecord rec;
        rec.round = round_;
        rec.stage = "extract";
        rec.tick = t;
        rec.exit = t < n - count;
        if (!rec.exit) {
            rec.detector = outcome[t - (n - count)];
        }
        trace_.push_back(rec);
    }
    pass_in_round_ = 0;
    return Extraction{std::move(outcome), probability};
}

Machine::Extraction Machine::extract_ancilla(const std::vector<std::size_t> &bins, Rng &rng) {
    check_trailing(bins);
    if (bins.empty()) {
        return Extraction{{}, 1.0};
    }
    std::size_t n = train_length();
    std::vector<std::size_t> modes;
    for (std::size_t k = n - bins.size(); k < n; k++) {
        modes.push_back(k);
    }
    auto m = measure_modes(train_, modes, rng);
    return finish_extraction(bins.size(), std::move(m.outcome), std::move(m.state), m.probability);
}

Machine::Extraction Machine::extract_ancilla(const std::vector<std::size_t> &bins, const Occupation &forced) {
    check_trailing(bins);
    if (bins.empty()) {
        return Extraction{{}, 1.0};
    }
    std::size_t n = train_length();
    std::vector<std::size_t> modes;
    for (std::size_t k = n - bins.size(); k < n; k++) {
        modes.push_back(k);
    }
    auto sel = post_select(train_, modes, forced);
    return finish_extraction(bins.size(), forced, std::move(sel.state), sel.probability);
}

RunResult run_schedule(
    Machine &machine, const LoopSchedule &schedule, const HeraldPolicy &policy, const Controller &controller) {
    schedule.validate();
    if (!(schedule.config == machine.config())) {
        throw std::invalid_argument("schedule configuration does not match the machine");
    }
    if (!machine.loaded()) {
        throw std::logic_error("no pulse train loaded");
    }
    if (machine.train_length() != schedule.config.n_bins) {
        throw std::invalid_argument("machine train length differs from the schedule's initial train");
    }

    std::vector<std::vector<PassSettings>> passes;
    for (const auto &r : schedule.rounds) {
        passes.push_back(r.passes);
    }

    RunResult result;
    for (std::size_t r = 0; r < schedule.rounds.size(); r++) {
        const auto &round = schedule.rounds[r];
        if (round.injection) {
            machine.inject_ancilla(*round.injection);
        }
        for (const auto &p : passes[r]) {
            machine.run_pass(p);
        }
        if (!round.extraction.empty()) {
            Machine::Extraction ex;
            auto forced = policy.forced.find(r);
            if (forced != policy.forced.end()) {
                ex = machine.extract_ancilla(round.extraction, forced->second);
            } else if (policy.rng != nullptr) {
                ex = machine.extract_ancilla(round.extraction, *policy.rng);
            } else {
                throw std::invalid_argument("round " + std::to_string(r) + " extracts bins but no randomness was given");
            }
            result.outcome_probabilities.push_back(ex.probability);
        }
        if (controller && r + 1 < schedule.rounds.size()) {
            auto replacement = controller(r + 1, machine.record());
            if (replacement) {
                std::size_t next_len = machine.train_length();
                if (schedule.rounds[r + 1].injection) {
                    next_len += schedule.rounds[r + 1].injection->n_modes();
                }
                for (const auto &p : *replacement) {
                    try {
                        p.validate(next_len);
                    } catch (const std::invalid_argument &e) {
                        throw std::invalid_argument(std::string("controller returned malformed settings: ") + e.what());
                    }
                }
                passes[r + 1] = std::move(*replacement);
            }
        }
        machine.end_round();
    }
    result.final_state = machine.train();
    result.record = machine.record();
    result.trace = machine.trace();
    return result;
}

ModeUnitary effective_unitary(const LoopSchedule &schedule) {
    if (!schedule.is_passive()) {
        throw std::invalid_argument("schedule contains injection or extraction; no single mode unitary exists");
    }
    schedule.validate();
    std::size_t n = schedule.config.n_bins;
    auto d = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t k = 0; k < n; k++) {
        Occupation occ(n, 0);
        occ[k] = 1;
        Machine m(schedule.config);
        m.load_pulse_train(FockState::basis(occ));
        for (const auto &r : schedule.rounds) {
            for (const auto &p : r.passes) {
                m.run_pass(p);
            }
        }
        for (const auto &[out, amp] : m.train().terms()) {
            auto row = std::find(out.begin(), out.end(), 1) - out.begin();
            u(row, static_cast<Eigen::Index>(k)) = amp;
        }
    }
    return ModeUnitary(std::move(u));
}

}  // namespace fiberloop
