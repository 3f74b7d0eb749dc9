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

#ifndef FIBERLOOP_LOOP_MACHINE_H
#define FIBERLOOP_LOOP_MACHINE_H

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fiberloop/fock.h"

namespace fiberloop {

class Rng;

/// Timing of the two nested loops. The inner loop has round trip `tau`; the
/// outer loop holds `outer_delay_bins` bins and must exceed the train length.
struct LoopConfig {
    double tau = 1;
    std::size_t n_bins = 0;
    std::size_t outer_delay_bins = 0;

    static LoopConfig for_train(std::size_t n_bins, double tau = 1);
    void validate() const;
    bool operator==(const LoopConfig &) const = default;
};

struct CentralSetting {
    double theta = 0;
    double phi = 0;
    bool operator==(const CentralSetting &) const = default;
};

/// Settings for one round trip of the outer loop over a train of n bins.
///
/// `central` has n + 1 ticks. Tick 0 couples the first bin into the inner
/// loop and tick n releases the last stored bin; both must be pass-through
/// (theta = 0). Interior tick t mixes the stored bin (train position t - 1)
/// with the arriving bin (position t).
///
/// `entry` and `exit` hold one switch state per bin; true keeps the bin
/// circulating in the outer loop.
struct PassSettings {
    std::vector<bool> entry;
    std::vector<CentralSetting> central;
    std::vector<bool> exit;

    static PassSettings pass_through(std::size_t n_bins);
    std::size_t train_length() const {
        return central.empty() ? 0 : central.size() - 1;
    }
    /// Setting applied to train positions (p, p + 1).
    CentralSetting &coupling(std::size_t p) {
        return central.at(p + 1);
    }
    bool is_binary(double tol = 1e-12) const;
    void validate(std::size_t n_bins) const;
    bool operator==(const PassSettings &) const = default;
};

/// One iteration: inject, run passes, extract trailing bins.
struct Round {
    std::optional<FockState> injection;
    std::vector<PassSettings> passes;
    std::vector<std::size_t> extraction;
};

struct LoopSchedule {
    LoopConfig config;
    std::vector<Round> rounds;

    /// A schedule of one round containing only passive passes.
    static LoopSchedule passive(LoopConfig config, std::vector<PassSettings> passes);
    std::size_t pass_count() const;
    bool is_passive() const;
    bool is_binary() const;
    /// Checks lengths and train bookkeeping against an initial train of config.n_bins.
    void validate() const;
};

struct MeasurementRecord {
    struct Entry {
        std::size_t round = 0;
        Occupation outcome;
        bool operator==(const Entry &) const = default;
    };
    std::vector<Entry> entries;

    bool operator==(const MeasurementRecord &) const = default;
};

/// One line of the machine timeline.
struct TraceRecord {
    std::size_t round = 0;
    std::string stage;  // "inject", "pass" or "extract"
    std::size_t pass = 0;
    std::size_t tick = 0;
    bool entry = true;
    bool exit = true;
    double theta = 0;
    double phi = 0;
    int detector = -1;  // photons counted at this tick, -1 when the detector is idle
};

/// Operational model of the two-loop architecture.
///
/// The train is a FockState whose mode k is bin k. Passes are simulated tick
/// by tick through an explicit inner-loop mode.
class Machine {
   public:
    explicit Machine(LoopConfig config);

    const LoopConfig &config() const {
        return config_;
    }
    bool loaded() const {
        return loaded_;
    }
    std::size_t train_length() const {
        return train_.n_modes();
    }
    const FockState &train() const {
        return train_;
    }
    const MeasurementRecord &record() const {
        return record_;
    }
    const std::vector<TraceRecord> &trace() const {
        return trace_;
    }
    std::size_t round() const {
        return round_;
    }

    void load_pulse_train(FockState state);
    void run_pass(const PassSettings &settings);
    void inject_ancilla(const FockState &ancilla);

    struct Extraction {
        Occupation outcome;
        double probability = 0;
    };
    /// Routes trailing `bins` to the detector and samples the outcome.
    Extraction extract_ancilla(const std::vector<std::size_t> &bins, Rng &rng);
    /// As above but conditions on `forced`. A zero-probability pattern leaves an empty train.
    Extraction extract_ancilla(const std::vector<std::size_t> &bins, const Occupation &forced);

    void end_round() {
        round_++;
        pass_in_round_ = 0;
    }
    /// Global phase picked up per outer round trip. Zero for ideal fibers.
    void set_round_trip_phase(double radians) {
        round_trip_phase_ = radians;
    }

   private:
    void check_trailing(const std::vector<std::size_t> &bins) const;
    Extraction finish_extraction(std::size_t count, Occupation outcome, FockState rest, double probability);

    LoopConfig config_;
    FockState train_;
    bool loaded_ = false;
    MeasurementRecord record_;
    std::vector<TraceRecord> trace_;
    std::size_t round_ = 0;
    std::size_t pass_in_round_ = 0;
    double round_trip_phase_ = 0;
};

/// Feed-forward hook, called after the extraction of every round that has a
/// successor. It may return replacement passes for round `next_round`.
using Controller =
    std::function<std::optional<std::vector<PassSettings>>(std::size_t next_round, const MeasurementRecord &record)>;

/// How extraction outcomes are produced.
struct HeraldPolicy {
    Rng *rng = nullptr;
    /// Outcomes forced per round (post-selection). Rounds not listed are sampled.
    std::map<std::size_t, Occupation> forced;
};

struct RunResult {
    FockState final_state;
    MeasurementRecord record;
    std::vector<TraceRecord> trace;
    /// Probability of each round's observed extraction outcome.
    std::vector<double> outcome_probabilities;
};

RunResult run_schedule(
    Machine &machine, const LoopSchedule &schedule, const HeraldPolicy &policy, const Controller &controller = {});

/// Mode unitary realized by a passive schedule, read off by sending a single
/// photon through each bin.
ModeUnitary effective_unitary(const LoopSchedule &schedule);

}  // namespace fiberloop

#endif
