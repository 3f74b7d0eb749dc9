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

#ifndef FIBERLOOP_KLM_H
#define FIBERLOOP_KLM_H

#include <array>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "fiberloop/fock.h"
#include "fiberloop/loop_machine.h"
#include "fiberloop/reck.h"

namespace fiberloop {

class Rng;

/// Two modes carrying one dual-rail qubit: |0>_L = photon in rail0.
/// For time-bin qubits rail0 is bin t and rail1 is bin t + tau.
struct ModePair {
    std::size_t rail0 = 0;
    std::size_t rail1 = 1;
    bool operator==(const ModePair &) const = default;
};

// Nonlinear sign gate on (signal, ancilla photon, ancilla vacuum): beamsplitter
// on the ancillas, then signal-ancilla, then the ancillas again. Heralding
// one photon in the first ancilla and none in the second gives amplitudes
// (-1/2, -1/2, +1/2) on 0, 1, 2 signal photons.
inline constexpr double kNsTheta1 = std::numbers::pi / 8;
inline constexpr double kNsTheta2 = 1.9978749131873727447;
inline constexpr double kNsTheta3 = std::numbers::pi / 8;

inline const Occupation kNsAncilla = {1, 0};
inline const Occupation kNsHerald = {1, 0};
inline const Occupation kCzAncilla = {1, 0, 1, 0};
inline const Occupation kCzHerald = {1, 0, 1, 0};

/// 3x3 mode unitary of the NS circuit.
ModeUnitary ns_unitary();

/// 8-mode CZ gadget on [a0, a1, b0, b1, ns_a photon, ns_a vacuum, ns_b photon, ns_b vacuum].
ModeUnitary cz_gadget_unitary();

/// Embeds a k x k block acting on `modes` into a dim x dim identity.
ModeUnitary embed(const Eigen::MatrixXcd &block, std::span<const std::size_t> modes, std::size_t dim);

/// a0 |1,0> + a1 |0,1> on `pair`, added to `context` (which must leave the pair empty).
FockState encode_dual_rail(cplx a0, cplx a1, ModePair pair, const FockState &context);
FockState encode_dual_rail(cplx a0, cplx a1);

/// Recovers (a0, a1) up to global phase, normalized with a0 real and non-negative.
/// Throws if the pair leaves the single-photon subspace or is entangled with the
/// other modes beyond `tol`.
std::array<cplx, 2> decode_dual_rail(const FockState &state, ModePair pair, double tol = kNormTolerance);

/// Beamsplitter plus trailing rail phases acting as V on the qubit.
PairwiseOp single_qubit_gate(const Eigen::Matrix2cd &v, ModePair qubit);
FockState apply_single_qubit_gate(const FockState &state, const Eigen::Matrix2cd &v, ModePair qubit);

enum class HeraldMode { kSample, kPostSelect };

struct HeraldedResult {
    /// Whether the observed (or forced) herald pattern is the success pattern.
    bool success = false;
    /// Probability of the success herald, whatever was observed.
    double probability = 0;
    Occupation pattern;
    /// Conditional state on the non-herald modes, normalized.
    FockState state;
};

/// Conditions `state` on `modes`, either sampling or forcing `success_pattern`.
HeraldedResult herald(
    const FockState &state,
    std::span<const std::size_t> modes,
    const Occupation &success_pattern,
    HeraldMode mode,
    Rng *rng);

/// NS gate on `target`, using two freshly appended ancilla modes.
HeraldedResult ns_gate(const FockState &state, std::size_t target, HeraldMode mode, Rng *rng = nullptr);

/// Heralded CZ between two dual-rail qubits, built from two NS gates between
/// 50:50 beamsplitters on the |1>-rails.
HeraldedResult cz_gate(const FockState &state, ModePair a, ModePair b, HeraldMode mode, Rng *rng = nullptr);

struct KlmRoundSpec {
    FockState ancilla;
    ModeUnitary unitary;  // acts on logical bins followed by ancilla bins
};

/// Feed-forward: may replace the unitary of `next_round` after seeing the record.
using KlmController =
    std::function<std::optional<ModeUnitary>(std::size_t next_round, const MeasurementRecord &record)>;

struct KlmRunResult {
    FockState logical;
    MeasurementRecord record;
    std::vector<double> outcome_probabilities;
    std::vector<TraceRecord> trace;
    LoopSchedule schedule;  // as planned, before feed-forward replacements
};

/// Runs the inject / compile+pass / extract iteration on the loop machine.
KlmRunResult run_klm(
    const FockState &logical,
    const std::vector<KlmRoundSpec> &rounds,
    const HeraldPolicy &policy,
    const KlmController &controller = {});

struct KlmRoundResult {
    FockState logical;
    Occupation outcome;
    double probability = 0;
};

KlmRoundResult klm_round(
    const FockState &logical, const FockState &ancilla, const ModeUnitary &u, const HeraldPolicy &policy);

}  // namespace fiberloop

#endif
