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

#ifndef FIBERLOOP_RECK_H
#define FIBERLOOP_RECK_H

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fiberloop/fock.h"
#include "fiberloop/loop_machine.h"

namespace fiberloop {

/// A beamsplitter between modes i < j, optionally followed by phases on (i, j).
struct PairwiseOp {
    std::size_t i = 0;
    std::size_t j = 1;
    double theta = 0;
    double phi = 0;
    /// Empty, or two phases applied to modes i and j after the beamsplitter.
    std::vector<double> trailing_phases;

    /// The 2x2 action on (i, j), phases included.
    Eigen::Matrix2cd block() const;
};

struct ReckDecomposition {
    /// In application order: ops[0] acts first.
    std::vector<PairwiseOp> ops;
    /// Diagonal phases applied after every op.
    std::vector<double> phases;
};

/// Triangular decomposition of a mode unitary into at most n(n-1)/2
/// beamsplitters and a final diagonal.
///
/// Rows are cleared from the bottom up. Entry (r, c) with c < r is nulled by
/// a beamsplitter on (c, r) acting from the right, so every op has theta in
/// [0, pi/2].
ReckDecomposition reck_decompose(const ModeUnitary &u, double tol = kUnitarityTolerance);

/// diag(phases) * T_m * ... * T_1.
ModeUnitary recompose(const std::vector<PairwiseOp> &ops, const std::vector<double> &phases);

/// Passes that apply one pairwise op to an n-bin train and leave every other
/// bin where it was. Costs j - i passes: one that carries bin i up next to
/// bin j and couples them, then one pass per step back down, since a bin can
/// only advance by one slot per round trip.
std::vector<PassSettings> pairwise_to_passes(const PairwiseOp &op, std::size_t n);

class CompileError : public std::runtime_error {
   public:
    CompileError(const std::string &what, double error) : std::runtime_error(what), error_(error) {
    }
    double error() const {
        return error_;
    }

   private:
    double error_;
};

inline constexpr double kVerifyTolerance = 1e-9;

/// Transpiles U into a passive schedule for `config`.
///
/// Ops are applied in decomposition order while the compiler tracks where
/// each logical mode currently sits in the train (and the sign it picked up
/// while being carried), so every op costs exactly one pass. The train is
/// sorted back at the end with binary passes, and the residual diagonal is
/// applied with pairs of full-transfer passes.
///
/// Pass count is at most n(n-1)/2 + (n-1) + 4. Throws CompileError if the
/// simulated schedule misses U by `tol` or more.
LoopSchedule compile(const ModeUnitary &u, const LoopConfig &config, double tol = kVerifyTolerance);

struct Verification {
    double error = 0;
    bool ok = false;
};

/// Phase-aligned max-norm distance between the schedule's effective unitary and U.
Verification verify_schedule(const LoopSchedule &schedule, const ModeUnitary &u, double tol = kVerifyTolerance);

}  // namespace fiberloop

#endif
