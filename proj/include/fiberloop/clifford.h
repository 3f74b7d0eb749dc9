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

#ifndef FIBERLOOP_CLIFFORD_H
#define FIBERLOOP_CLIFFORD_H

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <utility>

namespace fiberloop {

enum class Pauli { kI, kX, kY, kZ };

Eigen::Matrix2cd pauli_matrix(Pauli p);
char pauli_name(Pauli p);

/// Single-qubit Clifford up to global phase (24 elements).
///
/// Tags are the shortest words over {H, S} in application order, so "HS"
/// means H first and then S. The identity is "I".
class LocalClifford {
   public:
    LocalClifford();

    static LocalClifford identity();
    static LocalClifford from_index(int index);
    /// Throws std::invalid_argument if `m` is not a Clifford up to phase.
    static LocalClifford from_matrix(const Eigen::Matrix2cd &m);
    /// Accepts words over {I, H, S, X, Y, Z} in application order.
    static LocalClifford parse(std::string_view tag);

    int index() const { return index_; }
    const Eigen::Matrix2cd &matrix() const;
    const std::string &tag() const;
    bool is_identity() const { return index_ == 0; }

    /// (a * b) applies b first.
    LocalClifford operator*(const LocalClifford &other) const;
    LocalClifford inverse() const;

    /// Returns (sign, Q) with C^dagger P C = sign * Q.
    std::pair<int, Pauli> conjugate_pauli(Pauli p) const;

    bool operator==(const LocalClifford &) const = default;

   private:
    explicit LocalClifford(int index) : index_(index) {}
    int index_ = 0;
};

}  // namespace fiberloop

#endif
