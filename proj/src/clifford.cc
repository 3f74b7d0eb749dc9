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

#include "fiberloop/clifford.h"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "fiberloop/fock.h"

namespace fiberloop {

namespace {

struct Table {
    std::vector<Eigen::Matrix2cd> matrices;
    std::vector<std::string> tags;
};

Eigen::Matrix2cd gate_h() {
    Eigen::Matrix2cd m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Eigen::Matrix2cd gate_s() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, cplx(0, 1);
    return m;
}

int find(const Table &t, const Eigen::Matrix2cd &m) {
    for (std::size_t k = 0; k < t.matrices.size(); k++) {
        if (phase_free_distance(t.matrices[k], m) < 1e-9) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

const Table &table() {
    static const Table t = [] {
        Table t;
        t.matrices.push_back(Eigen::Matrix2cd::Identity());
        t.tags.push_back("I");
        const std::pair<char, Eigen::Matrix2cd> gens[] = {{'H', gate_h()}, {'S', gate_s()}};
        std::deque<int> queue{0};
        while (!queue.empty()) {
            int k = queue.front();
            queue.pop_front();
            for (const auto &[name, g] : gens) {
                Eigen::Matrix2cd m = g * t.matrices[static_cast<std::size_t>(k)];
                if (find(t, m) >= 0) {
                    continue;
                }
                std::string word = k == 0 ? std::string() : t.tags[static_cast<std::size_t>(k)];
                t.matrices.push_back(m);
                t.tags.push_back(word + name);
                queue.push_back(static_cast<int>(t.matrices.size()) - 1);
            }
        }
        if (t.matrices.size() != 24) {
            throw std::logic_error("local Clifford table has wrong size");
        }
        return t;
    }();
    return t;
}

}  // namespace

Eigen::Matrix2cd pauli_matrix(Pauli p) {
    Eigen::Matrix2cd m;
    switch (p) {
        case Pauli::kI:
            m << 1, 0, 0, 1;
            break;
        case Pauli::kX:
            m << 0, 1, 1, 0;
            break;
        case Pauli::kY:
            m << 0, cplx(0, -1), cplx(0, 1), 0;
            break;
        case Pauli::kZ:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

char pauli_name(Pauli p) {
    return "IXYZ"[static_cast<int>(p)];
}

LocalClifford::LocalClifford() = default;

LocalClifford LocalClifford::identity() {
    return LocalClifford(0);
}

LocalClifford LocalClifford::from_index(int index) {
    if (index < 0 || index >= 24) {
        throw std::out_of_range("local Clifford index out of range");
    }
    return LocalClifford(index);
}

LocalClifford LocalClifford::from_matrix(const Eigen::Matrix2cd &m) {
    int k = find(table(), m);
    if (k < 0) {
        throw std::invalid_argument("matrix is not a single-qubit Clifford");
    }
    return LocalClifford(k);
}

LocalClifford LocalClifford::parse(std::string_view tag) {
    if (tag.empty()) {
        throw std::invalid_argument("empty Clifford tag");
    }
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    for (char c : tag) {
        switch (c) {
            case 'I':
                break;
            case 'H':
                m = gate_h() * m;
                break;
            case 'S':
                m = gate_s() * m;
                break;
            case 'X':
                m = pauli_matrix(Pauli::kX) * m;
                break;
            case 'Y':
                m = pauli_matrix(Pauli::kY) * m;
                break;
            case 'Z':
                m = pauli_matrix(Pauli::kZ) * m;
                break;
            default:
                throw std::invalid_argument("unknown Clifford letter '" + std::string(1, c) + "'");
        }
    }
    return from_matrix(m);
}

const Eigen::Matrix2cd &LocalClifford::matrix() const {
    return table().matrices[static_cast<std::size_t>(index_)];
}

const std::string &LocalClifford::tag() const {
    return table().tags[static_cast<std::size_t>(index_)];
}

LocalClifford LocalClifford::operator*(const LocalClifford &other) const {
    return from_matrix(matrix() * other.matrix());
}

LocalClifford LocalClifford::inverse() const {
    return from_matrix(matrix().adjoint());
}

std::pair<int, Pauli> LocalClifford::conjugate_pauli(Pauli p) const {
    if (p == Pauli::kI) {
        return {1, Pauli::kI};
    }
    Eigen::Matrix2cd c = matrix().adjoint() * pauli_matrix(p) * matrix();
    for (Pauli q : {Pauli::kX, Pauli::kY, Pauli::kZ}) {
        for (int sign : {1, -1}) {
            if ((c - static_cast<double>(sign) * pauli_matrix(q)).cwiseAbs().maxCoeff() < 1e-9) {
                return {sign, q};
            }
        }
    }
    throw std::logic_error("Clifford conjugation did not return a Pauli");
}

}  // namespace fiberloop
