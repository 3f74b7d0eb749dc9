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

#include "fiberloop/random.h"

#include <cmath>
#include <numbers>

namespace fiberloop {

double normal(Rng &rng) {
    double u1 = rng.uniform();
    while (u1 <= 0) {
        u1 = rng.uniform();
    }
    double u2 = rng.uniform();
    return std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

ModeUnitary haar_unitary(std::size_t n, Rng &rng) {
    auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd z(dim, dim);
    for (Eigen::Index r = 0; r < dim; r++) {
        for (Eigen::Index c = 0; c < dim; c++) {
            double re = normal(rng);
            double im = normal(rng);
            z(r, c) = cplx(re, im) / std::sqrt(2.0);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; k++) {
        cplx d = r(k, k);
        q.col(k) *= std::abs(d) > 0 ? d / std::abs(d) : cplx(1, 0);
    }
    return ModeUnitary(std::move(q));
}

FockState random_state(std::size_t n_modes, int photons, Rng &rng) {
    FockState s(n_modes, photons);
    for (const auto &occ : enumerate_occupations(n_modes, photons)) {
        double re = normal(rng);
        double im = normal(rng);
        s.add(occ, cplx(re, im));
    }
    return s.normalized();
}

}  // namespace fiberloop
