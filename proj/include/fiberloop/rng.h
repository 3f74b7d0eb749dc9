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

#ifndef FIBERLOOP_RNG_H
#define FIBERLOOP_RNG_H

#include <cstdint>
#include <random>

namespace fiberloop {

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random source. Sub-streams are derived from (seed, stream index)
/// so that independent tasks can be replayed in any order.
class Rng {
   public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const {
        return seed_;
    }
    std::uint64_t next() {
        return engine_();
    }
    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform();
    bool bernoulli(double p) {
        return uniform() < p;
    }
    Rng split(std::uint64_t stream) const;

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace fiberloop

#endif
