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

#ifndef FIBERLOOP_RANDOM_H
#define FIBERLOOP_RANDOM_H

#include <cstddef>

#include "fiberloop/fock.h"
#include "fiberloop/rng.h"

namespace fiberloop {

/// Standard normal deviate (Box-Muller).
double normal(Rng &rng);

/// Haar-random n x n unitary: QR of a complex Gaussian matrix with the
/// diagonal phases of R divided out.
ModeUnitary haar_unitary(std::size_t n, Rng &rng);

/// Normalized state with Gaussian amplitudes on every occupation of the sector.
FockState random_state(std::size_t n_modes, int photons, Rng &rng);

}  // namespace fiberloop

#endif
