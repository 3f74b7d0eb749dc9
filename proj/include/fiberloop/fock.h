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

#ifndef FIBERLOOP_FOCK_H
#define FIBERLOOP_FOCK_H

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fiberloop {

class Rng;

using cplx = std::complex<double>;

/// Photon count per mode. Mode i of a pulse train is time-bin i.
using Occupation = std::vector<int>;

inline constexpr double kDefaultPruneThreshold = 1e-14;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr std::size_t kDefaultPermanentCap = 20;

/// Dense n x n unitary acting on single-photon amplitudes.
///
/// Column j is the image of the creation operator of mode j:
///     a_j^dag -> sum_i U(i, j) a_i^dag
/// so matrix products compose in application order: applying V and then U
/// is the same as applying U * V.
class ModeUnitary {
   public:
    ModeUnitary() = default;
    explicit ModeUnitary(Eigen::MatrixXcd entries);

    static ModeUnitary identity(std::size_t dim);
    /// Embedding of the central beamsplitter element on modes (i, j).
    static ModeUnitary beamsplitter(std::size_t dim, std::size_t i, std::size_t j, double theta, double phi);
    /// Maps mode k to mode image[k].
    static ModeUnitary permutation(std::span<const std::size_t> image);
    static ModeUnitary diagonal(std::span<const double> phases);

    std::size_t dim() const {
        return static_cast<std::size_t>(entries_.rows());
    }
    const Eigen::MatrixXcd &matrix() const {
        return entries_;
    }
    cplx operator()(std::size_t row, std::size_t col) const {
        return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    /// max |U^dag U - I|.
    double unitarity_error() const;
    bool is_unitary(double tol = kUnitarityTolerance) const {
        return unitarity_error() < tol;
    }

    ModeUnitary operator*(const ModeUnitary &other) const;

   private:
    Eigen::MatrixXcd entries_;
};

/// The 2x2 block of the central beamsplitter in column convention:
///     a_i^dag -> cos(theta) a_i^dag + e^{i phi} sin(theta) a_j^dag
///     a_j^dag -> -e^{-i phi} sin(theta) a_i^dag + cos(theta) a_j^dag
Eigen::Matrix2cd beamsplitter_block(double theta, double phi);

/// Smallest max-norm distance between e^{i g} a and b, with g aligned by tr(a^dag b).
double phase_free_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);

/// A multi-photon pure state restricted to one total-photon sector.
///
/// Amplitudes are stored sparsely, keyed by occupation vectors. States
/// produced by heralding may be sub-normalized; `norm_squared` then reports
/// the herald probability.
class FockState {
   public:
    FockState() = default;
    FockState(std::size_t n_modes, int total_photons);

    static FockState basis(Occupation occ);
    static FockState vacuum(std::size_t n_modes);

    std::size_t n_modes() const {
        return n_modes_;
    }
    int total_photons() const {
        return total_photons_;
    }
    const std::map<Occupation, cplx> &terms() const {
        return terms_;
    }
    bool empty() const {
        return terms_.empty();
    }

    cplx amplitude(const Occupation &occ) const;
    /// Adds `amp` to the amplitude of `occ`. Validates the key against the sector.
    void add(const Occupation &occ, cplx amp);

    double norm_squared() const;
    bool is_normalized(double tol = kNormTolerance) const;
    FockState normalized() const;
    FockState pruned(double threshold = kDefaultPruneThreshold) const;
    FockState scaled(cplx factor) const;

    bool operator==(const FockState &other) const = default;

   private:
    std::size_t n_modes_ = 0;
    int total_photons_ = 0;
    std::map<Occupation, cplx> terms_;
};

struct EvolveOptions {
    double prune_threshold = kDefaultPruneThreshold;
    bool check_unitary = true;
    double unitarity_tol = kUnitarityTolerance;
};

/// Applies U to every creation operator of the state (multinomial expansion).
FockState apply_mode_unitary(const FockState &state, const ModeUnitary &u, const EvolveOptions &opts = {});

/// Applies a small unitary to the listed modes only. `block` column k is the
/// image of modes[k].
FockState apply_on_modes(
    const FockState &state,
    std::span<const std::size_t> modes,
    const Eigen::MatrixXcd &block,
    const EvolveOptions &opts = {});

FockState apply_beamsplitter(
    const FockState &state, std::size_t i, std::size_t j, double theta, double phi, const EvolveOptions &opts = {});

/// Multiplies the creation operator of mode k by e^{i phases[k]}.
FockState apply_phases(const FockState &state, std::span<const double> phases);

/// Relabels modes: the content of mode k moves to mode image[k].
FockState permute_modes(const FockState &state, std::span<const std::size_t> image);

/// Tensor product with a basis state on `extra` freshly appended modes.
FockState append_modes(const FockState &state, const Occupation &extra);

/// Tensor product of two states; modes of `b` follow those of `a`.
FockState tensor(const FockState &a, const FockState &b);

/// <a|b>. Both states must share the mode count.
cplx inner_product(const FockState &a, const FockState &b);

/// |<a|b>|^2 / (|a|^2 |b|^2). Insensitive to global phase.
double fidelity(const FockState &a, const FockState &b);

struct PostSelection {
    /// Conditional state on the complementary modes, renormalized. Empty
    /// (no terms) when the pattern has zero probability.
    FockState state;
    double probability = 0;

    bool heralded() const {
        return probability > 0;
    }
};

/// Conditions on observing `pattern` on `modes`.
PostSelection post_select(const FockState &state, std::span<const std::size_t> modes, const Occupation &pattern);

/// Born-rule distribution of occupation patterns on `modes`.
std::map<Occupation, double> outcome_distribution(const FockState &state, std::span<const std::size_t> modes);

struct Measurement {
    Occupation outcome;
    FockState state;
    double probability = 0;
};

/// Samples an outcome on `modes` and returns the conditional state.
Measurement measure_modes(const FockState &state, std::span<const std::size_t> modes, Rng &rng);

/// Matrix permanent by Ryser's formula with Gray-code subset ordering.
/// Throws std::length_error above `cap` rows.
cplx permanent(const Eigen::MatrixXcd &m, std::size_t cap = kDefaultPermanentCap);

/// Probability of detecting `output` given `input` photons sent through `u`.
double output_probability(const ModeUnitary &u, const Occupation &input, const Occupation &output);

/// All occupation vectors of `n_modes` modes holding `photons` photons, in lexicographic order.
std::vector<Occupation> enumerate_occupations(std::size_t n_modes, int photons);

}  // namespace fiberloop

#endif
