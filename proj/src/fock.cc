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

#include "fiberloop/fock.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fiberloop/rng.h"

namespace fiberloop {

namespace {

double factorial(int n) {
    double r = 1;
    for (int k = 2; k <= n; k++) {
        r *= k;
    }
    return r;
}

void check_modes(std::span<const std::size_t> modes, std::size_t n_modes) {
    std::vector<bool> seen(n_modes, false);
    for (auto m : modes) {
        if (m >= n_modes) {
            throw std::out_of_range("mode " + std::to_string(m) + " out of range for " + std::to_string(n_modes) + " modes");
        }
        if (seen[m]) {
            throw std::invalid_argument("mode " + std::to_string(m) + " listed twice");
        }
        seen[m] = true;
    }
}

std::vector<std::size_t> complement_modes(std::span<const std::size_t> modes, std::size_t n_modes) {
    std::vector<bool> used(n_modes, false);
    for (auto m : modes) {
        used[m] = true;
    }
    std::vector<std::size_t> rest;
    for (std::size_t m = 0; m < n_modes; m++) {
        if (!used[m]) {
            rest.push_back(m);
        }
    }
    return rest;
}

}  // namespace

ModeUnitary::ModeUnitary(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("mode unitary must be square");
    }
}

ModeUnitary ModeUnitary::identity(std::size_t dim) {
    auto d = static_cast<Eigen::Index>(dim);
    return ModeUnitary(Eigen::MatrixXcd::Identity(d, d));
}

Eigen::Matrix2cd beamsplitter_block(double theta, double phi) {
    double c = std::cos(theta);
    double s = std::sin(theta);
    Eigen::Matrix2cd b;
    b(0, 0) = c;
    b(1, 0) = std::polar(s, phi);
    b(0, 1) = -std::polar(s, -phi);
    b(1, 1) = c;
    return b;
}

ModeUnitary ModeUnitary::beamsplitter(std::size_t dim, std::size_t i, std::size_t j, double theta, double phi) {
    if (i >= dim || j >= dim) {
        throw std::out_of_range("beamsplitter mode out of range");
    }
    if (i == j) {
        throw std::invalid_argument("beamsplitter needs two distinct modes");
    }
    auto u = identity(dim);
    Eigen::Matrix2cd b = beamsplitter_block(theta, phi);
    auto ii = static_cast<Eigen::Index>(i);
    auto jj = static_cast<Eigen::Index>(j);
    u.entries_(ii, ii) = b(0, 0);
    u.entries_(jj, ii) = b(1, 0);
    u.entries_(ii, jj) = b(0, 1);
    u.entries_(jj, jj) = b(1, 1);
    return u;
}

ModeUnitary ModeUnitary::permutation(std::span<const std::size_t> image) {
    auto n = static_cast<Eigen::Index>(image.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    std::vector<bool> hit(image.size(), false);
    for (std::size_t k = 0; k < image.size(); k++) {
        if (image[k] >= image.size() || hit[image[k]]) {
            throw std::invalid_argument("not a permutation");
        }
        hit[image[k]] = true;
        m(static_cast<Eigen::Index>(image[k]), static_cast<Eigen::Index>(k)) = 1;
    }
    return ModeUnitary(std::move(m));
}

ModeUnitary ModeUnitary::diagonal(std::span<const double> phases) {
    auto n = static_cast<Eigen::Index>(phases.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; k++) {
        m(k, k) = std::polar(1.0, phases[static_cast<std::size_t>(k)]);
    }
    return ModeUnitary(std::move(m));
}

double ModeUnitary::unitarity_error() const {
    if (entries_.size() == 0) {
        return 0;
    }
    Eigen::MatrixXcd d = entries_.adjoint() * entries_ - Eigen::MatrixXcd::Identity(entries_.rows(), entries_.cols());
    return d.cwiseAbs().maxCoeff();
}

ModeUnitary ModeUnitary::operator*(const ModeUnitary &other) const {
    if (dim() != other.dim()) {
        throw std::invalid_argument("mode unitary dimension mismatch");
    }
    return ModeUnitary(entries_ * other.entries_);
}

double phase_free_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix shape mismatch");
    }
    if (a.size() == 0) {
        return 0;
    }
    cplx t = (a.adjoint() * b).trace();
    double g = std::abs(t) > 0 ? std::arg(t) : 0.0;
    return (std::polar(1.0, g) * a - b).cwiseAbs().maxCoeff();
}

FockState::FockState(std::size_t n_modes, int total_photons) : n_modes_(n_modes), total_photons_(total_photons) {
    if (total_photons < 0) {
        throw std::invalid_argument("negative photon number");
    }
}

FockState FockState::basis(Occupation occ) {
    int total = 0;
    for (int c : occ) {
        if (c < 0) {
            throw std::invalid_argument("negative occupation");
        }
        total += c;
    }
    FockState s(occ.size(), total);
    s.terms_.emplace(std::move(occ), 1.0);
    return s;
}

FockState FockState::vacuum(std::size_t n_modes) {
    return basis(Occupation(n_modes, 0));
}

cplx FockState::amplitude(const Occupation &occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? cplx{0} : it->second;
}

void FockState::add(const Occupation &occ, cplx amp) {
    if (occ.size() != n_modes_) {
        throw std::invalid_argument(
            "occupation has " + std::to_string(occ.size()) + " modes, state has " + std::to_string(n_modes_));
    }
    int total = 0;
    for (int c : occ) {
        if (c < 0) {
            throw std::invalid_argument("negative occupation");
        }
        total += c;
    }
    if (total != total_photons_) {
        throw std::invalid_argument("occupation outside the " + std::to_string(total_photons_) + "-photon sector");
    }
    terms_[occ] += amp;
}

double FockState::norm_squared() const {
    double r = 0;
    for (const auto &[occ, a] : terms_) {
        r += std::norm(a);
    }
    return r;
}

bool FockState::is_normalized(double tol) const {
    return std::abs(norm_squared() - 1) < tol;
}

FockState FockState::normalized() const {
    double n = std::sqrt(norm_squared());
    if (n == 0) {
        throw std::domain_error("cannot normalize the zero state");
    }
    return scaled(1 / n);
}

FockState FockState::pruned(double threshold) const {
    FockState r(n_modes_, total_photons_);
    for (const auto &[occ, a] : terms_) {
        if (std::abs(a) >= threshold) {
            r.terms_.emplace(occ, a);
        }
    }
    return r;
}

FockState FockState::scaled(cplx factor) const {
    FockState r = *this;
    for (auto &[occ, a] : r.terms_) {
        a *= factor;
    }
    return r;
}

FockState apply_on_modes(
    const FockState &state,
    std::span<const std::size_t> modes,
    const Eigen::MatrixXcd &block,
    const EvolveOptions &opts) {
    check_modes(modes, state.n_modes());
    auto m = static_cast<Eigen::Index>(modes.size());
    if (block.rows() != m || block.cols() != m) {
        throw std::invalid_argument(
            "block is " + std::to_string(block.rows()) + "x" + std::to_string(block.cols()) + " but " +
            std::to_string(modes.size()) + " modes were given");
    }
    if (opts.check_unitary && m > 0) {
        double err = (block.adjoint() * block - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
        if (err >= opts.unitarity_tol) {
            throw std::invalid_argument("transformation is not unitary (error " + std::to_string(err) + ")");
        }
    }

    FockState out(state.n_modes(), state.total_photons());
    std::map<std::vector<int>, cplx> partial;
    std::map<std::vector<int>, cplx> next;
    for (const auto &[occ, amp] : state.terms()) {
        partial.clear();
        partial.emplace(std::vector<int>(modes.size(), 0), 1.0);
        double in_norm = 1;
        for (std::size_t k = 0; k < modes.size(); k++) {
            int count = occ[modes[k]];
            in_norm *= factorial(count);
            for (int p = 0; p < count; p++) {
                next.clear();
                for (const auto &[key, c] : partial) {
                    for (Eigen::Index r = 0; r < m; r++) {
                        cplx w = block(r, static_cast<Eigen::Index>(k));
                        if (w == cplx{0}) {
                            continue;
                        }
                        auto grown = key;
                        grown[static_cast<std::size_t>(r)]++;
                        next[grown] += c * w;
                    }
                }
                std::swap(partial, next);
            }
        }
        Occupation result = occ;
        for (const auto &[key, c] : partial) {
            double out_norm = 1;
            for (std::size_t r = 0; r < modes.size(); r++) {
                result[modes[r]] = key[r];
                out_norm *= factorial(key[r]);
            }
            out.add(result, amp * c * std::sqrt(out_norm / in_norm));
        }
    }
    return out.pruned(opts.prune_threshold);
}

FockState apply_mode_unitary(const FockState &state, const ModeUnitary &u, const EvolveOptions &opts) {
    if (u.dim() != state.n_modes()) {
        throw std::invalid_argument(
            "unitary dimension " + std::to_string(u.dim()) + " does not match " + std::to_string(state.n_modes()) +
            " modes");
    }
    std::vector<std::size_t> modes(state.n_modes());
    std::iota(modes.begin(), modes.end(), 0);
    return apply_on_modes(state, modes, u.matrix(), opts);
}

FockState apply_beamsplitter(
    const FockState &state, std::size_t i, std::size_t j, double theta, double phi, const EvolveOptions &opts) {
    if (i == j) {
        throw std::invalid_argument("beamsplitter needs two distinct modes");
    }
    std::size_t modes[] = {i, j};
    EvolveOptions o = opts;
    o.check_unitary = false;
    return apply_on_modes(state, modes, beamsplitter_block(theta, phi), o);
}

FockState apply_phases(const FockState &state, std::span<const double> phases) {
    if (phases.size() != state.n_modes()) {
        throw std::invalid_argument("phase count does not match mode count");
    }
    FockState out(state.n_modes(), state.total_photons());
    for (const auto &[occ, amp] : state.terms()) {
        double total = 0;
        for (std::size_t k = 0; k < occ.size(); k++) {
            total += occ[k] * phases[k];
        }
        out.add(occ, amp * std::polar(1.0, total));
    }
    return out;
}

FockState permute_modes(const FockState &state, std::span<const std::size_t> image) {
    if (image.size() != state.n_modes()) {
        throw std::invalid_argument("permutation size does not match mode count");
    }
    std::vector<bool> hit(image.size(), false);
    for (auto k : image) {
        if (k >= image.size() || hit[k]) {
            throw std::invalid_argument("not a permutation");
        }
        hit[k] = true;
    }
    FockState out(state.n_modes(), state.total_photons());
    Occupation moved(state.n_modes());
    for (const auto &[occ, amp] : state.terms()) {
        for (std::size_t k = 0; k < occ.size(); k++) {
            moved[image[k]] = occ[k];
        }
        out.add(moved, amp);
    }
    return out;
}

FockState append_modes(const FockState &state, const Occupation &extra) {
    return tensor(state, FockState::basis(extra));
}

FockState tensor(const FockState &a, const FockState &b) {
    FockState out(a.n_modes() + b.n_modes(), a.total_photons() + b.total_photons());
    for (const auto &[oa, xa] : a.terms()) {
        for (const auto &[ob, xb] : b.terms()) {
            Occupation joined = oa;
            joined.insert(joined.end(), ob.begin(), ob.end());
            out.add(joined, xa * xb);
        }
    }
    return out;
}

cplx inner_product(const FockState &a, const FockState &b) {
    if (a.n_modes() != b.n_modes()) {
        throw std::invalid_argument("inner product of states with different mode counts");
    }
    if (a.total_photons() != b.total_photons()) {
        return 0;
    }
    cplx r = 0;
    for (const auto &[occ, x] : a.terms()) {
        r += std::conj(x) * b.amplitude(occ);
    }
    return r;
}

double fidelity(const FockState &a, const FockState &b) {
    double na = a.norm_squared();
    double nb = b.norm_squared();
    if (na == 0 || nb == 0) {
        return 0;
    }
    return std::norm(inner_product(a, b)) / (na * nb);
}

PostSelection post_select(const FockState &state, std::span<const std::size_t> modes, const Occupation &pattern) {
    check_modes(modes, state.n_modes());
    if (pattern.size() != modes.size()) {
        throw std::invalid_argument("pattern length does not match the number of measured modes");
    }
    int taken = 0;
    for (int c : pattern) {
        if (c < 0) {
            throw std::invalid_argument("negative occupation in pattern");
        }
        taken += c;
    }
    auto rest = complement_modes(modes, state.n_modes());
    PostSelection result;
    if (taken > state.total_photons()) {
        result.state = FockState(rest.size(), 0);
        return result;
    }
    FockState residual(rest.size(), state.total_photons() - taken);
    Occupation key(rest.size());
    for (const auto &[occ, amp] : state.terms()) {
        bool match = true;
        for (std::size_t k = 0; k < modes.size() && match; k++) {
            match = occ[modes[k]] == pattern[k];
        }
        if (!match) {
            continue;
        }
        for (std::size_t k = 0; k < rest.size(); k++) {
            key[k] = occ[rest[k]];
        }
        residual.add(key, amp);
    }
    double total = state.norm_squared();
    double kept = residual.norm_squared();
    if (total == 0 || kept == 0) {
        result.state = FockState(rest.size(), state.total_photons() - taken);
        return result;
    }
    result.probability = kept / total;
    result.state = residual.normalized();
    return result;
}

std::map<Occupation, double> outcome_distribution(const FockState &state, std::span<const std::size_t> modes) {
    check_modes(modes, state.n_modes());
    std::map<Occupation, double> dist;
    double total = state.norm_squared();
    if (total == 0) {
        throw std::domain_error("cannot measure the zero state");
    }
    Occupation key(modes.size());
    for (const auto &[occ, amp] : state.terms()) {
        for (std::size_t k = 0; k < modes.size(); k++) {
            key[k] = occ[modes[k]];
        }
        dist[key] += std::norm(amp) / total;
    }
    return dist;
}

Measurement measure_modes(const FockState &state, std::span<const std::size_t> modes, Rng &rng) {
    auto dist = outcome_distribution(state, modes);
    double u = rng.uniform();
    double acc = 0;
    const Occupation *chosen = nullptr;
    for (const auto &[pattern, p] : dist) {
        if (p <= 0) {
            continue;
        }
        chosen = &pattern;
        acc += p;
        if (u < acc) {
            break;
        }
    }
    Measurement m;
    m.outcome = *chosen;
    auto sel = post_select(state, modes, m.outcome);
    m.state = std::move(sel.state);
    m.probability = sel.probability;
    return m;
}

cplx permanent(const Eigen::MatrixXcd &m, std::size_t cap) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("permanent of a non-square matrix");
    }
    auto n = static_cast<std::size_t>(m.rows());
    if (n > cap) {
        throw std::length_error("permanent dimension " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    }
    if (n == 0) {
        return 1;
    }
    std::vector<cplx> row_sums(n, 0);
    cplx total = 0;
    std::uint64_t gray = 0;
    std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; k++) {
        std::uint64_t next = k ^ (k >> 1);
        std::uint64_t flipped = next ^ gray;
        auto col = static_cast<Eigen::Index>(std::countr_zero(flipped));
        double sign = (next & flipped) ? 1.0 : -1.0;
        for (std::size_t r = 0; r < n; r++) {
            row_sums[r] += sign * m(static_cast<Eigen::Index>(r), col);
        }
        gray = next;
        cplx prod = 1;
        for (const auto &s : row_sums) {
            prod *= s;
        }
        total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
    }
    return (n % 2 == 0) ? total : -total;
}

double output_probability(const ModeUnitary &u, const Occupation &input, const Occupation &output) {
    if (input.size() != u.dim() || output.size() != u.dim()) {
        throw std::invalid_argument("occupation length does not match unitary dimension");
    }
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    double norm = 1;
    for (std::size_t k = 0; k < u.dim(); k++) {
        if (input[k] < 0 || output[k] < 0) {
            throw std::invalid_argument("negative occupation");
        }
        for (int p = 0; p < input[k]; p++) {
            cols.push_back(static_cast<Eigen::Index>(k));
        }
        for (int p = 0; p < output[k]; p++) {
            rows.push_back(static_cast<Eigen::Index>(k));
        }
        norm *= factorial(input[k]) * factorial(output[k]);
    }
    if (rows.size() != cols.size()) {
        throw std::invalid_argument("input and output photon counts differ");
    }
    auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd sub(n, n);
    for (Eigen::Index r = 0; r < n; r++) {
        for (Eigen::Index c = 0; c < n; c++) {
            sub(r, c) = u.matrix()(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    return std::norm(permanent(sub)) / norm;
}

std::vector<Occupation> enumerate_occupations(std::size_t n_modes, int photons) {
    std::vector<Occupation> out;
    if (n_modes == 0) {
        if (photons == 0) {
            out.emplace_back();
        }
        return out;
    }
    Occupation cur(n_modes, 0);
    auto rec = [&](auto &self, std::size_t mode, int left) -> void {
        if (mode + 1 == n_modes) {
            cur[mode] = left;
            out.push_back(cur);
            return;
        }
        for (int c = left; c >= 0; c--) {
            cur[mode] = c;
            self(self, mode + 1, left - c);
        }
    };
    rec(rec, 0, photons);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fiberloop
