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

#include "fiberloop/cluster.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fiberloop/rng.h"

namespace fiberloop {

namespace {

using std::numbers::pi;

const LocalClifford &clifford_z() {
    static const LocalClifford c = LocalClifford::parse("Z");
    return c;
}

const LocalClifford &clifford_s() {
    static const LocalClifford c = LocalClifford::parse("S");
    return c;
}

const LocalClifford &clifford_s_dag() {
    static const LocalClifford c = LocalClifford::parse("S").inverse();
    return c;
}

// Square roots of +iY and -iY up to phase.
const LocalClifford &clifford_sqrt_plus_iy() {
    static const LocalClifford c = [] {
        Eigen::Matrix2cd m;
        m << 1, 1, -1, 1;
        return LocalClifford::from_matrix(m / std::sqrt(2.0));
    }();
    return c;
}

const LocalClifford &clifford_sqrt_minus_iy() {
    static const LocalClifford c = [] {
        Eigen::Matrix2cd m;
        m << 1, -1, 1, 1;
        return LocalClifford::from_matrix(m / std::sqrt(2.0));
    }();
    return c;
}

// Rows are the bras of the +1 and -1 eigenvectors.
Eigen::Matrix2cd eigenbasis_rows(Pauli p) {
    const double r = 1 / std::sqrt(2.0);
    const cplx i(0, 1);
    Eigen::Matrix2cd m;
    switch (p) {
        case Pauli::kX:
            m << r, r, r, -r;
            break;
        case Pauli::kY:
            m << r, -i * r, r, i * r;
            break;
        case Pauli::kZ:
            m << 1, 0, 0, 1;
            break;
        case Pauli::kI:
            throw std::invalid_argument("cannot measure the identity");
    }
    return m;
}

void check_outcome(int outcome) {
    if (outcome != 1 && outcome != -1) {
        throw std::invalid_argument("Pauli outcome must be +1 or -1");
    }
}

int random_outcome(Rng &rng) {
    return rng.bernoulli(0.5) ? 1 : -1;
}

void merge_into(GraphState &g, int a, int b) {
    std::set<int> nb = g.neighbors(b);
    g.remove_vertex(b);
    for (int n : nb) {
        if (n != a) {
            g.toggle_edge(a, n);
        }
    }
}

void require_plain(const GraphState &g, int a, int b) {
    if (!g.has_vertex(a) || !g.has_vertex(b)) {
        throw std::invalid_argument("fused vertex is missing");
    }
    if (a == b) {
        throw std::invalid_argument("cannot fuse a vertex with itself");
    }
    if (!g.frame(a).is_identity() || !g.frame(b).is_identity()) {
        throw std::invalid_argument("fusion prediction needs identity frames on the fused vertices");
    }
}

std::size_t count(const Occupation &p, std::size_t from, std::size_t to) {
    int c = 0;
    for (std::size_t k = from; k < to; k++) {
        c += p.at(k);
    }
    return static_cast<std::size_t>(c);
}

}  // namespace

GraphState::GraphState(int n) {
    if (n < 0) {
        throw std::invalid_argument("negative vertex count");
    }
    for (int v = 0; v < n; v++) {
        adjacency_[v];
    }
}

GraphState GraphState::make_star(int branches, int first_id) {
    if (branches < 0) {
        throw std::invalid_argument("negative branch count");
    }
    GraphState g;
    g.add_vertex(first_id);
    for (int k = 1; k <= branches; k++) {
        g.add_vertex(first_id + k);
        g.toggle_edge(first_id, first_id + k);
    }
    return g;
}

GraphState GraphState::make_path(int length, int first_id) {
    if (length < 0) {
        throw std::invalid_argument("negative path length");
    }
    GraphState g;
    for (int k = 0; k < length; k++) {
        g.add_vertex(first_id + k);
        if (k > 0) {
            g.toggle_edge(first_id + k - 1, first_id + k);
        }
    }
    return g;
}

void GraphState::add_vertex(int v) {
    if (!adjacency_.emplace(v, std::set<int>{}).second) {
        throw std::invalid_argument("vertex " + std::to_string(v) + " already exists");
    }
}

std::vector<int> GraphState::vertices() const {
    std::vector<int> out;
    out.reserve(adjacency_.size());
    for (const auto &[v, n] : adjacency_) {
        out.push_back(v);
    }
    return out;
}

void GraphState::require(int v) const {
    if (!has_vertex(v)) {
        throw std::invalid_argument("vertex " + std::to_string(v) + " is not in the graph");
    }
}

const std::set<int> &GraphState::neighbors(int v) const {
    require(v);
    return adjacency_.at(v);
}

bool GraphState::has_edge(int a, int b) const {
    return neighbors(a).count(b) != 0;
}

std::vector<std::pair<int, int>> GraphState::edges() const {
    std::vector<std::pair<int, int>> out;
    for (const auto &[v, ns] : adjacency_) {
        for (int n : ns) {
            if (v < n) {
                out.emplace_back(v, n);
            }
        }
    }
    return out;
}

const LocalClifford &GraphState::frame(int v) const {
    static const LocalClifford id;
    require(v);
    auto it = frames_.find(v);
    return it == frames_.end() ? id : it->second;
}

void GraphState::set_frame(int v, const LocalClifford &c) {
    require(v);
    if (c.is_identity()) {
        frames_.erase(v);
    } else {
        frames_[v] = c;
    }
}

bool GraphState::frames_trivial() const {
    return frames_.empty();
}

void GraphState::toggle_edge(int a, int b) {
    require(a);
    require(b);
    if (a == b) {
        throw std::invalid_argument("self-loops are not allowed");
    }
    auto &na = adjacency_[a];
    if (na.erase(b) != 0) {
        adjacency_[b].erase(a);
    } else {
        na.insert(b);
        adjacency_[b].insert(a);
    }
}

void GraphState::remove_vertex(int v) {
    require(v);
    for (int n : adjacency_[v]) {
        adjacency_[n].erase(v);
    }
    adjacency_.erase(v);
    frames_.erase(v);
}

void GraphState::local_complement_inplace(int v) {
    std::vector<int> ns(neighbors(v).begin(), neighbors(v).end());
    for (std::size_t i = 0; i < ns.size(); i++) {
        for (std::size_t j = i + 1; j < ns.size(); j++) {
            toggle_edge(ns[i], ns[j]);
        }
    }
}

void GraphState::measure_graph_pauli_inplace(int v, Pauli p, int outcome) {
    check_outcome(outcome);
    std::set<int> nv = neighbors(v);
    auto correct = [&](int b, const LocalClifford &u) { set_frame(b, frame(b) * u); };
    switch (p) {
        case Pauli::kZ:
            remove_vertex(v);
            if (outcome < 0) {
                for (int b : nv) {
                    correct(b, clifford_z());
                }
            }
            return;
        case Pauli::kY:
            local_complement_inplace(v);
            remove_vertex(v);
            for (int b : nv) {
                correct(b, outcome > 0 ? clifford_s() : clifford_s_dag());
            }
            return;
        case Pauli::kX: {
            if (nv.empty()) {
                if (outcome < 0) {
                    throw std::domain_error("isolated vertex gives outcome +1 for X");
                }
                remove_vertex(v);
                return;
            }
            int b0 = *nv.begin();
            std::set<int> nb0 = neighbors(b0);
            local_complement_inplace(b0);
            local_complement_inplace(v);
            local_complement_inplace(b0);
            remove_vertex(v);
            if (outcome > 0) {
                correct(b0, clifford_sqrt_plus_iy());
                for (int b : nv) {
                    if (b != b0 && nb0.count(b) == 0) {
                        correct(b, clifford_z());
                    }
                }
            } else {
                correct(b0, clifford_sqrt_minus_iy());
                for (int b : nb0) {
                    if (b != v && nv.count(b) == 0) {
                        correct(b, clifford_z());
                    }
                }
            }
            return;
        }
        case Pauli::kI:
            throw std::invalid_argument("cannot measure the identity");
    }
}

void GraphState::measure_pauli_inplace(int v, Pauli p, int outcome) {
    check_outcome(outcome);
    auto [sign, q] = frame(v).conjugate_pauli(p);
    measure_graph_pauli_inplace(v, q, outcome * sign);
}

GraphState disjoint_union(const GraphState &a, const GraphState &b) {
    GraphState out = a;
    for (int v : b.vertices()) {
        if (a.has_vertex(v)) {
            throw std::invalid_argument("graphs share vertex " + std::to_string(v));
        }
        out.add_vertex(v);
    }
    for (auto [x, y] : b.edges()) {
        out.toggle_edge(x, y);
    }
    for (int v : b.vertices()) {
        out.set_frame(v, b.frame(v));
    }
    return out;
}

GraphState add_cz_edge(const GraphState &g, int a, int b) {
    if (!g.has_vertex(a) || !g.has_vertex(b)) {
        throw std::invalid_argument("CZ on a missing vertex");
    }
    if (a == b) {
        throw std::invalid_argument("self-loops are not allowed");
    }
    if (!g.frame(a).is_identity() || !g.frame(b).is_identity()) {
        throw std::invalid_argument("CZ needs identity frames on both vertices");
    }
    GraphState out = g;
    out.toggle_edge(a, b);
    return out;
}

GraphState local_complement(const GraphState &g, int v) {
    GraphState out = g;
    out.local_complement_inplace(v);
    return out;
}

GraphState measure_pauli(const GraphState &g, int v, Pauli p, int outcome) {
    GraphState out = g;
    out.measure_pauli_inplace(v, p, outcome);
    return out;
}

GraphState measure_graph_pauli(const GraphState &g, int v, Pauli p, int outcome) {
    GraphState out = g;
    out.measure_graph_pauli_inplace(v, p, outcome);
    return out;
}

GraphState measure_x(const GraphState &g, int v, int outcome) {
    return measure_pauli(g, v, Pauli::kX, outcome);
}

GraphState measure_y(const GraphState &g, int v, int outcome) {
    return measure_pauli(g, v, Pauli::kY, outcome);
}

GraphState measure_z(const GraphState &g, int v, int outcome) {
    return measure_pauli(g, v, Pauli::kZ, outcome);
}

double pauli_outcome_probability(const GraphState &g, int v, Pauli p, int outcome) {
    check_outcome(outcome);
    if (p == Pauli::kI) {
        throw std::invalid_argument("cannot measure the identity");
    }
    auto [sign, q] = g.frame(v).conjugate_pauli(p);
    if (q == Pauli::kX && g.degree(v) == 0) {
        return outcome * sign > 0 ? 1.0 : 0.0;
    }
    return 0.5;
}

std::map<int, ModePair> graph_rails(const GraphState &g) {
    std::map<int, ModePair> out;
    std::size_t q = 0;
    for (int v : g.vertices()) {
        out[v] = ModePair{2 * q, 2 * q + 1};
        q++;
    }
    return out;
}

FockState graph_to_fock(const GraphState &g, std::size_t cap) {
    const std::size_t n = g.size();
    if (n > cap) {
        throw std::length_error(
            "graph has " + std::to_string(n) + " vertices, above the Fock cap of " + std::to_string(cap));
    }
    std::vector<int> verts = g.vertices();
    std::map<int, std::size_t> index;
    for (std::size_t q = 0; q < n; q++) {
        index[verts[q]] = q;
    }
    const std::size_t dim = std::size_t{1} << n;
    const double scale = std::pow(2.0, -0.5 * static_cast<double>(n));
    std::vector<cplx> amps(dim);
    auto edges = g.edges();
    for (std::size_t x = 0; x < dim; x++) {
        int parity = 0;
        for (auto [a, b] : edges) {
            parity ^= static_cast<int>((x >> index[a]) & (x >> index[b]) & 1);
        }
        amps[x] = parity ? -scale : scale;
    }
    for (std::size_t q = 0; q < n; q++) {
        const LocalClifford &c = g.frame(verts[q]);
        if (c.is_identity()) {
            continue;
        }
        const Eigen::Matrix2cd &m = c.matrix();
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t x = 0; x < dim; x++) {
            if (x & bit) {
                continue;
            }
            cplx a0 = amps[x];
            cplx a1 = amps[x | bit];
            amps[x] = m(0, 0) * a0 + m(0, 1) * a1;
            amps[x | bit] = m(1, 0) * a0 + m(1, 1) * a1;
        }
    }
    FockState out(2 * n, static_cast<int>(n));
    Occupation occ(2 * n);
    for (std::size_t x = 0; x < dim; x++) {
        for (std::size_t q = 0; q < n; q++) {
            std::size_t bit = (x >> q) & 1;
            occ[2 * q] = bit ? 0 : 1;
            occ[2 * q + 1] = bit ? 1 : 0;
        }
        out.add(occ, amps[x]);
    }
    return out.pruned();
}

PostSelection measure_qubit_fock(
    const FockState &state, ModePair pair, Pauli p, int outcome, const LocalClifford &frame) {
    check_outcome(outcome);
    Eigen::Matrix2cd v = eigenbasis_rows(p) * frame.matrix().adjoint();
    FockState rotated = apply_single_qubit_gate(state, v, pair);
    const std::size_t modes[] = {pair.rail0, pair.rail1};
    return post_select(rotated, modes, outcome > 0 ? Occupation{1, 0} : Occupation{0, 1});
}

Eigen::Matrix4d pbs_matrix() {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(2, 0) = 1;
    m(1, 1) = 1;
    m(0, 2) = 1;
    m(3, 3) = 1;
    return m;
}

FockState pbs_timebin(const FockState &state, std::size_t h1, std::size_t v1, std::size_t h2, std::size_t v2) {
    const std::size_t block[] = {h1, v1, h2, v2};
    for (std::size_t i = 0; i < 4; i++) {
        if (block[i] >= state.n_modes()) {
            throw std::out_of_range("PBS bin out of range");
        }
        for (std::size_t j = 0; j < i; j++) {
            if (block[i] == block[j]) {
                throw std::invalid_argument("PBS bins must be distinct");
            }
        }
    }
    std::vector<std::size_t> image(state.n_modes());
    for (std::size_t k = 0; k < image.size(); k++) {
        image[k] = k;
    }
    image[h1] = h2;
    image[h2] = h1;
    return permute_modes(state, image);
}

FockState waveplate_timebin(const FockState &state, ModePair qubit, double theta, double phi) {
    return apply_beamsplitter(state, qubit.rail0, qubit.rail1, theta, phi);
}

bool fusion_type_I_success(const Occupation &pattern) {
    return pattern.size() == 2 && pattern[0] + pattern[1] == 1;
}

bool fusion_type_II_success(const Occupation &pattern) {
    return pattern.size() == 4 && pattern[0] + pattern[1] == 1 && pattern[2] + pattern[3] == 1;
}

FusionResult fusion_type_I(
    const FockState &state, ModePair a, ModePair b, Rng *rng, const std::optional<Occupation> &forced) {
    FockState s = pbs_timebin(state, a.rail0, a.rail1, b.rail0, b.rail1);
    s = waveplate_timebin(s, b, pi / 4, 0);
    const std::size_t port[] = {b.rail0, b.rail1};
    FusionResult r;
    for (const auto &[pattern, p] : outcome_distribution(s, port)) {
        if (fusion_type_I_success(pattern)) {
            r.probability += p;
        }
    }
    Occupation pattern;
    if (forced) {
        if (forced->size() != 2) {
            throw std::invalid_argument("type-I pattern has two entries");
        }
        pattern = *forced;
    } else {
        if (rng == nullptr) {
            throw std::invalid_argument("sampling a fusion needs a random source");
        }
        pattern = measure_modes(s, port, *rng).outcome;
    }
    r.pattern = pattern;
    r.success = fusion_type_I_success(pattern);
    if (r.success) {
        r.state = post_select(s, port, pattern).state;
    } else {
        // The first port then holds both photons or none, one per bin.
        int first = pattern[0] + pattern[1] == 0 ? 1 : 0;
        const std::size_t all[] = {a.rail0, a.rail1, b.rail0, b.rail1};
        r.state = post_select(s, all, Occupation{first, first, pattern[0], pattern[1]}).state;
    }
    return r;
}

FusionResult fusion_type_II(
    const FockState &state, ModePair a, ModePair b, Rng *rng, const std::optional<Occupation> &forced) {
    FockState s = pbs_timebin(state, a.rail0, a.rail1, b.rail0, b.rail1);
    s = waveplate_timebin(s, a, pi / 4, 0);
    s = waveplate_timebin(s, b, pi / 4, 0);
    const std::size_t all[] = {a.rail0, a.rail1, b.rail0, b.rail1};
    FusionResult r;
    for (const auto &[pattern, p] : outcome_distribution(s, all)) {
        if (fusion_type_II_success(pattern)) {
            r.probability += p;
        }
    }
    if (forced) {
        if (forced->size() != 4) {
            throw std::invalid_argument("type-II pattern has four entries");
        }
        r.pattern = *forced;
        r.state = post_select(s, all, r.pattern).state;
    } else {
        if (rng == nullptr) {
            throw std::invalid_argument("sampling a fusion needs a random source");
        }
        auto m = measure_modes(s, all, *rng);
        r.pattern = std::move(m.outcome);
        r.state = std::move(m.state);
    }
    r.success = fusion_type_II_success(r.pattern);
    return r;
}

GraphState predict_fusion_type_I(const GraphState &g, int a, int b, const Occupation &pattern) {
    require_plain(g, a, b);
    if (pattern.size() != 2) {
        throw std::invalid_argument("type-I pattern has two entries");
    }
    GraphState out = g;
    if (fusion_type_I_success(pattern)) {
        bool adjacent = g.has_edge(a, b);
        merge_into(out, a, b);
        if ((pattern[0] == 1) != adjacent) {
            out.set_frame(a, clifford_z());
        }
        return out;
    }
    bool none = count(pattern, 0, 2) == 0;
    out.measure_pauli_inplace(a, Pauli::kZ, none ? -1 : 1);
    out.measure_pauli_inplace(b, Pauli::kZ, none ? 1 : -1);
    return out;
}

GraphState predict_fusion_type_II(const GraphState &g, int a, int b, const Occupation &pattern) {
    require_plain(g, a, b);
    if (pattern.size() != 4) {
        throw std::invalid_argument("type-II pattern has four entries");
    }
    GraphState out = g;
    if (fusion_type_II_success(pattern)) {
        bool adjacent = g.has_edge(a, b);
        merge_into(out, a, b);
        if (adjacent) {
            out.set_frame(a, clifford_z());
        }
        int sign = (pattern[0] + pattern[2]) % 2 == 0 ? 1 : -1;
        out.measure_pauli_inplace(a, Pauli::kX, sign);
        return out;
    }
    bool first_full = count(pattern, 0, 2) == 2;
    out.measure_pauli_inplace(a, Pauli::kZ, first_full ? -1 : 1);
    out.measure_pauli_inplace(b, Pauli::kZ, first_full ? 1 : -1);
    return out;
}

void BondingParams::validate() const {
    if (!(p_gate > 0 && p_gate < 1) || !(p_bond > 0 && p_bond < 1)) {
        throw std::invalid_argument("bonding probabilities must lie strictly inside (0, 1)");
    }
    if (k < 1) {
        throw std::invalid_argument("branch count must be positive");
    }
}

double bonding_success_probability(double p_gate, int k) {
    return 1 - std::pow(1 - p_gate, k);
}

int required_branches(double p_gate, double p_bond) {
    BondingParams{p_gate, p_bond, 1}.validate();
    double ratio = std::log1p(-p_bond) / std::log1p(-p_gate);
    int k = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
    auto enough = [&](int kk) { return bonding_success_probability(p_gate, kk) >= p_bond - 1e-12; };
    while (k > 1 && enough(k - 1)) {
        k--;
    }
    while (!enough(k)) {
        k++;
    }
    return k;
}

BondResult bond_micro_clusters(const GraphState &g, int a, int b, double p_gate, Rng &rng) {
    if (!g.has_vertex(a) || !g.has_vertex(b)) {
        throw std::invalid_argument("star centre is missing");
    }
    if (a == b) {
        throw std::invalid_argument("star centres must differ");
    }
    if (!(p_gate >= 0 && p_gate <= 1)) {
        throw std::invalid_argument("gate probability must lie in [0, 1]");
    }
    auto branches = [&](int centre, int other) {
        std::vector<int> out;
        for (int n : g.neighbors(centre)) {
            if (n != other) {
                out.push_back(n);
            }
        }
        return out;
    };
    std::vector<int> la = branches(a, b);
    std::vector<int> lb = branches(b, a);
    const std::size_t k = std::min(la.size(), lb.size());
    BondResult r;
    r.graph = g;
    GraphState &out = r.graph;
    for (std::size_t i = 0; i < k; i++) {
        r.branches_consumed = static_cast<int>(i + 1);
        if (!rng.bernoulli(p_gate)) {
            out.measure_pauli_inplace(la[i], Pauli::kZ, random_outcome(rng));
            out.measure_pauli_inplace(lb[i], Pauli::kZ, random_outcome(rng));
            continue;
        }
        out = add_cz_edge(out, la[i], lb[i]);
        out.measure_graph_pauli_inplace(la[i], Pauli::kY, random_outcome(rng));
        out.measure_graph_pauli_inplace(lb[i], Pauli::kY, random_outcome(rng));
        for (std::size_t j = i + 1; j < la.size(); j++) {
            out.measure_pauli_inplace(la[j], Pauli::kZ, random_outcome(rng));
        }
        for (std::size_t j = i + 1; j < lb.size(); j++) {
            out.measure_pauli_inplace(lb[j], Pauli::kZ, random_outcome(rng));
        }
        r.success = true;
        return r;
    }
    return r;
}

BondStats bonding_monte_carlo(double p_gate, int k, std::uint64_t trials, const Rng &rng) {
    if (k < 1) {
        throw std::invalid_argument("branch count must be positive");
    }
    BondStats s;
    s.p_gate = p_gate;
    s.k = k;
    s.trials = trials;
    s.analytic_rate = bonding_success_probability(p_gate, k);
    const GraphState stars = disjoint_union(GraphState::make_star(k, 0), GraphState::make_star(k, k + 1));
    for (std::uint64_t t = 0; t < trials; t++) {
        Rng trial = rng.split(t);
        if (bond_micro_clusters(stars, 0, k + 1, p_gate, trial).success) {
            s.successes++;
        }
    }
    s.rate = trials == 0 ? 0.0 : static_cast<double>(s.successes) / static_cast<double>(trials);
    return s;
}

}  // namespace fiberloop
