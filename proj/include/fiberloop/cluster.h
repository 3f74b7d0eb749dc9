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

#ifndef FIBERLOOP_CLUSTER_H
#define FIBERLOOP_CLUSTER_H

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "fiberloop/clifford.h"
#include "fiberloop/fock.h"
#include "fiberloop/klm.h"

namespace fiberloop {

class Rng;

inline constexpr std::size_t kDefaultFockQubitCap = 6;

/// Graph state with a local Clifford frame per vertex. The physical state is
/// (prod_v C_v) |G>, where |G> is |+> on every vertex followed by CZ on every edge.
class GraphState {
   public:
    GraphState() = default;
    /// Vertices 0..n-1, no edges.
    explicit GraphState(int n);

    static GraphState make_star(int branches, int first_id = 0);
    static GraphState make_path(int length, int first_id = 0);

    void add_vertex(int v);
    bool has_vertex(int v) const { return adjacency_.count(v) != 0; }
    std::size_t size() const { return adjacency_.size(); }
    std::vector<int> vertices() const;
    const std::set<int> &neighbors(int v) const;
    bool has_edge(int a, int b) const;
    std::vector<std::pair<int, int>> edges() const;
    std::size_t degree(int v) const { return neighbors(v).size(); }

    const LocalClifford &frame(int v) const;
    void set_frame(int v, const LocalClifford &c);
    bool frames_trivial() const;

    // In-place primitives. They do not touch frames.
    void toggle_edge(int a, int b);
    void remove_vertex(int v);
    void local_complement_inplace(int v);

    /// Measures the graph-basis Pauli `p` on `v` (the observable C_v p C_v^dagger
    /// on the physical qubit) with outcome +1 or -1, removes `v` and folds the
    /// byproduct corrections into the neighbouring frames.
    void measure_graph_pauli_inplace(int v, Pauli p, int outcome);
    /// Same, for the physical observable `p`.
    void measure_pauli_inplace(int v, Pauli p, int outcome);

    bool operator==(const GraphState &) const = default;

   private:
    void require(int v) const;
    std::map<int, std::set<int>> adjacency_;
    std::map<int, LocalClifford> frames_;
};

GraphState disjoint_union(const GraphState &a, const GraphState &b);

/// CZ on a graph state: toggles the edge. Refused for non-identity frames on a or b.
GraphState add_cz_edge(const GraphState &g, int a, int b);
GraphState local_complement(const GraphState &g, int v);

GraphState measure_pauli(const GraphState &g, int v, Pauli p, int outcome = 1);
GraphState measure_graph_pauli(const GraphState &g, int v, Pauli p, int outcome = 1);
GraphState measure_x(const GraphState &g, int v, int outcome = 1);
GraphState measure_y(const GraphState &g, int v, int outcome = 1);
GraphState measure_z(const GraphState &g, int v, int outcome = 1);

/// Probability of `outcome` for the physical Pauli `p` on `v` (1/2 except for
/// an X-type measurement of an isolated vertex).
double pauli_outcome_probability(const GraphState &g, int v, Pauli p, int outcome);

/// Rails of each vertex in graph_to_fock: sorted vertex q uses modes (2q, 2q+1).
std::map<int, ModePair> graph_rails(const GraphState &g);

/// Dual-rail Fock state of the graph state, including frames.
FockState graph_to_fock(const GraphState &g, std::size_t cap = kDefaultFockQubitCap);

/// Projects the qubit on `pair` onto the `outcome` eigenvector of frame P frame^dagger
/// and removes its two modes. Requires pair.rail0 < pair.rail1.
PostSelection measure_qubit_fock(
    const FockState &state,
    ModePair pair,
    Pauli p,
    int outcome,
    const LocalClifford &frame = LocalClifford::identity());

/// Time-bin polarizing beamsplitter on the block (h1, v1, h2, v2): h1 and h2 swap.
Eigen::Matrix4d pbs_matrix();
FockState pbs_timebin(const FockState &state, std::size_t h1, std::size_t v1, std::size_t h2, std::size_t v2);
/// Beamsplitter between the two bins of a time-bin qubit.
FockState waveplate_timebin(const FockState &state, ModePair qubit, double theta, double phi);

struct FusionResult {
    bool success = false;
    /// Total probability of the success patterns.
    double probability = 0;
    /// Detected pattern: (h2, v2) for type I, (h1, v1, h2, v2) for type II.
    Occupation pattern;
    /// Normalized state on the surviving modes, in their original order. On
    /// success with type I the first qubit's rails survive; otherwise both go.
    FockState state;
};

/// Type-I fusion of qubits a = (h1, v1) and b = (h2, v2). Samples with `rng`
/// unless `forced` names the detected pattern.
FusionResult fusion_type_I(
    const FockState &state, ModePair a, ModePair b, Rng *rng, const std::optional<Occupation> &forced = {});
/// Type-II fusion: both qubits are measured.
FusionResult fusion_type_II(
    const FockState &state, ModePair a, ModePair b, Rng *rng, const std::optional<Occupation> &forced = {});

bool fusion_type_I_success(const Occupation &pattern);
bool fusion_type_II_success(const Occupation &pattern);

/// Graph after a type-I fusion of a and b with the given port pattern.
/// Success keeps a with neighbourhood N(a) xor N(b); failure removes both.
GraphState predict_fusion_type_I(const GraphState &g, int a, int b, const Occupation &pattern);
GraphState predict_fusion_type_II(const GraphState &g, int a, int b, const Occupation &pattern);

struct BondingParams {
    double p_gate = 0.5;
    double p_bond = 0.75;
    int k = 1;
    void validate() const;
};

/// Least k with 1 - (1 - p_gate)^k >= p_bond.
int required_branches(double p_gate, double p_bond);
double bonding_success_probability(double p_gate, int k);

struct BondResult {
    bool success = false;
    GraphState graph;
    int branches_consumed = 0;
};

/// Bonds the stars centred at a and b (in one graph) by trying branch pairs in
/// sorted order. A failed attempt Z-measures both branches. A success adds the
/// branch edge, Y-measures the branch path (in the frame-adapted basis) and
/// Z-measures the unused branches, leaving a and b joined by an edge.
BondResult bond_micro_clusters(const GraphState &g, int a, int b, double p_gate, Rng &rng);

struct BondStats {
    double p_gate = 0;
    int k = 0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double rate = 0;
    double analytic_rate = 0;
};

/// Trial t bonds two fresh k-branch stars using rng.split(t).
BondStats bonding_monte_carlo(double p_gate, int k, std::uint64_t trials, const Rng &rng);

}  // namespace fiberloop

#endif
