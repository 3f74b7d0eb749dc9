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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "fiberloop/cluster.h"
#include "fiberloop/commands.h"
#include "fiberloop/klm.h"
#include "fiberloop/loop_machine.h"
#include "fiberloop/random.h"
#include "fiberloop/reck.h"
#include "fiberloop/serialize.h"

using namespace fiberloop;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *pattern, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
    return buf;
}

Outcome universality() {
    auto start = std::chrono::steady_clock::now();
    Rng root(1001);
    double worst = 0;
    bool within_bound = true;
    for (std::size_t n = 2; n <= 6; n++) {
        Rng rng = root.split(n);
        for (int k = 0; k < 50; k++) {
            auto u = haar_unitary(n, rng);
            auto s = compile(u, LoopConfig::for_train(n), 1.0);
            worst = std::max(worst, phase_free_distance(effective_unitary(s).matrix(), u.matrix()));
            within_bound = within_bound && s.pass_count() <= 3 * n * (n - 1) / 2 + n;
        }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst < 1e-9 && within_bound && secs < 60,
            fmt("250 Haar unitaries n = 2..6: max error %.2e, %.2f s, pass bound ", worst, secs) +
                (within_bound ? "met" : "VIOLATED")};
}

Outcome pairwise_constructions() {
    double worst = 0;
    std::size_t max_passes = 0;
    const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto [i, j] : pairs) {
        PairwiseOp op{i, j, 0.8, -1.1, {}};
        auto passes = pairwise_to_passes(op, 3);
        max_passes = std::max(max_passes, passes.size());
        auto s = LoopSchedule::passive(LoopConfig::for_train(3), passes);
        auto want = ModeUnitary::beamsplitter(3, i, j, op.theta, op.phi);
        worst = std::max(worst, verify_schedule(s, want, 1e-10).error);
    }
    return {worst < 1e-10 && max_passes <= 2,
            fmt("pairs (1,2) (1,3) (2,3): max error %.2e, at most %.0f passes each", worst, double(max_passes))};
}

Outcome hong_ou_mandel() {
    auto direct = apply_beamsplitter(FockState::basis({1, 1}), 0, 1, pi / 4, 0);
    double p_direct = std::norm(direct.amplitude({1, 1}));
    auto pass = PassSettings::pass_through(2);
    pass.coupling(0) = {pi / 4, 0};
    Machine m(LoopConfig::for_train(2));
    m.load_pulse_train(FockState::basis({1, 1}));
    m.run_pass(pass);
    double p_loop = std::norm(m.train().amplitude({1, 1}));
    double p = std::max(p_direct, p_loop);
    return {p < 1e-12, fmt("coincidence probability %.2e (direct), %.2e (loop)", p_direct, p_loop)};
}

Outcome permanent_consistency() {
    Rng rng(2002);
    double worst = 0;
    for (int trial = 0; trial < 20; trial++) {
        std::size_t n = 2 + static_cast<std::size_t>(trial) % 4;
        int photons = 1 + trial % 3;
        auto u = haar_unitary(n, rng);
        auto occs = enumerate_occupations(n, photons);
        const auto &in = occs[rng.next() % occs.size()];
        auto out = apply_mode_unitary(FockState::basis(in), u);
        for (const auto &o : occs) {
            worst = std::max(worst, std::abs(output_probability(u, in, o) - std::norm(out.amplitude(o))));
        }
    }
    return {worst < 1e-10, fmt("20 unitaries, n <= 5, <= 3 photons: max deviation %.2e", worst)};
}

Outcome ns_gate_check() {
    Rng rng(3003);
    double worst_p = 0;
    double worst_f = 0;
    for (int trial = 0; trial < 20; trial++) {
        FockState in(2, 2);
        FockState want(2, 2);
        for (int k = 0; k <= 2; k++) {
            cplx a(normal(rng), normal(rng));
            in.add({k, 2 - k}, a);
            want.add({k, 2 - k}, k == 2 ? -a : a);
        }
        auto r = ns_gate(in.normalized(), 0, HeraldMode::kPostSelect);
        worst_p = std::max(worst_p, std::abs(r.probability - 0.25));
        worst_f = std::max(worst_f, 1 - fidelity(r.state, want));
    }
    return {worst_p < 1e-10 && worst_f < 1e-10,
            fmt("20 inputs: |p - 1/4| <= %.2e, 1 - fidelity <= %.2e", worst_p, worst_f)};
}

FockState two_qubits(const std::array<cplx, 4> &c) {
    FockState s(4, 2);
    for (int x = 0; x < 4; x++) {
        s.add({1 - (x >> 1), x >> 1, 1 - (x & 1), x & 1}, c[static_cast<std::size_t>(x)]);
    }
    return s.pruned();
}

Outcome cz_gate_check() {
    double worst_p = 0;
    double worst_sign = 0;
    const double signs[] = {1, 1, 1, -1};
    for (int x = 0; x < 4; x++) {
        std::array<cplx, 4> c{};
        c[static_cast<std::size_t>(x)] = 1;
        auto in = two_qubits(c);
        auto r = cz_gate(in, {0, 1}, {2, 3}, HeraldMode::kPostSelect);
        worst_p = std::max(worst_p, std::abs(r.probability - 1.0 / 16));
        worst_sign = std::max(worst_sign, std::abs(inner_product(in, r.state) - signs[x]));
    }
    Rng rng(4004);
    double worst_f = 0;
    for (int trial = 0; trial < 5; trial++) {
        std::array<cplx, 4> c;
        for (auto &z : c) {
            z = cplx(normal(rng), normal(rng));
        }
        auto in = two_qubits(c).normalized();
        HeraldPolicy policy;
        policy.forced[0] = kCzHerald;
        auto loop = klm_round(in, FockState::basis(kCzAncilla), cz_gadget_unitary(), policy);
        auto direct = cz_gate(in, {0, 1}, {2, 3}, HeraldMode::kPostSelect);
        worst_f = std::max(worst_f, 1 - fidelity(loop.logical, direct.state));
        worst_p = std::max(worst_p, std::abs(loop.probability - 1.0 / 16));
    }
    return {worst_p < 1e-10 && worst_sign < 1e-10 && worst_f < 1e-9,
            fmt("|p - 1/16| <= %.2e, phase error %.2e, loop vs direct 1 - F <= %.2e", worst_p, worst_sign, worst_f)};
}

Outcome ancilla_round_trip() {
    Rng rng(5005);
    const Occupation patterns[] = {{1}, {1, 1}, {0, 2, 1}};
    double worst_f = 0;
    double worst_p = 0;
    bool patterns_ok = true;
    for (const auto &pattern : patterns) {
        std::size_t n_a = pattern.size();
        auto logical = random_state(4, 2, rng);
        LoopSchedule schedule;
        schedule.config = LoopConfig{1, 4, 4 + n_a + 1};
        Round round;
        round.injection = FockState::basis(pattern);
        round.passes = {PassSettings::pass_through(4 + n_a), PassSettings::pass_through(4 + n_a)};
        for (std::size_t k = 0; k < n_a; k++) {
            round.extraction.push_back(4 + k);
        }
        schedule.rounds = {round};
        Machine m(schedule.config);
        m.load_pulse_train(logical);
        HeraldPolicy policy;
        Rng sample = rng.split(n_a);
        policy.rng = &sample;
        auto r = run_schedule(m, schedule, policy);
        worst_f = std::max(worst_f, 1 - fidelity(r.final_state, logical));
        worst_p = std::max(worst_p, std::abs(1 - r.outcome_probabilities[0]));
        patterns_ok = patterns_ok && r.record.entries[0].outcome == pattern;
    }
    return {worst_f < 1e-10 && worst_p < 1e-10 && patterns_ok,
            fmt("n_A = 1, 2, 3: 1 - F <= %.2e, |1 - p(pattern)| <= %.2e", worst_f, worst_p) +
                (patterns_ok ? ", patterns reproduced" : ", pattern mismatch")};
}

Outcome branch_formula() {
    int k1 = required_branches(0.5, 0.75);
    double raw = std::log(1 - 0.99) / std::log(1 - 1.0 / 16);
    int k2 = required_branches(1.0 / 16, 0.99);
    bool ok = k1 == 2 && k2 == 72;
    std::string detail = "k(1/2, 3/4) = " + std::to_string(k1) + ", k(1/16, 0.99) = " + std::to_string(k2) +
                         fmt(" (formula %.2f)", raw) + "; Monte Carlo 1e5 trials:";
    const double ps[] = {0.1, 0.25, 0.5};
    const int ks[] = {1, 3, 5};
    Rng root(2026);
    std::uint64_t stream = 0;
    double worst_sigma = 0;
    for (double p : ps) {
        for (int k : ks) {
            auto s = bonding_monte_carlo(p, k, 100000, root.split(stream++));
            double sigma = std::sqrt(s.analytic_rate * (1 - s.analytic_rate) / 1e5);
            double z = std::abs(s.rate - s.analytic_rate) / sigma;
            worst_sigma = std::max(worst_sigma, z);
            ok = ok && z <= 3;
        }
    }
    return {ok, detail + fmt(" worst deviation %.2f sigma over the 3x3 grid", worst_sigma)};
}

Outcome fusion_check() {
    auto g = disjoint_union(GraphState::make_path(2, 0), GraphState::make_path(2, 2));
    auto rails = graph_rails(g);
    auto f = graph_to_fock(g);
    double worst_p = 0;
    double worst_f = 0;
    for (Occupation p : {Occupation{1, 0}, Occupation{0, 1}}) {
        auto r = fusion_type_I(f, rails[1], rails[2], nullptr, p);
        worst_p = std::max(worst_p, std::abs(r.probability - 0.5));
        worst_f = std::max(worst_f, 1 - fidelity(r.state, graph_to_fock(predict_fusion_type_I(g, 1, 2, p))));
    }
    for (const auto &p : enumerate_occupations(4, 2)) {
        if (!fusion_type_II_success(p)) {
            continue;
        }
        auto r = fusion_type_II(f, rails[1], rails[2], nullptr, p);
        worst_p = std::max(worst_p, std::abs(r.probability - 0.5));
        worst_f = std::max(worst_f, 1 - fidelity(r.state, graph_to_fock(predict_fusion_type_II(g, 1, 2, p))));
    }
    return {worst_p < 1e-10 && worst_f < 1e-9,
            fmt("types I and II on Bell pairs: |p - 1/2| <= %.2e, 1 - F <= %.2e", worst_p, worst_f)};
}

bool connected(const GraphState &g) {
    auto verts = g.vertices();
    std::set<int> seen{verts[0]};
    std::vector<int> stack{verts[0]};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int n : g.neighbors(v)) {
            if (seen.insert(n).second) {
                stack.push_back(n);
            }
        }
    }
    return seen.size() == verts.size();
}

Outcome y_rule() {
    int graphs = 0;
    int checks = 0;
    double worst = 0;
    for (int n = 1; n <= 5; n++) {
        int edges = n * (n - 1) / 2;
        for (int mask = 0; mask < (1 << edges); mask++) {
            GraphState g(n);
            int e = 0;
            for (int i = 0; i < n; i++) {
                for (int j = i + 1; j < n; j++) {
                    if ((mask >> e++) & 1) {
                        g.toggle_edge(i, j);
                    }
                }
            }
            if (!connected(g)) {
                continue;
            }
            graphs++;
            auto f = graph_to_fock(g);
            auto rails = graph_rails(g);
            for (int v = 0; v < n; v++) {
                for (int outcome : {1, -1}) {
                    auto sel = measure_qubit_fock(f, rails[v], Pauli::kY, outcome);
                    auto h = measure_y(g, v, outcome);
                    double fid = h.size() == 0 ? 1.0 : fidelity(graph_to_fock(h), sel.state);
                    worst = std::max(worst, 1 - fid);
                    checks++;
                }
            }
        }
    }
    // A - a - b - B contraction with frame-adapted Y measurements.
    auto path = GraphState::make_path(4);
    auto f = graph_to_fock(path);
    auto rails = graph_rails(path);
    auto g = path;
    for (int v : {2, 1}) {
        auto sel = measure_qubit_fock(f, rails[v], Pauli::kY, 1, g.frame(v));
        f = sel.state;
        g = measure_graph_pauli(g, v, Pauli::kY, 1);
    }
    bool contracted = g.edges() == std::vector<std::pair<int, int>>{{0, 3}};
    double path_fid = fidelity(graph_to_fock(g), f);
    return {worst < 1e-9 && contracted && path_fid > 1 - 1e-9,
            std::to_string(graphs) + " connected graphs, " + std::to_string(checks) +
                fmt(" measurements: 1 - F <= %.2e; A-a-b-B -> A-B ", worst) + (contracted ? "edge" : "MISSING") +
                fmt(" (1 - F = %.2e)", 1 - path_fid)};
}

Outcome pbs_map() {
    Eigen::Matrix4d literal;
    literal << 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1;
    bool exact = pbs_matrix() == literal && pbs_matrix() * pbs_matrix() == Eigen::Matrix4d::Identity();
    Rng rng(6006);
    bool involution = true;
    for (int trial = 0; trial < 10; trial++) {
        auto s = random_state(4, 2, rng);
        involution = involution && pbs_timebin(pbs_timebin(s, 0, 1, 2, 3), 0, 1, 2, 3) == s;
    }
    bool examples = pbs_timebin(FockState::basis({1, 0, 0, 1}), 0, 1, 2, 3) == FockState::basis({0, 0, 1, 1});
    return {exact && involution && examples,
            std::string("matrix ") + (exact ? "exact" : "MISMATCH") + ", involution " +
                (involution ? "exact" : "BROKEN") + " on 10 random states"};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    fs::path dir = fs::temp_directory_path() / "fiberloop_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    Rng rng(7007);
    write_text_file((dir / "u.json").string(), unitary_to_json(haar_unitary(4, rng).matrix()).dump());
    write_text_file((dir / "s.json").string(), state_to_json(FockState::basis({1, 1, 0, 1})).dump());
    int identical = 0;
    int total = 0;
    std::string differing;
    auto compare = [&](const std::string &label, const std::string &a, const std::string &b) {
        total++;
        if (a == b && !a.empty()) {
            identical++;
        } else {
            differing += " " + label;
        }
    };
    std::string runs[2];
    std::string scheds[2];
    std::string traces[2];
    for (int k = 0; k < 2; k++) {
        CompileOptions c;
        c.unitary_path = (dir / "u.json").string();
        c.schedule_out = (dir / "sched.json").string();
        runs[k] = cmd_compile(c).output;
        scheds[k] = slurp(c.schedule_out);
    }
    compare("compile", runs[0], runs[1]);
    compare("schedule", scheds[0], scheds[1]);
    for (int k = 0; k < 2; k++) {
        SimulateOptions s;
        s.schedule_path = (dir / "sched.json").string();
        s.state_path = (dir / "s.json").string();
        s.seed = 42;
        s.shots = 300;
        s.trace_out = (dir / "trace.jsonl").string();
        runs[k] = cmd_simulate(s).output;
        traces[k] = slurp(s.trace_out);
    }
    compare("simulate", runs[0], runs[1]);
    compare("trace", traces[0], traces[1]);
    for (int k = 0; k < 2; k++) {
        BondOptions b;
        b.p_gate = {0.1, 0.3};
        b.p_bond = {0.9};
        b.trials = 5000;
        b.seed = 42;
        runs[k] = cmd_bond(b).output;
    }
    compare("bond", runs[0], runs[1]);
    for (const char *gadget : {"ns", "cz", "fusion1", "fusion2"}) {
        for (int k = 0; k < 2; k++) {
            GatesOptions g;
            g.gadget = gadget;
            g.mode = "sample";
            g.seed = 42;
            runs[k] = cmd_gates(g).output;
        }
        compare(gadget, runs[0], runs[1]);
    }
#ifdef FIBERLOOP_CLI_PATH
    for (int k = 0; k < 2; k++) {
        std::string cmd = std::string("\"") + FIBERLOOP_CLI_PATH + "\" bond --p-gate 0.2 --p-bond 0.8 --trials 3000 --seed 9 > \"" +
                          (dir / ("cli" + std::to_string(k) + ".csv")).string() + "\"";
        if (std::system(cmd.c_str()) != 0) {
            return {false, "CLI invocation failed"};
        }
    }
    compare("cli", slurp(dir / "cli0.csv"), slurp(dir / "cli1.csv"));
#endif
    fs::remove_all(dir);
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) + " output pairs byte-identical" +
                                        (differing.empty() ? "" : ";" + differing + " differ or are empty")};
}

}  // namespace

int main() {
    struct Entry {
        const char *name;
        std::function<Outcome()> run;
    };
    const Entry criteria[] = {
        {"compile-verify universality", universality},
        {"pairwise two-pass constructions", pairwise_constructions},
        {"Hong-Ou-Mandel bunching", hong_ou_mandel},
        {"permanent consistency", permanent_consistency},
        {"NS gate", ns_gate_check},
        {"CZ gate and loop execution", cz_gate_check},
        {"ancilla round trip", ancilla_round_trip},
        {"branch count and bonding statistics", branch_formula},
        {"fusion gates", fusion_check},
        {"graph/Fock Y rule", y_rule},
        {"time-bin PBS map", pbs_map},
        {"determinism", determinism},
    };
    int failures = 0;
    int index = 1;
    for (const auto &c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
        index++;
    }
    std::printf("%d/%d criteria passed\n", index - 1 - failures, index - 1);
    return failures == 0 ? 0 : 1;
}
