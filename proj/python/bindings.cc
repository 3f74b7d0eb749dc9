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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fiberloop/cluster.h"
#include "fiberloop/fock.h"
#include "fiberloop/klm.h"
#include "fiberloop/loop_machine.h"
#include "fiberloop/reck.h"
#include "fiberloop/rng.h"
#include "fiberloop/serialize.h"

namespace py = pybind11;
using namespace fiberloop;

namespace {

py::dict terms_dict(const FockState &s) {
    py::dict out;
    for (const auto &[occ, amp] : s.terms()) {
        out[py::tuple(py::cast(occ))] = amp;
    }
    return out;
}

py::tuple herald_tuple(const HeraldedResult &r) {
    return py::make_tuple(r.success, r.probability, r.pattern, r.state);
}

py::tuple fusion_tuple(const FusionResult &r) {
    return py::make_tuple(r.success, r.probability, r.pattern, r.state);
}

HeraldMode mode_of(const std::string &mode) {
    if (mode == "postselect") {
        return HeraldMode::kPostSelect;
    }
    if (mode == "sample") {
        return HeraldMode::kSample;
    }
    throw std::invalid_argument("mode must be 'sample' or 'postselect'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Time-bin loop photonic processor core";
    m.attr("__version__") = "1.0.0";

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &Rng::uniform)
        .def("split", &Rng::split, py::arg("stream"));

    py::class_<FockState>(m, "FockState")
        .def(py::init<std::size_t, int>(), py::arg("n_modes"), py::arg("total_photons"))
        .def_static("basis", &FockState::basis, py::arg("occupation"))
        .def_static("vacuum", &FockState::vacuum, py::arg("n_modes"))
        .def("add", &FockState::add, py::arg("occupation"), py::arg("amplitude"))
        .def("amplitude", &FockState::amplitude, py::arg("occupation"))
        .def_property_readonly("n_modes", &FockState::n_modes)
        .def_property_readonly("total_photons", &FockState::total_photons)
        .def("terms", &terms_dict)
        .def("norm_squared", &FockState::norm_squared)
        .def("normalized", &FockState::normalized)
        .def("to_json", [](const FockState &s) { return state_to_json(s).dump(); })
        .def_static("from_json", [](const std::string &text) { return state_from_json(json::parse(text)); })
        .def("__len__", [](const FockState &s) { return s.terms().size(); });

    m.def(
        "apply_unitary",
        [](const FockState &s, const Eigen::MatrixXcd &u) { return apply_mode_unitary(s, ModeUnitary(u)); },
        py::arg("state"),
        py::arg("unitary"));
    m.def(
        "apply_beamsplitter",
        [](const FockState &s, std::size_t i, std::size_t j, double theta, double phi) {
            return apply_beamsplitter(s, i, j, theta, phi);
        },
        py::arg("state"),
        py::arg("i"),
        py::arg("j"),
        py::arg("theta"),
        py::arg("phi") = 0.0);
    m.def("beamsplitter_block", &beamsplitter_block, py::arg("theta"), py::arg("phi") = 0.0);
    m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));
    m.def(
        "post_select",
        [](const FockState &s, const std::vector<std::size_t> &modes, const Occupation &pattern) {
            auto r = post_select(s, modes, pattern);
            return py::make_tuple(r.state, r.probability);
        },
        py::arg("state"),
        py::arg("modes"),
        py::arg("pattern"));
    m.def(
        "permanent",
        [](const Eigen::MatrixXcd &a) { return permanent(a); },
        py::arg("matrix"));
    m.def(
        "output_probability",
        [](const Eigen::MatrixXcd &u, const Occupation &in, const Occupation &out) {
            return output_probability(ModeUnitary(u), in, out);
        },
        py::arg("unitary"),
        py::arg("input"),
        py::arg("output"));

    py::class_<LoopSchedule>(m, "LoopSchedule")
        .def_property_readonly("pass_count", &LoopSchedule::pass_count)
        .def_property_readonly("n_bins", [](const LoopSchedule &s) { return s.config.n_bins; })
        .def("to_json", [](const LoopSchedule &s) { return schedule_to_json(s).dump(); })
        .def_static("from_json", [](const std::string &text) { return schedule_from_json(json::parse(text)); });

    m.def(
        "compile",
        [](const Eigen::MatrixXcd &u, double tol) {
            ModeUnitary mu(u);
            return compile(mu, LoopConfig::for_train(mu.dim()), tol);
        },
        py::arg("unitary"),
        py::arg("tol") = kVerifyTolerance);
    m.def(
        "effective_unitary",
        [](const LoopSchedule &s) { return Eigen::MatrixXcd(effective_unitary(s).matrix()); },
        py::arg("schedule"));
    m.def(
        "verify_schedule",
        [](const LoopSchedule &s, const Eigen::MatrixXcd &u, double tol) {
            return verify_schedule(s, ModeUnitary(u), tol).error;
        },
        py::arg("schedule"),
        py::arg("unitary"),
        py::arg("tol") = kVerifyTolerance);
    m.def(
        "phase_free_distance",
        [](const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) { return phase_free_distance(a, b); },
        py::arg("a"),
        py::arg("b"));

    m.def(
        "ns_unitary", [] { return Eigen::MatrixXcd(ns_unitary().matrix()); });
    m.def(
        "ns_gate",
        [](const FockState &s, std::size_t target, const std::string &mode, Rng *rng) {
            return herald_tuple(ns_gate(s, target, mode_of(mode), rng));
        },
        py::arg("state"),
        py::arg("target"),
        py::arg("mode") = "postselect",
        py::arg("rng") = nullptr);
    m.def(
        "cz_gate",
        [](const FockState &s,
           std::pair<std::size_t, std::size_t> a,
           std::pair<std::size_t, std::size_t> b,
           const std::string &mode,
           Rng *rng) {
            return herald_tuple(
                cz_gate(s, ModePair{a.first, a.second}, ModePair{b.first, b.second}, mode_of(mode), rng));
        },
        py::arg("state"),
        py::arg("a"),
        py::arg("b"),
        py::arg("mode") = "postselect",
        py::arg("rng") = nullptr);
    m.def(
        "encode_dual_rail",
        [](cplx a0, cplx a1) { return encode_dual_rail(a0, a1); },
        py::arg("a0"),
        py::arg("a1"));
    m.def(
        "decode_dual_rail",
        [](const FockState &s, std::pair<std::size_t, std::size_t> pair) {
            auto a = decode_dual_rail(s, ModePair{pair.first, pair.second});
            return py::make_tuple(a[0], a[1]);
        },
        py::arg("state"),
        py::arg("pair") = std::pair<std::size_t, std::size_t>{0, 1});

    py::class_<GraphState>(m, "GraphState")
        .def(py::init<int>(), py::arg("n") = 0)
        .def_static("star", &GraphState::make_star, py::arg("branches"), py::arg("first_id") = 0)
        .def_static("path", &GraphState::make_path, py::arg("length"), py::arg("first_id") = 0)
        .def("vertices", &GraphState::vertices)
        .def("edges", &GraphState::edges)
        .def("has_edge", &GraphState::has_edge)
        .def("frame", [](const GraphState &g, int v) { return g.frame(v).tag(); })
        .def("to_json", [](const GraphState &g) { return graph_to_json(g).dump(); })
        .def_static("from_json", [](const std::string &text) { return graph_from_json(json::parse(text)); })
        .def("__len__", &GraphState::size);
    m.def("disjoint_union", &disjoint_union);
    m.def("add_cz_edge", &add_cz_edge, py::arg("graph"), py::arg("a"), py::arg("b"));
    m.def("measure_x", &measure_x, py::arg("graph"), py::arg("v"), py::arg("outcome") = 1);
    m.def("measure_y", &measure_y, py::arg("graph"), py::arg("v"), py::arg("outcome") = 1);
    m.def("measure_z", &measure_z, py::arg("graph"), py::arg("v"), py::arg("outcome") = 1);
    m.def("graph_to_fock", &graph_to_fock, py::arg("graph"), py::arg("cap") = kDefaultFockQubitCap);
    m.def(
        "pbs_timebin",
        &pbs_timebin,
        py::arg("state"),
        py::arg("h1"),
        py::arg("v1"),
        py::arg("h2"),
        py::arg("v2"));
    m.def(
        "fusion",
        [](const GraphState &g, int a, int b, int type, const Occupation &pattern) {
            auto rails = graph_rails(g);
            FockState in = graph_to_fock(g);
            auto r = type == 1 ? fusion_type_I(in, rails.at(a), rails.at(b), nullptr, pattern)
                               : fusion_type_II(in, rails.at(a), rails.at(b), nullptr, pattern);
            GraphState predicted =
                type == 1 ? predict_fusion_type_I(g, a, b, pattern) : predict_fusion_type_II(g, a, b, pattern);
            return py::make_tuple(fusion_tuple(r), predicted);
        },
        py::arg("graph"),
        py::arg("a"),
        py::arg("b"),
        py::arg("type"),
        py::arg("pattern"));

    m.def("required_branches", &required_branches, py::arg("p_gate"), py::arg("p_bond"));
    m.def(
        "bonding_monte_carlo",
        [](double p_gate, int k, std::uint64_t trials, std::uint64_t seed) {
            auto s = bonding_monte_carlo(p_gate, k, trials, Rng(seed));
            py::dict d;
            d["p_gate"] = s.p_gate;
            d["k"] = s.k;
            d["trials"] = s.trials;
            d["successes"] = s.successes;
            d["rate"] = s.rate;
            d["analytic_rate"] = s.analytic_rate;
            return d;
        },
        py::arg("p_gate"),
        py::arg("k"),
        py::arg("trials"),
        py::arg("seed") = 0);
}
