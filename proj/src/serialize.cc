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

#include "fiberloop/serialize.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fiberloop/klm.h"

namespace fiberloop {

namespace {

template <typename T>
T get_field(const json &doc, const char *key) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw FormatError(std::string("missing field '") + key + "'");
    }
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception &e) {
        throw FormatError(std::string("bad field '") + key + "': " + e.what());
    }
}

std::string fmt_double(double x) {
    char buf[64];
    for (int precision = 1; precision <= 17; precision++) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

json matrix_part(const Eigen::MatrixXcd &u, bool imag) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < u.rows(); r++) {
        json row = json::array();
        for (Eigen::Index c = 0; c < u.cols(); c++) {
            row.push_back(imag ? u(r, c).imag() : u(r, c).real());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json with_header(const std::string &format) {
    json doc = json::object();
    doc["format"] = format;
    doc["version"] = kFormatVersion;
    return doc;
}

void check_header(const json &doc, const std::string &format) {
    auto tag = get_field<std::string>(doc, "format");
    if (tag != format) {
        throw FormatError("expected format '" + format + "', got '" + tag + "'");
    }
    auto version = get_field<std::string>(doc, "version");
    int major = 0;
    std::size_t used = 0;
    try {
        major = std::stoi(version, &used);
    } catch (const std::exception &) {
        throw FormatError("unreadable version '" + version + "'");
    }
    if (major != kFormatMajor || (used < version.size() && version[used] != '.')) {
        throw FormatError("unsupported format version '" + version + "'");
    }
}

json state_to_json(const FockState &state) {
    json doc = with_header("fiberloop.state");
    doc["n_modes"] = state.n_modes();
    doc["total_photons"] = state.total_photons();
    json terms = json::array();
    for (const auto &[occ, amp] : state.terms()) {
        terms.push_back(json{{"occ", occ}, {"re", amp.real()}, {"im", amp.imag()}});
    }
    doc["terms"] = std::move(terms);
    return doc;
}

FockState state_from_json(const json &doc) {
    check_header(doc, "fiberloop.state");
    auto n = get_field<std::size_t>(doc, "n_modes");
    auto photons = get_field<int>(doc, "total_photons");
    FockState state(n, photons);
    for (const auto &term : get_field<json>(doc, "terms")) {
        auto occ = get_field<Occupation>(term, "occ");
        double re = get_field<double>(term, "re");
        double im = term.contains("im") ? get_field<double>(term, "im") : 0.0;
        try {
            state.add(occ, cplx(re, im));
        } catch (const std::exception &e) {
            throw FormatError(std::string("bad term: ") + e.what());
        }
    }
    return state;
}

json unitary_to_json(const Eigen::MatrixXcd &u) {
    json doc = with_header("fiberloop.unitary");
    doc["dim"] = u.rows();
    doc["re"] = matrix_part(u, false);
    doc["im"] = matrix_part(u, true);
    return doc;
}

Eigen::MatrixXcd unitary_from_json(const json &doc) {
    check_header(doc, "fiberloop.unitary");
    auto dim = get_field<std::size_t>(doc, "dim");
    auto re = get_field<std::vector<std::vector<double>>>(doc, "re");
    std::vector<std::vector<double>> im;
    if (doc.contains("im")) {
        im = get_field<std::vector<std::vector<double>>>(doc, "im");
    } else {
        im.assign(dim, std::vector<double>(dim, 0.0));
    }
    if (dim == 0 || re.size() != dim || im.size() != dim) {
        throw FormatError("matrix shape does not match dim");
    }
    auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd u(n, n);
    for (std::size_t r = 0; r < dim; r++) {
        if (re[r].size() != dim || im[r].size() != dim) {
            throw FormatError("matrix shape does not match dim");
        }
        for (std::size_t c = 0; c < dim; c++) {
            u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cplx(re[r][c], im[r][c]);
        }
    }
    return u;
}

json schedule_to_json(const LoopSchedule &schedule) {
    json doc = with_header("fiberloop.schedule");
    doc["config"] = json{
        {"tau", schedule.config.tau},
        {"n_bins", schedule.config.n_bins},
        {"outer_delay_bins", schedule.config.outer_delay_bins}};
    doc["rounds"] = schedule.rounds.size();
    json passes = json::array();
    json injections = json::array();
    json extractions = json::array();
    for (std::size_t r = 0; r < schedule.rounds.size(); r++) {
        const Round &round = schedule.rounds[r];
        if (round.injection) {
            injections.push_back(json{{"round", r}, {"state", state_to_json(*round.injection)}});
        }
        for (const auto &p : round.passes) {
            json central = json::array();
            for (const auto &c : p.central) {
                central.push_back(json{{"theta", c.theta}, {"phi", c.phi}});
            }
            passes.push_back(json{{"round", r}, {"entry", p.entry}, {"central", central}, {"exit", p.exit}});
        }
        if (!round.extraction.empty()) {
            extractions.push_back(json{{"round", r}, {"bins", round.extraction}});
        }
    }
    doc["passes"] = std::move(passes);
    doc["injections"] = std::move(injections);
    doc["extractions"] = std::move(extractions);
    return doc;
}

LoopSchedule schedule_from_json(const json &doc) {
    check_header(doc, "fiberloop.schedule");
    LoopSchedule s;
    const json config = get_field<json>(doc, "config");
    s.config.tau = get_field<double>(config, "tau");
    s.config.n_bins = get_field<std::size_t>(config, "n_bins");
    s.config.outer_delay_bins = get_field<std::size_t>(config, "outer_delay_bins");
    auto rounds = doc.contains("rounds") ? get_field<std::size_t>(doc, "rounds") : std::size_t{1};
    s.rounds.resize(rounds);
    auto round_of = [&](const json &item) -> Round & {
        auto r = get_field<std::size_t>(item, "round");
        if (r >= rounds) {
            throw FormatError("round index " + std::to_string(r) + " out of range");
        }
        return s.rounds[r];
    };
    for (const auto &item : get_field<json>(doc, "passes")) {
        PassSettings p;
        p.entry = get_field<std::vector<bool>>(item, "entry");
        p.exit = get_field<std::vector<bool>>(item, "exit");
        for (const auto &c : get_field<json>(item, "central")) {
            p.central.push_back(CentralSetting{get_field<double>(c, "theta"), get_field<double>(c, "phi")});
        }
        round_of(item).passes.push_back(std::move(p));
    }
    if (doc.contains("injections")) {
        for (const auto &item : get_field<json>(doc, "injections")) {
            round_of(item).injection = state_from_json(get_field<json>(item, "state"));
        }
    }
    if (doc.contains("extractions")) {
        for (const auto &item : get_field<json>(doc, "extractions")) {
            round_of(item).extraction = get_field<std::vector<std::size_t>>(item, "bins");
        }
    }
    try {
        s.validate();
    } catch (const std::exception &e) {
        throw FormatError(std::string("invalid schedule: ") + e.what());
    }
    return s;
}

json graph_to_json(const GraphState &g) {
    json doc = with_header("fiberloop.graph");
    doc["vertices"] = g.vertices();
    json edges = json::array();
    for (auto [a, b] : g.edges()) {
        edges.push_back(json::array({a, b}));
    }
    doc["edges"] = std::move(edges);
    json frames = json::object();
    for (int v : g.vertices()) {
        if (!g.frame(v).is_identity()) {
            frames[std::to_string(v)] = g.frame(v).tag();
        }
    }
    doc["frames"] = std::move(frames);
    return doc;
}

GraphState graph_from_json(const json &doc) {
    check_header(doc, "fiberloop.graph");
    GraphState g;
    try {
        for (int v : get_field<std::vector<int>>(doc, "vertices")) {
            g.add_vertex(v);
        }
        for (const auto &e : get_field<std::vector<std::vector<int>>>(doc, "edges")) {
            if (e.size() != 2) {
                throw FormatError("edge needs two endpoints");
            }
            if (g.has_vertex(e[0]) && g.has_vertex(e[1]) && g.has_edge(e[0], e[1])) {
                throw FormatError("duplicate edge");
            }
            g.toggle_edge(e[0], e[1]);
        }
        if (doc.contains("frames")) {
            const json frames = get_field<json>(doc, "frames");
            for (const auto &[key, tag] : frames.items()) {
                g.set_frame(std::stoi(key), LocalClifford::parse(tag.get<std::string>()));
            }
        }
    } catch (const FormatError &) {
        throw;
    } catch (const std::exception &e) {
        throw FormatError(std::string("invalid graph: ") + e.what());
    }
    return g;
}

json record_to_json(const MeasurementRecord &record) {
    json out = json::array();
    for (const auto &e : record.entries) {
        out.push_back(json{{"round", e.round}, {"outcome", e.outcome}});
    }
    return out;
}

std::string trace_to_jsonl(const std::vector<TraceRecord> &trace) {
    std::string out = with_header("fiberloop.trace").dump() + "\n";
    for (const auto &t : trace) {
        json line = json{
            {"round", t.round},
            {"stage", t.stage},
            {"pass", t.pass},
            {"tick", t.tick},
            {"entry", t.entry},
            {"exit", t.exit},
            {"theta", t.theta},
            {"phi", t.phi},
            {"detector", t.detector}};
        out += line.dump();
        out += "\n";
    }
    return out;
}

std::string bond_csv_header() {
    return "# format=fiberloop.bond version=" + std::string(kFormatVersion) +
           "\np_gate,p_bond,k,trials,successes,rate,analytic_rate,seed\n";
}

std::string bond_csv_row(const BondStats &stats, double p_bond, std::uint64_t seed) {
    std::ostringstream out;
    out << fmt_double(stats.p_gate) << ',' << fmt_double(p_bond) << ',' << stats.k << ',' << stats.trials << ','
        << stats.successes << ',' << (stats.trials == 0 ? std::string() : fmt_double(stats.rate)) << ','
        << fmt_double(stats.analytic_rate) << ',' << seed << '\n';
    return out.str();
}

json gadget_library_json() {
    json doc = with_header("fiberloop.gadgets");
    json gadgets = json::array();
    gadgets.push_back(json{
        {"name", "ns"},
        {"modes", json::array({"signal", "ancilla_photon", "ancilla_vacuum"})},
        {"unitary", unitary_to_json(ns_unitary().matrix())},
        {"ancilla", kNsAncilla},
        {"herald", kNsHerald},
        {"success_probability", 0.25}});
    gadgets.push_back(json{
        {"name", "cz"},
        {"modes", json::array({"a0", "a1", "b0", "b1", "ns_a_photon", "ns_a_vacuum", "ns_b_photon", "ns_b_vacuum"})},
        {"unitary", unitary_to_json(cz_gadget_unitary().matrix())},
        {"ancilla", kCzAncilla},
        {"herald", kCzHerald},
        {"success_probability", 0.0625}});
    gadgets.push_back(json{
        {"name", "pbs"},
        {"modes", json::array({"h1", "v1", "h2", "v2"})},
        {"unitary", unitary_to_json(pbs_matrix().cast<cplx>())}});
    doc["gadgets"] = std::move(gadgets);
    return doc;
}

std::string occupation_key(const Occupation &occ) {
    std::string out = "(";
    for (std::size_t k = 0; k < occ.size(); k++) {
        if (k > 0) {
            out += ',';
        }
        out += std::to_string(occ[k]);
    }
    return out + ")";
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw FormatError("cannot parse '" + path + "': " + e.what());
    }
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

}  // namespace fiberloop
