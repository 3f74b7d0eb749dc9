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

#include "fiberloop/commands.h"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fiberloop/cluster.h"
#include "fiberloop/klm.h"
#include "fiberloop/loop_machine.h"
#include "fiberloop/reck.h"
#include "fiberloop/rng.h"
#include "fiberloop/serialize.h"

namespace fiberloop {

namespace {

template <typename F>
CommandResult guarded(F &&body) {
    try {
        return body();
    } catch (const FormatError &e) {
        return {kExitInputError, "", e.what()};
    } catch (const CompileError &e) {
        return {kExitVerificationFailure, "", e.what()};
    } catch (const std::invalid_argument &e) {
        return {kExitInputError, "", e.what()};
    } catch (const std::out_of_range &e) {
        return {kExitInputError, "", e.what()};
    } catch (const std::length_error &e) {
        return {kExitInputError, "", e.what()};
    } catch (const std::domain_error &e) {
        return {kExitInputError, "", e.what()};
    } catch (const std::exception &e) {
        return {kExitInternalError, "", std::string("internal error: ") + e.what()};
    }
}

json report_header(const std::string &command) {
    json doc = with_header("fiberloop.report");
    doc["command"] = command;
    return doc;
}

std::string render(const json &doc) {
    return doc.dump(2) + "\n";
}

std::vector<double> parse_reals(const std::string &text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double x = std::stod(item, &used);
        if (used != item.size()) {
            throw std::invalid_argument("bad number '" + item + "'");
        }
        out.push_back(x);
    }
    return out;
}

std::vector<cplx> input_amplitudes(const std::string &input, std::size_t count, Rng rng) {
    std::vector<cplx> amps;
    if (input.empty() || input == "random") {
        for (std::size_t k = 0; k < count; k++) {
            double re = 2 * rng.uniform() - 1;
            double im = 2 * rng.uniform() - 1;
            amps.emplace_back(re, im);
        }
    } else {
        for (double x : parse_reals(input)) {
            amps.emplace_back(x, 0.0);
        }
    }
    if (amps.size() != count) {
        throw std::invalid_argument("input needs " + std::to_string(count) + " amplitudes");
    }
    double norm = 0;
    for (auto a : amps) {
        norm += std::norm(a);
    }
    if (norm == 0) {
        throw std::invalid_argument("input amplitudes are all zero");
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    return amps;
}

json amplitudes_json(const std::vector<cplx> &amps) {
    json out = json::array();
    for (auto a : amps) {
        out.push_back(json::array({a.real(), a.imag()}));
    }
    return out;
}

HeraldMode parse_mode(const std::string &mode) {
    if (mode == "sample") {
        return HeraldMode::kSample;
    }
    if (mode == "postselect") {
        return HeraldMode::kPostSelect;
    }
    throw std::invalid_argument("mode must be 'sample' or 'postselect'");
}

}  // namespace

CommandResult cmd_compile(const CompileOptions &opts) {
    return guarded([&]() -> CommandResult {
        ModeUnitary u(unitary_from_json(read_json_file(opts.unitary_path)));
        if (!u.is_unitary(kUnitarityTolerance)) {
            std::ostringstream msg;
            msg << "input matrix is not unitary (max deviation " << u.unitarity_error() << ")";
            return {kExitInputError, "", msg.str()};
        }
        const std::size_t n = u.dim();
        LoopConfig config = LoopConfig::for_train(n, opts.tau);
        if (opts.outer_delay_bins) {
            config.outer_delay_bins = *opts.outer_delay_bins;
        }
        config.validate();

        json doc = report_header("compile");
        doc["config"] = json{
            {"unitary", opts.unitary_path},
            {"out", opts.schedule_out},
            {"tol", opts.tol},
            {"tau", config.tau},
            {"n_bins", config.n_bins},
            {"outer_delay_bins", config.outer_delay_bins}};
        doc["dim"] = n;
        doc["pass_bound"] = 3 * n * (n - 1) / 2 + n;

        LoopSchedule schedule;
        try {
            schedule = compile(u, config, opts.tol);
        } catch (const CompileError &e) {
            doc["pass_count"] = nullptr;
            doc["verification_error"] = e.error();
            doc["ok"] = false;
            return {kExitVerificationFailure, render(doc), e.what()};
        }
        Verification v = verify_schedule(schedule, u, opts.tol);
        doc["pass_count"] = schedule.pass_count();
        doc["verification_error"] = v.error;
        doc["ok"] = v.ok;
        if (!opts.schedule_out.empty()) {
            write_text_file(opts.schedule_out, render(schedule_to_json(schedule)));
        }
        if (!v.ok) {
            return {kExitVerificationFailure, render(doc), "schedule misses the target unitary"};
        }
        return {kExitOk, render(doc), ""};
    });
}

CommandResult cmd_simulate(const SimulateOptions &opts) {
    return guarded([&]() -> CommandResult {
        LoopSchedule schedule = schedule_from_json(read_json_file(opts.schedule_path));
        FockState input = state_from_json(read_json_file(opts.state_path));
        if (input.n_modes() != schedule.config.n_bins) {
            return {
                kExitInputError,
                "",
                "state has " + std::to_string(input.n_modes()) + " modes but the schedule expects " +
                    std::to_string(schedule.config.n_bins) + " bins"};
        }
        if (!input.is_normalized()) {
            return {kExitInputError, "", "input state is not normalized"};
        }
        auto run_once = [&](Rng &rng) {
            Machine machine(schedule.config);
            machine.load_pulse_train(input);
            HeraldPolicy policy;
            policy.rng = &rng;
            return run_schedule(machine, schedule, policy);
        };
        const Rng root(opts.seed);
        Rng first_rng = root.split(0);
        RunResult first = run_once(first_rng);

        json doc = report_header("simulate");
        doc["config"] = json{
            {"schedule", opts.schedule_path},
            {"state", opts.state_path},
            {"seed", opts.seed},
            {"shots", opts.shots},
            {"trace", opts.trace_out}};
        doc["pass_count"] = schedule.pass_count();
        doc["record"] = record_to_json(first.record);
        doc["outcome_probabilities"] = first.outcome_probabilities;
        doc["final_state"] = state_to_json(first.final_state.pruned());

        if (opts.shots > 0) {
            bool heralded = false;
            for (const auto &r : schedule.rounds) {
                heralded = heralded || !r.extraction.empty();
            }
            std::map<std::string, std::uint64_t> counts;
            for (std::uint64_t s = 0; s < opts.shots; s++) {
                Rng rng = root.split(s);
                FockState final_state = heralded ? run_once(rng).final_state : first.final_state;
                std::vector<std::size_t> all(final_state.n_modes());
                for (std::size_t k = 0; k < all.size(); k++) {
                    all[k] = k;
                }
                counts[occupation_key(measure_modes(final_state, all, rng).outcome)]++;
            }
            json hist = json::object();
            for (const auto &[key, c] : counts) {
                hist[key] = c;
            }
            doc["histogram"] = std::move(hist);
        }
        if (!opts.trace_out.empty()) {
            write_text_file(opts.trace_out, trace_to_jsonl(first.trace));
        }
        return {kExitOk, render(doc), ""};
    });
}

CommandResult cmd_bond(const BondOptions &opts) {
    return guarded([&]() -> CommandResult {
        if (opts.p_gate.empty() || opts.p_bond.empty()) {
            throw std::invalid_argument("need at least one p_gate and one p_bond");
        }
        if (opts.format != "csv" && opts.format != "json") {
            throw std::invalid_argument("format must be csv or json");
        }
        const Rng root(opts.seed);
        std::vector<std::pair<BondStats, double>> rows;
        std::uint64_t index = 0;
        for (double pg : opts.p_gate) {
            for (double pb : opts.p_bond) {
                int k = required_branches(pg, pb);
                BondStats stats;
                if (opts.trials > 0) {
                    stats = bonding_monte_carlo(pg, k, opts.trials, root.split(index));
                } else {
                    stats.p_gate = pg;
                    stats.k = k;
                    stats.analytic_rate = bonding_success_probability(pg, k);
                }
                rows.emplace_back(stats, pb);
                index++;
            }
        }
        if (opts.format == "csv") {
            std::string out = bond_csv_header();
            out = "# command=bond trials=" + std::to_string(opts.trials) + " seed=" + std::to_string(opts.seed) +
                  "\n" + out;
            for (const auto &[stats, pb] : rows) {
                out += bond_csv_row(stats, pb, opts.seed);
            }
            return {kExitOk, out, ""};
        }
        json doc = report_header("bond");
        doc["config"] = json{
            {"p_gate", opts.p_gate}, {"p_bond", opts.p_bond}, {"trials", opts.trials}, {"seed", opts.seed}};
        json items = json::array();
        for (const auto &[stats, pb] : rows) {
            json row{{"p_gate", stats.p_gate}, {"p_bond", pb}, {"k", stats.k}, {"trials", stats.trials}};
            row["successes"] = stats.successes;
            row["rate"] = stats.trials == 0 ? json(nullptr) : json(stats.rate);
            row["analytic_rate"] = stats.analytic_rate;
            items.push_back(std::move(row));
        }
        doc["rows"] = std::move(items);
        return {kExitOk, render(doc), ""};
    });
}

CommandResult cmd_gates(const GatesOptions &opts) {
    return guarded([&]() -> CommandResult {
        const HeraldMode mode = parse_mode(opts.mode);
        const Rng root(opts.seed);
        Rng herald_rng = root.split(1);
        Rng *rng = mode == HeraldMode::kSample ? &herald_rng : nullptr;

        json doc = report_header("gates");
        doc["config"] = json{
            {"gadget", opts.gadget},
            {"mode", opts.mode},
            {"input", opts.input.empty() ? std::string("default") : opts.input},
            {"seed", opts.seed},
            {"tol", opts.tol}};

        double probability = 0;
        double expected = 0;
        bool success = false;
        std::optional<double> fid;
        Occupation pattern;

        if (opts.gadget == "ns") {
            // Signal mode plus a reference mode keeps the photon number fixed.
            auto a = input_amplitudes(opts.input, 3, root.split(0));
            FockState in(2, 2);
            FockState want(2, 2);
            for (int k = 0; k < 3; k++) {
                in.add({k, 2 - k}, a[static_cast<std::size_t>(k)]);
                want.add({k, 2 - k}, k == 2 ? -a[2] : a[static_cast<std::size_t>(k)]);
            }
            doc["input_amplitudes"] = amplitudes_json(a);
            auto r = ns_gate(in, 0, mode, rng);
            probability = r.probability;
            success = r.success;
            pattern = r.pattern;
            expected = 0.25;
            if (success) {
                fid = fidelity(r.state, want);
            }
        } else if (opts.gadget == "cz") {
            std::vector<cplx> a;
            if (opts.input.size() == 2 && (opts.input[0] == '0' || opts.input[0] == '1') &&
                (opts.input[1] == '0' || opts.input[1] == '1')) {
                a.assign(4, 0.0);
                a[static_cast<std::size_t>((opts.input[0] - '0') * 2 + (opts.input[1] - '0'))] = 1.0;
            } else {
                a = input_amplitudes(opts.input, 4, root.split(0));
            }
            FockState in(4, 2);
            FockState want(4, 2);
            for (int x = 0; x < 4; x++) {
                int qa = x >> 1;
                int qb = x & 1;
                cplx amp = a[static_cast<std::size_t>(x)];
                Occupation occ{1 - qa, qa, 1 - qb, qb};
                in.add(occ, amp);
                want.add(occ, x == 3 ? -amp : amp);
            }
            in = in.pruned();
            doc["input_amplitudes"] = amplitudes_json(a);
            auto r = cz_gate(in, ModePair{0, 1}, ModePair{2, 3}, mode, rng);
            probability = r.probability;
            success = r.success;
            pattern = r.pattern;
            expected = 1.0 / 16;
            if (success) {
                fid = fidelity(r.state, want);
            }
        } else if (opts.gadget == "fusion1" || opts.gadget == "fusion2") {
            if (!opts.input.empty() && opts.input != "bell") {
                throw std::invalid_argument("fusion gadgets take the input 'bell'");
            }
            const bool type_one = opts.gadget == "fusion1";
            GraphState g = disjoint_union(GraphState::make_path(2, 0), GraphState::make_path(2, 2));
            auto rails = graph_rails(g);
            FockState in = graph_to_fock(g);
            std::optional<Occupation> forced;
            if (mode == HeraldMode::kPostSelect) {
                forced = type_one ? Occupation{1, 0} : Occupation{1, 0, 1, 0};
            }
            auto r = type_one ? fusion_type_I(in, rails[1], rails[2], rng, forced)
                              : fusion_type_II(in, rails[1], rails[2], rng, forced);
            probability = r.probability;
            success = r.success;
            pattern = r.pattern;
            expected = 0.5;
            GraphState predicted =
                type_one ? predict_fusion_type_I(g, 1, 2, pattern) : predict_fusion_type_II(g, 1, 2, pattern);
            doc["predicted_graph"] = graph_to_json(predicted);
            fid = predicted.size() == 0 ? 1.0 : fidelity(r.state, graph_to_fock(predicted));
        } else {
            throw std::invalid_argument("unknown gadget '" + opts.gadget + "' (expected ns, cz, fusion1, fusion2)");
        }

        bool ok = std::abs(probability - expected) <= opts.tol && (!fid || *fid >= 1 - opts.tol);
        doc["herald_probability"] = probability;
        doc["expected_probability"] = expected;
        doc["success"] = success;
        doc["pattern"] = occupation_key(pattern);
        doc["fidelity"] = fid ? json(*fid) : json(nullptr);
        doc["ok"] = ok;
        if (!ok) {
            return {kExitVerificationFailure, render(doc), "gadget missed its oracle"};
        }
        return {kExitOk, render(doc), ""};
    });
}

}  // namespace fiberloop
