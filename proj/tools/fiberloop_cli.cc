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

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "fiberloop/commands.h"
#include "fiberloop/serialize.h"

using namespace fiberloop;

namespace {

int emit(const CommandResult &r, const std::string &out_path) {
    if (!r.error.empty()) {
        std::cerr << "error: " << r.error << "\n";
    }
    if (!r.output.empty()) {
        if (out_path.empty()) {
            std::cout << r.output;
        } else {
            try {
                write_text_file(out_path, r.output);
            } catch (const std::exception &e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitInputError;
            }
        }
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Time-bin loop photonic processor toolkit"};
    app.require_subcommand(1);

    CompileOptions compile_opts;
    auto *compile_cmd = app.add_subcommand("compile", "Compile a mode unitary into a loop schedule");
    compile_cmd->add_option("unitary", compile_opts.unitary_path, "Unitary JSON file")->required();
    compile_cmd->add_option("--out", compile_opts.schedule_out, "Where to write the schedule JSON");
    compile_cmd->add_option("--tol", compile_opts.tol, "Verification tolerance")->capture_default_str();
    compile_cmd->add_option("--tau", compile_opts.tau, "Bin spacing")->capture_default_str();
    std::size_t outer = 0;
    auto *outer_opt = compile_cmd->add_option("--outer-delay", outer, "Outer loop length in bins");

    SimulateOptions sim_opts;
    std::string sim_out;
    auto *sim_cmd = app.add_subcommand("simulate", "Run a schedule on an input state");
    sim_cmd->add_option("schedule", sim_opts.schedule_path, "Schedule JSON file")->required();
    sim_cmd->add_option("state", sim_opts.state_path, "Input state JSON file")->required();
    sim_cmd->add_option("--seed", sim_opts.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--shots", sim_opts.shots, "Number of sampled shots")->capture_default_str();
    sim_cmd->add_option("--trace", sim_opts.trace_out, "Where to write the JSON-lines trace");
    sim_cmd->add_option("--out", sim_out, "Where to write the report");

    BondOptions bond_opts;
    std::string bond_out;
    auto *bond_cmd = app.add_subcommand("bond", "Micro-cluster bonding experiments");
    bond_cmd->add_option("--p-gate", bond_opts.p_gate, "Gate success probabilities")->required();
    bond_cmd->add_option("--p-bond", bond_opts.p_bond, "Target bonding probabilities")->required();
    bond_cmd->add_option("--trials", bond_opts.trials, "Monte Carlo trials per row")->capture_default_str();
    bond_cmd->add_option("--seed", bond_opts.seed, "Random seed")->capture_default_str();
    bond_cmd->add_option("--format", bond_opts.format, "csv or json")->capture_default_str();
    bond_cmd->add_option("--out", bond_out, "Where to write the report");

    GatesOptions gates_opts;
    std::string gates_out;
    auto *gates_cmd = app.add_subcommand("gates", "Heralded gate gadgets");
    gates_cmd->add_option("gadget", gates_opts.gadget, "ns, cz, fusion1 or fusion2")->required();
    gates_cmd->add_option("--mode", gates_opts.mode, "sample or postselect")->capture_default_str();
    gates_cmd->add_option("--input", gates_opts.input, "Gadget input (amplitudes, basis label or 'bell')");
    gates_cmd->add_option("--seed", gates_opts.seed, "Random seed")->capture_default_str();
    gates_cmd->add_option("--tol", gates_opts.tol, "Oracle tolerance")->capture_default_str();
    gates_cmd->add_option("--out", gates_out, "Where to write the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*compile_cmd) {
            if (*outer_opt) {
                compile_opts.outer_delay_bins = outer;
            }
            return emit(cmd_compile(compile_opts), "");
        }
        if (*sim_cmd) {
            return emit(cmd_simulate(sim_opts), sim_out);
        }
        if (*bond_cmd) {
            return emit(cmd_bond(bond_opts), bond_out);
        }
        if (*gates_cmd) {
            return emit(cmd_gates(gates_opts), gates_out);
        }
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
    return kExitInputError;
}
