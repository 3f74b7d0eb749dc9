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

#ifndef FIBERLOOP_COMMANDS_H
#define FIBERLOOP_COMMANDS_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fiberloop {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitVerificationFailure = 2,
    kExitInternalError = 3,
};

struct CommandResult {
    int exit_code = kExitOk;
    /// Report text for stdout (or --out).
    std::string output;
    /// Diagnostic for stderr.
    std::string error;
};

struct CompileOptions {
    std::string unitary_path;
    std::string schedule_out;  // empty: do not write the schedule
    double tol = 1e-9;
    double tau = 1;
    std::optional<std::size_t> outer_delay_bins;
};

struct SimulateOptions {
    std::string schedule_path;
    std::string state_path;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    std::string trace_out;  // JSON-lines trace of the first run
};

struct BondOptions {
    std::vector<double> p_gate;
    std::vector<double> p_bond;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::string format = "csv";  // csv or json
};

struct GatesOptions {
    std::string gadget;            // ns, cz, fusion1, fusion2
    std::string mode = "postselect";  // sample or postselect
    std::string input;             // gadget-specific, empty for the default
    std::uint64_t seed = 0;
    double tol = 1e-9;
};

CommandResult cmd_compile(const CompileOptions &opts);
CommandResult cmd_simulate(const SimulateOptions &opts);
CommandResult cmd_bond(const BondOptions &opts);
CommandResult cmd_gates(const GatesOptions &opts);

}  // namespace fiberloop

#endif
