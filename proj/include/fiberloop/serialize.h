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

#ifndef FIBERLOOP_SERIALIZE_H
#define FIBERLOOP_SERIALIZE_H

#include <stdexcept>
#include <string>
#include <vector>

#include "fiberloop/cluster.h"
#include "fiberloop/fock.h"
#include "fiberloop/loop_machine.h"
#include "json.hpp"

namespace fiberloop {

using json = nlohmann::ordered_json;

inline constexpr const char *kFormatVersion = "1.0";
inline constexpr int kFormatMajor = 1;

/// Malformed document, wrong format tag or unsupported major version.
class FormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Throws FormatError unless doc["format"] == format and the major version is supported.
void check_header(const json &doc, const std::string &format);
json with_header(const std::string &format);

json state_to_json(const FockState &state);
FockState state_from_json(const json &doc);

json unitary_to_json(const Eigen::MatrixXcd &u);
/// Reads the matrix without checking unitarity. "im" may be omitted.
Eigen::MatrixXcd unitary_from_json(const json &doc);

json schedule_to_json(const LoopSchedule &schedule);
LoopSchedule schedule_from_json(const json &doc);

json graph_to_json(const GraphState &g);
GraphState graph_from_json(const json &doc);

json record_to_json(const MeasurementRecord &record);

/// One header line, then one JSON object per trace record.
std::string trace_to_jsonl(const std::vector<TraceRecord> &trace);

std::string bond_csv_header();
std::string bond_csv_row(const BondStats &stats, double p_bond, std::uint64_t seed);

/// NS, CZ and PBS gadgets with their ancilla and herald patterns.
json gadget_library_json();

/// "(1,0)" style key for an occupation pattern.
std::string occupation_key(const Occupation &occ);

json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

}  // namespace fiberloop

#endif
