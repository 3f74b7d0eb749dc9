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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fiberloop/commands.h"
#include "fiberloop/random.h"
#include "fiberloop/serialize.h"

using namespace fiberloop;
namespace fs = std::filesystem;

namespace {

class CommandsTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fiberloop_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }
    std::string write(const std::string &name, const json &doc) const {
        write_text_file(path(name), doc.dump());
        return path(name);
    }
    std::string compiled(const Eigen::MatrixXcd &u, const std::string &name) const {
        CompileOptions c;
        c.unitary_path = write(name + "_u.json", unitary_to_json(u));
        c.schedule_out = path(name + ".json");
        EXPECT_EQ(cmd_compile(c).exit_code, kExitOk);
        return c.schedule_out;
    }
    fs::path dir_;
};

json report(const CommandResult &r) {
    return json::parse(r.output);
}

}  // namespace

TEST_F(CommandsTest, CompileIdentityAndHaar) {
    CompileOptions c;
    c.unitary_path = write("id.json", unitary_to_json(Eigen::MatrixXcd::Identity(3, 3)));
    auto r = cmd_compile(c);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    EXPECT_LT(report(r)["verification_error"].get<double>(), 1e-12);
    EXPECT_EQ(report(r)["config"]["tol"], 1e-9);

    Rng rng(5);
    c.unitary_path = write("haar.json", unitary_to_json(haar_unitary(5, rng).matrix()));
    c.schedule_out = path("haar_sched.json");
    r = cmd_compile(c);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    EXPECT_LE(report(r)["pass_count"].get<int>(), report(r)["pass_bound"].get<int>());
    EXPECT_NO_THROW(schedule_from_json(read_json_file(c.schedule_out)));
}

TEST_F(CommandsTest, CompileInputErrors) {
    CompileOptions c;
    Eigen::MatrixXcd bad(2, 2);
    bad << 1, 1, 0, 1;
    c.unitary_path = write("bad.json", unitary_to_json(bad));
    auto r = cmd_compile(c);
    EXPECT_EQ(r.exit_code, kExitInputError);
    EXPECT_NE(r.error.find("not unitary"), std::string::npos);

    write_text_file(path("garbage.json"), "{not json");
    c.unitary_path = path("garbage.json");
    EXPECT_EQ(cmd_compile(c).exit_code, kExitInputError);
    c.unitary_path = path("missing.json");
    EXPECT_EQ(cmd_compile(c).exit_code, kExitInputError);

    auto doc = unitary_to_json(Eigen::MatrixXcd::Identity(2, 2));
    doc["version"] = "2.0";
    c.unitary_path = write("future.json", doc);
    EXPECT_EQ(cmd_compile(c).exit_code, kExitInputError);
}

TEST_F(CommandsTest, CompileVerificationFailure) {
    Rng rng(5);
    CompileOptions c;
    c.unitary_path = write("haar.json", unitary_to_json(haar_unitary(4, rng).matrix()));
    c.tol = 1e-300;
    EXPECT_EQ(cmd_compile(c).exit_code, kExitVerificationFailure);
}

TEST_F(CommandsTest, SimulateIdentityHistogram) {
    SimulateOptions s;
    s.schedule_path = compiled(Eigen::MatrixXcd::Identity(2, 2), "id");
    s.state_path = write("s.json", state_to_json(FockState::basis({1, 0})));
    s.shots = 100;
    auto r = cmd_simulate(s);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    EXPECT_EQ(report(r)["histogram"], json::parse(R"j({"(1,0)": 100})j"));
}

TEST_F(CommandsTest, SimulateBalancedSplitAndBunching) {
    Eigen::MatrixXcd bs = ModeUnitary::beamsplitter(2, 0, 1, std::numbers::pi / 4, 0).matrix();
    SimulateOptions s;
    s.schedule_path = compiled(bs, "bs");
    s.state_path = write("s10.json", state_to_json(FockState::basis({1, 0})));
    s.shots = 10000;
    s.seed = 17;
    auto r = cmd_simulate(s);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    double ones = report(r)["histogram"]["(1,0)"].get<double>();
    EXPECT_NEAR(ones, 5000, 3 * std::sqrt(2500.0));

    s.state_path = write("s11.json", state_to_json(FockState::basis({1, 1})));
    s.shots = 2000;
    r = cmd_simulate(s);
    ASSERT_EQ(r.exit_code, kExitOk);
    EXPECT_FALSE(report(r)["histogram"].contains("(1,1)"));
}

TEST_F(CommandsTest, SimulateRejectsMismatchedState) {
    SimulateOptions s;
    s.schedule_path = compiled(Eigen::MatrixXcd::Identity(2, 2), "id");
    s.state_path = write("s.json", state_to_json(FockState::basis({1, 0, 0})));
    EXPECT_EQ(cmd_simulate(s).exit_code, kExitInputError);
}

TEST_F(CommandsTest, SimulateIsDeterministicAndWritesTrace) {
    Rng rng(3);
    SimulateOptions s;
    s.schedule_path = compiled(haar_unitary(3, rng).matrix(), "h");
    s.state_path = write("s.json", state_to_json(FockState::basis({1, 1, 0})));
    s.shots = 500;
    s.seed = 4;
    s.trace_out = path("trace.jsonl");
    auto a = cmd_simulate(s);
    auto b = cmd_simulate(s);
    EXPECT_EQ(a.output, b.output);
    std::ifstream in(s.trace_out);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(json::parse(first)["format"], "fiberloop.trace");
    s.seed = 5;
    EXPECT_NE(cmd_simulate(s).output, a.output);
}

TEST_F(CommandsTest, BondRows) {
    BondOptions b;
    b.p_gate = {0.5};
    b.p_bond = {0.75};
    b.trials = 100000;
    b.seed = 3;
    auto r = cmd_bond(b);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    std::istringstream in(r.output);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            lines.push_back(line);
        }
    }
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "p_gate,p_bond,k,trials,successes,rate,analytic_rate,seed");
    EXPECT_EQ(lines[1].substr(0, 9), "0.5,0.75,");
    std::vector<std::string> cells;
    std::stringstream row(lines[1]);
    while (std::getline(row, line, ',')) {
        cells.push_back(line);
    }
    EXPECT_EQ(cells[2], "2");
    EXPECT_NEAR(std::stod(cells[5]), 0.75, 3 * std::sqrt(0.75 * 0.25 / 1e5));
    EXPECT_EQ(cmd_bond(b).output, r.output);

    b.trials = 0;
    r = cmd_bond(b);
    EXPECT_NE(r.output.find("0.5,0.75,2,0,0,,0.75,3"), std::string::npos);
    b.p_gate = {1.5};
    EXPECT_EQ(cmd_bond(b).exit_code, kExitInputError);
}

TEST_F(CommandsTest, GatesReports) {
    GatesOptions g;
    g.gadget = "ns";
    g.seed = 11;
    auto r = cmd_gates(g);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    EXPECT_NEAR(report(r)["herald_probability"].get<double>(), 0.25, 1e-10);

    g.gadget = "cz";
    g.input = "11";
    r = cmd_gates(g);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    EXPECT_NEAR(report(r)["fidelity"].get<double>(), 1.0, 1e-10);

    g.gadget = "fusion1";
    g.input = "";
    r = cmd_gates(g);
    ASSERT_EQ(r.exit_code, kExitOk) << r.error;
    EXPECT_NEAR(report(r)["herald_probability"].get<double>(), 0.5, 1e-10);

    g.gadget = "fusion2";
    g.mode = "sample";
    EXPECT_EQ(cmd_gates(g).output, cmd_gates(g).output);

    g.gadget = "toffoli";
    EXPECT_EQ(cmd_gates(g).exit_code, kExitInputError);
    g.gadget = "ns";
    g.mode = "maybe";
    EXPECT_EQ(cmd_gates(g).exit_code, kExitInputError);
}

#ifdef FIBERLOOP_CLI_PATH
TEST_F(CommandsTest, CliRunsAreByteIdentical) {
    const std::string cli = FIBERLOOP_CLI_PATH;
    auto run = [&](const std::string &args, const std::string &out) {
        std::string cmd = "\"" + cli + "\" " + args + " > \"" + path(out) + "\"";
        return std::system(cmd.c_str());
    };
    auto slurp = [&](const std::string &name) {
        std::ifstream in(path(name), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    ASSERT_EQ(run("bond --p-gate 0.25 --p-bond 0.9 --trials 2000 --seed 8", "a.csv"), 0);
    ASSERT_EQ(run("bond --p-gate 0.25 --p-bond 0.9 --trials 2000 --seed 8", "b.csv"), 0);
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
    EXPECT_NE(run("gates nonsense", "c.json"), 0);
}
#endif
