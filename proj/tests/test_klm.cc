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
#include <numbers>

#include "fiberloop/klm.h"
#include "fiberloop/random.h"
#include "fiberloop/rng.h"

using namespace fiberloop;
using std::numbers::pi;

namespace {

double factorial(int k) {
    return std::tgamma(k + 1.0);
}

// <out| U |in> from the permanent of the repeated-row/column submatrix.
cplx transition_amplitude(const ModeUnitary &u, const Occupation &in, const Occupation &out) {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    double norm = 1;
    for (std::size_t k = 0; k < in.size(); k++) {
        for (int c = 0; c < in[k]; c++) {
            cols.push_back(static_cast<Eigen::Index>(k));
        }
        for (int c = 0; c < out[k]; c++) {
            rows.push_back(static_cast<Eigen::Index>(k));
        }
        norm *= factorial(in[k]) * factorial(out[k]);
    }
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); r++) {
        for (std::size_t c = 0; c < cols.size(); c++) {
            sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = u.matrix()(rows[r], cols[c]);
        }
    }
    return permanent(sub) / std::sqrt(norm);
}

FockState two_qubit_state(const std::array<cplx, 4> &c) {
    FockState s(4, 2);
    for (int x = 0; x < 4; x++) {
        int a = x >> 1;
        int b = x & 1;
        s.add({1 - a, a, 1 - b, b}, c[static_cast<std::size_t>(x)]);
    }
    return s.pruned();
}

}  // namespace

TEST(Ns, UnitaryIsUnitary) {
    EXPECT_TRUE(ns_unitary().is_unitary(1e-14));
}

TEST(Ns, HeraldAmplitudesFromPermanents) {
    auto u = ns_unitary();
    const double want[] = {-0.5, -0.5, 0.5};
    for (int k = 0; k <= 2; k++) {
        cplx amp = transition_amplitude(u, {k, 1, 0}, {k, 1, 0});
        EXPECT_NEAR(amp.real(), want[k], 1e-12) << k;
        EXPECT_NEAR(amp.imag(), 0.0, 1e-12);
    }
}

TEST(Ns, RandomInputsFlipTwoPhotonSign) {
    Rng rng(31);
    for (int trial = 0; trial < 20; trial++) {
        FockState in(2, 2);
        FockState want(2, 2);
        for (int k = 0; k <= 2; k++) {
            cplx a(normal(rng), normal(rng));
            in.add({k, 2 - k}, a);
            want.add({k, 2 - k}, k == 2 ? -a : a);
        }
        in = in.normalized();
        auto r = ns_gate(in, 0, HeraldMode::kPostSelect);
        EXPECT_TRUE(r.success);
        EXPECT_NEAR(r.probability, 0.25, 1e-12);
        EXPECT_GT(fidelity(r.state, want), 1 - 1e-12);
    }
    EXPECT_THROW(ns_gate(FockState::basis({3}), 0, HeraldMode::kPostSelect), std::invalid_argument);
    EXPECT_THROW(ns_gate(FockState::basis({1}), 1, HeraldMode::kPostSelect), std::out_of_range);
}

TEST(Ns, SamplingReportsObservedPattern) {
    Rng rng(3);
    int successes = 0;
    for (int k = 0; k < 2000; k++) {
        auto r = ns_gate(FockState::basis({1, 1}), 0, HeraldMode::kSample, &rng);
        EXPECT_EQ(r.success, r.pattern == kNsHerald);
        successes += r.success ? 1 : 0;
    }
    EXPECT_NEAR(successes / 2000.0, 0.25, 0.04);
    EXPECT_THROW(ns_gate(FockState::basis({1}), 0, HeraldMode::kSample), std::invalid_argument);
}

TEST(Cz, TruthTable) {
    const double sign[] = {1, 1, 1, -1};
    for (int x = 0; x < 4; x++) {
        std::array<cplx, 4> c{};
        c[static_cast<std::size_t>(x)] = 1;
        auto in = two_qubit_state(c);
        auto r = cz_gate(in, {0, 1}, {2, 3}, HeraldMode::kPostSelect);
        EXPECT_NEAR(r.probability, 1.0 / 16, 1e-12);
        EXPECT_NEAR(std::real(inner_product(in, r.state)), sign[x], 1e-12);
    }
}

TEST(Cz, RandomSuperpositions) {
    Rng rng(8);
    for (int trial = 0; trial < 10; trial++) {
        std::array<cplx, 4> c;
        for (auto &z : c) {
            z = cplx(normal(rng), normal(rng));
        }
        auto in = two_qubit_state(c).normalized();
        c[3] = -c[3];
        auto want = two_qubit_state(c);
        auto r = cz_gate(in, {0, 1}, {2, 3}, HeraldMode::kPostSelect);
        EXPECT_NEAR(r.probability, 1.0 / 16, 1e-12);
        EXPECT_GT(fidelity(r.state, want), 1 - 1e-12);
    }
}

TEST(Cz, GadgetUnitaryAgreesWithGate) {
    auto in = two_qubit_state({0.5, 0.5, 0.5, 0.5});
    auto direct = cz_gate(in, {0, 1}, {2, 3}, HeraldMode::kPostSelect);
    auto full = apply_mode_unitary(append_modes(in, kCzAncilla), cz_gadget_unitary());
    const std::size_t modes[] = {4, 5, 6, 7};
    auto sel = post_select(full, modes, kCzHerald);
    EXPECT_NEAR(sel.probability, direct.probability, 1e-12);
    EXPECT_GT(fidelity(sel.state, direct.state), 1 - 1e-12);
}

TEST(Cz, RejectsSharedRails) {
    auto in = two_qubit_state({1, 0, 0, 0});
    EXPECT_THROW(cz_gate(in, {0, 1}, {1, 2}, HeraldMode::kPostSelect), std::invalid_argument);
}

TEST(DualRail, EncodeDecodeRoundTrip) {
    cplx a0(0.6, 0);
    cplx a1(0, 0.8);
    auto s = encode_dual_rail(a0, a1);
    auto d = decode_dual_rail(s, {0, 1});
    EXPECT_NEAR(std::abs(d[0] - a0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d[1] - a1), 0.0, 1e-12);
    EXPECT_THROW(encode_dual_rail(1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(decode_dual_rail(FockState::basis({2, 0}), {0, 1}), std::domain_error);
    // A Bell pair is entangled, so neither half decodes on its own.
    FockState bell(4, 2);
    bell.add({1, 0, 1, 0}, 1 / std::sqrt(2.0));
    bell.add({0, 1, 0, 1}, 1 / std::sqrt(2.0));
    EXPECT_THROW(decode_dual_rail(bell, {0, 1}), std::domain_error);
}

TEST(SingleQubit, RandomGatesMatchMatrix) {
    Rng rng(12);
    for (int trial = 0; trial < 20; trial++) {
        Eigen::Matrix2cd v = haar_unitary(2, rng).matrix();
        if (trial == 0) {
            v << 0, 1, 1, 0;
        } else if (trial == 1) {
            v << 1, 0, 0, -1;
        } else if (trial == 2) {
            v << cplx(0, 1), 0, 0, 1;
        }
        auto op = single_qubit_gate(v, {0, 1});
        EXPECT_LT((op.block() - v).cwiseAbs().maxCoeff(), 1e-12) << trial;
        cplx a0(normal(rng), normal(rng));
        cplx a1(normal(rng), normal(rng));
        double n = std::sqrt(std::norm(a0) + std::norm(a1));
        a0 /= n;
        a1 /= n;
        auto out = apply_single_qubit_gate(encode_dual_rail(a0, a1), v, {0, 1});
        Eigen::Vector2cd want = v * Eigen::Vector2cd(a0, a1);
        FockState expect = encode_dual_rail(want(0), want(1));
        EXPECT_GT(fidelity(out, expect), 1 - 1e-12);
    }
    Eigen::Matrix2cd bad;
    bad << 1, 1, 0, 1;
    EXPECT_THROW(single_qubit_gate(bad, {0, 1}), std::invalid_argument);
    EXPECT_THROW(single_qubit_gate(Eigen::Matrix2cd::Identity(), {1, 0}), std::invalid_argument);
}

TEST(KlmRound, LoopCzMatchesDirectCz) {
    auto in = two_qubit_state({0.5, -0.5, cplx(0, 0.5), 0.5});
    HeraldPolicy policy;
    policy.forced[0] = kCzHerald;
    auto loop = klm_round(in, FockState::basis(kCzAncilla), cz_gadget_unitary(), policy);
    auto direct = cz_gate(in, {0, 1}, {2, 3}, HeraldMode::kPostSelect);
    EXPECT_EQ(loop.outcome, kCzHerald);
    EXPECT_NEAR(loop.probability, 1.0 / 16, 1e-12);
    EXPECT_GT(fidelity(loop.logical, direct.state), 1 - 1e-9);
}

TEST(KlmRound, ControllerRecompilesNextRound) {
    auto in = two_qubit_state({1, 0, 0, 0});
    const std::size_t rails[] = {0, 1};
    Eigen::Matrix2cd x;
    x << 0, 1, 1, 0;
    std::vector<KlmRoundSpec> rounds = {
        {FockState::basis({0}), ModeUnitary::identity(5)},
        {FockState::basis({0}), ModeUnitary::identity(5)},
    };
    HeraldPolicy policy;
    Rng rng(1);
    policy.rng = &rng;
    KlmController flip = [&](std::size_t next, const MeasurementRecord &rec) -> std::optional<ModeUnitary> {
        EXPECT_EQ(next, 1u);
        EXPECT_EQ(rec.entries.size(), 1u);
        return embed(x, rails, 5);
    };
    auto r = run_klm(in, rounds, policy, flip);
    EXPECT_GT(fidelity(r.logical, two_qubit_state({0, 0, 1, 0})), 1 - 1e-12);
    EXPECT_EQ(r.schedule.rounds.size(), 2u);
    EXPECT_EQ(r.schedule.rounds[1].passes.size(), 0u);
}

TEST(KlmRound, RejectsMismatchedUnitary) {
    HeraldPolicy policy;
    EXPECT_THROW(
        klm_round(FockState::basis({1, 0}), FockState::basis({0}), ModeUnitary::identity(4), policy),
        std::invalid_argument);
}
