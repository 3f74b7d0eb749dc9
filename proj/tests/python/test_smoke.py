# Copyright 2026 The fiberloop Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import json
import math

import numpy as np
import pytest

import fiberloop as fl


def haar(n, seed):
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_hong_ou_mandel():
    out = fl.apply_beamsplitter(fl.FockState.basis([1, 1]), 0, 1, math.pi / 4)
    assert abs(out.amplitude([1, 1])) < 1e-12
    assert abs(out.amplitude([2, 0])) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_compile_round_trip():
    u = haar(4, 7)
    schedule = fl.compile(u)
    assert fl.phase_free_distance(fl.effective_unitary(schedule), u) < 1e-9
    assert schedule.pass_count <= 3 * 4 * 3 // 2 + 4
    again = fl.LoopSchedule.from_json(schedule.to_json())
    assert fl.verify_schedule(again, u) < 1e-9


def test_permanent_matches_numpy_definition():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    assert fl.permanent(a) == pytest.approx(10)


def test_output_probability_matches_evolution():
    u = haar(3, 11)
    out = fl.apply_unitary(fl.FockState.basis([1, 1, 0]), u)
    for occ, amp in out.terms().items():
        assert fl.output_probability(u, [1, 1, 0], list(occ)) == pytest.approx(abs(amp) ** 2, abs=1e-10)


def test_ns_gate_probability():
    state = fl.FockState(2, 2)
    state.add([0, 2], 0.6)
    state.add([1, 1], 0.0)
    state.add([2, 0], 0.8)
    success, probability, pattern, out = fl.ns_gate(state, 0)
    assert success
    assert probability == pytest.approx(0.25, abs=1e-12)
    assert out.amplitude([2, 0]) / out.amplitude([0, 2]) == pytest.approx(-0.8 / 0.6, abs=1e-10)


def test_cz_gate_sign():
    success, probability, _, out = fl.cz_gate(fl.FockState.basis([0, 1, 0, 1]), (0, 1), (2, 3))
    assert success
    assert probability == pytest.approx(1 / 16, abs=1e-12)
    assert out.amplitude([0, 1, 0, 1]) == pytest.approx(-1, abs=1e-10)


def test_dual_rail_round_trip():
    a0, a1 = fl.decode_dual_rail(fl.encode_dual_rail(0.6, 0.8j))
    assert abs(a0) == pytest.approx(0.6)
    assert a1 / a0 == pytest.approx(0.8j / 0.6)


def test_graph_y_contraction():
    g = fl.measure_y(fl.GraphState.path(3), 1)
    assert g.edges() == [(0, 2)]
    assert json.loads(g.to_json())["format"] == "fiberloop.graph"


def test_fusion_type_one_prediction():
    g = fl.disjoint_union(fl.GraphState.path(2, 0), fl.GraphState.path(2, 2))
    (success, probability, _, state), predicted = fl.fusion(g, 1, 2, 1, [1, 0])
    assert success
    assert probability == pytest.approx(0.5)
    assert fl.fidelity(state, fl.graph_to_fock(predicted)) == pytest.approx(1, abs=1e-10)


def test_bonding_statistics():
    assert fl.required_branches(0.5, 0.75) == 2
    assert fl.required_branches(1 / 16, 0.99) == 72
    stats = fl.bonding_monte_carlo(0.5, 2, 4000, 5)
    sigma = math.sqrt(0.75 * 0.25 / 4000)
    assert abs(stats["rate"] - stats["analytic_rate"]) < 4 * sigma


def test_rng_determinism():
    a = fl.Rng(3).split(1)
    b = fl.Rng(3).split(1)
    assert [a.uniform() for _ in range(5)] == [b.uniform() for _ in range(5)]
