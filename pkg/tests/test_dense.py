"""Dense amplitude loading against the simulator oracle."""
import cmath
import math

import numpy as np
import pytest

from sqsp.circuit import Circuit, decompose, givens, givens_network
from sqsp.errors import NotNormalized
from sqsp.dense import prepare_dense, split_angles
from sqsp.primitives import ScratchPool
from sqsp.sim import SparseVector, apply_gate, run

from conftest import pack


def _simulate_amps(gates, wires, width):
    """Read the amplitude vector off the dense register (MSB-first wires)."""
    state = run(Circuit(width, gates))
    s = len(wires)
    out = np.zeros(1 << s, dtype=complex)
    for key, amp in state.terms.items():
        value = 0
        for pos, w in enumerate(wires):
            if (key >> w) & 1:
                value |= 1 << (s - 1 - pos)
        rest = key
        for w in wires:
            rest &= ~(1 << w)
        assert rest == 0, "scratch not restored"
        out[value] += amp
    return out


class TestSplitAngles:
    def test_all_left_mass(self):
        assert split_angles([1, 0]).thetas[0][0] == 0.0

    def test_all_right_mass(self):
        assert split_angles([0, 1]).thetas[0][0] == pytest.approx(math.pi)

    def test_uniform_four(self):
        tree = split_angles([0.5, 0.5, 0.5, 0.5])
        for level in tree.thetas:
            for theta in level:
                assert theta == pytest.approx(math.pi / 2)
        assert tree.phis == (0.0,) * 4

    def test_rejects_unnormalized(self):
        with pytest.raises(NotNormalized):
            split_angles([1.0, 1.0])


class TestGivensNetwork:
    @pytest.mark.parametrize("theta,phi", [(0.7, 0.0), (1.3, 0.9), (math.pi, -1.1), (0.2, math.pi)])
    def test_matches_gate_semantics(self, theta, phi):
        net = givens_network(0, 1, theta, phi)
        assert sum(g.kind == "cx" for g in net) == 2
        for key in range(4):
            direct = apply_gate(SparseVector(2, {key: 1.0}), givens(0, 1, theta, phi))
            viaNet = run(Circuit(2, net), SparseVector.basis_state(2, key))
            for k in set(direct.terms) | set(viaNet.terms):
                assert abs(direct.terms.get(k, 0) - viaNet.terms.get(k, 0)) < 1e-12


class TestPrepareDense:
    def test_single_amplitude_empty(self):
        assert prepare_dense([1.0], [], "multiplexed", ScratchPool()) == []

    def test_hadamard_like(self):
        amps = [1 / math.sqrt(2)] * 2
        gates = prepare_dense(amps, [0], "multiplexed", ScratchPool(start=1))
        assert len(gates) == 1 and gates[0].kind == "ry"
        got = _simulate_amps(gates, [0], 1)
        assert np.allclose(got, amps, atol=1e-12)

    @pytest.mark.parametrize("strategy", ["multiplexed", "onehot"])
    @pytest.mark.parametrize("d", [2, 3, 4, 7, 8, 13, 16, 33, 64])
    def test_random_amps_exact(self, strategy, d):
        rng = np.random.default_rng(d)
        for trial in range(4):
            amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            amps /= np.linalg.norm(amps)
            s = max(1, math.ceil(math.log2(d)))
            pool = ScratchPool(start=s)
            gates = prepare_dense(list(amps), list(range(s)), strategy, pool)
            width = s + pool.allocated
            got = _simulate_amps(gates, list(range(s)), width)
            want = np.zeros(1 << s, dtype=complex)
            want[:d] = amps
            # compare up to global phase
            anchor = np.argmax(np.abs(want))
            got = got * np.exp(-1j * (np.angle(got[anchor]) - np.angle(want[anchor])))
            assert np.max(np.abs(got - want)) < 1e-10, (strategy, d, trial)

    def test_onehot_intermediate_is_one_hot(self):
        rng = np.random.default_rng(3)
        d = 8
        amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        amps /= np.linalg.norm(amps)
        pool = ScratchPool(start=3)
        gates = prepare_dense(list(amps), [0, 1, 2], "onehot", pool)
        # the rotation tree is the leading x/givens/p span; the converter
        # that follows opens with fold CNOTs
        prefix = []
        for g in gates:
            if g.kind not in ("x", "givens", "p"):
                break
            prefix.append(g)
        width = 3 + pool.allocated
        state = run(Circuit(width, prefix))
        for key in state.terms:
            ones = bin(key >> 3).count("1")
            assert ones == 1, "intermediate support must be one-hot"

    def test_random_phases_aligned(self):
        rng = np.random.default_rng(9)
        d = 16
        mags = rng.random(d) + 0.1
        phases = rng.uniform(-math.pi, math.pi, d)
        amps = mags * np.exp(1j * phases)
        amps /= np.linalg.norm(amps)
        pool = ScratchPool(start=4)
        gates = prepare_dense(list(amps), [0, 1, 2, 3], "multiplexed", pool)
        got = _simulate_amps(gates, [0, 1, 2, 3], 4)
        anchor = np.argmax(np.abs(amps))
        got = got * np.exp(-1j * (np.angle(got[anchor]) - np.angle(amps[anchor])))
        assert np.max(np.abs(got - amps)) < 1e-10

    def test_elementary_decomposition_preserved(self):
        rng = np.random.default_rng(17)
        d = 8
        amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        amps /= np.linalg.norm(amps)
        pool = ScratchPool(start=3)
        gates = prepare_dense(list(amps), [0, 1, 2], "onehot", pool)
        width = 3 + pool.allocated
        dec = decompose(Circuit(width, gates))
        got = _simulate_amps(dec.gates, [0, 1, 2], width)
        want = np.array(amps)
        anchor = np.argmax(np.abs(want))
        got = got * np.exp(-1j * (np.angle(got[anchor]) - np.angle(want[anchor])))
        assert np.max(np.abs(got - want)) < 1e-10
