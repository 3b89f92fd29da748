"""Dense amplitude loading on ceil(log2 d) wires.

Two self-contained strategies:

* ``multiplexed`` — uniformly-controlled RY cascade plus a diagonal phase
  cascade; no scratch, size O(d), depth O(d).
* ``onehot`` — rotate amplitudes into a one-hot register with a binary tree
  of two-qubit ``givens`` splits (depth O(log d)), phase the leaves, then
  compact to binary with the unary-to-binary converter; O(d) scratch.

Both are exact; zero-amplitude subtrees emit no gates.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .circuit import Gate, cx, givens, phase, ry, rz, x
from .errors import NotNormalized
from .primitives import ScratchPool, unary_to_binary

_EPS = 1e-15


@dataclass(frozen=True)
class AngleTree:
    """Mass-splitting angles: ``thetas[t][p]`` for node p at level t; leaf phases."""

    thetas: tuple[tuple[float, ...], ...]
    phis: tuple[float, ...]


def _check_amps(amps) -> list[complex]:
    amps = [complex(a) for a in amps]
    if not amps:
        raise NotNormalized("empty amplitude vector")
    norm = math.fsum(abs(a) ** 2 for a in amps)
    if abs(norm - 1.0) > 1e-10:
        raise NotNormalized(f"|amps|^2 sums to {norm!r}")
    return amps


def split_angles(amps) -> AngleTree:
    """Probability-splitting tree over the (zero-padded) amplitude vector."""
    amps = _check_amps(amps)
    s = max(1, math.ceil(math.log2(len(amps)))) if len(amps) > 1 else 0
    width = 1 << s
    masses = [abs(a) ** 2 for a in amps] + [0.0] * (width - len(amps))
    levels = [masses]
    while len(levels[0]) > 1:
        prev = levels[0]
        levels.insert(0, [prev[2 * i] + prev[2 * i + 1] for i in range(len(prev) // 2)])
    thetas = []
    for t in range(s):
        row = []
        nxt = levels[t + 1]
        for p in range(1 << t):
            left, right = nxt[2 * p], nxt[2 * p + 1]
            row.append(2.0 * math.atan2(math.sqrt(right), math.sqrt(left)))
        thetas.append(tuple(row))
    phis = tuple(cmath.phase(a) if abs(a) > _EPS else 0.0 for a in amps) + (0.0,) * (
        width - len(amps)
    )
    return AngleTree(tuple(thetas), phis)


# -- multiplexed strategy ---


def _ucr(kind: str, controls, target: int, angles) -> list[Gate]:
    """Uniformly controlled RY/RZ; angles indexed by MSB-first control value."""
    rot = ry if kind == "ry" else rz
    if max((abs(a) for a in angles), default=0.0) < _EPS:
        return []
    if not controls:
        return [rot(target, angles[0])]
    plus = [(angles[2 * i] + angles[2 * i + 1]) / 2.0 for i in range(len(angles) // 2)]
    minus = [(angles[2 * i] - angles[2 * i + 1]) / 2.0 for i in range(len(angles) // 2)]
    head = _ucr(kind, controls[:-1], target, plus)
    if max(abs(a) for a in minus) < _EPS:
        return head
    tail = _ucr(kind, controls[:-1], target, minus)
    last = controls[-1]
    return head + [cx(last, target)] + tail + [cx(last, target)]


def _global_phase(anchor: int, psi: float) -> list[Gate]:
    # X P(psi) X P(psi) = e^{i psi} I
    return [x(anchor), phase(anchor, psi), x(anchor), phase(anchor, psi)]


def _diagonal_phases(wires, phis, anchor: int) -> list[Gate]:
    if max((abs(p) for p in phis), default=0.0) < _EPS:
        return []
    if not wires:
        return _global_phase(anchor, phis[0])
    deltas = [phis[2 * i + 1] - phis[2 * i] for i in range(len(phis) // 2)]
    means = [(phis[2 * i + 1] + phis[2 * i]) / 2.0 for i in range(len(phis) // 2)]
    gates = _ucr("rz", list(wires[:-1]), wires[-1], deltas)
    return gates + _diagonal_phases(wires[:-1], means, anchor)


# -- one-hot tree strategy ---


def _onehot_tree(amps, tree: AngleTree, block) -> list[Gate]:
    s = len(tree.thetas)
    gates = [x(block[0])]
    # node (t, p) is represented by wire p * 2^(s-t)
    masses: list[list[float]] = []
    width = 1 << s
    leaf_mass = [abs(a) ** 2 for a in amps] + [0.0] * (width - len(amps))
    levels = [leaf_mass]
    while len(levels[0]) > 1:
        prev = levels[0]
        levels.insert(0, [prev[2 * i] + prev[2 * i + 1] for i in range(len(prev) // 2)])
    for t in range(s):
        step = 1 << (s - t)
        for p in range(1 << t):
            if levels[t][p] < _EPS:
                continue
            right = levels[t + 1][2 * p + 1]
            if right < _EPS:
                continue
            theta = tree.thetas[t][p]
            gates.append(givens(block[p * step], block[p * step + step // 2], theta))
    for i, phi in enumerate(tree.phis):
        if abs(phi) > _EPS and leaf_mass[i] > _EPS:
            gates.append(phase(block[i], phi))
    return gates


def prepare_dense(amps, wires, strategy: str, pool: ScratchPool) -> list[Gate]:
    """|0...0> -> sum_i amps[i] |i> on ``wires`` (MSB-first)."""
    amps = _check_amps(amps)
    if len(amps) == 1:
        return []
    tree = split_angles(amps)
    s = len(tree.thetas)
    wires = list(wires)
    if len(wires) != s:
        raise NotNormalized(f"need {s} wires for {len(amps)} amplitudes, got {len(wires)}")
    if strategy == "multiplexed":
        gates: list[Gate] = []
        for t in range(s):
            gates += _ucr("ry", wires[:t], wires[t], list(tree.thetas[t]))
        gates += _diagonal_phases(wires, list(tree.phis), wires[0])
        return gates
    if strategy == "onehot":
        block = pool.lease(1 << s)
        gates = _onehot_tree(amps, tree, block)
        gates += unary_to_binary(block, wires, pool)
        pool.release(block)
        return gates
    raise ValueError(f"unknown dense strategy {strategy!r}")
