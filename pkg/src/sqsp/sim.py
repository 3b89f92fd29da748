"""Exact sparse-state simulation.

States are maps from basis keys to complex amplitudes; a key is an arbitrary-
width Python int whose bit ``p`` is the value of wire ``p``. Wire counts in
the hundreds are routine since only the support is stored.

X-type gates permute keys and are batch-executed through the tape kernel
(compiled when available); rotation gates split terms with exact 2x2
arithmetic in Python.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .circuit import Circuit, Gate, u_matrix
from .errors import NonPermutationGate, OperandOutOfRange
from .plan import SparseStateSpec

PRUNE_EPS = 1e-14


@dataclass
class SparseVector:
    """Sparse statevector: ``terms`` maps basis key -> amplitude."""

    width: int
    terms: dict[int, complex] = field(default_factory=dict)

    @classmethod
    def zero_state(cls, width: int) -> "SparseVector":
        return cls(width, {0: 1.0 + 0.0j})

    @classmethod
    def basis_state(cls, width: int, key: int) -> "SparseVector":
        return cls(width, {key: 1.0 + 0.0j})

    def norm_sq(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def support(self) -> list[int]:
        return sorted(self.terms)

    def bitstring(self, key: int) -> str:
        return "".join("1" if (key >> p) & 1 else "0" for p in range(self.width))

    def copy(self) -> "SparseVector":
        return SparseVector(self.width, dict(self.terms))


def bits_to_key(bits: str) -> int:
    """Wire ``p`` of the key is character ``p`` of the string."""
    key = 0
    for p, ch in enumerate(bits):
        if ch == "1":
            key |= 1 << p
    return key


def _check_operands(gate: Gate, width: int) -> None:
    for q in gate.qubits:
        if q >= width:
            raise OperandOutOfRange(f"wire {q} out of range for width {width}")


def _apply_1q(terms: dict, q: int, matrix) -> dict:
    (m00, m01), (m10, m11) = matrix
    out: dict[int, complex] = {}
    mask = 1 << q
    for key, amp in terms.items():
        if key & mask:
            a0, a1 = m01 * amp, m11 * amp
        else:
            a0, a1 = m00 * amp, m10 * amp
        if a0 != 0:
            k = key & ~mask
            out[k] = out.get(k, 0) + a0
        if a1 != 0:
            k = key | mask
            out[k] = out.get(k, 0) + a1
    return out


def apply_gate(state: SparseVector, gate: Gate) -> SparseVector:
    """Apply one gate, returning a new state (support at most doubled)."""
    _check_operands(gate, state.width)
    k = gate.kind
    if k in ("x", "cx", "ccx", "mcx"):
        target_mask = 1 << gate.qubits[-1]
        control_mask = 0
        for q in gate.qubits[:-1]:
            control_mask |= 1 << q
        out = {}
        for key, amp in state.terms.items():
            if key & control_mask == control_mask:
                key ^= target_mask
            out[key] = amp
        return SparseVector(state.width, out)
    if k == "ry":
        th = gate.params[0] / 2.0
        mat = ((math.cos(th), -math.sin(th)), (math.sin(th), math.cos(th)))
        out = _apply_1q(state.terms, gate.qubits[0], mat)
    elif k == "rz":
        th = gate.params[0] / 2.0
        mat = ((cmath.exp(-1j * th), 0), (0, cmath.exp(1j * th)))
        out = _apply_1q(state.terms, gate.qubits[0], mat)
    elif k == "p":
        mat = ((1, 0), (0, cmath.exp(1j * gate.params[0])))
        out = _apply_1q(state.terms, gate.qubits[0], mat)
    elif k == "u":
        out = _apply_1q(state.terms, gate.qubits[0], u_matrix(gate))
    elif k == "givens":
        out = _apply_givens(state.terms, gate)
    else:
        raise OperandOutOfRange(f"unknown gate kind {gate.kind}")
    out = {key: amp for key, amp in out.items() if abs(amp) > PRUNE_EPS}
    return SparseVector(state.width, out)


def _apply_givens(terms: dict, gate: Gate) -> dict:
    q1, q2 = gate.qubits
    theta, phi = gate.params
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    e_pos, e_neg = cmath.exp(1j * phi), cmath.exp(-1j * phi)
    m1, m2 = 1 << q1, 1 << q2
    out: dict[int, complex] = {}

    def add(key, amp):
        if amp != 0:
            out[key] = out.get(key, 0) + amp

    for key, amp in terms.items():
        b1, b2 = bool(key & m1), bool(key & m2)
        if b1 == b2:
            add(key, amp)
        elif b1:  # |10> -> c|10> + e^{i phi} s |01>
            add(key, c * amp)
            add((key & ~m1) | m2, e_pos * s * amp)
        else:  # |01> -> c|01> - e^{-i phi} s |10>
            add(key, c * amp)
            add((key & ~m2) | m1, -e_neg * s * amp)
    return out


# -- tape compilation for X-type spans ---


def compile_xtape(gates) -> tuple[np.ndarray, np.ndarray]:
    """Flatten X-type gates into (offsets, wires) arrays for the kernel."""
    offsets = np.empty(len(gates) + 1, dtype=np.int32)
    offsets[0] = 0
    flat: list[int] = []
    for i, g in enumerate(gates):
        if not g.is_xtype:
            raise NonPermutationGate(f"{g.kind} is not an X-type gate")
        flat.extend(g.qubits)
        offsets[i + 1] = len(flat)
    return offsets, np.asarray(flat, dtype=np.int32)


def _keys_to_matrix(keys: list[int], width: int) -> np.ndarray:
    chunks = max(1, (width + 63) // 64)
    nbytes = chunks * 8
    buf = b"".join(key.to_bytes(nbytes, "little") for key in keys)
    return np.frombuffer(buf, dtype="<u8").reshape(len(keys), chunks).copy()


def _matrix_to_keys(mat: np.ndarray) -> list[int]:
    nbytes = mat.shape[1] * 8
    raw = mat.astype("<u8", copy=False).tobytes()
    return [
        int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little")
        for i in range(mat.shape[0])
    ]


def _run_tape(tape, keys: list[int], width: int) -> list[int]:
    offsets, wires = tape
    if len(offsets) == 1 or not keys:
        return keys
    mat = _keys_to_matrix(keys, width)
    _kernels.apply_xtype_tape(offsets, wires, mat)
    return _matrix_to_keys(mat)


def run(circuit: Circuit, initial: SparseVector | None = None) -> SparseVector:
    """Fold ``apply_gate`` over the circuit; X-type spans go through the kernel."""
    state = initial.copy() if initial is not None else SparseVector.zero_state(circuit.qubit_count)
    if circuit.qubit_count > state.width:
        raise OperandOutOfRange("circuit wider than state")
    span: list[Gate] = []

    def flush(st: SparseVector) -> SparseVector:
        if not span:
            return st
        tape = compile_xtape(span)
        span.clear()
        old_keys = list(st.terms.keys())
        new_keys = _run_tape(tape, old_keys, st.width)
        return SparseVector(
            st.width, {nk: st.terms[ok] for ok, nk in zip(old_keys, new_keys)}
        )

    for g in circuit.gates:
        if g.is_xtype:
            _check_operands(g, state.width)
            span.append(g)
        else:
            state = flush(state)
            state = apply_gate(state, g)
    return flush(state)


def run_reversible(circuit: Circuit, key: int) -> int:
    """Permute one basis key through an X-type-only circuit."""
    tape = compile_xtape(circuit.gates)
    for g in circuit.gates:
        _check_operands(g, circuit.qubit_count)
    return _run_tape(tape, [key], circuit.qubit_count)[0]


def run_reversible_many(circuit: Circuit, keys: list[int]) -> list[int]:
    tape = compile_xtape(circuit.gates)
    return _run_tape(tape, list(keys), circuit.qubit_count)


# -- verification report ---


@dataclass
class CompareReport:
    max_amp_error: float
    ancilla_clean: bool
    global_phase: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "max_amp_error": self.max_amp_error,
            "ancilla_clean": self.ancilla_clean,
            "global_phase": self.global_phase,
            "passed": self.passed,
        }


def compare(
    state: SparseVector,
    spec: SparseStateSpec,
    data_qubits,
    tol: float = 1e-9,
) -> CompareReport:
    """Match the state against the target on ``data_qubits``.

    Amplitudes are aligned by the phase of the largest-magnitude pair before
    comparison; ``ancilla_clean`` demands every support key is zero outside
    the data wires.
    """
    data_qubits = list(data_qubits)
    data_mask = 0
    for q in data_qubits:
        data_mask |= 1 << q

    ancilla_clean = all((key & ~data_mask) == 0 for key in state.terms)
    want = {bits_to_key(basis): amp for basis, amp in spec.terms}
    got: dict[int, complex] = {}
    for key, amp in state.terms.items():
        small = 0
        for pos, q in enumerate(data_qubits):
            if (key >> q) & 1:
                small |= 1 << pos
        got[small] = got.get(small, 0) + amp

    phase = 0.0
    if got:
        anchor = max(got, key=lambda k: abs(got[k]))
        if anchor in want and abs(got[anchor]) > PRUNE_EPS:
            phase = cmath.phase(got[anchor]) - cmath.phase(want[anchor])
    rot = cmath.exp(-1j * phase)

    err = 0.0
    for key in set(got) | set(want):
        err = max(err, abs(got.get(key, 0) * rot - want.get(key, 0)))
    return CompareReport(
        max_amp_error=err,
        ancilla_clean=ancilla_clean,
        global_phase=phase,
        passed=bool(err <= tol and ancilla_clean),
    )
