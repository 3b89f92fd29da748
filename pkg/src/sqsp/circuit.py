"""Gate-level circuit representation.

A gate is a frozen record of a kind, its operand wires, and real parameters.
A circuit is an ordered gate sequence over a fixed wire count, with optional
per-gate provenance labels. Depth is defined by ASAP layering: each gate goes
into the earliest layer after the last layer touching any of its operands.

Supported kinds:
    x                   NOT
    cx                  controlled NOT (control, target)
    ccx                 Toffoli (c1, c2, target)
    mcx                 multi-controlled NOT (controls..., target); macro
    ry, rz, p           single-qubit rotations / phase, params=(theta,)
    u                   arbitrary single-qubit unitary, params = 8 reals
                        (row-major re/im pairs of the 2x2 matrix)
    givens              two-qubit rotation in span{|01>,|10>}, identity on
                        span{|00>,|11>}; params=(theta, phi); macro

``decompose`` rewrites everything to {single-qubit, cx}.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace

from .errors import (
    DuplicateOperand,
    NotUnitary,
    OperandOutOfRange,
    QasmParseError,
    ScratchUnavailable,
    UnsupportedGate,
)

XTYPE_KINDS = frozenset(("x", "cx", "ccx", "mcx"))
ELEMENTARY_KINDS = frozenset(("x", "cx", "ry", "rz", "p", "u"))
MACRO_KINDS = frozenset(("ccx", "mcx", "givens"))


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    @property
    def is_xtype(self) -> bool:
        return self.kind in XTYPE_KINDS

    @property
    def is_elementary(self) -> bool:
        return self.kind in ELEMENTARY_KINDS


def _check_operands(qubits: tuple[int, ...]) -> None:
    if len(set(qubits)) != len(qubits):
        raise DuplicateOperand(f"operands must be distinct, got {qubits}")
    if any(q < 0 for q in qubits):
        raise OperandOutOfRange(f"negative wire index in {qubits}")


def x(q: int) -> Gate:
    _check_operands((q,))
    return Gate("x", (q,))


def cx(control: int, target: int) -> Gate:
    _check_operands((control, target))
    return Gate("cx", (control, target))


def ccx(c1: int, c2: int, target: int) -> Gate:
    _check_operands((c1, c2, target))
    return Gate("ccx", (c1, c2, target))


def mcx(controls, target: int) -> Gate:
    ops = (*controls, target)
    if len(ops) < 2:
        raise OperandOutOfRange("mcx needs at least one control")
    _check_operands(ops)
    return Gate("mcx", ops)


def ry(q: int, theta: float) -> Gate:
    return Gate("ry", (q,), (float(theta),))


def rz(q: int, theta: float) -> Gate:
    return Gate("rz", (q,), (float(theta),))


def phase(q: int, theta: float) -> Gate:
    return Gate("p", (q,), (float(theta),))


def u1q(q: int, matrix) -> Gate:
    """Arbitrary single-qubit unitary from a 2x2 complex matrix."""
    (a, b), (c, d) = matrix
    a, b, c, d = complex(a), complex(b), complex(c), complex(d)
    # unitarity: columns orthonormal
    n0 = abs(a) ** 2 + abs(c) ** 2
    n1 = abs(b) ** 2 + abs(d) ** 2
    dot = a.conjugate() * b + c.conjugate() * d
    if abs(n0 - 1.0) > 1e-12 or abs(n1 - 1.0) > 1e-12 or abs(dot) > 1e-12:
        raise NotUnitary(f"matrix is not unitary to 1e-12: {matrix}")
    params = (a.real, a.imag, b.real, b.imag, c.real, c.imag, d.real, d.imag)
    return Gate("u", (q,), params)


def givens(q1: int, q2: int, theta: float, phi: float = 0.0) -> Gate:
    _check_operands((q1, q2))
    return Gate("givens", (q1, q2), (float(theta), float(phi)))


def u_matrix(gate: Gate):
    """2x2 complex matrix of a ``u`` gate."""
    p = gate.params
    return (
        (complex(p[0], p[1]), complex(p[2], p[3])),
        (complex(p[4], p[5]), complex(p[6], p[7])),
    )


class Circuit:
    """Ordered gate sequence over ``qubit_count`` wires.

    Treated as immutable by consumers once built; ``append`` is for the
    single owner constructing it.
    """

    __slots__ = ("qubit_count", "gates", "labels")

    def __init__(self, qubit_count: int, gates=(), labels=None):
        if qubit_count < 0:
            raise OperandOutOfRange("qubit_count must be >= 0")
        self.qubit_count = qubit_count
        self.gates: list[Gate] = []
        self.labels: dict[int, str] = {}
        for g in gates:
            self.append(g)
        if labels:
            self.labels.update(labels)

    def append(self, gate: Gate, label: str | None = None) -> "Circuit":
        _check_operands(gate.qubits)
        for q in gate.qubits:
            if q >= self.qubit_count:
                raise OperandOutOfRange(
                    f"wire {q} out of range for {self.qubit_count}-qubit circuit"
                )
        if label is not None:
            self.labels[len(self.gates)] = label
        self.gates.append(gate)
        return self

    def extend(self, gates, label: str | None = None) -> "Circuit":
        """Append gates in order; ``label`` (if any) tags every one of them."""
        for g in gates:
            self.append(g, label)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Circuit)
            and self.qubit_count == other.qubit_count
            and self.gates == other.gates
        )

    def depth(self) -> int:
        return fragment_depth(self.gates)

    def inverse(self) -> "Circuit":
        inv = Circuit(self.qubit_count)
        n = len(self.gates)
        for i, g in enumerate(reversed(self.gates)):
            label = self.labels.get(n - 1 - i)
            inv.append(invert_gate(g), label)
        return inv

    def label_spans(self) -> list[tuple[int, str]]:
        """Sorted (start_index, label) pairs."""
        return sorted(self.labels.items())

    # -- serialization ---

    def to_json(self) -> str:
        gates = [
            {"kind": g.kind, "operands": list(g.qubits), "params": list(g.params)}
            for g in self.gates
        ]
        doc = {"qubits": self.qubit_count, "gates": gates}
        if self.labels:
            doc["labels"] = {str(i): lab for i, lab in sorted(self.labels.items())}
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        doc = json.loads(text)
        circ = cls(doc["qubits"])
        for entry in doc["gates"]:
            circ.append(
                Gate(entry["kind"], tuple(entry["operands"]), tuple(entry["params"]))
            )
        for i, lab in doc.get("labels", {}).items():
            circ.labels[int(i)] = lab
        return circ


@dataclass
class Metrics:
    """Resource record: elementary counts are over {single-qubit, cx}."""

    size_elementary: int
    depth_elementary: int
    depth_logical: int
    qubits_total: int
    ancilla_used: int
    gate_counts: dict = field(default_factory=dict)
    stages: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "size_elementary": self.size_elementary,
            "depth_elementary": self.depth_elementary,
            "depth_logical": self.depth_logical,
            "qubits_total": self.qubits_total,
            "ancilla_used": self.ancilla_used,
            "gate_counts": dict(sorted(self.gate_counts.items())),
            "stages": {k: dict(v) for k, v in sorted(self.stages.items())},
        }


def fragment_depth(gates) -> int:
    """ASAP layer count of a gate sequence."""
    last: dict[int, int] = {}
    depth = 0
    for g in gates:
        layer = 1 + max((last.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            last[q] = layer
        if layer > depth:
            depth = layer
    return depth


def invert_gate(g: Gate) -> Gate:
    if g.kind in XTYPE_KINDS:
        return g
    if g.kind in ("ry", "rz", "p"):
        return Gate(g.kind, g.qubits, (-g.params[0],))
    if g.kind == "givens":
        return Gate(g.kind, g.qubits, (-g.params[0], g.params[1]))
    if g.kind == "u":
        p = g.params
        # conjugate transpose
        return Gate(
            "u", g.qubits, (p[0], -p[1], p[4], -p[5], p[2], -p[3], p[6], -p[7])
        )
    raise UnsupportedGate(g.kind)


# -- decomposition to {single-qubit, cx} ---

_QUARTER = math.pi / 4
_SQRT2_INV = 1.0 / math.sqrt(2.0)
_H_MATRIX = ((_SQRT2_INV, _SQRT2_INV), (_SQRT2_INV, -_SQRT2_INV))


def toffoli_network(c1: int, c2: int, target: int) -> list[Gate]:
    """Standard 6-CNOT Toffoli network (exact, no global phase)."""
    h = lambda q: u1q(q, _H_MATRIX)
    t = lambda q: phase(q, _QUARTER)
    tdg = lambda q: phase(q, -_QUARTER)
    return [
        h(target),
        cx(c2, target),
        tdg(target),
        cx(c1, target),
        t(target),
        cx(c2, target),
        tdg(target),
        cx(c1, target),
        t(c2),
        t(target),
        h(target),
        cx(c1, c2),
        t(c1),
        tdg(c2),
        cx(c1, c2),
    ]


def _mat2(a, b, c, d):
    return ((complex(a), complex(b)), (complex(c), complex(d)))


def _mul2(m, n):
    return (
        (
            m[0][0] * n[0][0] + m[0][1] * n[1][0],
            m[0][0] * n[0][1] + m[0][1] * n[1][1],
        ),
        (
            m[1][0] * n[0][0] + m[1][1] * n[1][0],
            m[1][0] * n[0][1] + m[1][1] * n[1][1],
        ),
    )


def _rz_mat(t):
    import cmath

    return _mat2(cmath.exp(-0.5j * t), 0, 0, cmath.exp(0.5j * t))


_SX_MAT = _mat2(0.5 + 0.5j, 0.5 - 0.5j, 0.5 - 0.5j, 0.5 + 0.5j)
_SXDG_MAT = _mat2(0.5 - 0.5j, 0.5 + 0.5j, 0.5 + 0.5j, 0.5 - 0.5j)
_S_MAT = _mat2(1, 0, 0, 1j)
_SDG_MAT = _mat2(1, 0, 0, -1j)
_HALF_PI = math.pi / 2
# constant outer rotations on the first wire of the givens network
_GIVENS_PRE1 = _mul2(_rz_mat(_HALF_PI), _mul2(_SX_MAT, _rz_mat(-_HALF_PI)))
_GIVENS_POST1 = _mul2(_rz_mat(_HALF_PI), _mul2(_SXDG_MAT, _rz_mat(-_HALF_PI)))


def givens_network(q1: int, q2: int, theta: float, phi: float) -> list[Gate]:
    """Exact 2-CNOT network for the givens gate (no residual global phase).

    An XX+YY-interaction sandwich: fixed basis changes on both wires, two
    CNOTs around a pair of RY(theta/2) rotations, and phi folded into the
    second wire's outer rotations.
    """
    beta = phi - _HALF_PI
    pre2 = _mul2(_S_MAT, _rz_mat(-beta))
    post2 = _mul2(_rz_mat(beta), _SDG_MAT)
    return [
        u1q(q1, _GIVENS_PRE1),
        u1q(q2, pre2),
        cx(q1, q2),
        ry(q1, theta / 2.0),
        ry(q2, theta / 2.0),
        cx(q1, q2),
        u1q(q1, _GIVENS_POST1),
        u1q(q2, post2),
    ]


def decompose(
    circuit: Circuit,
    mcx_strategy: str = "tree",
    mcx_scratch=None,
    allow_macros: bool = False,
) -> Circuit:
    """Rewrite to elementary gates {x, ry, rz, p, u, cx}.

    ``mcx`` macros with three or more controls need clean scratch wires
    (caller guarantees |0> at each mcx site); pass them via ``mcx_scratch``.
    """
    from .primitives import mcx_network

    out = Circuit(circuit.qubit_count)
    for i, g in enumerate(circuit.gates):
        label = circuit.labels.get(i)
        if g.is_elementary:
            out.append(g, label)
            continue
        if g.kind == "ccx":
            out.extend(toffoli_network(*g.qubits), label)
        elif g.kind == "givens":
            out.extend(givens_network(*g.qubits, *g.params), label)
        elif g.kind == "mcx":
            controls, target = g.qubits[:-1], g.qubits[-1]
            if len(controls) == 1:
                out.append(cx(controls[0], target), label)
                continue
            if len(controls) == 2:
                out.extend(toffoli_network(*controls, target), label)
                continue
            scratch = [q for q in (mcx_scratch or []) if q not in g.qubits]
            toffolis = mcx_network(controls, target, scratch, mcx_strategy)
            for tg in toffolis:
                if tg.kind == "ccx":
                    out.extend(toffoli_network(*tg.qubits), label)
                else:
                    out.append(tg, label)
        else:
            raise UnsupportedGate(g.kind)
    return out


# -- text format ---
#
# Header line `qubits N`, then one gate per line. `//` comments carry labels.

def _fmt(value: float) -> str:
    return format(value, ".17g")


def emit_qasm(circuit: Circuit, allow_macros: bool = False) -> str:
    lines = [f"qubits {circuit.qubit_count}"]
    last_label = None
    for i, g in enumerate(circuit.gates):
        label = circuit.labels.get(i)
        if label is not None and label != last_label:
            lines.append(f"// {label}")
            last_label = label
        if not (g.is_elementary or allow_macros):
            raise UnsupportedGate(
                f"{g.kind} is not elementary; decompose first or set allow_macros"
            )
        ops = ", ".join(f"q[{q}]" for q in g.qubits)
        if g.params:
            args = ",".join(_fmt(p) for p in g.params)
            lines.append(f"{g.kind}({args}) {ops};")
        else:
            lines.append(f"{g.kind} {ops};")
    return "\n".join(lines) + "\n"


_GATE_RE = re.compile(
    r"^(?P<kind>[a-z]+)(?:\((?P<args>[^)]*)\))?\s+(?P<ops>q\[\d+\](?:\s*,\s*q\[\d+\])*)\s*;$"
)
_ARITY = {"x": 1, "ry": 1, "rz": 1, "p": 1, "u": 1, "cx": 2, "ccx": 3, "givens": 2}
_NPARAMS = {"x": 0, "ry": 1, "rz": 1, "p": 1, "u": 8, "cx": 0, "ccx": 0, "givens": 2, "mcx": 0}


def parse_qasm(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("//")]
    if not lines or not lines[0].startswith("qubits "):
        raise QasmParseError("missing 'qubits N' header")
    try:
        width = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise QasmParseError("bad header") from exc
    circ = Circuit(width)
    for ln in lines[1:]:
        m = _GATE_RE.match(ln)
        if not m:
            raise QasmParseError(f"cannot parse line: {ln!r}")
        kind = m.group("kind")
        if kind not in _NPARAMS:
            raise QasmParseError(f"unknown gate {kind!r}")
        qubits = tuple(int(s) for s in re.findall(r"q\[(\d+)\]", m.group("ops")))
        args = m.group("args")
        params = tuple(float(v) for v in args.split(",")) if args else ()
        if len(params) != _NPARAMS[kind]:
            raise QasmParseError(f"{kind} expects {_NPARAMS[kind]} params: {ln!r}")
        if kind != "mcx" and len(qubits) != _ARITY[kind]:
            raise QasmParseError(f"{kind} expects {_ARITY[kind]} operands: {ln!r}")
        circ.append(Gate(kind, qubits, params))
    return circ
