"""End-to-end sparse state synthesis.

Pipeline: load the d amplitudes densely on the index register, expand each
index into the block-unary encoding of its target bitstring (subset by
subset), then compact every block to binary in parallel onto the data
register. Everything after the dense stage is X-type, so the circuit acts
as a permutation on basis states from there on.

Wire layout (fixed, deterministic): data | index | unary | tag | selector |
blocks | pool scratch. Basis strings are padded with leading zeros when the
block arity does not divide n; padding wires must end in |0> like every
other ancilla.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .circuit import (
    Circuit,
    Gate,
    Metrics,
    ccx,
    cx,
    decompose,
    fragment_depth,
    invert_gate,
    phase,
    u1q,
    x,
)
from .dense import prepare_dense
from .errors import SqspError, TooManyTargets
from .plan import SparseStateSpec, SynthesisPlan, select_parameters, validate_spec
from .primitives import ScratchPool, fanout, fanout_xor, mcx, parity_fanin, unary_to_binary


def index_to_onehot(plan: SynthesisPlan, pool: ScratchPool) -> list[Gate]:
    """Move the low ell_k index bits into the one-hot ``unary`` register.

    |j>|i>|0^k> -> |j>|0^ell_k>|e_i> for every prefix j and value i; built
    as the inverse of the unary-to-binary converter. Degenerates to one X
    when k = 1.
    """
    unary = plan.layout["unary"].wires
    if plan.k == 1:
        return [x(unary[0])]
    low = plan.layout["index"].wires[plan.ell_n - plan.ell_k :]
    frag = unary_to_binary(unary, low, pool)
    return [invert_gate(g) for g in reversed(frag)]


def collapse_prefix(plan: SynthesisPlan, j: int, pool: ScratchPool) -> list[Gate]:
    """Clear the index register of subset ``j`` and stage its one-hot marker.

    For terms whose prefix equals ``j``: the prefix is erased and the unary
    marker moves into the ``selector`` register (tag register mediates and
    returns to |0>). Every other basis state is a fixed point.
    """
    index = plan.layout["index"].wires
    unary = plan.layout["unary"].wires
    tag = plan.layout["tag"].wires
    selector = plan.layout["selector"].wires
    k = plan.k
    w = plan.ell_n - plan.ell_k
    prefix = index[:w]
    jbits = format(j, f"0{w}b") if w else ""

    gates: list[Gate] = []
    if w == 0:
        gates.append(x(tag[0]))
    else:
        conjugate = [x(prefix[b]) for b in range(w) if jbits[b] == "0"]
        gates += conjugate
        gates += mcx(prefix, tag[0], pool, plan.mcx_strategy)
        gates += conjugate
    spread: list[Gate] = []
    if k > 1:
        spread = fanout(tag[0], tag[1:])
        gates += spread
    ones = [prefix[b] for b in range(w) if jbits[b] == "1"]
    if ones:
        gates += fanout_xor(tag[0], ones)
    gates += [ccx(unary[l], tag[l], selector[l]) for l in range(k)]
    gates += [cx(selector[l], unary[l]) for l in range(k)]
    if spread:
        gates += [invert_gate(g) for g in reversed(spread)]
    gates += parity_fanin(selector, tag[0])
    return gates


def scatter_blocks(plan: SynthesisPlan, patterns, j: int, pool: ScratchPool) -> list[Gate]:
    """Write each staged term's block-unary pattern and clear its selector bit.

    ``patterns`` are the padded n'-bit target strings of subset ``j`` in
    term order. Selector wire i fans CNOTs into every block (one-hot
    position = the i-th pattern's r-bit slice), then a multi-controlled X
    per pattern — controls spread over per-block copies so all run in
    parallel — clears selector wire i. All-zero inputs are fixed points,
    and block patterns outside ``patterns`` are untouched.
    """
    k, r, nblocks = plan.k, plan.r, plan.nblocks
    patterns = list(patterns)
    if len(patterns) > k:
        raise TooManyTargets(f"{len(patterns)} patterns exceed k={k}")
    ell = len(patterns)
    selector = plan.layout["selector"].wires
    block_wires = [plan.block_register(b).wires for b in range(nblocks)]
    vals = [
        [int(pat[b * r : (b + 1) * r], 2) for b in range(nblocks)] for pat in patterns
    ]
    gates: list[Gate] = []

    # selector copies so every block has private parity controls
    copy_lease = pool.lease(ell * (nblocks - 1))
    copy_of = [[0] * nblocks for _ in range(ell)]
    spreads: list[list[Gate]] = []
    for i in range(ell):
        copy_of[i][0] = selector[i]
        row = copy_lease[i * (nblocks - 1) : (i + 1) * (nblocks - 1)]
        for b in range(1, nblocks):
            copy_of[i][b] = row[b - 1]
        if row:
            frag = fanout(selector[i], row)
            spreads.append(frag)
            gates += frag
    for b in range(nblocks):
        by_value: dict[int, list[int]] = {}
        for i in range(ell):
            by_value.setdefault(vals[i][b], []).append(copy_of[i][b])
        for value in sorted(by_value):
            gates += parity_fanin(by_value[value], block_wires[b][value])
    for frag in reversed(spreads):
        gates += [invert_gate(g) for g in reversed(frag)]
    pool.release(copy_lease)

    # per-pattern multi-controlled clear of the selector, on block copies
    first_use: dict[tuple[int, int], int] = {}
    extra: list[tuple[int, int, int]] = []  # (block, value, copy wire) per later use
    controls = [[0] * nblocks for _ in range(ell)]
    need = sum(
        1
        for i in range(ell)
        for b in range(nblocks)
        if (b, vals[i][b]) in first_use or first_use.setdefault((b, vals[i][b]), i) != i
    )
    dup_lease = pool.lease(need)
    cursor = 0
    dup_sources: dict[tuple[int, int], list[int]] = {}
    for i in range(ell):
        for b in range(nblocks):
            key = (b, vals[i][b])
            if first_use[key] == i:
                controls[i][b] = block_wires[b][vals[i][b]]
            else:
                wire = dup_lease[cursor]
                cursor += 1
                controls[i][b] = wire
                dup_sources.setdefault(key, []).append(wire)
    dup_frags = []
    for key in sorted(dup_sources):
        b, value = key
        frag = fanout(block_wires[b][value], dup_sources[key])
        dup_frags.append(frag)
        gates += frag
    with pool.parallel():
        for i in range(ell):
            gates += mcx(controls[i], selector[i], pool, plan.mcx_strategy)
    for frag in reversed(dup_frags):
        gates += [invert_gate(g) for g in reversed(frag)]
    pool.release(dup_lease)
    return gates


def phase2(plan: SynthesisPlan, pool: ScratchPool) -> list[tuple[str, list[Gate]]]:
    """Compact every block to its r binary bits on the data register, in parallel."""
    spans = []
    data = plan.layout["data"].wires
    subs = []
    for b in range(plan.nblocks):
        sub = pool.subpool()
        block = plan.block_register(b).wires
        out = data[b * plan.r : (b + 1) * plan.r]
        spans.append((f"phase2/block{b}", unary_to_binary(block, out, sub)))
        subs.append(sub)
    for sub in subs:
        sub.close()
    return spans


def phase1(plan: SynthesisPlan, spec: SparseStateSpec, pool: ScratchPool):
    """Index register -> block-unary encoding, subset by subset."""
    pad = plan.n_pad - plan.n
    padded = ["0" * pad + basis for basis, _ in spec.terms]
    spans = [("phase1/unary_index", index_to_onehot(plan, pool))]
    for j, (start, stop) in enumerate(plan.subsets):
        spans.append((f"phase1/j{j}/collapse", collapse_prefix(plan, j, pool)))
        spans.append(
            (f"phase1/j{j}/scatter", scatter_blocks(plan, padded[start:stop], j, pool))
        )
    return spans


# -- degenerate paths ---


def _place_single(spec: SparseStateSpec) -> list[tuple[str, list[Gate]]]:
    basis, amp = spec.terms[0]
    dense: list[Gate] = []
    phi = cmath.phase(amp)
    if abs(phi) > 1e-15:
        dense = [x(0), phase(0, phi), x(0), phase(0, phi)]
    placement = [x(pos) for pos, bit in enumerate(basis) if bit == "1"]
    spans = []
    if dense:
        spans.append(("dense", dense))
    if placement:
        spans.append(("phase1/place", placement))
    return spans


def _place_pair(spec: SparseStateSpec) -> list[tuple[str, list[Gate]]]:
    (qa, aa), (qb, ab) = spec.terms
    pivot = next(pos for pos in range(spec.n) if qa[pos] != qb[pos])
    if qa[pivot] == "1":
        qa, aa, qb, ab = qb, ab, qa, aa
    loader = u1q(pivot, ((aa, -ab.conjugate()), (ab, aa.conjugate())))
    diffs = [pos for pos in range(spec.n) if qa[pos] != qb[pos] and pos != pivot]
    ones = [pos for pos in range(spec.n) if qa[pos] == "1"]
    spans = [("dense", [loader])]
    wiring = fanout(pivot, diffs) if diffs else []
    wiring += [x(pos) for pos in ones]
    if wiring:
        spans.append(("phase1/place", wiring))
    return spans


@dataclass
class SynthesisResult:
    circuit: Circuit  # elementary gates
    logical: Circuit
    plan: SynthesisPlan
    metrics: Metrics


def _stage_of(label: str) -> str:
    return label.split("/", 1)[0]


def _build_metrics(logical: Circuit, elementary: Circuit, n: int) -> Metrics:
    counts: dict[str, int] = {}
    for g in elementary.gates:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    stages: dict[str, dict] = {}
    for circ, suffix in ((logical, "logical"), (elementary, "elementary")):
        grouped: dict[str, list[Gate]] = {}
        for i, g in enumerate(circ.gates):
            stage = _stage_of(circ.labels.get(i, "other"))
            grouped.setdefault(stage, []).append(g)
        for stage, gates in grouped.items():
            entry = stages.setdefault(stage, {})
            entry[f"size_{suffix}"] = len(gates)
            entry[f"depth_{suffix}"] = fragment_depth(gates)
    return Metrics(
        size_elementary=len(elementary.gates),
        depth_elementary=elementary.depth(),
        depth_logical=logical.depth(),
        qubits_total=elementary.qubit_count,
        ancilla_used=elementary.qubit_count - n,
        gate_counts=counts,
        stages=stages,
    )


def synthesize(
    spec,
    m: int,
    r: int | None = None,
    k: int | None = None,
    dense: str = "auto",
    mcx_strategy: str = "tree",
) -> SynthesisResult:
    """Compile a sparse state spec into an exact preparation circuit.

    Deterministic for fixed inputs and options. The returned circuit uses at
    most n + m wires; the plan's ledger records the predicted footprint and
    the metrics record the realized one.
    """
    if not isinstance(spec, SparseStateSpec):
        spec = validate_spec(spec)
    plan = select_parameters(spec.n, spec.d, m, r=r, k=k, dense=dense, mcx_strategy=mcx_strategy)

    if plan.trivial:
        spans = _place_single(spec) if spec.d == 1 else _place_pair(spec)
        logical = _assemble(spec.n, spans)
        elementary = decompose(logical)
        return SynthesisResult(elementary, logical, plan, _build_metrics(logical, elementary, spec.n))

    static = plan.layout["blocks"].offset + plan.layout["blocks"].width
    pool = ScratchPool(start=static)
    amps = [amp for _, amp in spec.terms]
    strategy = "onehot" if plan.dense_strategy == "onehot" else "multiplexed"
    spans = [("dense", prepare_dense(amps, plan.layout["index"].wires, strategy, pool))]
    spans += phase1(plan, spec, pool)
    spans += phase2(plan, pool)

    width = static + pool.allocated
    if pool.allocated > plan.ledger["pool_peak"]:
        raise SqspError(
            f"scratch use {pool.allocated} exceeds planned {plan.ledger['pool_peak']}"
        )
    if width > spec.n + m:
        raise SqspError(f"built circuit uses {width} wires > n + m = {spec.n + m}")

    logical = _assemble(width, spans)
    elementary = decompose(logical)
    metrics = _build_metrics(logical, elementary, spec.n)
    metrics.qubits_total = width
    metrics.ancilla_used = width - spec.n
    return SynthesisResult(elementary, logical, plan, metrics)


def _assemble(width: int, spans) -> Circuit:
    circ = Circuit(width)
    for label, gates in spans:
        for g in gates:
            circ.append(g, label)
    return circ
