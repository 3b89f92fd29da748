"""Reversible-logic building blocks.

All builders are pure functions from wire assignments (and a scratch pool
lease) to gate lists. Every builder uncomputes its scratch, so leased wires
are returned to |0> by construction; the pool only tracks accounting.

Conventions: one-hot ("unary") registers index from the left, i.e. value v
sets wire ``block[v]``. Binary registers are MSB-first: ``bin[0]`` is the
most significant bit.
"""
from __future__ import annotations

import heapq
from contextlib import contextmanager
from dataclasses import dataclass

from .circuit import Gate, ccx, cx, invert_gate, x
from .errors import (
    BadWidth,
    DuplicateOperand,
    EmptyControls,
    InsufficientScratch,
    ScratchUnavailable,
    SourceInTargets,
)


class ScratchPool:
    """Allocator for clean helper wires.

    ``lease`` hands out the lowest free wires (allocating new ones above
    ``start`` as needed, up to ``capacity``); ``release`` returns them.
    Inside a ``parallel()`` block releases are deferred so concurrent
    fragments get disjoint wires and stay depth-parallel.
    """

    def __init__(self, start: int = 0, capacity: int | None = None):
        self.start = start
        self.capacity = capacity
        self._free: list[int] = []
        self._next = start
        self._leased: set[int] = set()
        self.high_water = 0
        self._defer_depth = 0
        self._deferred: list[int] = []

    @property
    def allocated(self) -> int:
        """Wires ever created; equals peak concurrent leases."""
        return self._next - self.start

    def lease(self, count: int) -> list[int]:
        if count < 0:
            raise ValueError("negative lease")
        out = []
        for _ in range(count):
            if self._free:
                w = heapq.heappop(self._free)
            else:
                if self.capacity is not None and self.allocated >= self.capacity:
                    for got in out:
                        heapq.heappush(self._free, got)
                    raise InsufficientScratch(
                        f"pool capacity {self.capacity} exhausted"
                    )
                w = self._next
                self._next += 1
            out.append(w)
        self._leased.update(out)
        if len(self._leased) > self.high_water:
            self.high_water = len(self._leased)
        return out

    def release(self, wires) -> None:
        for w in wires:
            if w not in self._leased:
                raise ValueError(f"wire {w} is not leased")
        if self._defer_depth:
            self._deferred.extend(wires)
            return
        for w in wires:
            self._leased.discard(w)
            heapq.heappush(self._free, w)

    @contextmanager
    def parallel(self):
        self._defer_depth += 1
        try:
            yield self
        finally:
            self._defer_depth -= 1
            if self._defer_depth == 0:
                pending, self._deferred = self._deferred, []
                self.release(pending)

    def subpool(self) -> "_SubPool":
        """Child allocator for one branch of concurrent fragments.

        The child recycles its own released wires but never returns them to
        this pool until ``close()``, so sibling branches get disjoint wires
        and stay depth-parallel.
        """
        return _SubPool(self)


class _SubPool:
    def __init__(self, parent: ScratchPool):
        self.parent = parent
        self._free: list[int] = []
        self._mine: list[int] = []
        self._leased: set[int] = set()

    def lease(self, count: int) -> list[int]:
        out = []
        for _ in range(count):
            if self._free:
                w = heapq.heappop(self._free)
            else:
                w = self.parent.lease(1)[0]
                self._mine.append(w)
            out.append(w)
        self._leased.update(out)
        return out

    def release(self, wires) -> None:
        for w in wires:
            if w not in self._leased:
                raise ValueError(f"wire {w} is not leased")
            self._leased.discard(w)
            heapq.heappush(self._free, w)

    def close(self) -> None:
        if self._leased:
            raise ValueError("subpool closed with live leases")
        self.parent.release(self._mine)
        self._mine = []
        self._free = []


def _check_distinct(wires) -> None:
    if len(set(wires)) != len(wires):
        raise DuplicateOperand(f"wires must be distinct: {wires}")


# -- scratch accounting (shared with the planner) ---


def mcx_scratch(c: int, strategy: str = "tree") -> int:
    if c <= 2:
        return 0
    return c - 1 if strategy == "tree" else c - 2


def binary_to_unary_scratch(s: int) -> int:
    # bit-t copies: 2^t - 1 fresh wires per level
    return sum((1 << t) - 1 for t in range(s))


def unary_to_binary_scratch(s: int) -> int:
    fold = (1 << s) - 2 if s >= 2 else 0
    return max(fold, binary_to_unary_scratch(s))


# -- CNOT networks ---


def parity_fanin(controls, target: int) -> list[Gate]:
    """target ^= XOR(controls); controls restored; no scratch.

    Balanced in-place fold: depth <= 2*ceil(log2 c) + 1, 2c-1 CNOTs.
    """
    controls = list(controls)
    if not controls:
        raise EmptyControls("parity_fanin needs at least one control")
    _check_distinct([*controls, target])
    fold: list[Gate] = []
    live = controls
    while len(live) > 1:
        nxt = []
        for i in range(0, len(live) - 1, 2):
            fold.append(cx(live[i + 1], live[i]))
            nxt.append(live[i])
        if len(live) % 2:
            nxt.append(live[-1])
        live = nxt
    return fold + [cx(live[0], target)] + [g for g in reversed(fold)]


def fanout(source: int, targets) -> list[Gate]:
    """target_i ^= source for freshly-zeroed targets.

    Binary doubling (already-written targets serve as copy sources), so
    exactly |targets| CNOTs and depth ceil(log2(|targets|+1)). Targets that
    are not |0> would propagate junk; callers own that contract.
    """
    targets = list(targets)
    if source in targets:
        raise SourceInTargets(f"source {source} appears in targets")
    _check_distinct([source, *targets])
    gates: list[Gate] = []
    sources = [source]
    idx = 0
    while idx < len(targets):
        written = []
        for s in sources:
            if idx >= len(targets):
                break
            gates.append(cx(s, targets[idx]))
            written.append(targets[idx])
            idx += 1
        sources += written
    return gates


def fanout_xor(source: int, targets) -> list[Gate]:
    """target_i ^= source for targets in arbitrary states.

    Balanced-tree conjugation: encode pairwise differences bottom-up, one
    CNOT from the source into the root, decode top-down. 2|targets|-1
    CNOTs, no scratch, works on every basis state.
    """
    targets = list(targets)
    if source in targets:
        raise SourceInTargets(f"source {source} appears in targets")
    _check_distinct([source, *targets])
    if not targets:
        return []
    n = len(targets)
    # heap-shaped tree on targets; node 0 is the root
    levels: list[list[int]] = []
    i, width = 0, 1
    while i < n:
        levels.append(list(range(i, min(i + width, n))))
        i += width
        width *= 2
    encode: list[Gate] = []
    for lvl in reversed(levels[1:]):
        for v in lvl:
            encode.append(cx(targets[(v - 1) // 2], targets[v]))
    decode = [cx(g.qubits[0], g.qubits[1]) for g in reversed(encode)]
    return encode + [cx(source, targets[0])] + decode


def mcx_network(controls, target: int, scratch, strategy: str = "tree") -> list[Gate]:
    """Multi-controlled X over explicit clean scratch wires.

    tree: pairwise-AND Toffoli fold (c-1 scratch, Toffoli-depth
    2*ceil(log2 c)+1 including the payload CNOT); chain: sequential ladder
    (c-2 scratch). Scratch is restored to |0>.
    """
    controls = list(controls)
    if not controls:
        raise EmptyControls("mcx needs at least one control")
    _check_distinct([*controls, target])
    c = len(controls)
    if c == 1:
        return [cx(controls[0], target)]
    if c == 2:
        return [ccx(controls[0], controls[1], target)]
    need = mcx_scratch(c, strategy)
    scratch = list(scratch)
    if len(scratch) < need:
        raise ScratchUnavailable(
            f"{strategy} mcx with {c} controls needs {need} scratch wires, got {len(scratch)}"
        )
    scratch = scratch[:need]
    compute: list[Gate] = []
    if strategy == "tree":
        live = controls
        fresh = iter(scratch)
        while len(live) > 1:
            nxt = []
            for i in range(0, len(live) - 1, 2):
                w = next(fresh)
                compute.append(ccx(live[i], live[i + 1], w))
                nxt.append(w)
            if len(live) % 2:
                nxt.append(live[-1])
            live = nxt
        payload = [cx(live[0], target)]
    elif strategy == "chain":
        compute.append(ccx(controls[0], controls[1], scratch[0]))
        for i in range(2, c - 1):
            compute.append(ccx(controls[i], scratch[i - 2], scratch[i - 1]))
        payload = [ccx(controls[c - 1], scratch[c - 3], target)]
    else:
        raise ValueError(f"unknown mcx strategy {strategy!r}")
    return compute + payload + [g for g in reversed(compute)]


def mcx(controls, target: int, pool: ScratchPool, strategy: str = "tree") -> list[Gate]:
    """Pool-leased variant of :func:`mcx_network`."""
    controls = list(controls)
    need = mcx_scratch(len(controls), strategy)
    lease = pool.lease(need)
    try:
        return mcx_network(controls, target, lease, strategy)
    finally:
        pool.release(lease)


# -- unary/binary converters ---


@dataclass(frozen=True)
class UnaryBlock:
    """One-hot register of width 2**s; valid content is one-hot or all-zero."""

    wires: tuple[int, ...]
    s: int

    def __post_init__(self):
        if len(self.wires) != 1 << self.s:
            raise BadWidth(f"block needs width {1 << self.s}, got {len(self.wires)}")


def binary_to_unary(bin_wires, block_wires, pool: ScratchPool) -> list[Gate]:
    """|i>|0...0> -> |i>|e_i>: address-decoder tree.

    Fans each address bit t out to 2^t copies, seeds slot 0, then splits
    every live slot with one Toffoli + one CNOT per slot. Depth O(s),
    size O(2^s), scratch 2^s - 1 - s.
    """
    bin_wires = list(bin_wires)
    block_wires = list(block_wires)
    s = len(bin_wires)
    if len(block_wires) != 1 << s:
        raise BadWidth(f"block width {len(block_wires)} != 2^{s}")
    _check_distinct(bin_wires + block_wires)

    gates: list[Gate] = []
    copies: list[list[int]] = []
    fanouts: list[list[Gate]] = []
    leases: list[int] = []
    for t in range(s):
        extra = (1 << t) - 1
        if extra == 0:
            copies.append([bin_wires[t]])
            fanouts.append([])
            continue
        lease = pool.lease(extra)
        leases.extend(lease)
        frag = fanout(bin_wires[t], lease)
        fanouts.append(frag)
        gates.extend(frag)
        copies.append([bin_wires[t], *lease])

    gates.append(x(block_wires[0]))
    for t in range(s):
        step = 1 << (s - t)
        half = step >> 1
        for i in range(1 << t):
            p = i * step
            gates.append(ccx(copies[t][i], block_wires[p], block_wires[p + half]))
            gates.append(cx(block_wires[p + half], block_wires[p]))

    for frag in reversed(fanouts):
        gates.extend(invert_gate(g) for g in reversed(frag))
    pool.release(leases)
    return gates


def unary_to_binary(block_wires, bin_wires, pool: ScratchPool) -> list[Gate]:
    """|e_i>|0> -> |0...0>|i> for every i; scratch restored.

    Folds the block into half-width one-hot registers level by level,
    reads each output bit as the parity of a level's upper half (all
    levels in parallel), unfolds, then clears the block by running the
    decoder in reverse. Inputs that are not one-hot/all-zero are outside
    the contract and are not detected.
    """
    block_wires = list(block_wires)
    bin_wires = list(bin_wires)
    s = len(bin_wires)
    if len(block_wires) != 1 << s:
        raise BadWidth(f"block width {len(block_wires)} != 2^{s}")
    _check_distinct(block_wires + bin_wires)

    gates: list[Gate] = []
    levels = [block_wires]
    fold: list[Gate] = []
    leases: list[int] = []
    for t in range(1, s):
        width = 1 << (s - t)
        fresh = pool.lease(width)
        leases.extend(fresh)
        prev = levels[-1]
        for i in range(width):
            fold.append(cx(prev[i], fresh[i]))
        for i in range(width):
            fold.append(cx(prev[i + width], fresh[i]))
        levels.append(fresh)
    gates.extend(fold)

    for t in range(s):
        reg = levels[t]
        upper = reg[len(reg) // 2 :]
        gates.extend(parity_fanin(upper, bin_wires[t]))

    gates.extend(invert_gate(g) for g in reversed(fold))
    pool.release(leases)

    decoder = binary_to_unary(bin_wires, block_wires, pool)
    gates.extend(invert_gate(g) for g in reversed(decoder))
    return gates
