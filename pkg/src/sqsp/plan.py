"""Input validation and synthesis planning.

The planner picks the block arity ``r`` and batch size ``k`` for a given
ancilla budget ``m``. Feasibility is decided by an explicit ledger computed
from the actual builders' register and scratch footprints, not from assumed
constants: the chosen plan's predicted wire total must fit in ``n + m``.

Selection is deterministic: cap the usable budget at ``C_CAP*n*d/log2(d)``
(extra ancillas beyond that cannot reduce depth further), take the largest
feasible ``r``, then the largest feasible power-of-two ``k <= d``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import (
    BadWidth,
    BudgetTooSmall,
    DuplicateBasis,
    NotNormalized,
    ZeroAmplitude,
)
from .primitives import mcx_scratch, unary_to_binary_scratch

C_CAP = 8
NORM_TOL = 1e-10


@dataclass(frozen=True)
class SparseStateSpec:
    """Target state: ``terms`` pairs each n-bit basis string with its amplitude."""

    n: int
    terms: tuple[tuple[str, complex], ...]

    @property
    def d(self) -> int:
        return len(self.terms)

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "terms": [
                {"basis": basis, "re": amp.real, "im": amp.imag}
                for basis, amp in self.terms
            ],
        }
        return json.dumps(doc, indent=2)


def validate_spec(raw, sort: bool = True) -> SparseStateSpec:
    """Check and normalize a raw spec (JSON dict or (basis, amp) pairs).

    Sorting by basis string (the default) makes downstream synthesis
    independent of input order; pass ``sort=False`` to keep the caller's
    term order, which fixes the subset partition.
    """
    if isinstance(raw, SparseStateSpec):
        n, pairs = raw.n, list(raw.terms)
    elif isinstance(raw, dict):
        n = raw.get("n")
        if not isinstance(n, int) or n <= 0:
            raise BadWidth(f"bad qubit count: {n!r}")
        pairs = []
        for entry in raw.get("terms", []):
            amp = complex(entry.get("re", 0.0), entry.get("im", 0.0))
            pairs.append((entry.get("basis", ""), amp))
    else:
        raise BadWidth(f"cannot interpret spec input of type {type(raw)}")

    if not pairs:
        raise BadWidth("spec has no terms")
    seen = set()
    for basis, amp in pairs:
        if not isinstance(basis, str) or len(basis) != n or set(basis) - {"0", "1"}:
            raise BadWidth(f"basis {basis!r} is not an {n}-bit string")
        if basis in seen:
            raise DuplicateBasis(f"duplicate basis string {basis!r}")
        seen.add(basis)
        if amp == 0:
            raise ZeroAmplitude(f"zero amplitude on basis {basis!r}")
    norm = math.fsum(abs(amp) ** 2 for _, amp in pairs)
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"|amps|^2 sums to {norm!r}")
    if sort:
        pairs.sort(key=lambda pair: pair[0])
    return SparseStateSpec(n, tuple((b, complex(a)) for b, a in pairs))


@dataclass(frozen=True)
class Register:
    name: str
    offset: int
    width: int

    @property
    def wires(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))


def partition_terms(d: int, k: int) -> tuple[tuple[int, int], ...]:
    """Split term indices {0..d-1} into runs of k (last run may be short)."""
    out = []
    j = 0
    while j * k < d:
        out.append((j * k, min((j + 1) * k, d)))
        j += 1
    return tuple(out)


# -- budget ledger ---


def _ell_n(d: int) -> int:
    return max(1, math.ceil(math.log2(d))) if d > 1 else 0


def _u2b_peak(s: int) -> int:
    return unary_to_binary_scratch(s) if s >= 1 else 0


def _c2_peak(nblocks: int, ell: int, mcx_strategy: str) -> int:
    step_a = ell * (nblocks - 1)
    step_b = (ell - 1) * nblocks + ell * mcx_scratch(nblocks, mcx_strategy)
    return max(step_a, step_b)


def compute_ledger(
    n: int,
    d: int,
    r: int,
    k: int,
    dense_strategy: str = "multiplexed",
    mcx_strategy: str = "tree",
) -> dict:
    """Predicted per-region wire counts for a (r, k) plan."""
    ell_n = _ell_n(d)
    ell_k = k.bit_length() - 1
    n_pad = r * math.ceil(n / r)
    nblocks = n_pad // r
    w = ell_n - ell_k

    dense_peak = 0
    if dense_strategy == "onehot" and d > 1:
        dense_peak = (1 << ell_n) + _u2b_peak(ell_n)
    phase1_peak = max(
        _u2b_peak(ell_k),
        mcx_scratch(w, mcx_strategy),
        _c2_peak(nblocks, k, mcx_strategy),
    )
    phase2_peak = nblocks * _u2b_peak(r)
    pool_peak = max(dense_peak, phase1_peak, phase2_peak)
    static = n_pad + ell_n + 3 * k + nblocks * (1 << r)
    total = static + pool_peak
    return {
        "data": n_pad,
        "padding": n_pad - n,
        "index": ell_n,
        "unary": k,
        "tag": k,
        "selector": k,
        "blocks": nblocks * (1 << r),
        "dense_peak": dense_peak,
        "phase1_peak": phase1_peak,
        "phase2_peak": phase2_peak,
        "pool_peak": pool_peak,
        "planned_total": total,
        "planned_ancilla": total - n,
    }


def _phase2_need(n: int, d: int, r: int) -> int:
    """Ancillas tied up by the block registers and their converters."""
    n_pad = r * math.ceil(n / r)
    nblocks = n_pad // r
    return nblocks * (1 << r) + nblocks * _u2b_peak(r) + (n_pad - n)


@dataclass(frozen=True)
class SynthesisPlan:
    n: int
    d: int
    m: int
    r: int
    k: int
    n_pad: int
    ell_n: int
    ell_k: int
    subsets: tuple[tuple[int, int], ...]
    layout: dict
    dense_strategy: str
    mcx_strategy: str
    ledger: dict
    trivial: bool = False

    @property
    def nblocks(self) -> int:
        return self.n_pad // self.r

    @property
    def data_qubits(self) -> tuple[int, ...]:
        data = self.layout["data"]
        pad = self.n_pad - self.n
        return data.wires[pad:]

    def block_register(self, j: int) -> Register:
        blocks = self.layout["blocks"]
        return Register(f"block{j}", blocks.offset + j * (1 << self.r), 1 << self.r)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "r": self.r,
            "k": self.k,
            "n_pad": self.n_pad,
            "ell_n": self.ell_n,
            "ell_k": self.ell_k,
            "subsets": [list(s) for s in self.subsets],
            "dense_strategy": self.dense_strategy,
            "mcx_strategy": self.mcx_strategy,
            "trivial": self.trivial,
            "ledger": dict(self.ledger),
            "layout": {
                name: [reg.offset, reg.width] for name, reg in self.layout.items()
            },
        }


def _build_layout(n: int, ell_n: int, k: int, n_pad: int, nblocks: int, r: int) -> dict:
    off = 0
    layout = {}
    for name, width in (
        ("data", n_pad),
        ("index", ell_n),
        ("unary", k),
        ("tag", k),
        ("selector", k),
        ("blocks", nblocks * (1 << r)),
    ):
        layout[name] = Register(name, off, width)
        off += width
    return layout


def _trivial_plan(n: int, d: int, m: int) -> SynthesisPlan:
    layout = {"data": Register("data", 0, n)}
    ledger = {
        "data": n,
        "padding": 0,
        "pool_peak": 0,
        "planned_total": n,
        "planned_ancilla": 0,
    }
    return SynthesisPlan(
        n=n,
        d=d,
        m=m,
        r=1,
        k=1,
        n_pad=n,
        ell_n=_ell_n(d),
        ell_k=0,
        subsets=(),
        layout=layout,
        dense_strategy="direct",
        mcx_strategy="tree",
        ledger=ledger,
        trivial=True,
    )


def minimum_budget(n: int, d: int) -> int:
    """Smallest ancilla budget any plan can fit (d > 2)."""
    if d <= 2:
        return 0
    return compute_ledger(n, d, 1, 1)["planned_ancilla"]


def log_depth_budget(n: int, d: int) -> int:
    """Budget that affords the depth-optimal regime: r ~ log d, k ~ d."""
    if d <= 2:
        return 0
    r = max(1, math.ceil(math.log2(d)))
    k = 1 << (d.bit_length() - 1)
    if k > d:
        k >>= 1
    return compute_ledger(n, d, r, k, dense_strategy="onehot")["planned_ancilla"]


def select_parameters(
    n: int,
    d: int,
    m: int,
    r: int | None = None,
    k: int | None = None,
    dense: str = "auto",
    mcx_strategy: str = "tree",
) -> SynthesisPlan:
    """Deterministic plan choice under the ledger; see module docstring.

    Forced ``r``/``k`` overrides are audited against the full budget and
    rejected with ``BudgetTooSmall`` when the ledger cannot fit.
    """
    if n <= 0 or d <= 0:
        raise BadWidth(f"bad plan inputs n={n}, d={d}")
    if d <= 2 and r is None and k is None:
        return _trivial_plan(n, d, m)

    ell_n = _ell_n(d)
    m_eff = min(m, C_CAP * n * d // max(1, math.ceil(math.log2(max(d, 2))))) if m > 0 else m

    def feasible(rr: int, kk: int, budget: int, dense_strategy: str) -> bool:
        led = compute_ledger(n, d, rr, kk, dense_strategy, mcx_strategy)
        return led["planned_ancilla"] <= budget

    # r: largest arity whose phase-2 region and minimal plan fit
    if r is not None:
        if not (1 <= r <= n):
            raise BadWidth(f"forced r={r} outside 1..{n}")
        if not feasible(r, 1, m, "multiplexed"):
            raise BudgetTooSmall(
                f"forced r={r} infeasible for m={m} (m_min={minimum_budget(n, d)})",
                minimum_budget(n, d),
            )
        chosen_r = r
    else:
        chosen_r = 0
        for rr in range(min(n, 24), 0, -1):
            if _phase2_need(n, d, rr) <= m_eff and feasible(rr, 1, m_eff, "multiplexed"):
                chosen_r = rr
                break
        if chosen_r == 0:
            m_min = minimum_budget(n, d)
            raise BudgetTooSmall(
                f"budget m={m} below feasibility floor m_min={m_min}", m_min
            )

    # k: largest power of two <= d
    if k is not None:
        if k < 1 or (k & (k - 1)) or k > d:
            raise BadWidth(f"forced k={k} must be a power of two <= d={d}")
        if not feasible(chosen_r, k, m, "multiplexed"):
            raise BudgetTooSmall(
                f"forced k={k} infeasible for m={m} with r={chosen_r}",
                minimum_budget(n, d),
            )
        chosen_k = k
    else:
        chosen_k = 1
        kk = 1 << (d.bit_length() - 1)
        if kk > d:
            kk >>= 1
        budget = m_eff if r is None else m
        while kk > 1:
            if feasible(chosen_r, kk, budget, "multiplexed"):
                break
            kk >>= 1
        chosen_k = kk

    # dense strategy from the same ledger
    if dense == "auto":
        dense_strategy = (
            "onehot" if feasible(chosen_r, chosen_k, m, "onehot") else "multiplexed"
        )
    elif dense in ("onehot", "multiplexed"):
        if dense == "onehot" and not feasible(chosen_r, chosen_k, m, "onehot"):
            raise BudgetTooSmall(
                f"dense strategy onehot infeasible for m={m}", minimum_budget(n, d)
            )
        dense_strategy = dense
    else:
        raise ValueError(f"unknown dense strategy {dense!r}")

    ledger = compute_ledger(n, d, chosen_r, chosen_k, dense_strategy, mcx_strategy)
    ledger["budget"] = m
    n_pad = chosen_r * math.ceil(n / chosen_r)
    nblocks = n_pad // chosen_r
    layout = _build_layout(n, ell_n, chosen_k, n_pad, nblocks, chosen_r)
    return SynthesisPlan(
        n=n,
        d=d,
        m=m,
        r=chosen_r,
        k=chosen_k,
        n_pad=n_pad,
        ell_n=ell_n,
        ell_k=chosen_k.bit_length() - 1,
        subsets=partition_terms(d, chosen_k),
        layout=layout,
        dense_strategy=dense_strategy,
        mcx_strategy=mcx_strategy,
        ledger=ledger,
        trivial=False,
    )
