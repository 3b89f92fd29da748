import numpy as np
import pytest

from sqsp.circuit import Circuit
from sqsp.plan import SparseStateSpec, validate_spec
from sqsp.sim import SparseVector, run, run_reversible


def frag_circuit(gates, width=None) -> Circuit:
    """Wrap a gate-list fragment in a circuit wide enough to hold it."""
    used = max((max(g.qubits) for g in gates), default=-1) + 1
    return Circuit(max(used, width or 0), gates)


def frag_permute(gates, key: int, width=None) -> int:
    """Run an X-type fragment on one basis key."""
    return run_reversible(frag_circuit(gates, width), key)


def frag_state(gates, width=None, key: int = 0) -> SparseVector:
    circ = frag_circuit(gates, width)
    return run(circ, SparseVector.basis_state(circ.qubit_count, key))


def pack(values) -> int:
    """Little helper: wire i gets values[i]."""
    key = 0
    for i, v in enumerate(values):
        if v:
            key |= 1 << i
    return key


def unpack(key: int, width: int) -> list[int]:
    return [(key >> i) & 1 for i in range(width)]


def random_sparse_spec(rng: np.random.Generator, n: int, d: int) -> SparseStateSpec:
    seen = set()
    while len(seen) < d:
        seen.add("".join("1" if b else "0" for b in rng.integers(0, 2, size=n)))
    amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    amps /= np.linalg.norm(amps)
    return validate_spec(
        SparseStateSpec(n, tuple(zip(sorted(seen), map(complex, amps))))
    )


EXAMPLE1_TERMS = ("11011000", "00011001", "10001111", "01011011")


@pytest.fixture
def example1_spec() -> SparseStateSpec:
    """The four-string, equal-amplitude golden instance in its given order."""
    terms = tuple((q, complex(0.5)) for q in EXAMPLE1_TERMS)
    return validate_spec(SparseStateSpec(8, terms), sort=False)
