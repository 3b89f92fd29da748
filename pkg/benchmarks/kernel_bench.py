"""Compare the compiled tape kernel against the pure-Python fallback.

Builds representative synthesized circuits, compiles their X-type spans to
tapes, and times evolving the full support through them with each backend.

Run:  python benchmarks/kernel_bench.py
"""
import time

import numpy as np

from sqsp._kernels import _pure
from sqsp.cli import random_spec
from sqsp.plan import minimum_budget
from sqsp.sim import _keys_to_matrix, bits_to_key, compile_xtape
from sqsp.synth import synthesize

try:
    from sqsp._kernels import _speedups
except ImportError:
    _speedups = None


def bench_case(n: int, d: int, mult: int, repeats: int = 3):
    rng = np.random.default_rng(1)
    spec = random_spec(n, d, rng)
    m = mult * minimum_budget(n, d)
    res = synthesize(spec, m)
    gates = [g for g in res.circuit.gates if g.is_xtype]
    offsets, wires = compile_xtape(gates)
    keys = [bits_to_key(basis) for basis, _ in spec.terms]
    base = _keys_to_matrix(keys, res.circuit.qubit_count)
    ops = len(gates) * len(keys)

    rows = {}
    backends = {"pure": _pure}
    if _speedups is not None:
        backends["compiled"] = _speedups
    for name, backend in backends.items():
        best = float("inf")
        for _ in range(repeats):
            mat = base.copy()
            t0 = time.perf_counter()
            backend.apply_xtype_tape(offsets, wires, mat)
            best = min(best, time.perf_counter() - t0)
        rows[name] = best
    return len(gates), ops, rows


def main():
    print(f"{'case':>16} {'xgates':>8} {'term-ops':>10} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for n, d, mult in [(16, 16, 2), (32, 64, 1), (64, 64, 1), (64, 64, 4)]:
        gates, ops, rows = bench_case(n, d, mult)
        pure = rows["pure"]
        comp = rows.get("compiled")
        speedup = f"{pure / comp:8.1f}" if comp else "     n/a"
        comp_s = f"{comp:10.4f}" if comp else "       n/a"
        print(
            f"{f'n={n} d={d} m={mult}x':>16} {gates:8d} {ops:10d} {pure:10.4f} {comp_s} {speedup}"
        )


if __name__ == "__main__":
    main()
