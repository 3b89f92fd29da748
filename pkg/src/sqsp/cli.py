"""Command-line front end.

Subcommands: ``synth`` (compile a spec file), ``verify`` (compile and check
by exact simulation), ``bench`` (grid sweeps to CSV), ``gen`` (random spec
files). Exit codes: 2 invalid spec, 3 budget too small, 4 I/O or usage,
5 verification failure. ``SQSP_LOG`` sets the log level.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .circuit import emit_qasm, x
from .errors import BudgetTooSmall, SqspError
from .plan import SparseStateSpec, validate_spec
from .sim import compare, run
from .synth import SynthesisResult, synthesize

log = logging.getLogger("sqsp")

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_BUDGET = 3
EXIT_IO = 4
EXIT_VERIFY = 5

VERIFY_WIRE_CAP = 512
VERIFY_TERM_CAP = 1024


def _read_spec(path: str) -> SparseStateSpec:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_SPEC, f"malformed spec JSON in {path}: {exc}") from exc
    try:
        return validate_spec(raw)
    except SqspError as exc:
        raise _Exit(EXIT_SPEC, f"invalid spec: {exc}") from exc


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _synthesize(spec: SparseStateSpec, args) -> SynthesisResult:
    try:
        return synthesize(
            spec,
            args.m,
            r=args.r,
            k=args.k,
            dense=args.dense if args.dense != "auto" else "auto",
            mcx_strategy=args.mcx,
        )
    except BudgetTooSmall as exc:
        raise _Exit(EXIT_BUDGET, f"budget too small: {exc} (m_min={exc.m_min})") from exc
    except SqspError as exc:
        raise _Exit(EXIT_SPEC, f"synthesis failed: {exc}") from exc


def _metrics_doc(result: SynthesisResult) -> dict:
    return {"plan": result.plan.to_json(), "metrics": result.metrics.to_json()}


def _corrupt(result: SynthesisResult) -> None:
    """Test hook: wedge one extra X mid-circuit so verification must fail."""
    circ = result.circuit
    pos = len(circ.gates) // 2
    circ.gates.insert(pos, x(0))


def cmd_synth(args) -> int:
    spec = _read_spec(args.input)
    result = _synthesize(spec, args)
    if args.emit == "qasm":
        payload = emit_qasm(result.circuit)
    else:
        payload = result.circuit.to_json() + "\n"
    metrics = json.dumps(_metrics_doc(result), indent=2) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(payload)
            with open(args.out + ".metrics.json", "w") as fh:
                fh.write(metrics)
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot write output: {exc}") from exc
        log.info("wrote %s and %s.metrics.json", args.out, args.out)
    else:
        sys.stdout.write(payload)
        sys.stderr.write(metrics)
    return EXIT_OK


def _verify_result(result: SynthesisResult, spec: SparseStateSpec):
    state = run(result.circuit)
    return compare(state, spec, result.plan.data_qubits)


def cmd_verify(args) -> int:
    spec = _read_spec(args.input)
    result = _synthesize(spec, args)
    if args.corrupt:
        _corrupt(result)
    report = _verify_result(result, spec)
    doc = report.to_json()
    doc["n"] = spec.n
    doc["d"] = spec.d
    doc["m"] = args.m
    doc["r"] = result.plan.r
    doc["k"] = result.plan.k
    print(json.dumps(doc, indent=2))
    return EXIT_OK if report.passed else EXIT_VERIFY


BENCH_COLUMNS = [
    "n", "d", "m", "r", "k", "dense",
    "size_elementary", "depth_elementary", "depth_logical",
    "qubits_total", "ancilla_used",
    "dense_size", "dense_depth",
    "phase1_size", "phase1_depth",
    "phase2_size", "phase2_depth",
    "verify", "verify_pass",
]


def random_spec(n: int, d: int, rng: np.random.Generator) -> SparseStateSpec:
    """d distinct n-bit strings by rejection; amplitudes uniform on the sphere."""
    if d > 1 << n:
        raise SqspError(f"d={d} exceeds 2^n for n={n}")
    chosen: list[str] = []
    seen = set()
    while len(chosen) < d:
        bits = "".join("1" if b else "0" for b in rng.integers(0, 2, size=n))
        if bits not in seen:
            seen.add(bits)
            chosen.append(bits)
    re = rng.standard_normal(d)
    im = rng.standard_normal(d)
    amps = re + 1j * im
    amps = amps / np.linalg.norm(amps)
    terms = tuple(zip(chosen, (complex(a) for a in amps)))
    return validate_spec(SparseStateSpec(n, terms))


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return "" if value is None else str(value)


def bench_rows(args):
    rows = []
    for n in args.grid_n:
        for d in args.grid_d:
            rng = np.random.default_rng([args.seed, n, d])
            spec = random_spec(n, d, rng)
            for m in args.grid_m:
                row = {"n": n, "d": d, "m": m}
                result = synthesize(spec, m, dense=args.dense, mcx_strategy=args.mcx)
                met, stages = result.metrics, result.metrics.stages
                row.update(
                    r=result.plan.r,
                    k=result.plan.k,
                    dense=result.plan.dense_strategy,
                    size_elementary=met.size_elementary,
                    depth_elementary=met.depth_elementary,
                    depth_logical=met.depth_logical,
                    qubits_total=met.qubits_total,
                    ancilla_used=met.ancilla_used,
                )
                for stage in ("dense", "phase1", "phase2"):
                    info = stages.get(stage, {})
                    row[f"{stage}_size"] = info.get("size_elementary", 0)
                    row[f"{stage}_depth"] = info.get("depth_elementary", 0)
                do_verify = not args.no_verify and (
                    args.force_verify
                    or (n + m <= VERIFY_WIRE_CAP and d <= VERIFY_TERM_CAP)
                )
                row["verify"] = do_verify
                row["verify_pass"] = (
                    _verify_result(result, spec).passed if do_verify else None
                )
                rows.append(row)
    return rows


def cmd_bench(args) -> int:
    if not (args.grid_n and args.grid_d and args.grid_m):
        raise _Exit(EXIT_IO, "usage: bench needs --grid-n, --grid-d and --grid-m")
    try:
        rows = bench_rows(args)
    except BudgetTooSmall as exc:
        raise _Exit(EXIT_BUDGET, f"budget too small in grid: {exc}") from exc
    lines = [",".join(BENCH_COLUMNS)]
    failed = False
    for row in rows:
        lines.append(",".join(_fmt_cell(row[c]) for c in BENCH_COLUMNS))
        if row["verify"] and not row["verify_pass"]:
            failed = True
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot write CSV: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_gen(args) -> int:
    if args.d > (1 << args.n):
        raise _Exit(EXIT_SPEC, f"d={args.d} exceeds 2^n={1 << args.n}")
    rng = np.random.default_rng(args.seed)
    spec = random_spec(args.n, args.d, rng)
    text = spec.to_json() + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot write spec: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqsp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True):
        if budget:
            p.add_argument("--m", type=int, required=True, help="ancilla budget")
            p.add_argument("--r", type=int, default=None, help="force block arity")
            p.add_argument("--k", type=int, default=None, help="force batch size (power of two)")
        p.add_argument("--mcx", choices=("tree", "chain"), default="tree")
        p.add_argument("--dense", choices=("auto", "multiplexed", "onehot"), default="auto")
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("synth", help="compile a spec file to a circuit")
    p.add_argument("input")
    common(p)
    p.add_argument("--emit", choices=("qasm", "json"), default="qasm")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("verify", help="compile and verify by exact simulation")
    p.add_argument("input")
    common(p)
    p.add_argument("--corrupt", action="store_true", help="inject a fault (testing)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bench", help="sweep a grid and emit CSV")
    common(p, budget=False)
    p.add_argument("--grid-n", type=_int_list, default=[])
    p.add_argument("--grid-d", type=_int_list, default=[])
    p.add_argument("--grid-m", type=_int_list, default=[])
    p.add_argument("--no-verify", action="store_true")
    p.add_argument(
        "--force-verify",
        action="store_true",
        help="verify even above the default n+m/d caps",
    )
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen", help="generate a random spec file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    common(p, budget=False)
    p.set_defaults(fn=cmd_gen)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SQSP_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _Exit as exc:
        print(f"sqsp: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
