"""Exact sparse quantum state preparation.

Compiles an n-qubit state with d nonzero computational-basis amplitudes
into an exact preparation circuit over {arbitrary single-qubit, CNOT},
trading circuit depth against a caller-supplied ancilla budget, and
verifies the output with an exact sparse simulator.
"""
from . import circuit, dense, plan, primitives, sim, synth
from ._kernels import BACKEND as KERNEL_BACKEND
from .circuit import (
    Circuit,
    Gate,
    Metrics,
    decompose,
    emit_qasm,
    fragment_depth,
    parse_qasm,
)
from .plan import (
    Register,
    SparseStateSpec,
    SynthesisPlan,
    compute_ledger,
    log_depth_budget,
    minimum_budget,
    partition_terms,
    select_parameters,
    validate_spec,
)
from .primitives import (
    ScratchPool,
    UnaryBlock,
    binary_to_unary,
    fanout,
    fanout_xor,
    mcx_network,
    parity_fanin,
    unary_to_binary,
)
from .dense import prepare_dense, split_angles
from .sim import CompareReport, SparseVector, apply_gate, bits_to_key, compare, run, run_reversible
from .synth import SynthesisResult, synthesize

__version__ = "0.1.0"
