# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop: evolve basis-state rows through an X-type gate tape.

The tape is a flat encoding of {x, cx, ccx, mcx} gates: ``offsets[g]`` ..
``offsets[g+1]`` indexes into ``wires``; all entries but the last are
controls, the last is the target. Keys are little-endian 64-bit chunks,
one row per basis state.
"""
import numpy as np

cimport numpy as cnp


def apply_xtype_tape(
    cnp.int32_t[::1] offsets,
    cnp.int32_t[::1] wires,
    cnp.uint64_t[:, ::1] keys,
):
    cdef Py_ssize_t n_ops = offsets.shape[0] - 1
    cdef Py_ssize_t rows = keys.shape[0]
    cdef Py_ssize_t row, g, a, start, end
    cdef cnp.int32_t w, t
    cdef int ok
    for row in range(rows):
        for g in range(n_ops):
            start = offsets[g]
            end = offsets[g + 1]
            ok = 1
            for a in range(start, end - 1):
                w = wires[a]
                if not (keys[row, w >> 6] >> (w & 63)) & 1:
                    ok = 0
                    break
            if ok:
                t = wires[end - 1]
                keys[row, t >> 6] ^= (<cnp.uint64_t> 1) << (t & 63)
