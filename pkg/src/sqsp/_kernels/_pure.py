"""Pure-Python fallback for the X-type tape kernel.

Same contract as the compiled version; used when the extension is not
built or when ``SQSP_PURE`` is set.
"""


def apply_xtype_tape(offsets, wires, keys):
    n_ops = len(offsets) - 1
    off = offsets.tolist()
    wire = wires.tolist()
    for row in range(keys.shape[0]):
        krow = keys[row]
        for g in range(n_ops):
            start, end = off[g], off[g + 1]
            ok = True
            for a in range(start, end - 1):
                w = wire[a]
                if not (int(krow[w >> 6]) >> (w & 63)) & 1:
                    ok = False
                    break
            if ok:
                t = wire[end - 1]
                krow[t >> 6] ^= 1 << (t & 63)
