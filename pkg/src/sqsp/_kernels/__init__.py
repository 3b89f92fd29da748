"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``SQSP_PURE=1`` to force the fallback (used by the kernel benchmark and
for debugging).
"""
import os

if os.environ.get("SQSP_PURE"):
    from ._pure import apply_xtype_tape

    BACKEND = "pure"
else:
    try:
        from ._speedups import apply_xtype_tape

        BACKEND = "compiled"
    except ImportError:  # extension not built
        from ._pure import apply_xtype_tape

        BACKEND = "pure"

__all__ = ["apply_xtype_tape", "BACKEND"]
