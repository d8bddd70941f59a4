"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``EQBELL_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("EQBELL_PURE_PYTHON"):
    from eqbell import _kernels_py as _impl
else:
    try:
        from eqbell import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        from eqbell import _kernels_py as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION
rgs_labelings = _impl.rgs_labelings
pattern_matrix = _impl.pattern_matrix
dd_adjacent_pairs = _impl.dd_adjacent_pairs
