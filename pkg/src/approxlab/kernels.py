"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Set ``APPROXLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("APPROXLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

cumulative_sum = _impl.cumulative_sum
jacobi_sweeps = _impl.jacobi_sweeps
lipschitz_envelopes = _impl.lipschitz_envelopes
pair_barrier = _impl.pair_barrier

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "cumulative_sum",
    "jacobi_sweeps",
    "lipschitz_envelopes",
    "pair_barrier",
]
