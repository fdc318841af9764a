"""Ball-mass kernels, compiled when available.

The compiled module is used if it imports; setting ``ASSOUAD_LP_PURE_PYTHON=1``
forces the numpy fallback. ``BACKEND`` names the active implementation.
"""
import os

from . import _kernels_py

_py_segment = _kernels_py.segment_log_ball
_py_block = _kernels_py.block_log_ball

try:
    if os.environ.get("ASSOUAD_LP_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"


def segment_log_ball(xs, r, arrays, backend=None, offset=None):
    """Log ball mass for the segment table ``arrays`` (see ``PiecewisePowerDensity``)."""
    impl = _select(backend)
    fn = _compiled.segment_log_ball if impl == "cython" else _py_segment
    return fn(xs, float(r), *arrays, offset=offset)


def block_log_ball(xs, r, arrays, backend=None, offset=None):
    """Log ball mass for the block table ``arrays`` (see ``DyadicBlockMeasure``)."""
    impl = _select(backend)
    if impl == "cython":
        return _compiled.block_log_ball(xs, float(r), *arrays, offset=offset)
    return _py_block(xs, float(r), *arrays[:-2], offset=offset)


def available_backends():
    return ("numpy", "cython") if _compiled is not None else ("numpy",)


def _select(backend):
    if backend is None:
        return BACKEND
    if backend not in available_backends():
        raise ValueError(f"kernel backend {backend!r} is not available")
    return backend
