"""Backend selection for the hot kernels.

The compiled Cython extension is used when it was built; otherwise the
pure-Python twin is used. Set ``ECSBELL_BACKEND=python`` to force the
fallback.
"""
import os

from ecsbell import _pykernels

__all__ = [
    "BACKEND",
    "displacement_matrix",
    "bw_correlation",
    "bw_signal",
    "rk4_dispersive",
    "available_backends",
    "get_backend",
]


def _load_compiled():
    try:
        from ecsbell import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()

if _compiled is not None and os.environ.get("ECSBELL_BACKEND", "").lower() != "python":
    _impl = _compiled
    BACKEND = "compiled"
else:
    _impl = _pykernels
    BACKEND = "python"

displacement_matrix = _impl.displacement_matrix
bw_correlation = _impl.bw_correlation
bw_signal = _impl.bw_signal
rk4_dispersive = _impl.rk4_dispersive


def available_backends():
    """Names of the kernel backends importable in this environment."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get_backend(name):
    """Return the kernel module for ``name`` ('compiled' or 'python')."""
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels were not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
