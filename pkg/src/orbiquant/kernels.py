"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting the environment
variable ``ORBIQUANT_PURE_PYTHON=1`` forces the NumPy fallback.
"""
import os

from . import _kernels_py

if os.environ.get("ORBIQUANT_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

assemble_quantized = _impl.assemble_quantized
transport_rk4 = _impl.transport_rk4


def available_backends():
    """Mapping of backend name to kernel module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
