"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``ALTUNITARY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
alternate = _kernels_py.alternate

if os.environ.get("ALTUNITARY_PURE_PYTHON") != "1":
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        alternate = _kernels.alternate


def get_kernel(backend: str | None = None):
    """Return the alternating kernel for ``backend`` ('cython', 'python' or the active one)."""
    if backend is None:
        return alternate
    if backend == "python":
        return _kernels_py.alternate
    if backend == "cython":
        from . import _kernels

        return _kernels.alternate
    raise ValueError(f"unknown kernel backend {backend!r}")
