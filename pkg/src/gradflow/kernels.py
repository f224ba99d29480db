"""Backend selection for the per-step assembly kernel.

Prefers the compiled extension; the pure-numpy twin is used when the build
is unavailable or when GRADFLOW_PURE_PYTHON is set to a truthy value.
`interface_fluxes` is always the numpy version (not on the hot path).
"""

from __future__ import annotations

import os

from . import _kernels_py
from ._kernels_py import (BC_DIRICHLET, BC_PERIODIC, BC_ZERO_FLUX,
                          interface_fluxes)

_force_python = os.environ.get("GRADFLOW_PURE_PYTHON", "").lower() in (
    "1", "true", "yes", "on")

if _force_python:
    _impl = _kernels_py
    backend = "python"
else:
    try:
        from . import _core as _impl
        backend = "cython"
    except ImportError:
        _impl = _kernels_py
        backend = "python"

assemble_rhs = _impl.assemble_rhs

__all__ = ["assemble_rhs", "interface_fluxes", "backend",
           "BC_ZERO_FLUX", "BC_DIRICHLET", "BC_PERIODIC"]
