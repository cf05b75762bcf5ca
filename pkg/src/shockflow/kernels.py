"""Backend selection for the grid stepping kernels.

The compiled extension is preferred when importable; the numpy fallback
runs the same scheme with the same params layout and agrees to the last
few ulp (bit-equal for the polynomial kinds), only slower.
Set SHOCKFLOW_FORCE_PYKERNELS=1 to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("SHOCKFLOW_FORCE_PYKERNELS", "") == "1":
    _impl = _pykernels
    BACKEND = "numpy"
else:
    try:
        from . import _cykernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "numpy"

KIND_CODES = {
    "quadratic": 0,
    "anisotropic-quadratic": 1,
    "power-law": 2,
    "cosh-sum": 3,
}

step_chunk_1d = _impl.step_chunk_1d
step_chunk_2d = _impl.step_chunk_2d


def kernel_args(model):
    """(kind code, params array) for a HamiltonianModel, as the kernels expect."""
    code = KIND_CODES[model.kind]
    if model.kind == "anisotropic-quadratic":
        a = model.matrix
        if model.dim == 1:
            params = np.array([a[0, 0]])
        elif model.dim == 2:
            params = np.array([a[0, 0], a[0, 1], a[1, 1]])
        else:
            raise ValueError("grid kernels support 1D and 2D only")
    elif model.kind == "power-law":
        params = np.array([model.exponent])
    else:
        params = np.zeros(0)
    return code, params
