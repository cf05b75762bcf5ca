import numpy as np
import pytest

from shockflow import kernels
from shockflow import _pykernels
from shockflow.legendre import HamiltonianModel

MODELS_1D = [
    HamiltonianModel.quadratic(1),
    HamiltonianModel.anisotropic([[1.7]]),
    HamiltonianModel.power_law(4.0, 1),
    HamiltonianModel.power_law(1.5, 1),
    HamiltonianModel.cosh_sum(1),
]
MODELS_2D = [
    HamiltonianModel.quadratic(2),
    HamiltonianModel.anisotropic([[2.0, 0.5], [0.5, 1.0]]),
    HamiltonianModel.power_law(4.0, 2),
    HamiltonianModel.cosh_sum(2),
]

needs_compiled = pytest.mark.skipif(
    kernels.BACKEND != "compiled", reason="compiled backend unavailable"
)


def test_kind_codes_cover_catalog():
    for model in MODELS_1D + MODELS_2D:
        code, params = kernels.kernel_args(model)
        assert code == kernels.KIND_CODES[model.kind]
        assert params.ndim == 1


def test_anisotropic_3d_rejected():
    model = HamiltonianModel.anisotropic(np.eye(3) * 1.5)
    with pytest.raises(ValueError):
        kernels.kernel_args(model)


@needs_compiled
def test_backends_agree_1d():
    from shockflow import _cykernels

    xs = np.linspace(0, 2 * np.pi, 96, endpoint=False)
    phi = 0.4 * np.sin(xs) + 0.15 * np.cos(3 * xs)
    for model in MODELS_1D:
        code, params = kernels.kernel_args(model)
        a = _cykernels.step_chunk_1d(phi, 40, 0.1, 5e-4, 0.02, code, params)
        b = _pykernels.step_chunk_1d(phi, 40, 0.1, 5e-4, 0.02, code, params)
        assert np.all(np.isfinite(a))
        assert np.max(np.abs(a - b)) <= 1e-12


@needs_compiled
def test_backends_agree_2d():
    from shockflow import _cykernels

    xs = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    phi = 0.4 * np.sin(xs)[:, None] + 0.25 * np.cos(xs)[None, :]
    for model in MODELS_2D:
        code, params = kernels.kernel_args(model)
        a = _cykernels.step_chunk_2d(phi, 25, 0.15, 5e-4, 0.02, code, params)
        b = _pykernels.step_chunk_2d(phi, 25, 0.15, 5e-4, 0.02, code, params)
        assert np.all(np.isfinite(a))
        assert np.max(np.abs(a - b)) <= 1e-12


def test_chunk_does_not_mutate_input():
    phi = np.sin(np.linspace(0, 2 * np.pi, 64, endpoint=False))
    keep = phi.copy()
    kernels.step_chunk_1d(phi, 12, 0.1, 1e-4, 0.01, 0, np.zeros(0))
    assert np.array_equal(phi, keep)
