"""Catalog of initial conditions.

Every fixture is globally defined (closed form, periodic wrap, or clamped
table) so variational searches may look beyond the nominal domain box; the
reported Lipschitz constant bounds |grad phi0| over the region such searches
reach and feeds the search radius and CFL speed caps.

The shock-bearing profiles:

  neg-abs    -|y1| + tilt*y1        kink at y1 = 0, branch slopes
                                    1 + tilt and tilt - 1
  neg-power  -(4/3)|y1|^{3/2}       gradient vanishes at y1 = 0; under
                                    quadratic H a shock is born there at
                                    t = 0+ with momentum spread growing
                                    linearly in t
  sawtooth   periodic tilted -|x|   period 2pi, descending kink at 0,
                                    ascending kink at (1 + tilt)pi
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class InitialCondition:
    """phi0 with the metadata the solvers need.

    fn maps (..., dim) arrays to (...) values; box is (dim, 2); lipschitz
    bounds |grad phi0|; periodic fixtures admit a 2pi-periodic grid
    restriction for the viscous solver.
    """

    name: str
    dim: int
    fn: Callable = field(repr=False)
    lipschitz: float
    box: np.ndarray = field(repr=False)
    periodic: bool = False

    def __call__(self, y):
        arr = np.asarray(y, dtype=float)
        scalar = arr.ndim == 0
        if scalar:
            if self.dim != 1:
                raise ValueError("scalar argument for a multi-dimensional fixture")
            arr = arr.reshape(1)
        if arr.shape[-1] != self.dim:
            raise ValueError(
                f"last axis has size {arr.shape[-1]}, expected {self.dim}"
            )
        out = self.fn(arr)
        if scalar:
            return float(np.asarray(out).reshape(()))
        return out

    def grid_1d(self, n):
        """Periodic sample grid on [-pi, pi): nodes and values."""
        if self.dim != 1:
            raise ValueError("grid_1d needs a 1D fixture")
        h = 2.0 * np.pi / n
        xs = -np.pi + h * np.arange(n)
        return xs, self(xs[:, None])

    def grid_2d(self, n):
        if self.dim != 2:
            raise ValueError("grid_2d needs a 2D fixture")
        h = 2.0 * np.pi / n
        xs = -np.pi + h * np.arange(n)
        mesh = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1)
        return xs, self.fn(mesh)


def _box(dim, half=np.pi):
    return np.array([[-half, half]] * dim)


def zero(dim=1):
    return InitialCondition("zero", dim, lambda y: np.zeros(y.shape[:-1]), 0.0,
                            _box(dim))


def linear(slope):
    a = np.atleast_1d(np.asarray(slope, dtype=float))
    dim = a.size
    return InitialCondition(
        "linear", dim, lambda y: y @ a, float(np.linalg.norm(a)), _box(dim)
    )


def negative_abs(dim=1, tilt=0.0):
    """-|y1| + tilt*y1, constant across the remaining axes."""
    s = float(tilt)

    def fn(y):
        y1 = y[..., 0]
        return -np.abs(y1) + s * y1

    return InitialCondition("neg-abs", dim, fn, 1.0 + abs(s), _box(dim))


def negative_power(dim=1):
    """-(4/3)|y1|^{3/2}; |grad| = 2 sqrt|y1|, bounded over a doubled box."""

    def fn(y):
        y1 = y[..., 0]
        return -(4.0 / 3.0) * np.abs(y1) ** 1.5

    return InitialCondition(
        "neg-power", dim, fn, 2.0 * np.sqrt(2.0 * np.pi), _box(dim)
    )


def cosine(dim=1):
    return InitialCondition(
        "cosine",
        dim,
        lambda y: np.sum(np.cos(y), axis=-1),
        float(np.sqrt(dim)),
        _box(dim),
        periodic=True,
    )


def sawtooth(dim=1, tilt=0.0):
    """Periodic tilted -|x| in y1: slope 1+tilt left of the kink at 0,
    tilt-1 right of it, ascending kink at (1+tilt)pi (identified with
    -(1-tilt)pi).  Reduces to periodized -|y1| at tilt 0."""
    s = float(tilt)
    if not -0.5 < s < 0.5:
        raise ConfigError("sawtooth tilt must lie in (-0.5, 0.5)")
    lo = -(1.0 - s) * np.pi

    def fn(y):
        z = np.mod(y[..., 0] - lo, 2.0 * np.pi) + lo
        return np.where(z <= 0.0, (1.0 + s) * z, (s - 1.0) * z)

    return InitialCondition("sawtooth", dim, fn, 1.0 + abs(s), _box(dim),
                            periodic=True)


def piecewise_linear(breaks, values):
    """1D interpolant through (breaks, values), clamped outside."""
    xs = np.asarray(breaks, dtype=float)
    vs = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.size != vs.size or xs.size < 2:
        raise ConfigError("piecewise-linear fixture needs matching break/value lists")
    if not np.all(np.diff(xs) > 0):
        raise ConfigError("breaks must be strictly increasing")
    lip = float(np.max(np.abs(np.diff(vs) / np.diff(xs))))

    def fn(y):
        return np.interp(y[..., 0], xs, vs)

    return InitialCondition(
        "piecewise-linear", 1, fn,
        lip, np.array([[xs[0], xs[-1]]]),
    )


def tabulated(nodes, values, name="tabulated"):
    """Sampled phi0 on a regular 1D or 2D grid, clamped beyond the box.

    The Lipschitz bound is the largest axis difference quotient of the
    table, which bounds the interpolant's gradient as well.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        xs = np.asarray(nodes, dtype=float)
        lip = float(np.max(np.abs(np.diff(values) / np.diff(xs))))

        def fn(y):
            return np.interp(y[..., 0], xs, values)

        return InitialCondition(name, 1, fn, lip, np.array([[xs[0], xs[-1]]]))
    if values.ndim == 2:
        from scipy.interpolate import RegularGridInterpolator

        x0, x1 = (np.asarray(n, dtype=float) for n in nodes)
        interp = RegularGridInterpolator((x0, x1), values)
        q0 = np.max(np.abs(np.diff(values, axis=0) / np.diff(x0)[:, None]))
        q1 = np.max(np.abs(np.diff(values, axis=1) / np.diff(x1)[None, :]))
        lip = float(np.hypot(q0, q1))

        def fn(y):
            pts = np.stack(
                [
                    np.clip(y[..., 0], x0[0], x0[-1]),
                    np.clip(y[..., 1], x1[0], x1[-1]),
                ],
                axis=-1,
            )
            return interp(pts)

        box = np.array([[x0[0], x0[-1]], [x1[0], x1[-1]]])
        return InitialCondition(name, 2, fn, lip, box)
    raise ConfigError("tabulated fixture supports 1D and 2D values")


def make_fixture(name, dim=1, tilt=0.0, slope=None, exponent=None):
    """Build a catalog fixture by name, as referenced from experiment configs."""
    if name == "zero":
        return zero(dim)
    if name == "linear":
        if slope is None:
            raise ConfigError("linear fixture requires a slope")
        return linear(slope)
    if name == "neg-abs":
        return negative_abs(dim, tilt)
    if name == "neg-power":
        return negative_power(dim)
    if name == "cosine":
        return cosine(dim)
    if name == "sawtooth":
        return sawtooth(dim, tilt)
    raise ConfigError(f"unknown fixture {name!r}")
