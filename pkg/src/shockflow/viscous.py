"""Parabolic regularization on a periodic grid and its dissipative anomaly.

The sharp value function is the small-viscosity limit of these fields; the
interesting measurement is what refuses to vanish in that limit: along a
shock trajectory the diffusion term tends to a negative constant whose
magnitude is the surplus-action rate of the admissible velocity.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import ConfigError, NumericalFailure
from .flow import ParticleTrajectory

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GridField:
    """One time slice of the regularized solution on [-pi, pi)^d."""

    dim: int
    n: int
    h: float
    mu: float
    time: float
    values: np.ndarray = field(repr=False)

    def nodes(self):
        return -np.pi + self.h * np.arange(self.n)

    def gradient(self):
        """Centered periodic gradient; shape (n,) in 1D, (n, n, 2) in 2D."""
        v = self.values
        if self.dim == 1:
            return (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * self.h)
        gx = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2.0 * self.h)
        gy = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2.0 * self.h)
        return np.stack([gx, gy], axis=-1)

    def laplacian(self):
        v = self.values
        out = np.zeros_like(v)
        for axis in range(self.dim):
            out += (
                np.roll(v, -1, axis=axis) - 2.0 * v + np.roll(v, 1, axis=axis)
            ) / self.h**2
        return out

    def _locate(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s = (x + np.pi) / self.h
        i0 = np.floor(s).astype(int)
        frac = s - i0
        return i0 % self.n, frac

    def interp(self, array, x):
        """Multilinear periodic interpolation of a node array at position x."""
        i0, f = self._locate(x)
        if self.dim == 1:
            a, b = array[i0[0]], array[(i0[0] + 1) % self.n]
            return a + f[0] * (b - a)
        i1 = (i0 + 1) % self.n
        v00 = array[i0[0], i0[1]]
        v10 = array[i1[0], i0[1]]
        v01 = array[i0[0], i1[1]]
        v11 = array[i1[0], i1[1]]
        top = v00 + f[0] * (v10 - v00)
        bot = v01 + f[0] * (v11 - v01)
        return top + f[1] * (bot - top)

    def value_at(self, x):
        return float(self.interp(self.values, x))

    def gradient_at(self, x):
        g = self.gradient()
        if self.dim == 1:
            return np.array([float(self.interp(g, x))])
        return np.array([
            float(self.interp(g[..., 0], x)),
            float(self.interp(g[..., 1], x)),
        ])

    def laplacian_at(self, x):
        return float(self.interp(self.laplacian(), x))


def _wrap(x):
    return np.mod(x + np.pi, TWO_PI) - np.pi


def stable_step(model, ic, mu, n):
    """Largest step the explicit scheme tolerates, with a safety factor."""
    h = TWO_PI / n
    d = model.dim
    v_max = max(model.max_speed(ic.lipschitz), 1e-12)
    return 0.25 * min(h * h / (2.0 * d * mu), h / v_max)


def solve_viscous(ic, model, mu, horizon, n, dt=None, sample_dt=None):
    """March the regularized equation; returns GridField snapshots.

    Snapshots land exactly on multiples of sample_dt (default horizon/8),
    starting with the initial slice at t=0.
    """
    if mu <= 0:
        raise ConfigError("mu must be positive")
    if horizon <= 0:
        raise ConfigError("horizon must be positive")
    if model.dim != ic.dim:
        raise ConfigError("model and fixture dimensions differ")
    if model.dim not in (1, 2):
        raise ConfigError("grid solver supports 1D and 2D")
    if not ic.periodic:
        raise ConfigError(
            f"fixture {ic.name!r} is not periodic; use a periodized variant"
        )
    if n < 8:
        raise ConfigError("grid too coarse")
    h = TWO_PI / n
    dt_max = stable_step(model, ic, mu, n)
    if dt is not None and dt > dt_max * (1.0 + 1e-12):
        raise ConfigError(
            f"step {dt:.3e} violates the stability bound {dt_max:.3e}"
        )
    if sample_dt is None:
        sample_dt = horizon / 8.0
    n_samples = int(round(horizon / sample_dt))
    if n_samples < 1 or abs(n_samples * sample_dt - horizon) > 1e-9 * horizon:
        raise ConfigError("horizon must be a multiple of sample_dt")
    base = dt if dt is not None else dt_max
    substeps = max(1, int(np.ceil(sample_dt / base - 1e-12)))
    dt_eff = sample_dt / substeps

    if model.dim == 1:
        _, values = ic.grid_1d(n)
        stepper = kernels.step_chunk_1d
    else:
        _, values = ic.grid_2d(n)
        stepper = kernels.step_chunk_2d
    values = np.asarray(values, dtype=float)
    code, params = kernels.kernel_args(model)

    fields = [GridField(model.dim, n, h, mu, 0.0, values.copy())]
    for k in range(1, n_samples + 1):
        values = stepper(values, substeps, h, dt_eff, mu, code, params)
        if not np.all(np.isfinite(values)):
            raise NumericalFailure(
                f"non-finite field value after step {k * substeps}"
            )
        fields.append(GridField(model.dim, n, h, mu, k * sample_dt, values))
    return fields


def integrate_regularized_flow(fields, model, seed, dt=None):
    """Euler particle stepping through a stored snapshot series."""
    if len(fields) < 2:
        raise ConfigError("need at least two snapshots")
    times = np.array([f.time for f in fields])
    if np.any(np.diff(times) <= 0):
        raise ConfigError("snapshots must be strictly time-ordered")
    if dt is not None and dt < times[1] - times[0] - 1e-12:
        raise ConfigError("sub-snapshot stepping is not supported")
    x = np.atleast_1d(np.asarray(seed, dtype=float))
    positions = np.empty((len(fields), x.size))
    positions[0] = x
    for k in range(len(fields) - 1):
        g = fields[k].gradient_at(x)
        v = np.atleast_1d(model.grad_hamiltonian(g))
        x = _wrap(x + (times[k + 1] - times[k]) * v)
        positions[k + 1] = x
    return ParticleTrajectory(
        traj_id=0,
        seed=positions[0].copy(),
        times=times,
        positions=positions,
        on_shock=np.zeros(len(fields), dtype=bool),
    )


def anomaly_along(fields, model, trajectory, method="laplacian"):
    """Diffusion-term series along a trajectory, one entry per snapshot.

    method "laplacian" interpolates mu times the discrete Laplacian;
    method "balance" measures the same quantity as the residual
    d(phi)/dt + H(grad phi), which must agree within truncation error.
    """
    times = np.array([f.time for f in fields])
    out = np.empty(len(fields))
    if method == "laplacian":
        for k, f in enumerate(fields):
            x = trajectory.position_at(times[k])
            out[k] = f.mu * f.laplacian_at(x)
        return out
    if method != "balance":
        raise ConfigError(f"unknown anomaly method {method!r}")
    for k, f in enumerate(fields):
        x = trajectory.position_at(times[k])
        lo, hi = max(k - 1, 0), min(k + 1, len(fields) - 1)
        dphi = fields[hi].value_at(x) - fields[lo].value_at(x)
        rate = dphi / (times[hi] - times[lo])
        out[k] = rate + float(model.hamiltonian(f.gradient_at(x)))
    return out


def anomaly_plateau(fields, model, trajectory, settle=0.5):
    """Mean anomaly over the settled tail of the series."""
    times = np.array([f.time for f in fields])
    series = anomaly_along(fields, model, trajectory)
    mask = times >= settle * times[-1]
    return float(np.mean(series[mask]))


def gradient_limit_check(fields_by_mu, lms, position=None):
    """Hull distance of the measured gradient at a shock point, per field.

    As the viscosity shrinks, the measured gradient must approach the
    momentum hull of the sharp solution's branches.
    """
    from .admissible import simplex_least_distance

    if position is None:
        position = lms.x
    out = []
    for f in fields_by_mu:
        g = f.gradient_at(position)
        _, dist = simplex_least_distance(lms.momenta, g)
        out.append(float(dist))
    return out
