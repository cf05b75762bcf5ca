"""Weak-noise regularization: SDE ensembles and self-consistent velocities.

A particle kicked by small white noise no longer follows the admissible
velocity; it rides each smooth branch in proportion to the time the noise
lets it spend there, so its average drift is an occupancy-weighted mean of
branch velocities.  The deterministic counterpart is the self-consistent
velocity: a convex combination of branch velocities whose weights are
supported exactly on the branches active at that velocity.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .admissible import admissible_velocity, branch_values
from .errors import ConfigError
from .superdiff import limit_data


@dataclass(frozen=True)
class SdeEnsemble:
    epsilon: float
    rng_seed: int
    n_paths: int
    dt: float
    times: np.ndarray = field(repr=False)
    paths: np.ndarray = field(repr=False)
    branch_momenta: np.ndarray
    occupancy: np.ndarray
    occupancy_se: np.ndarray
    mean_velocity: float
    mean_velocity_se: float


@dataclass(frozen=True)
class SelfConsistentSolution:
    v_dagger: np.ndarray
    active_set: tuple
    shares: np.ndarray


def _drift_scan(ic, model, t, xs, radius, n_grid=4001):
    """Vectorized branch drift for a batch of 1D positions.

    Scans candidate endpoints on a shared grid, keeps each particle's
    minimizing branch, and sharpens smooth minima with one parabolic fit.
    """
    lo = float(xs.min()) - radius
    hi = float(xs.max()) + radius
    ys = np.linspace(lo, hi, n_grid)
    step = ys[1] - ys[0]
    base = np.asarray(ic(ys[:, None]), dtype=float)
    rel = (xs[:, None] - ys[None, :]) / t
    vals = base[None, :] + t * model.lagrangian(rel[..., None])
    idx = np.argmin(vals, axis=1)
    rows = np.arange(xs.size)
    im = np.maximum(idx - 1, 0)
    ip = np.minimum(idx + 1, n_grid - 1)
    f0, fm, fp = vals[rows, idx], vals[rows, im], vals[rows, ip]
    denom = fm - 2.0 * f0 + fp
    shift = np.where(
        denom > 1e-300, 0.5 * (fm - fp) / np.maximum(denom, 1e-300), 0.0
    )
    shift = np.clip(shift, -1.0, 1.0)
    y_best = ys[idx] + shift * step
    v = (xs - y_best) / t
    p = np.asarray(model.grad_lagrangian(v[:, None]), dtype=float).reshape(-1)
    return v, p


def simulate_sde(ic, model, epsilon, seed_point, horizon, dt=1e-3,
                 n_paths=400, rng_seed=0):
    """Euler-Maruyama ensemble riding the sharp solution's branch field."""
    if model.dim != 1 or ic.dim != 1:
        raise ConfigError("SDE simulation supports 1D fixtures")
    if dt > 1e-3 + 1e-15 or dt <= 0:
        raise ConfigError("step must lie in (0, 1e-3]")
    if epsilon < 0:
        raise ConfigError("noise amplitude must be nonnegative")
    if n_paths < 1:
        raise ConfigError("need at least one path")
    n_steps = int(round(horizon / dt))
    if n_steps < 2:
        raise ConfigError("horizon too short for the step")
    rng = np.random.default_rng(rng_seed)
    v_max = model.max_speed(ic.lipschitz)

    x = np.full(n_paths, float(np.atleast_1d(seed_point)[0]))
    times = dt * np.arange(n_steps + 1)
    paths = np.empty((n_steps + 1, n_paths))
    momenta = np.empty((n_steps + 1, n_paths))
    paths[0] = x
    sqdt = np.sqrt(dt)
    for k in range(1, n_steps + 1):
        t_eval = max(times[k - 1], dt)
        radius = t_eval * v_max + 1.0
        v, p = _drift_scan(ic, model, t_eval, x, radius)
        momenta[k - 1] = p
        x = x + dt * v + epsilon * sqdt * rng.standard_normal(n_paths)
        paths[k] = x
    momenta[n_steps] = momenta[n_steps - 1]

    # label each sample by the nearest branch of the terminal shock
    x_ref = float(np.median(paths[-1]))
    relax = 2.0 * max(ic.lipschitz, 1.0) * (3.0 * epsilon + 10.0 * dt * v_max)
    lms_ref = limit_data(
        ic, model, max(horizon, dt), np.array([x_ref]), value_tol=relax
    )
    ref = lms_ref.momenta[:, 0]
    labels = np.argmin(
        np.abs(momenta[..., None] - ref[None, None, :]), axis=-1
    )
    shares = np.stack(
        [(labels == j).mean(axis=0) for j in range(ref.size)], axis=-1
    )
    occupancy = shares.mean(axis=0)
    occupancy_se = shares.std(axis=0, ddof=1) / np.sqrt(n_paths) \
        if n_paths > 1 else np.zeros(ref.size)
    path_speed = (paths[-1] - paths[0]) / (times[-1] - times[0])
    return SdeEnsemble(
        epsilon=float(epsilon),
        rng_seed=int(rng_seed),
        n_paths=int(n_paths),
        dt=float(dt),
        times=times,
        paths=paths,
        branch_momenta=lms_ref.momenta.copy(),
        occupancy=occupancy,
        occupancy_se=occupancy_se,
        mean_velocity=float(path_speed.mean()),
        mean_velocity_se=float(
            path_speed.std(ddof=1) / np.sqrt(n_paths)
        ) if n_paths > 1 else 0.0,
    )


def self_consistent_velocity(lms, model, tol=1e-9):
    """All velocities that are occupancy-weighted means of their own
    active branches: v = sum over S of pi_j v_j with I(v) = S exactly."""
    if lms.k > 8:
        raise ConfigError("enumeration supports at most 8 branches")
    from itertools import combinations

    k = lms.k
    momenta, vels, energies = lms.momenta, lms.velocities, lms.energies
    scale = 1.0 + float(np.max(np.abs(energies))) + float(
        np.max(np.abs(momenta))
    )
    out = []
    for size in range(1, k + 1):
        for subset in combinations(range(k), size):
            sub = list(subset)
            vs = vels[sub]
            # ties of the active branches pin v; the normalized weights
            # must reproduce it as a convex combination
            rows = [np.ones(size)]
            rhs = [1.0]
            p0, h0 = momenta[sub[0]], energies[sub[0]]
            for j in sub[1:]:
                rows.append((momenta[j] - p0) @ vs.T)
                rhs.append(energies[j] - h0)
            mat = np.vstack(rows)
            vec = np.array(rhs)
            pi, residual, rank, _ = np.linalg.lstsq(mat, vec, rcond=None)
            if np.linalg.norm(mat @ pi - vec) > 1e-9 * scale:
                continue
            if np.min(pi) < -1e-10:
                continue
            pi = np.clip(pi, 0.0, None)
            total = pi.sum()
            if total <= 0:
                continue
            pi = pi / total
            v = pi @ vs
            vals = branch_values(lms, v)
            lead = vals.min()
            active = set(np.flatnonzero(vals <= lead + max(tol, 1e-9 * scale)))
            if active != set(sub):
                continue
            out.append(SelfConsistentSolution(
                v_dagger=v, active_set=tuple(sub), shares=pi,
            ))
    return out


@dataclass(frozen=True)
class RegularizationReport:
    v_star: np.ndarray
    anomaly: float
    candidates: tuple
    gaps: np.ndarray
    verdict: str
    occupancy: Optional[np.ndarray] = None
    occupancy_se: Optional[np.ndarray] = None
    mean_velocity: Optional[float] = None
    mean_velocity_se: Optional[float] = None
    sde_consistent: Optional[bool] = None


def compare_regularizations(lms, model, sde=None, tol=1e-6):
    """Cross-check the two regularizations at one shock configuration."""
    sol = admissible_velocity(lms, model)
    candidates = tuple(self_consistent_velocity(lms, model))
    gaps = np.array([
        float(np.linalg.norm(c.v_dagger - sol.v_star)) for c in candidates
    ])
    verdict = "coincide" if gaps.size and float(gaps.max()) <= tol \
        else "differ"
    report = dict(
        v_star=sol.v_star, anomaly=sol.anomaly, candidates=candidates,
        gaps=gaps, verdict=verdict,
    )
    if sde is not None:
        margin = 3.0 * sde.mean_velocity_se + 5e-3
        report.update(
            occupancy=sde.occupancy,
            occupancy_se=sde.occupancy_se,
            mean_velocity=sde.mean_velocity,
            mean_velocity_se=sde.mean_velocity_se,
            sde_consistent=bool(
                abs(sde.mean_velocity - float(sol.v_star[0])) <= margin
            ),
        )
    return RegularizationReport(**report)
