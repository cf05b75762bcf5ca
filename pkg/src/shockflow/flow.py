"""Coalescing particle flow driven by the admissible velocity field.

Particles follow smooth characteristics until they hit a shock, then stay
trapped on it; trajectories that land on the same shock become identical.
Integration is explicit Euler with a projection that snaps on-shock
particles back onto the discontinuity, which a raw Euler step would drift
off.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _parallel
from .admissible import admissible_velocity
from .errors import NumericalFailure
from .superdiff import limit_data


@dataclass
class ParticleTrajectory:
    traj_id: int
    seed: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    on_shock: np.ndarray
    shock_entry: Optional[float] = None
    merged_into: Optional[int] = None

    @property
    def dim(self):
        return self.positions.shape[1]

    def position_at(self, t):
        idx = int(np.argmin(np.abs(self.times - t)))
        return self.positions[idx]


def forward_velocity(ic, model, t, x, value_tol=None, rng=None):
    """Admissible velocity of the flow at (t, x); t must be positive."""
    lms = limit_data(ic, model, t, x, value_tol=value_tol)
    return admissible_velocity(lms, model, rng=rng).v_star


def _diameter_pair(momenta):
    k = momenta.shape[0]
    best, pair = -1.0, (0, 0)
    for i in range(k):
        for j in range(i + 1, k):
            sep = float(np.linalg.norm(momenta[i] - momenta[j]))
            if sep > best:
                best, pair = sep, (i, j)
    return pair


def _snap_to_shock(ic, model, t, x, lms, radius):
    """Project x onto the nearby shock by bisecting the action gap.

    Each branch's action extends smoothly off the shock along its own
    straight characteristic; the shock is where the two extreme branches
    tie, and their gap is monotone along the momentum-jump direction.
    """
    i, j = _diameter_pair(lms.momenta)
    jump = lms.momenta[i] - lms.momenta[j]
    norm = float(np.linalg.norm(jump))
    if norm < 1e-12:
        return x
    e = jump / norm
    ends = [x - t * lms.velocities[i], x - t * lms.velocities[j]]
    vals = [ic(ends[0]), ic(ends[1])]

    def gap(s):
        probe = x + s * e
        a0 = vals[0] + t * float(model.lagrangian((probe - ends[0]) / t))
        a1 = vals[1] + t * float(model.lagrangian((probe - ends[1]) / t))
        return a0 - a1

    lo, hi = -radius, radius
    glo, ghi = gap(lo), gap(hi)
    if glo == 0.0:
        return x + lo * e
    if ghi == 0.0:
        return x + hi * e
    if np.sign(glo) == np.sign(ghi):
        return x
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        gm = gap(mid)
        if gm == 0.0:
            return x + mid * e
        if np.sign(gm) == np.sign(glo):
            lo, glo = mid, gm
        else:
            hi = mid
    return x + 0.5 * (lo + hi) * e


def _integrate_single(ic, model, seed, horizon, dt, v_max, traj_id):
    seed = np.atleast_1d(np.asarray(seed, dtype=float))
    n_steps = int(round(horizon / dt))
    # flag a shock once the particle is within about half a step's drift:
    # the branch action gap there is distance times the momentum jump, and
    # firing a full step early would snap the particle off its smooth leg
    relax = 1.0 * max(v_max, 1.0) * v_max * dt
    times = np.empty(n_steps + 1)
    positions = np.empty((n_steps + 1, seed.size))
    on_shock = np.zeros(n_steps + 1, dtype=bool)
    times[0], positions[0] = 0.0, seed
    shock_entry = None
    x = seed.copy()
    lms = None
    for k in range(1, n_steps + 1):
        t_prev = max((k - 1) * dt, dt)
        if lms is None:
            lms = limit_data(ic, model, t_prev, x, value_tol=relax)
        sol = admissible_velocity(lms, model)
        # endpoint-resolution noise divided by t can inflate momenta by
        # ~1e-5, so the defect guard needs matching slack
        speed = float(np.linalg.norm(sol.v_star))
        if speed > v_max * (1.0 + 1e-4) + 1e-8:
            raise NumericalFailure(
                f"forward velocity {speed:.6g} exceeds the bound {v_max:.6g}"
            )
        x = x + dt * sol.v_star
        t_new = max(k * dt, dt)
        lms = limit_data(ic, model, t_new, x, value_tol=relax)
        if lms.k >= 2:
            snapped = _snap_to_shock(
                ic, model, t_new, x, lms, radius=4.0 * dt * max(v_max, 1.0)
            )
            if not np.array_equal(snapped, x):
                x = snapped
                lms = limit_data(ic, model, t_new, x, value_tol=relax)
        times[k], positions[k] = k * dt, x
        on_shock[k] = lms.k >= 2
        if on_shock[k] and shock_entry is None:
            shock_entry = float(times[k])
    return ParticleTrajectory(
        traj_id=traj_id,
        seed=seed,
        times=times,
        positions=positions,
        on_shock=on_shock,
        shock_entry=shock_entry,
    )


def integrate_flow(ic, model, seeds, horizon, dt=1e-3, merge_tol=None,
                   workers=None):
    """Integrate one trajectory per seed and link coalesced pairs."""
    if dt <= 0:
        raise ValueError("step must be positive")
    if horizon <= dt:
        raise ValueError("horizon must exceed the step")
    seeds = [np.atleast_1d(np.asarray(s, dtype=float)) for s in seeds]
    v_max = model.max_speed(ic.lipschitz)

    def run(item):
        idx, seed = item
        return _integrate_single(ic, model, seed, horizon, dt, v_max, idx)

    trajectories = _parallel.map_workers(run, list(enumerate(seeds)), workers)
    if merge_tol is None:
        merge_tol = 2.0 * dt * max(v_max, 1.0)
    detect_coalescence(trajectories, merge_tol)
    return trajectories


def _first_persistent_close(a, b, tol):
    """Earliest sample index from which two paths stay within tol."""
    gaps = np.linalg.norm(a.positions - b.positions, axis=1)
    far = np.flatnonzero(gaps > tol)
    if gaps[-1] > tol:
        return None
    start = 0 if far.size == 0 else int(far[-1]) + 1
    if start >= gaps.size:
        return None
    return start


def detect_coalescence(trajectories, merge_tol):
    """Partition trajectories into merge classes and set merged_into links.

    Two trajectories belong to one class when their positions agree within
    merge_tol from some sample onward; classes are merged transitively.
    """
    n = len(trajectories)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _first_persistent_close(
                trajectories[i], trajectories[j], merge_tol
            ) is not None:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    classes = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    for root, members in classes.items():
        for i in members:
            trajectories[i].merged_into = None if i == root else root
    return [sorted(members) for _, members in sorted(classes.items())]


def shock_surplus_rate(ic, model, trajectory, k_start, k_end):
    """Measured growth rate of surplus action along a trajectory window.

    Compares the value transported along the path (initial value plus
    accumulated Lagrangian) with the value function at the endpoint; on a
    shock the difference grows at the anomaly rate.
    """
    from .hopf_lax import solve_value

    times = trajectory.times
    xs = trajectory.positions
    t0, t1 = times[k_start], times[k_end]
    if t0 <= 0:
        raise ValueError("window must start at a positive time")
    phi0 = solve_value(ic, model, t0, xs[k_start]).value
    phi1 = solve_value(ic, model, t1, xs[k_end]).value
    action = 0.0
    for k in range(k_start, k_end):
        h = times[k + 1] - times[k]
        v = (xs[k + 1] - xs[k]) / h
        action += h * float(model.lagrangian(v))
    return (phi0 + action - phi1) / (t1 - t0)
