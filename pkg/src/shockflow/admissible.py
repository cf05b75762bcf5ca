"""The admissible velocity of a shock point.

Among all velocities a particle trapped at a shock could take, exactly one
keeps its momentum representable by the branches it rides: the momentum
grad L(v) must lie in the convex hull of the momenta p_j of the branches
active in direction v.  That velocity is the unique global minimizer of the
surplus-action rate

    Lhat(v) = L(v) - min_i (p_i . v - H_i)
            = max_i [ L(v) + H_i - p_i . v ]
            = max_i BregmanDivergence(v, v_i),

a strictly convex coercive max-function, so the minimizer can be found and
certified.  Two solver routes:

  * quadratic and anisotropic-quadratic Hamiltonians: Lhat(v) becomes
    max_i |S(v - v_i)|^2 / 2 with S the inverse square root of A, so v* is
    the center of the smallest enclosing ball of the (transformed) branch
    velocities, computed exactly by recursive support-set search;

  * general convex Hamiltonians: Polyak subgradient descent to locate the
    basin, then a working-set polish that solves the smooth equality system
    on the detected active set with damped Newton steps, adding violated
    branches and dropping ones whose hull weight goes negative.

Either way the result is certified: the distance from grad L(v*) to the
hull of active momenta must not exceed the tolerance, with exhaustive
active-subset enumeration as a fallback before failing loudly.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CertificationFailure, NumericalFailure

ACTIVE_TOL = 1e-9
HULL_BOUNDARY_TOL = 1e-7
CERT_TOL = 1e-8


@dataclass(frozen=True)
class AdmissibleSolution:
    """Admissible velocity with its certificate.

    active_set indexes entries of the LimitMomentumSet; weights are the
    hull coefficients of p_star over the active momenta; anomaly is
    Lhat(v_star), the rate at which surplus action grows along the shock.
    """

    v_star: np.ndarray
    p_star: np.ndarray
    H_star: float
    active_set: tuple
    weights: np.ndarray
    anomaly: float
    hull_distance: float

    @property
    def dim(self):
        return self.v_star.size


@dataclass(frozen=True)
class AdmissibilityCheck:
    """Verdict of the hull-membership test at a probe velocity."""

    accepted: bool
    active_set: tuple
    weights: np.ndarray
    distance: float


def branch_values(lms, v):
    """p_i . v - H_i for every branch; the minimum selects active branches."""
    v = np.asarray(v, dtype=float)
    return lms.momenta @ v - lms.energies


def lhat(lms, model, v):
    """Surplus-action rate at velocity v (batched over leading axes)."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    vals = np.tensordot(v, lms.momenta, axes=([-1], [1])) - lms.energies
    out = model.lagrangian(v) - np.min(vals, axis=-1)
    if out.ndim == 0:
        return float(out)
    return out


def active_set(lms, model, v, tol=ACTIVE_TOL):
    """I(v): branches attaining min_i (p_i . v - H_i) within tol."""
    vals = branch_values(lms, np.asarray(v, dtype=float))
    return tuple(int(i) for i in np.flatnonzero(vals <= vals.min() + tol))


def effective_hamiltonian(lms, v, p):
    """H* = p . v - min_i (p_i . v - H_i)."""
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    return float(p @ v - branch_values(lms, v).min())


# --- simplex least-distance -------------------------------------------------


def simplex_least_distance(points, q):
    """min_{weights in simplex} |q - points^T weights|.

    Returns (weights, distance).  Solved exactly by enumerating support
    subsets: the optimal face of the simplex corresponds to some subset of
    the points, and on that face the problem is an equality-constrained
    least-squares system.  Exact for the small point counts used here.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(q, dtype=float)
    m = pts.shape[0]
    best = (None, np.inf)
    for size in range(1, m + 1):
        for sub in combinations(range(m), size):
            p_sub = pts[list(sub)]
            gram = 2.0 * (p_sub @ p_sub.T)
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = gram
            kkt[:size, size] = 1.0
            kkt[size, :size] = 1.0
            rhs = np.concatenate([2.0 * (p_sub @ q), [1.0]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            lam = sol[:size]
            if lam.min() < -1e-12:
                continue
            dist = np.linalg.norm(q - p_sub.T @ lam)
            if dist < best[1] - 1e-15:
                weights = np.zeros(m)
                weights[list(sub)] = np.clip(lam, 0.0, None)
                weights /= weights.sum()
                best = (weights, dist)
    if best[0] is None:
        raise NumericalFailure("simplex projection found no feasible support")
    return best


# --- smallest enclosing ball ------------------------------------------------


def _circumball(boundary):
    """Smallest ball with the given affinely independent points on its
    boundary (their circumball within the affine hull)."""
    r = boundary
    if len(r) == 0:
        return np.zeros(0), -1.0
    base = r[0]
    if len(r) == 1:
        return base.copy(), 0.0
    rel = np.array([p - base for p in r[1:]])
    gram = 2.0 * rel @ rel.T
    rhs = np.sum(rel * rel, axis=1)
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    center = base + coef @ rel
    radius = float(np.linalg.norm(center - base))
    return center, radius


def _welzl(points, boundary, idx):
    if idx == 0 or len(boundary) == points.shape[1] + 1:
        c, r = _circumball(boundary)
        if c.size == 0:
            c = points[0] * 0.0 if points.size else np.zeros(0)
        return c, r
    p = points[idx - 1]
    c, r = _welzl(points, boundary, idx - 1)
    if np.linalg.norm(p - c) <= r + 1e-12:
        return c, r
    return _welzl(points, boundary + [p], idx - 1)


def min_enclosing_ball(points):
    """Exact smallest enclosing ball (center, radius) of up to ~8 points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("need at least one point")
    # dedupe: repeated points break the boundary-set recursion
    uniq = [pts[0]]
    for p in pts[1:]:
        if all(np.linalg.norm(p - u) > 1e-13 for u in uniq):
            uniq.append(p)
    pts = np.array(uniq)
    center, radius = _welzl(pts, [], pts.shape[0])
    worst = np.max(np.linalg.norm(pts - center, axis=1))
    if worst > radius + 1e-9:
        # degenerate recursion path; fall back to support-subset enumeration
        d = pts.shape[1]
        best = (None, np.inf)
        for size in range(1, min(d + 1, pts.shape[0]) + 1):
            for sub in combinations(range(pts.shape[0]), size):
                c, r = _circumball([pts[i] for i in sub])
                if np.max(np.linalg.norm(pts - c, axis=1)) <= r + 1e-9 and r < best[1]:
                    best = (c, r)
        center, radius = best
    return center, float(max(radius, np.max(np.linalg.norm(pts - center, axis=1))))


# --- general solver ---------------------------------------------------------


def _subgradient_descent(lms, model, v0, iters=200):
    """Polyak steps with a shrinking optimum estimate; returns best iterate."""
    v = np.asarray(v0, dtype=float).copy()
    f = lhat(lms, model, v)
    best_v, best_f = v.copy(), f
    delta = 0.1 * (1.0 + abs(f))
    for it in range(iters):
        vals = branch_values(lms, v)
        j = int(np.argmin(vals))
        g = np.atleast_1d(model.grad_lagrangian(v)) - lms.momenta[j]
        gn2 = float(g @ g)
        if gn2 < 1e-28:
            break
        target = best_f - delta
        step = (f - target) / gn2
        v = v - step * g
        f = lhat(lms, model, v)
        if f < best_f:
            best_v, best_f = v.copy(), f
        if (it + 1) % 40 == 0:
            delta *= 0.5
    return best_v


def _equality_solve(lms, model, subset, v_init):
    """Minimize the subset's common branch value subject to all branches in
    the subset staying tied: affine constraints plus damped Newton in the
    nullspace.  Returns v or None when the tie system is inconsistent."""
    d = lms.dim
    s0 = subset[0]
    p0 = lms.momenta[s0]
    h0 = lms.energies[s0]
    rows = lms.momenta[list(subset[1:])] - p0
    rhs = lms.energies[list(subset[1:])] - h0

    def objective(v):
        return model.lagrangian(v) + h0 - p0 @ v

    if rows.size == 0:
        return np.atleast_1d(model.grad_hamiltonian(p0)).astype(float)
    v_part, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    scale = 1.0 + np.abs(rhs).max() + np.abs(rows).max()
    if np.abs(rows @ v_part - rhs).max() > 1e-9 * scale:
        return None
    _, s, vt = np.linalg.svd(rows)
    rank = int(np.sum(s > 1e-12 * max(1.0, s.max() if s.size else 0.0)))
    null = vt[rank:].T  # (d, r)
    if null.shape[1] == 0:
        return v_part
    uu = null.T @ (np.asarray(v_init, dtype=float) - v_part)
    v = v_part + null @ uu
    fv = objective(v)
    # candidate at the Legendre-degenerate origin: for power-law kinds the
    # reduced objective can kink there and Newton alone oscillates around it
    if model.kind == "power-law":
        u0 = -null.T @ v_part
        v0 = v_part + null @ u0
        f0 = objective(v0)
        if f0 < fv:
            uu, v, fv = u0, v0, f0
    def proj_grad(vv):
        return null.T @ (np.atleast_1d(model.grad_lagrangian(vv)) - p0)

    for _ in range(60):
        grad = proj_grad(v)
        gn = np.linalg.norm(grad)
        if gn <= 1e-13 * (1.0 + np.linalg.norm(p0)):
            break
        try:
            hess = null.T @ model.hessian_lagrangian(v) @ null
            du = -np.linalg.solve(hess, grad)
        except (NumericalFailure, np.linalg.LinAlgError):
            du = -grad
        # near the minimum the objective can no longer resolve gains
        # (sqrt-eps floor), so accept a full Newton step whenever it
        # contracts the projected gradient
        u_full = uu + du
        v_full = v_part + null @ u_full
        if np.linalg.norm(proj_grad(v_full)) < 0.5 * gn:
            uu, v, fv = u_full, v_full, objective(v_full)
            continue
        stepped = False
        scale_step = 1.0
        for _ in range(50):
            u_try = uu + scale_step * du
            v_try = v_part + null @ u_try
            f_try = objective(v_try)
            if f_try < fv - 1e-18:
                uu, v, fv = u_try, v_try, f_try
                stepped = True
                break
            scale_step *= 0.5
        if not stepped:
            break
    return v


def _certify(lms, model, v, tol, wide_tol):
    p = np.atleast_1d(model.grad_lagrangian(np.asarray(v, dtype=float)))
    act = active_set(lms, model, v, wide_tol)
    weights, dist = simplex_least_distance(lms.momenta[list(act)], p)
    return p, act, weights, dist


def _solve_general(lms, model, tol, rng=None, subgradient_iters=200):
    k = lms.k
    starts = [lms.velocities[i] for i in range(k)]
    starts.append(lms.velocities.mean(axis=0))
    if rng is not None:
        w = rng.dirichlet(np.ones(k))
        starts.append(w @ lms.velocities + 0.01 * rng.normal(size=lms.dim))
        starts = starts[::-1]
    v = min(starts, key=lambda s: lhat(lms, model, s))
    v = _subgradient_descent(lms, model, v, iters=subgradient_iters)

    wide = max(1e-7, 1e-7 * abs(lhat(lms, model, v)))
    subset = list(active_set(lms, model, v, wide))
    best = (np.inf, None)
    for _ in range(3 * k + 4):
        cand = _equality_solve(lms, model, tuple(subset), v)
        changed = False
        if cand is not None:
            f_cand = lhat(lms, model, cand)
            if f_cand < best[0]:
                best = (f_cand, cand)
            vals = branch_values(lms, cand)
            tied = vals[subset].min()
            # branches strictly below the tie level beat the subset: add them
            missing = [
                int(i)
                for i in np.flatnonzero(vals < tied - 1e-11 * (1.0 + abs(tied)))
                if i not in subset
            ]
            if missing:
                subset.append(missing[0])
                v = cand
                changed = True
            else:
                p = np.atleast_1d(model.grad_lagrangian(cand))
                weights, dist = simplex_least_distance(lms.momenta[subset], p)
                if dist <= tol:
                    return cand
                if len(subset) > 1:
                    drop = int(np.argmin(weights))
                    subset.pop(drop)
                    v = cand
                    changed = True
        else:
            # inconsistent tie system: shed the branch worst aligned with it
            vals = branch_values(lms, v)
            drop = int(np.argmax(vals[subset]))
            subset.pop(drop)
            changed = True
        if not subset:
            subset = list(active_set(lms, model, v, wide))
        if not changed:
            break
    return best[1] if best[1] is not None else v


def _enumerate_exact(lms, model, tol):
    """Try every active-subset hypothesis; exact but exponential in k."""
    k = lms.k
    best = (np.inf, None)
    for size in range(1, k + 1):
        for sub in combinations(range(k), size):
            v = _equality_solve(lms, model, sub, lms.velocities.mean(axis=0))
            if v is None:
                continue
            vals = branch_values(lms, v)
            tied = vals[list(sub)].min()
            if np.any(vals < tied - 1e-9 * (1.0 + abs(tied))):
                continue  # some branch undercuts the hypothesized tie
            p = np.atleast_1d(model.grad_lagrangian(v))
            _, dist = simplex_least_distance(lms.momenta[list(sub)], p)
            if dist <= 10.0 * tol:
                f = lhat(lms, model, v)
                if f < best[0]:
                    best = (f, v)
    return best[1]


def admissible_velocity(lms, model, tol=CERT_TOL, method="auto", rng=None):
    """Solve for the admissible velocity and certify it.

    method: "auto" picks the exact ball reduction for (anisotropic-)
    quadratic models and the iterative solver otherwise; "ball" and
    "iterative" force a route (ball requires a quadratic-family model).
    """
    if lms.k == 1:
        v = lms.velocities[0].copy()
        p = lms.momenta[0].copy()
        return AdmissibleSolution(
            v_star=v,
            p_star=p,
            H_star=float(lms.energies[0]),
            active_set=(0,),
            weights=np.array([1.0]),
            anomaly=0.0,
            hull_distance=0.0,
        )

    quadratic_family = model.kind in ("quadratic", "anisotropic-quadratic")
    if method == "ball" and not quadratic_family:
        raise ValueError("ball reduction requires a quadratic-family model")
    use_ball = method == "ball" or (method == "auto" and quadratic_family)

    if use_ball:
        if model.kind == "quadratic":
            center, _ = min_enclosing_ball(lms.velocities)
            v = center
        else:
            evals, evecs = np.linalg.eigh(model.matrix)
            s_inv_half = evecs @ np.diag(evals**-0.5) @ evecs.T
            s_half = evecs @ np.diag(evals**0.5) @ evecs.T
            center, _ = min_enclosing_ball(lms.velocities @ s_inv_half.T)
            v = s_half @ center
    else:
        v = _solve_general(lms, model, tol, rng=rng)

    wide = ACTIVE_TOL
    p, act, weights, dist = _certify(lms, model, v, tol, wide)
    if dist > tol:
        retry = _enumerate_exact(lms, model, tol)
        if retry is not None:
            v2 = retry
            p2, act2, weights2, dist2 = _certify(lms, model, v2, tol, wide)
            if dist2 < dist:
                v, p, act, weights, dist = v2, p2, act2, weights2, dist2
    if dist > tol:
        raise CertificationFailure(
            f"admissible velocity certification failed (hull distance {dist:.3e})",
            best_point=v,
            hull_distance=dist,
        )
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return AdmissibleSolution(
        v_star=v,
        p_star=p,
        H_star=effective_hamiltonian(lms, v, p),
        active_set=act,
        weights=weights,
        anomaly=lhat(lms, model, v),
        hull_distance=float(dist),
    )


def check_admissibility(lms, model, v, tol=CERT_TOL, tie_tol=ACTIVE_TOL):
    """Hull-membership verdict for a probe velocity (not a failure path)."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    p = np.atleast_1d(model.grad_lagrangian(v))
    act = active_set(lms, model, v, tie_tol)
    weights, dist = simplex_least_distance(lms.momenta[list(act)], p)
    return AdmissibilityCheck(
        accepted=bool(dist <= tol),
        active_set=act,
        weights=weights,
        distance=float(dist),
    )


# --- classification ---------------------------------------------------------


def _hull_boundary_distance(points, q):
    """Distance from an interior point q to the boundary of conv(points),
    measured inside the hull's affine hull."""
    pts = np.atleast_2d(points)
    mean = pts.mean(axis=0)
    rel = pts - mean
    _, s, vt = np.linalg.svd(rel, full_matrices=False)
    scale = max(1.0, s.max() if s.size else 1.0)
    rank = int(np.sum(s > 1e-10 * scale))
    if rank == 0:
        return 0.0
    basis = vt[:rank]
    coords = rel @ basis.T
    qc = (np.asarray(q, dtype=float) - mean) @ basis.T
    if rank == 1:
        lo, hi = coords[:, 0].min(), coords[:, 0].max()
        return float(min(qc[0] - lo, hi - qc[0]))
    from scipy.spatial import ConvexHull, QhullError

    try:
        hull = ConvexHull(coords)
    except QhullError:
        hull = ConvexHull(coords, qhull_options="QJ")
    eqs = hull.equations
    dists = -(eqs[:, :-1] @ qc + eqs[:, -1])
    return float(dists.min())


def classify_shock(lms, model, solution, tol=HULL_BOUNDARY_TOL):
    """restraining / nonrestraining / not-a-shock verdict.

    Restraining means p* sits strictly inside the momentum hull, so the
    hull constraint can hold the particle at every nearby direction; on the
    relative boundary the shock cannot restrain it.
    """
    if lms.k == 1:
        return "not-a-shock"
    dist = _hull_boundary_distance(lms.momenta, solution.p_star)
    return "restraining" if dist > tol else "nonrestraining"
