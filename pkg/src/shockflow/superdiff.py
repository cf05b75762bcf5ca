"""Superdifferential data at a point: limit momenta, energies, velocities.

Where several minimizing endpoints y_i reach (t, x), each carries a straight
line with velocity v_i = (x - y_i)/t, momentum p_i = grad L(v_i) and energy
H_i = H(p_i).  The pairs (-H_i, p_i) are the vertices of the convex polytope
of supergradients at (t, x); two or more distinct momenta mean the point
lies on a shock.
"""

from dataclasses import dataclass

import numpy as np

from . import hopf_lax

MOMENTUM_TOL = 1e-3


@dataclass(frozen=True)
class LimitMomentumSet:
    """Vertices of the superdifferential at one point.

    momenta: (k, d); energies: (k,); velocities: (k, d), with
    v_i = grad H(p_i) by construction.
    """

    t: float
    x: np.ndarray
    momenta: np.ndarray
    energies: np.ndarray
    velocities: np.ndarray

    @property
    def k(self):
        return self.momenta.shape[0]

    @property
    def dim(self):
        return self.momenta.shape[1]

    @classmethod
    def from_momenta(cls, model, momenta, t=0.0, x=None):
        """Synthetic set built directly from momentum vectors."""
        p = np.atleast_2d(np.asarray(momenta, dtype=float))
        if x is None:
            x = np.zeros(p.shape[1])
        return cls(
            t=float(t),
            x=np.asarray(x, dtype=float),
            momenta=p,
            energies=np.atleast_1d(model.hamiltonian(p)),
            velocities=np.atleast_2d(model.grad_hamiltonian(p)),
        )


def _dedupe_momenta(momenta, tol):
    """Greedy clustering; returns representative indices, lexicographic order."""
    order = np.lexsort(momenta.T[::-1])
    reps = []
    for i in order:
        if all(np.linalg.norm(momenta[i] - momenta[j]) >= tol for j in reps):
            reps.append(i)
    return reps


def limit_data(ic, model, t, x, momentum_tol=MOMENTUM_TOL, value_tol=None,
               cluster_tol=None):
    """Build the LimitMomentumSet at (t, x) from the variational minimizers."""
    res = hopf_lax.solve_value(ic, model, t, x, value_tol, cluster_tol)
    vels = np.atleast_2d(res.velocities)
    momenta = np.atleast_2d(model.grad_lagrangian(vels))
    keep = _dedupe_momenta(momenta, momentum_tol)
    momenta = momenta[keep]
    return LimitMomentumSet(
        t=float(t),
        x=res.x,
        momenta=momenta,
        energies=np.atleast_1d(model.hamiltonian(momenta)),
        velocities=np.atleast_2d(model.grad_hamiltonian(momenta)),
    )


def is_shock(lms):
    return lms.k >= 2


def superdifferential(ic, model, t, x, **kwargs):
    """limit_data under its descriptive name."""
    return limit_data(ic, model, t, x, **kwargs)


def superdifferential_vertices(lms):
    """Vertex list [(-H_i, p_i)] of the supergradient polytope."""
    return [(-float(h), p.copy()) for h, p in zip(lms.energies, lms.momenta)]
