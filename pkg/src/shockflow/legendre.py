"""Convex Hamiltonians and their Legendre-dual Lagrangians.

A Hamiltonian H(p) here is smooth, strictly convex and superlinear, so its
Legendre transform L(v) = max_p [p.v - H(p)] is again smooth, strictly convex
and superlinear, and the gradient maps grad H and grad L are mutually inverse
bijections between momentum and velocity space.  Every supported family has
closed-form expressions on both sides:

  quadratic               H = |p|^2/2             L = |v|^2/2
  anisotropic-quadratic   H = p.Ap/2              L = v.inv(A)v/2
  power-law               H = |p|^a/a, a > 1      L = |v|^b/b, 1/a + 1/b = 1
  cosh-sum                H = sum_k (cosh p_k - 1)
                          L = sum_k [v_k asinh v_k - sqrt(1+v_k^2) + 1]

All evaluators accept arrays with an arbitrary number of leading batch axes
in front of the coordinate axis; scalars are accepted for one-dimensional
models.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalFailure

KINDS = ("quadratic", "anisotropic-quadratic", "power-law", "cosh-sum")


def _as_batch(x, dim):
    """Coerce x to a float array of shape (..., dim); remember scalar input."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if dim != 1:
            raise ValueError(f"scalar argument given but model dimension is {dim}")
        return arr.reshape(1), True
    if arr.shape[-1] != dim:
        raise ValueError(f"last axis has size {arr.shape[-1]}, expected {dim}")
    return arr, False


def _scalar_out(value, was_scalar):
    if was_scalar:
        return float(np.asarray(value).reshape(()))
    return value


def _vector_out(value, was_scalar):
    if was_scalar:
        return float(np.asarray(value).reshape(-1)[0])
    return value


@dataclass(frozen=True)
class HamiltonianModel:
    """One Hamiltonian from the supported closed-form families.

    Attributes
    ----------
    kind : one of KINDS
    dim : spatial dimension d
    exponent : power-law exponent a > 1 (power-law kind only)
    matrix : symmetric positive definite A of shape (d, d) (anisotropic only)
    """

    kind: str
    dim: int
    exponent: float = 2.0
    matrix: np.ndarray = None
    _inv_matrix: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown hamiltonian kind {self.kind!r}")
        if self.dim < 1:
            raise ConfigError("dimension must be at least 1")
        if self.kind == "power-law":
            if not self.exponent > 1.0:
                raise ConfigError("power-law exponent must exceed 1")
        if self.kind == "anisotropic-quadratic":
            a = np.asarray(self.matrix, dtype=float)
            if a.shape != (self.dim, self.dim):
                raise ConfigError("matrix shape does not match dimension")
            if not np.allclose(a, a.T, atol=1e-12):
                raise ConfigError("matrix must be symmetric")
            eigvals = np.linalg.eigvalsh(a)
            if eigvals[0] <= 0:
                raise ConfigError("matrix must be positive definite")
            object.__setattr__(self, "matrix", a)
            object.__setattr__(self, "_inv_matrix", np.linalg.inv(a))

    # --- constructors ---

    @staticmethod
    def quadratic(dim=1):
        return HamiltonianModel("quadratic", dim)

    @staticmethod
    def anisotropic(matrix):
        a = np.asarray(matrix, dtype=float)
        return HamiltonianModel("anisotropic-quadratic", a.shape[0], matrix=a)

    @staticmethod
    def power_law(exponent, dim=1):
        return HamiltonianModel("power-law", dim, exponent=float(exponent))

    @staticmethod
    def cosh_sum(dim=1):
        return HamiltonianModel("cosh-sum", dim)

    @property
    def conjugate_exponent(self):
        """b with 1/a + 1/b = 1 for the power-law kind."""
        a = self.exponent
        return a / (a - 1.0)

    # --- Hamiltonian side ---

    def hamiltonian(self, p):
        p, scalar = _as_batch(p, self.dim)
        if self.kind == "quadratic":
            out = 0.5 * np.sum(p * p, axis=-1)
        elif self.kind == "anisotropic-quadratic":
            out = 0.5 * np.sum(p * (p @ self.matrix.T), axis=-1)
        elif self.kind == "power-law":
            r = np.linalg.norm(p, axis=-1)
            out = r**self.exponent / self.exponent
        else:
            out = np.sum(np.cosh(p) - 1.0, axis=-1)
        return _scalar_out(out, scalar)

    def grad_hamiltonian(self, p):
        """Velocity v = grad H(p)."""
        p, scalar = _as_batch(p, self.dim)
        if self.kind == "quadratic":
            out = p.copy()
        elif self.kind == "anisotropic-quadratic":
            out = p @ self.matrix.T
        elif self.kind == "power-law":
            r = np.linalg.norm(p, axis=-1, keepdims=True)
            safe = np.where(r > 0.0, r, 1.0)
            out = np.where(r > 0.0, safe ** (self.exponent - 2.0), 0.0) * p
        else:
            out = np.sinh(p)
        return _vector_out(out, scalar)

    # --- Lagrangian side ---

    def lagrangian(self, v):
        v, scalar = _as_batch(v, self.dim)
        if self.kind == "quadratic":
            out = 0.5 * np.sum(v * v, axis=-1)
        elif self.kind == "anisotropic-quadratic":
            out = 0.5 * np.sum(v * (v @ self._inv_matrix.T), axis=-1)
        elif self.kind == "power-law":
            b = self.conjugate_exponent
            r = np.linalg.norm(v, axis=-1)
            out = r**b / b
        else:
            out = np.sum(v * np.arcsinh(v) - np.sqrt(1.0 + v * v) + 1.0, axis=-1)
        return _scalar_out(out, scalar)

    def grad_lagrangian(self, v):
        """Momentum p = grad L(v); inverse of grad_hamiltonian."""
        v, scalar = _as_batch(v, self.dim)
        if self.kind == "quadratic":
            out = v.copy()
        elif self.kind == "anisotropic-quadratic":
            out = v @ self._inv_matrix.T
        elif self.kind == "power-law":
            b = self.conjugate_exponent
            r = np.linalg.norm(v, axis=-1, keepdims=True)
            safe = np.where(r > 0.0, r, 1.0)
            out = np.where(r > 0.0, safe ** (b - 2.0), 0.0) * v
        else:
            out = np.arcsinh(v)
        return _vector_out(out, scalar)

    def hessian_lagrangian(self, v):
        """Hessian of L at a single point v, shape (d, d).

        For the power-law kind with conjugate exponent b < 2 the Hessian is
        unbounded at v = 0; callers that polish near that point must damp
        their steps.
        """
        v = np.asarray(v, dtype=float).reshape(self.dim)
        if self.kind == "quadratic":
            return np.eye(self.dim)
        if self.kind == "anisotropic-quadratic":
            return self._inv_matrix.copy()
        if self.kind == "power-law":
            b = self.conjugate_exponent
            r = np.linalg.norm(v)
            if r == 0.0:
                if b == 2.0:
                    return np.eye(self.dim)
                raise NumericalFailure("lagrangian hessian singular at v = 0")
            outer = np.outer(v, v) / (r * r)
            return r ** (b - 2.0) * (np.eye(self.dim) + (b - 2.0) * outer)
        return np.diag(1.0 / np.sqrt(1.0 + v * v))

    def max_speed(self, p_bound):
        """sup |grad H(p)| over |p| <= p_bound, used for CFL and search boxes.

        For every kind the supremum over the Euclidean ball is attained on
        the sphere: |p| for quadratic, lambda_max(A)|p| for anisotropic,
        |p|^(a-1) for power-law, and sinh|p| for cosh-sum (the squared
        gradient norm sum_k sinh^2 p_k is convex on the sphere, so the
        maximum sits at a single-coordinate vertex).
        """
        p_bound = float(p_bound)
        if p_bound < 0:
            raise ValueError("momentum bound must be nonnegative")
        if self.kind == "quadratic":
            return p_bound
        if self.kind == "anisotropic-quadratic":
            top = np.linalg.eigvalsh(self.matrix)[-1]
            return top * p_bound
        if self.kind == "power-law":
            return p_bound ** (self.exponent - 1.0)
        return float(np.sinh(p_bound))

    def describe(self):
        if self.kind == "power-law":
            return f"power-law(a={self.exponent:g}, d={self.dim})"
        if self.kind == "anisotropic-quadratic":
            return f"anisotropic-quadratic(d={self.dim})"
        return f"{self.kind}(d={self.dim})"


@dataclass(frozen=True)
class LagrangianView:
    """Lagrangian of a model with a generic Newton inverter for cross-checks.

    The closed forms in HamiltonianModel are the production path; this view
    recovers v from p by solving grad L(v) = p numerically, which the tests
    use to confirm the closed forms agree with the variational definition.
    """

    model: HamiltonianModel
    tol: float = 1e-12
    max_iter: int = 80

    def value(self, v):
        return self.model.lagrangian(v)

    def gradient(self, v):
        return self.model.grad_lagrangian(v)

    def invert_newton(self, p):
        """Solve grad H(v_dual) = ... i.e. find v with grad L(v) = p.

        Damped Newton on the residual grad L(v) - p with a bisection-style
        halving safeguard.  Works for every kind away from power-law p = 0,
        where the closed form is exact anyway.
        """
        d = self.model.dim
        p = np.asarray(p, dtype=float).reshape(d)
        v = self.model.grad_hamiltonian(p).reshape(d).copy()
        # closed form is the natural warm start; perturb so the Newton loop
        # does real work in the tests
        v = v + 0.25 * (1.0 + np.abs(v))
        best = v.copy()
        best_res = np.inf
        for _ in range(self.max_iter):
            res = self.model.grad_lagrangian(v).reshape(d) - p
            norm = np.linalg.norm(res)
            if norm < best_res:
                best, best_res = v.copy(), norm
            if norm <= self.tol * (1.0 + np.linalg.norm(p)):
                return v
            try:
                hess = self.model.hessian_lagrangian(v)
                step = np.linalg.solve(hess, res)
            except (NumericalFailure, np.linalg.LinAlgError):
                step = res
            scale = 1.0
            for _ in range(40):
                trial = v - scale * step
                trial_res = np.linalg.norm(
                    self.model.grad_lagrangian(trial).reshape(d) - p
                )
                if trial_res < norm:
                    v = trial
                    break
                scale *= 0.5
            else:
                return best
        if best_res <= 1e-8 * (1.0 + np.linalg.norm(p)):
            return best
        raise NumericalFailure("newton inversion of the velocity map stalled")


def lagrangian_of(model, v):
    return model.lagrangian(v)


def velocity_of_momentum(model, p):
    return model.grad_hamiltonian(p)


def momentum_of_velocity(model, v):
    return model.grad_lagrangian(v)


def young_gap(model, p, v):
    """L(v) + H(p) - p.v, nonnegative, zero exactly on dual pairs."""
    p_arr, p_scalar = _as_batch(p, model.dim)
    v_arr, v_scalar = _as_batch(v, model.dim)
    dot = np.sum(p_arr * v_arr, axis=-1)
    out = model.lagrangian(v_arr) + model.hamiltonian(p_arr) - dot
    return _scalar_out(out, p_scalar and v_scalar)


def bregman_divergence(model, v, v_ref):
    """L(v) - L(v_ref) - grad L(v_ref).(v - v_ref), nonnegative."""
    v_arr, s1 = _as_batch(v, model.dim)
    r_arr, s2 = _as_batch(v_ref, model.dim)
    p_ref = np.asarray(model.grad_lagrangian(r_arr), dtype=float).reshape(r_arr.shape)
    lin = np.sum(p_ref * (v_arr - r_arr), axis=-1)
    out = model.lagrangian(v_arr) - model.lagrangian(r_arr) - lin
    return _scalar_out(out, s1 and s2)
