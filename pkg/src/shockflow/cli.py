"""Experiment runner.

Reads a flat key-value config, runs one named experiment, and writes CSV
artifacts plus a JSON manifest.  Exit codes: 0 success, 2 bad config,
3 numerical failure.  Artifacts are deterministic for a fixed rng_seed:
re-running a config reproduces byte-identical CSV bodies.
"""

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__, kernels
from .admissible import admissible_velocity
from .errors import ConfigError, NumericalFailure, ShockflowError
from .fixtures import make_fixture
from .flow import integrate_flow
from .hopf_lax import solve_profile, solve_value
from .legendre import HamiltonianModel
from .stochastic import compare_regularizations, simulate_sde
from .superdiff import LimitMomentumSet, limit_data
from .viscous import (
    anomaly_along,
    anomaly_plateau,
    integrate_regularized_flow,
    solve_viscous,
)

EXPERIMENTS = ("solve", "particles", "viscous-compare", "anomaly", "sde",
               "admissible-bench")
FIXTURE_NAMES = ("zero", "linear", "neg-abs", "neg-power", "cosine",
                 "sawtooth")
HAMILTONIAN_KINDS = ("quadratic", "anisotropic-quadratic", "power-law",
                     "cosh-sum")

_REQUIRED = object()


def parse_config_text(text):
    """Flat `key = value` lines; `#` comments; dotted section keys."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`")
        key, val = line.split("=", 1)
        key, val = key.strip(), val.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = val
    return out


class ConfigView:
    """Typed access to parsed keys; leftover keys are rejected."""

    def __init__(self, raw):
        self.raw = dict(raw)
        self.seen = set()

    def _fetch(self, key, default):
        self.seen.add(key)
        if key in self.raw:
            return self.raw[key]
        if default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        return None

    def get_str(self, key, default=_REQUIRED, choices=None):
        val = self._fetch(key, default)
        if val is None:
            return default
        if choices is not None and val not in choices:
            raise ConfigError(
                f"{key} must be one of {', '.join(choices)} (got {val!r})")
        return val

    def get_float(self, key, default=_REQUIRED, lo=None, hi=None,
                  lo_open=False):
        val = self._fetch(key, default)
        if val is None:
            return default
        try:
            x = float(val)
        except ValueError:
            raise ConfigError(f"{key} must be a number (got {val!r})")
        self._check_range(key, x, lo, hi, lo_open)
        return x

    def get_int(self, key, default=_REQUIRED, lo=None, hi=None):
        val = self._fetch(key, default)
        if val is None:
            return default
        try:
            x = int(val)
        except ValueError:
            raise ConfigError(f"{key} must be an integer (got {val!r})")
        self._check_range(key, x, lo, hi, False)
        return x

    def get_floats(self, key, default=_REQUIRED, lo=None, lo_open=False):
        val = self._fetch(key, default)
        if val is None:
            return default
        try:
            xs = [float(v) for v in val.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"{key} must be a comma list of numbers")
        if not xs:
            raise ConfigError(f"{key} must not be empty")
        for x in xs:
            self._check_range(key, x, lo, None, lo_open)
        return xs

    def get_points(self, key, dim, default=_REQUIRED):
        """Semicolon-separated points with comma-separated coordinates."""
        val = self._fetch(key, default)
        if val is None:
            return default
        pts = []
        for part in val.split(";"):
            part = part.strip()
            if not part:
                continue
            try:
                coords = [float(v) for v in part.split(",")]
            except ValueError:
                raise ConfigError(f"{key}: bad point {part!r}")
            if len(coords) != dim:
                raise ConfigError(
                    f"{key}: point {part!r} has {len(coords)} coordinates, "
                    f"expected {dim}")
            pts.append(coords)
        if not pts:
            raise ConfigError(f"{key} must list at least one point")
        return np.array(pts)

    def get_matrix(self, key, dim, default=_REQUIRED):
        val = self._fetch(key, default)
        if val is None:
            return default
        rows = []
        for part in val.split(";"):
            part = part.strip()
            if not part:
                continue
            try:
                rows.append([float(v) for v in part.split(",")])
            except ValueError:
                raise ConfigError(f"{key}: bad row {part!r}")
        mat = np.array(rows)
        if mat.shape != (dim, dim):
            raise ConfigError(f"{key} must be a {dim}x{dim} matrix")
        return mat

    @staticmethod
    def _check_range(key, x, lo, hi, lo_open):
        if lo is not None and (x < lo or (lo_open and x == lo)):
            op = ">" if lo_open else ">="
            raise ConfigError(f"{key} must be {op} {lo} (got {x})")
        if hi is not None and x > hi:
            raise ConfigError(f"{key} must be <= {hi} (got {x})")

    def reject_unknown(self):
        extra = sorted(set(self.raw) - self.seen)
        if extra:
            raise ConfigError(f"unknown key {extra[0]!r}")


def _build_fixture(view):
    name = view.get_str("fixture", choices=FIXTURE_NAMES)
    dim = view.get_int("fixture.dim", 1, lo=1, hi=3)
    tilt = view.get_float("fixture.tilt", 0.0, lo=-0.5, hi=0.5)
    slope = view.get_float("fixture.slope", None)
    if name == "linear" and slope is None:
        raise ConfigError("fixture.slope is required for the linear fixture")
    return make_fixture(name, dim, tilt=tilt, slope=slope)


def _build_model(view, dim):
    kind = view.get_str("hamiltonian", "quadratic",
                        choices=HAMILTONIAN_KINDS)
    if kind == "quadratic":
        return HamiltonianModel.quadratic(dim)
    if kind == "anisotropic-quadratic":
        mat = view.get_matrix("hamiltonian.matrix", dim)
        return HamiltonianModel.anisotropic(mat)
    if kind == "power-law":
        exponent = view.get_float("hamiltonian.exponent", lo=1.0,
                                  lo_open=True)
        return HamiltonianModel.power_law(exponent, dim)
    return HamiltonianModel.cosh_sum(dim)


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _run_solve(view, outdir):
    ic = _build_fixture(view)
    model = _build_model(view, ic.dim)
    if ic.dim > 2:
        raise ConfigError("solve supports fixture.dim 1 or 2")
    t = view.get_float("solve.t", lo=0.0, lo_open=True)
    if ic.dim == 1:
        n = view.get_int("solve.n", 201, lo=2, hi=2001)
    else:
        n = view.get_int("solve.n", 61, lo=2, hi=301)
    lo = view.get_float("solve.x_min", float(ic.box[0, 0]))
    hi = view.get_float("solve.x_max", float(ic.box[0, 1]))
    if hi <= lo:
        raise ConfigError("solve.x_max must exceed solve.x_min")
    xs1 = np.linspace(lo, hi, n)
    artifacts = []
    if ic.dim == 1:
        values, _ = solve_profile(ic, model, t, xs1)
        rows = [(t, x, v) for x, v in zip(xs1, values)]
        _write_csv(os.path.join(outdir, "profile.csv"),
                   ["t", "x1", "phi"], rows)
        # mark cells whose endpoint momentum jumps by more than smooth
        # variation could produce at this resolution
        spacing = (hi - lo) / (n - 1)
        momenta = []
        for x in xs1:
            res = solve_value(ic, model, t, float(x))
            momenta.append(float(model.grad_lagrangian(
                res.velocities[:1])[0, 0]))
        jump_tol = spacing * max(4.0, 2.0 / t)
        shock_rows = []
        for i in range(n - 1):
            if abs(momenta[i + 1] - momenta[i]) > jump_tol:
                shock_rows.append((t, 0.5 * (xs1[i] + xs1[i + 1])))
        _write_csv(os.path.join(outdir, "shocks.csv"),
                   ["t", "value"], shock_rows)
        artifacts += ["profile.csv", "shocks.csv"]
    else:
        pts = np.array([(a, b) for a in xs1 for b in xs1])
        values, _ = solve_profile(ic, model, t, pts)
        rows = [(t, p[0], p[1], v) for p, v in zip(pts, values)]
        _write_csv(os.path.join(outdir, "profile.csv"),
                   ["t", "x1", "x2", "phi"], rows)
        artifacts.append("profile.csv")
    return artifacts


def _trajectory_rows(trajectories):
    rows = []
    for traj in trajectories:
        merged = -1 if traj.merged_into is None else traj.merged_into
        for i, t in enumerate(traj.times):
            pos = traj.positions[i]
            rows.append((traj.traj_id, t, *pos, int(traj.on_shock[i]),
                         merged))
    return rows


def _run_particles(view, outdir):
    ic = _build_fixture(view)
    model = _build_model(view, ic.dim)
    seeds = view.get_points("particles.seeds", ic.dim)
    horizon = view.get_float("particles.horizon", lo=0.0, lo_open=True)
    dt = view.get_float("particles.dt", 1e-3, lo=0.0, lo_open=True)
    merge_tol = view.get_float("particles.merge_tol", None, lo=0.0,
                               lo_open=True)
    trajectories = integrate_flow(ic, model, seeds, horizon, dt=dt,
                                  merge_tol=merge_tol)
    cols = ["traj_id", "t"] + [f"x{k+1}" for k in range(ic.dim)] \
        + ["on_shock", "merged_into"]
    _write_csv(os.path.join(outdir, "trajectories.csv"), cols,
               _trajectory_rows(trajectories))
    return ["trajectories.csv"]


def _viscous_common(view):
    ic = _build_fixture(view)
    model = _build_model(view, ic.dim)
    if ic.dim != 1:
        raise ConfigError("viscous experiments support fixture.dim = 1")
    mus = view.get_floats("viscous.mu_ladder", lo=0.0, lo_open=True)
    n = view.get_int("viscous.n", 1024, lo=8)
    horizon = view.get_float("viscous.horizon", 1.0, lo=0.0, lo_open=True)
    seed = view.get_float("viscous.seed_point", 0.5)
    # particle stepping through the snapshots needs dense sampling
    sample_dt = view.get_float("viscous.sample_dt", horizon / 1000.0,
                               lo=0.0, lo_open=True)
    return ic, model, mus, n, horizon, seed, sample_dt


def _run_viscous_compare(view, outdir):
    ic, model, mus, n, horizon, seed, sample_dt = _viscous_common(view)
    flow_dt = view.get_float("viscous.flow_dt", 1e-3, lo=0.0, lo_open=True)
    ref = integrate_flow(ic, model, [[seed]], horizon, dt=flow_dt)[0]
    value_rows, flow_rows = [], []
    for mu in mus:
        fields = solve_viscous(ic, model, mu, horizon, n,
                               sample_dt=sample_dt)
        xs = fields[-1].nodes()
        sharp_vals, _ = solve_profile(ic, model, horizon, xs)
        value_rows.append(
            (mu, float(np.max(np.abs(fields[-1].values - sharp_vals)))))
        traj = integrate_regularized_flow(fields, model, [seed])
        gaps = [abs(float(traj.position_at(t)[0])
                    - float(ref.position_at(t)[0]))
                for t in traj.times]
        flow_rows.append((mu, float(np.max(gaps))))
    _write_csv(os.path.join(outdir, "value_gap.csv"), ["t", "value"],
               value_rows)
    _write_csv(os.path.join(outdir, "flow_gap.csv"), ["t", "value"],
               flow_rows)
    return ["value_gap.csv", "flow_gap.csv"]


def _run_anomaly(view, outdir):
    ic, model, mus, n, horizon, seed, sample_dt = _viscous_common(view)
    settle = view.get_float("viscous.settle", 0.5, lo=0.0, hi=1.0)
    plateau_rows = []
    series_rows = []
    for mu in sorted(mus, reverse=True):
        fields = solve_viscous(ic, model, mu, horizon, n,
                               sample_dt=sample_dt)
        traj = integrate_regularized_flow(fields, model, [seed])
        series = anomaly_along(fields, model, traj)
        plateau_rows.append((mu, anomaly_plateau(fields, model, traj,
                                                 settle=settle)))
        series_rows = [(t, a) for t, a in zip(traj.times, series)]
    _write_csv(os.path.join(outdir, "anomaly.csv"), ["t", "value"],
               plateau_rows)
    _write_csv(os.path.join(outdir, "anomaly_series.csv"), ["t", "value"],
               series_rows)
    return ["anomaly.csv", "anomaly_series.csv"]


def _run_sde(view, outdir):
    ic = _build_fixture(view)
    model = _build_model(view, ic.dim)
    epsilon = view.get_float("sde.epsilon", lo=0.0)
    seed_point = view.get_float("sde.seed_point", 0.0)
    horizon = view.get_float("sde.horizon", 1.0, lo=0.0, lo_open=True)
    dt = view.get_float("sde.dt", 1e-3, lo=0.0, lo_open=True, hi=1e-3)
    n_paths = view.get_int("sde.n_paths", 400, lo=1)
    rng_seed = view.get_int("rng_seed", 0)
    ens = simulate_sde(ic, model, epsilon, [seed_point], horizon, dt=dt,
                       n_paths=n_paths, rng_seed=rng_seed)
    x_ref = view.get_float("sde.shock_x",
                           float(np.median(ens.paths[-1])))
    t_ref = view.get_float("sde.shock_t", horizon, lo=0.0, lo_open=True)
    relax = 2.0 * max(ic.lipschitz, 1.0) * (
        3.0 * epsilon + 10.0 * dt * model.max_speed(ic.lipschitz))
    lms = limit_data(ic, model, t_ref, np.array([x_ref]), value_tol=relax)
    report = compare_regularizations(lms, model, ens)
    occ_rows = [(j, ens.occupancy[j], ens.occupancy_se[j])
                for j in range(ens.occupancy.size)]
    _write_csv(os.path.join(outdir, "occupancy.csv"),
               ["branch", "occupancy", "occupancy_se"], occ_rows)
    comp_rows = [("v_star", float(report.v_star[0]))]
    for i, cand in enumerate(report.candidates):
        comp_rows.append((f"v_dagger_{i}", float(cand.v_dagger[0])))
    comp_rows += [
        ("mean_velocity", ens.mean_velocity),
        ("mean_velocity_se", ens.mean_velocity_se),
        ("anomaly", report.anomaly),
        ("verdict", report.verdict),
        ("sde_consistent", int(bool(report.sde_consistent))),
    ]
    _write_csv(os.path.join(outdir, "comparison.csv"), ["label", "value"],
               comp_rows)
    return ["occupancy.csv", "comparison.csv"]


def _bench_oracle_gap(lms, model, v_star, steps):
    """Independent argmin of the excess action rate for one instance.

    The objective is a max of convex functions, so any local minimum is
    global: a coarse grid seed plus derivative-free polish is a valid
    oracle without sharing any machinery with the production solver.
    """
    from scipy.optimize import minimize, minimize_scalar

    from .admissible import lhat

    d = model.dim
    step = steps[d]
    lo = lms.velocities.min(axis=0) - 1.0
    hi = lms.velocities.max(axis=0) + 1.0
    nodes = {1: 129, 2: 41, 3: 17}[d]
    axes = [np.linspace(lo[j], hi[j], nodes) for j in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    vals = lhat(lms, model, pts)
    best = pts[int(np.argmin(vals))]

    def f(v):
        return float(lhat(lms, model, np.atleast_2d(v))[0])

    if d == 1:
        span = float(hi[0] - lo[0]) / (nodes - 1)
        res = minimize_scalar(
            lambda s: f([s]),
            bounds=(best[0] - 2 * span, best[0] + 2 * span),
            method="bounded", options={"xatol": 1e-12})
        best = np.array([res.x])
    else:
        for scale in (float((hi - lo).max()) / (nodes - 1), 4 * step):
            simplex = np.vstack([best, best + scale * np.eye(d)])
            res = minimize(f, best, method="Nelder-Mead",
                           options={"initial_simplex": simplex,
                                    "xatol": 1e-11, "fatol": 1e-14,
                                    "maxiter": 4000})
            if res.fun <= f(best):
                best = res.x
    return float(np.linalg.norm(best - v_star))


def _run_bench(view, outdir):
    instances = view.get_int("bench.instances", 200, lo=1)
    dims = [int(d) for d in view.get_floats("bench.dims", [1.0, 2.0, 3.0],
                                            lo=1)]
    for d in dims:
        if d not in (1, 2, 3):
            raise ConfigError("bench.dims entries must be 1, 2 or 3")
    k_max = view.get_int("bench.k_max", 6, lo=2, hi=8)
    rng_seed = view.get_int("rng_seed", 0)
    steps = {1: view.get_float("bench.step_1d", 1e-3, lo=0.0, lo_open=True)}
    step_nd = view.get_float("bench.step_nd", 5e-3, lo=0.0, lo_open=True)
    steps[2] = steps[3] = step_nd
    rng = np.random.default_rng(rng_seed)
    rows = []
    for i in range(instances):
        d = int(dims[i % len(dims)])
        kind = ("quadratic", "anisotropic-quadratic", "power-law",
                "cosh-sum")[int(rng.integers(0, 4))]
        if kind == "quadratic":
            model = HamiltonianModel.quadratic(d)
        elif kind == "anisotropic-quadratic":
            a = rng.normal(size=(d, d))
            model = HamiltonianModel.anisotropic(a @ a.T + 0.4 * np.eye(d))
        elif kind == "power-law":
            model = HamiltonianModel.power_law(
                float(rng.uniform(1.3, 4.0)), d)
        else:
            model = HamiltonianModel.cosh_sum(d)
        while True:
            k = int(rng.integers(2, k_max + 1))
            momenta = rng.normal(scale=1.2, size=(k, d))
            sep = min(np.linalg.norm(momenta[a] - momenta[b])
                      for a in range(k) for b in range(a))
            if sep > 5e-2:
                break
        lms = LimitMomentumSet.from_momenta(model, momenta)
        sol = admissible_velocity(lms, model)
        gap = _bench_oracle_gap(lms, model, sol.v_star, steps)
        v_text = ";".join(repr(float(c)) for c in sol.v_star)
        rows.append((i, d, kind, lms.k, v_text, sol.anomaly,
                     sol.hull_distance, gap))
    _write_csv(os.path.join(outdir, "bench.csv"),
               ["instance", "dim", "kind", "k", "v_star", "anomaly",
                "hull_distance", "oracle_gap"], rows)
    return ["bench.csv"]


RUNNERS = {
    "solve": _run_solve,
    "particles": _run_particles,
    "viscous-compare": _run_viscous_compare,
    "anomaly": _run_anomaly,
    "sde": _run_sde,
    "admissible-bench": _run_bench,
}


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}")
    return parse_config_text(text)


def _prepare(raw):
    view = ConfigView(raw)
    kind = view.get_str("experiment", choices=EXPERIMENTS)
    return view, kind


def validate_config(path):
    """Parse and type-check without running; returns the experiment kind."""
    raw = load_config(path)
    view, kind = _prepare(raw)
    outdir = view.get_str("out", "shockflow-out")
    view.get_int("rng_seed", 0)
    _dry_run_checks(view, kind)
    view.reject_unknown()
    return kind, outdir


def _dry_run_checks(view, kind):
    if kind == "solve":
        ic = _build_fixture(view)
        _build_model(view, ic.dim)
        if ic.dim > 2:
            raise ConfigError("solve supports fixture.dim 1 or 2")
        view.get_float("solve.t", lo=0.0, lo_open=True)
        if ic.dim == 1:
            view.get_int("solve.n", 201, lo=2, hi=2001)
        else:
            view.get_int("solve.n", 61, lo=2, hi=301)
        view.get_float("solve.x_min", 0.0)
        view.get_float("solve.x_max", 1.0)
    elif kind == "particles":
        ic = _build_fixture(view)
        _build_model(view, ic.dim)
        view.get_points("particles.seeds", ic.dim)
        view.get_float("particles.horizon", lo=0.0, lo_open=True)
        view.get_float("particles.dt", 1e-3, lo=0.0, lo_open=True)
        view.get_float("particles.merge_tol", None, lo=0.0, lo_open=True)
    elif kind == "viscous-compare":
        _viscous_common(view)
        view.get_float("viscous.flow_dt", 1e-3, lo=0.0, lo_open=True)
    elif kind == "anomaly":
        _viscous_common(view)
        view.get_float("viscous.settle", 0.5, lo=0.0, hi=1.0)
    elif kind == "sde":
        ic = _build_fixture(view)
        _build_model(view, ic.dim)
        view.get_float("sde.epsilon", lo=0.0)
        view.get_float("sde.seed_point", 0.0)
        view.get_float("sde.horizon", 1.0, lo=0.0, lo_open=True)
        view.get_float("sde.dt", 1e-3, lo=0.0, lo_open=True, hi=1e-3)
        view.get_int("sde.n_paths", 400, lo=1)
        view.get_float("sde.shock_x", 0.0)
        view.get_float("sde.shock_t", 1.0, lo=0.0, lo_open=True)
    else:
        view.get_int("bench.instances", 200, lo=1)
        view.get_floats("bench.dims", [1.0], lo=1)
        view.get_int("bench.k_max", 6, lo=2, hi=8)
        view.get_float("bench.step_1d", 1e-3, lo=0.0, lo_open=True)
        view.get_float("bench.step_nd", 5e-3, lo=0.0, lo_open=True)


def run_config(path):
    """Execute the experiment named by the config; returns the exit code."""
    started = time.time()
    raw = load_config(path)
    kind, outdir = validate_config(path)
    view, _ = _prepare(raw)
    view.get_str("out", "shockflow-out")
    view.get_int("rng_seed", 0)
    os.makedirs(outdir, exist_ok=True)
    artifacts = RUNNERS[kind](view, outdir)
    manifest = {
        "experiment": kind,
        "config": dict(raw),
        "artifacts": artifacts,
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": sys.version.split()[0],
        "kernel_backend": kernels.BACKEND,
        "wall_time_s": round(time.time() - started, 3),
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="shockflow",
        description="Hamilton-Jacobi shock experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_val = sub.add_parser("validate", help="check a config without running")
    p_val.add_argument("config")
    sub.add_parser("list-fixtures", help="list initial-condition fixtures")
    args = parser.parse_args(argv)

    if args.command == "list-fixtures":
        for name in FIXTURE_NAMES:
            print(name)
        return 0
    try:
        if args.command == "validate":
            kind, _ = validate_config(args.config)
            print(f"ok: {kind}")
            return 0
        return run_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, ShockflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
