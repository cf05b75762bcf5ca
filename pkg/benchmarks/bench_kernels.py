"""Benchmark the compiled grid kernels against the numpy fallback.

Runs the same stepping workloads through both backends, verifies the
outputs agree to the last bit, and prints per-case timings.

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from shockflow import HamiltonianModel
from shockflow import _pykernels
from shockflow.kernels import kernel_args

try:
    from shockflow import _cykernels
except ImportError:
    _cykernels = None


def _seed_field_1d(n):
    xs = np.linspace(-np.pi, np.pi, n, endpoint=False)
    return np.cos(xs) + 0.3 * np.sin(3.0 * xs)


def _seed_field_2d(n):
    xs = np.linspace(-np.pi, np.pi, n, endpoint=False)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return np.cos(gx) * np.cos(gy) + 0.2 * np.sin(2.0 * gx)


def _cases():
    h1 = 2.0 * np.pi / 2048
    h2 = 2.0 * np.pi / 192
    quad = HamiltonianModel.quadratic(1)
    pow4 = HamiltonianModel.power_law(4.0, 1)
    cosh1 = HamiltonianModel.cosh_sum(1)
    aniso = HamiltonianModel.anisotropic(np.array([[1.3, 0.2], [0.2, 0.8]]))
    quad2 = HamiltonianModel.quadratic(2)
    return [
        ("1d quadratic n=2048", 1, _seed_field_1d(2048), 400, h1, quad),
        ("1d power-law n=2048", 1, _seed_field_1d(2048), 400, h1, pow4),
        ("1d cosh-sum n=2048", 1, _seed_field_1d(2048), 400, h1, cosh1),
        ("2d quadratic 192^2", 2, _seed_field_2d(192), 60, h2, quad2),
        ("2d anisotropic 192^2", 2, _seed_field_2d(192), 60, h2, aniso),
    ]


def _run(impl, dim, phi, nsteps, h, dt, mu, kind, params, repeats):
    stepper = impl.step_chunk_1d if dim == 1 else impl.step_chunk_2d
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = stepper(phi, nsteps, h, dt, mu, kind, params)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if _cykernels is None:
        print("compiled backend not importable; nothing to compare")
        return

    print("%-22s %12s %12s %9s  %s" % (
        "case", "compiled", "numpy", "speedup", "outputs"))
    mu = 0.02
    for label, dim, phi, nsteps, h, model in _cases():
        kind, params = kernel_args(model)
        # diffusive and advective stability limits, with slack for
        # gradient steepening during the run
        grad = float(np.max(np.abs(np.diff(phi, axis=0)))) / h
        v_max = model.max_speed(3.0 * grad)
        dt = 0.25 * min(h * h / (2.0 * dim * mu), h / v_max)
        out_c, t_c = _run(_cykernels, dim, phi, nsteps, h, dt, mu, kind,
                          params, args.repeats)
        out_p, t_p = _run(_pykernels, dim, phi, nsteps, h, dt, mu, kind,
                          params, args.repeats)
        diff = float(np.max(np.abs(out_c - out_p)))
        if np.array_equal(out_c, out_p):
            same = "bit-equal"
        elif diff <= 1e-13:
            same = "ulp-level (max diff %.1e)" % diff
        else:
            same = "MAX DIFF %.2e" % diff
        print("%-22s %10.1f ms %10.1f ms %8.1fx  %s" % (
            label, 1e3 * t_c, 1e3 * t_p, t_p / t_c, same))


if __name__ == "__main__":
    main()
