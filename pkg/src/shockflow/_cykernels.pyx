# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled finite-difference stepping kernels.

Mirror of the numpy fallback module: explicit local Lax-Friedrichs scheme
with centered Laplacian on a periodic grid.  Kind codes and params layout
are shared with that module.
"""

from libc.math cimport cosh, fabs, pow, sinh, sqrt

import numpy as np


cdef inline double _ham1(int kind, double[::1] prm, double p) noexcept nogil:
    if kind == 0:
        return 0.5 * p * p
    if kind == 1:
        return 0.5 * prm[0] * p * p
    if kind == 2:
        return pow(fabs(p), prm[0]) / prm[0]
    return cosh(p) - 1.0


cdef inline double _alpha1(int kind, double[::1] prm, double pmax) noexcept nogil:
    if kind == 0:
        return pmax
    if kind == 1:
        return fabs(prm[0]) * pmax
    if kind == 2:
        return pow(pmax, prm[0] - 1.0)
    return sinh(pmax)


cdef inline double _ham2(int kind, double[::1] prm, double px, double py) noexcept nogil:
    cdef double r
    if kind == 0:
        return 0.5 * (px * px + py * py)
    if kind == 1:
        return 0.5 * (prm[0] * px * px + 2.0 * prm[1] * px * py + prm[2] * py * py)
    if kind == 2:
        r = sqrt(px * px + py * py)
        return pow(r, prm[0]) / prm[0]
    return cosh(px) + cosh(py) - 2.0


def step_chunk_1d(phi, int nsteps, double h, double dt, double mu, int kind, params):
    """Advance a 1D periodic field nsteps steps; returns a new array."""
    cdef double[::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    a = np.array(phi, dtype=np.float64)
    b = np.empty_like(a)
    cdef double[::1] cur = a
    cdef double[::1] nxt = b
    cdef double[::1] tmp
    cdef Py_ssize_t n = cur.shape[0]
    cdef Py_ssize_t i, ip, im, s
    cdef double inv_h = 1.0 / h
    cdef double inv_h2 = inv_h * inv_h
    cdef double pp, pm, pa, pmax, ham, lap
    with nogil:
        for s in range(nsteps):
            for i in range(n):
                ip = i + 1 if i + 1 < n else 0
                im = i - 1 if i > 0 else n - 1
                pp = (cur[ip] - cur[i]) * inv_h
                pm = (cur[i] - cur[im]) * inv_h
                pa = 0.5 * (pp + pm)
                pmax = fabs(pp)
                if fabs(pm) > pmax:
                    pmax = fabs(pm)
                ham = _ham1(kind, prm, pa) - 0.5 * _alpha1(kind, prm, pmax) * (pp - pm)
                lap = (cur[ip] - 2.0 * cur[i] + cur[im]) * inv_h2
                nxt[i] = cur[i] + dt * (mu * lap - ham)
            tmp = cur
            cur = nxt
            nxt = tmp
    if nsteps % 2 == 0:
        return a
    return b


def step_chunk_2d(phi, int nsteps, double h, double dt, double mu, int kind, params):
    """Advance a 2D periodic field nsteps steps; returns a new array."""
    cdef double[::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    a = np.array(phi, dtype=np.float64)
    b = np.empty_like(a)
    cdef double[:, ::1] cur = a
    cdef double[:, ::1] nxt = b
    cdef double[:, ::1] tmp
    cdef Py_ssize_t n0 = cur.shape[0]
    cdef Py_ssize_t n1 = cur.shape[1]
    cdef Py_ssize_t i, j, ip, im, jp, jm, s
    cdef double inv_h = 1.0 / h
    cdef double inv_h2 = inv_h * inv_h
    cdef double pxp, pxm, pyp, pym, pxa, pya, pxmax, pymax, ax, ay, ham, lap
    cdef double expo, w, r
    with nogil:
        for s in range(nsteps):
            for i in range(n0):
                ip = i + 1 if i + 1 < n0 else 0
                im = i - 1 if i > 0 else n0 - 1
                for j in range(n1):
                    jp = j + 1 if j + 1 < n1 else 0
                    jm = j - 1 if j > 0 else n1 - 1
                    pxp = (cur[ip, j] - cur[i, j]) * inv_h
                    pxm = (cur[i, j] - cur[im, j]) * inv_h
                    pyp = (cur[i, jp] - cur[i, j]) * inv_h
                    pym = (cur[i, j] - cur[i, jm]) * inv_h
                    pxa = 0.5 * (pxp + pxm)
                    pya = 0.5 * (pyp + pym)
                    pxmax = fabs(pxp)
                    if fabs(pxm) > pxmax:
                        pxmax = fabs(pxm)
                    pymax = fabs(pyp)
                    if fabs(pym) > pymax:
                        pymax = fabs(pym)
                    if kind == 0:
                        ax = pxmax
                        ay = pymax
                    elif kind == 1:
                        ax = fabs(prm[0]) * pxmax + fabs(prm[1]) * pymax
                        ay = fabs(prm[1]) * pxmax + fabs(prm[2]) * pymax
                    elif kind == 2:
                        expo = prm[0]
                        if expo >= 2.0:
                            r = sqrt(pxmax * pxmax + pymax * pymax)
                            w = pow(r, expo - 2.0)
                            ax = w * pxmax
                            ay = w * pymax
                        else:
                            ax = pow(pxmax, expo - 1.0)
                            ay = pow(pymax, expo - 1.0)
                    else:
                        ax = sinh(pxmax)
                        ay = sinh(pymax)
                    ham = (
                        _ham2(kind, prm, pxa, pya)
                        - 0.5 * ax * (pxp - pxm)
                        - 0.5 * ay * (pyp - pym)
                    )
                    lap = (
                        cur[ip, j] + cur[im, j] + cur[i, jp] + cur[i, jm]
                        - 4.0 * cur[i, j]
                    ) * inv_h2
                    nxt[i, j] = cur[i, j] + dt * (mu * lap - ham)
            tmp = cur
            cur = nxt
            nxt = tmp
    if nsteps % 2 == 0:
        return a
    return b
