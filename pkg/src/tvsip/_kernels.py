"""Compiled inner loops for the TV dual problem.

All kernels solve

    min_xi  || div_h xi - f / tau ||^2   subject to  |xi_i| <= 1

with forward-difference gradients, Neumann boundary (the last dual entry
along each axis is pinned to zero) and per-axis inverse spacing ``ih``.
The denoised signal is ``f - tau * div_h xi``.

Kernels update ``x`` in place and return ``(iterations, last_change)``.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def _div1(x, ih, out):
    n = x.shape[0]
    for i in range(n):
        s = 0.0
        if i < n - 1:
            s += x[i]
        if i > 0:
            s -= x[i - 1]
        out[i] = s * ih


@numba.njit(cache=True)
def _div2(x0, x1, ih0, ih1, out):
    n0, n1 = out.shape
    for i in range(n0):
        for j in range(n1):
            s0 = 0.0
            if i < n0 - 1:
                s0 += x0[i, j]
            if i > 0:
                s0 -= x0[i - 1, j]
            s1 = 0.0
            if j < n1 - 1:
                s1 += x1[i, j]
            if j > 0:
                s1 -= x1[i, j - 1]
            out[i, j] = s0 * ih0 + s1 * ih1


@numba.njit(cache=True)
def fgp_1d(f, tau, ih, tol, max_iter, x):
    # accelerated projected gradient with gradient-based momentum restart
    n = f.shape[0]
    sig = 1.0 / (4.0 * ih * ih)
    y = x.copy()
    d = np.empty(n)
    t = 1.0
    change = np.inf
    it = 0
    while it < max_iter:
        it += 1
        _div1(y, ih, d)
        for i in range(n):
            d[i] -= f[i] / tau
        tn = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / tn
        t = tn
        change = 0.0
        rs = 0.0
        for i in range(n - 1):
            a = y[i] + sig * (d[i + 1] - d[i]) * ih
            if a > 1.0:
                a = 1.0
            elif a < -1.0:
                a = -1.0
            step = a - x[i]
            c = abs(step)
            if c > change:
                change = c
            rs += (y[i] - a) * step
            y[i] = a + mom * step
            x[i] = a
        if rs > 0.0:
            t = 1.0
            for i in range(n - 1):
                y[i] = x[i]
        if change < tol:
            break
    return it, change


@numba.njit(cache=True)
def fgp_2d(f, tau, ih0, ih1, isotropic, tol, max_iter, x0, x1):
    n0, n1 = f.shape
    sig = 1.0 / (4.0 * ih0 * ih0 + 4.0 * ih1 * ih1)
    y0 = x0.copy()
    y1 = x1.copy()
    d = np.empty((n0, n1))
    t = 1.0
    change = np.inf
    it = 0
    while it < max_iter:
        it += 1
        _div2(y0, y1, ih0, ih1, d)
        for i in range(n0):
            for j in range(n1):
                d[i, j] -= f[i, j] / tau
        tn = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / tn
        t = tn
        change = 0.0
        rs = 0.0
        for i in range(n0):
            for j in range(n1):
                g0 = (d[i + 1, j] - d[i, j]) * ih0 if i < n0 - 1 else 0.0
                g1 = (d[i, j + 1] - d[i, j]) * ih1 if j < n1 - 1 else 0.0
                a0 = y0[i, j] + sig * g0
                a1 = y1[i, j] + sig * g1
                if isotropic:
                    nr = np.sqrt(a0 * a0 + a1 * a1)
                    if nr > 1.0:
                        a0 /= nr
                        a1 /= nr
                else:
                    a0 = min(1.0, max(-1.0, a0))
                    a1 = min(1.0, max(-1.0, a1))
                s0 = a0 - x0[i, j]
                s1 = a1 - x1[i, j]
                c = max(abs(s0), abs(s1))
                if c > change:
                    change = c
                rs += (y0[i, j] - a0) * s0 + (y1[i, j] - a1) * s1
                y0[i, j] = a0 + mom * s0
                y1[i, j] = a1 + mom * s1
                x0[i, j] = a0
                x1[i, j] = a1
        if rs > 0.0:
            t = 1.0
            for i in range(n0):
                for j in range(n1):
                    y0[i, j] = x0[i, j]
                    y1[i, j] = x1[i, j]
        if change < tol:
            break
    return it, change


@numba.njit(cache=True)
def chambolle_1d(f, tau, ih, tol, max_iter, x):
    # semi-implicit fixed point: xi <- (xi + s g) / (1 + s |g|)
    n = f.shape[0]
    sig = 1.0 / (4.0 * ih * ih)
    d = np.empty(n)
    change = np.inf
    it = 0
    while it < max_iter:
        it += 1
        _div1(x, ih, d)
        for i in range(n):
            d[i] -= f[i] / tau
        change = 0.0
        for i in range(n - 1):
            g = (d[i + 1] - d[i]) * ih
            a = (x[i] + sig * g) / (1.0 + sig * abs(g))
            c = abs(a - x[i])
            if c > change:
                change = c
            x[i] = a
        if change < tol:
            break
    return it, change


@numba.njit(cache=True)
def chambolle_2d(f, tau, ih0, ih1, isotropic, tol, max_iter, x0, x1):
    n0, n1 = f.shape
    sig = 1.0 / (4.0 * ih0 * ih0 + 4.0 * ih1 * ih1)
    d = np.empty((n0, n1))
    change = np.inf
    it = 0
    while it < max_iter:
        it += 1
        _div2(x0, x1, ih0, ih1, d)
        for i in range(n0):
            for j in range(n1):
                d[i, j] -= f[i, j] / tau
        change = 0.0
        for i in range(n0):
            for j in range(n1):
                g0 = (d[i + 1, j] - d[i, j]) * ih0 if i < n0 - 1 else 0.0
                g1 = (d[i, j + 1] - d[i, j]) * ih1 if j < n1 - 1 else 0.0
                if isotropic:
                    nr = np.sqrt(g0 * g0 + g1 * g1)
                    a0 = (x0[i, j] + sig * g0) / (1.0 + sig * nr)
                    a1 = (x1[i, j] + sig * g1) / (1.0 + sig * nr)
                else:
                    a0 = (x0[i, j] + sig * g0) / (1.0 + sig * abs(g0))
                    a1 = (x1[i, j] + sig * g1) / (1.0 + sig * abs(g1))
                c = max(abs(a0 - x0[i, j]), abs(a1 - x1[i, j]))
                if c > change:
                    change = c
                x0[i, j] = a0
                x1[i, j] = a1
        if change < tol:
            break
    return it, change
