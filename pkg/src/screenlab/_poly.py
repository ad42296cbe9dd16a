"""Low-degree polynomial helpers on ascending-power coefficient tuples.

All polynomials live in a piece-local variable t = x - lo, which keeps
evaluation stable for pieces far from the origin.
"""

from __future__ import annotations

import math
from math import comb

import numpy as np

MAX_DEGREE = 3


def peval(coeffs, t):
    """Horner evaluation; `t` may be a scalar or an ndarray."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, float(coeffs[-1]))
    for c in coeffs[-2::-1]:
        out = out * t + c
    return out if out.shape else float(out)


def pmul(a, b):
    return tuple(np.convolve(np.asarray(a, float), np.asarray(b, float)))


def pder(coeffs):
    if len(coeffs) == 1:
        return (0.0,)
    return tuple(k * c for k, c in enumerate(coeffs) if k > 0)


def pint(coeffs):
    """Antiderivative with zero constant term."""
    return (0.0,) + tuple(c / (k + 1) for k, c in enumerate(coeffs))


def pdefint(coeffs, t0, t1):
    anti = pint(coeffs)
    return peval(anti, t1) - peval(anti, t0)


def pshift(coeffs, d):
    """Coefficients of q(u) = p(u + d)."""
    n = len(coeffs)
    out = [0.0] * n
    for k, c in enumerate(coeffs):
        for j in range(k + 1):
            out[j] += c * comb(k, j) * d ** (k - j)
    return tuple(out)


def preflect(coeffs, w):
    """Coefficients of q(u) = p(w - u)."""
    n = len(coeffs)
    out = [0.0] * n
    for k, c in enumerate(coeffs):
        for j in range(k + 1):
            out[j] += c * comb(k, j) * w ** (k - j) * (-1.0) ** j
    return tuple(out)


def pscale(coeffs, s):
    return tuple(s * c for c in coeffs)


def real_roots_in(coeffs, lo, hi):
    """Real roots of p in the open interval (lo, hi)."""
    arr = np.trim_zeros(np.asarray(coeffs, float), "b")
    if arr.size <= 1:
        return []
    if arr.size == 2:
        roots = [-arr[0] / arr[1]]
    elif arr.size == 3:
        c, b, a = arr
        disc = b * b - 4.0 * a * c
        if disc < 0:
            return []
        s = math.sqrt(disc)
        roots = [(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
    else:
        cand = np.roots(arr[::-1])
        roots = cand[np.abs(cand.imag) < 1e-9].real
    return [float(r) for r in roots if lo < r < hi]


def pminmax(coeffs, t0, t1):
    """(min, max) of p over the closed interval [t0, t1]."""
    cand = [peval(coeffs, t0), peval(coeffs, t1)]
    cand += [peval(coeffs, r) for r in real_roots_in(pder(coeffs), t0, t1)]
    return min(cand), max(cand)
