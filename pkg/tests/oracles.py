"""Brute-force reference implementations used only by the tests.

Everything here is written as plainly as possible (explicit loops over
subsets, pairs, windows) and stays independent of the library's vectorized
code paths, so agreement is meaningful.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from ccmm.quasimetric import SNAP_RTOL


def open_ball_members(m_vec, r):
    """Indices with m < r under the library's snap convention."""
    thr = r - SNAP_RTOL * max(1.0, r)
    return {i for i, m in enumerate(m_vec) if m < thr}


def alpha_bruteforce(mm, r):
    """max over subsets of mass >= 1/2 of 1 - min of the two neighborhood
    masses, by explicit enumeration."""
    n = mm.n
    d = mm.dist
    w = mm.weights
    best = 0.0
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            if w[list(subset)].sum() < 0.5:
                continue
            fwd = [min(d[z, x] for z in subset) for x in range(n)]
            bwd = [min(d[x, z] for z in subset) for x in range(n)]
            mu_f = sum(w[i] for i in open_ball_members(fwd, r))
            mu_b = sum(w[i] for i in open_ball_members(bwd, r))
            best = max(best, 1.0 - min(mu_f, mu_b))
    return best


def partial_diameter_bruteforce(mm, kappa):
    n = mm.n
    best = math.inf
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            if mm.weights[list(subset)].sum() < 1.0 - kappa - 1e-12:
                continue
            diam = max(mm.dist[i, j] for i in subset for j in subset)
            best = min(best, diam)
    return best


def window_pardiam_bruteforce(weights, values, kappa):
    """Shortest closed interval with pushforward mass >= 1 - kappa, trying
    every pair of value endpoints."""
    vals = sorted(set(values))
    need = 1.0 - kappa - 1e-12
    best = math.inf
    for lo in vals:
        for hi in vals:
            if hi < lo:
                continue
            mass = sum(w for w, v in zip(weights, values) if lo <= v <= hi)
            if mass >= need:
                best = min(best, hi - lo)
    return best


def lipschitz_constant_bruteforce(space, f):
    n = space.n
    best = 0.0
    for x in range(n):
        for z in range(n):
            if x != z:
                best = max(best, (f[z] - f[x]) / space.dist[x, z])
    return best


def isoperimetric_profile_bruteforce(mm, scale):
    """min over subsets at each rounded mass of the smaller content."""
    n = mm.n
    d = mm.dist
    w = mm.weights
    out = {0.0: 0.0, 1.0: 0.0}
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            mass = float(w[list(subset)].sum())
            fwd = [min(d[z, x] for z in subset) for x in range(n)]
            bwd = [min(d[x, z] for z in subset) for x in range(n)]
            mu_f = sum(w[i] for i in open_ball_members(fwd, scale))
            mu_b = sum(w[i] for i in open_ball_members(bwd, scale))
            content = min(max(mu_f - mass, 0.0), max(mu_b - mass, 0.0)) / scale
            key = round(mass, 12)
            if key not in out or content < out[key]:
                out[key] = content
    return sorted(out.items())


def cheby_tail(weights, values, r):
    mean = float(np.dot(weights, values))
    return float(sum(w for w, v in zip(weights, values) if abs(v - mean) >= r))
