"""First-eigenvalue estimation and spectral concentration checks.

The discrete stand-in for the dual-norm gradient is the ascending slope,
the largest positive difference quotient out of a point over the full
distance matrix.  The Rayleigh quotient divides the measure-weighted squared
slopes by the variance (the variance realizes the inner infimum over
centerings exactly for the squared loss).

The quotient is nonsmooth and multi-modal, so the minimizer anneals a
log-sum-exp smoothing of the slope over six temperature stages with
multi-start initialization (a symmetric graph-Laplacian eigenvector,
distance cones, random fields) and polishes with exact subgradient steps.
All internal scales are relative, which makes the whole pipeline exactly
equivariant under rescaling distances by powers of two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concentration import VERDICT_TOL
from .lipschitz import ScalarField, as_field
from .quasimetric import MetricMeasureSpace, SNAP_RTOL, as_pointset, diameter

__all__ = [
    "EigenEstimate",
    "ChengInputs",
    "GMStep",
    "GMDecayReport",
    "dual_slope",
    "rayleigh_quotient",
    "first_eigenvalue",
    "symmetric_oracle",
    "symmetric_oracle_field",
    "alpha_bound_from_spectral_gap",
    "spectral_mass_decay_check",
    "cheng_upper_bound",
    "obsdiam_bound_from_spectral_gap",
]

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# slopes and quotients
# ---------------------------------------------------------------------------

def _slopes(dist: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Ascending slope max_z (f(z) - f(x))^+ / d(x, z) at every point."""
    q = (f[None, :] - f[:, None]) / np.where(dist > 0, dist, np.inf)
    np.fill_diagonal(q, -np.inf)
    return np.maximum(q.max(axis=1), 0.0)


def dual_slope(mm: MetricMeasureSpace, f, x: int | None = None):
    """Ascending slope of f, at one point or at every point (x=None)."""
    v = as_field(f, mm.n)
    if mm.n < 2:
        raise ValueError("slope needs at least two points")
    s = _slopes(mm.dist, v)
    return float(s[x]) if x is not None else s


def rayleigh_quotient(mm: MetricMeasureSpace, f) -> float:
    """Weighted squared ascending slope over the variance of f.

    Invariant under f -> c f + b for c > 0; raises on constant fields
    (zero denominator).
    """
    v = as_field(f, mm.n)
    w = mm.weights
    mu = float(w @ v)
    var = float(w @ (v - mu) ** 2)
    if var <= 0.0:
        raise ValueError("Rayleigh quotient of a constant field")
    num = float(w @ _slopes(mm.dist, v) ** 2)
    return num / var


# ---------------------------------------------------------------------------
# symmetric graph-Laplacian oracle (in-module Jacobi eigensolver)
# ---------------------------------------------------------------------------

def _jacobi_eigh(A: np.ndarray, rel_tol: float = 1e-12,
                 max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (eigenvalues ascending, eigenvector columns).  Thresholds are
    relative to the matrix scale, so the iteration is exactly equivariant
    under scalar rescaling.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = float(np.max(np.abs(A)))
    if scale == 0.0:
        return np.zeros(n), V
    skip = 1e-15 * scale
    for _ in range(max_sweeps):
        off = A - np.diag(np.diag(A))
        if float(np.max(np.abs(off))) <= rel_tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                vcol_p = V[:, p].copy()
                vcol_q = V[:, q].copy()
                V[:, p] = c * vcol_p - s * vcol_q
                V[:, q] = s * vcol_p + c * vcol_q
    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], V[:, order]


def _oracle_eigenpair(dist: np.ndarray, w: np.ndarray, k: int) -> tuple[float, np.ndarray]:
    """Spectral-gap eigenpair of the measure-normalized k-NN graph Laplacian.

    Directed weights w_i / (k d(i,j)^2) to the k nearest neighbors are
    symmetrized by summation, so each neighbor direction contributes its
    squared difference quotient with weight 1/k; the generalized problem
    L v = lambda diag(w) v is solved through the diag(w)^{-1/2} similarity.
    """
    n = dist.shape[0]
    if np.any(w <= 0):
        raise ValueError("oracle requires strictly positive measure weights")
    k = min(k, n - 1)
    W = np.zeros((n, n))
    for i in range(n):
        order = np.argsort(dist[i], kind="stable")
        neigh = [j for j in order if j != i][:k]
        for j in neigh:
            W[i, j] += w[i] / (k * dist[i, j] ** 2)
    S = W + W.T
    L = np.diag(S.sum(axis=1)) - S
    inv_sqrt = 1.0 / np.sqrt(w)
    B = L * inv_sqrt[:, None] * inv_sqrt[None, :]
    vals, vecs = _jacobi_eigh(B)
    lam = float(vals[1])
    v = vecs[:, 1] * inv_sqrt
    return lam, v


DEFAULT_ORACLE_K = 4


def symmetric_oracle(mm: MetricMeasureSpace, k: int = DEFAULT_ORACLE_K) -> float:
    """Spectral gap of the k-NN graph Laplacian on a symmetric space.

    A cross-check and initializer for the slope-based estimate, not ground
    truth for it; raises on asymmetric input.
    """
    if not mm.space.is_symmetric():
        raise ValueError("symmetric_oracle requires a symmetric space")
    lam, _ = _oracle_eigenpair(mm.dist, mm.weights, k)
    return lam


def symmetric_oracle_field(mm: MetricMeasureSpace, k: int = DEFAULT_ORACLE_K) -> ScalarField:
    """The gap eigenvector of the oracle Laplacian, as a scalar field."""
    if not mm.space.is_symmetric():
        raise ValueError("symmetric_oracle requires a symmetric space")
    _, v = _oracle_eigenpair(mm.dist, mm.weights, k)
    return ScalarField(v)


# ---------------------------------------------------------------------------
# slope-descent minimization of the Rayleigh quotient
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenEstimate:
    """Best Rayleigh quotient found; an upper bound of the discrete infimum,
    not a certified global minimum."""

    value: float
    certificate: ScalarField
    restarts: int
    strategy: str = "slope-descent"


_T_STAGES = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
_STAGE_STEPS = 30
_POLISH_STEPS = 30


def _normalized(f: np.ndarray, w: np.ndarray) -> np.ndarray | None:
    g = f - float(w @ f)
    var = float(w @ g ** 2)
    if var <= 0.0 or not math.isfinite(var):
        return None
    return g / math.sqrt(var)


def _exact_numerator(dist: np.ndarray, w: np.ndarray, f: np.ndarray) -> float:
    return float(w @ _slopes(dist, f) ** 2)


def _smooth_value_grad(dist: np.ndarray, w: np.ndarray, f: np.ndarray,
                       T: float) -> tuple[float, np.ndarray]:
    """Smoothed numerator and its gradient for a unit-variance field.

    The slope is replaced by T log(sum exp(q/T) + 1), the soft maximum of
    the positive difference quotients with a zero floor, evaluated in the
    shifted form that cannot overflow.
    """
    n = len(f)
    invd = 1.0 / np.where(dist > 0, dist, np.inf)
    q = (f[None, :] - f[:, None]) * invd
    np.fill_diagonal(q, -np.inf)
    m = np.maximum(q.max(axis=1), 0.0)
    e = np.exp((q - m[:, None]) / T)
    np.fill_diagonal(e, 0.0)
    z = e.sum(axis=1) + np.exp(-m / T)
    s = m + T * np.log(z)
    p = e / z[:, None]
    g_mat = (w * s)[:, None] * p * invd
    grad = 2.0 * (g_mat.sum(axis=0) - g_mat.sum(axis=1))
    return float(w @ s ** 2), grad


def _subgradient(dist: np.ndarray, w: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Exact subgradient of the squared-slope numerator (argmax selection)."""
    invd = 1.0 / np.where(dist > 0, dist, np.inf)
    q = (f[None, :] - f[:, None]) * invd
    np.fill_diagonal(q, -np.inf)
    arg = q.argmax(axis=1)
    s = np.maximum(q[np.arange(len(f)), arg], 0.0)
    grad = np.zeros_like(f)
    active = s > 0
    for x in np.nonzero(active)[0]:
        z = arg[x]
        coef = 2.0 * w[x] * s[x] * invd[x, z]
        grad[z] += coef
        grad[x] -= coef
    return grad


def _descend(dist: np.ndarray, w: np.ndarray, f0: np.ndarray) -> tuple[float, np.ndarray]:
    """Annealed smoothed descent from one start; returns the best exact
    (numerator, field) visited on the unit-variance sphere."""
    f = _normalized(f0, w)
    if f is None:
        return math.inf, f0
    slope_scale = float(_slopes(dist, f).max())
    if slope_scale <= 0.0:
        return math.inf, f
    best_val = _exact_numerator(dist, w, f)
    best_f = f.copy()
    for t_rel in _T_STAGES:
        T = t_rel * slope_scale
        eta = 0.25
        for _ in range(_STAGE_STEPS):
            _, grad = _smooth_value_grad(dist, w, f, T)
            gmax = float(np.max(np.abs(grad)))
            if gmax <= 0.0 or not math.isfinite(gmax):
                break
            cand = _normalized(f - eta * (grad / gmax), w)
            if cand is None:
                break
            f = cand
            val = _exact_numerator(dist, w, f)
            if val < best_val:
                best_val = val
                best_f = f.copy()
            eta *= 0.88
    f = best_f.copy()
    eta = 0.08
    for _ in range(_POLISH_STEPS):
        grad = _subgradient(dist, w, f)
        gmax = float(np.max(np.abs(grad)))
        if gmax <= 0.0:
            break
        cand = _normalized(f - eta * (grad / gmax), w)
        if cand is None:
            break
        f = cand
        val = _exact_numerator(dist, w, f)
        if val < best_val:
            best_val = val
            best_f = f.copy()
        eta *= 0.9
    return best_val, best_f


def first_eigenvalue(mm: MetricMeasureSpace, restarts: int = 32,
                     seed: int = 0) -> EigenEstimate:
    """Multi-start slope-descent estimate of the first eigenvalue.

    Starts are the symmetric-oracle eigenvector (on the symmetrized
    distances when the space is irreversible), the best distance cones, and
    random fields with amplitude equal to the diameter.  Deterministic given
    the seed; the returned value is the quotient of the certificate field.
    """
    if mm.n < 2:
        raise ValueError("need at least two points")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    dist = mm.dist
    w = mm.weights
    n = mm.n

    inits: list[np.ndarray] = []
    sym = 0.5 * (dist + dist.T)
    try:
        _, vec = _oracle_eigenpair(sym, w, DEFAULT_ORACLE_K)
        inits.append(vec)
    except ValueError:
        pass  # zero-weight points: skip the oracle start

    cones = [dist[p, :] for p in range(n)] + [-dist[:, p] for p in range(n)]
    ranked = []
    for v in cones:
        g = _normalized(v, w)
        if g is not None:
            ranked.append((_exact_numerator(dist, w, g), len(ranked), g))
    ranked.sort(key=lambda t: (t[0], t[1]))
    n_cone = min(len(ranked), max(0, (restarts - len(inits)) // 2))
    inits.extend(g for _, _, g in ranked[:n_cone])

    rng = np.random.default_rng(seed)
    amp = diameter(mm.space)
    while len(inits) < restarts:
        inits.append(rng.uniform(0.0, 1.0, n) * amp)
    inits = inits[:restarts]

    best_val = math.inf
    best_f = None
    for f0 in inits:
        val, f = _descend(dist, w, f0)
        if val < best_val:
            best_val = val
            best_f = f
    if best_f is None:
        raise RuntimeError("no usable start produced a nonconstant field")
    certificate = ScalarField(best_f)
    return EigenEstimate(rayleigh_quotient(mm, certificate), certificate, restarts)


# ---------------------------------------------------------------------------
# spectral concentration bounds and the mass-decay recursion
# ---------------------------------------------------------------------------

def alpha_bound_from_spectral_gap(lambda1: float, r: float) -> float:
    """Exponential concentration bound e^{-r sqrt(lambda1) log(2)/sqrt(2)}."""
    if lambda1 <= 0 or r <= 0:
        raise ValueError("lambda1 and r must be positive")
    return math.exp(-r * math.sqrt(lambda1) * (LOG2 / math.sqrt(2.0)))


@dataclass(frozen=True)
class GMStep:
    k: int
    a: float
    b: float
    lambda_f: float
    bound: float
    margin: float


@dataclass(frozen=True)
class GMDecayReport:
    """Iterated-enlargement mass decay driven by explicit test functions.

    Each step enlarges the current set backward by epsilon (closed
    enlargement: the iteration needs the complement at distance at least
    epsilon, which the closed form preserves while keeping the boundary
    points inside), builds the two-level test function for the
    (set, complement) pair, measures its Rayleigh quotient lambda_f, and
    asserts b_k <= (1 - a_k) / (1 + lambda_f eps^2 a_k).  A vanishing
    complement terminates the chain.
    """

    steps: tuple[GMStep, ...]
    terminated: str
    epsilon: float
    passed: bool

    @property
    def implied_rate(self) -> float | None:
        """Exponential rate implied by the worst per-step decay factor."""
        if not self.steps:
            return None
        worst = max(s.b / (1.0 - s.a) if s.a < 1.0 else 0.0 for s in self.steps)
        if worst <= 0.0:
            return math.inf
        return -math.log(worst) / self.epsilon


def spectral_mass_decay_check(mm: MetricMeasureSpace, A, epsilon: float,
                              max_steps: int | None = None) -> GMDecayReport:
    """Run the two-set recursion behind the spectral concentration bound.

    Starting from a half-mass set, repeatedly take the closed backward
    epsilon-enlargement; for every step with a nonempty complement, the
    explicit test function f = 1/a - (1/eps)(1/a + 1/b) min(d(., A_k), eps)
    is built, its Rayleigh quotient measured, and the decay inequality
    asserted with that quotient.  Degenerate steps (b_k = 0) terminate the
    chain and count as passes.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ps = as_pointset(A, mm.n)
    if len(ps) == 0:
        raise ValueError("empty starting set")
    w = mm.weights
    dist = mm.dist
    mask = np.zeros(mm.n, dtype=bool)
    mask[ps.array()] = True
    a0 = float(w[mask].sum())
    if a0 < 0.5:
        raise ValueError(f"starting set must have mass at least 1/2, got {a0}")
    if max_steps is None:
        max_steps = mm.n + 1

    closed_thr = epsilon + SNAP_RTOL * max(1.0, epsilon)
    steps: list[GMStep] = []
    terminated = "max steps reached"
    passed = True
    for k in range(max_steps):
        # distance from each point to the current set (backward direction)
        m_to_set = dist[:, mask].min(axis=1)
        next_mask = m_to_set <= closed_thr
        a_k = float(w[mask].sum())
        b_k = float(w[~next_mask].sum())
        if b_k <= 0.0 or not (~next_mask).any():
            steps.append(GMStep(k, a_k, b_k, math.nan, 1.0 - a_k, 1.0 - a_k - b_k))
            terminated = "complement exhausted"
            break
        coef = (1.0 / a_k + 1.0 / b_k) / epsilon
        f = 1.0 / a_k - coef * np.minimum(m_to_set, epsilon)
        lam_f = rayleigh_quotient(mm, f)
        bound = (1.0 - a_k) / (1.0 + lam_f * epsilon * epsilon * a_k)
        margin = bound - b_k
        steps.append(GMStep(k, a_k, b_k, lam_f, bound, float(margin)))
        if margin < -VERDICT_TOL:
            passed = False
        if not np.any(next_mask & ~mask):
            terminated = "enlargement stalled"
            break
        mask = next_mask
    return GMDecayReport(tuple(steps), terminated, float(epsilon), passed)


@dataclass(frozen=True)
class ChengInputs:
    """Inputs of the diameter-based eigenvalue upper bound.

    n is the manifold dimension (at least 2, the constants divide by
    sqrt(n-1)), a bounds the distortion, K bounds the weighted Ricci
    curvature from below, D is the diameter in length units.
    """

    n: int
    a: float
    K: float
    D: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        if self.a < 0:
            raise ValueError("distortion bound must be nonnegative")
        if self.D <= 0:
            raise ValueError("diameter must be positive")


def cheng_upper_bound(inputs: ChengInputs) -> float:
    """Cheng-type upper bound max(C1, C2) / D^2 for the first eigenvalue.

    C1 = 32 (n + 4a)^2 (2 + D sqrt(|K|) / (sqrt(n-1) log 2))^2 and
    C2 = 128 (n + 4a)^2 (3 + D sqrt(|K|) / (sqrt(n-1) log 2))^2 cover the
    two cases of the underlying ball-mass dichotomy, which is not observable
    from (n, a, K, D) alone, so the maximum is returned.
    """
    n, a, K, D = inputs.n, inputs.a, inputs.K, inputs.D
    shift = D * math.sqrt(abs(K)) / (math.sqrt(n - 1.0) * LOG2)
    base = (n + 4.0 * a) ** 2
    c1 = 32.0 * base * (2.0 + shift) ** 2
    c2 = 128.0 * base * (3.0 + shift) ** 2
    return max(c1, c2) / (D * D)


def obsdiam_bound_from_spectral_gap(lambda1: float, epsilon: float) -> float:
    """Observable diameter bound (2 sqrt(2)/log 2) log(2/eps) / sqrt(lambda1)."""
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie strictly between 0 and 1")
    return 2.0 * math.sqrt(2.0) / LOG2 * math.log(2.0 / epsilon) / math.sqrt(lambda1)
