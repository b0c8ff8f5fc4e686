"""Finite irreversible metric measure spaces.

An irreversible (quasi-)metric keeps positivity and the directed triangle
inequality but drops symmetry, so every subset has distinct forward and
backward r-neighborhoods. This module holds the dense-matrix representation,
the validator, shortest-path construction from weighted digraphs, and the
neighborhood and diameter primitives every other module builds on.

All types are immutable after construction and every operation is a pure
function, so everything here is safe to evaluate concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _dijkstra

__all__ = [
    "QuasiMetricSpace",
    "ProbabilityMeasure",
    "MetricMeasureSpace",
    "PointSet",
    "ViolationReport",
    "validate",
    "from_digraph",
    "forward_neighborhood",
    "backward_neighborhood",
    "reverse",
    "diameter",
    "random_mm_space",
]

# Strict-inequality ball membership snaps floating-point ties to "outside":
# a point at distance m belongs to the open r-ball only if m < r and
# |m - r| > SNAP_RTOL * max(1, r).  Radii are expected at the scale of the
# attained distances; radii below the snap tolerance collapse the ball.
SNAP_RTOL = 1e-12

MEASURE_ATOL = 1e-12


def snap_threshold(r: float | np.ndarray) -> float | np.ndarray:
    """Effective threshold for open-ball membership at radius r."""
    return r - SNAP_RTOL * np.maximum(1.0, r)


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class QuasiMetricSpace:
    """Finite point set with an asymmetric distance matrix.

    ``dist[i, j]`` is the distance from i to j.  The constructor enforces the
    cheap invariants (square, finite, zero diagonal, positive off-diagonal);
    the O(n^3) directed triangle inequality is checked by :func:`validate`.
    """

    dist: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        d = _frozen_array(self.dist)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("distance matrix has non-finite entries")
        if np.any(d < 0):
            raise ValueError("distance matrix has negative entries")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix has a nonzero diagonal entry")
        off = d + np.eye(d.shape[0])
        if np.any(off <= 0):
            raise ValueError("off-diagonal distances must be strictly positive")
        object.__setattr__(self, "dist", d)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != d.shape[0]:
                raise ValueError("label count does not match point count")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.dist - self.dist.T)) <= tol * max(1.0, float(self.dist.max())))


@dataclass(frozen=True)
class ProbabilityMeasure:
    """Nonnegative weights summing to one over the point set."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen_array(self.weights)
        if w.ndim != 1:
            raise ValueError("measure weights must be a vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("measure weights must be finite and nonnegative")
        if abs(float(w.sum()) - 1.0) > MEASURE_ATOL:
            raise ValueError(f"measure weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityMeasure":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, raw: Iterable[float]) -> "ProbabilityMeasure":
        w = np.asarray(list(raw), dtype=float)
        return cls(w / w.sum())

    def mass(self, members: Iterable[int]) -> float:
        idx = np.fromiter(members, dtype=int)
        return float(self.weights[idx].sum()) if idx.size else 0.0


@dataclass(frozen=True)
class MetricMeasureSpace:
    """A quasi-metric space together with a probability measure."""

    space: QuasiMetricSpace
    measure: ProbabilityMeasure

    def __post_init__(self):
        if self.space.n != self.measure.n:
            raise ValueError("measure length does not match point count")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dist(self) -> np.ndarray:
        return self.space.dist

    @property
    def weights(self) -> np.ndarray:
        return self.measure.weights

    @classmethod
    def with_uniform(cls, space: QuasiMetricSpace) -> "MetricMeasureSpace":
        return cls(space, ProbabilityMeasure.uniform(space.n))


@dataclass(frozen=True)
class PointSet:
    """Sorted, duplicate-free point indices into a space of size n."""

    members: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(i) for i in self.members)
        if any(b <= a for a, b in zip(m, m[1:])):
            raise ValueError("members must be strictly increasing")
        if m and m[0] < 0:
            raise ValueError("negative point index")
        object.__setattr__(self, "members", m)

    @classmethod
    def of(cls, members: Iterable[int], n: int | None = None) -> "PointSet":
        m = tuple(sorted(set(int(i) for i in members)))
        if n is not None and m and m[-1] >= n:
            raise ValueError(f"point index {m[-1]} out of range for n={n}")
        return cls(m)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i) -> bool:
        return int(i) in set(self.members)

    def array(self) -> np.ndarray:
        return np.asarray(self.members, dtype=int)


def as_pointset(A, n: int) -> PointSet:
    if isinstance(A, PointSet):
        if A.members and A.members[-1] >= n:
            raise ValueError("point index out of range")
        return A
    return PointSet.of(A, n)


@dataclass(frozen=True)
class ViolationReport:
    """Why a matrix is not a quasi-metric.

    ``triangles`` lists ordered triples (i, j, k) with
    dist(i, k) > dist(i, j) + dist(j, k); ``diagonal`` and ``positivity``
    list index pairs for nonzero d(i, i) and nonpositive d(i, j), i != j.
    Listing may be truncated at ``max_report`` entries per kind.
    """

    triangles: tuple[tuple[int, int, int], ...] = ()
    diagonal: tuple[int, ...] = ()
    positivity: tuple[tuple[int, int], ...] = ()
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not (self.triangles or self.diagonal or self.positivity)

    def __str__(self) -> str:
        lines = []
        for i in self.diagonal:
            lines.append(f"nonzero diagonal at ({i}, {i})")
        for i, j in self.positivity:
            lines.append(f"nonpositive off-diagonal distance at ({i}, {j})")
        for i, j, k in self.triangles:
            lines.append(f"triangle violation ({i}, {j}, {k}): d(i,k) > d(i,j) + d(j,k)")
        if self.truncated:
            lines.append("... report truncated")
        return "\n".join(lines) or "no violations"


def validate(
    matrix,
    rel_tol: float = 0.0,
    sampled: bool = False,
    seed: int = 0,
    max_report: int = 100,
    labels: Sequence[str] | None = None,
):
    """Check a matrix and return either a QuasiMetricSpace or a ViolationReport.

    The directed triangle inequality is checked exactly by default
    (``rel_tol=0``); pass a relative tolerance for spaces assembled from
    floating-point sums.  With ``sampled=True`` only 10*n^2 random triples
    are tested, for matrices too large for the O(n^3) scan.

    Raises ValueError for malformed input (non-square, NaN, negative).
    """
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {d.shape}")
    if np.any(np.isnan(d)) or not np.all(np.isfinite(d)):
        raise ValueError("matrix has NaN or non-finite entries")
    if np.any(d < 0):
        raise ValueError("matrix has negative entries")
    n = d.shape[0]

    diagonal = tuple(int(i) for i in np.nonzero(np.diag(d) != 0)[0][:max_report])
    offmask = ~np.eye(n, dtype=bool)
    bad_pos = np.argwhere((d <= 0) & offmask)
    positivity = tuple((int(i), int(j)) for i, j in bad_pos[:max_report])

    triangles: list[tuple[int, int, int]] = []
    truncated = len(np.nonzero(np.diag(d) != 0)[0]) > max_report or len(bad_pos) > max_report
    scale = max(1.0, float(d.max())) if n else 1.0
    slack = rel_tol * scale

    if sampled and n > 2:
        rng = np.random.default_rng(seed)
        m = 10 * n * n
        ii = rng.integers(0, n, m)
        jj = rng.integers(0, n, m)
        kk = rng.integers(0, n, m)
        bad = d[ii, kk] > d[ii, jj] + d[jj, kk] + slack
        for i, j, k in zip(ii[bad], jj[bad], kk[bad]):
            triangles.append((int(i), int(j), int(k)))
            if len(triangles) >= max_report:
                truncated = True
                break
    else:
        for j in range(n):
            # d(i,k) <= d(i,j) + d(j,k) for this middle point j
            bound = d[:, j][:, None] + d[j, :][None, :]
            bad = np.argwhere(d > bound + slack)
            for i, k in bad:
                triangles.append((int(i), int(j), int(k)))
                if len(triangles) >= max_report:
                    truncated = True
                    break
            if truncated:
                break

    report = ViolationReport(tuple(triangles), diagonal, positivity, truncated)
    if report.ok:
        return QuasiMetricSpace(d, tuple(labels) if labels is not None else None)
    return report


def from_digraph(edges: Iterable[tuple[int, int, float]], n: int,
                 labels: Sequence[str] | None = None) -> QuasiMetricSpace:
    """Shortest-directed-path metric of a strongly connected weighted digraph.

    ``edges`` are (i, j, weight) triples with weight > 0; parallel edges keep
    the cheapest weight.  Raises ValueError naming an unreachable pair if the
    digraph is not strongly connected.
    """
    rows, cols, vals = [], [], []
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            continue
        if not (w > 0) or not np.isfinite(w):
            raise ValueError(f"edge ({i}, {j}) has nonpositive weight {w}")
        rows.append(i)
        cols.append(j)
        vals.append(w)
    graph = csr_matrix((vals, (rows, cols)), shape=(n, n))
    # duplicate entries are summed by CSR construction; keep the min instead
    dup = {}
    for i, j, w in zip(rows, cols, vals):
        key = (i, j)
        if key not in dup or w < dup[key]:
            dup[key] = w
    if len(dup) != len(vals):
        rows = [i for i, _ in dup]
        cols = [j for _, j in dup]
        vals = [dup[k] for k in dup]
        graph = csr_matrix((vals, (rows, cols)), shape=(n, n))
    dist = _dijkstra(graph, directed=True)
    unreachable = np.argwhere(np.isinf(dist))
    if unreachable.size:
        i, j = unreachable[0]
        raise ValueError(f"digraph is not strongly connected: no path from {int(i)} to {int(j)}")
    np.fill_diagonal(dist, 0.0)
    return QuasiMetricSpace(dist, tuple(labels) if labels is not None else None)


def _min_forward(space: QuasiMetricSpace, idx: np.ndarray) -> np.ndarray:
    """min over z in A of d(z, x), as a vector over x."""
    return space.dist[idx, :].min(axis=0)


def _min_backward(space: QuasiMetricSpace, idx: np.ndarray) -> np.ndarray:
    """min over z in A of d(x, z), as a vector over x."""
    return space.dist[:, idx].min(axis=1)


def forward_neighborhood(space: QuasiMetricSpace, A, r: float) -> PointSet:
    """Open forward r-neighborhood {x : min_{z in A} d(z, x) < r}.

    Membership is strict; floating-point ties within the snap tolerance
    resolve to exclusion.
    """
    ps = as_pointset(A, space.n)
    if not len(ps):
        raise ValueError("neighborhood of an empty set")
    m = _min_forward(space, ps.array())
    return PointSet.of(np.nonzero(m < snap_threshold(float(r)))[0], space.n)


def backward_neighborhood(space: QuasiMetricSpace, A, r: float) -> PointSet:
    """Open backward r-neighborhood {x : min_{z in A} d(x, z) < r}."""
    ps = as_pointset(A, space.n)
    if not len(ps):
        raise ValueError("neighborhood of an empty set")
    m = _min_backward(space, ps.array())
    return PointSet.of(np.nonzero(m < snap_threshold(float(r)))[0], space.n)


def reverse(space: QuasiMetricSpace) -> QuasiMetricSpace:
    """The reversed space, dist'(i, j) = dist(j, i)."""
    return QuasiMetricSpace(space.dist.T.copy(), space.labels)


def diameter(space: QuasiMetricSpace, A=None) -> float:
    """max over ordered pairs (x, z) in A of d(x, z); the whole space by default."""
    if A is None:
        return float(space.dist.max())
    ps = as_pointset(A, space.n)
    if not len(ps):
        raise ValueError("diameter of an empty set")
    idx = ps.array()
    return float(space.dist[np.ix_(idx, idx)].max())


def breakpoint_radii(space: QuasiMetricSpace) -> np.ndarray:
    """Radii where step functions of r can change, both sides of each jump.

    Every attained positive distance d is paired with d + delta
    (delta = 1e-9 * diameter), so evaluating a profile on this grid captures
    the value at the jump and just after it; the final point lies beyond the
    diameter.
    """
    vals = np.unique(space.dist[space.dist > 0])
    if vals.size == 0:
        raise ValueError("space has no positive distances")
    delta = 1e-9 * float(vals.max())
    return np.unique(np.concatenate([vals, vals + delta]))


def random_mm_space(seed: int, n_low: int = 3, n_high: int = 12,
                    symmetric: bool = False) -> MetricMeasureSpace:
    """A random irreversible metric measure space from a weighted digraph.

    A directed cycle guarantees strong connectivity; extra random edges give
    the metric its asymmetry.  Weights of the random measure are strictly
    positive.  Deterministic in ``seed``.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_low, n_high + 1))
    edges = [(i, (i + 1) % n, float(rng.uniform(0.2, 1.2))) for i in range(n)]
    extra = int(rng.integers(n, 3 * n + 1))
    for _ in range(extra):
        i, j = rng.integers(0, n, 2)
        if i != j:
            edges.append((int(i), int(j), float(rng.uniform(0.2, 1.2))))
    if symmetric:
        edges = edges + [(j, i, w) for i, j, w in edges]
    space = from_digraph(edges, n)
    if symmetric:
        d = 0.5 * (space.dist + space.dist.T)
        space = QuasiMetricSpace(d)
    w = rng.uniform(0.1, 1.0, n)
    return MetricMeasureSpace(space, ProbabilityMeasure(w / w.sum()))
