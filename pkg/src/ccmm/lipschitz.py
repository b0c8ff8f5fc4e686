"""Lipschitz constants, medians, means, and 1-Lipschitz test families.

On an irreversible metric the Lipschitz condition is one-sided,
f(z) - f(x) <= L d(x, z), so the constant is a maximum over ordered pairs.
The generated families (distance cones plus inf-convolution regularizations
of random fields) are the search space used by the concentration and
observable-diameter suprema downstream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quasimetric import (
    MetricMeasureSpace,
    ProbabilityMeasure,
    QuasiMetricSpace,
    _frozen_array,
    diameter,
)

__all__ = [
    "ScalarField",
    "LipschitzFamily",
    "as_field",
    "lipschitz_constant",
    "is_lipschitz",
    "median",
    "mean",
    "inf_convolution",
    "generate_family",
]

LIPSCHITZ_TOL = 1e-10


@dataclass(frozen=True)
class ScalarField:
    """One real value per point of a space."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.ndim != 1:
            raise ValueError("scalar field must be a vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("scalar field has non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def as_field(f, n: int) -> np.ndarray:
    """Coerce a ScalarField or array-like to a validated length-n vector."""
    v = f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"field has shape {v.shape}, expected ({n},)")
    if not np.all(np.isfinite(v)):
        raise ValueError("field has non-finite entries")
    return v


@dataclass(frozen=True)
class LipschitzFamily:
    """A list of certified 1-Lipschitz fields with provenance tags.

    Tags are one of "distance-to-point", "negative-distance-from-point",
    "inf-convolution", "user".
    """

    fields: tuple[ScalarField, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.fields) != len(self.tags):
            raise ValueError("one tag per field required")

    def __len__(self) -> int:
        return len(self.fields)

    def __iter__(self):
        return iter(self.fields)

    def matrix(self) -> np.ndarray:
        """All members stacked as rows."""
        return np.array([f.values for f in self.fields])


def lipschitz_constant(space: QuasiMetricSpace, f) -> float:
    """Smallest L with f(z) - f(x) <= L d(x, z) over ordered pairs x != z."""
    v = as_field(f, space.n)
    if space.n < 2:
        return 0.0
    diff = v[None, :] - v[:, None]  # diff[x, z] = f(z) - f(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = diff / space.dist
    np.fill_diagonal(q, -np.inf)
    return max(0.0, float(q.max()))


def is_lipschitz(space: QuasiMetricSpace, f, L: float = 1.0,
                 tol: float = LIPSCHITZ_TOL) -> bool:
    return lipschitz_constant(space, f) <= L + tol


def median(measure: ProbabilityMeasure, f) -> float:
    """Lower median: the smallest attained value m with mu(f <= m) >= 1/2
    and mu(f >= m) >= 1/2."""
    v = as_field(f, measure.n)
    order = np.argsort(v, kind="stable")
    vs = v[order]
    ws = measure.weights[order]
    below = np.cumsum(ws)                      # mu(f <= vs[i])
    above = 1.0 - below + ws                   # mu(f >= vs[i])
    ok = (below >= 0.5 - 1e-15) & (above >= 0.5 - 1e-15)
    idx = np.nonzero(ok)[0]
    if idx.size == 0:  # only possible through rounding of the cumulative sums
        idx = np.array([np.argmin(np.abs(below - 0.5))])
    return float(vs[idx[0]])


def mean(measure: ProbabilityMeasure, f) -> float:
    """Measure-weighted average of f."""
    v = as_field(f, measure.n)
    return float(measure.weights @ v)


def inf_convolution(space: QuasiMetricSpace, g) -> ScalarField:
    """McShane-type 1-Lipschitz regularization f(x) = min_z (g(z) + d(z, x)).

    Fixed points of the construction are exactly the 1-Lipschitz fields.
    """
    v = as_field(g, space.n)
    return ScalarField((v[:, None] + space.dist).min(axis=0))


def generate_family(mm: MetricMeasureSpace, count: int | None = None,
                    seed: int = 0) -> LipschitzFamily:
    """Deterministic 1-Lipschitz family of the given size.

    Always contains d(p, .) and -d(., p) for every point p; the remaining
    count - 2n members are inf-convolutions of uniform random fields with
    amplitude equal to the space diameter (larger amplitudes collapse to
    distance cones under the convolution and are wasted samples).
    """
    n = mm.n
    if count is None:
        count = 2 * n
    if count < 2 * n:
        raise ValueError(f"count must be at least 2n = {2 * n}")
    fields: list[ScalarField] = []
    tags: list[str] = []
    for p in range(n):
        fields.append(ScalarField(mm.dist[p, :].copy()))
        tags.append("distance-to-point")
    for p in range(n):
        fields.append(ScalarField(-mm.dist[:, p].copy()))
        tags.append("negative-distance-from-point")
    rng = np.random.default_rng(seed)
    amp = diameter(mm.space)
    for _ in range(count - 2 * n):
        raw = rng.uniform(0.0, 1.0, n) * amp
        fields.append(inf_convolution(mm.space, raw))
        tags.append("inf-convolution")
    fam = LipschitzFamily(tuple(fields), tuple(tags))
    for f in fam.fields:
        if not is_lipschitz(mm.space, f):
            raise AssertionError("generated family member failed 1-Lipschitz certification")
    return fam
