"""The verification suite: every inequality check as one report entry.

Each suite entry gets an explicit status: "pass" or "fail" for checks whose
mathematics is exact on finite spaces, "inconclusive" for checks that
substitute the estimated eigenvalue (an upper bound of the true one, so a
violated strengthened inequality proves nothing), and "skipped" when a
precondition is missing (exact enumeration infeasible, no curvature
certificate, section not requested).  Failing entries carry a serialized
witness.  Reports are deterministic for fixed inputs and seed, regardless
of the worker thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .concentration import (
    EXACT_MAX_N,
    VERDICT_TOL,
    _upper_tails,
    alpha_profile,
    deviation_check,
    enlargement_check_from_tail_bound,
    fit_profile,
    lanczos_gamma,
    median_to_mean_tail_constants,
    mean,
    moment_bound_from_normal_tails,
    moment_norm,
    normal_equivalence_constants,
    tail_bound_from_first_moment,
    tail_bound_from_square_moments,
    tail_envelope,
)
from .io import space_hash
from .lipschitz import generate_family
from .observable import (
    observable_diameter,
    obsdiam_bound_exponential,
    obsdiam_bound_normal,
    obsdiam_vs_alpha_check,
)
from .isoperimetry import (
    gaussian_phi,
    normal_concentration_bound,
    obsdiam_bound_from_curvature,
    profile_enlargement_check,
)
from .quasimetric import MetricMeasureSpace
from .spectrum import (
    ChengInputs,
    alpha_bound_from_spectral_gap,
    cheng_upper_bound,
    first_eigenvalue,
    obsdiam_bound_from_spectral_gap,
    spectral_mass_decay_check,
)

__all__ = ["THEOREM_IDS", "SECTIONS", "VerifyEntry", "VerifyReport", "run_verify"]

THEOREM_IDS = (
    "mf3", "prop32.1", "prop32.2", "thm33", "thm37", "thm38", "thm39",
    "thm41", "obnor", "obex",
    "lem51", "lem52", "thm54", "cor55",
    "thm61", "gm_recursion", "cor62", "thm63",
)

SECTIONS = {
    "sec3": ("mf3", "prop32.1", "prop32.2", "thm33", "thm37", "thm38", "thm39"),
    "sec4": ("thm41", "obnor", "obex"),
    "sec5": ("lem51", "lem52", "thm54", "cor55"),
    "sec6": ("thm61", "gm_recursion", "cor62", "thm63"),
}

EPS_GRID = tuple(k / 10.0 for k in range(1, 10))


@dataclass(frozen=True)
class VerifyEntry:
    status: str          # pass | fail | inconclusive | skipped
    margin: float | None = None
    notes: str = ""
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"status": self.status, "margin": self.margin,
                "notes": self.notes, "witness": self.witness}


@dataclass
class VerifyReport:
    results: dict[str, VerifyEntry]
    meta: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(e.status == "fail" for e in self.results.values())

    def to_dict(self) -> dict:
        return {"meta": self.meta,
                "results": {k: self.results[k].to_dict() for k in THEOREM_IDS}}


def _check(margin: float, notes: str = "", witness: dict | None = None) -> VerifyEntry:
    ok = margin >= -VERDICT_TOL
    return VerifyEntry("pass" if ok else "fail", float(margin), notes, witness)


def _skip(reason: str) -> VerifyEntry:
    return VerifyEntry("skipped", None, reason)


class _SuiteContext:
    """Shared lazily-computed artifacts for one verification run."""

    def __init__(self, mm: MetricMeasureSpace, seed: int, restarts: int,
                 certified: dict | None, cheng: ChengInputs | None):
        self.mm = mm
        self.seed = seed
        self.restarts = restarts
        self.certified = certified or {}
        self.cheng = cheng
        self.exact_ok = mm.n <= EXACT_MAX_N
        self._family = None
        self._profile = None
        self._eigen = None

    @property
    def family(self):
        if self._family is None:
            self._family = generate_family(self.mm, count=2 * self.mm.n + 8,
                                           seed=self.seed)
        return self._family

    @property
    def profile(self):
        """Exact profile when feasible, family profile otherwise."""
        if self._profile is None:
            strategy = "exact" if self.exact_ok else "family"
            self._profile = alpha_profile(self.mm, strategy, family=self.family)
        return self._profile

    @property
    def eigen(self):
        if self._eigen is None:
            self._eigen = first_eigenvalue(self.mm, restarts=self.restarts,
                                           seed=self.seed)
        return self._eigen

    def scale(self) -> float:
        # just past the smallest attained distance: strict balls at exactly
        # the mesh step capture nothing and give zero contents
        d = self.mm.dist
        return float(d[d > 0].min()) * (1.0 + 1e-9)


# ---------------------------------------------------------------------------
# individual suite entries
# ---------------------------------------------------------------------------

def _run_mf3(ctx: _SuiteContext) -> VerifyEntry:
    if not ctx.exact_ok:
        return _skip(f"exact profile infeasible for n = {ctx.mm.n} > {EXACT_MAX_N}")
    worst = math.inf
    witness = None
    for k, f in enumerate(ctx.family):
        rep = deviation_check(ctx.mm, f, ctx.profile)
        m = min(rep.upper.margin, rep.lower.margin, rep.twosided.margin)
        if m < worst:
            worst = m
            witness = {"member": k}
    return _check(worst, "median deviation tails vs the doubled profile", witness)


def _run_prop32_1(ctx: _SuiteContext) -> VerifyEntry:
    if not ctx.exact_ok:
        return _skip(f"subset enumeration infeasible for n = {ctx.mm.n}")
    beta = tail_envelope(ctx.mm, family=ctx.family)
    rep = enlargement_check_from_tail_bound(ctx.mm, beta, family=ctx.family)
    if not rep.hypothesis_ok:
        return _skip("measured tail hypothesis not satisfied; conclusions not asserted")
    worst = min(rep.enlargement_margin, rep.alpha_margin)
    return _check(worst, rep.notes)


def _run_prop32_2(ctx: _SuiteContext) -> VerifyEntry:
    worst = math.inf
    for p in (1.0, 2.0, 3.0):
        g_err = abs(lanczos_gamma(1.0 / p + 1.0) - math.gamma(1.0 / p + 1.0)) \
            / math.gamma(1.0 / p + 1.0)
        worst = min(worst, 1e-10 - g_err)
        C_prime, kappa, c_p = median_to_mean_tail_constants(1.0, 1.0, p)
        direct = max(1.0, 1.0) * math.exp(c_p ** p)
        worst = min(worst, 1e-10 - abs(C_prime - direct) / direct)
        worst = min(worst, 1e-12 - abs(kappa - min(1.0, 2.0 ** (1.0 - p))))
    return _check(worst, "constant pipeline self-consistency and Gamma accuracy")


def _mean_tail_constants(ctx: _SuiteContext) -> tuple[float, float]:
    fit = fit_profile(ctx.profile, "normal")
    return normal_equivalence_constants("forward", fit.C, fit.c)


def _run_thm33(ctx: _SuiteContext) -> VerifyEntry:
    if not ctx.exact_ok:
        return _skip(f"certified exact fit infeasible for n = {ctx.mm.n}")
    C2, c2 = _mean_tail_constants(ctx)
    rs = ctx.profile.radii
    bound = C2 * np.exp(-c2 * rs ** 2)
    worst = math.inf
    witness = None
    for k, f in enumerate(ctx.family):
        dev = np.abs(f.values - mean(ctx.mm.measure, f.values))
        margins = bound - _upper_tails(ctx.mm.weights, dev, rs)
        j = int(np.argmin(margins))
        if margins[j] < worst:
            worst = float(margins[j])
            witness = {"member": k, "r": float(rs[j])}
    return _check(worst, "mean tails under the forward normal constants", witness)


def _run_thm37(ctx: _SuiteContext) -> VerifyEntry:
    if not ctx.exact_ok:
        return _skip(f"certified exact fit infeasible for n = {ctx.mm.n}")
    C2, c2 = _mean_tail_constants(ctx)
    worst = math.inf
    witness = None
    for q in (1.0, 2.0, 4.0, 8.0):
        bound = moment_bound_from_normal_tails(C2, c2, q)
        for k, f in enumerate(ctx.family):
            m = bound - moment_norm(ctx.mm, f, q)
            if m < worst:
                worst = m
                witness = {"member": k, "q": q}
    return _check(worst, "moment norms under the normal-tail moment bound", witness)


def _run_thm38(ctx: _SuiteContext) -> VerifyEntry:
    mm = ctx.mm
    qs = (1.0, 2.0, 4.0, 8.0)
    norms = {q: max(moment_norm(mm, f, q) for f in ctx.family) for q in qs}
    if any(v == 0 for v in norms.values()):
        return VerifyEntry("pass", 0.0, "all-constant family, trivial")
    C_star = min(q / norms[q] ** 2 for q in qs)
    rs = ctx.profile.radii
    devs = [np.abs(f.values - mean(mm.measure, f.values)) for f in ctx.family]
    tail_rows = [_upper_tails(mm.weights, dev, rs) for dev in devs]
    worst = math.inf
    skipped_pts = 0
    witness = None
    for j, r in enumerate(rs):
        regime, bound = tail_bound_from_square_moments(C_star, float(r))
        q_star = max(1.0, C_star * float(r) ** 2 / math.e)
        for k, f in enumerate(ctx.family):
            # Chebyshev at the optimal exponent needs the moment premise there
            if moment_norm(mm, f, q_star) ** 2 > (q_star / C_star) * (1 + 1e-9):
                skipped_pts += 1
                continue
            m = bound - float(tail_rows[k][j])
            if m < worst:
                worst = m
                witness = {"member": k, "r": float(r), "regime": regime}
    notes = "tail bounds from measured square-moment constants"
    if skipped_pts:
        notes += f"; {skipped_pts} points skipped (moment premise unmet at the optimal exponent)"
    return _check(worst if worst < math.inf else 0.0, notes, witness)


def _run_thm39(ctx: _SuiteContext) -> VerifyEntry:
    mm = ctx.mm
    first = max(moment_norm(mm, f, 1.0) for f in ctx.family)
    if first == 0:
        return VerifyEntry("pass", 0.0, "all-constant family, trivial")
    rs = ctx.profile.radii
    worst = math.inf
    witness = None
    tail_rows = [_upper_tails(mm.weights, np.abs(f.values - mean(mm.measure, f.values)), rs)
                 for f in ctx.family]
    for p in (1.0, 2.0, 4.0):
        C_p = 1.0 / first ** p
        bounds = np.minimum(1.0, np.array(
            [tail_bound_from_first_moment(C_p, p, float(r)) for r in rs]))
        for k, tails in enumerate(tail_rows):
            margins = bounds - tails
            j = int(np.argmin(margins))
            if margins[j] < worst:
                worst = float(margins[j])
                witness = {"member": k, "p": p, "r": float(rs[j])}
    return _check(worst, "linear tail decay from the measured first moment", witness)


def _run_thm41(ctx: _SuiteContext) -> VerifyEntry:
    if not ctx.exact_ok:
        return _skip(f"exact profile infeasible for n = {ctx.mm.n}")
    rep = obsdiam_vs_alpha_check(ctx.mm, EPS_GRID, family=ctx.family,
                                 profile=ctx.profile)
    return _check(rep.margin, rep.notes, rep.witness)


def _run_obsdiam_fit(ctx: _SuiteContext, model: str) -> VerifyEntry:
    if not ctx.exact_ok:
        return _skip(f"certified exact fit infeasible for n = {ctx.mm.n}")
    fit = fit_profile(ctx.profile, model)
    if not fit.certified:
        return _skip("no certified fit")
    bound_fn = obsdiam_bound_normal if model == "normal" else obsdiam_bound_exponential
    worst = math.inf
    witness = None
    for eps in EPS_GRID:
        obs = observable_diameter(ctx.mm, eps, ctx.family)
        m = bound_fn(fit.C, fit.c, eps) - obs.value
        if m < worst:
            worst = m
            witness = {"epsilon": eps, "obsdiam": obs.value}
    note = f"family observable diameter vs the {model}-fit closed form"
    if fit.degenerate:
        note += " (degenerate all-zero profile fit)"
    return _check(worst, note, witness)


def _lem51_radii(ctx: _SuiteContext, scale: float) -> np.ndarray:
    rs = ctx.profile.radii[ctx.profile.radii > scale]
    if rs.size == 0:
        rs = ctx.profile.radii[-1:]
    if rs.size > 24:
        rs = rs[:: -(-rs.size // 24)]
    return rs


def _run_lem51(ctx: _SuiteContext) -> VerifyEntry:
    K = ctx.certified.get("K", 0.0)
    if K <= 0:
        return _skip("no positive curvature certificate")
    scale = ctx.scale()
    rep = profile_enlargement_check(ctx.mm, scale, _lem51_radii(ctx, scale),
                                    K=K, family=ctx.family)
    if not rep.hypothesis_ok:
        return _skip(f"isoperimetric hypothesis not satisfied at scale {scale:.3g} "
                     f"(margin {rep.hypothesis_margin:.3g}); no assertion")
    note = f"enlargement growth with one mesh step of slack ({rep.subsets} subsets)"
    return _check(rep.conclusion_margin, note)


def _gate_lem51(ctx: _SuiteContext) -> bool:
    K = ctx.certified.get("K", 0.0)
    if K <= 0:
        return False
    scale = ctx.scale()
    rs = ctx.profile.radii[-1:]
    rep = profile_enlargement_check(ctx.mm, scale, rs, K=K, family=ctx.family)
    return rep.hypothesis_ok


def _run_lem52(ctx: _SuiteContext) -> VerifyEntry:
    K = ctx.certified.get("K", 0.0)
    if K <= 0:
        return _skip("no positive curvature certificate")
    if not _gate_lem51(ctx):
        return _skip("isoperimetric hypothesis certificate unavailable")
    scale = ctx.scale()
    sqrt_k = math.sqrt(K)
    worst = math.inf
    witness = None
    for r, a in zip(ctx.profile.radii, ctx.profile.alphas):
        shifted = max(float(r) - scale, 0.0)
        bound = 1.0 - gaussian_phi(sqrt_k * shifted)
        if bound - a < worst:
            worst = bound - a
            witness = {"r": float(r)}
    note = "Gaussian profile bound with one mesh step of slack"
    if ctx.profile.strategy == "family":
        note += "; family profile on the left (necessary-condition form)"
    return _check(worst, note, witness)


def _run_thm54(ctx: _SuiteContext, slack: float = 0.25) -> VerifyEntry:
    K = ctx.certified.get("K", 0.0)
    if K <= 0:
        return _skip("no positive curvature certificate")
    worst = math.inf
    witness = None
    for r, a in zip(ctx.profile.radii, ctx.profile.alphas):
        bound = normal_concentration_bound(K, float(r)) * (1.0 + slack)
        if bound - a < worst:
            worst = bound - a
            witness = {"r": float(r)}
    note = f"normal concentration bound with slack {slack}"
    if ctx.profile.strategy == "family":
        note += "; family profile on the left (necessary-condition form)"
    return _check(worst, note, witness)


def _run_cor55(ctx: _SuiteContext) -> VerifyEntry:
    K = ctx.certified.get("K", 0.0)
    if K <= 0:
        return _skip("no positive curvature certificate")
    worst = math.inf
    witness = None
    for eps in EPS_GRID:
        obs = observable_diameter(ctx.mm, eps, ctx.family)
        m = obsdiam_bound_from_curvature(K, eps) - obs.value
        if m < worst:
            worst = m
            witness = {"epsilon": eps}
    return _check(worst, "family observable diameter vs the curvature bound", witness)


def _run_thm61(ctx: _SuiteContext) -> VerifyEntry:
    lam = ctx.eigen.value
    worst = math.inf
    witness = None
    for r, a in zip(ctx.profile.radii, ctx.profile.alphas):
        m = alpha_bound_from_spectral_gap(lam, float(r)) - a
        if m < worst:
            worst = m
            witness = {"r": float(r)}
    if worst >= -VERDICT_TOL:
        return VerifyEntry("pass", float(worst),
                           "strengthened bound with the estimated eigenvalue")
    return VerifyEntry("inconclusive", float(worst),
                       "estimated eigenvalue overshoots; tighten the estimate",
                       witness)


def _run_gm(ctx: _SuiteContext) -> VerifyEntry:
    mm = ctx.mm
    lam = ctx.eigen.value
    eps = math.sqrt(2.0 / lam)
    order = np.argsort(mm.dist[0], kind="stable")
    cum = np.cumsum(mm.weights[order])
    k = int(np.searchsorted(cum, 0.5, side="left"))
    A = sorted(int(i) for i in order[:k + 1])
    rep = spectral_mass_decay_check(mm, A, eps)
    margin = min((s.margin for s in rep.steps), default=0.0)
    witness = None
    if not rep.passed:
        bad = min(rep.steps, key=lambda s: s.margin)
        witness = {"step": bad.k, "a": bad.a, "b": bad.b,
                   "lambda_f": bad.lambda_f, "epsilon": eps, "set": A}
    status = "pass" if rep.passed else "fail"
    return VerifyEntry(status, float(margin),
                       f"two-set recursion at epsilon = sqrt(2/lambda) ({rep.terminated})",
                       witness)


def _run_cor62(ctx: _SuiteContext) -> VerifyEntry:
    lam = ctx.eigen.value
    worst = math.inf
    witness = None
    for eps in EPS_GRID:
        obs = observable_diameter(ctx.mm, eps, ctx.family)
        m = obsdiam_bound_from_spectral_gap(lam, eps) - obs.value
        if m < worst:
            worst = m
            witness = {"epsilon": eps, "obsdiam": obs.value}
    if worst >= -VERDICT_TOL:
        return VerifyEntry("pass", float(worst),
                           "strengthened bound with the estimated eigenvalue")
    return VerifyEntry("inconclusive", float(worst),
                       "estimated eigenvalue overshoots; tighten the estimate",
                       witness)


def _run_thm63(ctx: _SuiteContext) -> VerifyEntry:
    if ctx.cheng is None:
        return _skip("no Cheng inputs (dimension, distortion, curvature, diameter)")
    bound = cheng_upper_bound(ctx.cheng)
    m = bound - ctx.eigen.value
    if m >= -VERDICT_TOL:
        return VerifyEntry("pass", float(m),
                           f"estimated eigenvalue {ctx.eigen.value:.6g} below the "
                           f"diameter bound {bound:.6g}")
    return VerifyEntry("inconclusive", float(m),
                       "estimated eigenvalue exceeds the bound; the estimate is an "
                       "upper bound of the true eigenvalue, so nothing is violated",
                       {"lambda_hat": ctx.eigen.value, "bound": bound})


_RUNNERS = {
    "mf3": _run_mf3,
    "prop32.1": _run_prop32_1,
    "prop32.2": _run_prop32_2,
    "thm33": _run_thm33,
    "thm37": _run_thm37,
    "thm38": _run_thm38,
    "thm39": _run_thm39,
    "thm41": _run_thm41,
    "obnor": lambda ctx: _run_obsdiam_fit(ctx, "normal"),
    "obex": lambda ctx: _run_obsdiam_fit(ctx, "exponential"),
    "lem51": _run_lem51,
    "lem52": _run_lem52,
    "thm54": _run_thm54,
    "cor55": _run_cor55,
    "thm61": _run_thm61,
    "gm_recursion": _run_gm,
    "cor62": _run_cor62,
    "thm63": _run_thm63,
}


def run_verify(mm: MetricMeasureSpace, sections=("sec3", "sec4", "sec5", "sec6"),
               seed: int = 0, threads: int = 1, restarts: int = 8,
               certified: dict | None = None,
               cheng: ChengInputs | None = None,
               space_label: str | None = None) -> VerifyReport:
    """Run the requested sections of the theorem suite on one space.

    Every suite member appears in the result with an explicit status; the
    members of unrequested sections are marked skipped.  ``certified``
    carries analytic curvature constants (catalog provenance), ``cheng`` the
    inputs of the diameter bound.  Deterministic given the seed; worker
    threads only parallelize independent entries and results are assembled
    in a fixed order.
    """
    sections = tuple(sections)
    unknown = [s for s in sections if s not in SECTIONS]
    if unknown:
        raise ValueError(f"unknown sections {unknown}; choose from {sorted(SECTIONS)}")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    if cheng is None and certified is not None:
        need = {"K", "a", "D", "dim"}
        if need <= set(certified):
            cheng = ChengInputs(int(certified["dim"]), float(certified["a"]),
                                float(certified["K"]), float(certified["D"]))
    ctx = _SuiteContext(mm, seed, restarts, certified, cheng)
    wanted = {tid for s in sections for tid in SECTIONS[s]}

    # shared artifacts are built up front so worker threads never race
    if any(t in wanted for t in ("mf3", "prop32.1", "thm33", "thm37", "thm38",
                                 "thm39", "thm41", "obnor", "obex", "lem51",
                                 "lem52", "thm54", "cor55", "thm61", "cor62")):
        _ = ctx.family
        _ = ctx.profile
    if any(t in wanted for t in ("thm61", "gm_recursion", "cor62", "thm63")):
        _ = ctx.eigen

    def run_one(tid: str) -> VerifyEntry:
        if tid not in wanted:
            return _skip("section not requested")
        return _RUNNERS[tid](ctx)

    if threads == 1:
        entries = {tid: run_one(tid) for tid in THEOREM_IDS}
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {tid: pool.submit(run_one, tid) for tid in THEOREM_IDS}
            entries = {tid: futures[tid].result() for tid in THEOREM_IDS}

    meta = {
        "seed": seed,
        "sections": list(sections),
        "space_hash": space_hash(mm),
        "space": space_label or "inline",
        "n": mm.n,
        "restarts": restarts,
        "tool_version": __version__,
    }
    return VerifyReport(entries, meta)
