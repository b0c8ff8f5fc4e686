"""Concentration profiles, deviation inequalities, moments, constants, fits."""
import math

import numpy as np
import pytest

from ccmm.concentration import (
    ConcentrationProfile,
    SampledDecreasing,
    alpha,
    alpha_profile,
    check_linear_tail_decay,
    check_moment_concentration,
    deviation_check,
    enlargement_check_from_tail_bound,
    fit_profile,
    lanczos_gamma,
    median_to_mean_tail_constants,
    moment_bound_from_normal_tails,
    moment_norm,
    normal_equivalence_constants,
    tail_bound_from_first_moment,
    tail_bound_from_square_moments,
    tail_envelope,
)
from ccmm.lipschitz import generate_family
from ccmm.quasimetric import (
    MetricMeasureSpace,
    ProbabilityMeasure,
    random_mm_space,
    reverse,
    validate,
)
from oracles import alpha_bruteforce


def two_point_uniform():
    return MetricMeasureSpace.with_uniform(validate([[0, 1], [1, 0]]))


# ---------------------------------------------------------------------------
# alpha
# ---------------------------------------------------------------------------

def test_alpha_two_point_values():
    mm = two_point_uniform()
    assert alpha(mm, 0.5) == 0.5
    assert alpha(mm, 1.5) == 0.0


def test_alpha_beyond_diameter_is_zero():
    mm = random_mm_space(9)
    assert alpha(mm, float(mm.dist.max()) * 1.01) == 0.0


def test_alpha_exact_matches_bruteforce():
    for seed in range(6):
        mm = random_mm_space(seed, n_low=3, n_high=7)
        for r in (0.3, 0.7, 1.1, 1.9):
            assert alpha(mm, r) == pytest.approx(alpha_bruteforce(mm, r), abs=1e-12)


def test_alpha_exact_rejects_large_n():
    mm = random_mm_space(0)
    big = MetricMeasureSpace.with_uniform(
        validate(np.ones((17, 17)) - np.eye(17)))
    with pytest.raises(ValueError, match="n <= 16"):
        alpha(big, 0.5, "exact")


def test_alpha_bounded_by_half_and_monotone():
    for seed in range(10):
        mm = random_mm_space(seed)
        prof = alpha_profile(mm)
        assert np.all(prof.alphas <= 0.5 + 1e-15)
        assert np.all(np.diff(prof.alphas) <= 1e-15)
        assert prof.alphas[-1] == 0.0


def test_alpha_reversal_invariance():
    for seed in range(8):
        mm = random_mm_space(seed, n_low=3, n_high=10)
        rev = MetricMeasureSpace(reverse(mm.space), mm.measure)
        prof = alpha_profile(mm)
        prof_rev = alpha_profile(rev)
        assert np.array_equal(prof.alphas, prof_rev.alphas)


def test_family_below_exact_and_equal_on_tiny():
    for seed in range(12):
        mm = random_mm_space(seed, n_low=3, n_high=9)
        fam = generate_family(mm, count=2 * mm.n + 4, seed=seed)
        pe = alpha_profile(mm, "exact")
        pf = alpha_profile(mm, "family", family=fam)
        assert np.all(pf.alphas <= pe.alphas + 1e-12)
    for seed in range(20):
        mm = random_mm_space(seed, n_low=2, n_high=3)
        pe = alpha_profile(mm, "exact")
        pf = alpha_profile(mm, "family")
        assert np.allclose(pf.alphas, pe.alphas, atol=1e-12)


def test_two_point_profile_single_plateau():
    prof = alpha_profile(two_point_uniform())
    positive = prof.alphas[prof.alphas > 0]
    assert len(set(positive.tolist())) == 1


def test_profile_value_at_step_semantics():
    prof = alpha_profile(two_point_uniform())
    assert prof.value_at(0.2) == 0.5
    assert prof.value_at(1.0) == 0.5
    assert prof.value_at(1.0 + 1e-6) == 0.0
    assert prof.value_at(7.0) == 0.0
    with pytest.raises(ValueError):
        prof.value_at(0.0)


# ---------------------------------------------------------------------------
# deviation inequalities
# ---------------------------------------------------------------------------

def test_deviation_two_point_hand_value():
    mm = two_point_uniform()
    prof = alpha_profile(mm)
    rep = deviation_check(mm, [0.0, 1.0], prof)
    assert rep.passed
    assert rep.lipschitz == 1.0
    # hand values at r = 1: mu(|f - median| >= 1) = 1/2 <= 2 alpha(1) = 1
    f = np.array([0.0, 1.0])
    tail = float(mm.weights[np.abs(f - 0.0) >= 1.0].sum())
    assert tail == 0.5
    assert 2 * prof.value_at(1.0) == 1.0


def test_deviation_constant_field():
    mm = random_mm_space(1)
    rep = deviation_check(mm, np.zeros(mm.n), alpha_profile(mm))
    assert rep.passed


def test_deviation_family_holds_exhaustively():
    for seed in range(25):
        mm = random_mm_space(seed, n_low=3, n_high=10)
        prof = alpha_profile(mm)
        fam = generate_family(mm, count=2 * mm.n + 4, seed=seed)
        for f in fam:
            assert deviation_check(mm, f, prof).passed


def test_deviation_refuses_family_profile():
    mm = random_mm_space(2)
    prof = alpha_profile(mm, "family")
    with pytest.raises(ValueError, match="exact"):
        deviation_check(mm, mm.dist[0], prof)


# ---------------------------------------------------------------------------
# moments and tail decay
# ---------------------------------------------------------------------------

def test_moment_norm_examples():
    mm = two_point_uniform()
    assert moment_norm(mm, [3.0, 3.0], 2) == 0.0
    assert moment_norm(mm, [0.0, 2.0], 2) == 1.0
    # q = 1 is the mean absolute deviation
    rng = np.random.default_rng(0)
    f = rng.normal(size=2)
    mu = f.mean()
    assert moment_norm(mm, f, 1) == pytest.approx(np.abs(f - mu).mean(), rel=1e-14)
    with pytest.raises(ValueError):
        moment_norm(mm, f, 0.5)


def test_check_moment_concentration_reports_largest():
    mm = two_point_uniform()
    fam = generate_family(mm)
    rep = check_moment_concentration(mm, fam, p=2, q=2, C=1.0)
    assert rep.holds
    # the family contains fields of deviation norm 1/2 only
    largest = rep.largest_constant
    assert check_moment_concentration(mm, fam, 2, 2, largest).holds
    assert not check_moment_concentration(mm, fam, 2, 2, 1.01 * largest).holds


def test_moment_constant_two_point_hand_value():
    # single field (0, 2): deviation norm 1, so the largest constant is
    # q / norm^p = 2; constant-only families admit every constant
    mm = two_point_uniform()
    from ccmm.lipschitz import LipschitzFamily, ScalarField
    fam = LipschitzFamily((ScalarField(np.array([0.0, 2.0])),), ("user",))
    rep = check_moment_concentration(mm, fam, p=2, q=2, C=1.0)
    assert rep.holds
    assert rep.largest_constant == pytest.approx(2.0, rel=1e-12)
    flat = LipschitzFamily((ScalarField(np.array([3.0, 3.0])),), ("user",))
    rep = check_moment_concentration(mm, flat, p=2, q=2, C=1e12)
    assert rep.holds and rep.largest_constant == math.inf


def test_linear_tail_decay_equality_case():
    mm = two_point_uniform()
    from ccmm.lipschitz import LipschitzFamily, ScalarField
    fam = LipschitzFamily((ScalarField(np.array([0.0, 1.0])),), ("user",))
    # f = (0, 2) scaled: use raw grid check at C = 1, r = 1 on values (0, 2)
    rep = check_linear_tail_decay(mm, fam, C=2.0, r_grid=[0.5])
    # mu(|f - 1/2| >= 1/2) = 1 <= 1/(2 * 0.5) = 1, equality
    assert rep.passed
    assert rep.margin == pytest.approx(0.0, abs=1e-12)


def test_linear_tail_decay_trivial_regimes():
    mm = random_mm_space(4)
    fam = generate_family(mm)
    big_r = 1000.0 / float(mm.dist.max())
    assert check_linear_tail_decay(mm, fam, C=1e-6, r_grid=[big_r]).passed


# ---------------------------------------------------------------------------
# the enlargement transfer (measured tail hypothesis)
# ---------------------------------------------------------------------------

def test_transfer_with_trivial_beta():
    mm = random_mm_space(3, n_low=3, n_high=8)
    rep = enlargement_check_from_tail_bound(mm, lambda s: np.ones_like(s))
    assert rep.hypothesis_ok and rep.passed


def test_transfer_with_measured_envelope():
    for seed in range(10):
        mm = random_mm_space(seed, n_low=3, n_high=9)
        fam = generate_family(mm, count=2 * mm.n + 8, seed=seed)
        beta = tail_envelope(mm, family=fam)
        rep = enlargement_check_from_tail_bound(mm, beta, family=fam)
        assert rep.hypothesis_ok
        assert rep.conclusions_asserted
        assert rep.passed, (seed, rep)


def test_transfer_rejects_low_beta():
    mm = random_mm_space(5, n_low=4, n_high=8)
    rep = enlargement_check_from_tail_bound(mm, lambda s: np.zeros_like(s))
    assert not rep.hypothesis_ok
    assert not rep.conclusions_asserted


def test_sampled_decreasing_evaluation():
    sd = SampledDecreasing(np.array([1.0, 2.0]), np.array([0.4, 0.1]))
    assert sd(0.5) == 1.0
    assert sd(1.0) == 0.4
    assert sd(1.5) == 0.4
    assert sd(3.0) == 0.1
    with pytest.raises(ValueError):
        SampledDecreasing(np.array([1.0, 2.0]), np.array([0.1, 0.4]))


# ---------------------------------------------------------------------------
# explicit constants (hand-derived frozen values)
# ---------------------------------------------------------------------------

def test_gamma_against_stdlib():
    xs = np.linspace(0.51, 5.0, 200)
    errs = [abs(lanczos_gamma(x) - math.gamma(x)) / math.gamma(x) for x in xs]
    assert max(errs) < 1e-10


def test_median_to_mean_constants():
    C1, kappa1, c1 = median_to_mean_tail_constants(1.0, 1.0, 1.0)
    assert kappa1 == 1.0
    assert c1 == pytest.approx(1.0, rel=1e-9)
    assert C1 == pytest.approx(math.e, rel=1e-9)
    C2, kappa2, c2 = median_to_mean_tail_constants(1.0, 1.0, 2.0)
    assert kappa2 == 0.5
    assert c2 == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-9)
    assert c2 == pytest.approx(0.8862269254527580, rel=1e-9)


def test_normal_equivalence_constants():
    C2, c2 = normal_equivalence_constants("forward", 0.5, 2.0)
    assert C2 == pytest.approx(math.exp(math.pi / 4.0), rel=1e-9)
    assert C2 == pytest.approx(2.1932800507380155, rel=1e-9)
    assert c2 == 1.0
    C, c = normal_equivalence_constants("backward", 1.7, 4.0)
    assert (C, c) == (1.7, 1.0)


def test_moment_bound_value_and_scaling():
    v = moment_bound_from_normal_tails(1.0, 1.0, 1.0)
    assert v == pytest.approx(
        math.sqrt(2 * math.pi) * math.exp(1 / (4 * math.e) - 0.5), rel=1e-12)
    assert v == pytest.approx(1.6668046219284187, rel=1e-9)
    assert moment_bound_from_normal_tails(1.0, 1.0, 4.0) == pytest.approx(2 * v, rel=1e-12)
    assert moment_bound_from_normal_tails(1.0, 4.0, 1.0) == pytest.approx(v / 2, rel=1e-12)


def test_tail_from_square_moments_regimes():
    regime, v = tail_bound_from_square_moments(math.e, 1.0)
    assert regime == "normal"
    assert v == pytest.approx(math.exp(-0.5), rel=1e-9)
    regime, v = tail_bound_from_square_moments(math.e, 2.0)
    assert regime == "normal" and v == pytest.approx(math.exp(-2.0), rel=1e-9)
    regime, v = tail_bound_from_square_moments(math.e, 0.5)
    assert regime == "linear" and v == pytest.approx(math.exp(-0.5) / 0.5, rel=1e-9)


def test_tail_from_first_moment():
    assert tail_bound_from_first_moment(1.0, 3.0, 2.0) == 0.5
    assert tail_bound_from_first_moment(16.0, 4.0, 2.0) == pytest.approx(0.25, rel=1e-12)
    assert tail_bound_from_first_moment(4.0, 2.0, 1.0) == pytest.approx(0.5, rel=1e-12)


# ---------------------------------------------------------------------------
# profile fits
# ---------------------------------------------------------------------------

def test_fit_recovers_exact_model():
    rs = np.linspace(0.2, 3.0, 12)
    for model, p in (("normal", 2), ("exponential", 1)):
        al = 0.37 * np.exp(-0.9 * rs ** p)
        prof = ConcentrationProfile(rs, np.minimum(al, 0.5), model_strategy := "exact")
        fit = fit_profile(prof, model)
        assert fit.certified
        assert fit.C == pytest.approx(0.37, rel=1e-9)
        assert fit.c == pytest.approx(0.9, rel=1e-9)


def test_fit_always_dominates():
    for seed in range(10):
        mm = random_mm_space(seed)
        prof = alpha_profile(mm)
        for model in ("normal", "exponential"):
            fit = fit_profile(prof, model)
            assert fit.certified
            assert np.all(fit.bound(prof.radii) >= prof.alphas - 1e-15)


def test_fit_two_point_plateau():
    prof = alpha_profile(two_point_uniform())
    fit = fit_profile(prof, "exponential")
    assert fit.certified
    assert fit.C >= 0.5 * math.exp(fit.c * 1.0) - 1e-12


def test_fit_degenerate_all_zero():
    mm = MetricMeasureSpace(validate([[0, 1], [1, 0]]), ProbabilityMeasure([1.0, 0.0]))
    prof = alpha_profile(mm)
    assert np.all(prof.alphas == 0.0)
    fit = fit_profile(prof, "normal")
    assert fit.degenerate and fit.certified and fit.C == 0.5


def test_thm37_chain_end_to_end():
    # certified normal fit -> forward constants -> moment bound, q in {1,2,4,8}
    for seed in range(10):
        mm = random_mm_space(seed, n_low=3, n_high=10)
        prof = alpha_profile(mm)
        fit = fit_profile(prof, "normal")
        C2, c2 = normal_equivalence_constants("forward", fit.C, fit.c)
        fam = generate_family(mm, count=2 * mm.n + 4, seed=seed)
        for q in (1, 2, 4, 8):
            bound = moment_bound_from_normal_tails(C2, c2, q)
            for f in fam:
                assert moment_norm(mm, f, q) <= bound * (1 + 1e-9)
