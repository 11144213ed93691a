import math

import numpy as np
import pytest

from steinfit.characterization import (
    OperatorKind,
    check_conditions,
    default_operator,
    density_identity,
    empirical_T_min,
    empirical_T_zero_bias,
    exact_T,
    fixed_point_residual,
    stein_expectation,
)
from steinfit.characterization import test_function_ftp as ftp_value
from steinfit.distributions import (
    DomainError,
    RngStream,
    cdf,
    make_distribution,
    pdf,
    quantile,
    sample,
    score,
)


def burr(k, c):
    return make_distribution("burr_xii", k=k, c=c)


EXP1 = make_distribution("exponential", lam=1.0)
EXP2 = make_distribution("exponential", lam=2.0)
UNIFORM = make_distribution("uniform", left=0.0, right=1.0)


# --------------------------------------------------------------------------
# empirical operators
# --------------------------------------------------------------------------

def test_empirical_T_min_hand_values():
    b = burr(1, 1)
    fn = lambda v: score(b, v)
    assert empirical_T_min([1.0], fn, 2.0, 0.0) == pytest.approx(1.0, abs=1e-14)
    exp_score = lambda v: score(EXP1, v)
    assert empirical_T_min([2.0], exp_score, 1.0, 0.0) == pytest.approx(1.0, abs=1e-14)
    assert empirical_T_min([1.0, 3.0], exp_score, 2.0, 0.0) == pytest.approx(1.5, abs=1e-14)


def test_empirical_T_min_domain_errors():
    fn = lambda v: -np.ones_like(v)
    with pytest.raises(DomainError):
        empirical_T_min([0.5, -1.0], fn, 1.0, 0.0)
    with pytest.raises(DomainError):
        empirical_T_min([0.5], fn, -0.1, 0.0)


def test_empirical_T_min_piecewise_linear():
    rng = np.random.default_rng(0)
    x = np.sort(rng.uniform(0.2, 3.0, size=9))
    fn = lambda v: score(burr(2, 1.5), v)
    # linear between consecutive order statistics: midpoint equals chord
    for lo, hi in zip(x[:-1], x[1:]):
        mid = 0.5 * (lo + hi)
        chord = 0.5 * (empirical_T_min(x, fn, lo, 0.0) + empirical_T_min(x, fn, hi, 0.0))
        assert empirical_T_min(x, fn, mid, 0.0) == pytest.approx(chord, rel=1e-12)
    # constant beyond the max
    top = empirical_T_min(x, fn, x[-1], 0.0)
    assert empirical_T_min(x, fn, x[-1] + 5.0, 0.0) == pytest.approx(top, rel=1e-12)
    # continuity across a breakpoint
    eps = 1e-9
    assert empirical_T_min(x, fn, x[3] - eps, 0.0) == pytest.approx(
        empirical_T_min(x, fn, x[3] + eps, 0.0), abs=1e-7)


def test_empirical_T_zero_bias_hand_values():
    assert empirical_T_zero_bias([0.0], 1.0, 1.0) == 0.0
    assert empirical_T_zero_bias([-1.0, 1.0], 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert empirical_T_zero_bias([-1.0, 1.0], 2.0, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_law_of_large_numbers_hook():
    dist = make_distribution("gamma", k=2.0, lam=1.0)
    s = sample(dist, 100_000, RngStream(99, 1))
    fn = lambda v: score(dist, v)
    for u in (0.1, 0.3, 0.5, 0.7, 0.9):
        t = float(quantile(dist, u))
        est = empirical_T_min(s, fn, t, 0.0)
        exact = exact_T(dist, None, t)
        terms = -score(dist, s.values) * np.minimum(s.values, t)
        se = terms.std() / math.sqrt(s.n)
        assert abs(est - exact) <= 4 * se


# --------------------------------------------------------------------------
# exact operators and fixed points
# --------------------------------------------------------------------------

def test_exact_T_hand_values():
    assert exact_T(EXP1, None, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-9)
    kind = default_operator(UNIFORM)
    assert kind.variant == "bounded_right_limit"
    assert exact_T(UNIFORM, kind, 0.3) == pytest.approx(0.3, abs=1e-12)
    b = burr(2, 3)
    assert exact_T(b, None, 0.7) == pytest.approx(cdf(b, 0.7), abs=1e-9)


def test_fixed_point_residual_weibull_lognormal():
    assert fixed_point_residual(make_distribution("weibull", k=1.5, lam=1.0)) <= 1e-6
    assert fixed_point_residual(make_distribution("lognormal", mu=0.0, sigma=1.0)) <= 1e-6


def test_mismatched_law_residual():
    # operator of Exp(1) evaluated under Exp(2) data: E[min{X,t}] = (1-e^{-2t})/2
    val = exact_T(EXP1, None, 1.0, under=EXP2)
    assert val == pytest.approx((1 - math.exp(-2)) / 2, abs=1e-9)
    assert abs(val - cdf(EXP2, 1.0)) > 0.1
    assert fixed_point_residual(EXP1, under=EXP2) > 0.1


SEPARATION_PAIRS = [
    (EXP1, EXP2),
    (make_distribution("gamma", k=2, lam=1), make_distribution("gamma", k=3, lam=1)),
    (make_distribution("weibull", k=1.5, lam=1), make_distribution("gamma", k=2, lam=1)),
    (burr(1, 1), burr(2, 1)),
    (burr(2, 2), make_distribution("lognormal", mu=0, sigma=1)),
    (make_distribution("normal", mu=0, sigma2=1), make_distribution("normal", mu=0, sigma2=2)),
    (make_distribution("laplace", mu=0, sigma=1), make_distribution("normal", mu=0, sigma2=1)),
    (make_distribution("lognormal", mu=0, sigma=1), make_distribution("lognormal", mu=0.5, sigma=1)),
    (make_distribution("beta", alpha=2, beta=3), make_distribution("beta", alpha=3, beta=2)),
    (UNIFORM, make_distribution("beta", alpha=2, beta=2)),
    (make_distribution("inverse_gaussian", mu=1, lam=1), make_distribution("gamma", k=1.5, lam=0.8)),
]


@pytest.mark.parametrize("op_dist,law", SEPARATION_PAIRS)
def test_separation_of_mismatched_pairs(op_dist, law):
    assert fixed_point_residual(op_dist, under=law, quad_tol=1e-8) > 0.01


def test_density_identity():
    assert density_identity(EXP1, 1.0) == pytest.approx(math.exp(-1), abs=1e-9)
    g = make_distribution("gamma", k=2.0, lam=1.0)
    assert density_identity(g, 1.0) == pytest.approx(pdf(g, 1.0), abs=1e-8)
    # uniform: score vanishes, the endpoint limit alone reproduces the density
    kind = default_operator(UNIFORM)
    assert density_identity(UNIFORM, 0.37, kind) == pytest.approx(1.0, abs=1e-12)


# --------------------------------------------------------------------------
# test function and the density-approach identity
# --------------------------------------------------------------------------

def test_ftp_hand_value():
    val = ftp_value(EXP1, 1.0, 0.5)
    assert val == pytest.approx((math.exp(0.5) - 1) * math.exp(-1), rel=1e-12)


def test_ftp_vanishes_at_left_endpoint():
    for dist in (EXP1, burr(2, 3), make_distribution("gamma", k=2, lam=1)):
        vals = [ftp_value(dist, 1.0, x) for x in (1e-3, 1e-6, 1e-9)]
        assert abs(vals[-1]) < abs(vals[0])
        assert abs(vals[-1]) < 1e-8


def test_ftp_continuous_at_t():
    for dist, t in ((EXP1, 0.8), (make_distribution("normal", mu=0, sigma2=1), 0.3)):
        lo = ftp_value(dist, t, t - 1e-12)
        hi = ftp_value(dist, t, t + 1e-12)
        assert lo == pytest.approx(hi, abs=1e-10)


def test_stein_expectation_fixed_points():
    assert abs(stein_expectation(EXP1, EXP1, 1.0)) <= 1e-8
    n01 = make_distribution("normal", mu=0, sigma2=1)
    assert abs(stein_expectation(n01, n01, 0.5)) <= 1e-8


def test_stein_expectation_mismatch():
    val = stein_expectation(EXP1, EXP2, 1.0)
    expected = cdf(EXP2, 1.0) - cdf(EXP1, 1.0)
    assert val == pytest.approx(expected, abs=1e-8)


def test_stein_expectation_support_check():
    with pytest.raises(DomainError):
        stein_expectation(EXP1, make_distribution("normal", mu=0, sigma2=1), 0.5)


# --------------------------------------------------------------------------
# condition diagnostics
# --------------------------------------------------------------------------

def test_conditions_shifted_gamma_flags_c3():
    rep = check_conditions(make_distribution("shifted_gamma", k=0.5, lam=1.0, mu=1.0))
    assert rep.verdicts["c3"] == "fail"
    assert rep.c3_integral == math.inf
    assert not rep.supported


def test_conditions_arcsine_beta_unsupported():
    rep = check_conditions(make_distribution("beta", alpha=0.5, beta=0.5))
    assert rep.verdicts["boundary"] == "fail"
    assert not rep.supported


def test_conditions_burr_pass():
    rep = check_conditions(burr(1, 1))
    assert rep.supported
    assert math.isfinite(rep.c2_sup_kappa)
    assert rep.c2_sup_kappa < 10


def test_conditions_grid_size_precondition():
    with pytest.raises(ValueError):
        check_conditions(burr(1, 1), grid_size=50)


def test_condition_report_serializes():
    rep = check_conditions(make_distribution("shifted_gamma", k=0.5, lam=1.0, mu=1.0))
    doc = rep.to_dict()
    assert doc["c3_integral"] == "inf"
    assert doc["verdicts"]["c3"] == "fail"
    import json
    json.dumps(doc)


def test_operator_kind_validation():
    with pytest.raises(ValueError):
        OperatorKind("nosuch")
    with pytest.raises(ValueError):
        OperatorKind("lower_bounded_min")  # missing left
    with pytest.raises(DomainError):
        default_operator(make_distribution("beta", alpha=0.5, beta=0.5))
