import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from statsmodels.stats.proportion import proportion_confint

from tqme.choi import HADAMARD, PAULI_X, fidelity_chain
from tqme.errors import RangeError, ValidationError
from tqme.hom import hom_distribution
from tqme.linalg import RandomStream, haar_random_unitary
from tqme.sampling import (INFINITE_D, EventTally, coverage_check, estimate_fidelity, gate_fidelity_from_p,
                           required_samples_analytic, required_samples_empirical, sample_events,
                           sample_from_distribution, wilson_interval, z_quantile)


@pytest.mark.parametrize("p, expected", [(1.0, (100, 0)), (0.0, (0, 100))])
def test_sample_events_degenerate(p, expected, stream):
    t = sample_events(p, 100, stream)
    assert (t.n_bunch, t.n_anti) == expected


def test_sample_events_concentration():
    t = sample_events(0.75, 10**6, RandomStream(8))
    assert abs(t.n_bunch / t.total - 0.75) < 0.002


def test_sample_events_range(stream):
    with pytest.raises(RangeError):
        sample_events(1.2, 10, stream)


def test_sample_from_identical_distribution(stream):
    t = sample_from_distribution(hom_distribution(HADAMARD, HADAMARD), 1000, stream)
    assert (t.n_bunch, t.n_anti) == (1000, 0)


def test_sample_from_orthogonal_distribution():
    t = sample_from_distribution(hom_distribution(np.eye(2), PAULI_X), 10**6, RandomStream(9))
    assert t.total == 10**6
    assert abs(t.n_bunch / t.total - 0.5) < 0.002


def test_pipeline_agrees_with_bernoulli_sampling():
    r = RandomStream(31)
    w, v = haar_random_unitary(3, r), haar_random_unitary(3, r)
    dist = hom_distribution(w, v)
    n = 200_000
    a = sample_from_distribution(dist, n, r.child("multinomial"))
    b = sample_events(fidelity_chain(w, v).p_bunch, n, r.child("bernoulli"))
    p1, p2 = a.n_bunch / n, b.n_bunch / n
    pooled = (a.n_bunch + b.n_bunch) / (2 * n)
    z = (p1 - p2) / math.sqrt(pooled * (1 - pooled) * 2 / n)
    p_value = math.erfc(abs(z) / math.sqrt(2))
    assert p_value > 0.01


@pytest.mark.parametrize("k, n", [(7400, 8000), (0, 10), (10, 10), (37, 120), (999, 1000)])
@pytest.mark.parametrize("conf", [0.9, 0.95, 0.99])
def test_wilson_matches_statsmodels(k, n, conf):
    lo, hi = wilson_interval(k, n, conf)
    ref = proportion_confint(k, n, alpha=1 - conf, method="wilson")
    assert lo == pytest.approx(ref[0], abs=1e-12)
    assert hi == pytest.approx(ref[1], abs=1e-12)


def test_estimate_degenerate_tally():
    est = estimate_fidelity(EventTally(1000, 0), 2, 0.95)
    assert est.f_gate_hat == 1 and est.ci_high == 1
    assert est.ci_low < 1


def test_estimate_half_half():
    assert estimate_fidelity(EventTally(500, 500), 2, 0.95).f_gate_hat == pytest.approx(1 / 3, abs=1e-12)


def test_estimate_reference_point():
    est = estimate_fidelity(EventTally(7400, 600), 2, 0.95)
    assert est.p_hat == 0.925
    assert est.f_gate_hat == pytest.approx(0.9, abs=1e-12)
    lo, hi = proportion_confint(7400, 8000, alpha=0.05, method="wilson")
    assert est.ci_low == pytest.approx((2 * (2 * lo - 1) + 1) / 3, abs=1e-12)
    assert est.ci_high == pytest.approx((2 * (2 * hi - 1) + 1) / 3, abs=1e-12)
    assert (est.ci_high - est.ci_low) / 2 == pytest.approx(0.0077, abs=5e-5)


def test_estimate_empty_tally():
    with pytest.raises(ValidationError):
        estimate_fidelity(EventTally(0, 0), 2, 0.95)


@given(st.integers(0, 5000), st.integers(0, 5000), st.sampled_from([1, 2, 3, 16, 1024]))
def test_estimate_ordering_and_clamp(k, m, d):
    if k + m == 0:
        return
    est = estimate_fidelity(EventTally(k, m), d, 0.95)
    assert 1 / (d + 1) <= est.ci_low <= est.f_gate_hat <= est.ci_high <= 1


def test_estimator_consistency():
    r = RandomStream(4)
    p_true, d, n = 0.9, 4, 100_000
    f_true = gate_fidelity_from_p(p_true, d)
    est = [estimate_fidelity(sample_events(p_true, n, r), d).f_gate_hat for _ in range(10_000)]
    sigma_mean = (2 * d / (d + 1)) * math.sqrt(p_true * (1 - p_true) / n) / math.sqrt(len(est))
    assert abs(np.mean(est) - f_true) < 2 * sigma_mean


def test_z_quantile():
    assert z_quantile(0.95) == pytest.approx(1.959964, abs=1e-6)


@pytest.mark.parametrize(
    "p, d, expected",
    [(0.95, INFINITE_D, 7299), (0.925, 2, 4738), (0.5, INFINITE_D, 38415)],
)
def test_analytic_plan(p, d, expected):
    plan = required_samples_analytic(p, d, 0.01, 0.95)
    assert plan.n_required == expected
    assert plan.method == "analytic"


def test_analytic_plan_matches_formula_by_hand():
    z = 1.959963984540054
    assert math.ceil(z**2 * 0.95 * 0.05 * 4 / 1e-4) == 7299


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_analytic_plan_zero_variance(p):
    plan = required_samples_analytic(p, 2, 0.01, 0.95)
    assert plan.n_required == 1 and plan.degenerate


def test_analytic_plan_errors():
    with pytest.raises(RangeError):
        required_samples_analytic(0.9, 2, 0.0, 0.95)
    with pytest.raises(RangeError):
        required_samples_analytic(0.9, 2, 0.01, 1.0)


@pytest.mark.parametrize("d", [1, 2, 16, INFINITE_D])
def test_analytic_plan_decreasing_in_p(d):
    ns = [required_samples_analytic(p, d, 0.01).n_required for p in np.arange(0.5, 1.0, 0.01)]
    assert all(a > b for a, b in zip(ns, ns[1:]))


def test_analytic_plan_saturates_in_d():
    inf = required_samples_analytic(0.95, INFINITE_D, 0.01).n_required
    ns = [required_samples_analytic(0.95, d, 0.01).n_required for d in range(1, 1025)]
    assert all(a <= b for a, b in zip(ns, ns[1:]))
    assert max(ns) <= inf
    assert abs(ns[-1] / inf - 1) < 0.005


def test_coverage_examples():
    assert coverage_check(7987, 0.95, 1024, 0.01, 10_000, RandomStream(1)) >= 0.95
    assert coverage_check(10, 0.95, INFINITE_D, 0.01, 1000, RandomStream(1)) < 0.5


@pytest.mark.parametrize("p", [0.6, 0.75, 0.9, 0.95])
@pytest.mark.parametrize("d", [2, 4, 16, INFINITE_D])
def test_coverage_calibrated_at_analytic_n(p, d):
    n = required_samples_analytic(p, d, 0.01, 0.95).n_required
    cov = coverage_check(n, p, d, 0.01, 10_000, RandomStream(int(p * 100) + d))
    assert abs(cov - 0.95) <= 0.02


def test_coverage_independent_of_workers():
    a = coverage_check(5000, 0.9, 4, 0.01, 5000, RandomStream(2), workers=1)
    b = coverage_check(5000, 0.9, 4, 0.01, 5000, RandomStream(2), workers=4)
    assert a == b


def test_coverage_needs_trials():
    with pytest.raises(ValidationError):
        coverage_check(100, 0.9, 2, 0.01, 50, RandomStream(0))


def test_empirical_plan_near_analytic():
    plan = required_samples_empirical(0.95, INFINITE_D, 0.01, 0.95, 10_000, RandomStream(12))
    assert 0.85 * 7299 <= plan.n_required <= 1.15 * 7299
    assert plan.method == "empirical"


def test_empirical_plan_trends():
    def plan(p, d):
        return required_samples_empirical(p, d, 0.01, 0.95, 10_000, RandomStream(3)).n_required

    assert plan(0.99, INFINITE_D) < plan(0.95, INFINITE_D)
    n2, n64, ninf = plan(0.95, 2), plan(0.95, 64), plan(0.95, INFINITE_D)
    assert n2 < n64 <= ninf


def test_empirical_plan_reaches_coverage():
    r = RandomStream(6)
    plan = required_samples_empirical(0.9, 2, 0.01, 0.95, 4000, r)
    assert coverage_check(plan.n_required, 0.9, 2, 0.01, 4000, r) >= 0.95
    assert coverage_check(plan.n_required - 1, 0.9, 2, 0.01, 4000, r) < 0.95


def test_plan_serialization_keys():
    keys = set(required_samples_analytic(0.9, 2, 0.01).to_dict())
    assert {"n_required", "P", "d", "epsilon", "confidence", "method"} <= keys
    est = estimate_fidelity(EventTally(9, 1), 2, seed=5).to_dict()
    assert {"p_hat", "f_gate_hat", "ci_low", "ci_high", "shots", "seed"} <= set(est)
