import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta

from ddgrowth.distributions import (
    DegreeDistribution,
    RawHistogram,
    build,
    build_broken_power_law,
    build_exact_power_law,
    build_generalized_chung_lu,
    build_geometric,
    build_poisson,
    interpolate_gaps,
    load_empirical,
    mean_degree,
    with_boosts,
)
from ddgrowth.errors import EmptyInputError, InvalidParameterError, NormalizationError


# --- construction -----------------------------------------------------------

def test_trailing_zeros_are_trimmed():
    d = DegreeDistribution([0.5, 0.5, 0.0, 0.0])
    assert d.d_max == 2
    assert d.pmf[-1] > 0


def test_pmf_is_read_only():
    d = DegreeDistribution([0.25, 0.75])
    with pytest.raises(ValueError):
        d.pmf[0] = 1.0


@pytest.mark.parametrize(
    "pmf, err",
    [
        ([], EmptyInputError),
        ([0.0, 0.0], EmptyInputError),
        ([0.6, 0.6], NormalizationError),
        ([1.2, -0.2], NormalizationError),
        ([np.nan, 1.0], NormalizationError),
    ],
)
def test_invalid_pmf_rejected(pmf, err):
    with pytest.raises(err):
        DegreeDistribution(pmf)


def test_from_weights_normalizes_hand_case():
    d = DegreeDistribution.from_weights([1.0, 1.0 / 8.0])
    assert d.pmf[0] == pytest.approx(8 / 9, abs=1e-15)
    assert d.pmf[1] == pytest.approx(1 / 9, abs=1e-15)


def test_ccdf_matches_brute_force():
    d = DegreeDistribution.from_weights([4, 3, 2, 1])
    brute = [sum(d.pmf[k] for k in range(i, 4)) for i in range(1, 5)]
    assert np.allclose(d.ccdf(), brute, atol=1e-16)
    assert d.ccdf()[-1] == 0.0


# --- closed-form families against hand oracles --------------------------------

def test_chung_lu_alpha3_b0_telescopes():
    # 1/(i(i+1)(i+2)) sums to (1/2)(1/2 - 1/((n+1)(n+2))).
    n = 200
    d = build_generalized_chung_lu(3.0, 0.0, d_max=n)
    norm = 0.5 * (0.5 - 1.0 / ((n + 1) * (n + 2)))
    i = np.arange(1, n + 1, dtype=float)
    expect = 1.0 / (i * (i + 1) * (i + 2)) / norm
    assert np.max(np.abs(d.pmf / expect - 1)) < 1e-12


def test_power_law_matches_hurwitz_zeta_normalizer():
    n, a = 5000, 2.5
    d = build_exact_power_law(a, d_max=n)
    z = zeta(a, 1) - zeta(a, n + 1)
    assert d.pmf[0] == pytest.approx(1.0 / z, rel=1e-12)
    assert d.pmf[99] == pytest.approx(100.0**-a / z, rel=1e-12)


def test_geometric_exact_truncation():
    q, n = 0.3, 40
    d = build_geometric(q, d_max=n)
    i = np.arange(1, n + 1)
    expect = q * (1 - q) ** (i - 1) / (1 - (1 - q) ** n)
    assert np.allclose(d.pmf, expect, rtol=1e-13, atol=0)


def test_poisson_zero_truncated():
    lam = 2.0
    d = build_poisson(lam, d_max=60)
    expect = [lam**i / math.factorial(i) / math.expm1(lam) for i in range(1, 61)]
    expect = np.array(expect)
    mask = expect > 1e-300
    assert np.allclose(d.pmf[mask[: d.d_max]], expect[mask][: d.d_max], rtol=1e-12)


def test_broken_power_law_is_continuous_at_break():
    d = build_broken_power_law(2.1, 4.0, 1.0, 1.0, 100, d_max=10**4)
    # Both segment formulas evaluated at d agree, so the ratio P(d+1)/P(d)
    # follows the second segment: (d + b2)/(d + b2 + alpha2).
    assert d.prob(101) / d.prob(100) == pytest.approx(101 / 105, rel=1e-12)
    assert d.prob(100) / d.prob(99) == pytest.approx(100 / 102.1, rel=1e-12)


def test_broken_power_law_equal_segments_is_chung_lu():
    a = build_broken_power_law(3.0, 3.0, 0.5, 0.5, 50, d_max=1000)
    b = build_generalized_chung_lu(3.0, 0.5, d_max=1000)
    assert np.max(np.abs(a.pmf - b.pmf)) < 1e-15


def test_build_dispatch_and_lambda_alias():
    a = build("poisson", d_max=30, **{"lambda": 3.0})
    b = build_poisson(3.0, d_max=30)
    assert np.array_equal(a.pmf, b.pmf)
    with pytest.raises(InvalidParameterError):
        build("zipf", d_max=10, alpha=2)


@pytest.mark.parametrize(
    "call",
    [
        lambda: build_generalized_chung_lu(2.0, 0.0, 10),
        lambda: build_generalized_chung_lu(3.0, -1.0, 10),
        lambda: build_exact_power_law(1.5, 10),
        lambda: build_geometric(1.0, 10),
        lambda: build_poisson(0.0, 10),
        lambda: build_broken_power_law(2.1, 4, 1, 1, 100, d_max=50),
        lambda: build_geometric(0.5, d_max=1),
    ],
)
def test_builder_parameter_checks(call):
    with pytest.raises(InvalidParameterError):
        call()


def test_mean_degree_geometric():
    d = build_geometric(0.25, d_max=400)
    assert mean_degree(d) == pytest.approx(4.0, rel=1e-12)


# --- interpolation -----------------------------------------------------------

def test_interpolation_hand_oracle():
    v = np.array([50, 25, 0, 6]) / 81.0
    filled, degs = interpolate_gaps(v)
    t = (math.log(3) - math.log(2)) / (math.log(4) - math.log(2))
    expect = math.exp(math.log(25 / 81) + t * (math.log(6 / 81) - math.log(25 / 81)))
    assert degs == {3}
    assert abs(filled[2] - expect) < 1e-15


def test_interpolation_leading_gap_extends_first_segment():
    v = np.array([0.0, 0.0, 9.0, 4.0])
    filled, degs = interpolate_gaps(v)
    assert degs == {1, 2}
    slope = (math.log(4) - math.log(9)) / (math.log(4) - math.log(3))
    for i in (1, 2):
        assert math.log(filled[i - 1]) == pytest.approx(math.log(9) + slope * (math.log(i) - math.log(3)), abs=1e-12)


def test_interpolation_single_anchor_is_flat():
    filled, degs = interpolate_gaps([0.0, 0.0, 2.0])
    assert np.array_equal(filled, [2.0, 2.0, 2.0])
    assert degs == {1, 2}


def test_load_empirical_records_filled_degrees():
    d = load_empirical(RawHistogram({1: 50, 2: 25, 4: 6}))
    assert d.interpolated_degrees == {3}
    assert d.d_max == 4
    assert math.fsum(d.pmf) == pytest.approx(1.0, abs=1e-15)


def test_load_empirical_override_truncates():
    d = load_empirical(RawHistogram({1: 5, 2: 3, 9: 1}), d_max_override=4)
    assert d.d_max == 2


def test_raw_histogram_rejects_bad_degrees():
    with pytest.raises(InvalidParameterError):
        RawHistogram({0: 3})
    with pytest.raises(InvalidParameterError):
        RawHistogram({2: -1})


def test_boosts_multiply_then_renormalize():
    base = build_geometric(0.5, d_max=10)
    b = with_boosts(base, {3: 5.0})
    ratio = (b.prob(3) / b.prob(4)) / (base.prob(3) / base.prob(4))
    assert ratio == pytest.approx(5.0, rel=1e-14)
    with pytest.raises(InvalidParameterError):
        with_boosts(base, {11: 2.0})


# --- properties --------------------------------------------------------------

weights = st.lists(st.floats(min_value=1e-6, max_value=1e3), min_size=1, max_size=60)


@settings(max_examples=200, deadline=None)
@given(weights)
def test_from_weights_sums_to_one(w):
    d = DegreeDistribution.from_weights(w)
    assert abs(math.fsum(d.pmf) - 1.0) < 1e-12
    assert np.all(d.pmf > 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.one_of(st.just(0.0), st.floats(min_value=1e-8, max_value=1.0)), min_size=2, max_size=40))
def test_interpolation_properties(v):
    v = list(v) + [0.5]
    filled, degs = interpolate_gaps(v)
    assert np.all(filled > 0)
    original = np.asarray(v)
    # anchors are untouched, and filling twice is a no-op
    assert np.array_equal(filled[original > 0], original[original > 0])
    again, none = interpolate_gaps(filled)
    assert np.array_equal(again, filled) and not none
    # every interior filled point lies on the log-log segment of its anchors
    anchors = np.flatnonzero(original > 0)
    for g in degs:
        j = g - 1
        left = anchors[anchors < j]
        right = anchors[anchors > j]
        if left.size and right.size:
            a, b = left[-1], right[0]
            x = np.log([a + 1, g, b + 1])
            y = np.log([filled[a], filled[j], filled[b]])
            cross = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0])
            assert abs(cross) < 1e-9
