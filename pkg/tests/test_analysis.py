import math

import numpy as np
import pytest

from ddgrowth.analysis import (
    compare,
    csv_rows,
    empirical_dd,
    empirical_dd_from_counts,
    fit_tail_slope,
    log_binned,
    spike_fidelity,
    zero_mass_degrees,
)
from ddgrowth.distributions import DegreeDistribution, build_broken_power_law, build_geometric, with_boosts
from ddgrowth.errors import EmptyInputError, FitError, InvalidParameterError
from ddgrowth.inversion import AttachmentFunction, invert, node_probability
from ddgrowth.simulator import SimulationConfig, run


def test_empirical_from_counts_keeps_interior_zeros():
    d = empirical_dd_from_counts([0, 3, 0, 1])
    assert list(d.pmf) == [0.75, 0.0, 0.25]
    assert zero_mass_degrees(d) == [2]
    with pytest.raises(EmptyInputError):
        empirical_dd_from_counts([5, 0, 0])


def test_empirical_from_graph():
    g = run(AttachmentFunction(np.ones(30)), SimulationConfig(p=1.0, steps=50, seed=0))
    d = empirical_dd(g)
    assert d.prob(1) * g.node_count == pytest.approx(int(np.sum(g.degree == 1)))


def test_compare_hand_values():
    a = DegreeDistribution([0.5, 0.5])
    b = DegreeDistribution([0.25, 0.5, 0.25])
    c = compare(a, b)
    assert c.tv_distance == pytest.approx(0.25)
    assert c.max_pointwise_log_ratio == pytest.approx(math.log(2))
    assert c.support_mismatch == pytest.approx(0.25)
    same = compare(a, a)
    assert same.tv_distance == 0.0 and same.support_mismatch == 0.0


def test_tail_fit_on_exact_ccdf_power_law():
    # P(X > i) = (i + 1)^-s by construction
    s, n = 1.5, 10**5
    i = np.arange(1, n + 1, dtype=float)
    pmf = i**-s - (i + 1) ** -s
    pmf[-1] = n**-s
    d = DegreeDistribution.from_weights(pmf)
    fit = fit_tail_slope(d, 100, 1000)
    assert fit.slope == pytest.approx(s, abs=0.01)
    assert fit.pmf_exponent == pytest.approx(s + 1, abs=0.01)
    assert fit.r_squared > 0.999


def test_tail_fit_needs_points():
    with pytest.raises(FitError):
        fit_tail_slope(DegreeDistribution([0.5, 0.25, 0.25]), 1, 3)
    with pytest.raises(InvalidParameterError):
        fit_tail_slope(DegreeDistribution([0.5, 0.5]), 5, 2)


def test_spike_ratio_identity_and_flags():
    target = with_boosts(build_geometric(0.1, d_max=200), {30: 5.0})
    (rep,) = spike_fidelity(target, target, [30])
    assert rep.ratio_of_ratios == pytest.approx(1.0)
    assert not rep.flagged
    # the spike boosted 5x over a smooth geometric background
    assert rep.target_ratio == pytest.approx(5.0, rel=1e-12)


def test_spike_with_empty_neighbour_is_flagged():
    target = with_boosts(build_geometric(0.1, d_max=200), {30: 5.0})
    counts = np.zeros(60)
    counts[1:60] = 10
    counts[28] = 0
    (rep,) = spike_fidelity(target, empirical_dd_from_counts(counts), [30])
    assert math.isnan(rep.ratio_of_ratios) and rep.flagged


def test_log_binned_shape():
    d = build_geometric(0.05, d_max=500)
    centres, density = log_binned(d)
    assert np.all(np.diff(centres) > 0)
    assert density[0] == pytest.approx(d.prob(1))
    assert np.all(np.diff(density) < 0)


def test_csv_rows():
    rows = list(csv_rows(DegreeDistribution([0.75, 0.25])))
    assert rows[0] == "degree,pmf,ccdf"
    assert rows[1] == "1,0.75,0.25"
    assert rows[2] == "2,0.25,0"


def test_low_degree_spike_survives_the_pipeline():
    target = with_boosts(build_broken_power_law(2.1, 4.0, 1.0, 1.0, 100), {20: 5.0})
    f = invert(target)
    p = node_probability(target).p
    for seed in range(1, 4):
        g = run(f, SimulationConfig(p=p, steps=2 * 10**5, seed=seed))
        (rep,) = spike_fidelity(target, empirical_dd(g), [20])
        assert not rep.flagged, rep
