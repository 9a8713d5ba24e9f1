import numpy as np
import pytest

from ddgrowth.sampler import ACTIVE, MIN_ACTIVE, DegreeClassSampler


def _within(counts, probs, draws, sigmas):
    expect = draws * probs
    sd = np.sqrt(draws * probs * (1 - probs))
    return np.all(np.abs(counts - expect) <= sigmas * sd + 1e-9)


def test_initial_probabilities_match_weights():
    degs = [1, 1, 2, 2, 3, 3, 4, 5]
    s = DegreeClassSampler(np.arange(1, 11, dtype=float), degs)
    assert np.allclose(s.probabilities(), np.array(degs) / 21)
    assert s.total_weight == pytest.approx(21.0)
    s.check()


def test_draws_follow_weights():
    degs = [1, 1, 2, 2, 3, 3, 4, 5]
    s = DegreeClassSampler(np.arange(1, 11, dtype=float), degs)
    rng = np.random.Generator(np.random.PCG64(11))
    n = 200_000
    counts = np.bincount(s.sample_many(n, rng), minlength=8)
    assert _within(counts, s.probabilities(), n, 4)


def test_ceiling_weight_is_zero():
    s = DegreeClassSampler(np.ones(3), [1, 3])
    assert s.class_weight(3) == 0.0
    rng = np.random.Generator(np.random.PCG64(0))
    assert set(s.sample_many(1000, rng).tolist()) == {0}


def test_promote_and_add_keep_structure():
    rng = np.random.Generator(np.random.PCG64(5))
    s = DegreeClassSampler(np.arange(1, 201, dtype=float), [1, 1], capacity=4)
    for _ in range(300):
        v = int(rng.integers(s.node_count))
        if s.deg[v] < s.d_max - 1:
            s.promote(v)
        if rng.random() < 0.3:
            s.add_node()
    s.check()
    assert s.node_count > 2
    expect = s.deg[: s.node_count].astype(float)
    assert np.allclose(s.probabilities(), expect / expect.sum())


def test_promote_past_ceiling_rejected():
    s = DegreeClassSampler(np.ones(2), [1, 2])
    with pytest.raises(ValueError):
        s.promote(1)


def test_index_grows_with_the_largest_degree():
    d_max = 8 * MIN_ACTIVE
    s = DegreeClassSampler(np.arange(1, d_max + 1, dtype=float), [1, 1])
    assert s.istate[ACTIVE] == MIN_ACTIVE
    for _ in range(3 * MIN_ACTIVE):
        s.promote(0)
    assert s.deg[0] == 3 * MIN_ACTIVE + 1
    assert s.istate[ACTIVE] >= s.deg[0]
    s.check()
    rng = np.random.Generator(np.random.PCG64(2))
    n = 100_000
    counts = np.bincount(s.sample_many(n, rng), minlength=2)
    assert _within(counts, s.probabilities(), n, 4)


def test_zero_total_weight_refuses_to_sample():
    s = DegreeClassSampler(np.array([0.0, 1.0, 0.0]), [1, 1])
    with pytest.raises(ValueError):
        s.sample(np.random.Generator(np.random.PCG64(0)))


def test_rejects_degrees_outside_table():
    with pytest.raises(ValueError):
        DegreeClassSampler(np.ones(3), [1, 4])
