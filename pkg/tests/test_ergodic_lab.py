import math
from fractions import Fraction

import numpy as np
import pytest

from itersig.ergodic_lab import (
    as_sweep,
    as_sweeps,
    continuous_sweep,
    er_predicted_limit,
    er_statistic,
    er_scan,
    geometric_checkpoints,
    l1_sweep,
    l1_sweeps,
    scan_max,
    scan_max_naive,
)
from itersig.iterated_sums import coordinate_track
from itersig.large_deviations import DomainError
from itersig.processes import IIDModel, RotationModel, generate
from itersig.tensor_core import as_word


def constant_value(n, v):
    # C(n, v) / n^v for the all-ones series
    return Fraction(math.comb(n, v), n**v)


def test_constant_model_closed_form():
    m = IIDModel([[1.0]], [1.0])
    cps = geometric_checkpoints(10, 6)
    for v in (1, 2, 3):
        rep = as_sweep(m, [1] * v, cps, seed=0)
        exact = np.array([float(constant_value(n, v)) for n in cps])
        assert np.allclose(rep.values, exact, rtol=1e-14, atol=0)
        assert rep.limit == pytest.approx(1 / math.factorial(v))
        if v == 1:
            assert np.all(rep.errors == 0)
        else:
            assert np.all(np.diff(rep.errors) < 0)


def test_rotation_converges_to_zero():
    m = RotationModel(((0.0, [1.0], []),))
    rep = as_sweep(m, [1, 1], geometric_checkpoints(1000, 8), seed=0)
    assert rep.limit == 0.0
    assert rep.errors[-1] < 1e-5


@pytest.mark.parametrize("fixture,word", [("chain2", [1, 1]), ("chain3", [1, 2]), ("rotation2", [2, 1, 2])])
def test_errors_shrink_over_the_sweep(fixture, word, request):
    rep = as_sweep(request.getfixturevalue(fixture), word, geometric_checkpoints(1000, 8), seed=3)
    assert rep.errors[-1] < rep.errors[0]


def test_sweeps_share_one_stream(chain3):
    cps = [100, 400, 1600]
    both = as_sweeps(chain3, [[1], [2, 1]], cps, seed=9)
    assert np.array_equal(both[1].values, as_sweep(chain3, [2, 1], cps, seed=9).values)
    assert np.array_equal(both[0].values, as_sweep(chain3, [1], cps, seed=9, depth=2).values)


def test_kahan_sweep_close(chain3):
    cps = [1000, 5000]
    a = as_sweep(chain3, [1, 2], cps, seed=1)
    b = as_sweep(chain3, [1, 2], cps, seed=1, kahan=True)
    assert np.allclose(a.values, b.values, rtol=1e-10)


def test_slope_needs_four_points(bernoulli):
    assert as_sweep(bernoulli, [1], [10, 20, 40], seed=0).slope is None
    rep = as_sweep(bernoulli, [1, 1], geometric_checkpoints(100, 6), seed=0)
    assert rep.slope is None or np.isfinite(rep.slope)


def test_bad_arguments(bernoulli):
    with pytest.raises(ValueError):
        as_sweep(bernoulli, [1], [10, 10], seed=0)
    with pytest.raises(ValueError):
        as_sweep(bernoulli, [1], [], seed=0)
    with pytest.raises(ValueError):
        as_sweep(bernoulli, [1, 1, 1], [10], seed=0, depth=2)
    with pytest.raises(ValueError):
        l1_sweep(bernoulli, [1], [10], replications=0, seed=0)
    with pytest.raises(ValueError):
        continuous_sweep(bernoulli, [1], 0.0, [10], seed=0)


def test_l1_replication_zero_is_the_as_stream(chain3):
    cps = [200, 800, 3200]
    rep = l1_sweep(chain3, [1, 2], cps, replications=5, seed=4)
    single = as_sweep(chain3, [1, 2], cps, seed=4)
    assert np.array_equal(rep.replication_values[0], single.values)
    assert rep.replication_values.shape == (5, 3)
    assert np.allclose(rep.errors, np.abs(rep.replication_values - rep.limit).mean(axis=0))
    solo = l1_sweep(chain3, [1, 2], cps, replications=1, seed=4)
    assert np.array_equal(solo.values, single.values)
    assert np.array_equal(solo.errors, single.errors)
    assert np.all(np.isnan(solo.stderr))


def test_constant_increment_scan():
    # xi == c: every window sums to ell * c
    c, n, ell = 0.7, 500, 13
    track = np.arange(n + 1) * c
    assert scan_max(track, ell, n) == pytest.approx(ell * c, rel=1e-14)
    assert er_statistic(scan_max(track, ell, n), 0.2, n, 1) == pytest.approx(0.2 * ell * c / math.log(n))


def test_l1_threads_deterministic(chain2):
    cps = [500, 2000]
    a = l1_sweeps(chain2, [[1], [1, 1]], cps, replications=6, seed=2, threads=1)
    b = l1_sweeps(chain2, [[1], [1, 1]], cps, replications=6, seed=2, threads=3)
    for x, y in zip(a, b):
        assert np.array_equal(x.replication_values, y.replication_values)
        assert np.array_equal(x.stderr, y.stderr)


def test_l1_plus_minus_first_order(plus_minus):
    # mean |S_n / n| for a +-1 walk is about sqrt(2 / (pi n))
    cps = [1000, 4000]
    rep = l1_sweep(plus_minus, [1], cps, replications=400, seed=0)
    expected = np.sqrt(2 / (np.pi * np.array(cps)))
    assert np.all(np.abs(rep.errors - expected) <= 4 * rep.stderr)


def test_continuous_matches_discrete_order(rotation2, chain3):
    cps = geometric_checkpoints(2000, 6)
    for model, word in ((rotation2, [1, 2]), (chain3, [1, 1])):
        disc = as_sweep(model, word, cps, seed=5)
        cont = continuous_sweep(model, word, 0.5, cps, seed=5)
        assert cont.mode == "almost_sure_continuous"
        assert cont.limit == disc.limit
        assert cont.errors[-1] <= 2 * disc.errors[-1] + 2 / cps[-1]


def test_continuous_constant_exact():
    m = IIDModel([[1.0]], [1.0])
    rep = continuous_sweep(m, [1, 1, 1], 0.25, [10, 100], seed=0)
    assert np.allclose(rep.values, 1 / 6, rtol=1e-13)


# --- scan ---------------------------------------------------------------------

@pytest.mark.parametrize("word", [[1], [1, 1], [2, 1, 2]])
def test_scan_matches_window_sums(chain3, word):
    n = 3000
    X = generate(chain3, n, 8).samples
    w = as_word(word, 2)
    track = coordinate_track(X, w).values
    prefix = coordinate_track(X, w.prefix(w.n - 1)).values if w.n > 1 else np.ones(n + 1)
    xi = X[:, w.letters[-1] - 1]
    for ell in (1, 7, 50):
        fast = scan_max(track, ell, n)
        slow = scan_max_naive(xi, prefix, ell, n)
        assert fast == pytest.approx(slow, rel=1e-12, abs=1e-12 * max(1.0, abs(slow)))


def test_scan_bernoulli_max_run():
    x = np.array([1, 0, 1, 1, 1, 0, 1, 1, 0, 0], float)
    track = np.concatenate([[0.0], np.cumsum(x)])
    assert scan_max(track, 3, 10) == 3.0
    assert scan_max(track, 5, 10) == 4.0
    with pytest.raises(ValueError):
        scan_max(track, 10, 10)


def test_er_scan_shape(bernoulli):
    rep = er_scan(bernoulli, [1, 1], 0.75, [1000, 10000, 100000], seed=1)
    assert np.all(np.diff(rep.ell) > 0)
    assert rep.predicted_limit == pytest.approx(0.375)
    assert er_predicted_limit(bernoulli.mean, as_word([1, 1], 1), 0.75) == 0.375
    assert rep.c_plus == 1.0
    assert np.all(np.isfinite(rep.statistic))


def test_er_scan_domain(bernoulli):
    with pytest.raises(DomainError):
        er_scan(bernoulli, [1], 1.0, [1000], seed=0)
    with pytest.raises(DomainError):
        er_scan(bernoulli, [1], 0.4, [1000], seed=0)
    with pytest.raises(DomainError):
        er_scan(RotationModel(((0.0, [1.0], []),)), [1], 0.5, [1000], seed=0)
    with pytest.raises(ValueError):
        er_scan(bernoulli, [1], 0.75, [1000, 1001], seed=0)


@pytest.mark.slow
def test_er_ensemble_approaches_alpha(bernoulli):
    # averaged over seeds the scan statistic approaches its limit as n grows
    cps = [1000, 10000, 100000, 1000000]
    gaps = np.array([
        np.abs(er_scan(bernoulli, [1], 0.75, cps, seed=s).statistic - 0.75) for s in range(100)
    ]).mean(axis=0)
    assert np.all(np.diff(gaps) < 0)


def test_continuous_rotation_unit_step():
    m = RotationModel(((0.0, [1.0], []),))
    disc = as_sweep(m, [1, 1], [10**4], seed=0)
    cont = continuous_sweep(m, [1, 1], 1.0, [10**4], seed=0)
    assert cont.errors[0] <= 2 * disc.errors[0]
