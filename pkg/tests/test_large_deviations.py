import math

import numpy as np
import pytest

from itersig.large_deviations import (
    DomainError,
    RateFunction,
    cgf,
    cgf_derivative,
    perron_root,
    rate,
    window_length,
)
from itersig.processes import IIDModel, MarkovModel, RotationModel


def kl_bernoulli(a, p):
    out = 0.0
    if a > 0:
        out += a * math.log(a / p)
    if a < 1:
        out += (1 - a) * math.log((1 - a) / (1 - p))
    return out


def test_window_length_examples():
    assert window_length(math.exp(10) * (1 + 1e-12), 1.0) == 10
    assert window_length(10**6, 0.5) == 27
    for bad in ((1, 1.0), (100, 0.0), (100, -1.0), (10, 10.0), (3, 0.1)):
        with pytest.raises(DomainError):
            window_length(*bad)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.8])
def test_bernoulli_rate_is_kl(p):
    m = IIDModel([[0.0], [1.0]], [1 - p, p])
    for a in np.linspace(p, 0.999, 9):
        assert rate(m, 1, a) == pytest.approx(kl_bernoulli(a, p), abs=1e-12)


def test_rate_zero_at_mean_and_domain(chain3):
    I = RateFunction(chain3, 1)
    assert I(I.mean) == 0.0
    assert I.domain == (pytest.approx(chain3.mean[0]), 2.0)
    with pytest.raises(DomainError):
        I(2.0)
    with pytest.raises(DomainError):
        I(I.mean - 0.1)
    with pytest.raises(DomainError):
        RateFunction(chain3, 3)
    with pytest.raises(DomainError):
        RateFunction(RotationModel(((0.0, [1.0], []),)), 1)


@pytest.mark.parametrize("fixture,i", [("bernoulli", 1), ("chain2", 1), ("chain3", 1), ("chain3", 2)])
def test_rate_convex_and_increasing(fixture, i, request):
    I = RateFunction(request.getfixturevalue(fixture), i)
    lo, hi = I.domain
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = np.sort(rng.uniform(lo, lo + 0.95 * (hi - lo), 2))
        t = rng.uniform()
        mid = t * a + (1 - t) * b
        assert I(mid) <= t * I(a) + (1 - t) * I(b) + 1e-10
        assert I(a) <= I(b) + 1e-12


@pytest.mark.parametrize("fixture,i", [("bernoulli", 1), ("chain2", 1), ("chain3", 2)])
def test_duality(fixture, i, request):
    I = RateFunction(request.getfixturevalue(fixture), i)
    lo, hi = I.domain
    for a in np.linspace(lo, hi, 12)[1:-1]:
        lam = I.tilt(a)
        assert I.cgf_derivative(lam) == pytest.approx(a, abs=1e-8)
        assert I(a) == pytest.approx(lam * a - I.cgf(lam), abs=1e-14)


def test_cgf_at_zero_and_slope(chain3):
    for i in (1, 2):
        assert cgf(chain3, i, 0.0) == 0.0
        assert cgf_derivative(chain3, i, 0.0) == pytest.approx(chain3.mean[i - 1], abs=1e-10)
        # finite-difference check of the eigenvector formula
        for lam in (-1.0, 0.3, 2.0):
            fd = (cgf(chain3, i, lam + 1e-5) - cgf(chain3, i, lam - 1e-5)) / 2e-5
            assert cgf_derivative(chain3, i, lam) == pytest.approx(fd, abs=1e-6)


def test_perron_root_of_stochastic_matrix(chain3):
    rho, v = perron_root(chain3.transition)
    assert rho == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(v, v[0])
    rho, l = perron_root(chain3.transition, left=True)
    assert np.allclose(l / l.sum(), chain3.stationary, atol=1e-10)


def test_quadratic_near_mean(chain2):
    # asymptotic variance of the stationary two-state chain: var (1 + l2) / (1 - l2), l2 = 0.4
    sigma2 = (5 / 36) * 1.4 / 0.6
    I = RateFunction(chain2, 1)
    a = np.linspace(1 / 6, 1 / 6 + 0.01, 11)[1:]
    y = np.array([I(x) for x in a])
    x = a - 1 / 6
    c2, c3 = np.linalg.lstsq(np.stack([x**2, x**3], axis=1), y, rcond=None)[0]
    assert c2 == pytest.approx(1 / (2 * sigma2), rel=1e-3)


def test_iid_equals_markov_with_identical_rows():
    p = np.array([0.2, 0.5, 0.3])
    vals = np.array([[0.0], [1.0], [3.0]])
    iid = IIDModel(vals, p)
    mk = MarkovModel(np.tile(p, (3, 1)), vals)
    for a in (1.6, 2.0, 2.7):
        assert rate(mk, 1, a) == pytest.approx(rate(iid, 1, a), abs=1e-10)
