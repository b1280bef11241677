import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itersig.processes import (
    GOLDEN,
    IIDModel,
    MarkovModel,
    ModelError,
    RotationModel,
    brute_force_max_mean_cycle,
    c_plus,
    generate,
    is_nearly_rational,
    max_mean_cycle,
    mixing_diagnostic,
    model_from_dict,
    model_to_dict,
    psi_bound,
    replication_seed,
    stationary_distribution,
)


def test_chain2_stationary_and_mean(chain2):
    assert np.allclose(chain2.stationary, [5 / 6, 1 / 6], atol=1e-14)
    assert chain2.mean[0] == pytest.approx(1 / 6, abs=1e-14)


def test_simple_means(bernoulli, plus_minus):
    assert bernoulli.mean[0] == 0.5
    assert plus_minus.mean[0] == 0.0
    assert bernoulli.bound == 1.0


def test_rotation_mean_and_bound():
    m = RotationModel(((0.0, [1.0], []),))
    assert m.mean[0] == 0.0 and m.bound == 1.0
    assert m.frequency == GOLDEN


def test_rotation_samples_follow_orbit():
    m = RotationModel(((0.0, [1.0], [0.5]),), x0=0.25)
    k = np.arange(50)
    x = 0.25 + k * GOLDEN
    expected = np.cos(2 * np.pi * x) + 0.5 * np.sin(2 * np.pi * x)
    assert np.allclose(generate(m, 50).samples[:, 0], expected, atol=1e-12)


@pytest.mark.parametrize("fixture", ["bernoulli", "chain2", "chain3"])
def test_reproducible(fixture, request):
    model = request.getfixturevalue(fixture)
    a = generate(model, 1000, replication_seed(7, 0)).samples
    b = generate(model, 1000, replication_seed(7, 0)).samples
    c = generate(model, 1000, replication_seed(7, 1)).samples
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("fixture", ["bernoulli", "chain2", "chain3"])
def test_sample_mean_near_truth(fixture, request):
    model = request.getfixturevalue(fixture)
    n = 10**6
    X = generate(model, n, 2024).samples
    assert np.all(np.abs(X.mean(axis=0) - model.mean) <= 5 / math.sqrt(n))


def test_rotation_sample_mean(rotation2):
    n = 10**6
    X = generate(rotation2, n).samples
    assert np.all(np.abs(X.mean(axis=0) - rotation2.mean) <= 10 / n)


def test_samples_stay_bounded(chain3, rotation2):
    for m in (chain3, rotation2):
        assert np.abs(generate(m, 5000, 1).samples).max() <= m.bound + 1e-12


def test_markov_starts_stationary(chain2):
    first = np.array([generate(chain2, 1, s).samples[0, 0] for s in range(4000)])
    assert abs(first.mean() - 1 / 6) < 5 * math.sqrt((1 / 6) * (5 / 6) / 4000)


def test_invalid_models():
    with pytest.raises(ModelError):
        MarkovModel([[0.0, 1.0], [1.0, 0.0]], [[0.0], [1.0]])  # periodic
    with pytest.raises(ModelError):
        MarkovModel([[1.0, 0.0], [0.5, 0.5]], [[0.0], [1.0]])  # reducible
    with pytest.raises(ModelError):
        MarkovModel([[0.5, 0.6], [0.5, 0.5]], [[0.0], [1.0]])  # rows do not sum to 1
    with pytest.raises(ModelError):
        IIDModel([[0.0], [1.0]], [0.3, 0.3])
    with pytest.raises(ModelError):
        RotationModel(((0.0, [1.0], []),), frequency=0.5)
    with pytest.raises(ModelError):
        RotationModel(((0.0, [1.0], []),), frequency=1 / 3 + 1e-12)


def test_nearly_rational():
    assert is_nearly_rational(0.25)
    assert is_nearly_rational(355 / 113)
    assert not is_nearly_rational(GOLDEN)
    assert not is_nearly_rational(math.sqrt(2) - 1)


def test_stationary_large_chain():
    rng = np.random.default_rng(0)
    P = rng.uniform(0.1, 1, (80, 80))
    P /= P.sum(axis=1, keepdims=True)
    pi = stationary_distribution(P)
    assert np.allclose(pi @ P, pi, atol=1e-12)
    assert pi.sum() == pytest.approx(1.0)


def test_psi_bound_basics(chain2):
    P = chain2.transition
    assert psi_bound(P, 0) == pytest.approx(5.0)  # 1/pi(1) - 1
    Q = np.tile([0.3, 0.7], (2, 1))
    assert psi_bound(Q, 1) == pytest.approx(0.0, abs=1e-15)


def test_psi_decays_at_second_eigenvalue(chain2):
    vals = [psi_bound(chain2.transition, n) for n in range(1, 15)]
    ratios = np.array(vals[1:]) / np.array(vals[:-1])
    assert np.allclose(ratios, 0.4, atol=1e-9)
    diag = mixing_diagnostic(chain2.transition)
    assert diag.rate == pytest.approx(math.log(1 / 0.4), rel=1e-3)
    assert diag.rate > 0


def test_karp_examples():
    W = np.array([[3.0]])
    assert max_mean_cycle(W, np.ones((1, 1), bool)) == 3.0
    W = np.array([[0.0, 1.0], [5.0, 0.0]])
    A = np.array([[True, True], [True, False]])
    assert max_mean_cycle(W, A) == 3.0  # cycle 0 -> 1 -> 0
    with pytest.raises(ModelError):
        max_mean_cycle(np.zeros((2, 2)), np.array([[True, True], [False, True]]))


@st.composite
def strong_graph(draw):
    m = draw(st.integers(1, 6))
    W = np.array(draw(st.lists(st.integers(-10, 10), min_size=m * m, max_size=m * m)), float).reshape(m, m)
    extra = np.array(draw(st.lists(st.booleans(), min_size=m * m, max_size=m * m))).reshape(m, m)
    A = extra.copy()
    for u in range(m):  # Hamiltonian cycle keeps it strongly connected
        A[u, (u + 1) % m] = True
    return W, A


@settings(max_examples=100, deadline=None)
@given(strong_graph())
def test_karp_matches_enumeration(graph):
    W, A = graph
    assert max_mean_cycle(W, A) == pytest.approx(brute_force_max_mean_cycle(W, A), abs=1e-12)


def test_c_plus(bernoulli, chain2, chain3):
    assert c_plus(bernoulli, 1) == 1.0
    assert c_plus(chain2, 1) == 1.0  # self loop on the state with value 1
    alt = MarkovModel([[0.2, 0.8], [1.0, 0.0]], [[0.0], [1.0]])
    assert c_plus(alt, 1) == 0.5  # only cycles through state 1 alternate
    assert c_plus(chain3, 1) == 2.0  # self loop at the state with value 2
    with pytest.raises(ModelError):
        c_plus(RotationModel(((0.0, [1.0], []),)), 1)


def test_model_dict_round_trip(bernoulli, chain3, rotation2):
    for m in (bernoulli, chain3, rotation2):
        d = model_to_dict(m)
        assert model_to_dict(model_from_dict(d)) == d
    with pytest.raises(ModelError):
        model_from_dict({"kind": "iid", "support": [[1.0]], "probabilities": [1.0], "extra": 1})
    with pytest.raises(ModelError):
        model_from_dict({"kind": "brownian"})
