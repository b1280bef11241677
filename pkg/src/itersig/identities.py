"""Built-in randomized identity checks, deterministic given a seed.

Each check returns ``(passed, total)``; a case passes when the identity holds
at the tolerance the engines are held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .iterated_integrals import PathGrid, path_signature
from .iterated_sums import abel_rhs, brute_force_sum, iterated_sums
from .tensor_core import SignatureState, all_words, chen_concat, flatten_index, tensor_exp


@dataclass
class IdentityResult:
    name: str
    passed: int
    total: int

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def random_state(rng: np.random.Generator, d: int, depth: int) -> SignatureState:
    levels = [np.ones(1)] + [rng.uniform(-1, 1, d**n) for n in range(1, depth + 1)]
    return SignatureState(d, depth, levels)


def check_abel(rng, cases: int = 1000) -> tuple[int, int]:
    ok = 0
    for _ in range(cases):
        n = int(rng.integers(1, 51))
        a, b = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        ok += abs(abel_rhs(a, b) - float(np.dot(a, b))) <= 1e-12
    return ok, cases


def check_oracle(rng, cases: int = 100) -> tuple[int, int]:
    ok = 0
    for _ in range(cases):
        d, depth, n = int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(0, 13))
        X = rng.uniform(-1, 1, (n, d))
        state = iterated_sums(X.reshape(n, d), depth)
        good = True
        for k in range(1, depth + 1):
            for w in all_words(k, d):
                if abs(state.levels[k][flatten_index(w)] - brute_force_sum(X.reshape(n, d), w, n)) > 1e-12:
                    good = False
        ok += good
    return ok, cases


def check_chen_associativity(rng, cases: int = 100) -> tuple[int, int]:
    ok = 0
    for _ in range(cases):
        d, depth = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        A, B, C = (random_state(rng, d, depth) for _ in range(3))
        ok += chen_concat(chen_concat(A, B), C).allclose(chen_concat(A, chen_concat(B, C)), atol=1e-12)
    return ok, cases


def check_exp_semigroup(rng, cases: int = 100) -> tuple[int, int]:
    ok = 0
    for _ in range(cases):
        d, depth = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        v = rng.uniform(-1, 1, d)
        h1, h2 = rng.uniform(0.01, 1.0, 2)
        lhs = chen_concat(tensor_exp(v, h1, depth), tensor_exp(v, h2, depth))
        ok += lhs.allclose(tensor_exp(v, h1 + h2, depth), atol=1e-12)
    return ok, cases


def check_scalar_path(rng, cases: int = 100) -> tuple[int, int]:
    """d = 1 integrals: level n equals (level 1)^n / n!."""
    ok = 0
    for _ in range(cases):
        depth = int(rng.integers(1, 6))
        path = PathGrid(rng.uniform(-1, 1, int(rng.integers(1, 20))), float(rng.uniform(0.1, 1.0)))
        S = path_signature(path, depth)
        x = S.levels[1][0]
        ok += all(
            math.isclose(S.levels[n][0], x**n / math.factorial(n), rel_tol=1e-10, abs_tol=1e-14)
            for n in range(depth + 1)
        )
    return ok, cases


def check_quasi_shuffle(rng, cases: int = 100) -> tuple[int, int]:
    """Sums: S^i S^j = S^{ij} + S^{ji} + sum_k xi_i(k) xi_j(k)."""
    ok = 0
    for _ in range(cases):
        d, n = int(rng.integers(2, 4)), int(rng.integers(1, 40))
        X = rng.uniform(-1, 1, (n, d))
        S = iterated_sums(X, 2)
        good = True
        for i in range(d):
            for j in range(d):
                lhs = S.levels[1][i] * S.levels[1][j]
                rhs = S.levels[2][i * d + j] + S.levels[2][j * d + i] + float(X[:, i] @ X[:, j])
                good &= math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-12)
        ok += good
    return ok, cases


def check_shuffle(rng, cases: int = 100) -> tuple[int, int]:
    """Integrals: S^i S^j = S^{ij} + S^{ji}, no diagonal term."""
    ok = 0
    for _ in range(cases):
        d, n = int(rng.integers(2, 4)), int(rng.integers(1, 40))
        S = path_signature(PathGrid(rng.uniform(-1, 1, (n, d)), float(rng.uniform(0.1, 1.0))), 2)
        good = True
        for i in range(d):
            for j in range(d):
                lhs = S.levels[1][i] * S.levels[1][j]
                rhs = S.levels[2][i * d + j] + S.levels[2][j * d + i]
                good &= math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-12)
        ok += good
    return ok, cases


CHECKS: dict[str, Callable] = {
    "abel_summation": check_abel,
    "oracle_equivalence": check_oracle,
    "chen_associativity": check_chen_associativity,
    "exp_semigroup": check_exp_semigroup,
    "scalar_path_closed_form": check_scalar_path,
    "quasi_shuffle_sums": check_quasi_shuffle,
    "shuffle_integrals": check_shuffle,
}


def run_identities(seed: int = 0) -> list[IdentityResult]:
    results = []
    for k, (name, fn) in enumerate(CHECKS.items()):
        rng = np.random.default_rng([seed, k])
        passed, total = fn(rng)
        results.append(IdentityResult(name, int(passed), int(total)))
    return results
