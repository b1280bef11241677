"""Stationary bounded generators with exactly known means.

Three kinds: i.i.d. on a finite support, functionals of a finite irreducible
aperiodic Markov chain started from its stationary law, and irrational circle
rotations observed through a trigonometric polynomial.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

import numpy as np

from .iterated_sums import SampleSeries

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


class ModelError(ValueError):
    pass


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def replication_seed(seed: int, r: int) -> np.random.SeedSequence:
    """Independent stream ``r`` derived from a base seed; every sweep uses stream 0."""
    return np.random.SeedSequence(seed, spawn_key=(r,))


@dataclass(frozen=True, eq=False)
class IIDModel:
    support: np.ndarray
    probabilities: np.ndarray
    kind: str = field(default="iid", init=False)

    def __post_init__(self):
        s = np.asarray(self.support, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        p = np.asarray(self.probabilities, dtype=float)
        if s.ndim != 2 or p.shape != (s.shape[0],):
            raise ModelError("support must be (m, d) with one probability per point")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ModelError(f"probabilities must be non-negative and sum to 1, got sum {p.sum()!r}")
        if not np.all(np.isfinite(s)):
            raise ModelError("support points must be finite")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "probabilities", p)

    @property
    def d(self) -> int:
        return self.support.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self.probabilities @ self.support

    @property
    def bound(self) -> float:
        return float(np.abs(self.support[self.probabilities > 0]).max())

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        idx = rng.choice(self.support.shape[0], size=n, p=self.probabilities)
        return self.support[idx]


@dataclass(frozen=True, eq=False)
class MarkovModel:
    """``xi(k) = f(X_k)`` for a stationary chain ``X`` with transition matrix ``P``."""

    transition: np.ndarray
    values: np.ndarray
    kind: str = field(default="markov_functional", init=False)

    def __post_init__(self):
        P = np.asarray(self.transition, dtype=float)
        f = np.asarray(self.values, dtype=float)
        if f.ndim == 1:
            f = f[:, None]
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ModelError("transition matrix must be square")
        if f.ndim != 2 or f.shape[0] != P.shape[0]:
            raise ModelError("values must give one d-vector per state")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise ModelError("transition matrix rows must be non-negative and sum to 1")
        if not np.all(np.isfinite(f)):
            raise ModelError("values must be finite")
        check_irreducible_aperiodic(P)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "values", f)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def stationary(self) -> np.ndarray:
        return stationary_distribution(self.transition)

    @property
    def mean(self) -> np.ndarray:
        return self.stationary @ self.values

    @property
    def bound(self) -> float:
        return float(np.abs(self.values).max())

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        m = self.transition.shape[0]
        cum = np.cumsum(self.transition, axis=1)
        cum[:, -1] = 1.0
        u = rng.random(n).tolist()
        rows = cum.tolist()
        x = int(rng.choice(m, p=self.stationary))
        states = [x] * n
        for k in range(1, n):
            x = bisect.bisect_right(rows[x], u[k])
            states[k] = x
        states = np.minimum(np.asarray(states, dtype=np.intp), m - 1)
        return self.values[states]


@dataclass(frozen=True)
class RotationModel:
    """``xi(k) = g(x0 + k * frequency mod 1)`` with ``g_i`` a trigonometric polynomial.

    ``observable`` holds, per coordinate, ``(constant, cos_coeffs, sin_coeffs)``
    where harmonic ``j`` (1-based) enters as ``a_j cos(2 pi j x) + b_j sin(2 pi j x)``.
    """

    observable: tuple
    frequency: float = GOLDEN
    x0: float = 0.0
    kind: str = field(default="rotation", init=False)

    def __post_init__(self):
        coords = []
        for c in self.observable:
            const, cos, sin = c
            cos = tuple(float(a) for a in cos)
            sin = tuple(float(b) for b in sin)
            if not all(math.isfinite(v) for v in (float(const), *cos, *sin)):
                raise ModelError("observable coefficients must be finite")
            coords.append((float(const), cos, sin))
        if not coords:
            raise ModelError("observable needs at least one coordinate")
        object.__setattr__(self, "observable", tuple(coords))
        if not 0.0 <= self.x0 < 1.0:
            raise ModelError(f"x0 must lie in [0, 1), got {self.x0}")
        if is_nearly_rational(self.frequency):
            raise ModelError(f"rotation frequency {self.frequency!r} is (numerically) rational")

    @property
    def d(self) -> int:
        return len(self.observable)

    @property
    def mean(self) -> np.ndarray:
        return np.array([c[0] for c in self.observable])

    @property
    def bound(self) -> float:
        return max(abs(c) + sum(map(abs, a)) + sum(map(abs, b)) for c, a, b in self.observable)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        out = np.empty((x.size, self.d))
        for i, (const, cos, sin) in enumerate(self.observable):
            col = np.full(x.size, const)
            for j, a in enumerate(cos, start=1):
                col += a * np.cos(2 * np.pi * j * x)
            for j, b in enumerate(sin, start=1):
                col += b * np.sin(2 * np.pi * j * x)
            out[:, i] = col
        return out

    def sample(self, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
        # split k * frequency to keep the phase accurate for large k
        k = np.arange(n, dtype=np.float64)
        hi = np.float64(np.float32(self.frequency))
        lo = self.frequency - hi
        x = np.mod(np.mod(k * hi, 1.0) + np.mod(k * lo, 1.0) + self.x0, 1.0)
        return self.evaluate(x)


ProcessModel = Union[IIDModel, MarkovModel, RotationModel]


def is_nearly_rational(a: float, max_den: int = 10_000, tol: float = 1e-9) -> bool:
    frac = Fraction(a).limit_denominator(max_den)
    return abs(float(frac) - a) <= tol


def generate(model: ProcessModel, n: int, seed: SeedLike = None) -> SampleSeries:
    """``n`` stationary samples, deterministic given ``seed``; carries the exact mean and bound."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    samples = model.sample(n, _rng(seed))
    return SampleSeries(samples, mean=model.mean, bound=model.bound)


# --- chain structure -------------------------------------------------------

def _reachability(A: np.ndarray) -> np.ndarray:
    m = A.shape[0]
    R = (A | np.eye(m, dtype=bool)).astype(np.int64)
    for _ in range(max(1, math.ceil(math.log2(max(m, 2))))):
        R = ((R @ R) > 0).astype(np.int64)
    return R > 0


def is_strongly_connected(A: np.ndarray) -> bool:
    return bool(_reachability(np.asarray(A, dtype=bool)).all())


def check_irreducible_aperiodic(P: np.ndarray) -> None:
    A = P > 0
    if not is_strongly_connected(A):
        raise ModelError("transition matrix is reducible")
    # primitive iff A^k > 0 for k = (m-1)^2 + 1 (Wielandt)
    m = A.shape[0]
    k = (m - 1) ** 2 + 1
    M = np.eye(m, dtype=np.int64)
    base = A.astype(np.int64)
    while k:
        if k & 1:
            M = ((M @ base) > 0).astype(np.int64)
        base = ((base @ base) > 0).astype(np.int64)
        k >>= 1
    if not M.all():
        raise ModelError("transition matrix is periodic")


def stationary_distribution(P) -> np.ndarray:
    """Stationary law of an irreducible row-stochastic ``P``.

    Direct linear solve for up to 64 states, power iteration beyond.
    """
    P = np.asarray(P, dtype=float)
    m = P.shape[0]
    if not is_strongly_connected(P > 0):
        raise ModelError("transition matrix is reducible")
    if m <= 64:
        A = P.T - np.eye(m)
        A[-1, :] = 1.0
        rhs = np.zeros(m)
        rhs[-1] = 1.0
        pi = np.linalg.solve(A, rhs)
    else:
        # lazy chain has the same stationary law and is aperiodic
        L = 0.5 * (P + np.eye(m))
        pi = np.full(m, 1.0 / m)
        for _ in range(1_000_000):
            nxt = pi @ L
            nxt /= nxt.sum()
            if np.abs(nxt - pi).sum() < 1e-15:
                pi = nxt
                break
            pi = nxt
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.any(pi <= 0):
        raise ModelError("stationary distribution has a zero entry")
    return pi


@dataclass
class MixingDiagnostic:
    lags: np.ndarray
    bounds: np.ndarray
    rate: float
    intercept: float


def psi_bound(P, n: int, pi: np.ndarray | None = None) -> float:
    """``max_{x,y} |P^n(x, y) / pi(y) - 1|``: computable surrogate for the psi-mixing coefficient."""
    P = np.asarray(P, dtype=float)
    if pi is None:
        pi = stationary_distribution(P)
    if np.any(pi <= 0):
        raise ModelError("stationary distribution has a zero entry")
    Pn = np.linalg.matrix_power(P, n)
    return float(np.abs(Pn / pi[None, :] - 1.0).max())


def mixing_diagnostic(P, lags=range(1, 41), floor: float = 1e-13) -> MixingDiagnostic:
    """Psi surrogate over ``lags`` and a log-linear fit ``psi(n) ~ exp(intercept - rate n)``."""
    P = np.asarray(P, dtype=float)
    check_irreducible_aperiodic(P)
    pi = stationary_distribution(P)
    lags = np.asarray(list(lags))
    bounds = np.array([psi_bound(P, int(n), pi) for n in lags])
    keep = bounds > floor
    if keep.sum() >= 2:
        slope, intercept = np.polyfit(lags[keep], np.log(bounds[keep]), 1)
        rate = -slope
    else:
        # decays below the floor almost at once
        rate, intercept = math.inf, 0.0
    return MixingDiagnostic(lags, bounds, float(rate), float(intercept))


# --- essential supremum of long-run averages --------------------------------

def max_mean_cycle(weights: np.ndarray, adjacency: np.ndarray | None = None) -> float:
    """Maximum cycle mean of a strongly connected digraph (Karp).

    ``weights[u, v]`` is the weight of edge ``u -> v``; edges are where
    ``adjacency`` is true (default: finite weights).
    """
    W = np.asarray(weights, dtype=float)
    A = np.isfinite(W) if adjacency is None else np.asarray(adjacency, dtype=bool)
    m = W.shape[0]
    if not is_strongly_connected(A):
        raise ModelError("graph is not strongly connected")
    edges = [(u, v, W[u, v]) for u in range(m) for v in range(m) if A[u, v]]
    # D[k][v]: max weight of a k-edge walk from node 0 to v
    D = np.full((m + 1, m), -math.inf)
    D[0, 0] = 0.0
    for k in range(1, m + 1):
        for u, v, w in edges:
            if D[k - 1, u] > -math.inf and D[k - 1, u] + w > D[k, v]:
                D[k, v] = D[k - 1, u] + w
    best = -math.inf
    for v in range(m):
        if D[m, v] == -math.inf:
            continue
        worst = math.inf
        for k in range(m):
            if D[k, v] > -math.inf:
                worst = min(worst, (D[m, v] - D[k, v]) / (m - k))
        best = max(best, worst)
    return best


def brute_force_max_mean_cycle(weights: np.ndarray, adjacency: np.ndarray) -> float:
    """Maximum mean over all simple cycles, by enumeration."""
    W = np.asarray(weights, dtype=float)
    A = np.asarray(adjacency, dtype=bool)
    m = W.shape[0]
    best = -math.inf
    for start in range(m):
        # cycles whose smallest node is ``start``
        stack = [(start, [start], 0.0)]
        while stack:
            u, path, total = stack.pop()
            for v in range(start, m):
                if not A[u, v]:
                    continue
                if v == start:
                    best = max(best, (total + W[u, v]) / len(path))
                elif v not in path:
                    stack.append((v, path + [v], total + W[u, v]))
    return best


def c_plus(model: ProcessModel, i: int) -> float:
    """Essential sup of long-run averages of coordinate ``i`` (1-based)."""
    if isinstance(model, IIDModel):
        return float(model.support[model.probabilities > 0, i - 1].max())
    if isinstance(model, MarkovModel):
        P = model.transition
        W = np.broadcast_to(model.values[:, i - 1][None, :], P.shape)
        return max_mean_cycle(W, P > 0)
    raise ModelError("c+ is only defined here for iid and Markov models")


# --- config round trip -------------------------------------------------------

def model_from_dict(raw: dict[str, Any]) -> ProcessModel:
    raw = dict(raw)
    kind = raw.pop("kind", None)
    allowed = {
        "iid": {"support", "probabilities"},
        "markov_functional": {"transition", "values"},
        "rotation": {"observable", "frequency", "x0"},
    }
    if kind not in allowed:
        raise ModelError(f"unknown model kind {kind!r}; expected one of {sorted(allowed)}")
    unknown = set(raw) - allowed[kind]
    if unknown:
        raise ModelError(f"unknown keys for {kind} model: {sorted(unknown)}")
    if kind == "iid":
        return IIDModel(raw["support"], raw["probabilities"])
    if kind == "markov_functional":
        return MarkovModel(raw["transition"], raw["values"])
    obs = []
    for c in raw["observable"]:
        extra = set(c) - {"constant", "cos", "sin"}
        if extra:
            raise ModelError(f"unknown observable keys: {sorted(extra)}")
        obs.append((c.get("constant", 0.0), c.get("cos", []), c.get("sin", [])))
    return RotationModel(tuple(obs), raw.get("frequency", GOLDEN), raw.get("x0", 0.0))


def model_to_dict(model: ProcessModel) -> dict[str, Any]:
    if isinstance(model, IIDModel):
        return {"kind": "iid", "support": model.support.tolist(),
                "probabilities": model.probabilities.tolist()}
    if isinstance(model, MarkovModel):
        return {"kind": "markov_functional", "transition": model.transition.tolist(),
                "values": model.values.tolist()}
    return {
        "kind": "rotation",
        "frequency": model.frequency,
        "x0": model.x0,
        "observable": [{"constant": c, "cos": list(a), "sin": list(b)} for c, a, b in model.observable],
    }

