"""Discrete iterated sums over strictly increasing index tuples.

``Sigma^{i_1..i_v}(n) = sum_{0 <= k_1 < ... < k_v < n} xi_{i_1}(k_1) ... xi_{i_v}(k_v)``

After ``m`` pushes, level ``v`` of the state holds ``Sigma^{(v)}(m)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor_core import (
    DimensionError,
    SignatureState,
    Word,
    accumulate_batch,
    as_word,
    batch_rows,
    outer_append,
    scale_levels,
)


@dataclass
class SampleSeries:
    """Samples ``xi(0), xi(1), ...`` as an ``(n, d)`` array with optional known mean and bound."""

    samples: np.ndarray
    mean: np.ndarray | None = None
    bound: float | None = None

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise DimensionError(f"samples must be (n, d), got shape {x.shape}")
        self.samples = x
        if self.mean is not None:
            self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
            if self.mean.shape != (self.d,):
                raise DimensionError(f"mean has shape {self.mean.shape}, expected ({self.d},)")
        if self.bound is not None and x.size and np.abs(x).max() > self.bound * (1 + 1e-12):
            raise ValueError(f"sample exceeds declared bound C={self.bound}")

    @property
    def d(self) -> int:
        return self.samples.shape[1]

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass
class CoordinateTrack:
    """Prefix trajectory ``values[m] = Sigma^word(m)`` for ``m = 0..n``."""

    word: Word
    values: np.ndarray

    def decimate(self, step: int) -> np.ndarray:
        """Every ``step``-th prefix value (always keeps ``m = 0``)."""
        if step < 1:
            raise ValueError("decimation step must be >= 1")
        return self.values[::step]


def push(state: SignatureState, x) -> SignatureState:
    """Consume one sample in place.

    Levels are updated from the top degree down so that level ``n`` sees the
    pre-update level ``n-1``; this is what keeps the index ordering strict.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (state.d,):
        raise DimensionError(f"sample has shape {x.shape}, expected ({state.d},)")
    for n in range(state.depth, 0, -1):
        state.add_to_level(n, outer_append(state.levels[n - 1], x))
    if not all(np.all(np.isfinite(lev)) for lev in state.levels):
        raise FloatingPointError("non-finite signature entry")
    state.count += 1
    return state


def push_many(state: SignatureState, X) -> SignatureState:
    """Consume the rows of ``X`` in place; same result as repeated :func:`push`."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[1] != state.d:
        raise DimensionError(f"batch has shape {X.shape}, expected (B, {state.d})")
    if state.kahan:
        for x in X:
            push(state, x)
        return state
    step = batch_rows(state.depth, state.d)
    for start in range(0, X.shape[0], step):
        chunk = X[start:start + step]
        accumulate_batch(state, chunk, exponential=False)
        state.count += chunk.shape[0]
    return state


def iterated_sums(series: SampleSeries | np.ndarray, depth: int, n: int | None = None,
                  kahan: bool = False) -> SignatureState:
    if not isinstance(series, SampleSeries):
        series = SampleSeries(series)
    n = len(series) if n is None else n
    state = SignatureState(series.d, depth, kahan=kahan)
    return push_many(state, series.samples[:n])


def brute_force_sum(series: SampleSeries | np.ndarray, w: Word | Sequence[int], n: int) -> float:
    """Direct enumeration over all strictly increasing tuples; cost ``C(n, len(w))``."""
    if not isinstance(series, SampleSeries):
        series = SampleSeries(series)
    w = as_word(w, series.d)
    if not 0 <= n <= len(series):
        raise ValueError(f"n={n} outside 0..{len(series)}")
    if w.n == 0:
        return 1.0
    cols = [series.samples[:n, i - 1] for i in w.letters]
    total = 0.0
    for ks in itertools.combinations(range(n), w.n):
        prod = 1.0
        for col, k in zip(cols, ks):
            prod *= col[k]
        total += prod
    return total


def normalized_signature(state: SignatureState) -> SignatureState:
    if state.count < 1:
        raise ValueError("normalization needs at least one consumed sample")
    return scale_levels(state, state.count)


def theoretical_limit(Q, w: Word | Sequence[int]) -> float:
    """Ergodic limit of the normalized iterated sum: ``prod_j Q[i_j] / v!``."""
    Q = np.atleast_1d(np.asarray(Q, dtype=float))
    letters = w.letters if isinstance(w, Word) else tuple(w)
    prod = 1.0
    for i in letters:
        prod *= Q[i - 1]
    return prod / math.factorial(len(letters))


def abel_rhs(a, b) -> float:
    """Summation-by-parts form of ``sum_r a_r b_r`` using running means of ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size < 1:
        raise ValueError("need at least one term")
    n = a.size - 1
    r = np.arange(n + 1)
    sigma = np.cumsum(b) / (r + 1)
    head = np.sum((r[:-1] + 1) * (a[:-1] - a[1:]) * sigma[:-1])
    return float(head + (n + 1) * a[n] * sigma[n])


def coordinate_track(series: SampleSeries | np.ndarray, w: Word | Sequence[int]) -> CoordinateTrack:
    """``Sigma^w(m)`` for every prefix ``m = 0..n``.

    Carries only the prefix words of ``w``: ``track_k[m] = sum_{t<m} xi_{i_k}(t) track_{k-1}[t]``.
    """
    if not isinstance(series, SampleSeries):
        series = SampleSeries(series)
    w = as_word(w, series.d)
    n = len(series)
    prev = np.ones(n + 1)
    for i in w.letters:
        cur = np.empty(n + 1)
        cur[0] = 0.0
        np.cumsum(series.samples[:, i - 1] * prev[:-1], out=cur[1:])
        prev = cur
    return CoordinateTrack(w, prev)


def prefix_bound(series: SampleSeries, n: int, degree: int) -> float:
    """Entrywise bound ``(sum_{k<n} |xi(k)|_inf)^v / v!`` on level ``v`` after ``n`` samples."""
    total = float(np.abs(series.samples[:n]).max(axis=1).sum()) if n else 0.0
    return total**degree / math.factorial(degree)
