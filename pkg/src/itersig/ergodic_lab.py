"""Seed-reproducible convergence experiments.

* ``as_sweep`` / ``continuous_sweep``: one trajectory, normalized iterated
  sum (integral) of a word at each checkpoint against ``prod Q / v!``.
* ``l1_sweep``: Monte Carlo mean absolute error over independent replications.
* ``er_scan``: Erdos-Renyi scan statistic of the word's prefix trajectory over
  windows of length ``floor(log n / I(alpha))``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .iterated_integrals import push_segments
from .iterated_sums import coordinate_track, push_many, theoretical_limit
from .large_deviations import DomainError, RateFunction, window_length
from .processes import IIDModel, MarkovModel, ProcessModel, c_plus, generate, replication_seed
from .tensor_core import SignatureState, Word, as_word, flatten_index

MODES = ("almost_sure_discrete", "almost_sure_continuous", "L1_monte_carlo")


@dataclass
class ConvergenceReport:
    word: Word
    mode: str
    checkpoints: np.ndarray
    values: np.ndarray
    limit: float
    errors: np.ndarray
    stderr: np.ndarray | None = None
    replication_values: np.ndarray | None = None
    step: float | None = None

    @property
    def slope(self) -> float | None:
        """Least-squares slope of ``log e_k`` against ``log n_k``."""
        if len(self.checkpoints) < 4 or np.any(self.errors <= 0):
            return None
        return float(np.polyfit(np.log(self.checkpoints), np.log(self.errors), 1)[0])

    @property
    def final(self) -> tuple[int, float]:
        return int(self.checkpoints[-1]), float(self.errors[-1])


@dataclass
class ErdosRenyiReport:
    word: Word
    alpha: float
    rate_value: float
    checkpoints: np.ndarray
    ell: np.ndarray
    statistic: np.ndarray
    predicted_limit: float
    c_plus: float


def geometric_checkpoints(start: int, count: int, ratio: int = 2) -> list[int]:
    return [int(start) * int(ratio) ** k for k in range(count)]


def _validate_checkpoints(checkpoints: Sequence[int]) -> np.ndarray:
    cps = np.asarray(list(checkpoints), dtype=np.int64)
    if cps.ndim != 1 or cps.size == 0:
        raise ValueError("need at least one checkpoint")
    if cps[0] < 1 or np.any(np.diff(cps) <= 0):
        raise ValueError(f"checkpoints must be positive and strictly increasing: {cps.tolist()}")
    return cps


def _stream_discrete(samples: np.ndarray, depth: int, cps: np.ndarray, kahan: bool) -> list[SignatureState]:
    state = SignatureState(samples.shape[1], depth, kahan=kahan)
    out, done = [], 0
    for n in cps:
        push_many(state, samples[done:n])
        done = int(n)
        out.append(state.copy())
    return out


def _stream_continuous(values: np.ndarray, h: float, depth: int, cps: np.ndarray) -> list[SignatureState]:
    state = SignatureState(values.shape[1], depth)
    out, done = [], 0
    for n in cps:
        push_segments(state, values[done:n], h)
        done = int(n)
        out.append(state.copy())
    return out


def _normalized_entries(states: list[SignatureState], w: Word, scale: np.ndarray) -> np.ndarray:
    idx = flatten_index(w)
    return np.array([st.levels[w.n][idx] / float(t) ** w.n for st, t in zip(states, scale)])


def _trajectories(model: ProcessModel, words: list[Word], cps: np.ndarray, seed, depth: int,
                  h: float | None, kahan: bool) -> np.ndarray:
    """Normalized values, shape ``(len(words), len(cps))``, for one seeded trajectory."""
    series = generate(model, int(cps[-1]), seed)
    if h is None:
        states = _stream_discrete(series.samples, depth, cps, kahan)
        scale = cps.astype(float)
    else:
        states = _stream_continuous(series.samples, h, depth, cps)
        scale = cps * h
    return np.array([_normalized_entries(states, w, scale) for w in words])


def _prepare(model: ProcessModel, words, checkpoints, depth: int | None):
    words = [as_word(w, model.d) for w in words]
    if not words:
        raise ValueError("need at least one word")
    if any(w.n < 1 for w in words):
        raise ValueError("words must have degree >= 1")
    top = max(w.n for w in words)
    depth = top if depth is None else depth
    if top > depth:
        raise ValueError(f"word degree {top} exceeds truncation depth {depth}")
    return words, _validate_checkpoints(checkpoints), depth


def as_sweeps(model: ProcessModel, words, checkpoints, seed: int, depth: int | None = None,
              h: float | None = None, kahan: bool = False) -> list[ConvergenceReport]:
    """Single-trajectory sweeps for several words sharing one stream."""
    words, cps, depth = _prepare(model, words, checkpoints, depth)
    if h is not None and not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    vals = _trajectories(model, words, cps, replication_seed(seed, 0), depth, h, kahan)
    mode = "almost_sure_discrete" if h is None else "almost_sure_continuous"
    reports = []
    for w, v in zip(words, vals):
        L = theoretical_limit(model.mean, w)
        reports.append(ConvergenceReport(w, mode, cps, v, L, np.abs(v - L), step=h))
    return reports


def as_sweep(model: ProcessModel, word, checkpoints, seed: int, depth: int | None = None,
             kahan: bool = False) -> ConvergenceReport:
    return as_sweeps(model, [word], checkpoints, seed, depth, kahan=kahan)[0]


def continuous_sweep(model: ProcessModel, word, h: float, checkpoints, seed: int,
                     depth: int | None = None) -> ConvergenceReport:
    """Sweep over the piecewise-constant path holding each sample for ``h``; checkpoints count segments."""
    return as_sweeps(model, [word], checkpoints, seed, depth, h=h)[0]


def l1_sweeps(model: ProcessModel, words, checkpoints, replications: int, seed: int,
              depth: int | None = None, h: float | None = None, kahan: bool = False,
              threads: int = 1) -> list[ConvergenceReport]:
    """Mean absolute error over ``replications`` independent streams; stream 0 is the ``as_sweep`` stream.

    The standard error is NaN when there is a single replication.
    """
    if replications < 1:
        raise ValueError(f"need at least 1 replication, got {replications}")
    words, cps, depth = _prepare(model, words, checkpoints, depth)

    def one(r: int) -> np.ndarray:
        return _trajectories(model, words, cps, replication_seed(seed, r), depth, h, kahan)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(one, range(replications)))
    else:
        runs = [one(r) for r in range(replications)]
    runs = np.stack(runs, axis=1)  # (words, R, K)
    reports = []
    for w, vals in zip(words, runs):
        L = theoretical_limit(model.mean, w)
        dev = np.abs(vals - L)
        if replications > 1:
            stderr = dev.std(axis=0, ddof=1) / math.sqrt(replications)
        else:
            stderr = np.full(len(cps), np.nan)
        reports.append(ConvergenceReport(
            w, "L1_monte_carlo", cps, vals.mean(axis=0), L, dev.mean(axis=0),
            stderr=stderr,
            replication_values=vals, step=h,
        ))
    return reports


def l1_sweep(model: ProcessModel, word, checkpoints, replications: int, seed: int,
             depth: int | None = None, h: float | None = None, threads: int = 1) -> ConvergenceReport:
    return l1_sweeps(model, [word], checkpoints, replications, seed, depth, h, threads=threads)[0]


# --- Erdos-Renyi scan -----------------------------------------------------

def scan_max(track: np.ndarray, ell: int, n: int) -> float:
    """``max_{0 <= m <= n - ell} track[m + ell] - track[m]`` in one O(n) pass."""
    if not 1 <= ell < n or n >= track.size:
        raise ValueError(f"need 1 <= ell < n < len(track); got ell={ell}, n={n}, len={track.size}")
    return float(np.max(track[ell:n + 1] - track[:n - ell + 1]))


def scan_max_naive(xi: np.ndarray, prefix: np.ndarray, ell: int, n: int) -> float:
    """Same maximum, re-summing each window term by term: ``sum_{k=m}^{m+ell-1} xi[k] prefix[k]``.

    ``prefix[k]`` is the degree ``v-1`` prefix value before sample ``k``. Cost O(n ell).
    """
    best = -math.inf
    for m in range(n - ell + 1):
        best = max(best, float(np.dot(xi[m:m + ell], prefix[m:m + ell])))
    return best


def er_statistic(window_max: float, rate_value: float, n: int, degree: int) -> float:
    return rate_value * window_max / (float(n) ** (degree - 1) * math.log(n))


def er_predicted_limit(Q, w: Word, alpha: float) -> float:
    """``alpha * prod_{j<v} Q[i_j] / (v-1)!``."""
    return alpha * theoretical_limit(Q, w.prefix(w.n - 1))


def er_scan(model: ProcessModel, word, alpha: float, checkpoints, seed: int) -> ErdosRenyiReport:
    if not isinstance(model, (IIDModel, MarkovModel)):
        raise DomainError(f"scan statistic needs an iid or Markov model, got {model.kind}")
    w = as_word(word, model.d)
    if w.n < 1:
        raise ValueError("word must have degree >= 1")
    cps = _validate_checkpoints(checkpoints)
    i_last = w.letters[-1]
    I = RateFunction(model, i_last)
    lo, hi = I.domain
    if not lo < alpha < hi:
        raise DomainError(f"alpha={alpha} outside ({lo}, {hi}) for coordinate {i_last}")
    Ia = I(alpha)
    ells = np.array([window_length(int(n), Ia) for n in cps], dtype=np.int64)
    if np.any(np.diff(ells) <= 0):
        raise ValueError(f"window lengths {ells.tolist()} are not strictly increasing; spread the checkpoints")
    series = generate(model, int(cps[-1]), replication_seed(seed, 0))
    track = coordinate_track(series, w).values
    stats = np.array([
        er_statistic(scan_max(track, int(ell), int(n)), Ia, int(n), w.n) for n, ell in zip(cps, ells)
    ])
    return ErdosRenyiReport(
        w, float(alpha), Ia, cps, ells, stats,
        er_predicted_limit(model.mean, w, alpha), c_plus(model, i_last),
    )
