"""Dense truncated tensor algebra.

A level of degree ``n`` over ``R^d`` is stored as a flat float array of length
``d**n``, indexed lexicographically by words.  Words use 1-based letters in the
public API; everything internal is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class InvalidWordError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    """Multi-index ``(i_1, ..., i_n)`` with letters in ``1..d``."""

    letters: tuple[int, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(i) for i in self.letters))
        if self.d < 1:
            raise InvalidWordError(f"dimension must be >= 1, got {self.d}")
        for i in self.letters:
            if not 1 <= i <= self.d:
                raise InvalidWordError(f"letter {i} outside 1..{self.d}")

    @property
    def n(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def prefix(self, k: int) -> "Word":
        return Word(self.letters[:k], self.d)

    def __str__(self) -> str:
        return "-".join(str(i) for i in self.letters) or "empty"


def as_word(w: Word | Sequence[int], d: int) -> Word:
    if isinstance(w, Word):
        if w.d != d:
            raise DimensionError(f"word has d={w.d}, expected {d}")
        return w
    return Word(tuple(w), d)


def flatten_index(w: Word) -> int:
    """Offset of ``w`` inside its level: ``sum_j (i_j - 1) * d**(n-j)``."""
    offset = 0
    for i in w.letters:
        offset = offset * w.d + (i - 1)
    return offset


def unflatten_index(offset: int, n: int, d: int) -> Word:
    if not 0 <= offset < d**n:
        raise InvalidWordError(f"offset {offset} outside 0..{d**n - 1}")
    letters = []
    for _ in range(n):
        offset, r = divmod(offset, d)
        letters.append(r + 1)
    return Word(tuple(reversed(letters)), d)


def all_words(n: int, d: int) -> list[Word]:
    return [unflatten_index(k, n, d) for k in range(d**n)]


def _check_level_length(length: int, d: int) -> None:
    k = 1
    while k < length:
        k *= d
        if d == 1:
            break
    if k != length:
        raise DimensionError(f"level length {length} is not a power of d={d}")


def outer_append(T: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Degree ``n+1`` level with entries ``T[w] * v[i]`` at word ``w i``."""
    T = np.asarray(T, dtype=float)
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError("v must be a vector")
    _check_level_length(T.size, v.size)
    return np.multiply.outer(T.ravel(), v).ravel()


@dataclass
class SignatureState:
    """Truncated tensor-algebra element, levels ``0..depth``.

    ``count`` is the number of consumed samples (discrete engine) or the elapsed
    duration (continuous engine).
    """

    d: int
    depth: int
    levels: list[np.ndarray] = field(default_factory=list)
    count: float = 0
    kahan: bool = False
    compensation: list[np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise DimensionError(f"d must be >= 1, got {self.d}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if not self.levels:
            self.levels = [np.zeros(self.d**n) for n in range(self.depth + 1)]
            self.levels[0][0] = 1.0
        if len(self.levels) != self.depth + 1:
            raise DimensionError("need one level per degree 0..depth")
        for n, lev in enumerate(self.levels):
            if lev.shape != (self.d**n,):
                raise DimensionError(f"level {n} has shape {lev.shape}, expected ({self.d**n},)")
            if not np.all(np.isfinite(lev)):
                raise FloatingPointError(f"non-finite entry in level {n}")
        if self.kahan and self.compensation is None:
            self.compensation = [np.zeros_like(lev) for lev in self.levels]

    @classmethod
    def identity(cls, d: int, depth: int) -> "SignatureState":
        return cls(d, depth)

    def copy(self) -> "SignatureState":
        comp = None if self.compensation is None else [c.copy() for c in self.compensation]
        return SignatureState(
            self.d, self.depth, [lev.copy() for lev in self.levels], self.count, self.kahan, comp
        )

    def add_to_level(self, n: int, incr: np.ndarray) -> None:
        """In-place ``level[n] += incr``, compensated when ``kahan`` is on."""
        if self.compensation is None:
            self.levels[n] += incr
            return
        s, c = self.levels[n], self.compensation[n]
        y = incr - c
        t = s + y
        c[:] = (t - s) - y
        s[:] = t

    def level(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} requested but truncation depth is {self.depth}")
        return self.levels[n]

    def entry(self, w: Word | Sequence[int]) -> float:
        w = as_word(w, self.d)
        return float(self.level(w.n)[flatten_index(w)])

    def allclose(self, other: "SignatureState", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        _check_compatible(self, other)
        return all(np.allclose(a, b, atol=atol, rtol=rtol) for a, b in zip(self.levels, other.levels))


def _check_compatible(S: SignatureState, E: SignatureState) -> None:
    if S.d != E.d or S.depth != E.depth:
        raise DimensionError(f"incompatible states: (d={S.d}, N={S.depth}) vs (d={E.d}, N={E.depth})")


def chen_concat(S: SignatureState, E: SignatureState) -> SignatureState:
    """Concatenation product truncated at the common depth."""
    _check_compatible(S, E)
    levels = []
    for n in range(S.depth + 1):
        acc = np.zeros(S.d**n)
        for a in range(n + 1):
            acc += np.multiply.outer(S.levels[a], E.levels[n - a]).ravel()
        levels.append(acc)
    return SignatureState(S.d, S.depth, levels, S.count + E.count)


def tensor_exp(v: np.ndarray | Iterable[float], h: float, depth: int, d: int | None = None) -> SignatureState:
    """Signature of the constant path ``v`` held for duration ``h``: level n = (v h)^n / n!."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if d is None:
        d = v.size
    if v.shape != (d,):
        raise DimensionError(f"v has shape {v.shape}, expected ({d},)")
    if not h > 0:
        raise ValueError(f"duration must be positive, got {h}")
    x = v * h
    levels = [np.ones(1)]
    for n in range(1, depth + 1):
        levels.append(np.multiply.outer(levels[-1], x).ravel() / n)
    return SignatureState(d, depth, levels, h)


def scale_levels(S: SignatureState, t: float) -> SignatureState:
    """Multiply level n by ``t**-n``."""
    if not t > 0:
        raise ValueError(f"scale must be positive, got {t}")
    levels = [lev * float(t) ** (-n) for n, lev in enumerate(S.levels)]
    return SignatureState(S.d, S.depth, levels, S.count)


def accumulate_batch(state: SignatureState, X: np.ndarray, exponential: bool) -> SignatureState:
    """Advance ``state`` in place by the rows of ``X`` (shape ``(B, d)``).

    With ``exponential=False`` each row ``x`` contributes the discrete update
    ``level n += level n-1 (x)`` (strictly increasing indices).  With
    ``exponential=True`` each row is the increment of a constant segment and the
    state is right-multiplied by its tensor exponential.  The batch is processed
    level by level with exclusive cumulative sums, which reproduces the
    per-row recursion exactly (up to summation order).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != state.d:
        raise DimensionError(f"batch has shape {X.shape}, expected (B, {state.d})")
    B = X.shape[0]
    if B == 0:
        return state
    d, N = state.d, state.depth
    # before[k][t] = level k just before row t is consumed
    before = [np.ones((B, 1))]
    powers = [np.ones((B, 1))]
    if exponential:
        for a in range(1, N + 1):
            powers.append((powers[-1][:, :, None] * X[:, None, :]).reshape(B, d**a) / a)
    totals = []
    for k in range(1, N + 1):
        if exponential:
            incr = np.zeros((B, d**k))
            for a in range(1, k + 1):
                incr += (before[k - a][:, :, None] * powers[a][:, None, :]).reshape(B, d**k)
        else:
            incr = (before[k - 1][:, :, None] * X[:, None, :]).reshape(B, d**k)
        totals.append(incr.sum(axis=0))
        if k < N:
            run = np.cumsum(incr, axis=0)
            run[1:] = run[:-1]
            run[0] = 0.0
            before.append(run + state.levels[k])
    for k in range(1, N + 1):
        state.add_to_level(k, totals[k - 1])
    if not all(np.all(np.isfinite(lev)) for lev in state.levels):
        raise FloatingPointError("non-finite signature entry")
    return state


def batch_rows(N: int, d: int, budget: int = 1 << 21) -> int:
    """Rows per batch so the largest per-level buffer stays near ``budget`` floats."""
    return max(1, budget // d**N)
