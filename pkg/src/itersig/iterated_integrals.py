"""Iterated integrals of piecewise-constant paths.

The path holds ``values[j]`` on ``[j h, (j+1) h)``.  Its signature is exact:
each segment contributes a tensor exponential and segments compose by Chen
concatenation.
"""

from __future__ import annotations

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
    chen_concat,
    scale_levels,
    tensor_exp,
)


@dataclass
class PathGrid:
    """Uniform-step piecewise-constant path; ``values`` has shape ``(segments, d)``."""

    values: np.ndarray
    h: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DimensionError(f"values must be (segments, d), got {v.shape}")
        if not self.h > 0:
            raise ValueError(f"step must be positive, got {self.h}")
        self.values = v

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def T(self) -> float:
        return self.h * self.values.shape[0]

    def __len__(self) -> int:
        return self.values.shape[0]


def push_segment(state: SignatureState, v, h: float) -> SignatureState:
    """Append a constant segment: ``state <- state (x) exp(v h)``. Returns a new state."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != (state.d,):
        raise DimensionError(f"segment value has shape {v.shape}, expected ({state.d},)")
    return chen_concat(state, tensor_exp(v, h, state.depth, state.d))


def push_segments(state: SignatureState, values, h: float) -> SignatureState:
    """In-place batched equivalent of repeated :func:`push_segment` with a common step."""
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    step = batch_rows(state.depth, state.d)
    for start in range(0, values.shape[0], step):
        chunk = values[start:start + step]
        accumulate_batch(state, chunk * h, exponential=True)
        state.count += h * chunk.shape[0]
    return state


def path_signature(path: PathGrid, depth: int, segments: int | None = None) -> SignatureState:
    segments = len(path) if segments is None else segments
    state = SignatureState(path.d, depth)
    return push_segments(state, path.values[:segments], path.h)


def riemann_oracle(path: PathGrid, w: Word | Sequence[int], refinement: int = 1) -> float:
    """Left-endpoint evaluation of ``Sigma^{w}(t) = int_0^t xi_{i_n}(s) Sigma^{w'}(s) ds``.

    Each segment is split into ``refinement`` equal cells; the nested sums are
    strict, so the diagonal is dropped and the error is ``O(1/refinement)``.
    """
    w = as_word(w, path.d)
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    fine = np.repeat(path.values, refinement, axis=0)
    dt = path.h / refinement
    inner = np.ones(fine.shape[0])  # Sigma^{empty} = 1 at every left endpoint
    total = 1.0
    for i in w.letters:
        f = fine[:, i - 1] * inner * dt
        total = float(f.sum())
        inner = np.concatenate(([0.0], np.cumsum(f)[:-1]))
    return total


def normalized_path_signature(state: SignatureState, T: float) -> SignatureState:
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    return scale_levels(state, T)
