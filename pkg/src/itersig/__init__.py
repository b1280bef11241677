"""Streaming iterated sums and integrals of stationary series, with ergodic and
Erdos-Renyi experiments."""

__version__ = "0.1.0"

from .tensor_core import (  # noqa: F401
    SignatureState,
    Word,
    chen_concat,
    flatten_index,
    outer_append,
    scale_levels,
    tensor_exp,
    unflatten_index,
)
from .iterated_sums import (  # noqa: F401
    SampleSeries,
    abel_rhs,
    brute_force_sum,
    coordinate_track,
    normalized_signature,
    push,
    push_many,
    theoretical_limit,
)
from .iterated_integrals import PathGrid, normalized_path_signature, push_segment, riemann_oracle  # noqa: F401
