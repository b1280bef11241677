"""Rate functions for window averages of one coordinate.

i.i.d. models use the log moment generating function; Markov functionals use
the log Perron root of the tilted matrix ``P(x, y) exp(lam f_i(y))``.  The rate
is the Legendre transform ``I(a) = sup_lam (lam a - Lambda(lam))``, solved on
the increasing branch ``Lambda'(lam) = a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .processes import IIDModel, MarkovModel, ProcessModel, c_plus


class DomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


LAMBDA_CAP = 500.0


def perron_root(A: np.ndarray, tol: float = 1e-12, max_iter: int = 200_000,
                left: bool = False) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and positive eigenvector of a non-negative primitive matrix.

    Power iteration, stopping once ``|A v - rho v|_1 <= tol * rho |v|_1``.  Small
    matrices start from a dense eigenvector so only a few polishing steps run.
    """
    M = A.T if left else A
    m = M.shape[0]
    v = np.full(m, 1.0 / m)
    if m <= 64:
        vals, vecs = np.linalg.eig(M)
        guess = np.abs(vecs[:, np.argmax(vals.real)].real)
        if guess.sum() > 0 and np.all(np.isfinite(guess)):
            v = guess / guess.sum() + 1e-12 * v
    rho = 0.0
    res = math.inf
    for _ in range(max_iter):
        w = M @ v
        rho = w.sum() / v.sum()
        res = np.abs(w - rho * v).sum() / (rho * np.abs(v).sum())
        if res <= tol:
            return float(rho), v
        v = w / w.sum()
    raise ConvergenceError(f"power iteration did not converge: relative residual {res:.3e}")


def _tilted(model: MarkovModel, i: int, lam: float) -> tuple[np.ndarray, float]:
    f = model.values[:, i - 1]
    shift = lam * (f.max() if lam >= 0 else f.min())
    return model.transition * np.exp(lam * f - shift)[None, :], shift


def cgf(model: ProcessModel, i: int, lam: float) -> float:
    """``Lambda(lam)`` for coordinate ``i`` (1-based)."""
    if lam == 0.0:
        return 0.0
    if isinstance(model, IIDModel):
        x = model.support[:, i - 1]
        return float(logsumexp(lam * x, b=model.probabilities))
    if isinstance(model, MarkovModel):
        A, shift = _tilted(model, i, lam)
        rho, _ = perron_root(A)
        return math.log(rho) + shift
    raise DomainError(f"no rate function for {model.kind} models")


def cgf_derivative(model: ProcessModel, i: int, lam: float) -> float:
    """``Lambda'(lam)``: the mean of coordinate ``i`` under the tilted law."""
    if isinstance(model, IIDModel):
        x = model.support[:, i - 1]
        logw = np.log(np.where(model.probabilities > 0, model.probabilities, 1.0)) + lam * x
        logw = np.where(model.probabilities > 0, logw, -np.inf)
        w = np.exp(logw - logw.max())
        return float(w @ x / w.sum())
    if isinstance(model, MarkovModel):
        A, _ = _tilted(model, i, lam)
        rho, r = perron_root(A)
        _, l = perron_root(A, left=True)
        f = model.values[:, i - 1]
        # d rho / d lam = l^T (A diag f) r / l^T r
        return float(l @ (A @ (f * r)) / (rho * (l @ r)))
    raise DomainError(f"no rate function for {model.kind} models")


@dataclass
class RateFunction:
    """``I_i`` on ``[Q_i, c+_i)`` for one coordinate of an i.i.d. or Markov model."""

    model: ProcessModel
    i: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not isinstance(self.model, (IIDModel, MarkovModel)):
            raise DomainError(f"no rate function for {self.model.kind} models")
        if not 1 <= self.i <= self.model.d:
            raise DomainError(f"coordinate {self.i} outside 1..{self.model.d}")
        self.mean = float(self.model.mean[self.i - 1])
        self.sup = float(c_plus(self.model, self.i))

    @property
    def domain(self) -> tuple[float, float]:
        return self.mean, self.sup

    def cgf(self, lam: float) -> float:
        if lam not in self._cache:
            self._cache[lam] = cgf(self.model, self.i, lam)
        return self._cache[lam]

    def cgf_derivative(self, lam: float) -> float:
        return cgf_derivative(self.model, self.i, lam)

    def tilt(self, alpha: float) -> float:
        """Optimizer ``lam*`` with ``Lambda'(lam*) = alpha``."""
        self._check(alpha)
        if alpha == self.mean:
            return 0.0
        hi = 1.0
        while self.cgf_derivative(hi) < alpha:
            hi *= 2.0
            if hi > LAMBDA_CAP:
                raise DomainError(
                    f"alpha={alpha} too close to c+={self.sup}: Lambda' does not reach it for |lam| <= {LAMBDA_CAP}"
                )
        return brentq(lambda t: self.cgf_derivative(t) - alpha, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=500)

    def __call__(self, alpha: float) -> float:
        self._check(alpha)
        if alpha == self.mean:
            return 0.0
        lam = self.tilt(alpha)
        return lam * alpha - cgf(self.model, self.i, lam)

    def _check(self, alpha: float) -> None:
        if not self.mean <= alpha < self.sup:
            raise DomainError(f"alpha={alpha} outside [{self.mean}, {self.sup})")


def rate(model: ProcessModel, i: int, alpha: float) -> float:
    return RateFunction(model, i)(alpha)


def window_length(n: float, rate_value: float) -> int:
    """``floor(log n / I(alpha))`` with natural log."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not rate_value > 0:
        raise DomainError(f"rate value must be positive, got {rate_value}")
    ell = math.floor(math.log(n) / rate_value)
    if ell < 1:
        raise DomainError(f"window length floor(log {n} / {rate_value}) = 0")
    if ell >= n:
        raise DomainError(f"window length {ell} does not fit in n={n} samples")
    return ell
