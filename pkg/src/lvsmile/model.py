"""Model parameters, eigenvalue symbols and series-validity checks.

The log-price Y = log X follows

    dY = -1/2 (a^2 + eps e^{beta Y}) dt + (a^2 + eps e^{beta Y})^{1/2} dW

and the generator splits as A0 + eps * e^{beta y} * A1 with both parts acting
diagonally on the exponentials e^{i lambda y}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# y0 offset used for the norm / bound checks when the caller does not pick one
DEFAULT_Y0_SHIFT = 5.0


class SeriesValidityWarning(UserWarning):
    """The pricing point lies where the eps-series is not guaranteed to converge."""


@dataclass(frozen=True)
class ModelParams:
    a: float
    eps: float
    beta: float
    y: float = 0.0

    def __post_init__(self):
        for name in ("a", "eps", "beta", "y"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.a <= 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.eps < 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")
        if self.beta > 0:
            raise ValueError(f"beta must be <= 0, got {self.beta}")

    @classmethod
    def from_sqrt_eps(cls, a, sqrt_eps, beta, y=0.0):
        return cls(a=a, eps=sqrt_eps**2, beta=beta, y=y)

    @property
    def sqrt_eps(self):
        return math.sqrt(self.eps)

    def local_variance(self, y):
        """a^2 + eps e^{beta y}; strictly positive for every real y."""
        return self.a**2 + self.eps * np.exp(self.beta * np.asarray(y, dtype=float))

    def replace(self, **changes):
        kw = dict(a=self.a, eps=self.eps, beta=self.beta, y=self.y)
        kw.update(changes)
        return ModelParams(**kw)


def phi0(lam, a):
    """Eigenvalue of A0 on e^{i lam y}: a^2/2 (-lam^2 - i lam)."""
    lam = np.asarray(lam, dtype=complex)
    return 0.5 * a * a * (-lam * lam - 1j * lam)


def chi(lam):
    """Eigenvalue of A1 on e^{i lam y}: (-lam^2 - i lam)/2."""
    lam = np.asarray(lam, dtype=complex)
    return 0.5 * (-lam * lam - 1j * lam)


def eta_norm(beta, y0):
    """L2 norm of e^{beta y} over (y0, inf)."""
    if beta >= 0:
        raise ValueError(f"eta_norm needs beta < 0, got {beta}")
    return math.exp(beta * y0) / math.sqrt(-2.0 * beta)


def validity_threshold(params):
    """Log-spot level below which the truncated-domain bound fails.

    Returns -inf when eps == 0 (the bound then holds everywhere) and +inf for
    beta == 0 with eps > 0, where a constant perturbation has infinite norm on
    any half-line.
    """
    if params.eps == 0:
        return -math.inf
    if params.beta == 0:
        return math.inf
    beta = params.beta
    return math.log(params.a**2 * math.sqrt(-2.0 * beta) / params.eps) / beta


def check_series_bound(params, y0=None):
    """True iff eps <= a^2 / ||e_beta||_0 on the domain (y0, inf).

    Equality counts as satisfied; a relative slack of 1e-12 absorbs the
    rounding in the round trip through validity_threshold.
    """
    if params.eps == 0:
        return True
    if params.beta == 0:
        return False
    if y0 is None:
        y0 = params.y - DEFAULT_Y0_SHIFT
    bound = params.a**2 / eta_norm(params.beta, y0)
    return params.eps <= bound * (1.0 + 1e-12)


def warn_if_outside(params):
    """Emit SeriesValidityWarning when the pricing point is below the threshold."""
    if params.eps > 0 and params.y < validity_threshold(params):
        warnings.warn(
            f"log-spot y={params.y:.4g} below validity threshold "
            f"{validity_threshold(params):.4g}; series convergence not guaranteed",
            SeriesValidityWarning,
            stacklevel=3,
        )
        return True
    return False
