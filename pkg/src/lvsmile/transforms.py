"""Fourier coefficients (psi_lambda, h) of the supported payoffs.

Convention: psi_lambda(y) = e^{i lambda y} / sqrt(2 pi) and
(psi_lambda, h) = (2 pi)^{-1/2} * integral e^{-i lambda y} h(y) dy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)

DEFAULT_CALL_OFFSET = -1.5
BAD_OFFSET_RADIUS = 0.01
OFFSET_NUDGE = 0.05


class ContourError(ValueError):
    """A payoff coefficient was requested off its strip of validity."""


@dataclass(frozen=True)
class PayoffSpec:
    kind: str
    level: float  # log strike for "call", target log price for "dirac"

    def __post_init__(self):
        if self.kind not in ("call", "dirac"):
            raise ValueError(f"unknown payoff kind {self.kind!r}")
        if not math.isfinite(self.level):
            raise ValueError("payoff level must be finite")

    @classmethod
    def call(cls, k):
        return cls("call", float(k))

    @classmethod
    def dirac(cls, y_target):
        return cls("dirac", float(y_target))

    def intrinsic(self, y):
        if self.kind != "call":
            raise ValueError("intrinsic value only defined for calls")
        return max(math.exp(y) - math.exp(self.level), 0.0)


@dataclass(frozen=True)
class ContourSpec:
    """Integration line Im(lambda) = offset, truncated to |Re lambda| <= half_width.

    half_width=None lets the pricer size the truncation from the decay of
    e^{t phi}.
    """

    offset: float = DEFAULT_CALL_OFFSET
    half_width: Optional[float] = None
    rel_tol: float = 1e-10
    max_nodes: int = 2_000_000
    abs_tol: float = 1e-15

    def __post_init__(self):
        if self.half_width is not None and self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.rel_tol <= 0 or self.abs_tol < 0:
            raise ValueError("tolerances must be positive")
        if self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")

    def validate_for(self, payoff):
        if payoff.kind == "call" and not self.offset < -1.0:
            raise ContourError(
                f"call coefficients need Im(lambda) < -1, contour offset is {self.offset}"
            )


def payoff_coefficient(payoff, lam):
    """(psi_lambda, h) evaluated at complex lambda (scalar or array)."""
    lam = np.asarray(lam, dtype=complex)
    if payoff.kind == "call":
        if np.any(lam.imag >= -1.0):
            raise ContourError("call coefficient needs Im(lambda) < -1")
        k = payoff.level
        return -np.exp(k - 1j * k * lam) / (SQRT_2PI * (1j * lam + lam * lam))
    return np.exp(-1j * lam * payoff.level) / SQRT_2PI


def digital_coefficient(k, lam):
    """Transform of the cash-or-nothing payoff 1{y > k}, derived from the call.

    Equals -e^{-k} d/dk of the call coefficient, i.e. -i e^{-ik lambda} / (sqrt(2 pi) lambda).
    Only needs Im(lambda) < 0, so any valid call contour works.
    """
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam.imag >= 0.0):
        raise ContourError("digital coefficient needs Im(lambda) < 0")
    return -1j * np.exp(-1j * k * lam) / (SQRT_2PI * lam)


def coefficient_decay_bound(payoff, contour, half_width=None):
    """Upper bound on |(psi_lambda, h)| at Re(lambda) = +-half_width.

    Calls: |e^{k - i k lambda}| = e^{k (1 + c)} and |i lambda + lambda^2| =
    |lambda| |lambda + i| >= L^2 on the line Im = c, giving
    e^{k (1 + c)} / (sqrt(2 pi) L^2).  Dirac payoffs do not decay; the bound is
    the modulus e^{c y_target} / sqrt(2 pi).
    """
    contour.validate_for(payoff)
    c = contour.offset
    if payoff.kind == "dirac":
        return math.exp(c * payoff.level) / SQRT_2PI
    width = contour.half_width if half_width is None else half_width
    if width is None:
        raise ValueError("half_width required")
    return math.exp(payoff.level * (1.0 + c)) / (SQRT_2PI * width * width)


def bad_offsets(order, beta):
    """Offsets where two shifted nodes phi_{lambda - i j beta}, phi_{lambda - i k beta}
    coincide at Re(lambda) = 0, for 0 <= j < k <= order."""
    if beta == 0:
        return []
    vals = {-(1.0 - m * beta) / 2.0 for m in range(1, 2 * order)}
    return sorted(vals)


def resolve_offset(offset, order, beta, payoff_kind="call"):
    """Nudge the contour away from near-confluent offsets.

    Moves by +-OFFSET_NUDGE when within BAD_OFFSET_RADIUS of a bad value,
    preferring the direction that keeps a call contour below -1.
    """
    bad = bad_offsets(order, beta)

    def near(c):
        return any(abs(c - b) < BAD_OFFSET_RADIUS for b in bad)

    if not near(offset):
        return offset
    for step in (1, 2, 3, 4):
        for sign in (-1.0, 1.0):
            cand = offset + sign * step * OFFSET_NUDGE
            if payoff_kind == "call" and not cand < -1.0:
                continue
            if not near(cand):
                return cand
    return offset
