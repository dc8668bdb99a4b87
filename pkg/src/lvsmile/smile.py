"""Implied-volatility expansion sigma^eps = sum_k eps^k sigma_k.

Matching powers of eps between the price series and the Taylor expansion of
the Black-Scholes price around sigma_0 = a gives, for k >= 1,

    sigma_k = (u_k - sum_{m=2}^{k} 1/m! C(k, m) d^m u_BS) / d u_BS

where C(k, m) sums prod sigma_{j_i} over ordered compositions
j_1 + ... + j_m = k.  The right side only involves sigma_j with j < k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from .blackscholes import (
    MAX_DERIVATIVE_ORDER,
    BsPoint,
    ImpliedVolError,
    bs_sigma_derivatives,
    implied_vol,
)
from .quadrature import QuadratureError
from .spectral import ImaginaryResidualError, price
from .transforms import ContourSpec, PayoffSpec

MAX_SMILE_ORDER = MAX_DERIVATIVE_ORDER
REFERENCE_ORDER = 10
VEGA_FLOOR = 1e-14


class VegaUnderflowError(ArithmeticError):
    """Black-Scholes vega too small for the expansion to mean anything."""


@dataclass(frozen=True)
class CompositionTable:
    k: int
    parts: Tuple[Tuple[int, ...], ...]

    def by_length(self) -> Dict[int, List[Tuple[int, ...]]]:
        out: Dict[int, List[Tuple[int, ...]]] = {}
        for p in self.parts:
            out.setdefault(len(p), []).append(p)
        return out


def _compose(k):
    if k == 0:
        return [()]
    out = []
    for first in range(k, 0, -1):
        out.extend((first,) + rest for rest in _compose(k - first))
    return out


@lru_cache(maxsize=None)
def compositions(k):
    """Ordered compositions of k, grouped by length (shortest first)."""
    if not 1 <= k <= MAX_SMILE_ORDER:
        raise ValueError(f"composition order {k} outside 1..{MAX_SMILE_ORDER}")
    parts = sorted(_compose(k), key=len)
    return CompositionTable(k, tuple(parts))


def sigma_recursion(a, u, derivs):
    """[sigma_0..sigma_n] from eps-free price coefficients u[0..n] and
    Black-Scholes sigma-derivatives derivs[m-1] = d^m u_BS(a)."""
    n = len(u) - 1
    if n > MAX_SMILE_ORDER:
        raise ValueError(f"smile order {n} exceeds {MAX_SMILE_ORDER}")
    vega = derivs[0] if n else 1.0
    if n and abs(vega) < VEGA_FLOOR:
        raise VegaUnderflowError(f"vega {vega:.3g} below {VEGA_FLOOR}")
    sig = [a]
    for k in range(1, n + 1):
        acc = u[k]
        for m, parts in compositions(k).by_length().items():
            if m < 2:
                continue
            c = sum(math.prod(sig[j] for j in p) for p in parts)
            acc -= c * derivs[m - 1] / math.factorial(m)
        sig.append(acc / vega)
    return sig


def sigma_coefficients(params, t, k, order, series):
    """sigma_0..sigma_order at log strike k from a PriceSeries with N >= order."""
    if series.order < order:
        raise ValueError(f"price series order {series.order} < requested {order}")
    if params.eps == 0:
        return [params.a] + [0.0] * order
    if order == 0:
        return [params.a]
    u = [series.terms[j] / params.eps**j for j in range(order + 1)]
    derivs = bs_sigma_derivatives(BsPoint(params.a, t, params.y, k), order)
    return sigma_recursion(params.a, u, derivs)


def partial_sums(eps, sigmas):
    """sigma^{(m)} = sum_{j<=m} eps^j sigma_j for m = 0..n."""
    return list(np.cumsum([eps**j * s for j, s in enumerate(sigmas)]))


@dataclass
class SmilePoint:
    k: float
    lmmr: float
    sigmas: List[float] = field(default_factory=list)  # sigma^{(0)}..sigma^{(n)}
    coefficients: List[float] = field(default_factory=list)  # sigma_0..sigma_n
    reference: Optional[float] = None
    error: Optional[str] = None


@dataclass
class SmileCurve:
    t: float
    y: float
    points: List[SmilePoint]


def smile_point(params, t, k, order, contour=None, with_reference=False):
    if not 0 <= order <= MAX_SMILE_ORDER:
        raise ValueError(f"smile order {order} outside 0..{MAX_SMILE_ORDER}")
    pt = SmilePoint(k=k, lmmr=(k - params.y) / t)
    try:
        series = price(params, PayoffSpec.call(k), t, max(order, REFERENCE_ORDER), contour)
        coeffs = sigma_coefficients(params, t, k, order, series)
        pt.coefficients = coeffs
        pt.sigmas = partial_sums(params.eps, coeffs)
        if with_reference:
            pt.reference = (
                params.a if params.eps == 0 else implied_vol(series.total, t, params.y, k)
            )
    except (QuadratureError, ImaginaryResidualError, ImpliedVolError,
            VegaUnderflowError) as exc:
        pt.error = f"{type(exc).__name__}: {exc}"
    return pt


def smile_curve(params, t, k_grid, order, contour=None, with_reference=False):
    """Truncated smiles sigma^{(0..order)} per strike; failures stay point-local."""
    return SmileCurve(
        t=t,
        y=params.y,
        points=[smile_point(params, t, float(k), order, contour, with_reference)
                for k in k_grid],
    )
