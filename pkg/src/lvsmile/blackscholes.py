"""Black-Scholes call prices in log coordinates, sigma-derivatives, implied vol.

Zero rates and dividends: the call on X = e^y struck at e^k pays
(e^{Y_t} - e^k)^+ with Y_t Gaussian of mean y - sigma^2 t / 2 and variance
sigma^2 t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .transforms import SQRT_2PI

MAX_DERIVATIVE_ORDER = 8


class ImpliedVolError(ValueError):
    """Price outside the no-arbitrage interval ((e^y - e^k)^+, e^y)."""


@dataclass(frozen=True)
class BsPoint:
    sigma: float
    t: float
    y: float
    k: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")


def _d1(sigma, t, y, k):
    s = sigma * math.sqrt(t)
    return (y - k) / s + 0.5 * s


def bs_price(p):
    d1 = _d1(p.sigma, p.t, p.y, p.k)
    d2 = d1 - p.sigma * math.sqrt(p.t)
    return math.exp(p.y) * ndtr(d1) - math.exp(p.k) * ndtr(d2)


def bs_price_vec(sigma, t, y, k):
    """Vectorised bs_price over numpy arrays."""
    sigma, y, k = (np.asarray(v, dtype=float) for v in (sigma, y, k))
    s = sigma * np.sqrt(t)
    d1 = (y - k) / s + 0.5 * s
    return np.exp(y) * ndtr(d1) - np.exp(k) * ndtr(d1 - s)


def bs_vega(p):
    d1 = _d1(p.sigma, p.t, p.y, p.k)
    return math.exp(p.y - 0.5 * d1 * d1) * math.sqrt(p.t) / SQRT_2PI


def _laurent_chain(x, order):
    """Coefficients P_m of d^m/ds^m exp(g(s)) = P_m(s) exp(g(s)), m < order,
    for g(s) = -x^2/(2 s^2) - s^2/8.  Each P_m is a dict {power of s: coeff}."""
    # g'(s) = x^2 s^-3 - s/4
    gp = {-3: x * x, 1: -0.25}
    polys = [{0: 1.0}]
    for _ in range(1, order):
        prev = polys[-1]
        nxt = {}
        for pw, c in prev.items():
            if pw != 0:
                nxt[pw - 1] = nxt.get(pw - 1, 0.0) + pw * c
            for gpw, gc in gp.items():
                nxt[pw + gpw] = nxt.get(pw + gpw, 0.0) + c * gc
        polys.append(nxt)
    return polys


def bs_sigma_derivative(p, n):
    """n-th derivative of the call price in sigma, 1 <= n <= 8.

    With s = sigma sqrt(t) and x = y - k the price U(s) has
    U'(s) = e^y N'(d1) = e^{y - x/2} / sqrt(2 pi) * exp(-x^2/(2 s^2) - s^2/8),
    so d^n u / d sigma^n = t^{n/2} U^{(n)}(s) with U^{(n)} a Laurent
    polynomial in s times that Gaussian factor.
    """
    if not 1 <= n <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order {n} outside 1..{MAX_DERIVATIVE_ORDER}")
    return bs_sigma_derivatives(p, n)[n - 1]


def bs_sigma_derivatives(p, n):
    """[d/dsigma, ..., d^n/dsigma^n] of the call price."""
    if not 1 <= n <= MAX_DERIVATIVE_ORDER:
        raise ValueError(f"derivative order {n} outside 1..{MAX_DERIVATIVE_ORDER}")
    x = p.y - p.k
    s = p.sigma * math.sqrt(p.t)
    base = math.exp(p.y - 0.5 * x - x * x / (2 * s * s) - s * s / 8.0) / SQRT_2PI
    out = []
    for m, poly in enumerate(_laurent_chain(x, n), start=1):
        val = sum(c * s**pw for pw, c in poly.items())
        out.append(base * val * p.t ** (0.5 * m))
    return out


def implied_vol(price, t, y, k, lo=1e-6, hi=5.0, max_iter=200):
    """Black-Scholes volatility reproducing a call price.

    Newton on sigma with a bisection bracket: a Newton step leaving the
    current bracket is replaced by its midpoint.  Stops once the price error is
    within 1e-12 e^y and the step is below 1e-15 relative.
    """
    intrinsic = max(math.exp(y) - math.exp(k), 0.0)
    if not intrinsic < price < math.exp(y):
        raise ImpliedVolError(
            f"price {price!r} outside arbitrage bounds ({intrinsic!r}, {math.exp(y)!r})"
        )
    f_lo = bs_price(BsPoint(lo, t, y, k)) - price
    f_hi = bs_price(BsPoint(hi, t, y, k)) - price
    if f_lo > 0 or f_hi < 0:
        raise ImpliedVolError(f"implied vol outside [{lo}, {hi}]")
    price_tol = 1e-12 * math.exp(y)

    # start from the inflection point of the price in sigma (Manaster-Koehler)
    sigma = min(max(math.sqrt(2.0 * abs(y - k) / t), 0.2), hi)
    for _ in range(max_iter):
        pt = BsPoint(sigma, t, y, k)
        diff = bs_price(pt) - price
        if diff > 0:
            hi = sigma
        else:
            lo = sigma
        vega = bs_vega(pt)
        step = diff / vega if vega > 0 else math.inf
        new = sigma - step
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if abs(new - sigma) <= 1e-15 * sigma and abs(diff) <= price_tol:
            return new
        if hi - lo <= 4e-16 * hi:
            return new
        sigma = new
    return sigma
