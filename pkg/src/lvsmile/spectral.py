"""Series prices u^(N) and transition densities by a single contour integral.

For eta(y) = e^{beta y} the n-th correction collapses to

    u_n = e^{n beta y} * integral d lambda  D_n(lambda) * prod_{k<n} chi(lambda - i k beta)
                                             * (psi_lambda, h) * psi_lambda(y)

with D_n the divided difference of z -> e^{t z} over the shifted eigenvalues
phi0(lambda - i k beta), k = 0..n.  All orders share one integration line.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .divdiff import dd_exp_pair, dd_exp_rows
from .model import ModelParams, chi, phi0, warn_if_outside
from .quadrature import QuadratureError, integrate
from .transforms import (
    SQRT_2PI,
    ContourSpec,
    PayoffSpec,
    digital_coefficient,
    payoff_coefficient,
    resolve_offset,
)

# |Im| / |Re| allowed on a reconstructed price before it counts as a bug
IMAG_RESIDUAL_RTOL = 1e-8
MAX_INIT_PANELS = 100_000
# complex entries materialised per integrand call
_POINT_BUDGET = 3_000_000


class ImaginaryResidualError(RuntimeError):
    """Integral came back with a non-negligible imaginary part."""


@dataclass
class PriceSeries:
    t: float
    payoff: PayoffSpec
    order: int
    terms: List[float]
    total: float
    tail_proxy: float
    offset: float = math.nan
    half_width: float = math.nan
    quad_error: float = 0.0
    n_evals: int = 0

    def cumulative(self):
        return list(np.cumsum(self.terms))

    def coefficient(self, n, eps):
        """eps-free u_n."""
        return self.terms[n] / eps**n


@dataclass
class DensityGrid:
    t: float
    y0: float
    y_values: np.ndarray
    p_orders: np.ndarray  # (n+1, len(y_values)), row m = p^{(m)}
    terms: np.ndarray = field(repr=False, default=None)  # eps^m p_m, same shape


def order_weights(params, lam, t, order):
    """eps^n e^{n beta y} D_n(lambda) prod_{k<n} chi(lambda - i k beta), shape (M, order+1)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    a2 = params.a**2
    beta = params.beta
    ks = np.arange(order + 1)
    # phi0(lambda - i k beta) - phi0(lambda), exact in k
    offsets = 0.5 * a2 * (
        (ks * ks * beta * beta)[None, :] + (ks * beta)[None, :] * (2j * lam[:, None] - 1.0)
    )
    dd = dd_exp_rows(t, phi0(lam, params.a), offsets)
    if order == 0:
        return dd
    chis = chi(lam[:, None] - 1j * ks[None, :order] * beta)
    prods = np.ones((lam.size, order + 1), dtype=complex)
    prods[:, 1:] = np.cumprod(chis, axis=1)
    growth = (params.eps * math.exp(beta * params.y)) ** ks
    return dd * prods * growth[None, :]


def series_components(params, payoff, t, order, lam, coefficient=None):
    """Per-order integrands at lambda, shape (M, order+1).

    `coefficient` overrides the payoff transform (used for derived payoffs).
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    coef = coefficient(lam) if coefficient is not None else payoff_coefficient(payoff, lam)
    lead = coef * np.exp(1j * lam * params.y) / SQRT_2PI
    return order_weights(params, lam, t, order) * lead[:, None]


def series_integrand(params, payoff, t, order, lam):
    """Integrand of u^(N) on the contour (sum over orders 0..N)."""
    comps = series_components(params, payoff, t, order, lam)
    out = comps.sum(axis=1)
    return out if np.ndim(lam) else complex(out[0])


def default_half_width(params, t, order, rel_tol):
    return max(
        40.0,
        math.sqrt(2.0 * math.log(1.0 / rel_tol) / (t * params.a**2))
        + abs(order * params.beta)
        + 10.0,
    )


def _widen_until_negligible(f, width, rel_tol, max_width):
    """Grow the truncation until |f(+-width)| is negligible against its bulk."""
    probe = np.linspace(-width, width, 129)
    bulk = float(np.max(np.abs(f(probe))))
    while width < max_width:
        edge = float(np.max(np.abs(f(np.array([-width, width])))))
        if edge <= 1e-3 * rel_tol * bulk:
            break
        width *= 1.25
    return width


def _initial_panels(width, t, a, oscillation):
    panel = 2.0 / (a * math.sqrt(t))
    if oscillation > 0:
        panel = min(panel, 2.0 * math.pi / oscillation)
    return int(min(max(math.ceil(2.0 * width / panel), 16), MAX_INIT_PANELS))


def _check_residual(total, err_bound):
    if abs(total.imag) > IMAG_RESIDUAL_RTOL * abs(total.real) + 10.0 * err_bound:
        raise ImaginaryResidualError(
            f"imaginary residual {total.imag:.3g} against real part {total.real:.3g}"
        )


def price(params, payoff, t, order, contour=None):
    """Truncated series price u^(N) with per-order terms eps^n u_n."""
    return _series_price(params, payoff, t, order, contour, None)


def digital_price(params, k, t, order, contour=None):
    """Cash-or-nothing digital paying 1{Y_t > k}, as a derived quantity.

    Integrates -e^{-k} d/dk of the call integrand on the call contour, so the
    per-order terms are exact k-derivatives of the call terms.  The returned
    series carries the call payoff spec for strike k.
    """
    return _series_price(params, PayoffSpec.call(k), t, order, contour,
                         lambda lam: digital_coefficient(k, lam))


def put_price(params, k, t, order, contour=None):
    """Put on (e^k - X_t)^+ via parity with the call.

    Uses the martingale forward E[X_t] = e^y, which is exact for the model;
    the correction is absorbed in the order-zero term.
    """
    call = price(params, PayoffSpec.call(k), t, order, contour)
    terms = list(call.terms)
    terms[0] -= math.exp(params.y) - math.exp(k)
    total = float(math.fsum(terms))
    tail = abs(terms[-1]) / abs(total) if total != 0 else math.inf
    return dataclasses.replace(call, terms=terms, total=total, tail_proxy=tail)


def _series_price(params, payoff, t, order, contour, coefficient):
    if not t > 0:
        raise ValueError(f"maturity must be positive, got {t}")
    if order < 0:
        raise ValueError("order must be non-negative")
    contour = contour or ContourSpec(offset=-1.5 if payoff.kind == "call" else 0.0)
    contour.validate_for(payoff)
    warn_if_outside(params)

    c = resolve_offset(contour.offset, order, params.beta, payoff.kind)

    def f(xi):
        return series_components(params, payoff, t, order, xi + 1j * c, coefficient)

    if contour.half_width is None:
        width = default_half_width(params, t, order, contour.rel_tol)
        width = _widen_until_negligible(
            lambda xi: f(xi).sum(axis=1), width, contour.rel_tol, 64 * width
        )
    else:
        width = contour.half_width
    n_init = _initial_panels(width, t, params.a, abs(params.y - payoff.level))
    res = integrate(
        f, -width, width,
        rel_tol=contour.rel_tol, abs_tol=contour.abs_tol,
        n_init=n_init, max_nodes=contour.max_nodes,
        max_panels_per_call=max(1, _POINT_BUDGET // (15 * (order + 1))),
    )
    terms_c = res.value
    total_c = complex(np.sum(terms_c))
    err = float(np.max(res.error))
    _check_residual(total_c, err)
    terms = [float(v.real) for v in terms_c]
    total = float(math.fsum(terms))
    tail = abs(terms[-1]) / abs(total) if total != 0 else math.inf
    return PriceSeries(
        t=t, payoff=payoff, order=order, terms=terms, total=total,
        tail_proxy=tail, offset=c, half_width=width, quad_error=err,
        n_evals=res.n_evals,
    )


def density(params, t, y0, order, y_grid, contour=None):
    """Transition densities p^{(0)}..p^{(order)} of Y_t started at y0.

    Prices the Dirac payoff at every grid point with one shared adaptive
    integration on the real line.
    """
    if not t > 0:
        raise ValueError(f"maturity must be positive, got {t}")
    y_grid = np.asarray(y_grid, dtype=float)
    if y_grid.ndim != 1 or np.any(np.diff(y_grid) < 0):
        raise ValueError("y_grid must be a sorted 1-d array")
    contour = contour or ContourSpec(offset=0.0)
    p = params.replace(y=y0)
    warn_if_outside(p)
    c = contour.offset
    ny = y_grid.size

    def f(xi):
        lam = xi + 1j * c
        w = order_weights(p, lam, t, order)  # (M, n+1)
        phase = np.exp(1j * lam[:, None] * (y0 - y_grid)[None, :]) / (2.0 * math.pi)
        return (w[:, :, None] * phase[:, None, :]).reshape(lam.size, -1)

    if contour.half_width is None:
        width = default_half_width(p, t, order, contour.rel_tol)
        width = _widen_until_negligible(
            lambda xi: order_weights(p, xi + 1j * c, t, order).sum(axis=1),
            width, contour.rel_tol, 64 * width,
        )
    else:
        width = contour.half_width
    osc = float(np.max(np.abs(y0 - y_grid))) if ny else 0.0
    ncomp = (order + 1) * ny
    res = integrate(
        f, -width, width,
        rel_tol=contour.rel_tol, abs_tol=contour.abs_tol,
        n_init=_initial_panels(width, t, p.a, osc), max_nodes=contour.max_nodes,
        max_panels_per_call=max(1, _POINT_BUDGET // (15 * ncomp)),
    )
    vals = res.value.reshape(order + 1, ny)
    err = float(np.max(res.error))
    for col in vals.sum(axis=0):
        _check_residual(complex(col), err)
    terms = vals.real
    return DensityGrid(
        t=t, y0=y0, y_values=y_grid, p_orders=np.cumsum(terms, axis=0), terms=terms
    )


@dataclass(frozen=True)
class Perturbation:
    """A Schwartz-class eta with its transform (2 pi)^{-1/2} int e^{-i w x} eta(x) dx."""

    eta: Callable
    eta_hat: Callable


def gaussian_bump(amplitude=1.0, centre=0.0, width=0.5, tilt=0.0):
    """eta(x) = amplitude e^{tilt x} exp(-(x - centre)^2 / (2 width^2))."""

    def eta(x):
        x = np.asarray(x, dtype=float)
        return amplitude * np.exp(tilt * x - 0.5 * ((x - centre) / width) ** 2)

    def eta_hat(w):
        w = np.asarray(w, dtype=complex) + 1j * tilt
        return amplitude * width * np.exp(-1j * w * centre - 0.5 * (width * w) ** 2)

    return Perturbation(eta, eta_hat)


def fourier_from_samples(x, values):
    """Perturbation whose transform is the trapezoid rule over sampled eta."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    wts = np.empty_like(x)
    dx = np.diff(x)
    wts[0] = 0.5 * dx[0]
    wts[-1] = 0.5 * dx[-1]
    wts[1:-1] = 0.5 * (dx[1:] + dx[:-1])

    def eta(z):
        return np.interp(z, x, values, left=0.0, right=0.0)

    def eta_hat(w):
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for s in range(0, flat.size, 4096):
            blk = flat[s:s + 4096]
            out[s:s + 4096] = np.exp(-1j * blk[:, None] * x[None, :]) @ (wts * values)
        return (out / SQRT_2PI).reshape(w.shape)

    return Perturbation(eta, eta_hat)


def _gl_rule(width, panels, nodes_per_panel=10):
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = np.linspace(-width, width, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def u1_general_eta(a, y, t, payoff, perturbation, offset=None, half_width=None,
                   rel_tol=1e-6, max_panels=2048):
    """First-order correction u_1 for a general Schwartz-class eta.

    Evaluates the double integral over (lambda_0, lambda_1) with kernel
    chi(lambda_0) eta_hat(lambda_1 - lambda_0) / sqrt(2 pi) by nested
    Gauss-Legendre, doubling the panel count until two successive values
    agree to rel_tol.  Both lines share Im = offset.
    """
    if offset is None:
        offset = -1.5 if payoff.kind == "call" else 0.0
    ContourSpec(offset=offset).validate_for(payoff)
    params = ModelParams(a=a, eps=0.0, beta=0.0, y=y)
    width = half_width or default_half_width(params, t, 1, 1e-12)
    panels = max(32, int(2 * width))

    def evaluate(panels):
        xi, w = _gl_rule(width, panels)
        lam = xi + 1j * offset
        left = payoff_coefficient(payoff, lam) * chi(lam) * w  # lambda_0
        right = np.exp(1j * lam * y) / SQRT_2PI * w  # lambda_1
        ph = phi0(lam, a)
        total = 0j
        for s in range(0, lam.size, 512):
            l0 = slice(s, s + 512)
            dd = dd_exp_pair(t, ph[l0, None], ph[None, :])
            kern = perturbation.eta_hat(lam[None, :] - lam[l0, None]) / SQRT_2PI
            total += np.sum(left[l0, None] * dd * kern * right[None, :])
        return total

    prev = evaluate(panels)
    while True:
        panels *= 2
        if panels > max_panels:
            raise QuadratureError("u1_general_eta did not converge")
        cur = evaluate(panels)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-14):
            return float(cur.real)
        prev = cur
