import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lvsmile.blackscholes import BsPoint, bs_price
from lvsmile.model import ModelParams, SeriesValidityWarning
from lvsmile.spectral import (
    density,
    digital_price,
    fourier_from_samples,
    gaussian_bump,
    order_weights,
    price,
    put_price,
    series_integrand,
    u1_general_eta,
)
from lvsmile.transforms import ContourError, ContourSpec, PayoffSpec, digital_coefficient

from oracles import fp_density, mode_weights_ode, pole_sum_weights, u1_duhamel

SKEW = ModelParams.from_sqrt_eps(0.25, 0.15, -0.75, 0.0)
TAIL = ModelParams.from_sqrt_eps(0.2, 0.15, -0.85, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-15, 15), st.sampled_from([-1.5, -2.5, 0.0, 0.7]), st.floats(-0.5, 0.5))
def test_weights_match_mode_ode(x, c, y):
    p = SKEW.replace(y=y)
    lam = complex(x, c)
    got = order_weights(p, np.array([lam]), 1.0, 6)[0]
    ref = mode_weights_ode(p.a, p.eps, p.beta, p.y, 1.0, lam, 6)
    assert np.all(np.abs(got - ref) <= 1e-10 * np.abs(ref) + 1e-14 * abs(ref[0]))


def test_order3_price_matches_uncollapsed_pole_sums():
    """N = 3 price with per-lambda weights taken from explicit pole sums and
    integrated by QUADPACK along Im(lambda) = -1.5."""
    p, t, k, c = SKEW, 1.0, 0.1, -1.5
    pay = PayoffSpec.call(k)

    def f(x, n):
        lam = complex(x, c)
        w = pole_sum_weights(p.a, p.eps, p.beta, p.y, t, lam, 3)[0, n]
        coef = -math.e ** k * np.exp(-1j * k * lam) / (math.sqrt(2 * math.pi) * (1j * lam + lam * lam))
        return (w * coef * np.exp(1j * lam * p.y) / math.sqrt(2 * math.pi)).real

    ref = [quad(f, -60, 60, args=(n,), epsabs=1e-14, epsrel=1e-12, limit=400)[0] for n in range(4)]
    got = price(p, pay, t, 3)
    for n in range(4):
        assert got.terms[n] == pytest.approx(ref[n], rel=1e-8, abs=1e-13)
    assert got.total == pytest.approx(sum(ref), rel=1e-9)


def test_eps_zero_is_black_scholes():
    p = SKEW.replace(eps=0.0)
    for k in (-0.6, 0.0, 0.45):
        s = price(p, PayoffSpec.call(k), 1.0, 10)
        assert s.total == pytest.approx(bs_price(BsPoint(0.25, 1.0, 0.0, k)), abs=1e-12)
        assert all(abs(v) < 1e-16 for v in s.terms[1:])


def test_order_zero_term_is_black_scholes():
    for y, k, t in [(0.0, -0.3, 1.0), (0.2, 0.5, 0.4), (-0.1, -0.1, 2.5)]:
        s = price(SKEW.replace(y=y), PayoffSpec.call(k), t, 4)
        assert s.terms[0] == pytest.approx(bs_price(BsPoint(0.25, t, y, k)), abs=1e-12)


def test_contour_invariance():
    for k in (-0.5, 0.0, 0.6):
        a = price(SKEW, PayoffSpec.call(k), 1.0, 10, ContourSpec(offset=-1.5)).total
        b = price(SKEW, PayoffSpec.call(k), 1.0, 10, ContourSpec(offset=-2.5)).total
        c = price(SKEW, PayoffSpec.call(k), 1.0, 10, ContourSpec(offset=-1.2)).total
        assert abs(a - b) <= 1e-9 * a and abs(a - c) <= 1e-9 * a


def test_integrand_conjugate_symmetry():
    pay = PayoffSpec.call(0.2)
    x = np.array([0.3, 2.0, 9.5])
    f_pos = series_integrand(SKEW, pay, 1.0, 6, x - 1.5j)
    f_neg = series_integrand(SKEW, pay, 1.0, 6, -x - 1.5j)
    assert np.allclose(f_neg, np.conj(f_pos), rtol=1e-13, atol=0)


def test_first_coefficient_matches_duhamel():
    k = 0.15
    s = price(SKEW, PayoffSpec.call(k), 1.0, 1)
    ref = u1_duhamel(SKEW.a, SKEW.y, 1.0, k, lambda z: np.exp(SKEW.beta * z))
    assert s.coefficient(1, SKEW.eps) == pytest.approx(ref, rel=1e-8)


def test_initial_condition():
    for k in (-0.2, 0.2):
        s = price(SKEW, PayoffSpec.call(k), 1e-8, 5, ContourSpec(abs_tol=1e-11))
        assert s.terms[0] == pytest.approx(max(1.0 - math.exp(k), 0.0), abs=1e-6)
        assert max(abs(v) for v in s.terms[1:]) <= 1e-8


def test_terms_decay_at_skew():
    s = price(SKEW, PayoffSpec.call(0.0), 1.0, 10)
    mags = [abs(v) for v in s.terms]
    assert all(mags[n + 1] < mags[n] for n in range(3, 10))
    assert s.tail_proxy == pytest.approx(mags[-1] / s.total, rel=1e-12)
    assert s.cumulative()[-1] == pytest.approx(s.total, rel=1e-15)


def test_price_warns_below_threshold():
    with pytest.warns(SeriesValidityWarning):
        price(SKEW.replace(y=-1.8), PayoffSpec.call(-1.8), 1.0, 2)


def test_call_needs_contour_below_minus_one():
    with pytest.raises(ValueError):
        price(SKEW, PayoffSpec.call(0.0), 1.0, 2, ContourSpec(offset=-0.5))


def test_density_order_zero_is_gaussian():
    y = np.linspace(-2, 2, 81)
    t, a = 1.0, TAIL.a
    d = density(TAIL, t, 0.0, 2, y)
    ref = np.exp(-((y + 0.5 * a * a * t) ** 2) / (2 * a * a * t)) / math.sqrt(2 * math.pi * a * a * t)
    assert np.max(np.abs(d.p_orders[0] - ref)) <= 1e-12
    assert d.p_orders.shape == (3, y.size)


def test_density_converges_to_pde_solution():
    yg = np.round(np.arange(-2.5, 2.5 + 1e-9, 0.01), 10)
    d = density(TAIL, 2.0, 0.0, 14, yg)
    ys, ps = fp_density(TAIL.a, TAIL.eps, TAIL.beta, 2.0, 0.0)
    ref = np.interp(yg, ys, ps)
    errs = [np.max(np.abs(d.p_orders[n] - ref)) / ref.max() for n in (4, 8, 14)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 2e-3


def test_density_reprices_call():
    t, k = 1.0, 0.1
    yg = np.linspace(-3.0, 3.0, 1201)
    d = density(SKEW, t, 0.0, 8, yg)
    via_density = np.trapezoid(np.maximum(np.exp(yg) - math.exp(k), 0.0) * d.p_orders[8], yg)
    direct = price(SKEW, PayoffSpec.call(k), t, 8).total
    assert via_density == pytest.approx(direct, rel=2e-4)


def test_density_mass_and_mean():
    yg = np.linspace(-3.5, 3.0, 651)
    d = density(SKEW, 1.0, 0.0, 8, yg)
    p8 = d.p_orders[8]
    assert np.trapezoid(p8, yg) == pytest.approx(1.0, abs=1e-4)
    assert np.trapezoid(np.exp(yg) * p8, yg) == pytest.approx(1.0, abs=1e-4)


def test_gaussian_bump_transform_matches_samples():
    bump = gaussian_bump(0.8, -0.3, 0.4, tilt=0.5)
    x = np.linspace(-6, 6, 4001)
    num = fourier_from_samples(x, bump.eta(x))
    w = np.array([0.0, 1.3, -4.0, 2.0 - 0.7j])
    assert np.allclose(num.eta_hat(w), bump.eta_hat(w), rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("a,y,t,k,bump", [
    (0.25, 0.0, 1.0, 0.0, (1.0, -0.2, 0.3, 0.0)),
    (0.3, 0.1, 0.5, 0.2, (0.7, 0.3, 0.5, -0.5)),
])
def test_u1_general_eta_matches_duhamel(a, y, t, k, bump):
    pert = gaussian_bump(*bump)
    got = u1_general_eta(a, y, t, PayoffSpec.call(k), pert)
    ref = u1_duhamel(a, y, t, k, pert.eta)
    assert got == pytest.approx(ref, rel=1e-8)


def test_u1_general_eta_windowed_exponential_approaches_collapsed():
    """A Gaussian window around e^{beta y} recovers the collapsed u_1 as it widens."""
    k, beta = 0.0, SKEW.beta
    collapsed = price(SKEW, PayoffSpec.call(k), 1.0, 1).coefficient(1, SKEW.eps)
    gaps = []
    for width in (1.0, 2.0, 3.0):
        pert = gaussian_bump(1.0, 0.0, width, tilt=beta)
        gaps.append(abs(u1_general_eta(0.25, 0.0, 1.0, PayoffSpec.call(k), pert) - collapsed))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3 * collapsed


def test_digital_at_eps_zero_is_n_d2():
    from scipy.stats import norm

    p = ModelParams(0.25, 0.0, -0.75, 0.1)
    for k in (-0.4, 0.0, 0.3):
        d2 = (p.y - k - 0.5 * p.a**2) / p.a
        got = digital_price(p, k, 1.0, 3).total
        assert got == pytest.approx(norm.cdf(d2), abs=1e-10)


def test_digital_is_strike_derivative_of_call():
    p = ModelParams.from_sqrt_eps(0.25, 0.15, -0.75, 0.0)
    k, h = 0.2, 1e-4
    up = price(p, PayoffSpec.call(k + h), 1.0, 6).terms
    dn = price(p, PayoffSpec.call(k - h), 1.0, 6).terms
    dig = digital_price(p, k, 1.0, 6).terms
    for n in range(7):
        fd = -math.exp(-k) * (up[n] - dn[n]) / (2 * h)
        assert dig[n] == pytest.approx(fd, abs=1e-8)


def test_digital_coefficient_rejects_upper_half_plane():
    with pytest.raises(ContourError):
        digital_coefficient(0.0, np.array([1.0 + 0.1j]))


def test_put_call_parity():
    p = ModelParams(0.25, 0.0, -0.75, 0.0)
    k = 0.3
    bs_call_k = bs_price(BsPoint(0.25, 1.0, 0.0, k))
    assert put_price(p, k, 1.0, 2).total == pytest.approx(
        bs_call_k - 1.0 + math.exp(k), abs=1e-10)
    skew = p.replace(eps=0.0225)
    put = put_price(skew, k, 1.0, 8)
    assert put.total > math.exp(k) - 1.0
    assert put.terms[1:] == price(skew, PayoffSpec.call(k), 1.0, 8).terms[1:]
