import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvsmile.blackscholes import (
    BsPoint,
    ImpliedVolError,
    bs_price,
    bs_price_vec,
    bs_sigma_derivative,
    bs_sigma_derivatives,
    bs_vega,
    implied_vol,
)

from oracles import bs_call, mp_bs_sigma_derivative

sigmas = st.floats(0.1, 0.6)
mats = st.floats(0.25, 3.0)
spots = st.floats(-0.5, 0.5)


def test_atm_reference_value():
    # e^0 (2 N(0.125) - 1) at sigma = 0.25, t = 1
    assert bs_price(BsPoint(0.25, 1.0, 0.0, 0.0)) == pytest.approx(0.09947645, abs=1e-8)


def test_vega_reference_value():
    p = BsPoint(0.25, 1.0, 0.0, 0.0)
    assert bs_vega(p) == pytest.approx(math.exp(-0.125**2 / 2) / math.sqrt(2 * math.pi), rel=1e-15)
    assert bs_vega(p) == pytest.approx(0.3958377, abs=1e-7)


@settings(max_examples=100)
@given(sigmas, mats, spots, st.floats(-1.5, 1.5))
def test_price_matches_scipy_oracle(sig, t, y, dk):
    k = y + dk
    assert bs_price(BsPoint(sig, t, y, k)) == pytest.approx(bs_call(sig, t, y, k), rel=1e-12, abs=1e-15)


def test_vectorised_price():
    sig = np.array([0.1, 0.3, 0.5])
    k = np.array([-0.2, 0.0, 0.4])
    ref = [bs_price(BsPoint(s, 2.0, 0.1, kk)) for s, kk in zip(sig, k)]
    assert np.allclose(bs_price_vec(sig, 2.0, 0.1, k), ref, rtol=1e-15)


@settings(max_examples=60, deadline=None)
@given(sigmas, mats, spots, st.sampled_from([-1.5, -0.5, 0.0, 0.7, 1.5]), st.integers(1, 6))
def test_derivatives_match_high_precision(sig, t, y, z, n):
    k = y + z * sig * math.sqrt(t)
    got = bs_sigma_derivative(BsPoint(sig, t, y, k), n)
    ref = mp_bs_sigma_derivative(sig, t, y, k, n)
    scale = bs_vega(BsPoint(sig, t, y, k)) / sig ** (n - 1)
    assert abs(got - ref) <= 1e-11 * (abs(ref) + scale)


def test_first_derivative_is_vega():
    p = BsPoint(0.3, 1.5, 0.1, -0.2)
    assert bs_sigma_derivative(p, 1) == pytest.approx(bs_vega(p), rel=1e-14)


def test_derivative_list_consistent():
    p = BsPoint(0.2, 0.8, 0.0, 0.3)
    many = bs_sigma_derivatives(p, 8)
    assert len(many) == 8
    for n in range(1, 9):
        assert many[n - 1] == bs_sigma_derivative(p, n)
    with pytest.raises(ValueError):
        bs_sigma_derivative(p, 9)
    with pytest.raises(ValueError):
        bs_sigma_derivative(p, 0)


@settings(max_examples=100, deadline=None)
@given(sigmas, mats, spots, st.floats(-1.5, 1.5))
def test_implied_vol_round_trip(sig, t, y, z):
    k = y + z * sig * math.sqrt(t)
    px = bs_price(BsPoint(sig, t, y, k))
    assert implied_vol(px, t, y, k) == pytest.approx(sig, rel=1e-9)


def test_implied_vol_rejects_arbitrage():
    with pytest.raises(ImpliedVolError):
        implied_vol(1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ImpliedVolError):
        implied_vol(0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ImpliedVolError):
        implied_vol(0.3, 1.0, 0.0, -0.5)  # below intrinsic 1 - e^-0.5


def test_point_validation():
    with pytest.raises(ValueError):
        BsPoint(0.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        BsPoint(0.2, 0.0, 0.0, 0.0)
