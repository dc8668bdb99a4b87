"""Series pricing and exact implied-volatility expansion for the local
volatility model dX = (a^2 + eps X^beta)^{1/2} X dW."""

__version__ = "0.1.0"

from .blackscholes import BsPoint, bs_price, bs_sigma_derivative, implied_vol
from .divdiff import divided_diff_exp
from .model import ModelParams, chi, check_series_bound, eta_norm, phi0, validity_threshold
from .montecarlo import McConfig, McEstimate, eps_sensitivity, simulate_call, simulate_calls
from .smile import SmileCurve, compositions, sigma_coefficients, smile_curve
from .spectral import DensityGrid, PriceSeries, density, price, series_integrand, u1_general_eta
from .transforms import ContourSpec, PayoffSpec, coefficient_decay_bound, payoff_coefficient

__all__ = [
    "BsPoint", "ContourSpec", "DensityGrid", "McConfig", "McEstimate", "ModelParams",
    "PayoffSpec", "PriceSeries", "SmileCurve", "bs_price", "bs_sigma_derivative",
    "check_series_bound", "chi", "coefficient_decay_bound", "compositions", "density",
    "divided_diff_exp", "eps_sensitivity", "eta_norm", "implied_vol", "payoff_coefficient",
    "phi0", "price", "series_integrand", "sigma_coefficients", "simulate_call",
    "simulate_calls", "smile_curve", "u1_general_eta", "validity_threshold",
]
