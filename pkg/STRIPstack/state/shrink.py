from dataclasses import dataclass
from ..utils.serialization import register
from typing import Optional


@dataclass
@register
class SweepRecord:
    """Diagnostics of the unit-mass energy minimizer at one strip width L.

    e1d_gap compares with the y-constant discrete minimizer on the same grid,
    e1d_gap_continuum with the closed-form 1D energy."""
    L : float
    energy : float
    dy_norm_scaled : float
    recovered_omega : float
    lagrange_omega : float
    e1d : float
    e1d_gap : float
    e1d_gap_continuum : float
    h1_gap : float
    transverse_variation : float
    y_independent : bool
    converged : bool
    iterations : int


@dataclass
@register
class LStarEstimate:
    lower : float           #largest width with a y-independent minimizer
    upper : float           #smallest width with a y-dependent one
    estimate : float
    refinements : int = 0


@dataclass
@register
class LStarStarBound:
    """Upper bound on the square of the second width threshold and its root."""
    m : float
    gamma : float
    p : float
    omega : float
    potential_1d : float
    quotient : float
    squared_bound : float
    bound : float
    optimized_quotient : Optional[float] = None
    optimized_squared_bound : Optional[float] = None


@dataclass
@register
class GammaStarResult:
    omega : float
    L : float
    sigma_star : float
    nehari_shifted : float      #I_{omega,0} of the inward-shifted profile at sigma*
    trace_shifted : float
    gamma_star : float
    identity_residual : float   #max over the scan of |I(psi_s) + I(psi_-s) - 2 I(psi)|
