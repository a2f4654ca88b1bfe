"""Sharp Nash constant and Gagliardo-Nirenberg ground states from first principles."""

from ._backend import backend_name
from .constants import (
    ConstantsRow,
    c1_bound,
    c2_bound,
    cgn,
    constants_row,
    exponents,
    figure_data,
    kgn,
    sobolev_constant,
)
from .heat import (
    DecaySample,
    crossover,
    evolve_convolution_1d,
    evolve_gaussian,
    heat_kernel,
    nash_envelope,
    t0_sharpness_check,
    young_envelope,
)
from .radial import NormTriple, RadialProfile, gn_quotient, grad_l2_sq, lp_norm, nash_quotient, norm_triple
from .shooting import ShootingResult, integrate_el, norms_from_mu, pohozaev_residuals, shoot, sweep_p
from .specfun import (
    ball_volume,
    bessel_first_zero,
    bessel_j,
    eigenfunction_phi1,
    gamma,
    nash_constant,
    optimal_profile,
    spectral_data,
)

__version__ = "0.1.0"

__all__ = [
    "ConstantsRow", "DecaySample", "NormTriple", "RadialProfile", "ShootingResult",
    "backend_name", "ball_volume", "bessel_first_zero", "bessel_j", "c1_bound", "c2_bound",
    "cgn", "constants_row", "crossover", "eigenfunction_phi1", "evolve_convolution_1d",
    "evolve_gaussian", "exponents", "figure_data", "gamma", "gn_quotient", "grad_l2_sq",
    "heat_kernel", "integrate_el", "kgn", "lp_norm", "nash_constant", "nash_envelope",
    "nash_quotient", "norm_triple", "norms_from_mu", "optimal_profile", "pohozaev_residuals",
    "shoot", "sobolev_constant", "spectral_data", "sweep_p", "t0_sharpness_check",
    "young_envelope",
]
