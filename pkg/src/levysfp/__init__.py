"""Pricing and hedging of European, Bermudan, American and knock-out barrier
options under exponential Levy models, using complex Fourier series with a
singular Fourier-Pade correction for the Gibbs phenomenon and
Filon-Clenshaw-Curtis quadrature for the oscillatory continuation integrals.
"""

from .chebyshev import ChebSeries, cheb_eval, cheb_fit, lobatto_nodes
from .curves import PriceCurve
from .engine import (
    AmericanCurve,
    ExercisePoint,
    OptionContract,
    american_price,
    barrier_price,
    bermudan_price,
    find_exercise_point,
    greeks_curve,
    run_backward_induction,
)
from .errors import (
    ExtrapolationWarning,
    FitQualityError,
    NumericalError,
    PoleProximityError,
)
from .fcc import FCCWeights, fcc_weights, filon_cheb_integral, scaled_filon
from .models import (
    Cumulants,
    ModelKind,
    ModelSpec,
    TruncationInterval,
    char_fn,
    cumulants,
    truncation_interval,
)
from .oracles import (
    QuadOracleResult,
    bs_delta,
    bs_gamma,
    bs_price,
    cos_european_price,
    quad_bermudan_price,
)
from .bench import BenchReport, BenchRow, PARAM_SETS, run_benchmark
from .payoff import (
    CFSCoefficientSet,
    density_coeffs,
    european_price_curve,
    payoff_coeffs,
)
from .sfp import (
    DegreeSplit,
    SFPApproximant,
    allocate_degrees,
    locate_jumps,
    pade_fit,
    sfp_eval,
    sfp_fit,
)

__version__ = "0.1.0"

__all__ = [
    "AmericanCurve",
    "BenchReport",
    "BenchRow",
    "CFSCoefficientSet",
    "ChebSeries",
    "Cumulants",
    "DegreeSplit",
    "ExercisePoint",
    "ExtrapolationWarning",
    "FCCWeights",
    "FitQualityError",
    "ModelKind",
    "ModelSpec",
    "NumericalError",
    "OptionContract",
    "PARAM_SETS",
    "PoleProximityError",
    "PriceCurve",
    "QuadOracleResult",
    "SFPApproximant",
    "TruncationInterval",
    "allocate_degrees",
    "american_price",
    "barrier_price",
    "bermudan_price",
    "bs_delta",
    "bs_gamma",
    "bs_price",
    "char_fn",
    "cheb_eval",
    "cheb_fit",
    "cos_european_price",
    "cumulants",
    "density_coeffs",
    "european_price_curve",
    "fcc_weights",
    "filon_cheb_integral",
    "find_exercise_point",
    "greeks_curve",
    "lobatto_nodes",
    "locate_jumps",
    "pade_fit",
    "payoff_coeffs",
    "quad_bermudan_price",
    "run_backward_induction",
    "run_benchmark",
    "scaled_filon",
    "sfp_eval",
    "sfp_fit",
    "truncation_interval",
]
