"""Multiplicative monotone convolution of measures on the half-line and the circle."""

from .convolution import (
    MCONV,
    MCONV0,
    ConvolutionPair,
    convolve,
    convolve_pair,
    eval_convolved_eta,
    mconv,
    mconv0,
    support_bounds_check,
)
from .exceptions import InputError, MonomulError, NumericalError
from .measures import (
    CIRCLE,
    HAAR,
    HALF_LINE,
    AtomicMeasure,
    eval_eta,
    eval_psi,
    moments,
    poisson_density,
    prony_recover,
    stieltjes_density,
)
from .operator_model import (
    ShiftPolyVariable,
    check_monotone_axioms,
    oracle_moments,
    realize_atomic_pair,
    realize_pair,
)
from .semigroup import (
    GeneratorCircle,
    GeneratorHalfLine,
    classify_halfline_generator,
    divisibility_chain,
    integrate_flow,
    semigroup_measures,
    series_flow,
    validate_generator,
)
from .series import (
    MomentSequence,
    TruncatedSeries,
    compose,
    compositional_inverse,
    compositional_root,
    eta_from_moments,
    moments_from_eta,
)

__version__ = "0.1.0"
