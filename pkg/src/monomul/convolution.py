"""
Multiplicative monotone convolution.

The basic operation acts on pairs ``(mu, c)``: if ``x1 - c1`` and
``x2 - c2`` are monotonically independent then ``x1 x2`` has distribution
``mu`` with

    eta_mu(z) = eta_1(eta_2(c1 z) / c1)        (c1 != 0)
    eta_mu(z) = eta_1(eta_2'(0) z)             (c1 == 0)

and the product carries the constant ``c1 c2``.  Fixing ``c1 = c2 = 1``
gives :func:`mconv`; centering at the first moments gives :func:`mconv0`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exceptions import DomainEscape
from .measures import (
    CIRCLE,
    HALF_LINE,
    AtomicMeasure,
    HaarMeasure,
    Measure,
    TransformPoint,
    eval_eta,
    moments as measure_moments,
)
from .series import (
    DEFAULT_ORDER,
    MomentSequence,
    TruncatedSeries,
    compose,
    eta_from_moments,
    moments_from_eta,
)

CENTER_TOL = 1e-12
DOMAIN_TOL = 1e-12
MCONV = "mconv"
MCONV0 = "mconv0"

Distribution = Union[MomentSequence, AtomicMeasure, HaarMeasure]


def as_moments(dist: Distribution, order: int) -> MomentSequence:
    if isinstance(dist, MomentSequence):
        return dist.truncate(order)
    return measure_moments(dist, order)


def first_moment(dist: Distribution) -> complex:
    if isinstance(dist, MomentSequence):
        return dist.first
    return dist.first_moment


@dataclass(frozen=True)
class ConvolutionPair:
    """A distribution together with its centering constant ``c``."""

    dist: Distribution
    c: complex = field(default=1.0)

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))


def pair_eta(eta1: TruncatedSeries, eta2: TruncatedSeries, c1: complex) -> TruncatedSeries:
    """eta of the pair convolution, on the series level."""
    c1 = complex(c1)
    if abs(c1) > CENTER_TOL:
        # eta_2(c1 z) / c1 has coefficients e_n c1^(n-1)
        n = np.arange(eta2.order + 1)
        inner = TruncatedSeries.from_full(eta2.full * np.power(c1, np.maximum(n - 1, 0)) * (n > 0))
    else:
        inner = TruncatedSeries.monomial(1, eta2.order, eta2.derivative_at_zero())
    return compose(eta1, inner)


def convolve_pair(p1: ConvolutionPair, p2: ConvolutionPair, order: int = DEFAULT_ORDER) -> ConvolutionPair:
    """``(mu1, c1) o (mu2, c2)``; the result distribution is a MomentSequence."""
    eta1 = eta_from_moments(as_moments(p1.dist, order))
    eta2 = eta_from_moments(as_moments(p2.dist, order))
    eta = pair_eta(eta1, eta2, p1.c)
    return ConvolutionPair(moments_from_eta(eta), p1.c * p2.c)


def mconv(mu1: Distribution, mu2: Distribution, order: int = DEFAULT_ORDER) -> MomentSequence:
    """Convolution with unit centering: ``eta = eta_1 o eta_2``."""
    return convolve_pair(ConvolutionPair(mu1, 1.0), ConvolutionPair(mu2, 1.0), order).dist


def mconv0(mu1: Distribution, mu2: Distribution, order: int = DEFAULT_ORDER) -> MomentSequence:
    """Convolution centered at first moments, ``alpha = mu1(X)``.

    ``eta(z) = eta_1(eta_2(alpha z) / alpha)``, read as ``eta_1(eta_2'(0) z)``
    when ``alpha = 0``.
    """
    a1, a2 = first_moment(mu1), first_moment(mu2)
    return convolve_pair(ConvolutionPair(mu1, a1), ConvolutionPair(mu2, a2), order).dist


def convolve(op: str, mu1: Distribution, mu2: Distribution, order: int = DEFAULT_ORDER) -> MomentSequence:
    if op == MCONV:
        return mconv(mu1, mu2, order)
    if op == MCONV0:
        return mconv0(mu1, mu2, order)
    raise ValueError(f"unknown operation {op!r}")


def _check_inner(domain: str, w: np.ndarray):
    if domain == HALF_LINE:
        # eta maps Omega into Omega; 0 is allowed (eta of delta_0)
        bad = (np.abs(w.imag) <= DOMAIN_TOL) & (w.real > DOMAIN_TOL)
    else:
        bad = np.abs(w) >= 1.0 + DOMAIN_TOL
    if np.any(bad):
        raise DomainEscape(f"intermediate point left the {domain} transform domain: {w[bad][:3]}")


def eval_convolved_eta(mu1: Measure, mu2: Measure, op: str, z, strict: bool = True):
    """Pointwise ``eta`` of ``mu1 o mu2`` (``op`` in {"mconv", "mconv0"}).

    Exact up to roundoff: no series truncation is involved.  ``strict=False``
    skips the domain checks, for evaluation near 0 off ``Omega``.
    """
    if mu1.domain != mu2.domain:
        raise ValueError("both measures must live on the same domain")
    if isinstance(z, TransformPoint):
        z = z.z
    z = np.asarray(z, dtype=complex)
    if op == MCONV:
        w = np.asarray(eval_eta(mu2, z, strict))
    elif op == MCONV0:
        alpha = first_moment(mu1)
        if abs(alpha) > CENTER_TOL:
            w = np.asarray(eval_eta(mu2, alpha * z, strict)) / alpha
        else:
            w = first_moment(mu2) * z
    else:
        raise ValueError(f"unknown operation {op!r}")
    if strict:
        _check_inner(mu1.domain, np.atleast_1d(w))
    if mu1.domain == CIRCLE and strict:
        # boundary roundoff must not trip the strict disk check
        w = np.where(np.abs(w) >= 1.0, w / np.abs(w) * (1.0 - 2 * DOMAIN_TOL), w)
        out = np.asarray(eval_eta(mu1, w))
    else:
        out = np.asarray(eval_eta(mu1, w, strict=False))
    return out if out.ndim else complex(out)


@dataclass
class BoundsReport:
    """Outcome of :func:`support_bounds_check`."""

    upper_bound: float
    upper_excess: np.ndarray
    upper_pass: bool
    lower_bound: float | None = None
    lower_value: float | None = None
    lower_pass: bool | None = None

    @property
    def passed(self) -> bool:
        return self.upper_pass and self.lower_pass is not False


def support_interval(mu: AtomicMeasure) -> tuple[float, float]:
    """Smallest ``[alpha, beta]`` with ``alpha <= 1 <= beta`` containing the support."""
    lo, hi = mu.support
    return min(lo, 1.0), max(hi, 1.0)


def support_bounds_check(
    mu1: AtomicMeasure,
    mu2: AtomicMeasure,
    result_moments: MomentSequence,
    op: str = MCONV,
    result_measure: AtomicMeasure | None = None,
    tol: float = 1e-6,
) -> BoundsReport:
    """Check the support bounds of a half-line convolution.

    Upper bound: ``|m_n|^(1/n) <= beta_1 beta_2 + tol`` for every available
    ``n``.  Lower bound (only when the output measure is known in closed
    form, ``result_measure``): ``sup supp(result) >= s * sup supp(mu2)``,
    with ``s = 1`` for ``mconv`` and ``s = mu1(X)`` for ``mconv0``.
    """
    if mu1.domain != HALF_LINE or mu2.domain != HALF_LINE:
        raise ValueError("support bounds apply to half-line measures")
    _, b1 = support_interval(mu1)
    _, b2 = support_interval(mu2)
    bound = b1 * b2
    n = np.arange(1, result_moments.order + 1)
    growth = np.abs(result_moments.moments) ** (1.0 / n)
    excess = growth - bound
    report = BoundsReport(bound, excess, bool(np.all(excess <= tol)))
    if result_measure is not None:
        scale = 1.0 if op == MCONV else first_moment(mu1).real
        report.lower_bound = scale * mu2.support[1]
        report.lower_value = result_measure.support[1]
        report.lower_pass = report.lower_value >= report.lower_bound - tol
    return report
