"""
Monotone convolution semigroups on the half-line and the circle.

A semigroup ``{mu_tau}`` is described by its generator ``A(z) = z R(z)``
where ``R`` is called the *rate* below:

* half-line: ``R(z) = a + B(z)``, ``B(z) = z sum_j w_j / (1 - z t_j)``
  (so ``A(z) = a z + z^2 sum_j w_j / (1 - z t_j)``), ``a`` real, ``B(0) = 0``
  and ``Im B >= 0`` on the upper half-plane;
* circle: ``R(z) = B(z) = i beta - sum_j w_j (zeta_j + z) / (zeta_j - z)``
  with ``Re B <= 0`` on the disk and ``a = B(0) = i beta - sum_j w_j``.

Two conventions are supported.  For ``mconv`` the transforms solve
``d eta / d tau = eta R(eta)`` directly.  For ``mconv0`` one solves
``du/dtau = u (R(u) - a)`` with ``u_0(z) = z`` and sets
``eta_tau(z) = u_tau(exp(a tau) z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import mpmath
import numpy as np

from . import _rk
from .convolution import MCONV, MCONV0, as_moments, pair_eta
from .exceptions import (
    DomainExit,
    DomainViolation,
    RankMismatch,
    RecompositionFailure,
    SchemeDisagreement,
    ZeroFirstMoment,
)
from .measures import CIRCLE, HALF_LINE, Measure, distance_to_ray, prony_recover
from .series import (
    DEFAULT_ORDER,
    EXTENDED_DPS,
    MomentSequence,
    TruncatedSeries,
    _compose_full,
    compositional_sqrt_extended,
    eta_from_moments,
    max_coeff_error,
    moments_from_eta,
    principal_root,
    series_from_function,
)

RK_TOL = 1e-10
MAX_STEP = 1e-2
MAX_ITER = 10**7
EULER_STEP = 1e-3
RICHARDSON_LEVELS = 3
CROSSCHECK_TOL = 1e-6
SIGN_TOL = 1e-12
ZERO_MOMENT_TOL = 1e-12


# -- generators ----------------------------------------------------------

@dataclass(frozen=True)
class GeneratorHalfLine:
    """Half-line generator ``A(z) = a z + z^2 sum_j w_j / (1 - z t_j)``.

    ``positions``/``weights`` describe the finite measure ``nu``; the mass
    at 0 is the quadratic coefficient ``gamma``.
    """

    a: float = 0.0
    positions: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    domain = HALF_LINE

    def __post_init__(self):
        t = np.asarray(self.positions, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if t.size != w.size:
            raise ValueError("positions and weights must have equal length")
        if np.any(t < 0) or np.any(w < 0):
            raise ValueError("nu must be a nonnegative measure on [0, inf)")
        if not np.isreal(self.a):
            raise ValueError("a must be real for half-line generators")
        object.__setattr__(self, "a", float(np.real(self.a)))
        object.__setattr__(self, "positions", t)
        object.__setattr__(self, "weights", w)

    @classmethod
    def quadratic(cls, gamma: float, a: float = 0.0) -> "GeneratorHalfLine":
        """``A(z) = a z + gamma z^2``."""
        return cls(a, [0.0], [gamma])

    def B(self, z):
        z = np.asarray(z, dtype=complex)
        if self.weights.size == 0:
            return np.zeros(z.shape, dtype=complex)
        return z * ((1.0 / (1.0 - z[..., None] * self.positions)) @ self.weights)

    def rate(self, z):
        return self.a + self.B(z)

    def A(self, z):
        z = np.asarray(z, dtype=complex)
        return z * self.rate(z)

    def taylor(self, order: int) -> np.ndarray:
        """Coefficients of the rate ``R`` at 0: ``R_0 = a``, ``R_k = sum w t^(k-1)``."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = self.a
        for k in range(1, order + 1):
            c[k] = np.dot(self.weights, self.positions ** (k - 1))
        return c

    def in_domain(self, z):
        return distance_to_ray(z) > 0


@dataclass(frozen=True)
class GeneratorCircle:
    """Circle generator ``B(z) = i beta - sum_j w_j (zeta_j + z) / (zeta_j - z)``.

    Alternatively ``func`` supplies ``B`` directly (it must be vectorized);
    then ``series`` may give its exact Taylor coefficients, otherwise they
    are computed numerically.  Use :meth:`power` for ``B(z) = z^n - 1``.
    """

    beta: float = 0.0
    angles: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    func: Callable | None = None
    series: Callable[[int], np.ndarray] | None = None
    name: str | None = None

    domain = CIRCLE

    def __post_init__(self):
        th = np.asarray(self.angles, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if th.size != w.size:
            raise ValueError("angles and weights must have equal length")
        if np.any(w < 0):
            raise ValueError("rho must be a nonnegative measure")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "angles", np.mod(th, 2 * np.pi))
        object.__setattr__(self, "weights", w)

    @classmethod
    def power(cls, n: int) -> "GeneratorCircle":
        """The generator ``B(z) = z^n - 1``."""
        if n < 1:
            raise ValueError("n must be a positive integer")

        def series(order):
            c = np.zeros(order + 1, dtype=complex)
            c[0] = -1.0
            if n <= order:
                c[n] = 1.0
            return c

        return cls(func=lambda z: np.asarray(z, dtype=complex) ** n - 1.0, series=series,
                   name=f"z^{n}-1")

    @classmethod
    def from_callable(cls, func: Callable, name: str | None = None) -> "GeneratorCircle":
        return cls(func=func, name=name)

    @property
    def a(self) -> complex:
        """``B(0)``."""
        if self.func is not None:
            return complex(np.asarray(self.func(np.zeros(1, dtype=complex)))[0])
        return complex(1j * self.beta - self.weights.sum())

    def B(self, z):
        z = np.asarray(z, dtype=complex)
        if self.func is not None:
            return np.asarray(self.func(z), dtype=complex)
        out = np.full(z.shape, 1j * self.beta, dtype=complex)
        if self.weights.size:
            zeta = np.exp(1j * self.angles)
            out = out - ((zeta + z[..., None]) / (zeta - z[..., None])) @ self.weights
        return out

    rate = B

    def A(self, z):
        z = np.asarray(z, dtype=complex)
        return z * self.B(z)

    def taylor(self, order: int) -> np.ndarray:
        if self.series is not None:
            return np.asarray(self.series(order), dtype=complex)
        if self.func is not None:
            return series_from_function(self.func, order, radius=0.5).full.copy()
        c = np.zeros(order + 1, dtype=complex)
        c[0] = self.a
        zbar = np.exp(-1j * self.angles)
        for k in range(1, order + 1):
            c[k] = -2.0 * np.dot(self.weights, zbar**k)
        return c

    def in_domain(self, z):
        return np.abs(z) < 1.0


Generator = GeneratorHalfLine | GeneratorCircle


# -- validation and classification --------------------------------------

@dataclass
class GeneratorReport:
    ok: bool
    worst_margin: float
    violations: list


def _upper_grid():
    r = np.logspace(-2, 2, 20)
    th = np.linspace(0, np.pi, 12)[1:-1]
    return (r[:, None] * np.exp(1j * th)).ravel()


def _disk_grid():
    r = np.linspace(0.05, 0.99, 10)
    th = 2 * np.pi * np.arange(20) / 20
    return (r[:, None] * np.exp(1j * th)).ravel()


def validate_generator(g: Generator, tol: float = SIGN_TOL) -> GeneratorReport:
    """Sign conditions on a 200-point grid.

    Half-line: ``Im B >= 0`` on the upper half-plane, ``B(conj z) = conj
    B(z)`` and ``B(0) = 0``.  Circle: ``Re B <= 0`` on the disk.
    ``worst_margin`` is the smallest slack (negative when violated).
    """
    violations = []
    if g.domain == HALF_LINE:
        z = _upper_grid()
        b = g.B(z)
        margin = b.imag
        sym = np.abs(g.B(z.conj()) - b.conj())
        bad_sym = sym > tol * np.maximum(1.0, np.abs(b))
        violations += [("symmetry", complex(p)) for p in z[bad_sym]]
        b0 = complex(g.B(np.zeros(1))[0])
        if abs(b0) > tol:
            violations.append(("B(0)", b0))
    else:
        z = _disk_grid()
        margin = -g.B(z).real
    bad = margin < -tol
    violations += [("sign", complex(p)) for p in z[bad]]
    return GeneratorReport(not violations, float(margin.min()), violations)


class FlowClass(str, Enum):
    DENJOY_WOLFF_ZERO = "denjoy_wolff_zero"
    DENJOY_WOLFF_INFINITY = "denjoy_wolff_infinity"
    INTERIOR_FIXED_POINT = "interior_fixed_point"


@dataclass(frozen=True)
class Classification:
    kind: FlowClass
    fixed_point: float | None = None


def classify_halfline_generator(g: GeneratorHalfLine, tol: float = 1e-10) -> Classification:
    """Sign behaviour of the rate ``A(z)/z`` on ``(-inf, 0)``.

    The rate is increasing there.  Nonpositive everywhere gives
    ``denjoy_wolff_zero``; nonnegative everywhere ``denjoy_wolff_infinity``;
    otherwise it vanishes at a unique ``-a`` found by bisection.
    """
    at_zero = g.a  # limit at 0-
    mass0 = g.weights[g.positions == 0].sum()
    if mass0 > 0:
        at_inf = -math.inf
    else:
        pos = g.positions > 0
        at_inf = g.a - float(np.sum(g.weights[pos] / g.positions[pos]))
    if at_zero <= 0:
        return Classification(FlowClass.DENJOY_WOLFF_ZERO)
    if at_inf >= 0:
        return Classification(FlowClass.DENJOY_WOLFF_INFINITY)

    def rate(x):
        return float(np.real(g.rate(np.array([x]))[0]))

    hi = -1.0
    while rate(hi) >= 0:
        hi *= 2.0
    lo_x, hi_x = hi, 0.0  # rate(lo_x) < 0 < rate(0-)
    while hi_x - lo_x > tol * max(1.0, abs(lo_x)):
        mid = 0.5 * (lo_x + hi_x)
        if rate(mid) < 0:
            lo_x = mid
        else:
            hi_x = mid
    return Classification(FlowClass.INTERIOR_FIXED_POINT, 0.5 * (lo_x + hi_x))


# -- pointwise flows ----------------------------------------------------

@dataclass
class FlowTrajectory:
    """Flow values at checkpoints.

    ``u[k]`` is ``u_{taus[k]}(z0)`` and ``eta[k]`` is ``eta_{mu_tau}(z0)``;
    for the ``mconv`` convention the two coincide.
    """

    taus: np.ndarray
    z0: np.ndarray
    u: np.ndarray
    eta: np.ndarray
    scheme: str
    convention: str


def _velocity(g: Generator, convention: str):
    if convention == MCONV0:
        a = g.a
        return lambda z: g.rate(z) - a
    if convention == MCONV:
        return g.rate
    raise ValueError(f"unknown convention {convention!r}")


def _domain_predicate(g: Generator, z0: np.ndarray):
    if g.domain == CIRCLE:
        return lambda y: np.abs(y) < 1.0
    s0 = np.sign(z0.imag)

    def ok(y):
        return (distance_to_ray(y) > 0) & (s0 * y.imag >= -SIGN_TOL * np.abs(y))

    return ok


def _check_start(g: Generator, z0: np.ndarray):
    if g.domain == CIRCLE:
        bad = np.abs(z0) >= 1.0
    else:
        bad = distance_to_ray(z0) <= 1e-12
    if np.any(bad):
        raise DomainExit(f"initial point(s) outside the {g.domain} transform domain")


def _rk_flow(g, z0, taus, convention, tol):
    _check_start(g, z0)
    vel = _velocity(g, convention)
    return _rk.integrate(lambda t, y: y * vel(y), z0, taus, atol=tol, max_step=MAX_STEP,
                         max_iter=MAX_ITER, in_domain=_domain_predicate(g, z0))


def _euler_exp_single(g, z0, tau, convention, levels=RICHARDSON_LEVELS):
    """n-fold composition of ``w_eps(z) = z exp(eps V(z))``, Richardson-extrapolated
    over ``n, 2n, 4n, ...`` steps."""
    if tau == 0:
        return z0.copy()
    vel = _velocity(g, convention)
    n0 = max(1, math.ceil(tau / EULER_STEP))
    table = []
    for j in range(levels):
        n = n0 * 2**j
        eps = tau / n
        z = z0.copy()
        for _ in range(n):
            z = z * np.exp(eps * vel(z))
        if not np.all(np.isfinite(z)) or not np.all(_domain_predicate(g, z0)(z)):
            raise DomainExit("euler_exp iterate left the domain")
        table.append(z)
    # error expansion in powers of eps = tau / n
    for order in range(1, levels):
        factor = 2.0**order
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]


def _euler_flow(g, z0, taus, convention):
    _check_start(g, z0)
    return np.stack([_euler_exp_single(g, z0, float(t), convention) for t in taus])


def _flow(g, z0, taus, scheme, convention, tol):
    if scheme == "rk":
        return _rk_flow(g, z0, taus, convention, tol)
    if scheme == "euler_exp":
        return _euler_flow(g, z0, taus, convention)
    raise ValueError(f"unknown scheme {scheme!r}")


def _flow_partial(g, z0, taus, scheme, convention, tol):
    """Like :func:`_flow` but points whose trajectory exits the domain get NaN
    from the first checkpoint they fail to reach."""
    try:
        return _flow(g, z0, taus, scheme, convention, tol)
    except DomainExit:
        pass
    out = np.full((len(taus), z0.size), np.nan + 0j)
    for i in range(z0.size):
        for k in range(len(taus)):
            try:
                out[k, i] = _flow(g, z0[i : i + 1], taus[k : k + 1], scheme, convention, tol)[0, 0]
            except DomainExit:
                break
    return out


def integrate_flow(g: Generator, z0, taus: Sequence[float], scheme: str = "rk",
                   convention: str = MCONV0, tol: float = RK_TOL) -> FlowTrajectory:
    """Integrate the flow from ``z0`` (scalar or array) to each checkpoint.

    Parameters
    ----------
    scheme : {"rk", "euler_exp", "crosscheck"}
        ``rk`` is adaptive Dormand-Prince with absolute tolerance ``tol``
        and step cap ``1e-2``.  ``euler_exp`` composes ``w_eps(z) = z
        exp(eps V(z))`` with ``eps <= 1e-3`` and Richardson extrapolation.
        ``crosscheck`` runs both and raises :class:`SchemeDisagreement` when
        they differ by more than ``1e-6``.
    convention : {"mconv0", "mconv"}

    For circle generators under ``mconv0`` the auxiliary flow ``u_tau(z)``
    only satisfies ``|u_tau(z)| <= exp(-Re(a) tau) |z|`` and may leave the
    disk; such entries of ``u`` are NaN.  ``eta`` is always computed.

    Raises
    ------
    DomainExit
        A trajectory needed for ``eta`` leaves the domain (or the step limit
        is hit).
    """
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    taus = np.asarray(taus, dtype=float)
    if scheme == "crosscheck":
        first = integrate_flow(g, z0, taus, "rk", convention, tol)
        second = integrate_flow(g, z0, taus, "euler_exp", convention, tol)
        du = np.abs(first.u - second.u)
        du = float(np.max(du[np.isfinite(du)])) if np.any(np.isfinite(du)) else 0.0
        if not np.array_equal(np.isnan(first.u), np.isnan(second.u)):
            du = np.inf
        diff = max(du, float(np.max(np.abs(first.eta - second.eta))))
        if diff > CROSSCHECK_TOL:
            raise SchemeDisagreement(f"rk and euler_exp differ by {diff:.3g}")
        first.scheme = "crosscheck"
        return first
    a = g.a
    may_exit = g.domain == CIRCLE and convention == MCONV0 and a.real < 0
    if may_exit:
        _check_start(g, z0)
        u = _flow_partial(g, z0, taus, scheme, convention, tol)
    else:
        u = _flow(g, z0, taus, scheme, convention, tol)
    if convention == MCONV or a == 0:
        eta = u.copy()
    else:
        eta = np.empty_like(u)
        for k, t in enumerate(taus):
            start = np.exp(a * t) * z0
            eta[k] = _flow(g, start, [t], scheme, convention, tol)[0]
    return FlowTrajectory(taus, z0, u, eta, scheme, convention)


# -- series flows and measures -------------------------------------------

def series_flow(g: Generator, taus: Sequence[float], order: int = DEFAULT_ORDER,
                convention: str = MCONV0, tol: float = RK_TOL) -> list[TruncatedSeries]:
    """``eta_{mu_tau}`` as truncated series, by integrating the ODE for the
    Taylor coefficients of the flow."""
    rc = np.asarray(g.taylor(order), dtype=complex)
    a = complex(rc[0])
    if convention == MCONV0:
        rc = rc.copy()
        rc[0] = 0.0
    elif convention != MCONV:
        raise ValueError(f"unknown convention {convention!r}")

    def rhs(t, y):
        return np.convolve(y, _compose_full(rc, y))[: order + 1]

    y0 = np.zeros(order + 1, dtype=complex)
    y0[1] = 1.0
    taus = np.asarray(taus, dtype=float)
    ys = _rk.integrate(rhs, y0, taus, atol=tol, rtol=tol, max_step=MAX_STEP, max_iter=MAX_ITER)
    out = []
    k = np.arange(order + 1)
    for t, y in zip(taus, ys):
        if convention == MCONV0:
            y = y * np.exp(a * k * t)
        out.append(TruncatedSeries.from_full(y))
    return out


@dataclass
class SemigroupPoint:
    tau: float
    moments: MomentSequence
    measure: Measure | None
    eta: TruncatedSeries


def try_prony(m: MomentSequence, domain: str, k: int) -> Measure | None:
    k = min(k, m.order // 2)
    try:
        return prony_recover(m, k, domain)
    except (RankMismatch, DomainViolation):
        return None


def semigroup_measures(g: Generator, taus: Sequence[float], order: int = DEFAULT_ORDER,
                       convention: str = MCONV0, prony_k: int = 4) -> list[SemigroupPoint]:
    """Moments of ``mu_tau`` at each ``tau`` plus an atomic identification
    when the moments come from at most ``prony_k`` atoms."""
    out = []
    for t, eta in zip(taus, series_flow(g, taus, order, convention)):
        m = moments_from_eta(eta)
        out.append(SemigroupPoint(float(t), m, try_prony(m, g.domain, prony_k), eta))
    return out


# -- closed-form check for B(z) = z^n - 1 --------------------------------

@dataclass
class PowerFlowReport:
    n: int
    estimate: float
    residuals: dict
    matched: int | None


def power_flow_closed_form(z, tau, n, constant):
    """``z / (1 - constant z^n tau)^(1/n)`` with the root equal to 1 at 0."""
    z = np.asarray(z, dtype=complex)
    return z / np.power(1.0 - constant * z**n * tau, 1.0 / n)


def identify_power_flow_constant(n: int, points, taus: Sequence[float], tol: float = 1e-6) -> PowerFlowReport:
    """Fit the constant ``c`` in ``u_tau(z) = z / (1 - c z^n tau)^(1/n)`` to the
    numerically integrated flow of ``B(z) = z^n - 1`` and report which of the
    candidates ``n`` and ``n + 1`` matches."""
    g = GeneratorCircle.power(n)
    points = np.asarray(points, dtype=complex)
    taus = np.asarray(taus, dtype=float)
    traj = integrate_flow(g, points, taus, "rk")
    est = []
    for t, u in zip(taus, traj.u):
        if t > 0:
            est.append((1.0 - (points / u) ** n) / (points**n * t))
    estimate = float(np.real(np.mean(np.concatenate(est))))
    residuals = {}
    for cand in (n, n + 1):
        r = max(float(np.max(np.abs(u - power_flow_closed_form(points, t, n, cand))))
                for t, u in zip(taus, traj.u))
        residuals[cand] = r
    best = min(residuals, key=residuals.get)
    return PowerFlowReport(n, estimate, residuals, best if residuals[best] < tol else None)


# -- infinite divisibility ----------------------------------------------

def _branch_of(policy, value: complex, n: int) -> complex:
    if policy is None or policy == "principal":
        return principal_root(value, n)
    if callable(policy):
        return complex(policy(value, n))
    raise ValueError(f"unknown branch policy {policy!r}")


@dataclass(frozen=True)
class ChainLevel(MomentSequence):
    """Moments of one level of a divisibility chain, with its eta-series.

    Rebuilding eta from the moments costs accuracy in fast-decaying
    coefficients, so the series computed by the chain is kept alongside.
    """

    eta: TruncatedSeries | None = None


def _refine_sqrt(guess: complex, value):
    """Polish a double-precision square root of ``value`` at the working precision."""
    r = mpmath.mpc(guess)
    for _ in range(3):
        r = (r + value / r) / 2
    return r


def divisibility_chain(mu, depth: int, op: str = MCONV, branch="principal",
                       order: int = DEFAULT_ORDER, tol: float = 1e-9) -> list[ChainLevel]:
    """``mu_{1/2}, mu_{1/4}, ..., mu_{1/2^depth}`` by repeated square roots.

    For ``mconv`` the eta-series is rooted directly, its derivative at 0
    chosen by ``branch``.  For ``mconv0`` the measure is first dilated to
    unit first moment, rooted there, and the dilation by a square root of
    the first moment (chosen by ``branch``) is restored at every level.
    ``branch`` is ``"principal"`` or a callable ``(value, n) -> root``.

    The square roots are taken in 40-digit arithmetic.  Rooting in double
    precision leaves absolute errors near 1e-16 in coefficients that may be
    far smaller than that, and composing a level ``2^k`` times magnifies them
    past 1e-8 within a few levels.

    Raises
    ------
    ZeroFirstMoment
        For vanishing first moment (the absorbing delta_0 / Haar cases).
    RecompositionFailure
        If a level does not recompose to its parent within ``tol``
        (relative to the coefficient size).
    """
    if op not in (MCONV, MCONV0):
        raise ValueError(f"unknown operation {op!r}")
    m = as_moments(mu, order)
    b = m.first
    if abs(b) <= ZERO_MOMENT_TOL:
        raise ZeroFirstMoment(
            "first moment vanishes: delta_0 and Haar measure are absorbing and "
            "do not embed in a semigroup"
        )
    parent = eta_from_moments(m)
    # roots are computed in extended precision (see compositional_sqrt_extended);
    # each level is rounded to double only for output and the recomposition check
    with mpmath.workdps(EXTENDED_DPS):
        current = [mpmath.mpc(complex(x)) for x in parent.full]
        if op == MCONV0:
            inv = 1 / mpmath.mpc(b)
            current = [c * inv**k for k, c in enumerate(current)]
        scale = mpmath.mpc(b)
        levels = []
        for level in range(1, depth + 1):
            if op == MCONV0:
                root = compositional_sqrt_extended(current, 1)
                scale = _refine_sqrt(_branch_of(branch, complex(scale), 2), scale)
                eta_mp = [c * scale**k for k, c in enumerate(root)]
                center = complex(scale)
            else:
                lam = current[1]
                root = compositional_sqrt_extended(current, _refine_sqrt(_branch_of(branch, complex(lam), 2), lam))
                eta_mp = root
                center = 1.0
            eta = TruncatedSeries.from_full([complex(c) for c in eta_mp])
            back = pair_eta(eta, eta, center)
            err = float(np.max(np.abs(back.full - parent.full) / np.maximum(1.0, np.abs(parent.full))))
            if err > tol:
                raise RecompositionFailure(f"level {level} recomposes with error {err:.3g}")
            levels.append(ChainLevel(moments_from_eta(eta).moments, eta))
            parent, current = eta, root
    return levels
