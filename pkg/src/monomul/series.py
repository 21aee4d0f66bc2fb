"""
Truncated formal power series.

A :class:`TruncatedSeries` of order ``N`` holds the coefficients of
``c0 + c1*z + ... + cN*z**N`` and represents a power series modulo
``z**(N+1)``.  Coefficients above ``N`` are unknown, so every operation
returns a result whose order is the smallest order among its operands.

The moment series ``psi(z) = sum_{n>=1} m_n z**n`` and the transform
``eta = psi / (1 + psi)`` both live here, together with composition,
compositional inversion and compositional roots.  Multiplicative monotone
convolution becomes composition of ``eta`` series, which is why the last
three operations matter.

    >>> psi = psi_from_moments(MomentSequence([1.0] * 6))   # delta_1
    >>> eta_from_psi(psi).coeffs.real
    array([1., 0., 0., 0., 0., 0.])
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable

import mpmath
import numpy as np
from scipy.linalg import toeplitz

from .exceptions import (
    BadBranch,
    NonzeroConstantTerm,
    SingularLinearTerm,
    ZeroLinearTerm,
)

DEFAULT_ORDER = 32
LINEAR_TERM_TOL = 1e-12
BRANCH_TOL = 1e-9
# composition treats a constant term below this as zero
CONSTANT_TERM_TOL = 1e-14


class TruncatedSeries:
    """Power series ``c0 + c1 z + ... + cN z^N`` known modulo ``z^(N+1)``.

    Parameters
    ----------
    coeffs : array_like
        The coefficients ``c1..cN``; ``N = len(coeffs)`` is the order.
    c0 : complex, optional
        Constant term, zero by default.

    Instances are immutable.  Use :meth:`from_full` to build from a
    coefficient array that already includes the constant term.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex], c0: complex = 0.0):
        tail = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                          dtype=complex).ravel()
        if tail.size < 1:
            raise ValueError("a truncated series needs order >= 1")
        c = np.empty(tail.size + 1, dtype=complex)
        c[0] = c0
        c[1:] = tail
        c.setflags(write=False)
        self._c = c

    @classmethod
    def from_full(cls, full: Iterable[complex]) -> "TruncatedSeries":
        full = np.asarray(full, dtype=complex).ravel()
        return cls(full[1:], full[0])

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        c = np.zeros(order, dtype=complex)
        c[0] = 1.0
        return cls(c)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls(np.zeros(order, dtype=complex))

    @classmethod
    def monomial(cls, k: int, order: int = DEFAULT_ORDER, coeff: complex = 1.0):
        full = np.zeros(order + 1, dtype=complex)
        if k <= order:
            full[k] = coeff
        return cls.from_full(full)

    @classmethod
    def geometric(cls, ratio: complex, order: int = DEFAULT_ORDER, scale: complex = 1.0):
        """Series of ``scale * z / (1 - ratio z)``."""
        n = np.arange(order)
        return cls(scale * np.power(complex(ratio), n))

    # -- views --------------------------------------------------------
    @property
    def order(self) -> int:
        return self._c.size - 1

    @property
    def c0(self) -> complex:
        return complex(self._c[0])

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients ``c1..cN`` (read-only view)."""
        return self._c[1:]

    @property
    def full(self) -> np.ndarray:
        """Coefficients ``c0..cN`` (read-only view)."""
        return self._c

    def __getitem__(self, k):
        return self._c[k]

    def __len__(self):
        return self._c.size

    def __repr__(self):
        head = ", ".join(f"{v:.6g}" for v in self._c[: min(6, self._c.size)])
        more = ", ..." if self._c.size > 6 else ""
        return f"TruncatedSeries([{head}{more}], order={self.order})"

    # -- arithmetic ---------------------------------------------------
    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order}")
        return TruncatedSeries.from_full(self._c[: order + 1])

    def _pair(self, other):
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            return self._c[: n + 1], other._c[: n + 1]
        return None

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            full = self._c.copy()
            full[0] += other
            return TruncatedSeries.from_full(full)
        return TruncatedSeries.from_full(pair[0] + pair[1])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries.from_full(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._pair(other)
        if pair is None:
            return TruncatedSeries.from_full(self._c * other)
        a, b = pair
        return TruncatedSeries.from_full(np.convolve(a, b)[: a.size])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.reciprocal()
        return TruncatedSeries.from_full(self._c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "TruncatedSeries":
        c = self._c
        if abs(c[0]) == 0:
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        r = np.zeros_like(c)
        r[0] = 1.0 / c[0]
        for k in range(1, c.size):
            r[k] = -np.dot(c[1 : k + 1], r[k - 1 :: -1][:k]) / c[0]
        return TruncatedSeries.from_full(r)

    def scale_argument(self, alpha: complex) -> "TruncatedSeries":
        """Series of ``f(alpha z)``."""
        return TruncatedSeries.from_full(self._c * np.power(complex(alpha), np.arange(self._c.size)))

    def derivative_at_zero(self) -> complex:
        return complex(self._c[1])

    def __call__(self, z):
        """Evaluate the truncated polynomial at ``z`` (Horner)."""
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self._c[-1], dtype=complex)
        for ck in self._c[-2::-1]:
            out = out * z + ck
        return out if out.ndim else complex(out)

    def compose(self, g: "TruncatedSeries") -> "TruncatedSeries":
        return compose(self, g)

    def allclose(self, other: "TruncatedSeries", atol: float = 1e-9) -> bool:
        return max_coeff_error(self, other) <= atol

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and np.array_equal(self._c, other._c)

    __hash__ = None


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``m_1..m_N`` of a distribution; ``m_0 = 1`` is implicit."""

    moments: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.moments, dtype=complex).ravel().copy()
        if m.size < 1:
            raise ValueError("need at least one moment")
        m.setflags(write=False)
        object.__setattr__(self, "moments", m)

    @property
    def order(self) -> int:
        return self.moments.size

    @property
    def first(self) -> complex:
        return complex(self.moments[0])

    def with_zeroth(self) -> np.ndarray:
        """Array ``m_0..m_N`` with ``m_0 = 1``."""
        return np.concatenate(([1.0 + 0j], self.moments))

    def truncate(self, order: int) -> "MomentSequence":
        if order > self.order:
            raise ValueError(f"only {self.order} moments available")
        return MomentSequence(self.moments[:order])

    def __len__(self):
        return self.order

    def __getitem__(self, n):
        """Moment ``m_n`` for ``n >= 0``."""
        if isinstance(n, slice):
            return self.with_zeroth()[n]
        if n == 0:
            return 1.0 + 0j
        return self.moments[n - 1]


def max_coeff_error(f: TruncatedSeries, g: TruncatedSeries) -> float:
    n = min(f.order, g.order)
    return float(np.max(np.abs(f.full[: n + 1] - g.full[: n + 1])))


# -- moment transforms ---------------------------------------------------

def psi_from_moments(m: MomentSequence) -> TruncatedSeries:
    """``psi(z) = sum_n m_n z^n`` with zero constant term."""
    if not isinstance(m, MomentSequence):
        m = MomentSequence(m)
    return TruncatedSeries(m.moments)


def moments_from_psi(p: TruncatedSeries) -> MomentSequence:
    return MomentSequence(p.coeffs)


def eta_from_psi(p: TruncatedSeries) -> TruncatedSeries:
    """``eta = psi / (1 + psi)``."""
    _require_zero_constant(p)
    return p * (1.0 + p).reciprocal()


def psi_from_eta(e: TruncatedSeries) -> TruncatedSeries:
    """``psi = eta / (1 - eta)``, the inverse of :func:`eta_from_psi`."""
    _require_zero_constant(e)
    return e * (1.0 - e).reciprocal()


def eta_from_moments(m: MomentSequence) -> TruncatedSeries:
    return eta_from_psi(psi_from_moments(m))


def moments_from_eta(e: TruncatedSeries) -> MomentSequence:
    return moments_from_psi(psi_from_eta(e))


def _require_zero_constant(s: TruncatedSeries):
    if abs(s.c0) > CONSTANT_TERM_TOL:
        raise NonzeroConstantTerm(f"expected zero constant term, got {s.c0!r}")


# -- composition ---------------------------------------------------------

def _multiplication_matrix(g_full: np.ndarray) -> np.ndarray:
    # lower-triangular Toeplitz matrix of "multiply by g" mod z^(n+1)
    return toeplitz(g_full, np.zeros_like(g_full))


def _compose_full(f_full: np.ndarray, g_full: np.ndarray) -> np.ndarray:
    n = min(f_full.size, g_full.size)
    f_full, g_full = f_full[:n], g_full[:n]
    mult = _multiplication_matrix(g_full)
    out = np.zeros(n, dtype=complex)
    out[0] = f_full[-1]
    for ck in f_full[-2::-1]:
        out = mult @ out
        out[0] += ck
    return out


def compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """``f(g(z))`` modulo ``z^(N+1)``, ``N = min(f.order, g.order)``.

    ``g`` must have zero constant term; its linear term may vanish.
    """
    if abs(g.c0) > CONSTANT_TERM_TOL:
        raise NonzeroConstantTerm(
            f"inner series has constant term {g.c0!r}; composition is not formal"
        )
    return TruncatedSeries.from_full(_compose_full(f.full, g.full))


def iterate(f: TruncatedSeries, n: int) -> TruncatedSeries:
    """n-fold self-composition ``f o f o ... o f``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = TruncatedSeries.identity(f.order)
    for _ in range(n):
        out = compose(f, out)
    return out


def compositional_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Series ``g`` with ``f(g(z)) = g(f(z)) = z`` to order ``N``.

    Solved order by order: the coefficient of ``z^k`` in ``f(g)`` equals
    ``f1 * g_k`` plus terms involving only ``g_1..g_{k-1}``.
    """
    _require_zero_constant(f)
    f1 = f.full[1]
    if abs(f1) <= LINEAR_TERM_TOL:
        raise SingularLinearTerm(f"|f'(0)| = {abs(f1):.3g} is too small to invert")
    n = f.order
    g = np.zeros(n + 1, dtype=complex)
    g[1] = 1.0 / f1
    for k in range(2, n + 1):
        partial = _compose_full(f.full[: k + 1], g[: k + 1])
        g[k] = -partial[k] / f1
    return TruncatedSeries.from_full(g)


def principal_root(lam: complex, n: int) -> complex:
    return complex(np.power(complex(lam), 1.0 / n))


def compositional_root(f: TruncatedSeries, n: int, branch: complex | None = None) -> TruncatedSeries:
    """Series ``g`` with ``g^{o n} = f`` and ``g'(0) = branch``.

    Parameters
    ----------
    f : TruncatedSeries
        Series with ``f(0) = 0`` and ``f'(0) = lam != 0``.
    n : int
        Number of self-compositions.
    branch : complex, optional
        An n-th root of ``lam``; the principal root by default.  Given the
        branch the root is unique.

    Raises
    ------
    ZeroLinearTerm
        If ``lam = 0``, where roots are not unique.
    BadBranch
        If ``branch**n != lam`` or the branch is resonant (some order has a
        vanishing linear coefficient, so no root exists with that branch).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    _require_zero_constant(f)
    lam = complex(f.full[1])
    if abs(lam) <= LINEAR_TERM_TOL:
        raise ZeroLinearTerm("f'(0) = 0: compositional roots are not unique")
    b = principal_root(lam, n) if branch is None else complex(branch)
    if abs(b**n - lam) > BRANCH_TOL * max(1.0, abs(lam)):
        raise BadBranch(f"branch {b!r} is not an {n}-th root of {lam!r}")
    if n == 1:
        return f
    order = f.order
    g = np.zeros(order + 1, dtype=complex)
    g[1] = b
    for k in range(2, order + 1):
        # coefficient of g_k in the k-th coefficient of g^{o n}
        lin = sum(b**j * b ** (k * (n - 1 - j)) for j in range(n))
        if abs(lin) <= LINEAR_TERM_TOL * max(1.0, abs(b) ** (k * (n - 1))):
            raise BadBranch(f"branch {b!r} is resonant at order {k}")
        h = g[: k + 1]
        for _ in range(n - 1):
            h = _compose_full(g[: k + 1], h)
        g[k] = (f.full[k] - h[k]) / lin
    return TruncatedSeries.from_full(g)


EXTENDED_DPS = 40


def compositional_sqrt_extended(f_full, branch: complex, dps: int = EXTENDED_DPS) -> list:
    """Compositional square root in ``dps``-digit arithmetic.

    ``f_full`` holds coefficients ``f_0..f_N`` (Python/NumPy numbers or
    ``mpmath.mpc``); the root is returned as a list of ``mpmath.mpc``.  The
    recursion is the one of :func:`compositional_root` with ``n = 2``, but the
    subtraction ``f_k - (lower-order terms)`` cancels badly when the root's
    coefficients decay fast, and repeated self-composition then amplifies the
    lost digits.  Extra precision keeps every coefficient relatively accurate.
    The power table ``P[j][m] = [z^m] g^j`` makes the cost ``O(N^3)``.
    """
    with mpmath.workdps(dps):
        f = [mpmath.mpc(complex(x)) if not isinstance(x, mpmath.mpc) else +x for x in f_full]
        order = len(f) - 1
        b = mpmath.mpc(branch)
        if abs(b) <= LINEAR_TERM_TOL:
            raise ZeroLinearTerm("f'(0) = 0: compositional roots are not unique")
        zero = mpmath.mpc(0)
        g = [zero] * (order + 1)
        g[1] = b
        P = [[zero] * (order + 1) for _ in range(order + 1)]
        P[1][1] = b
        for k in range(2, order + 1):
            acc = zero
            for j in range(2, k + 1):
                P[j][k] = mpmath.fsum(g[m] * P[j - 1][k - m] for m in range(1, k - j + 2))
                if j < k:
                    acc += g[j] * P[j][k]
            lin = b + b**k
            if abs(lin) <= LINEAR_TERM_TOL * max(1, abs(b) ** k):
                raise BadBranch(f"branch {complex(b)!r} is resonant at order {k}")
            g[k] = (f[k] - acc) / lin
            P[1][k] = g[k]
        return g


# -- numerical Taylor coefficients ---------------------------------------

def series_from_function(
    func: Callable[[np.ndarray], np.ndarray],
    order: int,
    radius: float = 0.5,
    points: int | None = None,
) -> TruncatedSeries:
    """Taylor coefficients of an analytic ``func`` at 0 by the trapezoidal
    Cauchy integral on ``|z| = radius``.

    ``func`` must be vectorized and analytic on a disk slightly larger than
    ``radius``.  Accuracy degrades like ``radius**-k`` times roundoff for
    coefficient ``k``, so keep ``order`` modest.
    """
    m = points or max(4 * (order + 1), 256)
    theta = 2 * np.pi * np.arange(m) / m
    vals = np.asarray(func(radius * np.exp(1j * theta)), dtype=complex)
    c = np.fft.fft(vals) / m
    c = c[: order + 1] / radius ** np.arange(order + 1)
    return TruncatedSeries.from_full(c)


# -- CSV -----------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def series_to_csv(s: TruncatedSeries) -> str:
    """CSV text with one row per coefficient: ``n,re,im`` (n = 0..N)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "re", "im"])
    for k, c in enumerate(s.full):
        w.writerow([k, _fmt(c.real), _fmt(c.imag)])
    return buf.getvalue()


def series_from_csv(text: str) -> TruncatedSeries:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty series CSV")
    n = max(int(r["n"]) for r in rows)
    full = np.zeros(n + 1, dtype=complex)
    for r in rows:
        full[int(r["n"])] = complex(float(r["re"]), float(r["im"]))
    return TruncatedSeries.from_full(full)
