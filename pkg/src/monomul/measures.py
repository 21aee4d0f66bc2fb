"""
Finitely atomic probability measures on the half-line and the circle.

Half-line measures live on ``[0, inf)``; their transforms are evaluated on
the slit plane ``Omega = C \\ [0, inf)``.  Circle measures store their atoms
as angles in ``[0, 2 pi)`` and are evaluated on the open unit disk.  Haar
measure on the circle is the reserved constant :data:`HAAR`; all of its
moments and transforms vanish.

Transforms
----------
``psi(z) = sum_j w_j z t_j / (1 - z t_j)`` with ``t_j`` the atom positions
(or ``exp(i theta_j)`` on the circle), and ``eta = psi / (1 + psi)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np
from scipy.linalg import eig, hankel

from .exceptions import DomainViolation, OutOfDomain, PoleHit, RankMismatch
from .series import MomentSequence

HALF_LINE = "half_line"
CIRCLE = "circle"
DOMAINS = (HALF_LINE, CIRCLE)
OMEGA = "omega"
DISK = "disk"

WEIGHT_SUM_TOL = 1e-12
MERGE_TOL = 1e-12
DOMAIN_TOL = 1e-12
POLE_TOL = 1e-14
HANKEL_RANK_TOL = 1e-8
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AtomicMeasure:
    """Probability measure with finitely many atoms.

    Parameters
    ----------
    domain : {"half_line", "circle"}
    positions : array_like
        Nonnegative reals on the half-line; angles (any real, reduced mod
        ``2 pi``) on the circle.
    weights : array_like
        Positive weights summing to one.

    Atoms closer than ``1e-12`` are merged.
    """

    domain: str
    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        pos = np.asarray(self.positions, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if pos.size != w.size or pos.size == 0:
            raise ValueError("positions and weights must be nonempty and of equal length")
        if np.any(~np.isfinite(pos)) or np.any(~np.isfinite(w)):
            raise ValueError("positions and weights must be finite")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        if self.domain == HALF_LINE:
            if np.any(pos < 0):
                raise ValueError("half-line positions must be nonnegative")
        else:
            pos = np.mod(pos, TWO_PI)
            pos[pos > TWO_PI - MERGE_TOL] = 0.0
        pos, w = _merge(pos, w)
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, domain: str, atoms: Iterable[tuple[float, float]]) -> "AtomicMeasure":
        atoms = list(atoms)
        return cls(domain, [a[0] for a in atoms], [a[1] for a in atoms])

    @classmethod
    def dirac(cls, position: float, domain: str = HALF_LINE) -> "AtomicMeasure":
        return cls(domain, [position], [1.0])

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    @property
    def points(self) -> np.ndarray:
        """Atom locations as complex numbers (``t`` or ``exp(i theta)``)."""
        if self.domain == CIRCLE:
            return np.exp(1j * self.positions)
        return self.positions.astype(complex)

    @property
    def support(self) -> tuple[float, float]:
        """Smallest and largest atom position."""
        return float(self.positions.min()), float(self.positions.max())

    @property
    def first_moment(self) -> complex:
        return complex(np.dot(self.weights, self.points))

    def moments(self, order: int) -> MomentSequence:
        return moments(self, order)

    def __repr__(self):
        body = ", ".join(f"{p:.6g}: {w:.6g}" for p, w in self.atoms)
        return f"AtomicMeasure({self.domain}, {{{body}}})"


def _merge(pos, w):
    order = np.argsort(pos, kind="stable")
    pos, w = pos[order], w[order]
    out_p, out_w = [pos[0]], [w[0]]
    for p, x in zip(pos[1:], w[1:]):
        if abs(p - out_p[-1]) <= MERGE_TOL:
            out_w[-1] += x
        else:
            out_p.append(p)
            out_w.append(x)
    return np.array(out_p), np.array(out_w)


class HaarMeasure:
    """Normalized arclength on the circle.  Not atomic; eta is identically 0."""

    domain = CIRCLE
    first_moment = 0j

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def moments(self, order: int) -> MomentSequence:
        return MomentSequence(np.zeros(order, dtype=complex))

    def __repr__(self):
        return "HAAR"

    def __reduce__(self):
        return (HaarMeasure, ())


HAAR = HaarMeasure()

Measure = Union[AtomicMeasure, HaarMeasure]


@dataclass(frozen=True)
class TransformPoint:
    """A point of ``Omega`` (``domain_tag="omega"``) or of the open disk."""

    z: complex
    domain_tag: str

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        if self.domain_tag == OMEGA:
            if distance_to_ray(self.z) <= DOMAIN_TOL:
                raise OutOfDomain(f"{self.z!r} lies on the ray [0, inf)")
        elif self.domain_tag == DISK:
            if abs(self.z) >= 1.0 - DOMAIN_TOL:
                raise OutOfDomain(f"{self.z!r} is not in the open unit disk")
        else:
            raise ValueError(f"unknown domain tag {self.domain_tag!r}")


def distance_to_ray(z):
    """Distance from ``z`` to ``[0, inf)``, vectorized."""
    z = np.asarray(z, dtype=complex)
    return np.where(z.real >= 0, np.abs(z.imag), np.abs(z))


def point_tag(domain: str) -> str:
    return OMEGA if domain == HALF_LINE else DISK


def _as_points(mu: Measure, z, strict: bool) -> np.ndarray:
    if isinstance(z, TransformPoint):
        if z.domain_tag != point_tag(mu.domain):
            raise OutOfDomain(f"{z.domain_tag} point used with a {mu.domain} measure")
        return np.asarray(z.z)
    z = np.asarray(z, dtype=complex)
    if strict:
        if mu.domain == HALF_LINE:
            bad = distance_to_ray(z) <= DOMAIN_TOL
        else:
            bad = np.abs(z) >= 1.0 - DOMAIN_TOL
        if np.any(bad):
            raise OutOfDomain(f"point(s) outside {point_tag(mu.domain)}: {z[bad][:3]}")
    return z


def moments(mu: Measure, order: int) -> MomentSequence:
    """Moments ``m_1..m_N``: ``sum_j w_j t_j^n`` or ``sum_j w_j exp(i n theta_j)``."""
    if isinstance(mu, HaarMeasure):
        return mu.moments(order)
    n = np.arange(1, order + 1)
    if mu.domain == CIRCLE:
        vals = np.exp(1j * np.outer(n, mu.positions)) @ mu.weights
    else:
        vals = np.power.outer(mu.positions, n).T @ mu.weights
    return MomentSequence(vals)


def eval_psi(mu: Measure, z, strict: bool = True):
    """``psi_mu(z)``, exact over the atoms.

    ``z`` may be a :class:`TransformPoint`, a scalar or an array.  With
    ``strict=False`` points outside ``Omega`` / the disk are accepted as long
    as no atom is hit (used near 0, where the transform is analytic).
    """
    z = _as_points(mu, z, strict)
    if isinstance(mu, HaarMeasure):
        out = np.zeros(z.shape, dtype=complex)
        return out if out.ndim else complex(out)
    zt = z[..., None] * mu.points
    denom = 1.0 - zt
    if np.any(np.abs(denom) < POLE_TOL):
        raise PoleHit("evaluation point coincides with the reciprocal of an atom")
    out = (zt / denom) @ mu.weights
    return out if np.ndim(out) else complex(out)


def eval_eta(mu: Measure, z, strict: bool = True):
    psi = np.asarray(eval_psi(mu, z, strict))
    out = psi / (1.0 + psi)
    return out if out.ndim else complex(out)


def eval_cauchy(mu: AtomicMeasure, w):
    """``G(w) = sum_j w_j / (w - t_j)`` for a half-line measure."""
    if mu.domain != HALF_LINE:
        raise ValueError("the Cauchy transform bridge is defined for half-line measures")
    w = np.asarray(w, dtype=complex)
    diff = w[..., None] - mu.positions
    if np.any(np.abs(diff) < POLE_TOL):
        raise PoleHit("w coincides with an atom")
    out = (1.0 / diff) @ mu.weights
    return out if np.ndim(out) else complex(out)


def _cauchy_from(transform: Callable, kind: str) -> Callable:
    def call(x):
        x = np.asarray(x, dtype=complex)
        return np.broadcast_to(np.asarray(transform(x), dtype=complex), x.shape)

    if kind == "cauchy":
        return call
    if kind == "psi":
        return lambda w: (1.0 + call(1.0 / w)) / w
    if kind == "eta":
        def g(w):
            e = call(1.0 / w)
            return (1.0 + e / (1.0 - e)) / w
        return g
    raise ValueError(f"unknown transform kind {kind!r}")


def stieltjes_density(transform: Callable, grid, epsilon: float = 1e-3, kind: str = "psi") -> np.ndarray:
    """Smoothed density ``-Im G(t + i eps) / pi`` on ``grid``.

    ``transform`` is ``psi`` (default), ``eta`` or the Cauchy transform ``G``
    itself, selected by ``kind``; ``G(w) = (1 + psi(1/w)) / w``.  The result
    is the measure convolved with a Cauchy kernel of width ``epsilon``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < 0):
        raise ValueError("grid points must be nonnegative")
    G = _cauchy_from(transform, kind)
    return -np.imag(G(grid + 1j * epsilon)) / np.pi


def poisson_density(mu_or_psi, angles, r: float = 0.99) -> np.ndarray:
    """Poisson-smoothed density on the circle,
    ``(1 / 2 pi) Re(1 + 2 psi(r exp(-i theta)))``.

    ``mu_or_psi`` is a circle measure (including :data:`HAAR`) or a callable
    ``psi`` analytic on the disk.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    angles = np.asarray(angles, dtype=float)
    z = r * np.exp(-1j * angles)
    if isinstance(mu_or_psi, (AtomicMeasure, HaarMeasure)):
        if mu_or_psi.domain != CIRCLE:
            raise ValueError("poisson_density needs a circle measure")
        psi = eval_psi(mu_or_psi, z)
    else:
        psi = np.broadcast_to(np.asarray(mu_or_psi(z), dtype=complex), z.shape)
    return np.real(1.0 + 2.0 * np.asarray(psi)) / TWO_PI


def prony_recover(m, k: int, domain: str, tol: float = HANKEL_RANK_TOL) -> Measure:
    """Atomic measure with at most ``k`` atoms reproducing ``m_1..m_{2k}``.

    The number of atoms is the numerical rank of the ``(k+1) x (k+1)``
    Hankel matrix of ``m_0..m_{2k}`` (relative singular value threshold
    ``tol``).  Positions are the eigenvalues of the shifted Hankel pencil and
    weights come from the Vandermonde system.

    On the circle a sequence whose moments all vanish is reported as
    :data:`HAAR`.

    Raises
    ------
    RankMismatch
        Full Hankel rank, or the recovered atoms fail to reproduce the moments.
    DomainViolation
        Positions off ``[0, inf)`` / off the circle, or nonpositive weights.
    """
    if not isinstance(m, MomentSequence):
        m = MomentSequence(m)
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}")
    if k < 1 or 2 * k > m.order:
        raise ValueError(f"need 1 <= k and 2k <= N (k={k}, N={m.order})")
    if domain == CIRCLE and np.all(np.abs(m.moments) <= tol):
        return HAAR
    full = m.with_zeroth()[: 2 * k + 1]
    H = hankel(full[: k + 1], full[k : 2 * k + 1])
    s = np.linalg.svd(H, compute_uv=False)
    rank = int(np.sum(s > tol * s[0]))
    if rank > k:
        raise RankMismatch(
            f"Hankel matrix has full rank {rank} (smallest relative singular value "
            f"{s[-1] / s[0]:.3g}); not generated by {k} atoms"
        )
    H0 = hankel(full[:rank], full[rank - 1 : 2 * rank - 1])
    H1 = hankel(full[1 : rank + 1], full[rank : 2 * rank])
    x = eig(H1, H0, right=False)
    if not np.all(np.isfinite(x)):
        raise RankMismatch("degenerate Hankel pencil")
    V = np.power.outer(x, np.arange(2 * k + 1)).T
    w = np.linalg.solve(V[:rank], full[:rank])
    recon = V @ w
    scale = np.maximum(1.0, np.abs(full))
    if np.max(np.abs(recon - full) / scale) > tol:
        raise RankMismatch("recovered atoms do not reproduce the moments")

    if np.any(np.abs(w.imag) > tol) or np.any(w.real <= tol):
        raise DomainViolation(f"recovered weights are not positive: {w}")
    w = w.real
    w = w / w.sum()
    if domain == HALF_LINE:
        bad = (np.abs(x.imag) > tol * np.maximum(1.0, np.abs(x))) | (x.real < -tol)
        if np.any(bad):
            raise DomainViolation(f"recovered positions off the half-line: {x[bad]}")
        pos = np.clip(x.real, 0.0, None)
    else:
        if np.any(np.abs(np.abs(x) - 1.0) > tol):
            raise DomainViolation(f"recovered positions off the unit circle: {x}")
        pos = np.mod(np.angle(x), TWO_PI)
    return AtomicMeasure(domain, pos, w)
