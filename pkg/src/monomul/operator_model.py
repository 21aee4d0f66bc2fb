"""
Finite-dimensional operator realization of monotone independence.

On ``H (x) H`` with ``H = span(xi_0, ..., xi_{d-1})``, the shift ``s`` and
the projection ``p`` onto ``xi_0``,

    x1 = c1 * 1 (x) (1 - p) + (1 + s) u1(s*) (x) p
    x2 = 1 (x) (1 + s) u2(s*)

make ``x1 - c1`` and ``x2 - c2`` monotonically independent for the vector
state at ``xi_0 (x) xi_0``.  Each factor ``(1 + s) u(s*)`` raises the basis
level by at most one, so a word of total length ``L`` applied to the state
never leaves the span of ``xi_0..xi_L``; truncating at ``d >= L + 2`` is
therefore exact for every moment we report.

:func:`realize_atomic_pair` gives a second, truncation-free realization for
finitely atomic measures, with diagonal operators and the state built from
the square roots of the weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import TruncationExceeded
from .measures import AtomicMeasure
from .series import TruncatedSeries, compositional_inverse

U0_TOL = 1e-12
FIRST = "first"
SECOND = "second"


def build_shift(d: int) -> sp.csr_matrix:
    """Truncated shift ``s xi_j = xi_{j+1}`` (``s xi_{d-1} = 0``)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    return sp.diags(np.ones(d - 1, dtype=complex), -1, shape=(d, d), format="csr")


def projection(d: int, index: int = 0) -> sp.csr_matrix:
    return sp.csr_matrix(([1.0 + 0j], ([index], [index])), shape=(d, d))


def vector_state(op, xi: np.ndarray) -> complex:
    """``(op xi, xi)``."""
    return complex(np.vdot(xi, op @ xi))


@dataclass(frozen=True)
class ShiftPolyVariable:
    """The variable ``(1 + s) u(s*)`` with centering constant ``c``.

    ``u`` holds polynomial coefficients ``u_0, u_1, ...`` with ``u_0 != 0``.
    """

    u: tuple
    c: complex = 1.0
    slot: str = FIRST

    def __post_init__(self):
        u = tuple(complex(x) for x in np.atleast_1d(self.u))
        if not u or abs(u[0]) <= U0_TOL:
            raise ValueError("u(0) must be nonzero")
        if self.slot not in (FIRST, SECOND):
            raise ValueError(f"slot must be {FIRST!r} or {SECOND!r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "c", complex(self.c))

    @property
    def degree(self) -> int:
        return len(self.u) - 1

    def matrix(self, d: int) -> sp.csr_matrix:
        s = build_shift(d)
        sa = s.conj().T.tocsr()
        eye = sp.identity(d, dtype=complex, format="csr")
        us = sp.csr_matrix((d, d), dtype=complex)
        power = eye
        for coeff in self.u:
            us = us + coeff * power
            power = power @ sa
        return ((eye + s) @ us).tocsr()

    def psi_series(self, order: int) -> TruncatedSeries:
        """``psi_x`` from the inversion identity ``psi_x(z / ((1+z) u(z))) = z``."""
        return compositional_inverse(shift_inverse_argument(self.u, order))


def shift_inverse_argument(u: Sequence[complex], order: int) -> TruncatedSeries:
    """Series of ``z / ((1 + z) u(z))``."""
    full = np.zeros(order + 1, dtype=complex)
    uc = np.asarray(u, dtype=complex)[: order + 1]
    full[: uc.size] = uc
    denom = TruncatedSeries.from_full(full) * (1.0 + TruncatedSeries.identity(order))
    recip = denom.reciprocal()
    return TruncatedSeries.from_full(np.concatenate(([0.0], recip.full[:-1])))


@dataclass(frozen=True)
class OperatorScene:
    """Named operators on a tensor square with a distinguished unit vector.

    Attributes
    ----------
    dims : tuple of int
        Dimensions of the two tensor factors.
    ops : dict
        Name to sparse operator on the tensor product.
    state : ndarray
        Unit vector ``xi (x) xi`` defining ``phi(x) = (x xi, xi)``.
    levels : dict
        How many basis levels each operator can raise.  ``None`` means the
        realization is exact and no truncation bound applies.
    centers : dict
        Centering constants of ``x1`` and ``x2``.
    """

    dims: tuple
    ops: dict
    state: np.ndarray
    levels: dict | None = None
    centers: dict = field(default_factory=dict)
    p: sp.csr_matrix | None = None

    @property
    def dim(self) -> int:
        return self.dims[0]

    def apply(self, word: Sequence[str], v: np.ndarray) -> np.ndarray:
        for name in reversed(word):
            v = self.ops[name] @ v
        return v

    def phi_word(self, word: Sequence[str]) -> complex:
        return complex(np.vdot(self.state, self.apply(word, self.state)))

    def reach(self, word: Sequence[str]) -> int:
        if self.levels is None:
            return 0
        return sum(self.levels[name] for name in word)


def _tensor_scene(X1, X2, xi1, xi2, c1, c2, levels) -> OperatorScene:
    d1, d2 = X1.shape[0], X2.shape[0]
    I1 = sp.identity(d1, dtype=complex, format="csr")
    I2 = sp.identity(d2, dtype=complex, format="csr")
    p = sp.csr_matrix(np.outer(xi2, xi2.conj()))
    x1 = (c1 * sp.kron(I1, I2 - p) + sp.kron(X1, p)).tocsr()
    x2 = sp.kron(I1, X2).tocsr()
    state = np.kron(xi1, xi2).astype(complex)
    return OperatorScene(
        dims=(d1, d2),
        ops={"x1": x1, "x2": x2},
        state=state,
        levels=levels,
        centers={"x1": complex(c1), "x2": complex(c2)},
        p=p.tocsr(),
    )


def realize_pair(v1: ShiftPolyVariable, v2: ShiftPolyVariable, d: int) -> OperatorScene:
    """Shift-model realization of ``(x1, x2)`` on ``C^d (x) C^d``."""
    xi = np.zeros(d, dtype=complex)
    xi[0] = 1.0
    return _tensor_scene(v1.matrix(d), v2.matrix(d), xi, xi, v1.c, v2.c, {"x1": 1, "x2": 1})


def realize_single(v: ShiftPolyVariable, d: int) -> OperatorScene:
    """Scene holding just ``x = (1 + s) u(s*)`` acting on ``C^d``."""
    xi = np.zeros(d, dtype=complex)
    xi[0] = 1.0
    return OperatorScene(dims=(d,), ops={"x": v.matrix(d)}, state=xi, levels={"x": 1},
                         centers={"x": v.c})


def _diagonal_model(mu: AtomicMeasure, size: int, sqrt: bool):
    vals = mu.points
    if sqrt:
        vals = np.sqrt(vals)
    diag = np.zeros(size, dtype=complex)
    diag[: vals.size] = vals
    xi = np.zeros(size, dtype=complex)
    xi[: vals.size] = np.sqrt(mu.weights)
    return sp.diags(diag, format="csr"), xi


def realize_atomic_pair(mu1: AtomicMeasure, mu2: AtomicMeasure, c1: complex = 1.0,
                        c2: complex = 1.0, square_root: bool = False) -> OperatorScene:
    """Exact realization for atomic measures.

    ``Y_j`` is diagonal with the atoms of ``mu_j`` and the state vector is
    ``sqrt(w)``.  With ``square_root=False``: ``x1 = c1 (1 - p) + Y1 (x) p``
    and ``x1 x2`` has the distribution of ``(mu1, c1) o (mu2, c2)``.  With
    ``square_root=True`` (half-line only): ``x1 = c1^(1/2) (1 - p) +
    Y1^(1/2) (x) p``, and then ``x1 x2 x1`` carries that distribution.
    """
    size = max(len(mu1.weights), len(mu2.weights), 2)
    Y1, xi1 = _diagonal_model(mu1, size, square_root)
    Y2, xi2 = _diagonal_model(mu2, size, False)
    cc1 = np.sqrt(complex(c1)) if square_root else complex(c1)
    return _tensor_scene(Y1, Y2, xi1, xi2, cc1, c2, None)


def oracle_moments(scene: OperatorScene, word: Sequence[str], order: int) -> np.ndarray:
    """``phi(W^n)`` for ``n = 1..order`` where ``W`` is the product of ``word``.

    Computed by repeated application to the state vector.  Raises
    :class:`TruncationExceeded` when ``W^order`` could reach the truncation
    boundary.
    """
    word = list(word)
    if not word:
        return np.ones(order, dtype=complex)
    need = order * scene.reach(word) + 2
    if scene.levels is not None and need > min(scene.dims):
        raise TruncationExceeded(
            f"moment order {order} of a length-{len(word)} word needs dimension >= {need}"
        )
    out = np.empty(order, dtype=complex)
    v = scene.state
    for n in range(order):
        v = scene.apply(word, v)
        out[n] = np.vdot(scene.state, v)
    return out


# -- axiom checks --------------------------------------------------------

def _apply_poly(op, coeffs, v):
    """``sum_k coeffs[k-1] op^k v`` (no constant term)."""
    out = np.zeros_like(v)
    w = v
    for ck in coeffs:
        w = op @ w
        out = out + ck * w
    return out


@dataclass
class AxiomReport:
    """Maximum residuals of the monotone-independence identities."""

    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_residual < tol


def check_monotone_axioms(scene: OperatorScene, trials: int = 20, seed: int = 0,
                          max_degree: int = 2) -> AxiomReport:
    """Test the defining identities on random elements of the two algebras.

    Elements of the first (second) algebra are random polynomials without
    constant term in ``x1 - c1`` (``x2 - c2``).  Checked:

    * ``a b a' = phi(b) a a'`` applied to sampled basis vectors,
    * ``phi(b a b') = phi(b) phi(a) phi(b')``, ``phi(b a) = phi(b) phi(a)``,
      ``phi(a b) = phi(a) phi(b)``,
    * the trace remnant ``phi(b a b') - phi(a b' b) = phi(a) [phi(b) phi(b')
      - phi(b b')]``,
    * equal moments of ``x1^2 x2``, ``x1 x2 x1`` and ``x2 x1^2`` (order 4).

    Relative residuals (scaled by the size of the terms) are reported.
    """
    rng = np.random.default_rng(seed)
    c1, c2 = scene.centers["x1"], scene.centers["x2"]
    n_total = int(np.prod(scene.dims))
    eye = sp.identity(n_total, dtype=complex, format="csr")
    y1 = (scene.ops["x1"] - c1 * eye).tocsr()
    y2 = (scene.ops["x2"] - c2 * eye).tocsr()
    xi = scene.state

    def rand_poly():
        k = int(rng.integers(1, max_degree + 1))
        return rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)

    def phi_apply(*factors):
        v = xi
        for op, coeffs in reversed(factors):
            v = _apply_poly(op, coeffs, v)
        return complex(np.vdot(xi, v))

    # basis vectors far enough from the truncation edge
    if scene.levels is None:
        span = scene.dims
    else:
        margin = 3 * max_degree + 2
        span = tuple(max(1, d - margin) for d in scene.dims)
    res = {"condition1": 0.0, "condition2": 0.0, "trace_remnant": 0.0, "triple_words": 0.0}

    def rel(a, b, *scale):
        return abs(a - b) / max(1.0, *[abs(s) for s in scale])

    for _ in range(trials):
        a, a2, b, b2 = rand_poly(), rand_poly(), rand_poly(), rand_poly()
        phib = phi_apply((y2, b))
        # condition (1) on a sample of basis vectors
        for _ in range(4):
            idx = [int(rng.integers(0, s)) for s in span]
            flat = idx[0] * scene.dims[1] + idx[1] if len(idx) == 2 else idx[0]
            v = np.zeros(n_total, dtype=complex)
            v[flat] = 1.0
            lhs = _apply_poly(y1, a, _apply_poly(y2, b, _apply_poly(y1, a2, v)))
            rhs = phib * _apply_poly(y1, a, _apply_poly(y1, a2, v))
            scale = max(1.0, np.max(np.abs(lhs)), np.max(np.abs(rhs)))
            res["condition1"] = max(res["condition1"], float(np.max(np.abs(lhs - rhs))) / scale)
        phia = phi_apply((y1, a))
        phib2 = phi_apply((y2, b2))
        bab = phi_apply((y2, b), (y1, a), (y2, b2))
        ba = phi_apply((y2, b), (y1, a))
        ab = phi_apply((y1, a), (y2, b2))
        r2 = max(rel(bab, phib * phia * phib2, bab),
                 rel(ba, phib * phia, ba),
                 rel(ab, phia * phib2, ab))
        res["condition2"] = max(res["condition2"], r2)
        abb = phi_apply((y1, a), (y2, b2), (y2, b))
        bb = phi_apply((y2, b), (y2, b2))
        res["trace_remnant"] = max(res["trace_remnant"],
                                   rel(bab - abb, phia * (phib * phib2 - bb), bab, abb))
    order = 4
    if scene.levels is None or 3 * order + 2 <= min(scene.dims):
        m_a = oracle_moments(scene, ["x1", "x1", "x2"], order)
        m_b = oracle_moments(scene, ["x1", "x2", "x1"], order)
        m_c = oracle_moments(scene, ["x2", "x1", "x1"], order)
        scale = max(1.0, float(np.max(np.abs(m_a))))
        res["triple_words"] = float(max(np.max(np.abs(m_a - m_b)),
                                            np.max(np.abs(m_a - m_c)))) / scale
    return AxiomReport(res)
