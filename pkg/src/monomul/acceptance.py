"""
Acceptance checks.

Each ``criterion_*`` function runs one exit criterion with fixed seeds and
returns a :class:`CriterionResult`.  They are shared by the pytest suite and
by ``monomul selftest``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import (
    MCONV,
    MCONV0,
    ConvolutionPair,
    convolve_pair,
    eval_convolved_eta,
    mconv,
    mconv0,
    pair_eta,
    support_bounds_check,
)
from .measures import CIRCLE, HALF_LINE, AtomicMeasure, prony_recover
from .operator_model import (
    SECOND,
    ShiftPolyVariable,
    check_monotone_axioms,
    oracle_moments,
    realize_pair,
    realize_single,
)
from .semigroup import (
    GeneratorCircle,
    GeneratorHalfLine,
    divisibility_chain,
    identify_power_flow_constant,
    integrate_flow,
    semigroup_measures,
)
from .series import eta_from_moments, iterate, moments_from_psi

DEFAULT_SEED = 20240531


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.cid:2d} {self.name}: {self.value:.3e} (tol {self.tolerance:.0e})"
        return text + (f"  {self.detail}" if self.detail else "")


# -- random inputs -------------------------------------------------------

def random_u(rng: np.random.Generator, max_degree: int = 3) -> np.ndarray:
    """Polynomial coefficients with ``0.5 <= |u(0)| <= 1`` and higher
    coefficients in the complex square of half-width 0.5."""
    deg = int(rng.integers(0, max_degree + 1))
    u = rng.uniform(-0.5, 0.5, deg + 1) + 1j * rng.uniform(-0.5, 0.5, deg + 1)
    u[0] = rng.uniform(0.5, 1.0) * np.exp(2j * np.pi * rng.uniform())
    return u


def random_center(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))


def random_straddling_measure(rng, max_atoms=4, span=3.0) -> AtomicMeasure:
    """Half-line measure with ``min supp <= 1 <= max supp``."""
    k = int(rng.integers(2, max_atoms + 1))
    pos = np.concatenate([[rng.uniform(0, 1), rng.uniform(1, span)], rng.uniform(0, span, k - 2)])
    w = rng.uniform(0.1, 1.0, k)
    return AtomicMeasure(HALF_LINE, pos, w / w.sum())


def random_circle_measure(rng, max_atoms=5) -> AtomicMeasure:
    k = int(rng.integers(1, max_atoms + 1))
    w = rng.uniform(0.1, 1.0, k)
    return AtomicMeasure(CIRCLE, rng.uniform(0, 2 * np.pi, k), w / w.sum())


def random_centered_circle_measure(rng) -> AtomicMeasure:
    """Mixture of randomly rotated regular polygons (2, 3 or 5 vertices);
    every such mixture has first moment 0."""
    pos, w = [], []
    parts = int(rng.integers(1, 4))
    mix = rng.uniform(0.2, 1.0, parts)
    mix /= mix.sum()
    for weight in mix:
        k = int(rng.choice([2, 3, 5]))
        rot = rng.uniform(0, 2 * np.pi)
        pos += list(rot + 2 * np.pi * np.arange(k) / k)
        w += [weight / k] * k
    w = np.array(w)
    return AtomicMeasure(CIRCLE, pos, w / w.sum())


def sample_omega(rng, n, r_range=(0.1, 3.0), min_angle=0.2) -> np.ndarray:
    r = rng.uniform(*r_range, n)
    th = rng.uniform(min_angle, 2 * np.pi - min_angle, n)
    return r * np.exp(1j * th)


def sample_disk(rng, n, radius=0.999) -> np.ndarray:
    return radius * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


# -- criteria ------------------------------------------------------------

def criterion_1(seed: int = DEFAULT_SEED, draws: int = 24, zero_c1: int = 4,
                order: int = 8, d: int = 64) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(draws):
        c1 = 0.0 if i < zero_c1 else random_center(rng)
        v1 = ShiftPolyVariable(random_u(rng), c1)
        v2 = ShiftPolyVariable(random_u(rng), random_center(rng), SECOND)
        m1 = moments_from_psi(v1.psi_series(order))
        m2 = moments_from_psi(v2.psi_series(order))
        series = convolve_pair(ConvolutionPair(m1, v1.c), ConvolutionPair(m2, v2.c), order).dist
        oracle = oracle_moments(realize_pair(v1, v2, d), ["x1", "x2"], order)
        worst = max(worst, float(np.max(np.abs(series.moments - oracle))))
    return CriterionResult(1, "pair convolution vs operator model", worst < 1e-8, worst, 1e-8,
                           f"{draws} draws, {zero_c1} with c1=0")


def criterion_2(seed: int = DEFAULT_SEED + 1, draws: int = 12, order: int = 10,
                d: int = 64) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        v = ShiftPolyVariable(random_u(rng))
        series = v.psi_series(order).coeffs
        oracle = oracle_moments(realize_single(v, d), ["x"], order)
        worst = max(worst, float(np.max(np.abs(series - oracle))))
    return CriterionResult(2, "series inversion vs shift-model moments", worst < 1e-8, worst, 1e-8,
                           f"{draws} random u")


def criterion_3(seed: int = DEFAULT_SEED + 2, gamma: float = 1.0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    taus = np.array([0.25, 1.0, 2.0])
    g = GeneratorHalfLine.quadratic(gamma)
    z = sample_omega(rng, 50)
    traj = integrate_flow(g, z, taus, "rk")
    flow_err = max(float(np.max(np.abs(u - z / (1 - gamma * t * z)))) for t, u in zip(taus, traj.u))
    atom_err = 0.0
    for point in semigroup_measures(g, taus):
        t = point.tau
        mu = point.measure
        if mu is None or len(mu.weights) != 2:
            atom_err = np.inf
            break
        expect_pos = np.array([0.0, 1 + gamma * t])
        expect_w = np.array([gamma * t / (1 + gamma * t), 1 / (1 + gamma * t)])
        atom_err = max(atom_err, float(np.max(np.abs(mu.positions - expect_pos))),
                       float(np.max(np.abs(mu.weights - expect_w))))
    worst = max(flow_err, atom_err)
    return CriterionResult(3, "explicit half-line semigroup", worst < 1e-6, worst, 1e-6,
                           f"flow {flow_err:.1e}, atoms {atom_err:.1e}")


def criterion_4(seed: int = DEFAULT_SEED + 3) -> CriterionResult:
    rng = np.random.default_rng(seed)
    t1, t2 = 0.2, 0.3
    worst = 0.0
    details = []
    for n in (1, 2):
        g = GeneratorCircle.power(n)
        z = sample_disk(rng, 50, radius=0.5)
        taus = [t1, t2, t1 + t2]
        rk = integrate_flow(g, z, taus, "rk")
        eu = integrate_flow(g, z, taus, "euler_exp")
        composed = integrate_flow(g, rk.u[1], [t1], "rk").u[0]
        law = float(np.max(np.abs(rk.u[2] - composed)))
        agree = float(np.max(np.abs(rk.u - eu.u)))
        report = identify_power_flow_constant(n, z, taus)
        resid = report.residuals[report.matched] if report.matched is not None else np.inf
        worst = max(worst, law, agree, resid)
        details.append(f"n={n}: constant {report.estimate:.9g} matches {report.matched}")
    return CriterionResult(4, "circle flow B(z)=z^n-1", worst < 1e-6, worst, 1e-6, "; ".join(details))


def criterion_5(seed: int = DEFAULT_SEED + 4, order: int = 16) -> CriterionResult:
    rng = np.random.default_rng(seed)
    mu1 = random_centered_circle_measure(rng)
    mu2 = random_centered_circle_measure(rng)
    out = mconv0(mu1, mu2, order)
    worst = float(np.max(np.abs(out.moments)))
    return CriterionResult(5, "Haar absorption for centered circle measures", worst < 1e-12, worst, 1e-12)


def criterion_6(seed: int = DEFAULT_SEED + 5, draws: int = 10, order: int = 6,
                d: int = 64) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        v1 = ShiftPolyVariable(random_u(rng), random_center(rng))
        v2 = ShiftPolyVariable(random_u(rng), random_center(rng), SECOND)
        scene = realize_pair(v1, v2, d)
        a = oracle_moments(scene, ["x1", "x1", "x2"], order)
        b = oracle_moments(scene, ["x1", "x2", "x1"], order)
        c = oracle_moments(scene, ["x2", "x1", "x1"], order)
        worst = max(worst, float(np.max(np.abs(a - b))), float(np.max(np.abs(a - c))),
                    float(np.max(np.abs(b - c))))
    return CriterionResult(6, "x1^2 x2, x1 x2 x1, x2 x1^2 equidistributed", worst < 1e-8, worst, 1e-8)


def criterion_7(seed: int = DEFAULT_SEED + 6, pairs: int = 10, order: int = 32) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    ok = True
    for _ in range(pairs):
        mu1, mu2 = random_straddling_measure(rng), random_straddling_measure(rng)
        for op, fn in ((MCONV, mconv), (MCONV0, mconv0)):
            rep = support_bounds_check(mu1, mu2, fn(mu1, mu2, order), op, tol=1e-6)
            ok &= rep.upper_pass
            worst = max(worst, float(np.max(rep.upper_excess)))
    return CriterionResult(7, "support upper bound beta1*beta2", ok, worst, 1e-6,
                           "value = max of m_n^(1/n) - beta1*beta2")


def criterion_8(seed: int = DEFAULT_SEED + 7, pairs: int = 10, points: int = 100) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(pairs):
        mu1, mu2 = random_circle_measure(rng), random_circle_measure(rng)
        z = sample_disk(rng, points)
        for op in (MCONV, MCONV0):
            eta = eval_convolved_eta(mu1, mu2, op, z)
            worst = max(worst, float(np.max(np.abs(eta) - np.abs(z))))
    return CriterionResult(8, "Schur bound |eta(z)| <= |z| on circle outputs", worst <= 1e-12, worst, 1e-12,
                           "value = max of |eta(z)| - |z|")


def criterion_9(depth: int = 5, order: int = 32) -> CriterionResult:
    mu = AtomicMeasure(HALF_LINE, [0.0, 2.0], [0.5, 0.5])
    chain = divisibility_chain(mu, depth, MCONV, order=order)
    target = eta_from_moments(mu.moments(order))
    etas = [target] + [level.eta for level in chain]
    # each level squares to its parent, and 2^k-fold composition returns mu
    recompose = max(float(np.max(np.abs(pair_eta(child, child, 1.0).full - parent.full)))
                    for parent, child in zip(etas[:-1], etas[1:]))
    full = max(float(np.max(np.abs(iterate(level.eta, 2**k).full - target.full)))
               for k, level in enumerate(chain, start=1))
    recompose = max(recompose, full)
    # closed form at tau = 1/2: eta = z / (1 - z/2), (1/3) delta_0 + (2/3) delta_{3/2}
    half_eta = 0.5 ** np.arange(order)
    eta_err = float(np.max(np.abs(etas[1].coeffs - half_eta)))
    atoms = prony_recover(chain[0], 2, HALF_LINE)
    atom_err = max(float(np.max(np.abs(atoms.positions - [0.0, 1.5]))),
                   float(np.max(np.abs(atoms.weights - [1 / 3, 2 / 3]))))
    worst = max(recompose, eta_err, atom_err)
    return CriterionResult(9, "divisibility chain of (d0+d2)/2", worst < 1e-8, worst, 1e-8,
                           f"recompose {recompose:.1e}, tau=1/2 match {max(eta_err, atom_err):.1e}")


def criterion_10(seed: int = DEFAULT_SEED + 9, d: int = 32) -> CriterionResult:
    rng = np.random.default_rng(seed)
    v1 = ShiftPolyVariable(random_u(rng), random_center(rng))
    v2 = ShiftPolyVariable(random_u(rng), random_center(rng), SECOND)
    report = check_monotone_axioms(realize_pair(v1, v2, d), trials=20, seed=seed)
    worst = report.max_residual
    return CriterionResult(10, "monotone independence axioms", worst < 1e-10, worst, 1e-10)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_all(echo=print) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
