import numpy as np
import pytest

from monomul.exceptions import DomainViolation, OutOfDomain, PoleHit, RankMismatch
from monomul.measures import (
    CIRCLE,
    DISK,
    HAAR,
    HALF_LINE,
    OMEGA,
    AtomicMeasure,
    TransformPoint,
    eval_cauchy,
    eval_eta,
    eval_psi,
    moments,
    poisson_density,
    prony_recover,
    stieltjes_density,
)
from monomul.series import MomentSequence, psi_from_moments, series_from_function

TWO_POINT = AtomicMeasure(HALF_LINE, [0, 2], [0.5, 0.5])


class TestAtomicMeasure:
    def test_merges_close_atoms(self):
        mu = AtomicMeasure(HALF_LINE, [1.0, 1.0 + 1e-13, 2.0], [0.25, 0.25, 0.5])
        assert mu.atoms == [(1.0, 0.5), (2.0, 0.5)]

    def test_circle_angles_canonical(self):
        mu = AtomicMeasure(CIRCLE, [-np.pi / 2, 2 * np.pi], [0.5, 0.5])
        assert np.allclose(mu.positions, [0, 3 * np.pi / 2])

    @pytest.mark.parametrize("pos,w", [([1, 2], [0.5, 0.4]), ([-1], [1.0]), ([1, 2], [1.2, -0.2])])
    def test_invalid(self, pos, w):
        with pytest.raises(ValueError):
            AtomicMeasure(HALF_LINE, pos, w)

    def test_transform_point(self):
        TransformPoint(-1, OMEGA)
        TransformPoint(0.5j, DISK)
        with pytest.raises(OutOfDomain):
            TransformPoint(2.0, OMEGA)
        with pytest.raises(OutOfDomain):
            TransformPoint(1.0, DISK)


class TestMoments:
    def test_dirac(self):
        assert np.allclose(moments(AtomicMeasure.dirac(1.0), 6).moments, 1)

    def test_two_point(self):
        assert np.allclose(moments(TWO_POINT, 10).moments, 2.0 ** np.arange(10))

    def test_circle_symmetric(self):
        mu = AtomicMeasure(CIRCLE, [0, np.pi], [0.5, 0.5])
        assert np.allclose(moments(mu, 6).moments, [0, 1, 0, 1, 0, 1])

    def test_haar(self):
        assert np.all(moments(HAAR, 5).moments == 0)


class TestTransforms:
    def test_haar(self):
        assert eval_psi(HAAR, 0.3 + 0.2j) == 0

    def test_two_point_at_minus_one(self):
        assert eval_psi(TWO_POINT, -1.0) == pytest.approx(-1 / 3, abs=1e-15)

    def test_dirac_one(self):
        z = np.array([-2.0, 1j, -1 - 1j])
        assert np.allclose(eval_psi(AtomicMeasure.dirac(1.0), z), z / (1 - z))

    def test_eta(self):
        assert eval_eta(TWO_POINT, -1.0) == pytest.approx(-0.5)

    def test_pole(self):
        with pytest.raises(PoleHit):
            eval_psi(AtomicMeasure.dirac(2.0), 0.5, strict=False)

    def test_domain_mismatch(self):
        with pytest.raises(OutOfDomain):
            eval_psi(TWO_POINT, TransformPoint(0.5j, DISK))
        with pytest.raises(OutOfDomain):
            eval_psi(TWO_POINT, 3.0)

    def test_cauchy_examples(self):
        assert eval_cauchy(AtomicMeasure.dirac(2.0), 1j) == pytest.approx(1 / (1j - 2))
        assert eval_cauchy(TWO_POINT, 3.0) == pytest.approx(2 / 3)
        assert eval_cauchy(AtomicMeasure.dirac(0.0), 1.0) == pytest.approx(1.0)

    def test_cauchy_identity(self):
        mu = AtomicMeasure(HALF_LINE, [0.3, 1.0, 2.5], [0.2, 0.5, 0.3])
        w = np.array([1j, -2 + 0.5j, 3 - 1j, -0.7])
        assert np.allclose(eval_psi(mu, 1 / w), w * eval_cauchy(mu, w) - 1, atol=1e-12)

    def test_taylor_agreement(self):
        mu = AtomicMeasure(HALF_LINE, [0.3, 1.0, 1.7], [0.2, 0.5, 0.3])
        N = 12
        taylor = series_from_function(lambda z: eval_psi(mu, z, strict=False), N, radius=0.4)
        series = psi_from_moments(moments(mu, N))
        assert np.max(np.abs(taylor.coeffs - series.coeffs)) < 1e-8

    def test_argument_bounds_half_line(self):
        rng = np.random.default_rng(5)
        mu = AtomicMeasure(HALF_LINE, rng.uniform(0, 3, 4), np.full(4, 0.25))
        z = rng.uniform(-3, 3, 200) + 1j * rng.uniform(1e-3, 3, 200)
        eta = eval_eta(mu, z)
        assert np.all(np.angle(eta) >= np.angle(z) - 1e-12)
        assert np.all(np.angle(eta) <= np.pi)
        assert np.allclose(eval_eta(mu, z.conj()), eta.conj())

    def test_schur_circle(self):
        rng = np.random.default_rng(6)
        mu = AtomicMeasure(CIRCLE, rng.uniform(0, 6, 5), np.full(5, 0.2))
        z = np.sqrt(rng.uniform(0, 0.99, 200)) * np.exp(2j * np.pi * rng.uniform(size=200))
        assert np.all(np.abs(eval_eta(mu, z)) <= np.abs(z) + 1e-12)


class TestDensities:
    def test_stieltjes_peak_and_tail(self):
        psi = lambda z: eval_psi(AtomicMeasure.dirac(2.0), z, strict=False)
        d = stieltjes_density(psi, [2.0, 10.0], epsilon=1e-2)
        assert d[0] == pytest.approx(1 / (np.pi * 1e-2), rel=1e-4)
        assert d[1] == pytest.approx(1e-2 / (np.pi * 64), rel=1e-3)

    def test_stieltjes_zero_cauchy(self):
        assert np.all(stieltjes_density(lambda w: 0 * w, [0, 1, 2], kind="cauchy") == 0)

    def test_stieltjes_kinds_agree(self):
        grid = np.linspace(0, 3, 7)
        a = stieltjes_density(lambda z: eval_psi(TWO_POINT, z, strict=False), grid, 0.05)
        b = stieltjes_density(lambda z: eval_eta(TWO_POINT, z, strict=False), grid, 0.05, kind="eta")
        c = stieltjes_density(lambda w: eval_cauchy(TWO_POINT, w), grid, 0.05, kind="cauchy")
        assert np.allclose(a, c) and np.allclose(b, c)

    def test_poisson_haar(self):
        assert np.allclose(poisson_density(HAAR, np.linspace(0, 6, 9)), 1 / (2 * np.pi))

    def test_poisson_dirac(self):
        d = poisson_density(AtomicMeasure.dirac(0.0, CIRCLE), [0.0, np.pi], r=0.5)
        assert d[0] == pytest.approx(3 / (2 * np.pi))
        assert d[1] == pytest.approx(1 / (6 * np.pi))

    def test_poisson_normalized(self):
        mu = AtomicMeasure(CIRCLE, [0.3, 2.0, 4.0], [0.2, 0.3, 0.5])
        th = 2 * np.pi * np.arange(1024) / 1024
        # the rectangle rule aliases r^1024 terms, so r must stay below ~0.98
        d = poisson_density(mu, th, r=0.95)
        assert d.min() >= -1e-9
        assert np.mean(d) * 2 * np.pi == pytest.approx(1.0, abs=1e-6)


class TestProny:
    def test_two_point(self):
        mu = prony_recover(MomentSequence(2.0 ** np.arange(8)), 2, HALF_LINE)
        assert np.allclose(mu.positions, [0, 2], atol=1e-8)
        assert np.allclose(mu.weights, [0.5, 0.5], atol=1e-8)

    def test_dirac(self):
        mu = prony_recover(MomentSequence(np.ones(4)), 1, HALF_LINE)
        assert mu.atoms == [(pytest.approx(1.0), pytest.approx(1.0))]

    def test_three_power_moments(self):
        mu = prony_recover(MomentSequence(3.0 ** np.arange(8)), 2, HALF_LINE)
        assert np.allclose(mu.positions, [0, 3], atol=1e-8)
        assert np.allclose(mu.weights, [2 / 3, 1 / 3], atol=1e-8)

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for domain, pos in ((HALF_LINE, [0.2, 1.1, 2.5]), (CIRCLE, [0.4, 2.0, 4.5])):
            w = rng.dirichlet(np.ones(3)) * 0.7 + 0.1
            w /= w.sum()
            mu = AtomicMeasure(domain, pos, w)
            got = prony_recover(moments(mu, 10), 4, domain)
            assert np.allclose(got.positions, mu.positions, atol=1e-7)
            assert np.allclose(got.weights, mu.weights, atol=1e-7)

    def test_circle_haar(self):
        assert prony_recover(MomentSequence(np.zeros(8)), 3, CIRCLE) is HAAR

    def test_rank_mismatch(self):
        mu = AtomicMeasure(HALF_LINE, [0.5, 1, 1.5, 2], [0.25] * 4)
        with pytest.raises(RankMismatch):
            prony_recover(moments(mu, 6), 2, HALF_LINE)

    def test_domain_violation(self):
        # moments of the signed point -1 lie off the half-line
        with pytest.raises(DomainViolation):
            prony_recover(MomentSequence((-1.0) ** np.arange(1, 5)), 1, HALF_LINE)

    def test_requires_enough_moments(self):
        with pytest.raises(ValueError):
            prony_recover(MomentSequence(np.ones(3)), 2, HALF_LINE)
