import numpy as np
import pytest

from monomul.convolution import MCONV, MCONV0
from monomul.exceptions import DomainExit, SchemeDisagreement, ZeroFirstMoment
from monomul.measures import CIRCLE, HALF_LINE, AtomicMeasure, moments
from monomul.semigroup import (
    FlowClass,
    GeneratorCircle,
    GeneratorHalfLine,
    classify_halfline_generator,
    divisibility_chain,
    identify_power_flow_constant,
    integrate_flow,
    power_flow_closed_form,
    semigroup_measures,
    series_flow,
    validate_generator,
)
from monomul.series import TruncatedSeries, eta_from_moments, iterate, max_coeff_error

QUAD = GeneratorHalfLine.quadratic(1.0)
TWO_POINT = AtomicMeasure(HALF_LINE, [0, 2], [0.5, 0.5])


def omega_points(rng, n=20):
    r = rng.uniform(0.1, 3, n)
    th = rng.uniform(0.3, 2 * np.pi - 0.3, n)
    return r * np.exp(1j * th)


def disk_points(rng, n=20, radius=0.95):
    return radius * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))


class TestValidate:
    def test_quadratic(self):
        assert validate_generator(QUAD).ok

    def test_zero_circle(self):
        g = GeneratorCircle()
        assert validate_generator(g).ok
        traj = integrate_flow(g, [0.3 + 0.1j], [1.0, 5.0])
        assert np.allclose(traj.eta, 0.3 + 0.1j)
        pts = semigroup_measures(g, [1.0], order=8, prony_k=2)
        assert np.allclose(pts[0].moments.moments, 1)

    def test_power_callable(self):
        assert validate_generator(GeneratorCircle.power(3)).ok

    def test_rejects_bad_callable(self):
        rep = validate_generator(GeneratorCircle.from_callable(lambda z: 1.0 - z))
        assert not rep.ok and rep.worst_margin < 0 and rep.violations

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError):
            GeneratorHalfLine(0.0, [1.0], [-0.5])

    def test_circle_a(self):
        g = GeneratorCircle(0.4, [0.1, 2.0], [0.3, 0.2])
        assert abs(g.a - (0.4j - 0.5)) < 1e-14
        assert g.B(np.zeros(1))[0] == pytest.approx(g.a)


class TestClassify:
    def test_quadratic_goes_to_zero(self):
        assert classify_halfline_generator(QUAD).kind is FlowClass.DENJOY_WOLFF_ZERO

    def test_constant_rate(self):
        g = GeneratorHalfLine(1.0)
        assert classify_halfline_generator(g).kind is FlowClass.DENJOY_WOLFF_INFINITY

    def test_interior(self):
        # rate a + x / (1 - x) vanishes at x = -1 for a = 1/2
        g = GeneratorHalfLine(0.5, [1.0], [1.0])
        c = classify_halfline_generator(g)
        assert c.kind is FlowClass.INTERIOR_FIXED_POINT
        assert c.fixed_point == pytest.approx(-1.0, abs=1e-9)

    def test_interior_with_mass_at_zero(self):
        c = classify_halfline_generator(GeneratorHalfLine.quadratic(1.0, a=2.0))
        assert c.fixed_point == pytest.approx(-2.0, abs=1e-9)


class TestPointwiseFlow:
    def test_quadratic_closed_form(self):
        traj = integrate_flow(QUAD, [-1.0 + 0j], [1.0])
        assert traj.u[0, 0] == pytest.approx(-0.5, abs=1e-9)

    def test_quadratic_grid(self):
        rng = np.random.default_rng(0)
        z = omega_points(rng)
        taus = [0.25, 1.0, 2.0]
        traj = integrate_flow(QUAD, z, taus)
        for t, u in zip(taus, traj.eta):
            assert np.max(np.abs(u - z / (1 - t * z))) < 1e-6

    def test_tau_zero(self):
        z = np.array([0.2 + 0.3j, -0.5])
        for g in (QUAD, GeneratorCircle.power(2)):
            assert np.array_equal(integrate_flow(g, z, [0.0]).eta[0], z)

    def test_power_example(self):
        traj = integrate_flow(GeneratorCircle.power(1), [0.4], [0.3])
        assert traj.u[0, 0] == pytest.approx(0.4 / 0.88, abs=1e-9)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_power_constant(self, n):
        rng = np.random.default_rng(n)
        rep = identify_power_flow_constant(n, disk_points(rng, 10, 0.7), [0.1, 0.3])
        assert rep.matched == n
        assert rep.residuals[n] < 1e-8 and rep.residuals[n + 1] > 1e-3
        assert rep.estimate == pytest.approx(n, abs=1e-6)

    def test_closed_form_helper(self):
        assert power_flow_closed_form(0.4, 0.3, 1, 1) == pytest.approx(0.4 / 0.88)

    @pytest.mark.parametrize("convention", [MCONV0, MCONV])
    @pytest.mark.parametrize("g", [GeneratorHalfLine(0.3, [0.0, 1.5], [0.5, 0.4]),
                                   GeneratorCircle(0.7, [0.5, 3.0], [0.4, 0.3])])
    def test_semigroup_law(self, g, convention):
        rng = np.random.default_rng(3)
        z = omega_points(rng) if g.domain == HALF_LINE else disk_points(rng)
        t1, t2 = 0.4, 0.7
        direct = integrate_flow(g, z, [t1 + t2], convention=convention).u[0]
        inner = integrate_flow(g, z, [t2], convention=convention).u[0]
        ok = np.isfinite(direct) & np.isfinite(inner)
        assert ok.sum() >= 10
        outer = integrate_flow(g, inner[ok], [t1], convention=convention).u[0]
        assert np.max(np.abs(direct[ok] - outer)) < 1e-6

    @pytest.mark.parametrize("g", [GeneratorHalfLine(0.3, [0.0, 1.5], [0.5, 0.4]),
                                   GeneratorCircle(0.7, [0.5, 3.0], [0.4, 0.3]),
                                   GeneratorCircle.power(2)])
    def test_schemes_agree(self, g):
        rng = np.random.default_rng(4)
        z = omega_points(rng, 8) if g.domain == HALF_LINE else disk_points(rng, 8, 0.8)
        traj = integrate_flow(g, z, [0.5, 1.0], scheme="crosscheck")
        assert traj.scheme == "crosscheck"

    def test_crosscheck_raises(self, monkeypatch):
        import monomul.semigroup as sg

        monkeypatch.setattr(sg, "CROSSCHECK_TOL", 1e-16)
        with pytest.raises(SchemeDisagreement):
            integrate_flow(QUAD, [-1.0 + 0.5j], [1.0], scheme="crosscheck")

    def test_argument_monotone(self):
        g = GeneratorHalfLine(0.2, [0.0, 0.5, 2.0], [0.3, 0.3, 0.3])
        rng = np.random.default_rng(5)
        z = rng.uniform(-3, 3, 20) + 1j * rng.uniform(0.05, 3, 20)
        taus = np.linspace(0, 2, 21)
        args = np.angle(integrate_flow(g, z, taus).u)
        assert np.all(np.diff(args, axis=0) >= -1e-10)

    def test_circle_contraction(self):
        g = GeneratorCircle(-0.3, [1.0, 4.0], [0.5, 0.2])
        rng = np.random.default_rng(6)
        z = disk_points(rng)
        taus = np.array([0.5, 1.0, 3.0])
        u = integrate_flow(g, z, taus).u
        bound = np.exp(-g.a.real * taus)[:, None] * np.abs(z)
        ok = np.isfinite(u)
        assert ok.sum() > u.size // 2
        assert np.all(np.abs(u[ok]) <= bound[ok] + 1e-12)
        # u may leave the disk only where the bound allows it
        assert np.all(bound[~ok] > 1.0)

    @pytest.mark.parametrize("convention", [MCONV0, MCONV])
    @pytest.mark.parametrize("g", [GeneratorHalfLine(0.3, [0.0, 1.5], [0.5, 0.4]),
                                   GeneratorCircle(0.7, [0.5, 3.0], [0.4, 0.3])])
    def test_generator_recovery(self, g, convention):
        rng = np.random.default_rng(7)
        z = omega_points(rng, 10) if g.domain == HALF_LINE else disk_points(rng, 10, 0.8)
        h = 1e-5
        eta = integrate_flow(g, z, [h], convention=convention).eta[0]
        assert np.max(np.abs((eta - z) / h - g.A(z))) < 1e-4

    def test_eta_defined_where_u_escapes(self):
        # rho at -1 pushes positive reals outward
        g = GeneratorCircle(0.0, [np.pi], [1.0])
        z = np.array([0.9, 0.1])
        traj = integrate_flow(g, z, [2.0])
        assert np.isnan(traj.u[0, 0]) and np.isfinite(traj.u[0, 1])
        assert np.all(np.abs(traj.eta[0]) <= np.abs(z))

    def test_start_outside_domain(self):
        with pytest.raises(DomainExit):
            integrate_flow(QUAD, [2.0 + 0j], [1.0])
        with pytest.raises(DomainExit):
            integrate_flow(GeneratorCircle.power(1), [1.2], [1.0])

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            integrate_flow(QUAD, [-1.0], [1.0], scheme="leapfrog")


class TestSeriesFlow:
    def test_quadratic_measure(self):
        pts = semigroup_measures(QUAD, [1.0], order=12, prony_k=3)
        mu = pts[0].measure
        assert np.allclose(mu.positions, [0, 2], atol=1e-6)
        assert np.allclose(mu.weights, [0.5, 0.5], atol=1e-6)

    def test_quadratic_series(self):
        for t, eta in zip([0.5, 2.0], series_flow(QUAD, [0.5, 2.0], order=16)):
            exact = TruncatedSeries.geometric(t, 16).full
            assert np.max(np.abs(eta.full - exact) / np.maximum(1, np.abs(exact))) < 1e-8

    def test_tau_zero_is_delta_one(self):
        pts = semigroup_measures(GeneratorHalfLine(0.3, [1.0], [0.5]), [0.0], order=8, prony_k=2)
        assert np.allclose(pts[0].moments.moments, 1)
        assert pts[0].measure.atoms == [(pytest.approx(1.0), pytest.approx(1.0))]

    def test_haar_limit(self):
        g = GeneratorCircle(0.5, [1.0, 3.0], [0.3, 0.2])
        pts = semigroup_measures(g, [50.0], order=12)
        assert np.max(np.abs(pts[0].moments.moments)) < 1e-6

    @pytest.mark.parametrize("convention", [MCONV0, MCONV])
    def test_series_matches_pointwise(self, convention):
        g = GeneratorCircle(0.7, [0.5, 3.0], [0.4, 0.3])
        tau = 0.6
        eta = series_flow(g, [tau], order=40, convention=convention)[0]
        z = np.array([0.2, -0.1 + 0.15j, 0.05j])
        pointwise = integrate_flow(g, z, [tau], convention=convention).eta[0]
        assert np.max(np.abs(eta(z) - pointwise)) < 1e-8


class TestDivisibility:
    def test_two_point_half(self):
        chain = divisibility_chain(TWO_POINT, 1)
        expected = moments(AtomicMeasure(HALF_LINE, [0, 1.5], [1 / 3, 2 / 3]), 32)
        assert np.max(np.abs(chain[0].moments - expected.moments)) < 1e-8

    def test_depth_five_recomposes(self):
        chain = divisibility_chain(TWO_POINT, 5)
        target = eta_from_moments(moments(TWO_POINT, 32))
        for level, m in enumerate(chain, start=1):
            assert max_coeff_error(iterate(m.eta, 2**level), target) < 1e-8
            assert max_coeff_error(m.eta, TruncatedSeries.geometric(2.0**-level, 32)) < 1e-12

    def test_dirac_one(self):
        for m in divisibility_chain(AtomicMeasure.dirac(1.0), 4, order=8):
            assert np.allclose(m.moments, 1)

    @pytest.mark.parametrize("op", [MCONV, MCONV0])
    def test_circle_principal_root(self, op):
        mu = AtomicMeasure(CIRCLE, [0.3, 1.2, 2.0], [0.5, 0.3, 0.2])
        b = mu.first_moment
        chain = divisibility_chain(mu, 3, op, order=12)
        for level, m in enumerate(chain, start=1):
            k = 2**level
            expected = abs(b) ** (1 / k) * np.exp(1j * np.angle(b) / k)
            assert m.first == pytest.approx(expected, abs=1e-12)

    def test_mconv0_chain_recomposes(self):
        mu = AtomicMeasure(HALF_LINE, [0.5, 1.0, 3.0], [0.3, 0.4, 0.3])
        chain = divisibility_chain(mu, 3, MCONV0, order=16)
        assert chain[0].first == pytest.approx(np.sqrt(mu.first_moment.real))

    def test_custom_branch(self):
        mu = AtomicMeasure(CIRCLE, [0.3, 1.2], [0.5, 0.5])
        neg = lambda v, n: -(v ** (1 / n))
        chain = divisibility_chain(mu, 1, MCONV, branch=neg, order=8)
        assert chain[0].first == pytest.approx(-(mu.first_moment ** 0.5))

    def test_zero_first_moment(self):
        with pytest.raises(ZeroFirstMoment):
            divisibility_chain(AtomicMeasure.dirac(0.0), 2)
        with pytest.raises(ZeroFirstMoment):
            divisibility_chain(AtomicMeasure(CIRCLE, [0, np.pi], [0.5, 0.5]), 2, MCONV0)
