import numpy as np
import pytest
import scipy.sparse as sp

from monomul.convolution import MCONV, MCONV0, ConvolutionPair, convolve, convolve_pair
from monomul.exceptions import TruncationExceeded
from monomul.measures import HALF_LINE, AtomicMeasure
from monomul.operator_model import (
    SECOND,
    ShiftPolyVariable,
    build_shift,
    check_monotone_axioms,
    oracle_moments,
    realize_atomic_pair,
    realize_pair,
    realize_single,
)
from monomul.series import moments_from_psi


def series_prediction(v1, v2, order):
    m1 = moments_from_psi(v1.psi_series(order))
    m2 = moments_from_psi(v2.psi_series(order))
    return convolve_pair(ConvolutionPair(m1, v1.c), ConvolutionPair(m2, v2.c), order).dist.moments


class TestShift:
    def test_d2(self):
        assert np.array_equal(build_shift(2).toarray(), [[0, 0], [1, 0]])

    def test_relations(self):
        d = 6
        s = build_shift(d).toarray()
        eye = np.eye(d)
        p = np.zeros((d, d))
        p[0, 0] = 1
        last = np.zeros((d, d))
        last[-1, -1] = 1
        assert np.array_equal(s @ s.T, eye - p)
        assert np.array_equal(s.T @ s, eye - last)

    def test_vector_state_moments(self):
        d = 10
        s = build_shift(d).toarray()
        one_plus = np.eye(d) + s
        for n in range(1, d):
            assert np.linalg.matrix_power(s, n)[0, 0] == 0
            assert np.linalg.matrix_power(one_plus, n)[0, 0] == 1

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            build_shift(1)


class TestRealize:
    def test_units(self):
        scene = realize_pair(ShiftPolyVariable([1]), ShiftPolyVariable([1], slot=SECOND), 32)
        assert np.allclose(oracle_moments(scene, ["x1", "x2"], 8), 1)

    def test_zero_center_product_law(self):
        v1 = ShiftPolyVariable([1.0, 0.4], c=0)
        v2 = ShiftPolyVariable([0.7, -0.2, 0.1], c=1.3, slot=SECOND)
        scene = realize_pair(v1, v2, 64)
        prod = oracle_moments(scene, ["x1", "x2"], 8)
        phi2 = oracle_moments(scene, ["x2"], 1)[0]
        x1 = oracle_moments(scene, ["x1"], 8)
        assert np.allclose(prod, phi2 ** np.arange(1, 9) * x1, rtol=1e-12)

    def test_catalan_marginal(self):
        scene = realize_single(ShiftPolyVariable([1, 1]), 32)
        assert np.allclose(oracle_moments(scene, ["x"], 6), [1, 2, 5, 14, 42, 132])

    def test_empty_word(self):
        scene = realize_single(ShiftPolyVariable([1]), 8)
        assert np.array_equal(oracle_moments(scene, [], 3), np.ones(3))

    def test_truncation_guard(self):
        scene = realize_pair(ShiftPolyVariable([1]), ShiftPolyVariable([1], slot=SECOND), 16)
        with pytest.raises(TruncationExceeded):
            oracle_moments(scene, ["x1", "x2"], 8)

    def test_bad_u(self):
        with pytest.raises(ValueError):
            ShiftPolyVariable([0.0, 1.0])


class TestOracle:
    def test_inverse_argument(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            u = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
            u[0] = rng.uniform(0.5, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            v = ShiftPolyVariable(u)
            oracle = oracle_moments(realize_single(v, 64), ["x"], 10)
            series = moments_from_psi(v.psi_series(10)).moments
            assert np.max(np.abs(oracle - series)) < 1e-8

    @pytest.mark.parametrize("c1", [1.0, 0.0, 0.6 - 0.3j])
    def test_pair_convolution(self, c1):
        rng = np.random.default_rng(1)
        u1 = [1.0, 0.3 + 0.1j, -0.2]
        u2 = [0.8, -0.1, 0.05j, 0.1]
        v1 = ShiftPolyVariable(u1, c1)
        v2 = ShiftPolyVariable(u2, complex(rng.uniform(0.5, 1.5)), SECOND)
        oracle = oracle_moments(realize_pair(v1, v2, 64), ["x1", "x2"], 8)
        assert np.max(np.abs(oracle - series_prediction(v1, v2, 8))) < 1e-8

    def test_order_insensitive(self):
        v1 = ShiftPolyVariable([1.0, 0.5], 0.7)
        v2 = ShiftPolyVariable([0.9, 0.2, -0.3], 1.1, SECOND)
        scene = realize_pair(v1, v2, 64)
        a = oracle_moments(scene, ["x1", "x2"], 8)
        b = oracle_moments(scene, ["x2", "x1"], 8)
        assert np.max(np.abs(a - b)) < 1e-10

    def test_condition_two_factorization(self):
        v1 = ShiftPolyVariable([1.0, 0.5], 0.7)
        v2 = ShiftPolyVariable([0.9, 0.2], 1.1, SECOND)
        scene = realize_pair(v1, v2, 32)
        x2 = scene.ops["x2"]
        y1 = scene.ops["x1"] - v1.c * sp.identity(32 * 32, format="csr")
        xi = scene.state

        def phi(*ops):
            v = xi
            for op in reversed(ops):
                v = op @ v
            return np.vdot(xi, v)

        assert phi(x2, y1, x2) == pytest.approx(phi(x2) * phi(y1) * phi(x2), abs=1e-12)


class TestPositivityRoute:
    @pytest.mark.parametrize("op", [MCONV, MCONV0])
    def test_symmetric_product(self, op):
        mu1 = AtomicMeasure(HALF_LINE, [0.2, 1.0, 2.5], [0.3, 0.3, 0.4])
        mu2 = AtomicMeasure(HALF_LINE, [0.5, 1.7], [0.6, 0.4])
        if op == MCONV:
            c1, c2 = 1.0, 1.0
        else:
            c1, c2 = mu1.first_moment, mu2.first_moment
        order = 10
        expected = convolve(op, mu1, mu2, order).moments
        plain = realize_atomic_pair(mu1, mu2, c1, c2)
        sym = realize_atomic_pair(mu1, mu2, c1, c2, square_root=True)
        assert np.max(np.abs(oracle_moments(plain, ["x1", "x2"], order) - expected)
                      / np.maximum(1, np.abs(expected))) < 1e-8
        assert np.max(np.abs(oracle_moments(sym, ["x1", "x2", "x1"], order) - expected)
                      / np.maximum(1, np.abs(expected))) < 1e-8


class TestAxioms:
    def test_standard_realization(self):
        v1 = ShiftPolyVariable([1.0, 0.3, -0.2], 0.8)
        v2 = ShiftPolyVariable([0.9, 0.1j], 1.2, SECOND)
        report = check_monotone_axioms(realize_pair(v1, v2, 32), trials=10)
        assert report.passed(1e-10), report.residuals

    def test_atomic_realization(self):
        mu1 = AtomicMeasure(HALF_LINE, [0.2, 1.0, 2.5], [0.3, 0.3, 0.4])
        mu2 = AtomicMeasure(HALF_LINE, [0.5, 1.7], [0.6, 0.4])
        report = check_monotone_axioms(realize_atomic_pair(mu1, mu2, 1.0, 1.0), trials=10)
        assert report.passed(1e-10), report.residuals

    def test_detects_broken_independence(self):
        v1 = ShiftPolyVariable([1.0, 0.3], 0.8)
        v2 = ShiftPolyVariable([0.9, 0.4], 1.2, SECOND)
        scene = realize_pair(v1, v2, 16)
        # swap roles: x2 is not monotone-independent from x1 in reversed order
        swapped = type(scene)(scene.dims, {"x1": scene.ops["x2"], "x2": scene.ops["x1"]},
                              scene.state, scene.levels,
                              {"x1": scene.centers["x2"], "x2": scene.centers["x1"]}, scene.p)
        assert not check_monotone_axioms(swapped, trials=5).passed(1e-6)

    def test_trace_remnant_triples(self):
        v1 = ShiftPolyVariable([1.0, 0.2, 0.1], 0.9)
        v2 = ShiftPolyVariable([0.8, -0.3], 1.1, SECOND)
        scene = realize_pair(v1, v2, 64)
        words = (["x1", "x1", "x2"], ["x1", "x2", "x1"], ["x2", "x1", "x1"])
        vals = [oracle_moments(scene, w, 6) for w in words]
        assert max(np.max(np.abs(a - b)) for a in vals for b in vals) < 1e-8
