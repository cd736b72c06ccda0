import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.interpolate import BSpline

from anisosvm.errors import InvalidArgumentError, NumericalFailureError
from anisosvm.kernel import Bandwidths, KernelExpansion, QuadratureSpec, gram_matrix, rkhs_norm_expansion
from anisosvm.smoothing import (
    K_product_eval,
    SmootherSpec,
    c_r_q_constant,
    convolve,
    error_estimation_rhs,
    k_i_eval,
    mixture_components,
    rkhs_bound_convolution,
    sup_bound_constant,
)


def spec(r, g):
    return SmootherSpec(tuple(r), Bandwidths(tuple(g)))


class TestKernels:
    def test_examples(self):
        assert k_i_eval(0.0, 1.0, 1) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-15)
        assert k_i_eval(0.0, 1.0, 2) == pytest.approx(1.5 * math.sqrt(2 / math.pi), rel=1e-15)
        assert K_product_eval(np.zeros(2), spec((1, 1), (1, 1))) == pytest.approx(2 / math.pi, rel=1e-15)
        assert K_product_eval(np.array([0.3]), spec((3,), (0.4,))) == k_i_eval(0.3, 0.4, 3)

    def test_r1_is_gaussian_density(self):
        x = np.linspace(-2, 2, 41)
        g = 0.7
        dens = np.exp(-(x**2) / (2 * (g / 2) ** 2)) / (math.sqrt(2 * math.pi) * g / 2)
        np.testing.assert_allclose(k_i_eval(x, g, 1), dens, rtol=1e-13)

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    @pytest.mark.parametrize("g", [0.1, 0.35, 1.0])
    def test_mass_by_adaptive_quadrature(self, r, g):
        mass, _ = integrate.quad(lambda x: k_i_eval(x, g, r), -np.inf, np.inf, epsabs=1e-12)
        assert mass == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("r", [1, 2, 3, 4])
    def test_mixture_weights_sum_to_one(self, r):
        w, sd = mixture_components(r, 0.5)
        assert math.fsum(w) == 1.0
        np.testing.assert_allclose(sd, 0.25 * np.arange(1, r + 1))
        # total variation of K_i equals sum |w| = 2^r - 1
        assert math.fsum(abs(w)) == 2**r - 1

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            k_i_eval(0.0, 0.0, 1)
        with pytest.raises(InvalidArgumentError):
            k_i_eval(0.0, 1.0, 0)
        with pytest.raises(InvalidArgumentError):
            SmootherSpec((0,), Bandwidths((1.0,)))
        with pytest.raises(InvalidArgumentError):
            K_product_eval(np.zeros(3), spec((1, 1), (1, 1)))

    def test_from_smoothness(self):
        s = SmootherSpec.from_smoothness((1, 2.5), Bandwidths((0.3, 0.4)))
        assert s.r == (2, 3)


class TestConvolve:
    def test_constant_fixed_point(self):
        f0 = convolve(lambda X: np.full(len(X), 2.5), spec((3, 2), (0.4, 0.8)))
        np.testing.assert_allclose(f0(np.random.default_rng(0).random((20, 2))), 2.5, rtol=1e-12)

    def test_linear_fixed_point(self):
        f0 = convolve(lambda X: X[:, 0], spec((1,), (0.6,)))
        x = np.linspace(-1, 1, 9)[:, None]
        np.testing.assert_allclose(f0(x), x[:, 0], atol=1e-13)

    def test_sine_characteristic_function(self):
        g = 0.5
        f0 = convolve(lambda X: np.sin(X[:, 0]), spec((1,), (g,)))
        x = np.linspace(-3, 3, 100)
        np.testing.assert_allclose(f0(x[:, None]), math.exp(-(g**2) / 8) * np.sin(x), atol=1e-12)

    def test_against_adaptive_quadrature(self):
        s = spec((2,), (0.3,))
        f = lambda t: np.tanh(3 * t) * np.exp(-t * t / 2)
        f0 = convolve(lambda X: f(X[:, 0]), s, QuadratureSpec(80))
        for x in (-0.4, 0.0, 0.9):
            ref, _ = integrate.quad(lambda t: k_i_eval(x - t, 0.3, 2) * f(t), -8, 8, limit=400, epsabs=1e-13)
            assert f0(np.array([x])) == pytest.approx(ref, abs=1e-10)

    def test_zero_extension(self):
        f0 = convolve(lambda X: np.ones(len(X)), spec((1,), (0.2,)), domain=[(0.0, 1.0)])
        # at the boundary half the Gaussian mass lies outside
        assert f0(np.array([0.0])) == pytest.approx(0.5, abs=1e-3)
        assert f0(np.array([0.5])) == pytest.approx(1.0, abs=1e-3)

    def test_nonfinite_samples(self):
        f0 = convolve(lambda X: np.full(len(X), np.nan), spec((1,), (1.0,)))
        with pytest.raises(NumericalFailureError):
            f0(np.zeros((1, 1)))

    def test_dimension_limit(self):
        with pytest.raises(InvalidArgumentError):
            convolve(lambda X: X[:, 0], spec((1,) * 4, (1,) * 4))

    @given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 3))
    def test_sup_bound_on_spline_mixtures(self, seed, r1, r2):
        rng = np.random.default_rng(seed)
        knots = np.linspace(0, 1, 8)
        coefs = rng.uniform(-1, 1, (2, 11))
        t = np.r_[[0.0] * 3, knots, [1.0] * 3]
        splines = [BSpline(t, c, 3, extrapolate=False) for c in coefs]
        f = lambda X: np.nan_to_num(splines[0](X[:, 0])) * np.nan_to_num(splines[1](X[:, 1]))
        grid = np.linspace(0, 1, 2001)
        sup = max(np.max(np.abs(s(grid))) for s in splines[:1]) * max(np.max(np.abs(s(grid))) for s in splines[1:])
        s = spec((r1, r2), tuple(rng.uniform(0.1, 1.0, 2)))
        vals = convolve(f, s, QuadratureSpec(24))(rng.uniform(-0.2, 1.2, (200, 2)))
        assert np.all(np.abs(vals) <= sup_bound_constant(s.r) * sup + 1e-6)

    def test_converges_as_width_shrinks(self):
        f = lambda X: np.abs(X[:, 0] - 0.5) + np.sin(3 * X[:, 0])
        x = np.linspace(0.1, 0.9, 81)[:, None]
        errs = [np.max(np.abs(convolve(f, spec((2,), (g,)), QuadratureSpec(80))(x) - f(x))) for g in (0.4, 0.2, 0.1, 0.05)]
        assert all(b <= 1.1 * a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 0.1 * errs[0]


class TestConstants:
    def test_sup_bound_constant(self):
        assert sup_bound_constant((1, 1, 1)) == 1
        assert sup_bound_constant((2, 3)) == 21
        assert sup_bound_constant((2,)) == 3

    def test_rkhs_bound(self):
        assert rkhs_bound_convolution(1.0, spec((1, 1), (1, 1))) == pytest.approx(math.pi**-0.5, rel=1e-14)
        assert rkhs_bound_convolution(0.0, spec((1,), (0.3,))) == 0.0
        assert rkhs_bound_convolution(1.0, spec((2,), (0.25,))) == pytest.approx(math.pi**-0.25 * 6, rel=1e-14)

    def test_c_r_q(self):
        assert c_r_q_constant(1, 1) == pytest.approx(math.sqrt(2), rel=1e-14)
        assert c_r_q_constant(1, 2) == pytest.approx(
            2**-0.5 + 2 * 2**-0.5 + 2**0.5 * math.sqrt(0.5 * 1.5), rel=1e-14
        )
        assert c_r_q_constant(1, 2) == pytest.approx(3.34607, abs=5e-6)
        with pytest.raises(InvalidArgumentError):
            c_r_q_constant(0, 1)

    def test_c_r_q_monotone(self):
        qs = np.linspace(1, 4, 13)
        table = np.array([[c_r_q_constant(r, q) for q in qs] for r in range(1, 5)])
        assert np.all(np.diff(table, axis=0) > 0)
        assert np.all(np.diff(table, axis=1) >= 0)


def test_rkhs_norm_of_projection_respects_bound():
    # f = mixture of two Gaussian bumps; K*f is projected onto a kernel expansion by least squares
    g = 0.5
    s = spec((1,), (g,))
    f = lambda X: np.exp(-((X[:, 0] - 0.3) ** 2) / 0.02) - 0.5 * np.exp(-((X[:, 0] + 0.4) ** 2) / 0.05)
    l2 = math.sqrt(integrate.quad(lambda t: f(np.array([[t]]))[0] ** 2, -3, 3, points=[0.3, -0.4])[0])
    f0 = convolve(f, s, QuadratureSpec(120))
    grid = np.linspace(-3, 3, 601)[:, None]
    centers = np.linspace(-2.5, 2.5, 21)[:, None]
    bw = Bandwidths((g,))
    A = np.exp(-((grid - centers.T) ** 2) / g**2)
    coef, *_ = np.linalg.lstsq(A, f0(grid), rcond=None)
    norm = rkhs_norm_expansion(KernelExpansion(centers, coef, bw))
    assert np.max(np.abs(A @ coef - f0(grid))) < 1e-3
    assert norm <= 1.05 * rkhs_bound_convolution(l2, s)


def test_error_estimation_inequality():
    # ||f - K*f||_{L_q}^q <= sum_i c_{r,q} ||g_i|| omega_{r,L_q}(f_i, gamma_i / 2)^q for uniform marginals
    f = lambda X: np.abs(X[:, 0] - 0.5) * np.sin(2 * X[:, 1])
    dom = [(0.0, 1.0), (0.0, 1.0)]
    for g in (0.2, 0.1):
        s = spec((2, 2), (g, g))
        f0 = convolve(f, s, QuadratureSpec(30))
        X = np.random.default_rng(1).random((4000, 2))
        for q in (1.0, 2.0):
            lhs = float(np.mean(np.abs(f(X) - f0(X)) ** q))
            rhs = error_estimation_rhs(f, s, q, dom, anchors=32, points=512)
            assert lhs <= rhs
