"""Weighted Bergman moments, jet quotient norms, kernels, n=1 estimate."""
import math

import numpy as np
import pytest

from lelong.bergman import (
    JetIdealProblem,
    RadialWeight,
    bergman_kernel,
    brute_force_quotient_norm,
    dual_jet_norms,
    extension_jumping_numbers,
    kernel_log_derivative,
    moments,
    n1_estimate,
    ot_monotonicity,
    quotient_norm,
)
from lelong.errors import DomainError, OutOfRange, TruncationInsufficient

W0 = RadialWeight("zero")
WQ = RadialWeight("quadratic", {"a": 1.0})


class TestMoments:
    def test_disk_area(self):
        assert moments(W0, 0, 0.0) == pytest.approx(math.pi, rel=1e-12)

    def test_first_moment(self):
        assert moments(W0, 1, 0.0) == pytest.approx(math.pi / 2.0, rel=1e-12)

    def test_shrunk_disk(self):
        assert moments(W0, 0, math.log(4.0)) == pytest.approx(math.pi / 4.0, rel=1e-12)

    def test_flat_closed_form_grid(self):
        for k in range(9):
            for t in (0.0, 0.5, 1.0, 2.0):
                expected = math.pi * math.exp(-(k + 1) * t) / (k + 1)
                assert moments(W0, k, t) == pytest.approx(expected, rel=1e-10)

    def test_dual_log_norms_convex_in_t(self):
        # Corollary 4.3 direction: log of the dual jet norm (j!)^2/m_j(t)
        # is convex in t, i.e. log m_k(t) is concave (linear for phi = 0)
        ts = np.linspace(0.0, 4.0, 17)
        for w in (W0, WQ):
            for k in range(9):
                neg_logs = -np.log([moments(w, k, float(t)) for t in ts])
                assert np.all(neg_logs[1:-1] <= 0.5 * (neg_logs[:-2] + neg_logs[2:]) + 1e-9)

    def test_decreasing_in_k_and_t(self):
        vals = np.array([[moments(WQ, k, t) for t in (0.0, 1.0, 2.0)] for k in range(4)])
        assert np.all(np.diff(vals, axis=0) < 0)
        assert np.all(np.diff(vals, axis=1) < 0)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            moments(W0, -1, 0.0)
        with pytest.raises(OutOfRange):
            moments(W0, 0, -0.5)


class TestQuotientNorm:
    def test_hand_value(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[1.0, 1.0])
        assert quotient_norm(p, 0.0) == pytest.approx(1.5 * math.pi, rel=1e-12)

    def test_zero_jet(self):
        p = JetIdealProblem(n=2, weight=WQ, jets=[0.0, 0.0, 0.0])
        assert quotient_norm(p, 0.7) == 0.0

    def test_single_coefficient_decay(self):
        p = JetIdealProblem(n=0, weight=W0, jets=[1.0])
        for t in (0.0, 1.0, 3.0):
            assert quotient_norm(p, t) == pytest.approx(math.pi * math.exp(-t), rel=1e-12)

    def test_brute_force_agreement(self):
        rng = np.random.default_rng(13)
        for _ in range(6):
            n = int(rng.integers(0, 4))
            jets = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
            w = W0 if rng.random() < 0.5 else WQ
            p = JetIdealProblem(n=n, weight=w, jets=jets)
            t = float(rng.uniform(0.0, 1.0))
            exact = quotient_norm(p, t)
            assert brute_force_quotient_norm(p, t) == pytest.approx(exact, rel=1e-8)


class TestDualJets:
    def test_reciprocal_moment(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[0.0, 0.0])
        assert dual_jet_norms(p, 0, 0.0) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_growth_exponents(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[0.0, 0.0])
        for j, exponent in [(0, 1.0), (1, 2.0)]:
            v0 = dual_jet_norms(p, j, 10.0)
            v1 = dual_jet_norms(p, j, 11.0)
            assert math.log(v1 / v0) == pytest.approx(exponent, rel=1e-10)

    def test_order_out_of_range(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[0.0, 0.0])
        with pytest.raises(DomainError):
            dual_jet_norms(p, 2, 0.0)


class TestJumpingNumbers:
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_flat_weight(self, n):
        jumps = extension_jumping_numbers(W0, n)
        assert np.allclose(jumps, np.arange(1, n + 2), atol=1e-3)

    def test_bounded_weight_same_exponent(self):
        jumps = extension_jumping_numbers(WQ, 0)
        assert jumps[0] == pytest.approx(1.0, abs=1e-3)


class TestOtMonotonicity:
    def test_top_exponent_increasing(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[1.0, 0.0])
        assert ot_monotonicity(p, 2.0, np.linspace(0.0, 5.0, 26)).passed

    def test_pure_top_component_constant(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[0.0, 1.0])
        assert ot_monotonicity(p, 2.0, np.linspace(0.0, 5.0, 26)).passed

    def test_beta_below_exponent_fails(self):
        p = JetIdealProblem(n=1, weight=W0, jets=[1.0, 0.0])
        rep = ot_monotonicity(p, 0.5, np.linspace(0.0, 5.0, 26))
        assert not rep.passed

    def test_limit_bounds_initial_norm(self):
        # ||f||^2_0 <= lim ||f||^2_{-t} e^{beta t} with beta the top exponent
        rng = np.random.default_rng(14)
        grid = np.linspace(0.0, 8.0, 33)
        for w in (W0, WQ):
            jets = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            p = JetIdealProblem(n=1, weight=w, jets=jets)
            vals = np.array([quotient_norm(p, float(t)) for t in grid]) * np.exp(2.0 * grid)
            assert quotient_norm(p, 0.0) <= vals[-1] * (1.0 + 1e-9)


class TestKernel:
    def test_origin_value(self):
        kv = bergman_kernel(W0, 0.0, 0.0, 0.0, 8)
        assert kv.value == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_classical_closed_form(self):
        z, w = 0.3, 0.3
        kv = bergman_kernel(W0, z, w, 0.0, 60)
        assert kv.value == pytest.approx(1.0 / (math.pi * (1 - z * w) ** 2), abs=1e-9)

    def test_origin_any_weight(self):
        kv = bergman_kernel(WQ, 0.0, 0.0, 0.5, 8)
        assert kv.value == pytest.approx(1.0 / moments(WQ, 0, 0.5), rel=1e-12)

    def test_truncation_guard(self):
        with pytest.raises(TruncationInsufficient):
            bergman_kernel(W0, 0.9, 0.9, 0.0, 5)

    def test_outside_disk_rejected(self):
        with pytest.raises(OutOfRange):
            bergman_kernel(W0, 0.8, 0.1, 1.0, 20)

    def test_reproducing_property(self):
        # polar quadrature of int f(z) conj(K(z, w)) e^{-phi} dA = f(w)
        t = 0.0
        wpt = 0.3 + 0.2j
        radius = 1.0
        nodes, wts = np.polynomial.legendre.leggauss(64)
        rs = 0.5 * radius * (nodes + 1.0)
        wr = 0.5 * radius * wts
        m_ang = 96
        thetas = 2.0 * np.pi * np.arange(m_ang) / m_ang
        z = rs[:, None] * np.exp(1j * thetas)[None, :]
        for w in (W0, WQ):
            meas = (wr * rs * np.exp(-w(rs)))[:, None] * (2.0 * np.pi / m_ang)
            ks = np.zeros_like(z)
            ms = [moments(w, k, t) for k in range(41)]
            for k in range(41):
                ks += (z**k) * (np.conj(wpt) ** k) / ms[k]
            for f in (lambda x: np.ones_like(x), lambda x: x, lambda x: x**2):
                val = np.sum(f(z) * np.conj(ks) * meas)
                assert abs(val - f(np.array([wpt]))[0]) < 1e-7


class TestN1Estimate:
    def test_flat_pure_value(self):
        res = n1_estimate(W0, 1.0, 0.0)
        assert res.bound == pytest.approx(math.pi, rel=1e-12)
        assert res.exact == pytest.approx(math.pi, rel=1e-12)

    def test_flat_pure_derivative(self):
        res = n1_estimate(W0, 0.0, 1.0)
        assert res.bound == pytest.approx(math.pi / 2.0, rel=1e-9)
        assert res.exact == pytest.approx(math.pi / 2.0, rel=1e-12)

    def test_flat_mixture_sharp(self):
        res = n1_estimate(W0, 1.0, 1.0)
        assert res.bound == pytest.approx(1.5 * math.pi, rel=1e-9)
        assert res.bound == pytest.approx(res.exact, rel=1e-9)

    def test_quadratic_weight_dominates(self):
        rng = np.random.default_rng(15)
        for _ in range(5):
            f0, f1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            res = n1_estimate(WQ, f0, f1)
            assert res.bound >= res.exact - 1e-9

    def test_radial_derivative_vanishes(self):
        for w in (W0, WQ):
            assert abs(kernel_log_derivative(w)) < 1e-6

    def test_log_pole_rejected(self):
        with pytest.raises(DomainError):
            n1_estimate(RadialWeight("log_pole", {"a": 0.2}), 1.0, 0.0)
