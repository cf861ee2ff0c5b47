"""Metric families: evaluation, duals, convexity, curvature, growth."""
import math

import numpy as np
import pytest

from lelong.errors import OutOfRange, SchemaError
from lelong.families import (
    check_convexity,
    check_moderate_growth,
    check_negative_curvature,
    dual_eval,
    eval_family,
    generated_family,
    log_norm,
    dual_log_norm,
    rescale,
    sampled_family,
)
from lelong.forms import dual_form, make_form
from lelong.profiles import exp_decay, linear, tabulated
from lelong.testing import random_generated_family, random_vector

M54 = np.array([[5.0, 4.0], [4.0, 5.0]])


def diag01(t_max=200.0):
    return generated_family([(np.eye(2), [linear(0.0), linear(1.0)])], t_max=t_max)


class TestEvalFamily:
    def test_generated_closed_form(self):
        h = eval_family(diag01(), 2.0)
        assert np.allclose(h.matrix, np.diag([1.0, np.exp(2.0)]))

    def test_sampled_midpoint(self):
        fam = sampled_family([0.0, 1.0], [make_form(np.eye(2)), make_form(3.0 * np.eye(2))])
        assert np.allclose(eval_family(fam, 0.5).matrix, 2.0 * np.eye(2))

    def test_out_of_range(self):
        fam = diag01(t_max=10.0)
        with pytest.raises(OutOfRange):
            eval_family(fam, 11.0)

    def test_sampled_grid_points_bit_exact(self):
        rng = np.random.default_rng(4)
        forms = []
        for _ in range(4):
            g = rng.standard_normal((3, 3))
            forms.append(make_form(g @ g.T + 3 * np.eye(3)))
        fam = sampled_family([0.0, 1.0, 2.5, 4.0], forms)
        for t, f in zip(fam.grid, forms):
            assert eval_family(fam, float(t)).matrix is f.matrix

    def test_nonunitary_frame_rejected_when_required(self):
        with pytest.raises(SchemaError):
            generated_family([(2.0 * np.eye(2), [linear(0.0), linear(1.0)])], t_max=10.0, require_unitary=True)

    def test_sampled_grid_must_start_at_zero(self):
        with pytest.raises(SchemaError):
            sampled_family([1.0, 2.0], [make_form(np.eye(1)), make_form(np.eye(1))])


class TestDualEval:
    def test_diagonal(self):
        d = dual_eval(diag01(), 1.0)
        assert np.allclose(d.matrix, np.diag([1.0, np.exp(-1.0)]))

    def test_identity_family(self):
        fam = generated_family([(np.eye(2), [linear(0.0), linear(0.0)])], t_max=5.0)
        assert np.allclose(dual_eval(fam, 3.0).matrix, np.eye(2))

    def test_constant_hand_inverse(self):
        u = np.linalg.eigh(M54)[1]
        lam = np.linalg.eigvalsh(M54)
        fam = generated_family(
            [(u, [linear(0.0, math.log(lam[0])), linear(0.0, math.log(lam[1]))])], t_max=5.0
        )
        d = dual_eval(fam, 0.0)
        assert np.allclose(d.matrix, np.array([[5.0, -4.0], [-4.0, 5.0]]) / 9.0)

    def test_dual_of_dual_recovers(self):
        fam = diag01()
        for t in [0.0, 1.0, 7.5]:
            h = eval_family(fam, t)
            back = dual_form(dual_eval(fam, t))
            assert np.max(np.abs(back.matrix - h.matrix)) < 1e-10 * max(1.0, np.max(np.abs(h.matrix)))


class TestLogNorms:
    def test_log_norm_matches_evaluate(self):
        fam = diag01()
        u = np.array([1.0, 1.0])
        ts = np.linspace(0.0, 10.0, 7)
        direct = np.log([np.real(u @ eval_family(fam, t).matrix @ u) for t in ts])
        assert np.allclose(log_norm(fam, u, ts), direct)

    def test_dual_log_norm_matches_evaluate(self):
        fam = diag01()
        v = np.array([0.3, 0.7])
        for t in [0.0, 2.0, 9.0]:
            direct = math.log(np.real(v @ dual_eval(fam, t).matrix @ v))
            assert dual_log_norm(fam, v, t) == pytest.approx(direct, abs=1e-12)

    def test_log_norm_survives_large_horizon(self):
        fam = generated_family([(np.eye(2), [linear(-3.0), linear(3.0)])], t_max=500.0)
        val = log_norm(fam, [1.0, 1.0], 500.0)
        assert val == pytest.approx(1500.0, abs=1e-6)

    def test_flat_generated_affine_in_basis_directions(self):
        rng = np.random.default_rng(5)
        from lelong.testing import random_unitary

        u = random_unitary(rng, 3)
        exps = [-1.0, 0.5, 2.0]
        fam = generated_family([(u, [linear(a) for a in exps])], t_max=50.0)
        ts = np.linspace(0.0, 50.0, 33)
        for j in range(3):
            vals = log_norm(fam, u[:, j], ts)
            secant = vals[0] + (vals[-1] - vals[0]) * (ts - ts[0]) / (ts[-1] - ts[0])
            assert np.max(np.abs(vals - secant)) <= 1e-9


class TestConvexity:
    def test_diagonal_mixture_convex(self):
        rep = check_convexity(diag01(), [np.array([1.0, 1.0])], np.linspace(0.0, 20.0, 41))
        assert rep.passed

    def test_concave_sampled_fails(self):
        ts = np.linspace(0.0, 3.0, 13)
        forms = [make_form(np.array([[math.exp(-t * t)]])) for t in ts]
        fam = sampled_family(ts, forms)
        rep = check_convexity(fam, [np.array([1.0])], ts)
        assert not rep.passed
        assert rep.worst > 1e-3

    def test_constant_family_zero_violation(self):
        fam = generated_family([(np.eye(2), [linear(0.0), linear(0.0)])], t_max=10.0)
        rep = check_convexity(fam, [np.array([1.0, 2.0])], np.linspace(0.0, 10.0, 11))
        assert rep.passed
        assert rep.worst <= 1e-12

    def test_random_directions_on_generated_families(self):
        rng = np.random.default_rng(6)
        fam = random_generated_family(rng, 3, t_max=100.0)
        dirs = [random_vector(rng, 3) for _ in range(100)]
        rep = check_convexity(fam, dirs, np.linspace(0.0, 100.0, 101))
        assert rep.passed


class TestNegativeCurvature:
    def test_flat_family_passes(self):
        fam = diag01(t_max=20.0)
        rep = check_negative_curvature(
            fam, [(np.array([1.0, 0.0]), np.array([0.0, 1.0]))], (2.0, 4.0, -1.0, 1.0), step=0.25
        )
        assert rep.passed

    def test_concave_scalar_fails(self):
        ts = np.linspace(0.0, 20.0, 201)
        prof = tabulated(ts, -(ts**2))
        fam = generated_family([(np.eye(1), [prof])], t_max=20.0, validate=False)
        rep = check_negative_curvature(
            fam, [(np.array([1.0]), np.array([0.0]))], (2.0, 4.0, -1.0, 1.0), step=0.25
        )
        assert not rep.passed
        assert rep.worst < -1.0

    def test_constant_identity_passes(self):
        fam = generated_family([(np.eye(2), [linear(0.0), linear(0.0)])], t_max=20.0)
        rep = check_negative_curvature(
            fam, [(np.array([1.0, 0.0]), np.array([0.0, 1.0]))], (2.0, 4.0, -1.0, 1.0), step=0.25
        )
        assert rep.passed

    def test_box_outside_strip_rejected(self):
        fam = diag01(t_max=5.0)
        with pytest.raises(OutOfRange):
            check_negative_curvature(fam, [(np.array([1.0, 0.0]), np.array([0.0, 1.0]))], (0.0, 4.0, -1.0, 1.0), 0.25)


class TestModerateGrowth:
    def test_exact_exponential(self):
        fam = generated_family([(np.eye(2), [linear(0.0), linear(2.0)])], t_max=50.0)
        fit = check_moderate_growth(fam, list(np.eye(2)))
        assert fit.verdict == "moderate"
        assert fit.a == pytest.approx(2.0, abs=1e-9)
        assert fit.C == pytest.approx(1.0, rel=1e-6)

    def test_decaying_correction(self):
        fam = generated_family([(np.eye(1), [exp_decay(1.0, 0.0, amp=1.0, rate=1.0)])], t_max=50.0)
        fit = check_moderate_growth(fam, [np.array([1.0])])
        assert fit.verdict == "moderate"
        assert fit.a == pytest.approx(1.0, abs=1e-6)
        assert fit.C == pytest.approx(math.e, rel=1e-2)

    def test_superexponential_not_moderate(self):
        ts = np.linspace(0.0, 50.0, 201)
        fam = generated_family([(np.eye(1), [tabulated(ts, ts**2)])], t_max=50.0)
        fit = check_moderate_growth(fam, [np.array([1.0])])
        assert fit.verdict == "not moderate"

    def test_short_horizon_rejected(self):
        fam = diag01(t_max=5.0)
        with pytest.raises(OutOfRange):
            check_moderate_growth(fam, list(np.eye(2)))


class TestRescale:
    def test_shifts_exponents(self):
        fam = diag01(t_max=50.0)
        resc = rescale(fam, 1.0)
        assert resc.exponent_shift == 1.0
        h = eval_family(resc, 3.0)
        assert np.allclose(h.matrix, np.diag([np.exp(-3.0), 1.0]))

    def test_sampled_rescale(self):
        fam = sampled_family([0.0, 1.0], [make_form(np.eye(1)), make_form(np.array([[math.e]]))])
        resc = rescale(fam, 1.0)
        assert eval_family(resc, 1.0).matrix[0, 0] == pytest.approx(1.0)
