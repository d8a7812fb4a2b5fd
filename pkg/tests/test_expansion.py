import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freudapprox import expansion, functions, orthopoly
from freudapprox.errors import ConvergenceFailure, InvalidArgument, InvalidFunction
from freudapprox.expansion import (
    Expansion,
    distance,
    distance_to_degree,
    distances,
    fourier_coefficients,
    reconstruct,
    seminorms,
    tail_distance,
)
from freudapprox.functions import FunctionSpec

import oracles

ALPHAS = [1.5, 2.0, 3.0, 4.0]


def table(alpha, N=100):
    return orthopoly.recurrence_table(alpha, N)


@pytest.fixture(scope="module")
def sin_exp():
    return fourier_coefficients(functions.sine(), table(2.0, 60), 60)


class TestCoefficients:
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_basis_polynomial(self, alpha):
        t = table(alpha)
        exp = fourier_coefficients(functions.orthopoly_function(t, 3), t, 20)
        target = np.zeros(21)
        target[3] = 1.0
        np.testing.assert_allclose(exp.coeffs, target, atol=1e-10)

    def test_identity_alpha2(self):
        exp = fourier_coefficients(functions.monomial(1), table(2.0), 10)
        assert exp.coeffs[1] == pytest.approx((math.pi / 2) ** 0.25 / 2, rel=1e-13)
        assert exp.coeffs[1] == pytest.approx(0.5598, abs=1e-4)
        others = np.delete(exp.coeffs, 1)
        assert np.max(np.abs(others)) <= 1e-13

    def test_exp_half_square_decay(self):
        f = functions.exp_half_square()
        exp = fourier_coefficients(f, table(2.0), 80)
        n = np.arange(81)
        s6 = n**6 * np.abs(exp.coeffs)
        assert s6[-10:].max() < 1e-3 * s6.max()
        for k in (10, 20, 40):
            ref = oracles.alpha2_coefficient(lambda x: math.exp(x * x / 2), k)
            assert exp.coeffs[k] == pytest.approx(ref, abs=1e-12)
        # nonzero even coefficients decay like 3**(-n/2)
        ratio = exp.coeffs[42] / exp.coeffs[40]
        assert abs(ratio) == pytest.approx(1 / 3, rel=0.05)

    def test_gauss_method_for_polynomials(self):
        exp = fourier_coefficients(functions.monomial(4), table(3.0), 10)
        assert exp.quad_meta["method"] == "gauss"
        comp = fourier_coefficients(functions.monomial(4), table(3.0), 10, method="composite")
        np.testing.assert_allclose(exp.coeffs, comp.coeffs, atol=1e-12)

    def test_bessel(self):
        for f in (functions.absolute(), functions.sign(), functions.cosine()):
            exp = fourier_coefficients(f, table(3.0), 30)
            assert math.fsum(exp.coeffs**2) <= exp.f_norm_sq * (1 + 1e-9)

    def test_nonfinite_function(self):
        bad = FunctionSpec("bad", lambda x: np.where(np.abs(x) < 1, 1.0 / x, 0.0), None, j_max=0)
        with pytest.raises(InvalidFunction):
            fourier_coefficients(bad, table(2.0), 5, method="gauss", m=11)

    def test_incompatible_alpha(self):
        with pytest.raises(InvalidArgument):
            fourier_coefficients(functions.exp_half_square(), table(1.5), 5)

    def test_non_convergence(self):
        wild = FunctionSpec("wild", lambda x: np.sin(400 * x), None, j_max=0)
        with pytest.raises(ConvergenceFailure) as info:
            fourier_coefficients(wild, table(2.0), 5, m=2)
        assert info.value.previous.shape == info.value.last.shape == (6,)

    def test_bad_arguments(self):
        with pytest.raises(InvalidArgument):
            fourier_coefficients(functions.sine(), table(2.0, 10), 11)
        with pytest.raises(InvalidArgument):
            fourier_coefficients(functions.sine(), table(2.0), 5, method="simpson")
        with pytest.raises(InvalidArgument):
            fourier_coefficients(functions.monomial(2), table(2.0), 10, m=5, method="gauss")

    def test_linearity(self):
        t = table(3.0)
        f, g = functions.sine(), functions.absolute()
        combo = FunctionSpec("combo", lambda x: 2.0 * f(x) - 0.5 * g(x), None, j_max=0, breakpoints=(0.0,))
        a = fourier_coefficients(combo, t, 30).coeffs
        b = 2.0 * fourier_coefficients(f, t, 30).coeffs - 0.5 * fourier_coefficients(g, t, 30).coeffs
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_expansion_immutable(self, sin_exp):
        with pytest.raises(ValueError):
            sin_exp.coeffs[0] = 1.0


class TestDistance:
    def test_n0_is_norm(self, sin_exp):
        assert distance(sin_exp, 0).value == pytest.approx(sin_exp.f_norm, rel=1e-15)

    def test_unit_vector(self):
        t = table(3.0)
        exp = fourier_coefficients(functions.orthopoly_function(t, 3), t, 10)
        for n in range(4):
            assert distance(exp, n).value == pytest.approx(1.0, abs=1e-10)
        for n in range(4, 12):
            d = distance(exp, n)
            assert d.value == 0.0 and d.below_floor

    def test_subtraction_vs_tail_form(self, sin_exp):
        checked = 0
        for n in range(sin_exp.N + 2):
            d = distance(sin_exp, n)
            if d.below_floor:
                continue
            checked += 1
            assert abs(d.value - tail_distance(sin_exp, n)) <= 1e-7 * d.value
        assert checked >= 10

    def test_naive_form_agrees_far_above_floor(self, sin_exp):
        for n in range(6):
            assert distance(sin_exp, n, "naive").value == pytest.approx(distance(sin_exp, n).value, rel=1e-9)

    def test_indexings(self, sin_exp):
        for n in range(sin_exp.N + 1):
            assert distance_to_degree(sin_exp, n) == distance(sin_exp, n + 1)

    def test_range_checks(self, sin_exp):
        with pytest.raises(InvalidArgument):
            distance(sin_exp, sin_exp.N + 2)
        with pytest.raises(InvalidArgument):
            distance_to_degree(sin_exp, sin_exp.N + 1)
        with pytest.raises(InvalidArgument):
            distance(sin_exp, 2, form="magic")

    @pytest.mark.parametrize("name", ["sin", "abs", "sign", "bump", "abs3", "exp_half_sq"])
    def test_parseval_and_monotone(self, name):
        f = functions.get(name)
        exp = fourier_coefficients(f, table(2.0), 40)
        d = distances(exp)
        gap = math.fsum(exp.coeffs**2) + d[-1].raw ** 2 - exp.f_norm_sq
        assert abs(gap) <= 1e-9 * exp.f_norm_sq
        vals = np.array([x.value for x in d])
        assert np.all(np.diff(vals) <= 0)
        live = [x.value for x in d if not x.below_floor]
        # strictly decreasing where a nonzero coefficient is removed
        for n in range(len(live) - 1):
            if abs(exp.coeffs[n]) > 1e-6 * exp.f_norm:
                assert live[n + 1] < live[n]

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_projection_optimality(self, seed):
        f = functions.absolute()
        t = table(2.0)
        exp = fourier_coefficients(f, t, 30)
        for n in (1, 5, 12):
            assert expansion.projection_gap(f, t, exp, n, trials=10, seed=seed) >= -1e-9

    def test_projection_optimality_oracle(self):
        # perturbed projections measured with QUADPACK, outside the package's quadrature
        f = functions.cosine()
        t = table(3.0)
        exp = fourier_coefficients(f, t, 10)
        rng = np.random.default_rng(5)
        d = distance(exp, 4).value
        for _ in range(3):
            c = exp.coeffs[:4] + 1e-2 * rng.standard_normal(4)
            sq = oracles.weighted_integral(
                lambda x: (math.cos(x) - c @ orthopoly.eval_polys(t, x, 3)) ** 2, 3.0
            )
            assert math.sqrt(sq) >= d - 1e-9


class TestSeminorms:
    def test_constant_basis_function(self):
        # only the n = 0 row is nonzero, and it carries 0**k: q_0 = 1, q_k = 0 for k >= 1
        t = table(3.0)
        exp = fourier_coefficients(functions.orthopoly_function(t, 0), t, 10)
        s = seminorms(exp, 5)
        assert s.values[0] == pytest.approx(1.0, abs=1e-10) and s.argmax[0] == 0
        np.testing.assert_array_equal(s.values[1:], 0.0)

    def test_synthetic_bruteforce(self):
        a = 2.0 ** -np.arange(201)
        exp = Expansion(2.0, a, float(np.sum(a**2)))
        s = seminorms(exp, 3)
        for k in range(4):
            best = 0.0
            for n in range(202):
                d = math.sqrt(math.fsum((a[n:] ** 2).tolist()))
                d = d if d >= 1e-8 * math.sqrt(np.sum(a**2)) else 0.0
                best = max(best, (n**k if n or k else 1) * d)
            assert s.values[k] == pytest.approx(best, rel=1e-9)

    @pytest.mark.parametrize("N", [40, 80])
    def test_abs_sup_not_attained(self, N):
        exp = fourier_coefficients(functions.absolute(), table(2.0), N)
        s = seminorms(exp, 2)
        assert s.argmax[2] == s.N_used == N + 1

    def test_definitional_bound(self, sin_exp):
        s = seminorms(sin_exp, 4)
        d = distances(sin_exp)
        for k in range(5):
            for n, x in enumerate(d):
                assert s.values[k] >= (n**k if n or k else 1) * x.value

    def test_negative_k(self, sin_exp):
        with pytest.raises(InvalidArgument):
            seminorms(sin_exp, -1)

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=30))
    def test_seminorm_dominates_rows(self, coeffs):
        a = np.array(coeffs)
        exp = Expansion(3.0, a, float(np.sum(a**2)) * 1.5 + 1e-3)
        s = seminorms(exp, 3)
        d = distances(exp)
        for k in range(4):
            assert all(s.values[k] >= (n**k if n or k else 1) * x.value * (1 - 1e-12) for n, x in enumerate(d))


class TestReconstruct:
    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_basis_polynomial(self, alpha):
        t = table(alpha)
        p5 = functions.orthopoly_function(t, 5)
        exp = fourier_coefficients(p5, t, 12)
        x = np.linspace(-2, 2, 31)
        np.testing.assert_allclose(reconstruct(exp, t, x), p5(x), atol=1e-10)

    def test_sin_first_derivative(self, sin_exp):
        x = np.linspace(-2, 2, 201)
        assert np.max(np.abs(reconstruct(sin_exp, table(2.0, 60), x, 1) - np.cos(x))) <= 1e-6

    def test_sin_third_derivative(self, sin_exp):
        x = np.linspace(-2, 2, 201)
        assert np.max(np.abs(reconstruct(sin_exp, table(2.0, 60), x, 3) + np.cos(x))) <= 1e-4

    def test_general_alpha_derivative(self):
        t = table(3.0)
        exp = fourier_coefficients(functions.cosine(), t, 60)
        x = np.linspace(-1.5, 1.5, 61)
        assert np.max(np.abs(reconstruct(exp, t, x, 2) + np.cos(x))) <= 1e-6


class TestExports:
    def test_csv(self, sin_exp):
        text = expansion.expansion_csv(sin_exp)
        lines = text.splitlines()
        assert lines[0] == "n,a_n,d_f_Pi_n_minus_1,below_floor"
        assert len(lines) == sin_exp.N + 3
        a1 = float(lines[2].split(",")[1])
        assert a1 == sin_exp.coeffs[1]

    def test_seminorm_csv(self, sin_exp):
        lines = expansion.seminorms_csv(seminorms(sin_exp, 3)).splitlines()
        assert lines[0] == "k,q_k,argmax_n" and len(lines) == 5

    def test_report_is_json(self, sin_exp):
        rep = expansion.expansion_report(sin_exp, seminorms(sin_exp, 2))
        back = json.loads(json.dumps(rep))
        assert back["coefficients"] == [float(a) for a in sin_exp.coeffs]
        assert back["distance_indexing"].startswith("d(f, Pi_{n-1})")
        assert back["thresholds"]["distance_floor_rel"] == 1e-8
