import math
import random
from fractions import Fraction

import numpy as np
import pytest

from rsq.clifford import Multivector
from rsq.integrate import (ball_monomial, ball_rule, cap_boundary_rule, cap_rule,
                           inner_product, integrate_ball_poly, integrate_sphere_poly,
                           kahan_sum_floats, rule_from_config, sphere_monomial,
                           sphere_monomial_full, sphere_rule, surface_quadrature)
from rsq.polynomials import MultiPoly, peval, pmul
from rsq.scalars import PiRat, omega_exact, omega_float
from rsq.spaces import monogenic_basis


def gamma_moment_oracle(n, alpha):
    """Sphere moment via the Gamma-function formula (float)."""
    if any(a % 2 for a in alpha):
        return 0.0
    num = 2.0
    for a in alpha:
        num *= math.gamma((a + 1) / 2.0)
    return num / math.gamma((len(alpha) + sum(a for a in alpha)) / 2.0) * math.pi ** 0 \
        if False else 2.0 * math.prod(math.gamma((a + 1) / 2) for a in alpha) \
        / math.gamma((n + sum(alpha)) / 2) * math.pi ** ((n - len(alpha)) / 2)


def test_sphere_monomial_against_gamma_formula():
    rng = random.Random(0)
    for n in (3, 4, 5):
        for _ in range(25):
            alpha = tuple(rng.randint(0, 4) for _ in range(n))
            exact = float(omega_exact(n) * sphere_monomial(n, alpha))
            oracle = 2.0 * math.prod(math.gamma((a + 1) / 2) for a in alpha) \
                / math.gamma((n + sum(alpha)) / 2) if not any(a % 2 for a in alpha) else 0.0
            assert abs(exact - oracle) <= 1e-12 * max(1.0, abs(oracle))


def test_sphere_monomial_examples():
    assert sphere_monomial(3, (2, 0, 0)) == Fraction(1, 3)
    assert float(sphere_monomial_full(3, (2, 0, 0))) == pytest.approx(4 * math.pi / 3)
    assert sphere_monomial(3, (1, 2, 0)) == 0
    assert sphere_monomial(4, (0, 0, 0, 0)) == 1
    assert sphere_monomial(3, (4, 0, 0)) == Fraction(1, 5)
    assert sphere_monomial(3, (2, 2, 0)) == Fraction(1, 15)


def test_sphere_monomial_monte_carlo():
    rng = np.random.default_rng(42)
    pts = rng.normal(size=(200_000, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    mc = float(np.mean(pts[:, 0] ** 2 * pts[:, 1] ** 2))
    assert abs(mc - float(sphere_monomial(3, (2, 2, 0)))) < 5e-4


def test_ball_monomial_examples():
    assert float(ball_monomial(3, (0, 0, 0), 1)) == pytest.approx(4 * math.pi / 3)
    assert ball_monomial(3, (1, 0, 0), 1) == PiRat()
    assert float(ball_monomial(3, (2, 0, 0), 1)) == pytest.approx(4 * math.pi / 15)
    # d/dR of the ball integral equals the sphere integral at radius R
    for n in (3, 4):
        for alpha in ((2, 0, 0, 0)[:n], (0, 2, 2, 0)[:n]):
            R = Fraction(3, 2)
            h = Fraction(1, 10 ** 6)
            dball = (ball_monomial(n, alpha, R + h) - ball_monomial(n, alpha, R - h)) / (2 * h)
            sphere_at_R = omega_exact(n) * (sphere_monomial(n, alpha)
                                            * R ** (n - 1 + sum(alpha)))
            assert abs(float(dball) - float(sphere_at_R)) < 1e-6


def test_inner_product_total_measure_and_bilinearity():
    n = 3
    one = MultiPoly.const(n, (("u", n),), 1)
    assert inner_product(one, one) == Multivector.scalar(n, omega_exact(n))
    # bilinearity and the right-module property
    from rsq.clifford import gp
    basis = monogenic_basis(n, 2).elements
    lam = Multivector.from_vector(n, [1, -2, 3])
    P, Q = basis[0], basis[1]
    lhs = inner_product(P, Q.mul_right(lam))
    rhs = gp(inner_product(P, Q), lam)
    assert lhs == rhs


def test_inner_product_orthogonality_monogenic_vs_embedded():
    # (g(u) u, f1(u))_u = 0 for g right monogenic deg k-1, f1 left monogenic deg k
    from rsq.spaces import vector_embed_right
    for n in (3, 4):
        for k in (1, 2):
            rights = monogenic_basis(n, k - 1, "monogenic_right").elements
            lefts = monogenic_basis(n, k).elements
            for g in rights:
                gu = vector_embed_right(g, "u")
                for f1 in lefts:
                    got = inner_product(gu, f1)
                    assert got.is_zero()


def test_sphere_rule_total_and_moments():
    for n, orders in ((3, (32, 64)), (4, (24, 24, 48)), (5, (16, 16, 16, 32))):
        rule = sphere_rule(n, orders=orders)
        rule.check()
        total = kahan_sum_floats(rule.weights)
        assert abs(total - omega_float(n)) < 1e-10 * omega_float(n)
        got = kahan_sum_floats(rule.weights * rule.nodes[:, 0] ** 2)
        want = omega_float(n) * float(sphere_monomial(n, (2,) + (0,) * (n - 1)))
        assert abs(got - want) < 1e-10 * want
        assert np.max(np.abs(np.linalg.norm(rule.nodes, axis=1) - 1.0)) < 1e-12


def test_numeric_matches_exact_on_polynomials():
    n = 3
    blocks = (("x", 3),)
    x1 = MultiPoly.variable(n, blocks, "x", 1)
    x2 = MultiPoly.variable(n, blocks, "x", 2)
    p = pmul(pmul(x1, x1), pmul(x2, x2)) + x1.mul_left(Multivector.basis_vector(n, 2))
    rule = sphere_rule(3, orders=(24, 48))
    got = surface_quadrature(rule, lambda x: peval(p, {"x": x}).to_float())
    want = integrate_sphere_poly(p, "x", exact=True)
    want_f = want.map_coeffs(lambda c: float(c)) if isinstance(want, Multivector) else want
    assert got.approx_eq(want.to_float() if isinstance(want, Multivector)
                         else want_f, 1e-10)


def test_ball_rule_volume_and_moment():
    rule = ball_rule(3, R=1.0, orders=(16, 24, 48))
    rule.check()
    got = kahan_sum_floats(rule.weights * rule.nodes[:, 0] ** 2)
    assert abs(got - 4 * math.pi / 15) < 1e-10


def test_ball_rule_handles_one_minus_n_homogeneous():
    # integrand |x|^{1-n} is integrable; the centered rule resolves it
    rule = ball_rule(3, R=1.0, orders=(16, 24, 48))
    vals = np.linalg.norm(rule.nodes, axis=1) ** (1 - 3)
    got = kahan_sum_floats(rule.weights * vals)
    # closed form: volume integral of |x|^{-2} over B(0,1) = omega_3
    assert abs(got - omega_float(3)) < 1e-10 * omega_float(3)


def test_cap_rule_measures():
    theta0 = math.pi / 3
    cap = cap_rule(3, (0, 0, 0, 1), theta0, orders=(24, 24, 48))
    cap.check()
    want = omega_float(3) * (theta0 / 2 - math.sin(2 * theta0) / 4)
    assert abs(kahan_sum_floats(cap.weights) - want) < 1e-10 * want
    bnd = cap_boundary_rule(3, (0, 0, 0, 1), theta0, orders=(24, 48))
    bnd.check()
    want_b = omega_float(3) * math.sin(theta0) ** 2
    assert abs(kahan_sum_floats(bnd.weights) - want_b) < 1e-10 * want_b
    # nodes on the sphere, normals tangent and unit
    assert np.max(np.abs(np.linalg.norm(cap.nodes, axis=1) - 1)) < 1e-12
    assert np.max(np.abs(np.linalg.norm(bnd.nodes, axis=1) - 1)) < 1e-12
    assert np.max(np.abs(np.einsum("ij,ij->i", bnd.normals, bnd.nodes))) < 1e-12
    assert np.max(np.abs(np.linalg.norm(bnd.normals, axis=1) - 1)) < 1e-12


def test_refinement_improves_smooth_rational_integrand():
    y = np.array([0.0, 0.0, 2.0])

    def f(x):
        return Multivector.scalar(3, 1.0 / np.linalg.norm(x - y) ** 3)

    coarse = surface_quadrature(sphere_rule(3, orders=(8, 16)), f)
    fine = surface_quadrature(sphere_rule(3, orders=(16, 32)), f)
    ref = surface_quadrature(sphere_rule(3, orders=(48, 96)), f)
    err_c = abs(coarse.scalar_part() - ref.scalar_part())
    err_f = abs(fine.scalar_part() - ref.scalar_part())
    assert err_f * 10 <= err_c


def test_rule_from_config():
    rule = rule_from_config({"surface": "sphere", "n": 3, "R": 2.0,
                             "center": [1, 0, 0], "orders": [8, 16]})
    assert rule.surface == "sphere"
    assert abs(kahan_sum_floats(rule.weights) - omega_float(3) * 4) < 1e-10 * omega_float(3) * 4


def test_quadrature_flags_nonfinite():
    rule = sphere_rule(3, orders=(4, 8))

    def f(x):
        return Multivector.scalar(3, 1.0 / x[0]) if abs(x[0]) < 0.2 else Multivector.scalar(3, 0.0)

    val, flagged = surface_quadrature(
        rule, lambda x: Multivector.scalar(3, float("nan")) if abs(x[0]) < 0.05
        else Multivector.scalar(3, 1.0), return_flagged=True)
    assert isinstance(flagged, list)
