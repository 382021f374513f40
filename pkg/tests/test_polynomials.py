import random
from fractions import Fraction

import pytest

from rsq.clifford import Multivector, PinElement, reflect_matrix
from rsq.polynomials import (MultiPoly, block_degree, dirac, euler, fro_norm, gamma,
                             homogeneous_components, is_homogeneous, laplacian, peval,
                             pmul, poly_from_json, poly_to_json, shift_block,
                             subs_linear, vector_embed)


def rand_poly(rng, dim, blocks, deg=2, nterms=5):
    terms = {}
    nvars = sum(a for _, a in blocks)
    for _ in range(nterms):
        exps = [0] * nvars
        for _ in range(rng.randint(0, deg)):
            exps[rng.randrange(nvars)] += 1
        c = [0] * (1 << dim)
        c[rng.randrange(1 << dim)] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        terms[tuple(exps)] = Multivector(dim, c)
    return MultiPoly(dim, blocks, terms)


U3 = (("u", 3),)


def test_pmul_examples():
    dim = 3
    u1e1 = MultiPoly.variable(dim, U3, "u", 1, Multivector.basis_vector(dim, 1))
    sq = pmul(u1e1, u1e1)
    assert sq == MultiPoly.variable(dim, U3, "u", 1, -1) * 0 - pmul(
        MultiPoly.variable(dim, U3, "u", 1), MultiPoly.variable(dim, U3, "u", 1))
    c1 = MultiPoly.const(dim, U3, Multivector.basis_vector(dim, 1))
    c2 = MultiPoly.const(dim, U3, Multivector.basis_vector(dim, 2))
    assert pmul(c1, c2) == -pmul(c2, c1)
    p = rand_poly(random.Random(0), dim, U3)
    assert pmul(p, MultiPoly.const(dim, U3, 1)) == p


def test_dirac_examples():
    dim = 3
    u = MultiPoly.vector(dim, U3, "u")
    assert dirac(u, "u") == MultiPoly.const(dim, U3, -3)
    u1 = MultiPoly.variable(dim, U3, "u", 1)
    assert dirac(u1, "u") == MultiPoly.const(dim, U3, Multivector.basis_vector(dim, 1))
    u1sq = pmul(u1, u1)
    assert dirac(dirac(u1sq, "u"), "u") == MultiPoly.const(dim, U3, -2)
    assert -laplacian(u1sq, "u") == MultiPoly.const(dim, U3, -2)


def test_dirac_squared_is_minus_laplacian():
    rng = random.Random(3)
    for _ in range(100):
        p = rand_poly(rng, 3, (("x", 3), ("u", 3)), deg=3)
        for blk in ("x", "u"):
            assert dirac(dirac(p, blk), blk) == -laplacian(p, blk)


def test_right_dirac_conjugation_duality():
    # conjugating coefficients swaps left and right Dirac kernels
    rng = random.Random(4)
    for _ in range(40):
        p = rand_poly(rng, 3, U3, deg=3)
        lhs = dirac(p, "u", "left").conj_coeffs()
        rhs = dirac(p.conj_coeffs(), "u", "right")
        assert lhs == -rhs


def test_euler_examples():
    dim = 3
    u1 = MultiPoly.variable(dim, U3, "u", 1)
    u2 = MultiPoly.variable(dim, U3, "u", 2)
    u1sq = pmul(u1, u1)
    assert euler(u1sq, "u") == u1sq * 2
    assert euler(MultiPoly.const(dim, U3, 5), "u").is_zero()
    m = pmul(pmul(u1, u2), MultiPoly.const(dim, U3, Multivector.basis_vector(dim, 1)))
    assert euler(m, "u") == m * 2


W3 = (("w", 3),)


def test_gamma_explicit():
    dim = 3
    w1 = MultiPoly.variable(dim, W3, "w", 1)
    got = gamma(w1, "w")
    e12 = Multivector.blade(dim, 0b011)
    e13 = Multivector.blade(dim, 0b101)
    want = (MultiPoly.variable(dim, W3, "w", 2, -1).mul_left(e12)
            + MultiPoly.variable(dim, W3, "w", 3, -1).mul_left(e13))
    assert got == want


def test_gamma_equals_wD_plus_euler():
    rng = random.Random(5)
    for _ in range(50):
        p = rand_poly(rng, 4, (("w", 4),), deg=3)
        lhs = gamma(p, "w")
        rhs = vector_embed(dirac(p, "w"), "w") + euler(p, "w")
        assert lhs == rhs


def test_gamma_commutes_with_radius():
    # gamma annihilates |w|^2, so gamma((|w|^2 - 1) g) = (|w|^2 - 1) gamma(g)
    rng = random.Random(6)
    dim = 3
    r2 = MultiPoly.zero(dim, W3)
    for j in range(1, 4):
        wj = MultiPoly.variable(dim, W3, "w", j)
        r2 = r2 + pmul(wj, wj)
    r2m1 = r2 - MultiPoly.const(dim, W3, 1)
    for _ in range(20):
        g = rand_poly(rng, dim, W3, deg=2)
        assert gamma(pmul(r2m1, g), "w") == pmul(r2m1, gamma(g, "w"))


def test_eval_and_trivial_extension():
    dim = 3
    u1 = MultiPoly.variable(dim, U3, "u", 1)
    u1sq = pmul(u1, u1)
    assert peval(u1sq, {"u": (2, 0, 0)}) == Multivector.scalar(dim, 4)
    assert peval(u1sq, {"u": (2, 0, 0, 5)}) == Multivector.scalar(dim, 4)
    with pytest.raises(ValueError):
        peval(u1sq, {"u": (2, 0)})
    p = (MultiPoly.variable(dim, U3, "u", 1, Multivector.basis_vector(dim, 1))
         + MultiPoly.variable(dim, U3, "u", 2, Multivector.basis_vector(dim, 2)))
    got = peval(p, {"u": (1, 1, 0)})
    assert got == Multivector.basis_vector(dim, 1) + Multivector.basis_vector(dim, 2)


def test_partial_eval():
    dim = 3
    blocks = (("x", 3), ("u", 3))
    x1 = MultiPoly.variable(dim, blocks, "x", 1)
    u2 = MultiPoly.variable(dim, blocks, "u", 2)
    p = pmul(x1, u2) + MultiPoly.const(dim, blocks, 1)
    q = peval(p, {"x": (3, 0, 0)})
    assert q.blocks == (("u", 3),)
    assert q == MultiPoly.variable(dim, (("u", 3),), "u", 2, 3) + MultiPoly.const(dim, (("u", 3),), 1)


def test_vector_embed_examples():
    dim = 3
    one = MultiPoly.const(dim, U3, 1)
    assert vector_embed(one, "u") == MultiPoly.vector(dim, U3, "u")
    assert vector_embed(MultiPoly.zero(dim, U3), "u").is_zero()
    # eigenvalue on a monogenic of degree 0: D(u * 1) = -n = (-n - 2k + 2), k = 1
    assert dirac(vector_embed(one, "u"), "u") == MultiPoly.const(dim, U3, -3)


def test_subs_linear_matches_eval_composition():
    rng = random.Random(7)
    dim = 4
    p = rand_poly(rng, dim, (("u", 4),), deg=3)
    a = PinElement([Multivector.from_vector(dim, [Fraction(3, 5), Fraction(4, 5), 0, 0])])
    rows_raw = reflect_matrix(a, 4, 4)
    rows = [[rows_raw[j][i] for j in range(4)] for i in range(4)]  # u_i <- sum_j R[j][i] w_j
    q = subs_linear(p, "u", rows, ("w", 4))
    for _ in range(5):
        w0 = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(4)]
        img = [sum(rows[i][j] * w0[j] for j in range(4)) for i in range(4)]
        assert peval(q, {"w": w0}) == peval(p, {"u": img})


def test_shift_block():
    rng = random.Random(8)
    dim = 3
    p = rand_poly(rng, dim, (("x", 3),), deg=3)
    t = (Fraction(1, 2), Fraction(-1, 3), 2)
    q = shift_block(p, "x", t)
    for _ in range(5):
        x0 = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)]
        assert peval(q, {"x": x0}) == peval(p, {"x": [a + b for a, b in zip(x0, t)]})


def test_homogeneity_helpers():
    dim = 3
    u1 = MultiPoly.variable(dim, U3, "u", 1)
    p = pmul(u1, u1) + u1
    assert not is_homogeneous(p, "u")
    comps = homogeneous_components(p, "u")
    assert sorted(comps) == [1, 2]
    assert comps[2] == pmul(u1, u1)
    assert block_degree(p, "u") == 2


def test_json_roundtrip():
    rng = random.Random(9)
    p = rand_poly(rng, 3, (("x", 3), ("u", 3)), deg=2)
    q = poly_from_json(poly_to_json(p))
    assert p == q
    assert fro_norm(p - q) == 0.0
