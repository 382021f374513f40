import random
from fractions import Fraction
from math import comb

import pytest

from rsq.clifford import Multivector, gp
from rsq.polynomials import (MultiPoly, block_degree, dirac, gamma, is_homogeneous,
                             laplacian, pmul, vector_embed)
from rsq.spaces import (almansi_fischer, almansi_fischer_right, certified_dims,
                        harmonic_decomposition, harmonic_part, harmonic_scalar_basis,
                        monogenic_basis, project, radius_sq, random_harmonic,
                        sphere_representative, vector_embed_right)

U3 = (("u", 3),)


def test_monogenic_basis_counts_and_kernel():
    for n in (3, 4, 5):
        for k in range(4):
            basis = monogenic_basis(n, k)
            assert len(basis) == comb(n + k - 2, k)
            for p in basis.elements:
                assert is_homogeneous(p, "u", k)
                assert dirac(p, "u").is_zero()


def test_monogenic_basis_k0_and_k1():
    b0 = monogenic_basis(3, 0)
    assert list(b0.elements) == [MultiPoly.const(3, U3, 1)]
    b1 = monogenic_basis(3, 1)
    assert len(b1) == 2
    # u_i + u_1 e_1 e_i  (== u_i - u_1 e_1^{-1} e_i)
    for p, i in zip(b1.elements, (2, 3)):
        e1ei = gp(Multivector.basis_vector(3, 1), Multivector.basis_vector(3, i))
        want = (MultiPoly.variable(3, U3, "u", i)
                + MultiPoly.variable(3, U3, "u", 1, e1ei))
        assert p == want


def test_right_basis_kernel():
    for n in (3, 4):
        for k in (1, 2):
            for p in monogenic_basis(n, k, "monogenic_right").elements:
                assert dirac(p, "u", side="right").is_zero()


def test_harmonic_scalar_basis():
    for n in (3, 4):
        for k in range(4):
            basis = harmonic_scalar_basis(n, k)
            want = comb(n + k - 1, k) - (comb(n + k - 3, k - 2) if k >= 2 else 0)
            assert len(basis) == want
            for h in basis.elements:
                assert laplacian(h, "u").is_zero()


def test_harmonic_decomposition_reconstructs():
    rng = random.Random(1)
    for n in (3, 4):
        for k in (2, 3, 4):
            blocks = (("u", n),)
            terms = {}
            from rsq.spaces import monomial_exponents
            for e in monomial_exponents(n, k):
                if rng.random() < 0.5:
                    terms[e] = Multivector.scalar(n, Fraction(rng.randint(-4, 4)))
            p = MultiPoly(n, blocks, terms)
            if p.is_zero():
                continue
            dec = harmonic_decomposition(p, "u")
            r2 = radius_sq(n, blocks, "u")
            acc = MultiPoly.zero(n, blocks)
            for j, h in dec.items():
                assert laplacian(h, "u").is_zero()
                pw = h
                for _ in range(j):
                    pw = pmul(r2, pw)
                acc = acc + pw
            assert acc == p


def test_almansi_fischer_frozen_example():
    # h = u_1, n = 3: p_0 = -e_1/3, p_1 = (2/3)u_1 + (1/3)(u_2 e_2 e_1 + u_3 e_3 e_1)
    h = MultiPoly.variable(3, U3, "u", 1)
    p1, p0 = almansi_fischer(h, "u")
    assert p0 == MultiPoly.const(3, U3, Multivector.basis_vector(3, 1) * Fraction(-1, 3))
    e21 = gp(Multivector.basis_vector(3, 2), Multivector.basis_vector(3, 1))
    e31 = gp(Multivector.basis_vector(3, 3), Multivector.basis_vector(3, 1))
    want = (MultiPoly.variable(3, U3, "u", 1, Fraction(2, 3))
            + MultiPoly.variable(3, U3, "u", 2, e21 * Fraction(1, 3))
            + MultiPoly.variable(3, U3, "u", 3, e31 * Fraction(1, 3)))
    assert p1 == want
    assert dirac(p1, "u").is_zero()
    assert h == p1 + vector_embed(p0, "u")


def test_almansi_fischer_on_monogenic_and_embedded():
    rng = random.Random(2)
    for n in (3, 4):
        for k in (1, 2, 3):
            basis = monogenic_basis(n, k)
            p = basis.elements[rng.randrange(len(basis))]
            pk, pkm1 = almansi_fischer(p, "u")
            assert pk == p and pkm1.is_zero()
            g = monogenic_basis(n, k - 1).elements[0]
            ug = vector_embed(g, "u")
            pk, pkm1 = almansi_fischer(ug, "u")
            assert pk.is_zero() and pkm1 == g


def test_almansi_fischer_random_exact():
    rng = random.Random(3)
    for n in (3, 4, 5):
        for k in (1, 2, 3):
            h = random_harmonic(rng, n, k)
            pk, pkm1 = almansi_fischer(h, "u")
            assert dirac(pk, "u").is_zero()
            assert dirac(pkm1, "u").is_zero()
            assert h == pk + vector_embed(pkm1, "u")


def test_almansi_fischer_rejects_non_harmonic():
    u1 = MultiPoly.variable(3, U3, "u", 1)
    bad = pmul(u1, u1)
    with pytest.raises(ValueError):
        almansi_fischer(bad, "u")


def test_project_frozen_example():
    # (I - P_1)(e_1 u) = -(1/3) u e_1 for n = 3
    e1 = Multivector.basis_vector(3, 1)
    h = MultiPoly.vector(3, U3, "u").mul_left(e1)
    got = project(h, "IminusPk")
    want = MultiPoly.vector(3, U3, "u").mul_right(e1) * Fraction(-1, 3)
    assert got == want


def test_projections_idempotent_and_complementary():
    rng = random.Random(4)
    for n in (3, 4):
        for k in (1, 2, 3):
            for side in ("left", "right"):
                h = random_harmonic(rng, n, k)
                pk = project(h, "Pk", side)
                qk = project(h, "IminusPk", side)
                assert pk + qk == h
                assert project(pk, "Pk", side) == pk
                assert project(qk, "IminusPk", side) == qk
                assert project(pk, "IminusPk", side).is_zero()
                assert project(qk, "Pk", side).is_zero()


def test_right_split_mirrors_left_by_conjugation():
    rng = random.Random(5)
    for n in (3, 4):
        h = random_harmonic(rng, n, 2)
        qk, qkm1 = almansi_fischer_right(h.conj_coeffs(), "u")
        pk, pkm1 = almansi_fischer(h, "u")
        assert qk == pk.conj_coeffs()
        assert vector_embed_right(qkm1, "u") == vector_embed(pkm1, "u").conj_coeffs()


def test_gamma_eigenvalues_on_basis():
    # Gamma p_k = k p_k ; Gamma(u q_{k-1}) = (2 - n - k) u q_{k-1}
    for n in (3, 4):
        for k in (1, 2, 3):
            for p in monogenic_basis(n, k).elements:
                assert gamma(p, "u") == p * k
            for q in monogenic_basis(n, k - 1).elements:
                uq = vector_embed(q, "u")
                assert gamma(uq, "u") == uq * (2 - n - k)


def test_sphere_representative():
    blocks = (("u", 3),)
    r2 = radius_sq(3, blocks, "u")
    p = pmul(r2, MultiPoly.variable(3, blocks, "u", 1))
    rep = sphere_representative(p, "u")
    assert rep == MultiPoly.variable(3, blocks, "u", 1)


def test_certified_dims():
    for n in (3, 4, 5):
        for k in (1, 2, 3):
            info = certified_dims(n, k)
            assert info["identity"]
            assert info["dim_Hk"] == (1 << n) * (comb(n + k - 2, k) + comb(n + k - 3, k - 1))
