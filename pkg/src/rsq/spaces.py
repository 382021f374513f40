"""Bases of harmonic and monogenic polynomial spaces and the projections.

Monogenic bases are the symmetrized Fueter products built from the
variables z_i = u_i + u_1 e_1 e_i, one basis element per multiset of
size k from {2..n}.  The Almansi-Fischer split h = p_k + u p_{k-1}
follows the eigenvalue identity D(u q) = (-N - 2k + 2) q on a block of
arity N, which also yields the projections P_k and I - P_k in closed
form.  Right-handed versions mirror the left throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .clifford import Multivector, gp
from .polynomials import (MultiPoly, block_degree, dirac, homogeneous_components,
                          is_homogeneous, laplacian, pmul, vector_embed)


@dataclass(frozen=True)
class SpaceBasis:
    n: int
    k: int
    kind: str  # harmonic_scalar | monogenic_left | monogenic_right
    block: str
    dim: int
    elements: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.elements)


def fueter_variable(dim: int, blocks, block: str, i: int) -> MultiPoly:
    """z_i = u_i + u_1 e_1 e_i for i in {2..arity}."""
    e1ei = gp(Multivector.basis_vector(dim, 1), Multivector.basis_vector(dim, i))
    return (MultiPoly.variable(dim, blocks, block, i)
            + MultiPoly.variable(dim, blocks, block, 1, e1ei))


def fueter_polynomial(dim: int, blocks, block: str, sigma) -> MultiPoly:
    """Symmetrized product of Fueter variables over the multiset sigma."""
    sigma = tuple(sigma)
    if not sigma:
        return MultiPoly.const(dim, blocks, 1)
    orderings = sorted(set(itertools.permutations(sigma)))
    total = MultiPoly.zero(dim, blocks)
    for order in orderings:
        prod = fueter_variable(dim, blocks, block, order[0])
        for i in order[1:]:
            prod = pmul(prod, fueter_variable(dim, blocks, block, i))
        total = total + prod
    return total * Fraction(1, len(orderings))


def multisets(n: int, k: int):
    """Multisets of size k from {2..n}, as sorted tuples."""
    return list(itertools.combinations_with_replacement(range(2, n + 1), k))


@lru_cache(maxsize=None)
def monogenic_basis(n: int, k: int, kind: str = "monogenic_left",
                    block: str = "u", dim: int | None = None) -> SpaceBasis:
    """Fueter basis of left (or right) monogenics, degree k, C(n+k-2, k) many."""
    if n < 3:
        raise ValueError("n >= 3 required")
    if k < 0:
        raise ValueError("k >= 0 required")
    dim = n if dim is None else dim
    blocks = ((block, n),)
    elems = []
    for sigma in multisets(n, k):
        p = fueter_polynomial(dim, blocks, block, sigma)
        if kind == "monogenic_right":
            p = p.conj_coeffs()
        elems.append(p)
    if kind not in ("monogenic_left", "monogenic_right"):
        raise ValueError(f"unknown kind {kind!r}")
    assert len(elems) == comb(n + k - 2, k)
    return SpaceBasis(n=n, k=k, kind=kind, block=block, dim=dim, elements=tuple(elems))


def monomial_exponents(n: int, k: int):
    """All exponent tuples of total degree k in n variables."""
    if n == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        for rest in monomial_exponents(n - 1, k - first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def harmonic_scalar_basis(n: int, k: int, block: str = "u",
                          dim: int | None = None) -> SpaceBasis:
    """Exact basis of scalar harmonics of degree k via the nullspace of Delta."""
    dim = n if dim is None else dim
    blocks = ((block, n),)
    monos = monomial_exponents(n, k)
    if k < 2:
        elems = [MultiPoly(dim, blocks, {e: Multivector.scalar(dim, 1)}) for e in monos]
        return SpaceBasis(n, k, "harmonic_scalar", block, dim, tuple(elems))
    lower = {e: i for i, e in enumerate(monomial_exponents(n, k - 2))}
    rows = len(lower)
    cols = len(monos)
    mat = [[Fraction(0)] * cols for _ in range(rows)]
    for c, e in enumerate(monos):
        for j in range(n):
            if e[j] >= 2:
                tgt = list(e)
                tgt[j] -= 2
                mat[lower[tuple(tgt)]][c] += e[j] * (e[j] - 1)
    basis_vecs = _nullspace_fraction(mat, cols)
    elems = []
    for vec in basis_vecs:
        terms = {}
        for c, coeff in enumerate(vec):
            if coeff:
                terms[monos[c]] = Multivector.scalar(dim, coeff)
        elems.append(MultiPoly(dim, blocks, terms))
    return SpaceBasis(n, k, "harmonic_scalar", block, dim, tuple(elems))


def _nullspace_fraction(mat, cols):
    """Exact nullspace basis of a Fraction matrix (row-reduction)."""
    m = [row[:] for row in mat]
    rows = len(m)
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * cols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def radius_sq(dim: int, blocks, block: str) -> MultiPoly:
    out = MultiPoly.zero(dim, blocks)
    for j in range(1, dict(blocks)[block] + 1):
        xj = MultiPoly.variable(dim, blocks, block, j)
        out = out + pmul(xj, xj)
    return out


def harmonic_decomposition(p: MultiPoly, block: str) -> dict[int, MultiPoly]:
    """Write homogeneous p as sum_j |u|^{2j} h_j with h_j harmonic."""
    if p.is_zero():
        return {}
    if not is_homogeneous(p, block):
        raise ValueError("homogeneous input required")
    d = block_degree(p, block)
    N = p.block_arity(block)
    lap = laplacian(p, block)
    if lap.is_zero():
        return {0: p}
    sub = harmonic_decomposition(lap, block)
    r2 = radius_sq(p.dim, p.blocks, block)
    out = {}
    acc = MultiPoly.zero(p.dim, p.blocks)
    for j, g in sub.items():
        jj = j + 1
        m = d - 2 * jj
        c = 2 * jj * (2 * m + N + 2 * jj - 2)
        hj = g * Fraction(1, c)
        out[jj] = hj
        pw = hj
        for _ in range(jj):
            pw = pmul(r2, pw)
        acc = acc + pw
    h0 = p - acc
    if not h0.is_zero():
        out[0] = h0
    return out


def harmonic_part(p: MultiPoly, block: str) -> MultiPoly:
    return harmonic_decomposition(p, block).get(0, MultiPoly.zero(p.dim, p.blocks))


def sphere_representative(p: MultiPoly, block: str) -> MultiPoly:
    """Canonical polynomial equal to p on |u| = 1 (sets |u|^2 -> 1 per degree)."""
    out = MultiPoly.zero(p.dim, p.blocks)
    for _, comp in homogeneous_components(p, block).items():
        for _, h in harmonic_decomposition(comp, block).items():
            out = out + h
    return out


def _check_harmonic(h: MultiPoly, block: str, tol: float):
    lap = laplacian(h, block)
    if tol == 0.0:
        if not lap.is_zero():
            raise ValueError(f"input not harmonic in {block!r}; residual {lap!r}")
    else:
        from .polynomials import fro_norm
        scale = max(fro_norm(h), 1.0)
        if fro_norm(lap) > tol * scale:
            raise ValueError(
                f"input not harmonic in {block!r}; residual norm {fro_norm(lap)}")


def almansi_fischer(h: MultiPoly, block: str = "u", tol: float = 0.0):
    """Split harmonic homogeneous h of degree k as (p_k, p_{k-1}), h = p_k + u p_{k-1}."""
    _check_harmonic(h, block, tol)
    if h.is_zero():
        return h, h
    if not is_homogeneous(h, block):
        raise ValueError("homogeneous input required")
    k = block_degree(h, block)
    if k == 0:
        return h, MultiPoly.zero(h.dim, h.blocks)
    N = h.block_arity(block)
    denom = -N - 2 * k + 2
    p_km1 = dirac(h, block) * Fraction(1, denom)
    p_k = h - vector_embed(p_km1, block)
    return p_k, p_km1


def vector_embed_right(p: MultiPoly, block: str) -> MultiPoly:
    """Right-multiply by the vector variable: p (sum_j x_j e_j)."""
    off, ar = p._offset(block)
    terms = {}
    for exps, mv in p.terms.items():
        for j in range(ar):
            e = list(exps)
            e[off + j] += 1
            c = gp(mv, Multivector.basis_vector(p.dim, j + 1))
            key = tuple(e)
            prev = terms.get(key)
            terms[key] = c if prev is None else prev + c
    return MultiPoly(p.dim, p.blocks, terms)


def almansi_fischer_right(h: MultiPoly, block: str = "u", tol: float = 0.0):
    """Right-handed split h = q_k + q_{k-1} u; returns (q_k, q_{k-1})."""
    _check_harmonic(h, block, tol)
    if h.is_zero():
        return h, h
    if not is_homogeneous(h, block):
        raise ValueError("homogeneous input required")
    k = block_degree(h, block)
    if k == 0:
        return h, MultiPoly.zero(h.dim, h.blocks)
    N = h.block_arity(block)
    denom = -N - 2 * k + 2
    q_km1 = dirac(h, block, side="right") * Fraction(1, denom)
    q_k = h - vector_embed_right(q_km1, block)
    return q_k, q_km1


def project(h: MultiPoly, which: str, side: str = "left", block: str = "u",
            tol: float = 0.0) -> MultiPoly:
    """P_k (monogenic part) or I - P_k (vector-embedded part) of harmonic h.

    h may be inhomogeneous; the split is applied per homogeneous degree.
    Coefficients may involve other blocks and a larger algebra.
    """
    if which not in ("Pk", "IminusPk"):
        raise ValueError(f"which must be Pk or IminusPk, got {which!r}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    out = MultiPoly.zero(h.dim, h.blocks)
    for _, comp in homogeneous_components(h, block).items():
        if side == "left":
            p_k, p_km1 = almansi_fischer(comp, block, tol=tol)
            part = p_k if which == "Pk" else vector_embed(p_km1, block)
        else:
            q_k, q_km1 = almansi_fischer_right(comp, block, tol=tol)
            part = q_k if which == "Pk" else vector_embed_right(q_km1, block)
        out = out + part
    return out


def random_harmonic(rng, n: int, k: int, block: str = "u", dim: int | None = None,
                    cliff: bool = True) -> MultiPoly:
    """Random Cl-valued harmonic, homogeneous of degree k, exact rationals."""
    dim = n if dim is None else dim
    blocks = ((block, n),)
    terms = {}
    for e in monomial_exponents(n, k):
        c = [0] * (1 << dim)
        slots = range(1 << dim) if cliff else [0]
        for m in slots:
            if rng.random() < 0.3:
                c[m] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        mv = Multivector(dim, c)
        if not mv.is_zero():
            terms[e] = mv
    p = MultiPoly(dim, blocks, terms)
    if p.is_zero():
        p = MultiPoly(dim, blocks, {monomial_exponents(n, k)[0]: Multivector.scalar(dim, 1)})
    return harmonic_part(p, block)


# ----- rank oracles ---------------------------------------------------------

_RANK_PRIME = 2_147_483_647


def rank_mod_p(mat: np.ndarray, p: int = _RANK_PRIME) -> int:
    """Row-echelon rank over GF(p); lower-bounds the rank over Q."""
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = None
        for i in range(r, rows):
            if a[i, c]:
                piv = i
                break
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        mask = a[:, c] != 0
        mask[r] = False
        if mask.any():
            a[mask] = (a[mask] - np.outer(a[mask, c], a[r])) % p
        r += 1
    return r


def _poly_family_matrix(polys, n: int, k: int, dim: int, block: str) -> np.ndarray:
    """Integer coordinate matrix of a family of homogeneous polynomials."""
    from math import gcd

    monos = {e: i for i, e in enumerate(monomial_exponents(n, k))}
    cols = len(monos) * (1 << dim)
    rows = []
    for p in polys:
        scale = 1
        for mv in p.terms.values():
            for c in mv.coeffs:
                if isinstance(c, Fraction):
                    scale = scale * c.denominator // gcd(scale, c.denominator)
        row = [0] * cols
        for exps, mv in p.terms.items():
            i = monos[exps]
            for m, c in mv.items():
                row[i * (1 << dim) + m] = int(c * scale)
        rows.append(row)
    return np.array(rows, dtype=np.int64)


def dirac_constraint_matrix(n: int, k: int, dim: int) -> np.ndarray:
    """Matrix of D on Cl_dim-valued degree-k polynomials (integer entries)."""
    monos_k = monomial_exponents(n, k)
    monos_km1 = {e: i for i, e in enumerate(monomial_exponents(n, k - 1))}
    size = 1 << dim
    from .clifford import _sign_table
    table = _sign_table(dim)
    rows = len(monos_km1) * size
    cols = len(monos_k) * size
    mat = np.zeros((rows, cols), dtype=np.int64)
    for ci, e in enumerate(monos_k):
        for j in range(n):
            if not e[j]:
                continue
            tgt = list(e)
            tgt[j] -= 1
            ri = monos_km1[tuple(tgt)]
            ej_mask = 1 << j
            for m in range(size):
                # e_j * blade_m contributes to blade ej_mask ^ m
                s = table[ej_mask][m] * e[j]
                mat[ri * size + (ej_mask ^ m), ci * size + m] += s
    return mat


def laplace_constraint_matrix(n: int, k: int) -> np.ndarray:
    monos_k = monomial_exponents(n, k)
    monos_km2 = {e: i for i, e in enumerate(monomial_exponents(n, k - 2))}
    mat = np.zeros((len(monos_km2), len(monos_k)), dtype=np.int64)
    for ci, e in enumerate(monos_k):
        for j in range(n):
            if e[j] >= 2:
                tgt = list(e)
                tgt[j] -= 2
                mat[monos_km2[tuple(tgt)], ci] += e[j] * (e[j] - 1)
    return mat


def certified_dims(n: int, k: int) -> dict:
    """Certified dimensions of M_k, u M_{k-1} and H_k over Cl_n.

    Upper bounds come from mod-p nullity of the constraint systems, lower
    bounds from exhibited exact kernel families; the two must agree.
    """
    dim = n
    size = 1 << dim
    monos = comb(n + k - 1, k)

    # harmonic side
    nullity_delta = (monos - (rank_mod_p(laplace_constraint_matrix(n, k)) if k >= 2 else 0))
    dim_Hk_upper = size * nullity_delta

    # monogenic side
    if k >= 1:
        rank_D = rank_mod_p(dirac_constraint_matrix(n, k, dim))
        nullity_D = monos * size - rank_D
    else:
        nullity_D = size
    # exhibited families
    left = monogenic_basis(n, k).elements
    fam_mono = []
    for p in left:
        for m in range(size):
            fam_mono.append(p.mul_right(Multivector.blade(dim, m)))
    rank_mono = rank_mod_p(_poly_family_matrix(fam_mono, n, k, dim, "u"))
    if rank_mono != len(fam_mono) or nullity_D != rank_mono:
        raise AssertionError(
            f"monogenic dimension mismatch: nullity {nullity_D}, exhibited {rank_mono}")

    fam_h = list(fam_mono)
    if k >= 1:
        for p in monogenic_basis(n, k - 1).elements:
            emb = vector_embed(p, "u")
            for m in range(size):
                fam_h.append(emb.mul_right(Multivector.blade(dim, m)))
    rank_h = rank_mod_p(_poly_family_matrix(fam_h, n, k, dim, "u"))
    if rank_h != len(fam_h) or rank_h != dim_Hk_upper:
        raise AssertionError(
            f"Almansi-Fischer dimension mismatch: harmonics {dim_Hk_upper}, "
            f"exhibited {rank_h} of {len(fam_h)}")
    return {
        "dim_Mk": nullity_D,
        "dim_uMkm1": size * comb(n + k - 3, k - 1) if k >= 1 else 0,
        "dim_Hk": dim_Hk_upper,
        "identity": dim_Hk_upper == size * (comb(n + k - 2, k)
                                            + (comb(n + k - 3, k - 1) if k >= 1 else 0)),
    }
