"""Reproducing kernel Z_k, fundamental solution H_k, and the sphere kernel.

Z_k is pinned by the reproducing property (Z_k(u, .), p)_v = p(u) on
spherical monogenics: writing Z_k = sum_{s,t} P_s(u) A_{st} Q_t(v) over
the Fueter basis and its conjugate, the Clifford-valued Gram system
A G = I is solved exactly (real lift, Fraction elimination).  A second
construction differentiates the Cauchy kernel G(v) = v/|v|^n and must
match the Gram kernel after one global rescale, which is reported.

H_k(x,u,v) = -1/(omega_n c_k) u (x/|x|^n) Z_{k-1}(x u x/|x|^2, v) v with
c_k = (n-2)/(n-2+2k); the sphere kernel composes it with the Cayley
geometry through the three-vector reflection a(x_s, y_s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .clifford import Multivector, PinElement, _sign_table, gp, reflect
from .conformal import VahlenMap, reflect_vector
from .integrate import inner_product
from .polynomials import MultiPoly, pmul, subs_linear
from .scalars import PiRat, omega_exact, omega_float, to_float
from .spaces import monogenic_basis, multisets, sphere_representative


@dataclass(frozen=True)
class ModelParams:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n >= 3 required (c_k degenerates below)")
        if self.k < 0:
            raise ValueError("k >= 0 required")

    @property
    def c_k(self) -> Fraction:
        return Fraction(self.n - 2, self.n - 2 + 2 * self.k)

    def omega(self, exact: bool = True):
        return omega_exact(self.n) if exact else omega_float(self.n)


# ----- Gram construction ------------------------------------------------------

def _right_mul_matrix(g: Multivector):
    """Real matrix of x -> x g on blade coordinates."""
    size = 1 << g.dim
    table = _sign_table(g.dim)
    cols = []
    for l in range(size):
        col = [Fraction(0)] * size
        for j, gj in g.items():
            col[l ^ j] = Fraction(table[l][j] * gj) if not isinstance(gj, Fraction) \
                else (gj if table[l][j] > 0 else -gj)
        cols.append(col)
    # rows[m][l] = coefficient of blade m in e_l g
    return [[cols[l][m] for l in range(size)] for m in range(size)]


def _solve_fraction(aug, ncols: int, nrhs: int):
    """Gaussian elimination over Fractions; aug is rows of len ncols+nrhs."""
    rows = len(aug)
    r = 0
    piv_cols = []
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if len(piv_cols) < ncols:
        raise ArithmeticError("singular Gram system")
    sol = [[Fraction(0)] * nrhs for _ in range(ncols)]
    for i, c in enumerate(piv_cols):
        for j in range(nrhs):
            sol[c][j] = aug[i][ncols + j]
    return sol


@lru_cache(maxsize=None)
def zonal_kernel(n: int, k: int, method: str = "gram") -> MultiPoly:
    """Reproducing kernel of degree-k spherical monogenics, exact PiRat coefficients.

    Left monogenic in u, right monogenic in v, and
    (Z_k(u, .), p)_v = p(u) exactly for every p in M_k.
    """
    if method == "gram":
        return _zonal_gram(n, k)
    if method == "formula":
        poly, _ = zonal_formula_with_factor(n, k)
        return poly
    raise ValueError(f"method must be gram or formula, got {method!r}")


def _zonal_gram(n: int, k: int) -> MultiPoly:
    lefts = [p.with_blocks((("u", n), ("v", n)))
             for p in monogenic_basis(n, k, "monogenic_left", block="u").elements]
    rights_v = [p.with_blocks((("u", n), ("v", n)))
                for p in monogenic_basis(n, k, "monogenic_right", block="v").elements]
    lefts_v = [p.with_blocks((("u", n), ("v", n)))
               for p in monogenic_basis(n, k, "monogenic_left", block="v").elements]
    N = len(lefts)
    size = 1 << n
    om = omega_exact(n)
    # Gram entries: (1/omega) * integral of Q_r(v) P_t(v) over S^{n-1}
    G = [[None] * N for _ in range(N)]
    for r in range(N):
        for t in range(N):
            val = inner_product(rights_v[r], lefts_v[t], block="v", exact=True)
            G[r][t] = val.map_coeffs(
                lambda c: (c / om).as_fraction() if isinstance(c, PiRat) else Fraction(c))
    # real lift: unknown row A_{s,.}; equations sum_r A_{sr} G[r][t] = delta_{st}
    ncols = N * size
    rmats = [[_right_mul_matrix(G[r][t]) for t in range(N)] for r in range(N)]
    aug = []
    for t in range(N):
        for m in range(size):
            row = [Fraction(0)] * (ncols + N)
            for r in range(N):
                mat = rmats[r][t]
                base = r * size
                for l in range(size):
                    row[base + l] += mat[m][l]
            for s in range(N):
                row[ncols + s] = Fraction(1) if (t == s and m == 0) else Fraction(0)
            aug.append(row)
    sol = _solve_fraction(aug, ncols, N)
    inv_om = PiRat.rational(1) / om
    out = MultiPoly.zero(n, (("u", n), ("v", n)))
    for s in range(N):
        for r in range(N):
            coeffs = [sol[r * size + l][s] for l in range(size)]
            A = Multivector(n, coeffs)
            if A.is_zero():
                continue
            out = out + pmul(lefts[s].mul_right(A), rights_v[r])
    return out.map_coeffs(lambda c: c * inv_om)


# ----- formula construction ---------------------------------------------------

def _cauchy_kernel_derivative(n: int, alpha) -> dict[int, MultiPoly]:
    """d^alpha of G(v) = v / |v|^n as {m: N_m} meaning sum N_m |v|^(-n-2m)."""
    blocks = (("v", n),)
    cur: dict[int, MultiPoly] = {0: MultiPoly.vector(n, blocks, "v")}
    for j, aj in enumerate(alpha):
        for _ in range(aj):
            nxt: dict[int, MultiPoly] = {}

            def add(m, poly):
                if poly.is_zero():
                    return
                prev = nxt.get(m)
                nxt[m] = poly if prev is None else prev + poly

            for m, num in cur.items():
                # d/dv_j (N |v|^{-n-2m})
                dN = _partial(num, "v", j + 1)
                add(m, dN)
                vj = MultiPoly.variable(n, blocks, "v", j + 1)
                add(m + 1, pmul(vj, num) * Fraction(-(n + 2 * m)))
            cur = nxt
    return cur


def _partial(p: MultiPoly, block: str, j: int) -> MultiPoly:
    off, _ = p._offset(block)
    terms = {}
    for exps, mv in p.terms.items():
        kk = exps[off + j - 1]
        if kk:
            e = list(exps)
            e[off + j - 1] = kk - 1
            key = tuple(e)
            c = mv * kk
            prev = terms.get(key)
            terms[key] = c if prev is None else prev + c
    return MultiPoly(p.dim, p.blocks, terms)


def zonal_formula_with_factor(n: int, k: int):
    """Kernel from the differentiated Cauchy kernel, rescaled to the Gram kernel.

    Returns (kernel, factor): kernel equals zonal_kernel(n, k, "gram") exactly
    and factor is the single global scalar that was applied.
    """
    gram = _zonal_gram(n, k)
    blocks = (("u", n), ("v", n))
    raw = MultiPoly.zero(n, blocks)
    vpoly = MultiPoly.vector(n, (("v", n),), "v")
    lefts = monogenic_basis(n, k, "monogenic_left", block="u").elements
    for sigma, P in zip(multisets(n, k), lefts):
        alpha = [0] * n
        for i in sigma:
            alpha[i - 1] += 1
        parts = _cauchy_kernel_derivative(n, tuple(alpha))
        on_sphere = MultiPoly.zero(n, (("v", n),))
        for _, num in sorted(parts.items()):
            on_sphere = on_sphere + num
        Rs = sphere_representative(pmul(on_sphere, vpoly), "v")
        raw = raw + pmul(P.with_blocks(blocks), Rs.with_blocks(blocks))
    if raw.is_zero():
        raise ArithmeticError("formula construction collapsed to zero")
    # single global rescale, fixed on one matching coefficient
    key = next(iter(sorted(gram.terms)))
    gm = gram.terms[key]
    rm = raw.terms.get(key)
    if rm is None:
        raise ArithmeticError("formula kernel misses a Gram term")
    blade = next(m for m, c in gm.items())
    factor = gm.coeffs[blade] / Fraction(rm.coeffs[blade])
    scaled = raw.map_coeffs(lambda c: factor * c)
    return scaled, factor


# ----- fundamental solution ---------------------------------------------------

def _norm_sq_coords(x):
    return sum(c * c for c in x)


def _is_exact_point(x) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in x)


def _abs_pow(nsq, expo_half_num: int):
    """(nsq)^(expo_half_num/2) keeping Fractions exact when possible."""
    if isinstance(nsq, Fraction) or isinstance(nsq, int):
        f = Fraction(nsq)
        if expo_half_num % 2 == 0:
            return f ** (expo_half_num // 2)
        rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
        if rn * rn == f.numerator and rd * rd == f.denominator:
            return Fraction(rn, rd) ** expo_half_num
        return math.sqrt(float(f)) ** expo_half_num
    return math.sqrt(float(nsq)) ** expo_half_num


def fundamental_Hk_poly(params: ModelParams, x, form: str = "left",
                        exact: bool | None = None) -> MultiPoly:
    """H_k(x, u, v) at fixed x as a polynomial in (u, v).

    form "left":  -1/(omega c_k) u (x/|x|^n) Z_{k-1}(x u x/|x|^2, v) v
    form "right": -1/(omega c_k) u Z_{k-1}(u, x v x/|x|^2) (x/|x|^n) v
    """
    n, k = params.n, params.k
    if k < 1:
        raise ValueError("k >= 1 required for H_k")
    x = tuple(x)
    nsq = _norm_sq_coords(x)
    if to_float(nsq) == 0.0:
        raise ZeroDivisionError("H_k singular at x = 0")
    if exact is None:
        exact = _is_exact_point(x)
    Z = zonal_kernel(n, k - 1)
    if not exact:
        Z = Z.to_float()
        x = tuple(float(c) for c in x)
        nsq = float(nsq)
        scale = -1.0 / (omega_float(n) * float(params.c_k))
    else:
        scale = PiRat.rational(-1 / params.c_k) / omega_exact(n)
    X = Multivector.from_vector(n, x)
    # rows of w -> x w x / |x|^2 on coordinates; the sandwich is grade-1
    # exactly, so float rounding in higher grades is projected away
    sand = [gp(gp(X, Multivector.basis_vector(n, j + 1)), X).grade_part(1).vector_coords(n)
            for j in range(n)]
    rows = [[sand[j][i] / nsq for j in range(n)] for i in range(n)]
    xdir = X / _abs_pow(nsq, n)
    blocks = (("u", n), ("v", n))
    upoly = MultiPoly.vector(Z.dim, blocks, "u")
    vpoly = MultiPoly.vector(Z.dim, blocks, "v")
    if form == "left":
        Zs = subs_linear(Z, "u", rows, ("u", n))
        out = pmul(upoly.mul_right(xdir), pmul(Zs, vpoly))
    elif form == "right":
        Zs = subs_linear(Z, "v", rows, ("v", n))
        out = pmul(upoly, pmul(Zs.mul_right(xdir), vpoly))
    else:
        raise ValueError(f"form must be left or right, got {form!r}")
    return out * scale


def fundamental_Hk(params: ModelParams, x, u, v, form: str = "left") -> Multivector:
    """Pointwise H_k(x, u, v)."""
    from .polynomials import peval
    H = fundamental_Hk_poly(params, x, form=form,
                            exact=_is_exact_point(tuple(x)) and _is_exact_point(tuple(u))
                            and _is_exact_point(tuple(v)))
    return peval(H, {"u": tuple(u), "v": tuple(v)})


# ----- sphere kernel ----------------------------------------------------------

def _unit_mv(dim: int, coords) -> Multivector:
    v = Multivector.from_vector(dim, [float(c) for c in coords])
    return v / v.norm()


def pin_a(n: int, x_s, y_s) -> PinElement:
    """The reflection a(x_s, y_s): three normalized vector factors.

    J(C^{-1}, .)^{-1} is a negative multiple of (. - e_{n+1}); the two
    signs cancel, and the overall sign cancels in the a u rev(a) sandwich.
    """
    dim = n + 1
    e = [0.0] * dim
    e[-1] = 1.0
    f1 = [float(a) - b for a, b in zip(x_s, e)]
    f2 = [float(a) - float(b) for a, b in zip(x_s, y_s)]
    f3 = [float(a) - b for a, b in zip(y_s, e)]
    return PinElement([_unit_mv(dim, f1), _unit_mv(dim, f2), _unit_mv(dim, f3)],
                      tol=1e-12)


def _check_on_sphere(p, tol: float = 1e-12):
    nrm = math.sqrt(sum(float(c) ** 2 for c in p))
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"point off the sphere by {abs(nrm - 1.0)}")


def spherical_HkS_poly(params: ModelParams, x_s, y_s, form: str = "left",
                       ambient_u: bool = False) -> MultiPoly:
    """H_k^S at fixed (x_s, y_s) as a float polynomial in (u, v) over Cl_{n+1}.

    form "left":  -1/(omega c_k) u ((x_s-y_s)/|x_s-y_s|^n) J(C^{-1},y_s)^{-1}
                  Z_{k-1}(a u rev(a), v) v
    form "right": -1/(omega c_k) u Z_{k-1}(u, rev(a) v a) J(C^{-1},y_s)^{-1}
                  ((x_s-y_s)/|x_s-y_s|^n) v
    The (n+1)-coordinate reflected argument enters Z_{k-1} through the
    trivial extension (its last coordinate is dropped).
    """
    n, k = params.n, params.k
    if k < 1:
        raise ValueError("k >= 1 required")
    dim = n + 1
    _check_on_sphere(x_s)
    _check_on_sphere(y_s)
    diff = [float(a) - float(b) for a, b in zip(x_s, y_s)]
    dn = math.sqrt(sum(c * c for c in diff))
    if dn < 1e-14:
        raise ZeroDivisionError("H_k^S singular at x_s = y_s")
    a = pin_a(n, x_s, y_s)
    Z = zonal_kernel(n, k - 1).to_float().to_dim(dim)
    u_ar = dim if ambient_u else n
    blocks = (("u", u_ar), ("v", n))
    # reflected argument rows: Z's u_i <- sum_j (a e_j rev(a))_i u_j, i <= n
    imgs = [reflect(a, Multivector.basis_vector(dim, j + 1)).grade_part(1)
            for j in range(u_ar)]
    rows = [[imgs[j].coeffs[1 << i] for j in range(u_ar)] for i in range(n)]
    kern = Multivector.from_vector(dim, diff) / dn ** n
    ys_mv = Multivector.from_vector(dim, [float(c) for c in y_s])
    e_mv = Multivector.basis_vector(dim, dim)
    Jinv = VahlenMap.cayley_inverse(n).weight([float(c) for c in y_s], "J").inverse(tol=1e-12)
    scale = -1.0 / (omega_float(n) * float(params.c_k))
    upoly = MultiPoly.vector(dim, blocks, "u")
    vpoly = MultiPoly.vector(dim, blocks, "v")
    if form == "left":
        Zs = subs_linear(Z, "u", rows, ("u", u_ar))
        head = upoly.mul_right(gp(kern, Jinv))
        out = pmul(head, pmul(Zs, vpoly))
    elif form == "right":
        a_rev = PinElement(list(reversed(a.factors)), tol=1e-12)
        imgs_v = [reflect(a_rev, Multivector.basis_vector(dim, j + 1)).grade_part(1)
                  for j in range(n)]
        rows_v = [[imgs_v[j].coeffs[1 << i] for j in range(n)] for i in range(n)]
        Zs = subs_linear(Z, "v", rows_v, ("v", n))
        mid = Zs.mul_right(gp(Jinv, kern))
        out = pmul(upoly, pmul(mid, vpoly))
    else:
        raise ValueError(f"form must be left or right, got {form!r}")
    return out * scale


def spherical_HkS(params: ModelParams, x_s, y_s, u, v, form: str = "left") -> Multivector:
    """Pointwise H_k^S(x_s - y_s, u, v); u may have n or n+1 coordinates."""
    from .polynomials import peval
    H = spherical_HkS_poly(params, x_s, y_s, form=form)
    return peval(H, {"u": tuple(float(c) for c in u),
                     "v": tuple(float(c) for c in v)})
