"""Moebius transformations as Vahlen quadruples, conformal weights, Cayley map.

A VahlenMap stores (a, b, c, d) with entries in Cl_m acting by
x -> (a x + b)(c x + d)^{-1}.  Validity (entries are vector products,
the four mixed products a~b, c~d, ~bc, ~da are vectors, and the
pseudo-determinant a~d - b~c is a nonzero real scalar) is checked at
construction.  The Cayley transform C(x) = (e_{n+1} x + 1)(x + e_{n+1})^{-1}
is carried as an unnormalized quadruple over Cl_{n+1} so the generic
weight J(phi, x) = rev(c x + d)/|c x + d|^n reproduces its closed form.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .clifford import Multivector, PinElement, gp, reflect
from .polynomials import MultiPoly, subs_linear
from .scalars import to_float


class PointAtInfinity(ValueError):
    """Raised when c x + d is not invertible."""


def _is_real_scalar(q: Multivector, tol: float) -> bool:
    rest = max((abs(to_float(c)) for m, c in q.items() if m != 0), default=0.0)
    if tol == 0.0:
        return rest == 0.0
    return rest <= tol * max(1.0, abs(to_float(q.scalar_part())))


def _is_vector_or_zero(q: Multivector, tol: float) -> bool:
    # grade 0 is admitted alongside grade 1: scalars are (empty or parallel)
    # vector products and occur for translations and the Cayley quadruple
    rest = max((abs(to_float(c)) for m, c in q.items()
                if bin(m).count("1") > 1), default=0.0)
    if tol == 0.0:
        return rest == 0.0
    scale = max(1.0, max((abs(to_float(c)) for _, c in q.items()), default=0.0))
    return rest <= tol * scale


class VahlenMap:
    """Moebius transformation x -> (a x + b)(c x + d)^{-1}."""

    __slots__ = ("dim", "space_dim", "a", "b", "c", "d", "kind", "pseudo_det")

    def __init__(self, a, b, c, d, space_dim: int | None = None,
                 kind: str = "custom", tol: float = 1e-10):
        dim = a.dim
        for q in (b, c, d):
            if q.dim != dim:
                raise ValueError("mixed algebra dimensions")
        space_dim = dim if space_dim is None else space_dim
        exact = all(not isinstance(x, float)
                    for q in (a, b, c, d) for x in q.coeffs)
        t = 0.0 if exact else tol
        for q in (a, b, c, d):
            if not q.is_zero() and not _is_real_scalar(gp(q, q.reverse()), t):
                raise ValueError("entry is not a product of vectors (q rev(q) not scalar)")
        for pair in (gp(a, b.reverse()), gp(c, d.reverse()),
                     gp(b.reverse(), c), gp(d.reverse(), a)):
            if not _is_vector_or_zero(pair, t):
                raise ValueError("mixed products a rev(b), c rev(d), rev(b)c, rev(d)a "
                                 "must be vectors")
        pd = gp(a, d.reverse()) - gp(b, c.reverse())
        if not _is_real_scalar(pd, t):
            raise ValueError("pseudo-determinant is not a real scalar")
        pdv = pd.scalar_part()
        if pdv == 0 or (not exact and abs(to_float(pdv)) < 1e-14):
            raise ValueError("pseudo-determinant vanishes")
        if kind in ("translation", "dilation", "orthogonal", "inversion"):
            if exact:
                if pdv not in (1, -1):
                    raise ValueError(f"pseudo-determinant {pdv} != +-1")
            elif abs(abs(to_float(pdv)) - 1.0) > tol:
                raise ValueError(f"pseudo-determinant {to_float(pdv)} != +-1")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "space_dim", space_dim)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "pseudo_det", pdv)

    def __setattr__(self, *args):
        raise AttributeError("VahlenMap is immutable")

    # ----- constructors ----------------------------------------------------
    @staticmethod
    def translation(dim: int, t) -> "VahlenMap":
        one = Multivector.scalar(dim, 1)
        return VahlenMap(one, Multivector.from_vector(dim, t),
                         Multivector.zero(dim), one, kind="translation")

    @staticmethod
    def dilation(dim: int, scale) -> "VahlenMap":
        """x -> scale * x; exact when sqrt(scale) is rational."""
        if isinstance(scale, (int, Fraction)):
            f = Fraction(scale)
            rn = math.isqrt(f.numerator)
            rd = math.isqrt(f.denominator)
            if rn * rn == f.numerator and rd * rd == f.denominator:
                s = Fraction(rn, rd)
            else:
                s = math.sqrt(float(f))
        else:
            s = math.sqrt(float(scale))
        return VahlenMap(Multivector.scalar(dim, s), Multivector.zero(dim),
                         Multivector.zero(dim),
                         Multivector.scalar(dim, 1) / s, kind="dilation")

    @staticmethod
    def orthogonal(pin: PinElement) -> "VahlenMap":
        """x -> a x rev(a) for a in Pin."""
        a = pin.product
        d = a.reverse().inverse(tol=0.0 if not any(
            isinstance(c, float) for c in a.coeffs) else 1e-12)
        dim = a.dim
        return VahlenMap(a, Multivector.zero(dim), Multivector.zero(dim), d,
                         kind="orthogonal")

    @staticmethod
    def inversion(dim: int) -> "VahlenMap":
        one = Multivector.scalar(dim, 1)
        zero = Multivector.zero(dim)
        return VahlenMap(zero, one, one, zero, kind="inversion")

    @staticmethod
    def cayley(n: int) -> "VahlenMap":
        """R^n onto S^n minus the pole e_{n+1}; quadruple over Cl_{n+1}."""
        dim = n + 1
        e = Multivector.basis_vector(dim, dim)
        one = Multivector.scalar(dim, 1)
        return VahlenMap(e, one, one, e, space_dim=n, kind="cayley")

    @staticmethod
    def cayley_inverse(n: int) -> "VahlenMap":
        dim = n + 1
        e = Multivector.basis_vector(dim, dim)
        one = Multivector.scalar(dim, 1)
        return VahlenMap(-e, one, one, -e, space_dim=n, kind="cayley")

    # ----- action ------------------------------------------------------------
    def _point(self, x) -> Multivector:
        if isinstance(x, Multivector):
            return x
        return Multivector.from_vector(self.dim, x)

    def denom(self, x) -> Multivector:
        X = self._point(x)
        return gp(self.c, X) + self.d

    def apply(self, x, tol: float = 1e-10):
        """(a x + b)(c x + d)^{-1} as coordinates; grade-1 checked."""
        X = self._point(x)
        q = self.denom(X)
        n2 = to_float(q.norm_sq())
        if n2 == 0.0 or n2 < 1e-28:
            raise PointAtInfinity(f"c x + d vanishes at {x}")
        num = gp(self.a, X) + self.b
        exact = not any(isinstance(cc, float) for cc in num.coeffs + q.coeffs)
        y = gp(num, q.inverse(tol=0.0 if exact else 1e-12))
        if not y.is_zero() and not y.is_grade(1):
            junk = max(abs(to_float(c)) for m, c in y.items() if bin(m).count("1") != 1)
            if exact or junk > tol * max(1.0, y.norm()):
                raise ValueError(f"image not grade-1 (residual {junk})")
            y = y.grade_part(1)
        return y.vector_coords()

    def weight(self, x, kind: str = "J"):
        """Conformal weight J = rev(cx+d)/|cx+d|^n or J_{-1} = (cx+d)/|cx+d|^{n+2}."""
        q = self.denom(x)
        n2 = q.norm_sq()
        if to_float(n2) == 0.0:
            raise PointAtInfinity(f"c x + d vanishes at {x}")
        n = self.space_dim
        if kind == "J":
            expo, top = n, q.reverse()
        elif kind == "Jminus1":
            expo, top = n + 2, q
        else:
            raise ValueError(f"kind must be J or Jminus1, got {kind!r}")
        if all(not isinstance(c, float) for c in q.coeffs):
            f = Fraction(n2) if not isinstance(n2, Fraction) else n2
            rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
            if rn * rn == f.numerator and rd * rd == f.denominator:
                return top / (Fraction(rn, rd) ** expo)
        return top.to_float() / (math.sqrt(to_float(n2)) ** expo)

    def compose(self, inner: "VahlenMap") -> "VahlenMap":
        """self after inner, by Vahlen matrix multiplication."""
        a1, b1, c1, d1 = inner.a, inner.b, inner.c, inner.d
        a2, b2, c2, d2 = self.a, self.b, self.c, self.d
        return VahlenMap(gp(a2, a1) + gp(b2, c1), gp(a2, b1) + gp(b2, d1),
                         gp(c2, a1) + gp(d2, c1), gp(c2, b1) + gp(d2, d1),
                         space_dim=self.space_dim, kind="custom")

    def sandwich_matrix(self, x, arity_in: int | None = None,
                        arity_out: int | None = None):
        """Rows of the map w -> rev(cx+d) w (cx+d) / |cx+d|^2 on coordinates."""
        q = self.denom(x)
        n2 = q.norm_sq()
        arity_in = self.dim if arity_in is None else arity_in
        arity_out = self.dim if arity_out is None else arity_out
        qr = q.reverse()
        rows = []
        for i in range(arity_in):
            img = gp(gp(qr, Multivector.basis_vector(self.dim, i + 1)), q) / n2
            rows.append(img.vector_coords(arity_out))
        return rows

    def to_json(self) -> dict:
        return {"kind": self.kind, "space_dim": self.space_dim,
                "a": self.a.to_json(), "b": self.b.to_json(),
                "c": self.c.to_json(), "d": self.d.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "VahlenMap":
        return VahlenMap(Multivector.from_json(obj["a"]), Multivector.from_json(obj["b"]),
                         Multivector.from_json(obj["c"]), Multivector.from_json(obj["d"]),
                         space_dim=obj.get("space_dim"), kind=obj.get("kind", "custom"))

    def __repr__(self):
        return f"VahlenMap({self.kind}, dim {self.dim}, space {self.space_dim})"


def moebius_apply(m: VahlenMap, x):
    return m.apply(x)


def conformal_weight(m: VahlenMap, x, kind: str = "J"):
    return m.weight(x, kind)


def cayley_point(x, n: int, direction: str = "forward", tol: float = 1e-10):
    """Map R^n to S^n (forward) or back (inverse); unit length enforced."""
    if direction == "forward":
        coords = tuple(x)
        if len(coords) == n:
            coords = coords + (0,)
        elif len(coords) == n + 1:
            if to_float(coords[-1]) != 0.0:
                raise ValueError("forward input must lie in R^n (last coordinate 0)")
        else:
            raise ValueError(f"expected {n} coordinates")
        y = VahlenMap.cayley(n).apply(coords)
        nrm = math.sqrt(sum(to_float(c) ** 2 for c in y))
        if abs(nrm - 1.0) > tol:
            raise ValueError(f"Cayley image off the sphere by {abs(nrm - 1.0)}")
        if isinstance(y[0], float):
            y = tuple(c / nrm for c in y)
        return y
    if direction == "inverse":
        coords = tuple(x)
        if len(coords) != n + 1:
            raise ValueError(f"expected {n + 1} coordinates on S^n")
        nrm = math.sqrt(sum(to_float(c) ** 2 for c in coords))
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"point off S^n by {abs(nrm - 1.0)}")
        pole = [0.0] * (n + 1)
        pole[-1] = 1.0
        if sum((to_float(a) - b) ** 2 for a, b in zip(coords, pole)) < 1e-24:
            raise PointAtInfinity("inverse Cayley pole e_{n+1}")
        y = VahlenMap.cayley_inverse(n).apply(coords)
        resid = abs(to_float(y[-1]))
        if resid > tol:
            raise ValueError(f"inverse Cayley image off R^n by {resid}")
        return y[:n]
    raise ValueError(f"direction must be forward or inverse, got {direction!r}")


def pullback_symbolic(f: MultiPoly, m: VahlenMap, x_block: str = "x",
                      u_block: str = "u", w_name: str = "w") -> MultiPoly:
    """J(m,x) f(m(x), rev(d) w d / |d|^2) for c = 0 maps, fully symbolic.

    f is polynomial in (x_block, u_block); the result is polynomial in
    (x_block, w_name) with the same arities.
    """
    if not m.c.is_zero():
        raise ValueError("symbolic pullback needs c = 0")
    nx = f.block_arity(x_block) if any(n == x_block for n, _ in f.blocks) else None
    nu = f.block_arity(u_block)
    d = m.d
    n2 = d.norm_sq()
    # phi(x) = a x d^{-1} + b d^{-1}
    dinv = d.inverse()
    out = f
    if nx is not None:
        rows_map = []
        for j in range(nx):
            img = gp(gp(m.a, Multivector.basis_vector(m.dim, j + 1)), dinv)
            rows_map.append(img.vector_coords(nx))
        offs = gp(m.b, dinv).vector_coords(nx)
        rows = [[rows_map[j][i] for j in range(nx)] for i in range(nx)]
        out = subs_linear(out, x_block, rows, (x_block, nx),
                          offsets=[offs[i] for i in range(nx)])
    sand = m.sandwich_matrix([0] * m.dim, nu, nu)  # c = 0: x-independent
    rows = [[sand[j][i] for j in range(nu)] for i in range(nu)]
    out = subs_linear(out, u_block, rows, (w_name, nu))
    J = m.weight([0] * m.dim, "J")
    return out.mul_left(J)


def reflect_vector(r: Multivector, u: Multivector) -> Multivector:
    """r u r / |r|^2 for grade-1 r, u; grade-1 exactly, so rounding is projected."""
    out = gp(gp(r, u), r) / r.norm_sq()
    if not out.is_grade(1):
        out = out.grade_part(1)
    return out
