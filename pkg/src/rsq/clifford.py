"""Dense real Clifford algebra Cl_m with negative-definite signature.

Basis blades are indexed by bitmask (bit j set means e_{j+1} is a
factor), coefficients live in a tuple of length 2^m.  Generators square
to -1 and anticommute: e_i e_j + e_j e_i = -2 delta_ij.  Coefficients
may be Fraction (exact), float, or PiRat; conversion between backends
is explicit via map_coeffs / to_float.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .scalars import PiRat, to_float

_SIGN_CACHE: dict[int, list[list[int]]] = {}

MAX_DIM = 6


def _reorder_sign(a: int, b: int) -> int:
    a >>= 1
    count = 0
    while a:
        count += bin(a & b).count("1")
        a >>= 1
    return -1 if count & 1 else 1


def _sign_table(dim: int) -> list[list[int]]:
    table = _SIGN_CACHE.get(dim)
    if table is None:
        size = 1 << dim
        table = [[_reorder_sign(a, b) * (-1 if bin(a & b).count("1") & 1 else 1)
                  for b in range(size)] for a in range(size)]
        _SIGN_CACHE[dim] = table
    return table


def _blade_grade(mask: int) -> int:
    return bin(mask).count("1")


class Multivector:
    """Immutable element of Cl_m, m <= 6."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs):
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"algebra dimension {dim} outside 1..{MAX_DIM}")
        coeffs = tuple(coeffs)
        if len(coeffs) != 1 << dim:
            raise ValueError(f"need {1 << dim} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *a):
        raise AttributeError("Multivector is immutable")

    # ----- constructors -------------------------------------------------
    @staticmethod
    def zero(dim: int) -> "Multivector":
        return Multivector(dim, (0,) * (1 << dim))

    @staticmethod
    def scalar(dim: int, value) -> "Multivector":
        c = [0] * (1 << dim)
        c[0] = value
        return Multivector(dim, c)

    @staticmethod
    def blade(dim: int, mask: int, coeff=1) -> "Multivector":
        if not 0 <= mask < (1 << dim):
            raise ValueError(f"blade mask {mask} outside algebra of dim {dim}")
        c = [0] * (1 << dim)
        c[mask] = coeff
        return Multivector(dim, c)

    @staticmethod
    def basis_vector(dim: int, j: int) -> "Multivector":
        """e_j, 1-indexed."""
        if not 1 <= j <= dim:
            raise ValueError(f"e_{j} not in Cl_{dim}")
        return Multivector.blade(dim, 1 << (j - 1))

    @staticmethod
    def from_vector(dim: int, coords) -> "Multivector":
        coords = tuple(coords)
        if len(coords) > dim:
            raise ValueError(f"{len(coords)} coordinates exceed dim {dim}")
        c = [0] * (1 << dim)
        for j, x in enumerate(coords):
            c[1 << j] = x
        return Multivector(dim, c)

    # ----- structure ----------------------------------------------------
    def items(self):
        return ((m, c) for m, c in enumerate(self.coeffs) if c)

    def scalar_part(self):
        return self.coeffs[0]

    def grade_part(self, r: int) -> "Multivector":
        c = [ci if _blade_grade(m) == r else 0 for m, ci in enumerate(self.coeffs)]
        return Multivector(self.dim, c)

    def grades(self):
        return sorted({_blade_grade(m) for m, c in self.items()})

    def is_grade(self, r: int) -> bool:
        return all(_blade_grade(m) == r for m, _ in self.items())

    def vector_coords(self, arity: int | None = None):
        """Coordinates of a grade-1 element (errors otherwise)."""
        if not self.is_zero() and not self.is_grade(1):
            raise ValueError(f"not grade-1: grades {self.grades()}")
        arity = self.dim if arity is None else arity
        return tuple(self.coeffs[1 << j] for j in range(arity))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # ----- arithmetic ---------------------------------------------------
    def _check(self, other: "Multivector"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch {self.dim} != {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        return Multivector(self.dim, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        self._check(other)
        return Multivector(self.dim, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Multivector(self.dim, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return gp(self, other)
        if isinstance(other, (int, float, Fraction, PiRat)):
            return Multivector(self.dim, tuple(a * other if a else a for a in self.coeffs))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, Fraction, PiRat)):
            return Multivector(self.dim, tuple(other * a if a else a for a in self.coeffs))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, Fraction, PiRat)):
            return Multivector(self.dim, tuple(a / other if a else a for a in self.coeffs))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dim == other.dim and all(
            a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.dim, self.coeffs))

    # ----- involutions and norms ----------------------------------------
    def conjugate(self) -> "Multivector":
        c = [ci if not ci else (ci if _blade_grade(m) * (_blade_grade(m) + 1) // 2 % 2 == 0 else -ci)
             for m, ci in enumerate(self.coeffs)]
        return Multivector(self.dim, c)

    def reverse(self) -> "Multivector":
        c = [ci if not ci else (ci if _blade_grade(m) * (_blade_grade(m) - 1) // 2 % 2 == 0 else -ci)
             for m, ci in enumerate(self.coeffs)]
        return Multivector(self.dim, c)

    def grade_involution(self) -> "Multivector":
        c = [ci if not ci else (ci if _blade_grade(m) % 2 == 0 else -ci)
             for m, ci in enumerate(self.coeffs)]
        return Multivector(self.dim, c)

    def norm_sq(self):
        """Scalar part of conjugate(a)*a == sum of squared coefficients."""
        out = 0
        for c in self.coeffs:
            if c:
                out = out + c * c
        return out

    def norm(self) -> float:
        return math.sqrt(to_float(self.norm_sq()))

    def abs_max(self) -> float:
        return max((abs(to_float(c)) for c in self.coeffs), default=0.0)

    def inverse(self, tol: float = 0.0) -> "Multivector":
        """Inverse of a versor-like element (reverse(a)*a a nonzero scalar)."""
        r = self.reverse()
        s = gp(r, self)
        rest = max((abs(to_float(c)) for m, c in s.items() if m != 0), default=0.0)
        s0 = s.scalar_part()
        if (tol == 0.0 and rest != 0) or (tol > 0.0 and rest > tol * max(abs(to_float(s0)), 1e-300)):
            raise ValueError("element has no versor inverse (reverse(a)*a not scalar)")
        if not s0:
            raise ZeroDivisionError("zero norm, not invertible")
        return r / s0

    # ----- conversions ---------------------------------------------------
    def map_coeffs(self, fn) -> "Multivector":
        return Multivector(self.dim, tuple(fn(c) for c in self.coeffs))

    def to_float(self) -> "Multivector":
        return self.map_coeffs(to_float)

    def to_dim(self, dim: int) -> "Multivector":
        """Embed into a larger algebra (blade masks unchanged)."""
        if dim < self.dim:
            for m, _ in self.items():
                if m >= (1 << dim):
                    raise ValueError("cannot shrink: nonzero high blades")
        c = [0] * (1 << dim)
        for m, ci in self.items():
            c[m] = ci
        return Multivector(dim, c)

    def approx_eq(self, other: "Multivector", tol: float = 1e-12) -> bool:
        self._check(other)
        return all(abs(to_float(a) - to_float(b)) <= tol
                   for a, b in zip(self.coeffs, other.coeffs))

    # ----- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for m, c in self.items():
            if isinstance(c, Fraction):
                coeff = f"{c.numerator}/{c.denominator}"
            elif isinstance(c, PiRat):
                if c.is_rational():
                    f = c.as_fraction()
                    coeff = f"{f.numerator}/{f.denominator}"
                else:
                    coeff = {"pi": [[p, f"{q.numerator}/{q.denominator}"]
                                    for p, q in sorted(c.terms.items())]}
            else:
                coeff = c
            terms.append({"blade": m, "coeff": coeff})
        return {"dim": self.dim, "terms": terms}

    @staticmethod
    def from_json(obj: dict) -> "Multivector":
        dim = int(obj["dim"])
        c = [0] * (1 << dim)
        for t in obj["terms"]:
            raw = t["coeff"]
            if isinstance(raw, str):
                num, _, den = raw.partition("/")
                val = Fraction(int(num), int(den or "1"))
            elif isinstance(raw, dict):
                val = PiRat({int(p): Fraction(q) for p, q in raw["pi"]})
            else:
                val = raw
            c[int(t["blade"])] = val
        return Multivector(dim, c)

    def __repr__(self):
        if self.is_zero():
            return f"Multivector(Cl_{self.dim}, 0)"
        bits = []
        for m, c in self.items():
            name = "1" if m == 0 else "e" + "".join(
                str(j + 1) for j in range(self.dim) if m >> j & 1)
            bits.append(f"{c}*{name}")
        return f"Multivector(Cl_{self.dim}, " + " + ".join(bits) + ")"


def gp(a: Multivector, b: Multivector) -> Multivector:
    """Geometric product in Cl_m; bilinear, associative, e_j^2 = -1."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} != {b.dim}")
    sign = _sign_table(a.dim)
    out = [0] * (1 << a.dim)
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        row = sign[i]
        for j, bj in enumerate(b.coeffs):
            if not bj:
                continue
            prod = ai * bj
            out[i ^ j] = out[i ^ j] + (prod if row[j] > 0 else -prod)
    return Multivector(a.dim, out)


def involution(a: Multivector, kind: str) -> Multivector:
    if kind == "conjugate":
        return a.conjugate()
    if kind == "reverse":
        return a.reverse()
    raise ValueError(f"unknown involution {kind!r}")


def norm_sq(a: Multivector):
    return a.norm_sq()


class PinElement:
    """Product of unit grade-1 vectors; acts on vectors by a x reverse(a)."""

    __slots__ = ("factors", "product")

    def __init__(self, factors, tol: float = 0.0):
        factors = tuple(factors)
        if not factors:
            raise ValueError("PinElement needs at least one factor")
        dim = factors[0].dim
        for y in factors:
            if y.dim != dim:
                raise ValueError("mixed algebra dimensions")
            if not y.is_grade(1):
                raise ValueError("Pin factors must be grade-1")
            n2 = y.norm_sq()
            if tol == 0.0:
                if n2 != 1:
                    raise ValueError(f"factor norm^2 = {n2} != 1")
            elif abs(to_float(n2) - 1.0) > tol:
                raise ValueError(f"factor norm^2 = {to_float(n2)} != 1")
        prod = factors[0]
        for y in factors[1:]:
            prod = gp(prod, y)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "product", prod)

    def __setattr__(self, *a):
        raise AttributeError("PinElement is immutable")

    @staticmethod
    def from_vectors(vectors, normalize: bool = False, tol: float = 0.0) -> "PinElement":
        fs = []
        for v in vectors:
            if normalize:
                v = v.to_float()
                v = v / v.norm()
            fs.append(v)
        return PinElement(fs, tol=tol)

    @property
    def dim(self) -> int:
        return self.product.dim

    def reversed_product(self) -> Multivector:
        return self.product.reverse()

    def __repr__(self):
        return f"PinElement({len(self.factors)} factors, dim {self.dim})"


def reflect(a, x: Multivector) -> Multivector:
    """a x reverse(a) for a in Pin; maps grade-1 to grade-1, norm-preserving."""
    if isinstance(a, PinElement):
        p, pr = a.product, a.reversed_product()
    elif isinstance(a, Multivector):
        p, pr = a, a.reverse()
    else:
        raise TypeError("a must be PinElement or Multivector")
    if not x.is_grade(1):
        raise ValueError("reflect acts on grade-1 vectors only")
    return gp(gp(p, x), pr)


def reflect_matrix(a, arity_in: int, arity_out: int):
    """Matrix rows of the linear map x -> a x reverse(a) on coordinates.

    Returns rows[i][j]: coefficient of e_{j+1} in a e_{i+1} reverse(a),
    for i < arity_in, j < arity_out.
    """
    if isinstance(a, PinElement):
        dim = a.dim
    else:
        dim = a.dim
    rows = []
    for i in range(arity_in):
        img = reflect(a, Multivector.basis_vector(dim, i + 1))
        rows.append(img.vector_coords(arity_out))
    return rows
