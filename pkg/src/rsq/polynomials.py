"""Polynomials in vector-variable blocks with Clifford coefficients.

A MultiPoly lives over Cl_m and a fixed ordered list of blocks, e.g.
[("x", n), ("u", n)].  Each block models a vector variable whose j-th
scalar component pairs with the algebra generator e_j.  Coefficient
multiplication is noncommutative (geometric product, written order);
scalar variables commute with everything.

Evaluation implements the trivial-extension rule: a point with one more
coordinate than the block arity has its last coordinate ignored.
"""

from __future__ import annotations

from fractions import Fraction

from .clifford import Multivector, gp
from .scalars import PiRat, to_float

Scalar = (int, float, Fraction, PiRat)


def _scalar_poly_mul(p: dict, q: dict, nvars: int) -> dict:
    out = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            key = tuple(a + b for a, b in zip(ea, eb))
            prev = out.get(key)
            out[key] = ca * cb if prev is None else prev + ca * cb
    return {k: v for k, v in out.items() if v}


class MultiPoly:
    """Polynomial with Multivector coefficients over named vector blocks."""

    __slots__ = ("dim", "blocks", "terms")

    def __init__(self, dim: int, blocks, terms=None):
        blocks = tuple((str(n), int(a)) for n, a in blocks)
        names = [n for n, _ in blocks]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate block names in {names}")
        nvars = sum(a for _, a in blocks)
        clean = {}
        if terms:
            for exps, mv in terms.items():
                exps = tuple(int(e) for e in exps)
                if len(exps) != nvars:
                    raise ValueError(f"exponent tuple {exps} has wrong length")
                if any(e < 0 for e in exps):
                    raise ValueError("negative exponent")
                if not isinstance(mv, Multivector):
                    raise TypeError("coefficients must be Multivector")
                if mv.dim != dim:
                    raise ValueError("coefficient algebra mismatch")
                if not mv.is_zero():
                    prev = clean.get(exps)
                    clean[exps] = mv if prev is None else prev + mv
        clean = {e: c for e, c in clean.items() if not c.is_zero()}
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("MultiPoly is immutable")

    # ----- block bookkeeping ---------------------------------------------
    def _offset(self, name: str) -> tuple[int, int]:
        off = 0
        for n, a in self.blocks:
            if n == name:
                return off, a
            off += a
        raise ValueError(f"unknown block {name!r} in {self.blocks}")

    def nvars(self) -> int:
        return sum(a for _, a in self.blocks)

    def block_arity(self, name: str) -> int:
        return self._offset(name)[1]

    # ----- constructors ----------------------------------------------------
    @staticmethod
    def zero(dim: int, blocks) -> "MultiPoly":
        return MultiPoly(dim, blocks, {})

    @staticmethod
    def const(dim: int, blocks, value) -> "MultiPoly":
        if isinstance(value, Scalar):
            value = Multivector.scalar(dim, value)
        blocks = tuple(blocks)
        nvars = sum(a for _, a in blocks)
        return MultiPoly(dim, blocks, {(0,) * nvars: value})

    @staticmethod
    def variable(dim: int, blocks, name: str, j: int, coeff=1) -> "MultiPoly":
        """The scalar monomial x_{name,j} (1-indexed) times a coefficient."""
        p = MultiPoly.zero(dim, blocks)
        off, ar = p._offset(name)
        if not 1 <= j <= ar:
            raise ValueError(f"component {j} outside arity {ar}")
        exps = [0] * p.nvars()
        exps[off + j - 1] = 1
        if isinstance(coeff, Scalar):
            coeff = Multivector.scalar(dim, coeff)
        return MultiPoly(dim, blocks, {tuple(exps): coeff})

    @staticmethod
    def vector(dim: int, blocks, name: str) -> "MultiPoly":
        """The Clifford vector variable sum_j x_{name,j} e_j."""
        p = MultiPoly.zero(dim, blocks)
        off, ar = p._offset(name)
        terms = {}
        for j in range(ar):
            exps = [0] * p.nvars()
            exps[off + j] = 1
            terms[tuple(exps)] = Multivector.basis_vector(dim, j + 1)
        return MultiPoly(dim, blocks, terms)

    # ----- representation alignment ----------------------------------------
    def with_blocks(self, blocks) -> "MultiPoly":
        """Reinterpret over a superset of blocks (same names keep arity)."""
        blocks = tuple((str(n), int(a)) for n, a in blocks)
        new_names = {n: a for n, a in blocks}
        for n, a in self.blocks:
            if n not in new_names:
                raise ValueError(f"block {n!r} missing from target")
            if new_names[n] < a:
                raise ValueError(f"block {n!r} arity shrinks {a}->{new_names[n]}")
        offs_new = {}
        off = 0
        for n, a in blocks:
            offs_new[n] = off
            off += a
        total = off
        terms = {}
        for exps, mv in self.terms.items():
            new = [0] * total
            off_old = 0
            for n, a in self.blocks:
                dst = offs_new[n]
                for j in range(a):
                    new[dst + j] = exps[off_old + j]
                off_old += a
            terms[tuple(new)] = mv
        return MultiPoly(self.dim, blocks, terms)

    @staticmethod
    def _union_blocks(p: "MultiPoly", q: "MultiPoly"):
        merged = list(p.blocks)
        names = {n: a for n, a in merged}
        for n, a in q.blocks:
            if n in names:
                if names[n] != a:
                    raise ValueError(f"block {n!r} arity mismatch {names[n]} != {a}")
            else:
                merged.append((n, a))
                names[n] = a
        merged = tuple(merged)
        return p.with_blocks(merged), q.with_blocks(merged)

    def to_dim(self, dim: int) -> "MultiPoly":
        return MultiPoly(dim, self.blocks,
                         {e: c.to_dim(dim) for e, c in self.terms.items()})

    def grow_block(self, name: str, new_arity: int) -> "MultiPoly":
        """Widen one block (new trailing components, exponents zero)."""
        off, ar = self._offset(name)
        if new_arity < ar:
            raise ValueError("use shrink_block to narrow")
        blocks = tuple((n, new_arity if n == name else a) for n, a in self.blocks)
        terms = {}
        for exps, mv in self.terms.items():
            new = exps[:off + ar] + (0,) * (new_arity - ar) + exps[off + ar:]
            terms[new] = mv
        return MultiPoly(self.dim, blocks, terms)

    def shrink_block(self, name: str, new_arity: int) -> "MultiPoly":
        """Drop trailing components of a block (terms using them are set to 0)."""
        off, ar = self._offset(name)
        if new_arity > ar:
            raise ValueError("use grow_block to widen")
        blocks = tuple((n, new_arity if n == name else a) for n, a in self.blocks)
        terms = {}
        for exps, mv in self.terms.items():
            if any(exps[off + j] for j in range(new_arity, ar)):
                continue
            new = exps[:off + new_arity] + exps[off + ar:]
            prev = terms.get(new)
            terms[new] = mv if prev is None else prev + mv
        return MultiPoly(self.dim, blocks, terms)

    def drop_empty_blocks(self, keep=()) -> "MultiPoly":
        used = set()
        for exps, _ in self.terms.items():
            off = 0
            for n, a in self.blocks:
                if any(exps[off + j] for j in range(a)):
                    used.add(n)
                off += a
        blocks = tuple(b for b in self.blocks if b[0] in used or b[0] in keep)
        if not blocks:
            blocks = (self.blocks[0],) if self.blocks else ()
        offs_old = {}
        off = 0
        for n, a in self.blocks:
            offs_old[n] = (off, a)
            off += a
        terms = {}
        for exps, mv in self.terms.items():
            new = []
            for n, a in blocks:
                o, _ = offs_old[n]
                new.extend(exps[o:o + a])
            terms[tuple(new)] = mv
        return MultiPoly(self.dim, blocks, terms)

    # ----- arithmetic --------------------------------------------------------
    def _binary(self, other: "MultiPoly"):
        if self.dim != other.dim:
            raise ValueError("algebra dimension mismatch")
        if self.blocks == other.blocks:
            return self, other
        return MultiPoly._union_blocks(self, other)

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self._binary(other)
        terms = dict(a.terms)
        for e, mv in b.terms.items():
            prev = terms.get(e)
            terms[e] = mv if prev is None else prev + mv
        return MultiPoly(a.dim, a.blocks, terms)

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return MultiPoly(self.dim, self.blocks, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return MultiPoly(self.dim, self.blocks,
                             {e: c * other for e, c in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Scalar):
            return MultiPoly(self.dim, self.blocks,
                             {e: other * c for e, c in self.terms.items()})
        return NotImplemented

    def mul_left(self, mv: Multivector) -> "MultiPoly":
        return MultiPoly(self.dim, self.blocks,
                         {e: gp(mv, c) for e, c in self.terms.items()})

    def mul_right(self, mv: Multivector) -> "MultiPoly":
        return MultiPoly(self.dim, self.blocks,
                         {e: gp(c, mv) for e, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self._binary(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.dim, self.blocks, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.dim, self.blocks,
                         {e: fn(c) for e, c in self.terms.items()})

    def to_float(self) -> "MultiPoly":
        return self.map_coeffs(lambda c: c.to_float())

    def conj_coeffs(self) -> "MultiPoly":
        return self.map_coeffs(lambda c: c.conjugate())

    def rev_coeffs(self) -> "MultiPoly":
        return self.map_coeffs(lambda c: c.reverse())


def pmul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Distributive product; coefficients multiply p-then-q (noncommutative)."""
    a, b = p._binary(q)
    terms = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            prod = gp(ca, cb)
            prev = terms.get(key)
            terms[key] = prod if prev is None else prev + prod
    return MultiPoly(a.dim, a.blocks, terms)


def dirac(p: MultiPoly, block: str, side: str = "left") -> MultiPoly:
    """Dirac operator sum_j e_j d/dx_j (left) or sum_j (d/dx_j) e_j (right)."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    off, ar = p._offset(block)
    terms = {}
    for exps, mv in p.terms.items():
        for j in range(ar):
            k = exps[off + j]
            if not k:
                continue
            e = list(exps)
            e[off + j] = k - 1
            ej = Multivector.basis_vector(p.dim, j + 1)
            d = gp(ej, mv) if side == "left" else gp(mv, ej)
            d = d * k
            key = tuple(e)
            prev = terms.get(key)
            terms[key] = d if prev is None else prev + d
    return MultiPoly(p.dim, p.blocks, terms)


def euler(p: MultiPoly, block: str) -> MultiPoly:
    """Degree operator sum_j x_j d/dx_j on one block."""
    off, ar = p._offset(block)
    terms = {}
    for exps, mv in p.terms.items():
        k = sum(exps[off + j] for j in range(ar))
        if k:
            terms[exps] = mv * k
    return MultiPoly(p.dim, p.blocks, terms)


def gamma(p: MultiPoly, block: str) -> MultiPoly:
    """Angular operator sum_{i<j} e_i e_j (x_i d/dx_j - x_j d/dx_i)."""
    off, ar = p._offset(block)
    terms = {}

    def add(exps, mv):
        prev = terms.get(exps)
        terms[exps] = mv if prev is None else prev + mv

    for exps, mv in p.terms.items():
        for i in range(ar):
            for j in range(i + 1, ar):
                bij = Multivector.blade(p.dim, (1 << i) | (1 << j))
                c = gp(bij, mv)
                kj = exps[off + j]
                if kj:
                    e = list(exps)
                    e[off + j] = kj - 1
                    e[off + i] += 1
                    add(tuple(e), c * kj)
                ki = exps[off + i]
                if ki:
                    e = list(exps)
                    e[off + i] = ki - 1
                    e[off + j] += 1
                    add(tuple(e), c * (-ki))
    return MultiPoly(p.dim, p.blocks, terms)


def laplacian(p: MultiPoly, block: str) -> MultiPoly:
    off, ar = p._offset(block)
    terms = {}
    for exps, mv in p.terms.items():
        for j in range(ar):
            k = exps[off + j]
            if k < 2:
                continue
            e = list(exps)
            e[off + j] = k - 2
            key = tuple(e)
            d = mv * (k * (k - 1))
            prev = terms.get(key)
            terms[key] = d if prev is None else prev + d
    return MultiPoly(p.dim, p.blocks, terms)


def vector_embed(p: MultiPoly, block: str) -> MultiPoly:
    """Left-multiply by the vector variable: (sum_j x_j e_j) p."""
    off, ar = p._offset(block)
    terms = {}
    for exps, mv in p.terms.items():
        for j in range(ar):
            e = list(exps)
            e[off + j] += 1
            c = gp(Multivector.basis_vector(p.dim, j + 1), mv)
            key = tuple(e)
            prev = terms.get(key)
            terms[key] = c if prev is None else prev + c
    return MultiPoly(p.dim, p.blocks, terms)


def peval(p: MultiPoly, assignment: dict):
    """Evaluate some or all blocks at points.

    Points may have arity or arity+1 coordinates; in the latter case the
    last coordinate is ignored (trivial extension).  Full assignment
    returns a Multivector, partial assignment a MultiPoly in the rest.
    """
    for name in assignment:
        p._offset(name)  # raise on unknown block
    kept = tuple(b for b in p.blocks if b[0] not in assignment)
    coords = {}
    off = 0
    for n, a in p.blocks:
        if n in assignment:
            pt = tuple(assignment[n])
            if len(pt) == a + 1:
                pt = pt[:a]
            elif len(pt) != a:
                raise ValueError(
                    f"point for block {n!r} has {len(pt)} coordinates, arity {a}")
            coords[n] = (off, a, pt)
        off += a
    kept_idx = []
    off = 0
    for n, a in p.blocks:
        if n not in assignment:
            kept_idx.extend(range(off, off + a))
        off += a

    out_terms = {}
    for exps, mv in p.terms.items():
        s = 1
        ok = True
        for n, (o, a, pt) in coords.items():
            for j in range(a):
                k = exps[o + j]
                if k:
                    base = pt[j]
                    if base == 0:
                        ok = False
                        break
                    s = s * base ** k
            if not ok:
                break
        if not ok:
            continue
        key = tuple(exps[i] for i in kept_idx)
        c = mv * s if s != 1 else mv
        prev = out_terms.get(key)
        out_terms[key] = c if prev is None else prev + c
    if kept:
        return MultiPoly(p.dim, kept, out_terms)
    total = out_terms.get((), None)
    return Multivector.zero(p.dim) if total is None else total


def subs_linear(p: MultiPoly, block: str, rows, target: tuple[str, int],
                offsets=None) -> MultiPoly:
    """Substitute block variables by affine forms over a target block.

    rows[i][j] is the coefficient of target variable j in the image of
    source variable i; offsets[i] an optional constant.  The source
    block is replaced in place by the target block (same name allowed).
    """
    off, ar = p._offset(block)
    tname, tar = target
    if len(rows) != ar:
        raise ValueError(f"need {ar} rows, got {len(rows)}")
    for r in rows:
        if len(r) != tar:
            raise ValueError(f"row length {len(r)} != target arity {tar}")
    for n, a in p.blocks:
        if n == tname and n != block:
            raise ValueError(f"target block {tname!r} already present")

    new_blocks = tuple((tname, tar) if n == block else (n, a) for n, a in p.blocks)
    # linear/affine forms as scalar polynomials over the target block
    forms = []
    for i in range(ar):
        f = {}
        for j, c in enumerate(rows[i]):
            if c:
                key = tuple(1 if t == j else 0 for t in range(tar))
                f[key] = c
        if offsets is not None and offsets[i]:
            f[(0,) * tar] = f.get((0,) * tar, 0) + offsets[i]
        forms.append(f)

    pow_cache: dict[tuple[int, int], dict] = {}

    def form_pow(i, k):
        if k == 0:
            return {(0,) * tar: 1}
        got = pow_cache.get((i, k))
        if got is None:
            got = _scalar_poly_mul(form_pow(i, k - 1), forms[i], tar)
            pow_cache[(i, k)] = got
        return got

    out = {}
    for exps, mv in p.terms.items():
        expanded = {(0,) * tar: 1}
        for i in range(ar):
            k = exps[off + i]
            if k:
                expanded = _scalar_poly_mul(expanded, form_pow(i, k), tar)
        head, tail = exps[:off], exps[off + ar:]
        for texp, s in expanded.items():
            key = head + texp + tail
            c = mv * s
            prev = out.get(key)
            out[key] = c if prev is None else prev + c
    return MultiPoly(p.dim, new_blocks, out)


def shift_block(p: MultiPoly, block: str, vector) -> MultiPoly:
    """Translate one block: x -> x + vector."""
    ar = p.block_arity(block)
    rows = [[1 if i == j else 0 for j in range(ar)] for i in range(ar)]
    return subs_linear(p, block, rows, (block, ar), offsets=tuple(vector))


def block_degree(p: MultiPoly, block: str) -> int:
    """Maximum block-degree over terms (0 for the zero polynomial)."""
    off, ar = p._offset(block)
    return max((sum(e[off + j] for j in range(ar)) for e in p.terms), default=0)


def is_homogeneous(p: MultiPoly, block: str, degree: int | None = None) -> bool:
    off, ar = p._offset(block)
    degs = {sum(e[off + j] for j in range(ar)) for e in p.terms}
    if not degs:
        return True
    if degree is None:
        return len(degs) == 1
    return degs == {degree}


def homogeneous_components(p: MultiPoly, block: str) -> dict[int, MultiPoly]:
    off, ar = p._offset(block)
    buckets: dict[int, dict] = {}
    for exps, mv in p.terms.items():
        d = sum(exps[off + j] for j in range(ar))
        buckets.setdefault(d, {})[exps] = mv
    return {d: MultiPoly(p.dim, p.blocks, t) for d, t in sorted(buckets.items())}


def fro_norm(p: MultiPoly) -> float:
    """Euclidean norm over all term coefficients (after float conversion)."""
    s = 0.0
    for mv in p.terms.values():
        for c in mv.coeffs:
            if c:
                f = to_float(c)
                s += f * f
    return s ** 0.5


def poly_to_json(p: MultiPoly) -> dict:
    terms = []
    for exps, mv in sorted(p.terms.items()):
        for m, c in mv.items():
            if isinstance(c, Fraction):
                coeff = f"{c.numerator}/{c.denominator}"
            elif isinstance(c, PiRat):
                if c.is_rational():
                    f = c.as_fraction()
                    coeff = f"{f.numerator}/{f.denominator}"
                else:
                    coeff = {"pi": [[pw, f"{q.numerator}/{q.denominator}"]
                                    for pw, q in sorted(c.terms.items())]}
            else:
                coeff = c
            terms.append({"exp": list(exps), "blade": m, "coeff": coeff})
    return {"dim": p.dim, "blocks": [[n, a] for n, a in p.blocks], "terms": terms}


def poly_from_json(obj: dict) -> MultiPoly:
    dim = int(obj["dim"])
    blocks = tuple((n, int(a)) for n, a in obj["blocks"])
    acc: dict[tuple, list] = {}
    for t in obj["terms"]:
        raw = t["coeff"]
        if isinstance(raw, str):
            num, _, den = raw.partition("/")
            val = Fraction(int(num), int(den or "1"))
        elif isinstance(raw, dict):
            val = PiRat({int(pw): Fraction(q) for pw, q in raw["pi"]})
        else:
            val = raw
        exps = tuple(int(e) for e in t["exp"])
        acc.setdefault(exps, []).append((int(t["blade"]), val))
    terms = {}
    for exps, pairs in acc.items():
        c = [0] * (1 << dim)
        for m, v in pairs:
            c[m] = c[m] + v
        terms[exps] = Multivector(dim, c)
    return MultiPoly(dim, blocks, terms)
