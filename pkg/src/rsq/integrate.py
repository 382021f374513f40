"""Exact sphere/ball moments, the Clifford inner product, and quadrature.

The exact path integrates polynomials over S^{n-1} and balls through
closed-form monomial moments (rational multiples of omega_n, carried as
PiRat).  The numeric path ships product rules for spheres S^{n-1} in
R^n, balls (radial x angular, centered so 1-n homogeneous integrands
stay bounded), and polar caps on S^n with their boundaries.  Quadrature
sums are compensated and taken in fixed node order, so results are
bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .clifford import Multivector
from .polynomials import MultiPoly, shift_block
from .scalars import PiRat, double_factorial, omega_exact, omega_float


# ----- exact monomial moments ------------------------------------------------

@lru_cache(maxsize=None)
def sphere_monomial(n: int, alpha: tuple) -> Fraction:
    """Integral of u^alpha over S^{n-1}, divided by omega_n (exact)."""
    if n < 2:
        raise ValueError("n >= 2 required")
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise ValueError("negative exponent")
    if any(a % 2 for a in alpha):
        return Fraction(0)
    total = sum(alpha)
    if total == 0:
        return Fraction(1)
    num = 1
    for a in alpha:
        num *= double_factorial(a - 1)
    den = 1
    for j in range(total // 2):
        den *= n + 2 * j
    return Fraction(num, den)


def sphere_monomial_full(n: int, alpha, exact: bool = True):
    """Integral of u^alpha over S^{n-1} including the omega_n factor."""
    frac = sphere_monomial(n, tuple(alpha))
    if exact:
        return omega_exact(n) * frac
    return omega_float(n) * float(frac)


def ball_monomial(n: int, alpha, R=1, exact: bool = True):
    """Integral of x^alpha over the ball B(0, R)."""
    alpha = tuple(int(a) for a in alpha)
    total = sum(alpha)
    frac = sphere_monomial(n, alpha) * Fraction(1, n + total)
    if exact:
        R = Fraction(R)
        return omega_exact(n) * (frac * R ** (n + total))
    return omega_float(n) * float(frac) * float(R) ** (n + total)


def _integrate_block(p: MultiPoly, block: str, moment) -> "MultiPoly | Multivector":
    """Integrate one block away with a per-exponent moment functional."""
    off, ar = p._offset(block)
    kept = tuple(b for b in p.blocks if b[0] != block)
    kept_idx = []
    o = 0
    for nm, a in p.blocks:
        if nm != block:
            kept_idx.extend(range(o, o + a))
        o += a
    out = {}
    for exps, mv in p.terms.items():
        alpha = tuple(exps[off + j] for j in range(ar))
        m = moment(alpha)
        if isinstance(m, (int, Fraction)) and m == 0:
            continue
        if isinstance(m, PiRat) and not m:
            continue
        if isinstance(m, float) and m == 0.0:
            continue
        key = tuple(exps[i] for i in kept_idx)
        c = mv * m
        prev = out.get(key)
        out[key] = c if prev is None else prev + c
    if kept:
        return MultiPoly(p.dim, kept, out)
    total = out.get((), None)
    return Multivector.zero(p.dim) if total is None else total


def integrate_sphere_poly(p: MultiPoly, block: str, exact: bool = True):
    """Integrate a polynomial over the unit sphere of one block."""
    n = p.block_arity(block)
    if exact:
        om = omega_exact(n)
        return _integrate_block(p, block, lambda a: om * sphere_monomial(n, a))
    om = omega_float(n)
    return _integrate_block(p, block, lambda a: om * float(sphere_monomial(n, a)))


def integrate_ball_poly(p: MultiPoly, block: str, R=1, center=None, exact: bool = True):
    """Integrate a polynomial over the ball B(center, R) of one block."""
    n = p.block_arity(block)
    if center is not None and any(c != 0 for c in center):
        p = shift_block(p, block, center)
    if exact:
        return _integrate_block(p, block, lambda a: ball_monomial(n, a, R, True))
    return _integrate_block(p, block, lambda a: ball_monomial(n, a, R, False))


def inner_product(P: MultiPoly, Q: MultiPoly, block: str = "u", exact: bool = True):
    """Clifford inner product: integral of P(u) Q(u) over S^{n-1}, order kept."""
    from .polynomials import pmul
    return integrate_sphere_poly(pmul(P, Q), block, exact=exact)


# ----- quadrature rules -------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    surface: str
    n: int                      # ambient dimension of the nodes
    nodes: np.ndarray           # (N, n)
    weights: np.ndarray         # (N,)
    measure: float              # closed-form total measure
    orders: tuple
    normals: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.weights)

    def check(self, tol: float = 1e-10) -> None:
        total = kahan_sum_floats(self.weights)
        if abs(total - self.measure) > tol * abs(self.measure):
            raise AssertionError(
                f"{self.surface}: weight sum {total} vs measure {self.measure}")


def kahan_sum_floats(values) -> float:
    s = 0.0
    c = 0.0
    for v in values:
        y = float(v) - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def _gauss_legendre(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def _gauss_chebyshev2(m: int):
    k = np.arange(1, m + 1)
    x = np.cos(k * np.pi / (m + 1))
    w = np.pi / (m + 1) * np.sin(k * np.pi / (m + 1)) ** 2
    return x, w


def _unit_sphere_nodes(d: int, orders):
    """Nodes/weights on the unit sphere S^d in R^{d+1}.

    Product rule, polynomial-exact at sufficient order: Gauss-Legendre or
    Gauss-Chebyshev (second kind) in each polar angle, uniform in the
    final azimuth.
    """
    if d < 1:
        raise ValueError("d >= 1")
    if d == 1:
        m = int(orders[-1])
        ang = 2 * np.pi * np.arange(m) / m
        nodes = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        weights = np.full(m, 2 * np.pi / m)
        return nodes, weights
    sub_nodes, sub_weights = _unit_sphere_nodes(d - 1, orders[1:])
    m = int(orders[0])
    expo = d - 2  # weight (1 - t^2)^{expo/2} dt
    if expo % 2 == 0:
        t, wt = _gauss_legendre(m)
        fold = (1 - t ** 2) ** (expo // 2)
    else:
        t, wt = _gauss_chebyshev2(m)
        fold = (1 - t ** 2) ** ((expo - 1) // 2)
    wt = wt * fold
    s = np.sqrt(np.maximum(0.0, 1 - t ** 2))
    nodes = np.concatenate([
        np.repeat(t, len(sub_nodes))[:, None],
        np.kron(s[:, None], sub_nodes)], axis=1)
    weights = np.kron(wt, sub_weights)
    return nodes, weights


def _norm_orders(orders, levels: int):
    if isinstance(orders, int):
        orders = (orders,)
    orders = tuple(int(o) for o in orders)
    if len(orders) == levels:
        return orders
    if len(orders) == 2 and levels > 2:
        return (orders[0],) * (levels - 1) + (orders[1],)
    if len(orders) == 1:
        return orders * levels
    raise ValueError(f"cannot spread orders {orders} over {levels} angles")


def sphere_rule(n: int, R: float = 1.0, center=None, orders=(32, 64)) -> QuadratureRule:
    """Product rule on the sphere |x - center| = R in R^n."""
    if n < 2:
        raise ValueError("n >= 2")
    d = n - 1
    orders = _norm_orders(orders, d)
    nodes, weights = _unit_sphere_nodes(d, orders)
    normals = nodes.copy()
    nodes = nodes * R
    if center is not None:
        nodes = nodes + np.asarray(center, dtype=float)
    weights = weights * R ** d
    return QuadratureRule("sphere", n, nodes, weights,
                          omega_float(n) * R ** d, orders, normals=normals,
                          meta={"R": R, "center": None if center is None else tuple(center)})


def ball_rule(n: int, R: float = 1.0, center=None, orders=(16, 32, 64)) -> QuadratureRule:
    """Radial x angular rule on B(center, R); radial weight rho^{n-1}.

    Centered at the integrand's singularity this bounds 1-n homogeneous
    integrands: the Jacobian cancels the blowup.
    """
    orders = _norm_orders(orders, n)
    nr, sph_orders = orders[0], orders[1:]
    t, wt = _gauss_legendre(nr)
    rho = 0.5 * R * (t + 1.0)
    wr = 0.5 * R * wt * rho ** (n - 1)
    snodes, sweights = _unit_sphere_nodes(n - 1, sph_orders)
    nodes = np.einsum("r,sj->rsj", rho, snodes).reshape(-1, n)
    weights = np.kron(wr, sweights)
    if center is not None:
        nodes = nodes + np.asarray(center, dtype=float)
    return QuadratureRule("ball", n, nodes, weights,
                          omega_float(n) * R ** n / n, (nr,) + tuple(sph_orders),
                          meta={"R": R, "center": None if center is None else tuple(center)})


def _frame_perp(c: np.ndarray) -> np.ndarray:
    """Orthonormal frame spanning the complement of unit vector c (rows)."""
    d = len(c)
    basis = [c]
    for j in range(d):
        v = np.zeros(d)
        v[j] = 1.0
        for b in basis:
            v = v - np.dot(v, b) * b
        nrm = np.linalg.norm(v)
        if nrm > 1e-9:
            basis.append(v / nrm)
        if len(basis) == d:
            break
    return np.stack(basis[1:], axis=0)


def _sin_power_integral(m: int, theta: float) -> float:
    """Integral of sin^m over [0, theta]."""
    if m == 0:
        return theta
    if m == 1:
        return 1.0 - math.cos(theta)
    return ((m - 1) * _sin_power_integral(m - 2, theta)
            - math.sin(theta) ** (m - 1) * math.cos(theta)) / m


def cap_rule(d: int, center, theta0: float, orders=(24, 24, 48)) -> QuadratureRule:
    """Polar cap {angle(x, center) <= theta0} on the unit sphere S^d."""
    c = np.asarray(center, dtype=float)
    if abs(np.linalg.norm(c) - 1.0) > 1e-12:
        raise ValueError("cap center must be a unit vector")
    orders = _norm_orders(orders, d)
    ntheta, sub_orders = orders[0], orders[1:]
    t, wt = _gauss_legendre(ntheta)
    theta = 0.5 * theta0 * (t + 1.0)
    wth = 0.5 * theta0 * wt * np.sin(theta) ** (d - 1)
    F = _frame_perp(c)
    ynodes, yweights = _unit_sphere_nodes(d - 1, sub_orders)
    amb = ynodes @ F
    nodes = (np.cos(theta)[:, None, None] * c[None, None, :]
             + np.sin(theta)[:, None, None] * amb[None, :, :]).reshape(-1, d + 1)
    weights = np.kron(wth, yweights)
    measure = _sin_power_integral(d - 1, theta0) * omega_float(d)
    return QuadratureRule("cap", d + 1, nodes, weights, measure,
                          (ntheta,) + tuple(sub_orders),
                          meta={"center": tuple(c), "theta0": theta0})


def cap_boundary_rule(d: int, center, theta0: float, orders=(24, 48)) -> QuadratureRule:
    """Boundary of the polar cap on S^d, with outward tangent normals."""
    c = np.asarray(center, dtype=float)
    orders = _norm_orders(orders, d - 1)
    F = _frame_perp(c)
    ynodes, yweights = _unit_sphere_nodes(d - 1, orders)
    amb = ynodes @ F
    ct, st = math.cos(theta0), math.sin(theta0)
    nodes = ct * c[None, :] + st * amb
    normals = -st * c[None, :] + ct * amb
    weights = yweights * st ** (d - 1)
    measure = omega_float(d) * st ** (d - 1)
    return QuadratureRule("cap_boundary", d + 1, nodes, weights, measure,
                          tuple(orders), normals=normals,
                          meta={"center": tuple(c), "theta0": theta0})


def rule_from_config(cfg: dict) -> QuadratureRule:
    """Build a rule from the JSON config form."""
    kind = cfg["surface"]
    if kind == "sphere":
        return sphere_rule(int(cfg["n"]), float(cfg.get("R", 1.0)),
                           cfg.get("center"), tuple(cfg.get("orders", (32, 64))))
    if kind == "ball":
        return ball_rule(int(cfg["n"]), float(cfg.get("R", 1.0)),
                         cfg.get("center"), tuple(cfg.get("orders", (16, 32, 64))))
    if kind == "cap":
        return cap_rule(int(cfg["n"]), cfg["center"], float(cfg["theta0"]),
                        tuple(cfg.get("orders", (24, 24, 48))))
    if kind == "cap_boundary":
        return cap_boundary_rule(int(cfg["n"]), cfg["center"], float(cfg["theta0"]),
                                 tuple(cfg.get("orders", (24, 48))))
    raise ValueError(f"unknown surface {kind!r}")


# ----- compensated accumulation ----------------------------------------------

class KahanMultivector:
    """Compensated Multivector accumulator, fixed call order."""

    def __init__(self, dim: int):
        self.dim = dim
        size = 1 << dim
        self.s = [0.0] * size
        self.c = [0.0] * size

    def add(self, mv: Multivector, scale: float = 1.0):
        if mv.dim != self.dim:
            raise ValueError("dimension mismatch")
        s, c = self.s, self.c
        for m, v in mv.items():
            y = float(v) * scale - c[m]
            t = s[m] + y
            c[m] = (t - s[m]) - y
            s[m] = t

    def value(self) -> Multivector:
        return Multivector(self.dim, tuple(self.s))


class KahanPoly:
    """Compensated MultiPoly accumulator, fixed call order."""

    def __init__(self, dim: int, blocks):
        self.dim = dim
        self.blocks = tuple(blocks)
        self.s: dict = {}
        self.c: dict = {}

    def add(self, p: MultiPoly, scale: float = 1.0):
        p = p.with_blocks(self.blocks) if p.blocks != self.blocks else p
        for exps, mv in p.terms.items():
            s = self.s.setdefault(exps, [0.0] * (1 << self.dim))
            c = self.c.setdefault(exps, [0.0] * (1 << self.dim))
            for m, v in mv.items():
                y = float(v) * scale - c[m]
                t = s[m] + y
                c[m] = (t - s[m]) - y
                s[m] = t

    def value(self) -> MultiPoly:
        terms = {e: Multivector(self.dim, tuple(v)) for e, v in self.s.items()}
        return MultiPoly(self.dim, self.blocks, terms)


def surface_quadrature(rule: QuadratureRule, f, dim: int | None = None,
                       return_flagged: bool = False):
    """Sum w_i f(node_i) for a Multivector-valued integrand.

    Non-finite integrand values are collected; by default they raise,
    with the flagged node indices in the message.
    """
    acc = None
    flagged = []
    for i in range(len(rule)):
        val = f(rule.nodes[i])
        if acc is None:
            acc = KahanMultivector(val.dim if dim is None else dim)
        if not all(math.isfinite(float(c)) for c in val.coeffs):
            flagged.append(i)
            continue
        acc.add(val, float(rule.weights[i]))
    if acc is None:
        raise ValueError("empty rule")
    if flagged and not return_flagged:
        raise ValueError(f"non-finite integrand at nodes {flagged[:8]}"
                         + ("..." if len(flagged) > 8 else ""))
    if return_flagged:
        return acc.value(), flagged
    return acc.value()


def poly_quadrature(rule: QuadratureRule, f, dim: int, blocks, use_normals: bool = False):
    """Sum w_i f(node_i[, normal_i]) for a MultiPoly-valued integrand."""
    acc = KahanPoly(dim, blocks)
    for i in range(len(rule)):
        if use_normals:
            val = f(rule.nodes[i], rule.normals[i])
        else:
            val = f(rule.nodes[i])
        acc.add(val, float(rule.weights[i]))
    return acc.value()
