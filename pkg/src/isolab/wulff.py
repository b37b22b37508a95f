"""Zonotope anisotropies, Wulff bodies and lattice samplers.

A stencil with representatives ``v`` and weights ``w_v`` induces the gauge
``tau(xi) = sum w_v |<xi, v>|``.  Its Wulff body is the zonotope
``K = sum w_v [-v, v]``, so the sharp constant is ``d |K|^(1/d)``.
Weights follow the split convention: weight 1 on a representative matches
counting both directed generators ``+v`` and ``-v`` once each.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cayley import VertexSet, ZdStencil, int_det
from .errors import ResourceError

DEFAULT_SAMPLER_GUARD = 5_000_000


@dataclass(frozen=True)
class Anisotropy:
    dim: int
    reps: tuple
    weights: tuple

    def __init__(self, dim, reps, weights=None):
        reps = tuple(tuple(int(a) for a in v) for v in reps)
        if any(len(v) != dim for v in reps):
            raise ValueError("representative has wrong dimension")
        if any(all(a == 0 for a in v) for v in reps):
            raise ValueError("zero vector in stencil")
        if weights is None:
            weights = [1] * len(reps)
        weights = tuple(Fraction(w) for w in weights)
        if len(weights) != len(reps) or any(w <= 0 for w in weights):
            raise ValueError("weights must be positive, one per representative")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "reps", reps)
        object.__setattr__(self, "weights", weights)
        if np.linalg.matrix_rank(np.array(reps, dtype=float)) < dim:
            raise ValueError("representatives must span R^d")

    @classmethod
    def axis(cls, d, weights=None):
        reps = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        return cls(d, reps, weights)

    @classmethod
    def from_json(cls, doc):
        return cls(int(doc["dim"]), doc["reps"], doc.get("weights"))

    def to_json(self):
        return {"dim": self.dim, "reps": [list(v) for v in self.reps],
                "weights": [str(w) for w in self.weights]}

    def tau(self, xi) -> Fraction:
        return sum((w * abs(sum(Fraction(a) * b for a, b in zip(xi, v)))
                    for v, w in zip(self.reps, self.weights)), Fraction(0))

    def stencil(self) -> ZdStencil:
        vecs = list(self.reps) + [tuple(-a for a in v) for v in self.reps]
        return ZdStencil(self.dim, vecs)

    def is_orthotropic(self):
        return all(sum(1 for a in v if a) == 1 for v in self.reps)


def zonotope_volume(a: Anisotropy) -> Fraction:
    """|K| = 2^d * sum over d-subsets of prod(w) |det|."""
    d = a.dim
    total = Fraction(0)
    for idx in itertools.combinations(range(len(a.reps)), d):
        det = int_det([a.reps[i] for i in idx])
        if det:
            prod = Fraction(1)
            for i in idx:
                prod *= a.weights[i]
            total += prod * abs(det)
    return total * 2 ** d


@dataclass(frozen=True)
class WulffConstant:
    value: float
    volume: Fraction
    perimeter: Fraction
    dim: int


def continuum_constant(a: Anisotropy) -> WulffConstant:
    """c_W = Per_tau(W) / |W|^((d-1)/d) = d |W|^(1/d) for W = K."""
    d = a.dim
    if d > 3 and not a.is_orthotropic():
        raise ValueError("exact constants are supported for d <= 3 or orthotropic stencils")
    vol = zonotope_volume(a)
    return WulffConstant(d * float(vol) ** (1.0 / d), vol, d * vol, d)


class WulffBody:
    """The zonotope K = sum w_v [-v, v] as support function, facets and vertices."""

    def __init__(self, a: Anisotropy):
        self.aniso = a
        self.facets = self._facet_normals()

    def support(self, xi) -> Fraction:
        return self.aniso.tau(xi)

    def _facet_normals(self):
        d, reps = self.aniso.dim, self.aniso.reps
        out = set()
        if d == 1:
            out.add((1,))
        for idx in itertools.combinations(range(len(reps)), d - 1):
            rows = [reps[i] for i in idx]
            n = _normal(rows, d)
            if n is None:
                continue
            g = math.gcd(*n)
            n = tuple(x // g for x in n)
            if n < tuple(-x for x in n):
                n = tuple(-x for x in n)
            out.add(n)
        return sorted(out)

    def contains_scaled(self, points: np.ndarray, rho) -> np.ndarray:
        """Exact membership of integer points in rho*K (closed)."""
        rho = Fraction(rho).limit_denominator(10 ** 9) if not isinstance(rho, Fraction) else rho
        mask = np.ones(len(points), dtype=bool)
        for n in self.facets:
            h = self.support(n) * rho
            lhs = np.abs(points @ np.array(n, dtype=np.int64)) * h.denominator
            mask &= lhs <= h.numerator
        return mask

    def vertices(self):
        if self.aniso.dim > 3:
            raise ValueError("vertex lists only for d <= 3")
        from scipy.spatial import ConvexHull
        gens = [np.array(v, dtype=float) * float(w)
                for v, w in zip(self.aniso.reps, self.aniso.weights)]
        pts = np.array([sum(s * g for s, g in zip(signs, gens))
                        for signs in itertools.product((-1, 1), repeat=len(gens))])
        if self.aniso.dim == 1:
            return np.array([[pts.min()], [pts.max()]])
        hull = ConvexHull(pts)
        return pts[hull.vertices]

    def hull_volume(self) -> float:
        from scipy.spatial import ConvexHull
        v = self.vertices()
        if self.aniso.dim == 1:
            return float(v.max() - v.min())
        return float(ConvexHull(v).volume)


def _normal(rows, d):
    """Integer normal to the span of d-1 integer rows, or None if degenerate."""
    n = []
    for j in range(d):
        minor = [[r[c] for c in range(d) if c != j] for r in rows]
        n.append((-1) ** j * (int_det(minor) if minor else 1))
    return None if all(x == 0 for x in n) else tuple(n)


def sampler(a: Anisotropy, rho, guard: int = DEFAULT_SAMPLER_GUARD) -> VertexSet:
    """Y_rho = rho K intersected with Z^d."""
    pts = _sampler_points(a, rho, guard)
    return VertexSet(map(tuple, pts.tolist()), a.stencil(), validate=False)


def _sampler_points(a: Anisotropy, rho, guard):
    body = WulffBody(a)
    d = a.dim
    bounds = []
    for i in range(d):
        e = tuple(int(i == j) for j in range(d))
        bounds.append(int(math.floor(float(a.tau(e)) * float(rho))) + 1)
    size = 1
    for b in bounds:
        size *= 2 * b + 1
    if size > guard:
        raise ResourceError(f"sampler box has {size} points (> {guard})")
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return grid[body.contains_scaled(grid, rho)]


def weighted_perimeter_points(a: Anisotropy, pts: np.ndarray) -> Fraction:
    """Per_{S,1}: sum_v w_v (#{y: y+v not in Y} + #{y: y-v not in Y})."""
    keys = {tuple(p) for p in pts.tolist()}
    total = Fraction(0)
    for v, w in zip(a.reps, a.weights):
        cnt = 0
        for y in keys:
            if tuple(p + q for p, q in zip(y, v)) not in keys:
                cnt += 1
            if tuple(p - q for p, q in zip(y, v)) not in keys:
                cnt += 1
        total += w * cnt
    return total


def weighted_perimeter(a: Anisotropy, Y) -> Fraction:
    pts = np.array(sorted(Y), dtype=np.int64).reshape(-1, a.dim)
    return weighted_perimeter_points(a, pts)


def wulff_ratio_scan(a: Anisotropy, rho_list, guard: int = DEFAULT_SAMPLER_GUARD):
    c = continuum_constant(a).value
    d = a.dim
    rows = []
    for rho in rho_list:
        pts = _sampler_points(a, rho, guard)
        n = len(pts)
        per = weighted_perimeter_points(a, pts)
        ratio = float(per) / n ** ((d - 1) / d)
        rows.append({"rho": rho, "size": n, "perimeter": per, "ratio": ratio,
                     "c_wulff": c, "rel_err": (ratio - c) / c})
    return rows


def fiber_lift_ratio(d: int, m: int, rho_list):
    """Ratios of fiber-saturated lifts of axis samplers in Z^d x Z_m.

    Generators are the axis steps on the base and +-1 in the fiber; the lift
    of E is E x Z_m and its boundary is counted directly on the product.
    """
    if m < 1:
        raise ValueError("fiber size must be positive")
    a = Anisotropy.axis(d)
    target = 2 * d * m ** (1.0 / d)
    gens = []
    for i in range(d):
        e = tuple(int(i == j) for j in range(d))
        gens.append((e, 0))
        gens.append((tuple(-x for x in e), 0))
    if m > 1:
        gens += [((0,) * d, 1), ((0,) * d, -1)]
    rows = []
    for rho in rho_list:
        base = [tuple(p) for p in _sampler_points(a, rho, DEFAULT_SAMPLER_GUARD).tolist()]
        lift = {(u, k) for u in base for k in range(m)}
        per = 0
        for (u, k) in lift:
            for (du, dk) in gens:
                z = (tuple(p + q for p, q in zip(u, du)), (k + dk) % m)
                if z not in lift:
                    per += 1
        ratio = per / len(lift) ** ((d - 1) / d)
        rows.append({"rho": rho, "size": len(lift), "perimeter": per, "ratio": ratio,
                     "target": target, "rel_err": (ratio - target) / target})
    return rows


# ---------------------------------------------------------------------------
# lattice inequalities used as property oracles


def projections(Y, d):
    return [{y[:i] + y[i + 1:] for y in Y} for i in range(d)]


def column_count_bound(Y, d) -> int:
    """2 * sum_i |pi_i(Y)|, a lower bound for the axis directed perimeter."""
    return 2 * sum(len(p) for p in projections(Y, d))


def loomis_whitney(Y, d):
    """Return (|Y|^(d-1), prod_i |pi_i(Y)|)."""
    prod = 1
    for p in projections(Y, d):
        prod *= len(p)
    return len(Y) ** (d - 1), prod


def unimodular_image(B, Y):
    """Apply the inverse of the unimodular matrix B to every point of Y."""
    from .cayley import int_adjugate
    det = int_det(B)
    if det not in (1, -1):
        raise ValueError("B must be unimodular")
    adj = int_adjugate(B)
    inv = [[det * x for x in r] for r in adj]
    return {tuple(sum(inv[i][k] * y[k] for k in range(len(y))) for i in range(len(y))) for y in Y}
