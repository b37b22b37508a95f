"""Grid TV energies on cube samplers and their convergence to anisotropic perimeter."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import DegenerateInputError, ResourceError
from .wulff import Anisotropy

IN, OUT = "in", "out"
DEFAULT_CELL_GUARD = 20_000_000


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class AxisBox:
    lo: tuple
    hi: tuple

    @property
    def dim(self):
        return len(self.lo)


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float
    dim: int = 2


@dataclass(frozen=True)
class Ellipse:
    center: tuple
    a: float
    b: float
    dim: int = 2


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: tuple  # counter-clockwise
    dim: int = 2


def shape_from_json(doc):
    kind = doc["shape"].lower()
    if kind in ("box", "axisbox"):
        return AxisBox(tuple(Fraction(x) for x in doc["lo"]), tuple(Fraction(x) for x in doc["hi"]))
    if kind == "disk":
        return Disk(tuple(doc.get("center", (0.0, 0.0))), float(doc.get("radius", 1.0)))
    if kind == "ellipse":
        return Ellipse(tuple(doc.get("center", (0.0, 0.0))), float(doc["a"]), float(doc["b"]))
    if kind in ("polygon", "convexpolygon"):
        return ConvexPolygon(tuple(tuple(map(float, v)) for v in doc["vertices"]))
    raise ValueError(f"unknown shape {kind!r}")


def _bbox(E):
    if isinstance(E, AxisBox):
        return [float(x) for x in E.lo], [float(x) for x in E.hi]
    if isinstance(E, Disk):
        return [c - E.radius for c in E.center], [c + E.radius for c in E.center]
    if isinstance(E, Ellipse):
        return [E.center[0] - E.a, E.center[1] - E.b], [E.center[0] + E.a, E.center[1] + E.b]
    if isinstance(E, ConvexPolygon):
        v = np.array(E.vertices)
        return list(v.min(axis=0)), list(v.max(axis=0))
    raise ValueError(f"unsupported shape {E!r}")


# ---------------------------------------------------------------------------
# samplers


@dataclass(frozen=True)
class GridSet:
    k: int                 # mesh h = 1/k
    dim: int
    cells: frozenset       # integer indices x, cube x*h + [0,h)^d

    @property
    def h(self) -> Fraction:
        return Fraction(1, self.k)

    def __len__(self):
        return len(self.cells)

    def array(self) -> np.ndarray:
        if not self.cells:
            return np.zeros((0, self.dim), dtype=np.int64)
        return np.array(sorted(self.cells), dtype=np.int64)


def mesh_index(h) -> int:
    h = Fraction(h)
    if h <= 0 or h.numerator != 1:
        raise ValueError("mesh must be 1/k for a positive integer k")
    return h.denominator


def sample(E, h, mode=IN, guard: int = DEFAULT_CELL_GUARD) -> GridSet:
    """In: cube inside E.  Out: cube meets E."""
    if mode not in (IN, OUT):
        raise ValueError("mode must be 'in' or 'out'")
    k = mesh_index(h)
    d = E.dim
    if isinstance(E, AxisBox):
        return GridSet(k, d, frozenset(_box_cells(E, k, mode)))
    lo, hi = _bbox(E)
    if not all(map(math.isfinite, lo + hi)):
        raise ValueError("shape must be bounded")
    ilo = [math.floor(x * k) - 1 for x in lo]
    ihi = [math.ceil(x * k) + 1 for x in hi]
    n = 1
    for a, b in zip(ilo, ihi):
        n *= b - a
    if n > guard:
        raise ResourceError(f"sampler window has {n} cells (> {guard})")
    xs = np.arange(ilo[0], ihi[0])
    ys = np.arange(ilo[1], ihi[1])
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    x0, y0 = X / k, Y / k
    x1, y1 = (X + 1) / k, (Y + 1) / k
    if isinstance(E, (Disk, Ellipse)):
        cx, cy = E.center
        sx, sy = (E.radius, E.radius) if isinstance(E, Disk) else (E.a, E.b)
        u0, u1 = (x0 - cx) / sx, (x1 - cx) / sx
        v0, v1 = (y0 - cy) / sy, (y1 - cy) / sy
        if mode == IN:
            fx = np.maximum(np.abs(u0), np.abs(u1))
            fy = np.maximum(np.abs(v0), np.abs(v1))
            mask = fx * fx + fy * fy <= 1.0
        else:
            nx = np.clip(0.0, u0, u1)
            ny = np.clip(0.0, v0, v1)
            mask = nx * nx + ny * ny < 1.0
    else:
        mask = _polygon_mask(np.array(E.vertices, dtype=float), x0, y0, x1, y1, mode)
    idx = np.argwhere(mask)
    cells = {(int(a) + ilo[0], int(b) + ilo[1]) for a, b in idx}
    return GridSet(k, d, frozenset(cells))


def _box_cells(E, k, mode):
    ranges = []
    for lo, hi in zip(E.lo, E.hi):
        lo, hi = Fraction(lo) * k, Fraction(hi) * k
        if mode == IN:
            a, b = math.ceil(lo), math.floor(hi)       # x >= lo, x + 1 <= hi
        else:
            a, b = math.floor(lo), math.ceil(hi)       # x < hi, x + 1 > lo
        ranges.append(range(a, b))
    import itertools
    return itertools.product(*ranges)


def _polygon_mask(V, x0, y0, x1, y1, mode):
    n = len(V)
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    if mode == IN:
        mask = np.ones(x0.shape, dtype=bool)
        for i in range(n):
            p, q = V[i], V[(i + 1) % n]
            ex, ey = q - p
            for cx, cy in corners:
                mask &= ex * (cy - p[1]) - ey * (cx - p[0]) >= 0
        return mask
    mask = np.ones(x0.shape, dtype=bool)
    # separating axes: polygon edge normals
    for i in range(n):
        p, q = V[i], V[(i + 1) % n]
        ex, ey = q - p
        vals = [ex * (cy - p[1]) - ey * (cx - p[0]) for cx, cy in corners]
        mask &= ~np.all(np.stack(vals) <= 0, axis=0)
    # axis-aligned axes
    mask &= (x0 < V[:, 0].max()) & (x1 > V[:, 0].min())
    mask &= (y0 < V[:, 1].max()) & (y1 > V[:, 1].min())
    return mask


# ---------------------------------------------------------------------------
# energies


def _bond_count(A: GridSet, p) -> int:
    cells = A.cells
    cnt = 0
    for x in cells:
        if tuple(a + b for a, b in zip(x, p)) not in cells:
            cnt += 1
        if tuple(a - b for a, b in zip(x, p)) not in cells:
            cnt += 1
    return cnt


def orthotropic_energy(A: GridSet, weights=None) -> Fraction:
    """h^(d-1) * sum_i w_i * (number of faces normal to e_i with a jump)."""
    d = A.dim
    w = [Fraction(1)] * d if weights is None else [Fraction(x) for x in weights]
    if len(w) != d or any(x <= 0 for x in w):
        raise ValueError("one positive weight per axis")
    total = Fraction(0)
    for i in range(d):
        e = tuple(int(i == j) for j in range(d))
        total += w[i] * _bond_count(A, e)
    return total * A.h ** (d - 1)


def voxel_tv(A: GridSet, weights=None) -> Fraction:
    """Weighted face measure of the union of cubes, from a dense indicator array."""
    d = A.dim
    w = [Fraction(1)] * d if weights is None else [Fraction(x) for x in weights]
    if not A.cells:
        return Fraction(0)
    pts = A.array()
    lo = pts.min(axis=0) - 1
    shape = tuple(pts.max(axis=0) - lo + 2)
    grid = np.zeros(shape, dtype=np.int8)
    grid[tuple((pts - lo).T)] = 1
    total = Fraction(0)
    for i in range(d):
        total += w[i] * int(np.abs(np.diff(grid, axis=i)).sum())
    return total * A.h ** (d - 1)


def stencil_energy(A: GridSet, reps, weights=None) -> Fraction:
    """h^(d-1) * sum_p alpha_p * #{undirected p-bonds with a jump}."""
    reps = [tuple(int(a) for a in p) for p in reps]
    if any(all(a == 0 for a in p) for p in reps):
        raise ValueError("zero vector in stencil")
    w = [Fraction(1)] * len(reps) if weights is None else [Fraction(x) for x in weights]
    if len(w) != len(reps) or any(x <= 0 for x in w):
        raise ValueError("one positive weight per stencil vector")
    total = Fraction(0)
    for p, a in zip(reps, w):
        total += a * _bond_count(A, p)
    return total * A.h ** (A.dim - 1)


# ---------------------------------------------------------------------------
# continuum perimeter


def _phi(aniso: Anisotropy, nu):
    return sum(float(w) * abs(sum(a * b for a, b in zip(nu, p)))
               for p, w in zip(aniso.reps, aniso.weights))


def continuum_tv(E, phi: Anisotropy | None = None) -> float:
    """Integral of phi(normal) over the boundary of E."""
    if phi is None:
        phi = Anisotropy.axis(E.dim)
    if isinstance(E, AxisBox):
        d = E.dim
        side = [float(h) - float(l) for l, h in zip(E.lo, E.hi)]
        total = 0.0
        for i in range(d):
            area = 1.0
            for j in range(d):
                if j != i:
                    area *= side[j]
            e = tuple(float(i == j) for j in range(d))
            total += 2 * area * _phi(phi, e)
        return total
    if isinstance(E, ConvexPolygon):
        V = E.vertices
        total = 0.0
        for i in range(len(V)):
            (px, py), (qx, qy) = V[i], V[(i + 1) % len(V)]
            total += _phi(phi, (qy - py, -(qx - px)))
        return total
    if isinstance(E, (Disk, Ellipse)):
        sa, sb = (E.radius, E.radius) if isinstance(E, Disk) else (E.a, E.b)
        kinks = set()
        for p in phi.reps:
            # phi term vanishes where b p1 cos + a p2 sin = 0
            base = math.atan2(-sb * p[0], sa * p[1])
            for k in range(-2, 3):
                t = base + k * math.pi
                if 0 < t < 2 * math.pi:
                    kinks.add(t)
        pts = sorted(kinks)
        f = lambda t: _phi(phi, (sb * math.cos(t), sa * math.sin(t)))
        edges = [0.0] + pts + [2 * math.pi]
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            val, _ = integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)
            total += val
        return total
    raise ValueError(f"unsupported shape {E!r}")


# ---------------------------------------------------------------------------
# rates


@dataclass
class RateFit:
    slope: float | None
    constant: float | None
    exact: bool
    rows: list
    slope_out: float | None = None

    @property
    def status(self):
        return "exact, rate undefined" if self.exact else f"slope {self.slope:.4f}"


def _energy(A, phi, stencil):
    if stencil:
        return stencil_energy(A, phi.reps, phi.weights)
    if not phi.is_orthotropic():
        raise ValueError("orthotropic energy needs an axis anisotropy; pass stencil=True")
    w = [Fraction(0)] * A.dim
    for p, a in zip(phi.reps, phi.weights):
        i = next(j for j, v in enumerate(p) if v)
        w[i] += a * abs(p[i])
    return orthotropic_energy(A, w)


def _lsq(hs, errs):
    x = np.log(np.array(hs, dtype=float))
    y = np.log(np.array(errs, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(math.exp(intercept))


def rate_fit(E, phi: Anisotropy | None = None, h_list=None, stencil=False) -> RateFit:
    """Fit log|E_h - TV| against log h for in- and out-samplers."""
    if phi is None:
        phi = Anisotropy.axis(E.dim)
    if h_list is None:
        h_list = [Fraction(1, 2 ** j) for j in range(4, 9)]
    if len(h_list) < 2:
        raise ValueError("need at least two meshes")
    tv = continuum_tv(E, phi)
    rows = []
    for h in h_list:
        e_in = float(_energy(sample(E, h, IN), phi, stencil))
        e_out = float(_energy(sample(E, h, OUT), phi, stencil))
        rows.append({"h": float(Fraction(h)), "E_in": e_in, "E_out": e_out, "TV": tv,
                     "err_in": abs(e_in - tv), "err_out": abs(e_out - tv)})
    tol = 1e-12 * max(1.0, abs(tv))
    if all(r["err_in"] <= tol for r in rows):
        return RateFit(None, None, True, rows)
    if any(r["err_in"] <= tol for r in rows):
        raise DegenerateInputError("some meshes are exact; slope undefined")
    hs = [r["h"] for r in rows]
    slope, const = _lsq(hs, [r["err_in"] for r in rows])
    slope_out = None
    if all(r["err_out"] > tol for r in rows):
        slope_out, _ = _lsq(hs, [r["err_out"] for r in rows])
    return RateFit(slope, const, False, rows, slope_out)
