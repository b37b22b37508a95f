"""Gauge calculus for Heisenberg and step-2 lattices.

A step-2 lattice is ``Z^d x Z^m`` with product
``(x, h) * (y, k) = (x + y, h + k + omega(x, y))`` for an upper-triangular
bilinear cocycle ``omega``.  In gauge coordinates ``h# = h - zeta(x)`` with
``zeta(x) = omega(x, x)`` a right step by ``e_k`` moves the gauge height by
``sigma_k(x) = -sum_{j>k} x_j omega(e_k, e_j)``.  For the Heisenberg group
``(x, y, z)`` with ``z`` picking up ``x * y'`` this is ``h = z - x y`` and a right
``a`` step sends ``h`` to ``h - y``.

A column stack places a half-open box ``prod [h_j, h_j + l_j)`` of gauge
heights over each footprint point.  Its horizontal boundary splits into
footprint-boundary columns plus one interval (or box) symmetric difference
per interior base edge.  The lifted vertex set, with edges taken from the
group law, is the independent oracle for every identity here.

Shift convention: for an interior edge ``u -> u+v`` we write
``t(e) = h(u) - h(u+v) + sigma_v(u)`` and the edge contributes
``interval_sd(l(u), l(u+v), -t)``.  Only ``|t|`` enters the cap-loss
functional, so the opposite global sign used elsewhere is immaterial.
"""

from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .cayley import Heisenberg, Step2
from .curlfit import Cochain, GridComplex, H1
from .errors import DegenerateInputError, EncodingError, ResourceError

LIFT_GUARD = 1_000_000

HEISENBERG_OMEGA = (((0,), (1,)), ((0,), (0,)))


# ---------------------------------------------------------------------------
# gauge maps


def gauge(g):
    """Heisenberg (x, y, z) -> (x, y, z - x y)."""
    x, y, z = g
    return (x, y, z - x * y)


def inverse_gauge(p):
    x, y, h = p
    return (x, y, h + x * y)


def _form(omega, x, y):
    m = len(omega[0][0]) if omega and omega[0] else 0
    out = [0] * m
    d = len(x)
    for i in range(d):
        if not x[i]:
            continue
        for j in range(i + 1, d):
            if y[j]:
                for r, w in enumerate(omega[i][j]):
                    out[r] += x[i] * y[j] * w
    return tuple(out)


def step2_gauge(omega, g):
    x, h = g
    z = _form(omega, x, x)
    return (tuple(x), tuple(a - b for a, b in zip(h, z)))


def step2_inverse_gauge(omega, p):
    x, h = p
    z = _form(omega, x, x)
    return (tuple(x), tuple(a + b for a, b in zip(h, z)))


def shift(omega, x, k, sign=1):
    """Gauge offset of a right step by sign * e_k from base point x."""
    m = len(omega[0][0])
    out = [0] * m
    for j in range(k + 1, len(x)):
        if x[j]:
            for r, w in enumerate(omega[k][j]):
                out[r] -= x[j] * w
    return tuple(out) if sign > 0 else tuple(-a for a in out)


def shift_cochain_curl(omega, i, j, x):
    """(dc)_ij at x for the cochain c_k = shift(., k); constant in x."""
    ei = tuple(int(a == i) for a in range(len(x)))
    ej = tuple(int(a == j) for a in range(len(x)))
    xi = tuple(a + b for a, b in zip(x, ei))
    xj = tuple(a + b for a, b in zip(x, ej))
    c = lambda p, k: shift(omega, p, k)
    return tuple(a + b - e - f for a, b, e, f in zip(c(x, i), c(xi, j), c(xj, i), c(x, j)))


def validate_cocycle(omega):
    d = len(omega)
    if d < 1 or any(len(r) != d for r in omega):
        raise EncodingError("cocycle must be a d x d array")
    m = len(omega[0][0])
    for i in range(d):
        for j in range(d):
            v = tuple(int(a) for a in omega[i][j])
            if len(v) != m:
                raise EncodingError("cocycle entries must share the center rank")
            if j <= i and any(v):
                raise EncodingError("cocycle must be strictly upper-triangular")
    return tuple(tuple(tuple(int(a) for a in omega[i][j]) for j in range(d)) for i in range(d))


# ---------------------------------------------------------------------------
# interval symmetric differences


def interval_sd(alpha: int, beta: int, t: int) -> int:
    """#([0, alpha) symmetric-difference [t, t + beta)) in closed form."""
    if alpha < 0 or beta < 0:
        raise ValueError("lengths must be nonnegative")
    delta = abs(alpha - beta)
    dist = max(t - max(alpha - beta, 0), 0) + max(-t - max(beta - alpha, 0), 0)
    return delta + 2 * min(dist, min(alpha, beta))


def interval_sd_brute(alpha: int, beta: int, t: int) -> int:
    return len(set(range(alpha)) ^ set(range(t, t + beta)))


def per_edge_bounds(alpha, beta, t):
    """(lower, value, upper) with A = max(alpha, beta)."""
    delta = abs(alpha - beta)
    a = max(alpha, beta)
    core = 2 * min(abs(t), a)
    return core - delta, interval_sd(alpha, beta, t), delta + core


def per_edge_bounds_check(alpha, beta, t) -> bool:
    lo, val, hi = per_edge_bounds(alpha, beta, t)
    return lo <= val <= hi


def cycle_median_check(a):
    """Return (sum |a_i - median|, sum |a_{i+1} - a_i|) for a cyclic sequence."""
    if not a:
        raise DegenerateInputError("empty sequence")
    med = statistics.median_low(a)
    n = len(a)
    return (sum(abs(x - med) for x in a),
            sum(abs(a[(i + 1) % n] - a[i]) for i in range(n)))


# ---------------------------------------------------------------------------
# column stacks


@dataclass
class ColumnStack:
    """Half-open gauge boxes [h, h + l) over a finite footprint."""

    d: int
    m: int
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for u, (h, l) in self.columns.items():
            u = tuple(int(a) for a in u)
            h = tuple(int(a) for a in (h if isinstance(h, (tuple, list)) else (h,)))
            l = tuple(int(a) for a in (l if isinstance(l, (tuple, list)) else (l,)))
            if len(u) != self.d or len(h) != self.m or len(l) != self.m:
                raise EncodingError(f"column {u!r} has wrong dimensions")
            if any(a < 0 for a in l):
                raise EncodingError(f"negative height at {u!r}")
            clean[u] = (h, l)
        self.columns = clean

    @property
    def footprint(self):
        return set(self.columns)

    def offset(self, u):
        return self.columns[u][0]

    def height(self, u):
        return self.columns[u][1]

    def volume(self):
        return sum(math.prod(l) for _, l in self.columns.values())

    def nondegenerate(self):
        return all(min(l) >= 1 for _, l in self.columns.values())

    def to_json(self):
        return {"d": self.d, "m": self.m,
                "columns": [{"u": list(u), "h": list(h), "l": list(l)}
                            for u, (h, l) in sorted(self.columns.items())]}

    @classmethod
    def from_json(cls, doc):
        cols = {tuple(c["u"]): (tuple(c["h"]), tuple(c["l"])) for c in doc["columns"]}
        return cls(int(doc["d"]), int(doc["m"]), cols)

    def lift(self, omega, guard: int = LIFT_GUARD):
        """Group elements (x, h) of the lifted set in group coordinates."""
        if self.volume() > guard:
            raise ResourceError(f"lift has {self.volume()} points (> {guard})")
        out = set()
        for u, (h, l) in self.columns.items():
            z = _form(omega, u, u)
            for k in itertools.product(*[range(a, a + n) for a, n in zip(h, l)]):
                out.add((u, tuple(a + b for a, b in zip(k, z))))
        return out


def heisenberg_stack(columns) -> ColumnStack:
    """Convenience constructor for d = 2, m = 1 from {u: (h, l)} with scalars."""
    return ColumnStack(2, 1, {u: ((h,), (l,)) for u, (h, l) in columns.items()})


def heisenberg_lift(stack: ColumnStack):
    """Lift as Heisenberg triples (x, y, z)."""
    return {inverse_gauge((u[0], u[1], z)) for u, (h, l) in stack.columns.items()
            for z in range(h[0], h[0] + l[0])}


def _unit(d, i, s=1):
    return tuple(s * int(a == i) for a in range(d))


def direct_horizontal_count(stack: ColumnStack, omega) -> int:
    """#{(g, s): g in lift, s = +-e_k, g s not in lift} from the group law."""
    omega = validate_cocycle(omega)
    G = Step2(stack.d, stack.m, omega)
    Y = stack.lift(omega)
    gens = [(_unit(stack.d, k, s), (0,) * stack.m) for k in range(stack.d) for s in (1, -1)]
    return sum(1 for g in Y for s in gens if G.mul(g, s) not in Y)


def direct_heisenberg_count(stack: ColumnStack) -> int:
    """Same count on genuine Heisenberg triples."""
    G = Heisenberg()
    Y = heisenberg_lift(stack)
    return sum(1 for g in Y for k in range(4) if G.step(g, k) not in Y)


def direct_vertical_count(stack: ColumnStack, omega) -> int:
    omega = validate_cocycle(omega)
    Y = stack.lift(omega)
    gens = [_unit(stack.m, j, s) for j in range(stack.m) for s in (1, -1)]
    return sum(1 for (x, h) in Y for c in gens
               if (x, tuple(a + b for a, b in zip(h, c))) not in Y)


def vertical_count(stack: ColumnStack) -> int:
    """Closed form: sum_u sum_j 2 [l_j >= 1] prod_{k != j} l_k."""
    total = 0
    for _, l in stack.columns.values():
        for j in range(stack.m):
            if l[j] >= 1:
                total += 2 * math.prod(l[k] for k in range(stack.m) if k != j)
    return total


def _edges(stack: ColumnStack):
    """Yield ('bd', u, None) for boundary base edges and ('int', u, k) for interior ones."""
    E = stack.columns
    for u in sorted(E):
        for k in range(stack.d):
            for s in (1, -1):
                w = tuple(a + b for a, b in zip(u, _unit(stack.d, k, s)))
                if w not in E:
                    yield "bd", u, None
                elif s == 1:
                    yield "int", u, k


def edge_shift(stack: ColumnStack, omega, u, k):
    """t(e) for the interior edge u -> u + e_k (vector of length m)."""
    w = tuple(a + b for a, b in zip(u, _unit(stack.d, k)))
    sig = shift(omega, u, k)
    return tuple(a - b + c for a, b, c in zip(stack.offset(u), stack.offset(w), sig))


class Decomposition(NamedTuple):
    boundary_term: int
    delta_term: int
    shear_term: int
    total: int


def heis_decompose(stack: ColumnStack, omega=HEISENBERG_OMEGA) -> Decomposition:
    """Exact split of the horizontal boundary for rank-one centers."""
    if stack.m != 1:
        raise EncodingError("the exact decomposition needs a rank-one center")
    omega = validate_cocycle(omega)
    bd = dl = sh = 0
    for kind, u, k in _edges(stack):
        a = stack.height(u)[0]
        if kind == "bd":
            bd += a
            continue
        w = tuple(p + q for p, q in zip(u, _unit(stack.d, k)))
        b = stack.height(w)[0]
        t = edge_shift(stack, omega, u, k)[0]
        val = interval_sd(a, b, -t)
        delta = abs(a - b)
        dl += delta
        sh += val - delta
    return Decomposition(bd, dl, sh, bd + dl + sh)


class Bounds(NamedTuple):
    lower: int
    upper: int
    direct: int


def step2_bounds(stack: ColumnStack, omega, direct: bool = True) -> Bounds:
    """Two-sided bounds from per-axis interval differences times cross-sections."""
    omega = validate_cocycle(omega)
    if len(omega) != stack.d or len(omega[0][0]) != stack.m:
        raise EncodingError("cocycle shape does not match the stack")
    lower = upper = 0
    for kind, u, k in _edges(stack):
        a = stack.height(u)
        if kind == "bd":
            lower += math.prod(a)
            upper += math.prod(a)
            continue
        w = tuple(p + q for p, q in zip(u, _unit(stack.d, k)))
        b = stack.height(w)
        t = edge_shift(stack, omega, u, k)
        sd = [interval_sd(x, y, -s) for x, y, s in zip(a, b, t)]
        cap = [len(set(range(x)) & set(range(-s, -s + y))) for x, y, s in zip(a, b, t)]
        big = [max(x, y) for x, y in zip(a, b)]
        for j in range(stack.m):
            lower += sd[j] * math.prod(cap[i] for i in range(stack.m) if i != j)
            upper += sd[j] * math.prod(big[i] for i in range(stack.m) if i != j)
    count = direct_horizontal_count(stack, omega) if direct else -1
    return Bounds(lower, upper, count)


# ---------------------------------------------------------------------------
# coarea on the base grid


def grid_perimeter(E, d) -> int:
    """Undirected axis edges with exactly one endpoint in E."""
    E = set(E)
    out = 0
    for u in E:
        for k in range(d):
            for s in (1, -1):
                if tuple(a + b for a, b in zip(u, _unit(d, k, s))) not in E:
                    out += 1
    return out


def base_variation(ell: dict, d: int) -> int:
    """sum over axis directions and base points of |l(u + e_k) - l(u)|."""
    pts = set(ell)
    for u in list(ell):
        for k in range(d):
            pts.add(tuple(a - b for a, b in zip(u, _unit(d, k))))
    total = 0
    for u in pts:
        for k in range(d):
            w = tuple(a + b for a, b in zip(u, _unit(d, k)))
            total += abs(ell.get(w, 0) - ell.get(u, 0))
    return total


def coarea_check(ell: dict, d: int):
    """Return (base variation, sum over levels of grid perimeters)."""
    if any(v < 0 for v in ell.values()):
        raise ValueError("heights must be nonnegative")
    top = max(ell.values(), default=0)
    levels = sum(grid_perimeter([u for u, v in ell.items() if v >= k], d)
                 for k in range(1, top + 1))
    return base_variation(ell, d), levels


def linf_depth(E, d) -> dict:
    """Largest r with u + [-r, r]^d inside E (0 on the rim)."""
    E = set(E)
    depth = {}
    for u in E:
        r = 0
        while True:
            nxt = r + 1
            ok = all(tuple(a + b for a, b in zip(u, off)) in E
                     for off in itertools.product(range(-nxt, nxt + 1), repeat=d)
                     if max(abs(o) for o in off) == nxt)
            if not ok:
                break
            r = nxt
        depth[u] = r
    return depth


def erosion(E, r, d):
    return {u for u, v in linf_depth(E, d).items() if v >= r}


def tapered_profile(E, d, cap, slope) -> dict:
    """l(u) = floor(min(cap, slope * depth(u))) on E."""
    return {u: int(math.floor(min(Fraction(cap), Fraction(slope) * r)))
            for u, r in linf_depth(E, d).items()}


def square_footprint(rho):
    """Axis Wulff sampler in Z^2: the square [-rho, rho]^2."""
    return {(x, y) for x in range(-rho, rho + 1) for y in range(-rho, rho + 1)}


# ---------------------------------------------------------------------------
# blockwise curl fit and cap-loss


def _shear(u, k):
    """Shear cochain c(u -> u + e_k): y on e_1 edges, 0 on e_2 edges."""
    return u[1] if k == 0 else 0


def _box_fit(points):
    """Integer potential with c + dh small on the bounding box of points.

    The residual of the lexicographic fit depends on the curl only, so the
    choice of base corner does not matter.
    """
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, y0 = min(xs), min(ys)
    K = GridComplex((max(xs) - x0 + 1, max(ys) - y0 + 1))
    vals = {}
    for k, x in K.edges():
        c = _shear((x[0] + x0, x[1] + y0), k)
        if c:
            vals[(k, x)] = -c
    pot = H1(Cochain(1, K, vals))
    return {p: int(pot[(p[0] - x0, p[1] - y0)]) for p in points}


class CapLossRow(NamedTuple):
    rho: int
    block: int
    caploss: int
    surrogate: int
    core: int
    skeleton: int
    cross: int
    normalized: float
    surrogate_normalized: float
    scale: int


def blockwise_offsets(E, L):
    """Integer offsets from block core fits, one skeleton fit and median sync.

    A block core keeps the points of the block at l1 distance at least 2 from
    the block complement, so neighbouring cores are separated by a skeleton
    strip of width two.
    """
    E = set(E)
    if L < 1:
        raise ValueError("block size must be positive")
    blocks = {}
    for u in E:
        q = (u[0] // L, u[1] // L)
        lo = (q[0] * L, q[1] * L)
        inner = all(lo[i] + 1 <= u[i] <= lo[i] + L - 2 for i in range(2))
        if inner:
            blocks.setdefault(q, set()).add(u)
    core_of = {u: q for q, pts in blocks.items() for u in pts}
    skeleton = E - set(core_of)
    h = {}
    if skeleton:
        h.update(_box_fit(skeleton))
    local = {q: _box_fit(pts) for q, pts in blocks.items()}
    for q, pts in blocks.items():
        diffs = []
        for u in pts:
            for k in range(2):
                for s in (1, -1):
                    w = (u[0] + s * (k == 0), u[1] + s * (k == 1))
                    if w in skeleton:
                        c = _shear(u, k) if s == 1 else -_shear(w, k)
                        diffs.append(c + h[w] - local[q][u])
        lam = round(statistics.median(diffs)) if diffs else 0
        for u in pts:
            h[u] = local[q][u] + lam
    return h, core_of, skeleton


def caploss(E, ell, h, core_of=None):
    """Return (sum (|t| - A)_+, sum |t|, per-class sums of |t|) over interior edges."""
    core_of = core_of or {}
    loss = total = 0
    parts = {"core": 0, "skeleton": 0, "cross": 0}
    for u in E:
        for k in range(2):
            w = (u[0] + (k == 0), u[1] + (k == 1))
            if w not in E:
                continue
            t = abs(_shear(u, k) + h[w] - h[u])
            total += t
            loss += max(t - max(ell.get(u, 0), ell.get(w, 0)), 0)
            cu, cw = core_of.get(u), core_of.get(w)
            if cu is not None and cu == cw:
                parts["core"] += t
            elif cu is None and cw is None:
                parts["skeleton"] += t
            else:
                parts["cross"] += t
    return loss, total, parts


def sqrt_rule(rho):
    return max(1, math.isqrt(rho))


def caploss_experiment(rho_list, L_rule=sqrt_rule, cap_coeff=Fraction(1, 8),
                       slope_coeff=Fraction(1, 4)):
    """CapLoss of blockwise offsets over tapered stacks on square samplers.

    Heights follow the taper with cap ``cap_coeff * rho^2`` and slope
    ``floor(slope_coeff * rho)`` (at least 1).
    """
    rows = []
    for rho in rho_list:
        E = square_footprint(rho)
        slope = max(1, math.floor(slope_coeff * rho))
        ell = tapered_profile(E, 2, cap_coeff * rho * rho, slope)
        L = int(L_rule(rho))
        h, core_of, _ = blockwise_offsets(E, L)
        loss, total, parts = caploss(E, ell, h, core_of)
        rows.append(CapLossRow(rho, L, loss, total, parts["core"], parts["skeleton"],
                               parts["cross"], loss / rho ** 3, total / rho ** 3,
                               L * rho ** 2 + rho ** 3 // L))
    return rows


def fitted_constant(rows) -> float:
    """Smallest C0 with surrogate <= C0 (L rho^2 + rho^3 / L) on all rows."""
    return max(r.surrogate / r.scale for r in rows)


# ---------------------------------------------------------------------------
# random instances


def random_stack(rng, d=2, m=1, max_side=8, max_height=12, max_offset=10, fill=0.7):
    """Random stack on a sub-box of the footprint grid; ``rng`` is a random.Random."""
    sides = [rng.randint(1, max_side) for _ in range(d)]
    cols = {}
    for u in itertools.product(*[range(s) for s in sides]):
        if rng.random() < fill:
            h = tuple(rng.randint(-max_offset, max_offset) for _ in range(m))
            l = tuple(rng.randint(0, max_height) for _ in range(m))
            cols[u] = (h, l)
    if not cols:
        cols[(0,) * d] = ((0,) * m, (1,) * m)
    return ColumnStack(d, m, cols)


def check_heis_stack(stack: ColumnStack):
    """Every Heisenberg identity on one stack; returns a list of failures."""
    dec = heis_decompose(stack)
    direct = direct_heisenberg_count(stack)
    lift = direct_horizontal_count(stack, HEISENBERG_OMEGA)
    bd = step2_bounds(stack, HEISENBERG_OMEGA, direct=False)
    bad = []
    if not dec.total == direct == lift == bd.lower == bd.upper:
        bad.append({"decomposition": dec.total, "heisenberg_lift": direct,
                    "step2_lift": lift, "lower": bd.lower, "upper": bd.upper})
    if vertical_count(stack) != direct_vertical_count(stack, HEISENBERG_OMEGA):
        bad.append({"vertical": vertical_count(stack),
                    "vertical_direct": direct_vertical_count(stack, HEISENBERG_OMEGA)})
    return bad
