"""Cochains on rectangular grids, lexicographic homotopies and l1 curl-fitting.

All arithmetic is exact (``fractions.Fraction``).  Axes are 0-based here.
Cochains are sparse dictionaries:

* degree 0: ``x -> value``
* degree 1: ``(i, x) -> value`` for the edge ``x -> x + e_i``
* degree 2: ``((j, k), x) -> value`` for the face spanned by ``e_j, e_k`` at ``x``, ``j < k``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import InfeasibleError, ResourceError


@dataclass(frozen=True)
class GridComplex:
    N: tuple

    def __init__(self, N):
        N = tuple(int(n) for n in N)
        if not N or any(n < 1 for n in N):
            raise ValueError("side lengths must be positive")
        object.__setattr__(self, "N", N)

    @property
    def dim(self):
        return len(self.N)

    def vertices(self):
        return itertools.product(*[range(n) for n in self.N])

    def edges(self):
        for i in range(self.dim):
            ranges = [range(n - 1) if a == i else range(n) for a, n in enumerate(self.N)]
            for x in itertools.product(*ranges):
                yield (i, x)

    def faces(self):
        for j, k in itertools.combinations(range(self.dim), 2):
            ranges = [range(n - 1) if a in (j, k) else range(n) for a, n in enumerate(self.N)]
            for x in itertools.product(*ranges):
                yield ((j, k), x)

    def count(self, degree):
        return sum(1 for _ in (self.vertices, self.edges, self.faces)[degree]())

    def has_vertex(self, x):
        return all(0 <= a < n for a, n in zip(x, self.N))


def _shift(x, i, by=1):
    return x[:i] + (x[i] + by,) + x[i + 1:]


@dataclass
class Cochain:
    degree: int
    complex: GridComplex
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ValueError("degree must be 0, 1 or 2")
        valid = set((self.complex.vertices, self.complex.edges, self.complex.faces)[self.degree]())
        clean = {}
        for key, v in self.values.items():
            if key not in valid:
                raise IndexError(f"cell {key!r} not in the complex")
            v = Fraction(v)
            if v:
                clean[key] = v
        self.values = clean

    def __getitem__(self, key):
        return self.values.get(key, Fraction(0))

    def __sub__(self, other):
        vals = dict(self.values)
        for k, v in other.values.items():
            vals[k] = vals.get(k, Fraction(0)) - v
        return Cochain(self.degree, self.complex, vals)

    def __add__(self, other):
        vals = dict(self.values)
        for k, v in other.values.items():
            vals[k] = vals.get(k, Fraction(0)) + v
        return Cochain(self.degree, self.complex, vals)

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.complex == other.complex and self.values == other.values)

    def is_zero(self):
        return not self.values

    def l1(self, weights=None) -> Fraction:
        if weights is None:
            return sum((abs(v) for v in self.values.values()), Fraction(0))
        return sum((Fraction(weights[key[0]]) * abs(v) for key, v in self.values.items()),
                   Fraction(0))

    def to_json(self):
        ents = []
        for key, v in sorted(self.values.items()):
            ents.append([_jsonkey(key), v.numerator, v.denominator])
        return {"degree": self.degree, "N": list(self.complex.N), "entries": ents}

    @classmethod
    def from_json(cls, doc):
        K = GridComplex(doc["N"])
        deg = int(doc["degree"])
        vals = {}
        for idx, num, den in doc["entries"]:
            vals[_unjsonkey(idx, deg)] = Fraction(int(num), int(den))
        return cls(deg, K, vals)


def _jsonkey(key):
    if isinstance(key, tuple):
        return [_jsonkey(k) for k in key]
    return key


def _unjsonkey(idx, deg):
    if deg == 0:
        return tuple(idx)
    if deg == 1:
        return (int(idx[0]), tuple(idx[1]))
    return ((int(idx[0][0]), int(idx[0][1])), tuple(idx[1]))


# ---------------------------------------------------------------------------
# coboundaries


def d0(u: Cochain) -> Cochain:
    if u.degree != 0:
        raise ValueError("d0 takes a 0-cochain")
    K = u.complex
    return Cochain(1, K, {(i, x): u[_shift(x, i)] - u[x] for i, x in K.edges()})


def d1(c: Cochain) -> Cochain:
    if c.degree != 1:
        raise ValueError("d1 takes a 1-cochain")
    K = c.complex
    out = {}
    for (j, k), x in K.faces():
        out[((j, k), x)] = (c[(j, x)] + c[(k, _shift(x, j))]
                            - c[(j, _shift(x, k))] - c[(k, x)])
    return Cochain(2, K, out)


# ---------------------------------------------------------------------------
# lexicographic homotopies


def H1(c: Cochain) -> Cochain:
    """Potential obtained by integrating c along axis-ordered paths from 0."""
    if c.degree != 1:
        raise ValueError("H1 takes a 1-cochain")
    K = c.complex
    d = K.dim
    out = {}
    for x in K.vertices():
        total = Fraction(0)
        for i in range(d):
            head = x[:i]
            tail = (0,) * (d - i - 1)
            for t in range(x[i]):
                total += c[(i, head + (t,) + tail)]
        out[x] = total
    return Cochain(0, K, out)


def H2up(b: Cochain) -> Cochain:
    if b.degree != 2:
        raise ValueError("H2up takes a 2-cochain")
    K = b.complex
    d = K.dim
    out = {}
    for j, x in K.edges():
        total = Fraction(0)
        for k in range(j + 1, d):
            head = x[:k]
            tail = (0,) * (d - k - 1)
            for t in range(x[k]):
                total += b[((j, k), head + (t,) + tail)]
        out[(j, x)] = -total
    return Cochain(1, K, out)


def H2down(b: Cochain) -> Cochain:
    if b.degree != 2:
        raise ValueError("H2down takes a 2-cochain")
    K = b.complex
    d = K.dim
    out = {}
    for j, x in K.edges():
        total = Fraction(0)
        for k in range(j):
            head = x[:k]
            tail = (0,) * (d - k - 1)
            for t in range(x[k]):
                y = head + (t,) + tail
                if y[j] <= K.N[j] - 2:
                    total += b[((k, j), y)]
        out[(j, x)] = total
    return Cochain(1, K, out)


# ---------------------------------------------------------------------------
# constants and fits


def face_coefficient(N, k) -> int:
    """(N_k - 1) * prod_{i>k} N_i for 0-based axis k."""
    out = N[k] - 1
    for n in N[k + 1:]:
        out *= n
    return out


def c_up(N, order=None) -> int:
    """max over k >= 2 (1-based) of (N_k - 1) prod_{i>k} N_i, after reordering axes."""
    N = tuple(N[i] for i in order) if order is not None else tuple(N)
    if len(N) < 2:
        return 0
    return max(face_coefficient(N, k) for k in range(1, len(N)))


def weighted_constant(N, alpha, beta) -> Fraction:
    """max_{j<k} (alpha_j / beta_jk) (N_k - 1) prod_{i>k} N_i."""
    d = len(N)
    best = Fraction(0)
    for j, k in itertools.combinations(range(d), 2):
        val = Fraction(alpha[j]) / Fraction(beta[(j, k)]) * face_coefficient(N, k)
        best = max(best, val)
    return best


class CurlFit(NamedTuple):
    potential: Cochain
    residual_l1: Fraction
    curl_l1: Fraction
    bound: Fraction


def permute_cochain(c: Cochain, order) -> Cochain:
    """Relabel axes so that new axis a is old axis order[a]."""
    order = tuple(order)
    pos = {old: new for new, old in enumerate(order)}
    K = GridComplex([c.complex.N[i] for i in order])

    def mapx(x):
        return tuple(x[i] for i in order)

    vals = {}
    for key, v in c.values.items():
        if c.degree == 0:
            vals[mapx(key)] = v
        elif c.degree == 1:
            vals[(pos[key[0]], mapx(key[1]))] = v
        else:
            (j, k), x = key
            a, b = pos[j], pos[k]
            if a < b:
                vals[((a, b), mapx(x))] = v
            else:
                vals[((b, a), mapx(x))] = -v
    return Cochain(c.degree, K, vals)


def curl_fit(c: Cochain, order=None) -> CurlFit:
    """Fit h = H1 c (in the given axis order); the residual is H2up(dc)."""
    if order is not None:
        inv = [0] * len(order)
        for new, old in enumerate(order):
            inv[old] = new
        fit = curl_fit(permute_cochain(c, order))
        return CurlFit(permute_cochain(fit.potential, inv), fit.residual_l1, fit.curl_l1,
                       fit.bound)
    h = H1(c)
    res = (c - d0(h)).l1()
    curl = d1(c).l1()
    return CurlFit(h, res, curl, c_up(c.complex.N) * curl)


class WeightedFit(NamedTuple):
    residual: Fraction
    curl: Fraction
    constant: Fraction
    holds: bool


def weighted_curl_fit(c: Cochain, alpha, beta) -> WeightedFit:
    """Check ||c - d H1 c||_{1,alpha} <= K(alpha, beta) ||dc||_{1,beta}."""
    if any(Fraction(a) <= 0 for a in alpha) or any(Fraction(b) <= 0 for b in beta.values()):
        raise ValueError("weights must be positive")
    h = H1(c)
    res = (c - d0(h)).l1(alpha)
    curl = d1(c).l1(beta)
    const = weighted_constant(c.complex.N, alpha, beta)
    return WeightedFit(res, curl, const, res <= const * curl)


def slice_witness(N, j=0, k=1, at=None) -> Cochain:
    """Unit curl on one (j,k)-face with trailing coordinates zero; its
    H2up-preimage attains the face coefficient exactly."""
    K = GridComplex(N)
    x = [0] * K.dim
    if at is not None:
        for a, v in enumerate(at):
            x[a] = v
    b = Cochain(2, K, {((j, k), tuple(x)): 1})
    return H2up(b)


# ---------------------------------------------------------------------------
# exact simplex


class LPResult(NamedTuple):
    value: Fraction
    x: list


def exact_simplex(c, A, b, max_pivots=100_000) -> LPResult:
    """min c.x subject to A x = b, x >= 0, in exact arithmetic (Bland's rule).

    Two phases; redundant equality rows are dropped after phase one.
    """
    m, n = len(A), len(c)
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # tableau with artificials n..n+m-1
    T = [A[i] + [Fraction(int(i == r)) for r in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m

    def pivot(r, col):
        pv = T[r][col]
        T[r] = [v / pv for v in T[r]]
        for i in range(len(T)):
            if i != r and T[i][col] != 0:
                f = T[i][col]
                Ti, Tr = T[i], T[r]
                T[i] = [a - f * bb for a, bb in zip(Ti, Tr)]
        basis[r] = col

    def run(cost, allowed):
        steps = 0
        while True:
            # reduced costs
            enter = None
            for col in range(width):
                if not allowed(col) or col in basis:
                    continue
                red = cost[col] - sum(cost[basis[i]] * T[i][col] for i in range(len(T)))
                if red < 0:
                    enter = col
                    break
            if enter is None:
                return
            best = None
            for i in range(len(T)):
                if T[i][enter] > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise InfeasibleError("linear program is unbounded")
            pivot(best[1], enter)
            steps += 1
            if steps > max_pivots:
                raise ResourceError("simplex pivot limit exceeded")

    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(phase1, lambda col: True)
    infeas = sum(T[i][-1] for i in range(len(T)) if basis[i] >= n)
    if infeas != 0:
        raise InfeasibleError("equality constraints are inconsistent")
    # drive artificials out of the basis or drop redundant rows
    r = 0
    while r < len(T):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                del T[r]
                del basis[r]
                continue
            pivot(r, col)
        r += 1
    cost = [Fraction(v) for v in c] + [Fraction(0)] * m
    run(cost, lambda col: col < n)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i][-1]
    return LPResult(sum(ci * xi for ci, xi in zip(cost, x)), x)


def fill1_exact(b: Cochain, max_edges: int = 120) -> Fraction:
    """min ||R||_1 subject to d1 R = b, via the l1 epigraph split R = p - n."""
    if b.degree != 2:
        raise ValueError("fill1_exact takes a 2-cochain")
    K = b.complex
    edges = list(K.edges())
    faces = list(K.faces())
    if len(edges) > max_edges:
        raise ResourceError(f"complex has {len(edges)} edges (> {max_edges})")
    if b.is_zero():
        return Fraction(0)
    eidx = {e: i for i, e in enumerate(edges)}
    ne = len(edges)
    A = []
    for (j, k), x in faces:
        row = [0] * (2 * ne)
        for key, sgn in (((j, x), 1), ((k, _shift(x, j)), 1), ((j, _shift(x, k)), -1),
                         ((k, x), -1)):
            col = eidx[key]
            row[col] += sgn
            row[ne + col] -= sgn
        A.append(row)
    rhs = [b[f] for f in faces]
    res = exact_simplex([1] * (2 * ne), A, rhs)
    return res.value


def filling_constant(N) -> Fraction:
    """Fill_1 of a planar grid: the worst single-face filling.

    In two dimensions every 2-cochain is exact and the filling cost is convex
    and 1-homogeneous, so the supremum sits at the unit face indicators.
    """
    K = GridComplex(N)
    if K.dim != 2:
        raise ValueError("filling_constant is only available for planar grids")
    best = Fraction(0)
    for f in K.faces():
        best = max(best, fill1_exact(Cochain(2, K, {f: 1})))
    return best


# ---------------------------------------------------------------------------
# random instances


def random_cochain(rng, N, degree=1, den=6, density=0.8) -> Cochain:
    """Sparse rational cochain with entries p/q, |p| <= 9, q <= den; ``rng`` is random.Random."""
    K = GridComplex(N)
    cells = (K.vertices, K.edges, K.faces)[degree]()
    vals = {}
    for key in cells:
        if rng.random() < density:
            vals[key] = Fraction(rng.randint(-9, 9), rng.randint(1, den))
    return Cochain(degree, K, vals)


def homotopy_defect(c: Cochain) -> Cochain:
    """c - d(H1 c) - H2up(dc); zero exactly when the homotopy identity holds."""
    return c - d0(H1(c)) - H2up(d1(c))
