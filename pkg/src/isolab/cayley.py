"""Group families, Cayley adjacency and boundary functionals.

Every family exposes the same small interface: an identity, a list of
generators paired with their inverses, and a step map ``step(g, k, side)``
applying generator ``k`` on the right (``g*s``) or on the left (``s*g``).
Vertices are plain integer tuples so that sets of them sort deterministically.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .errors import EncodingError, ResourceError, UnsupportedFamilyError

RIGHT = "right"
LEFT = "left"
DEFAULT_BALL_GUARD = 2_000_000


@dataclass(frozen=True, order=True)
class Generator:
    label: tuple
    inverse_label: tuple

    def inverse(self) -> "Generator":
        return Generator(self.inverse_label, self.label)


def _check_side(side):
    if side not in (RIGHT, LEFT):
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")


def _int_tuple(v, n, what="vertex"):
    try:
        t = tuple(v)
    except TypeError:
        raise EncodingError(f"{what} {v!r} is not a sequence") from None
    if len(t) != n or not all(isinstance(a, int) and not isinstance(a, bool) for a in t):
        raise EncodingError(f"{what} {v!r} must be {n} integers")
    return t


class GroupGraph(ABC):
    """Cayley graph (or explicit graph) presented by generator-labelled steps."""

    family: str = ""
    is_group: bool = True

    def __init__(self, generators):
        self.generators = tuple(generators)
        self._index = {g.label: k for k, g in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise ValueError("duplicate generator labels")
        try:
            self.inverse_index = tuple(self._index[g.inverse_label] for g in self.generators)
        except KeyError as exc:
            raise ValueError(f"generating set is not symmetric: missing {exc}") from None

    @property
    def degree(self) -> int:
        return len(self.generators)

    def generator_index(self, label) -> int:
        return self._index[label]

    # group structure -------------------------------------------------------
    @property
    @abstractmethod
    def identity(self):
        ...

    @abstractmethod
    def validate(self, g):
        """Return the canonical encoding of ``g`` or raise EncodingError."""

    def mul(self, g, h):
        raise UnsupportedFamilyError(f"{self.family} has no group law")

    def inverse(self, g):
        raise UnsupportedFamilyError(f"{self.family} has no inversion")

    def element(self, k):
        """Group element represented by generator ``k``."""
        raise UnsupportedFamilyError(f"{self.family} has no group law")

    def step(self, g, k, side=RIGHT):
        s = self.element(k)
        return self.mul(g, s) if side == RIGHT else self.mul(s, g)

    # adjacency -------------------------------------------------------------
    def neighbors(self, g, side=RIGHT):
        _check_side(side)
        g = self.validate(g)
        return [(gen, self.step(g, k, side)) for k, gen in enumerate(self.generators)]

    def neighbor_vertices(self, g, side=RIGHT):
        return [self.step(g, k, side) for k in range(len(self.generators))]

    def params(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"family": self.family, "params": self.params()}

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"

    def __eq__(self, other):
        return isinstance(other, GroupGraph) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))


# ---------------------------------------------------------------------------
# Z^d with a symmetric stencil


class ZdStencil(GroupGraph):
    family = "zd"

    def __init__(self, d: int, stencil=None):
        if d < 1:
            raise ValueError("dimension must be positive")
        if stencil is None:
            stencil = []
            for i in range(d):
                e = [0] * d
                e[i] = 1
                stencil.append(tuple(e))
                stencil.append(tuple(-a for a in e))
        vecs = [_int_tuple(v, d, "stencil vector") for v in stencil]
        if any(all(a == 0 for a in v) for v in vecs):
            raise ValueError("identity is never a generator")
        vset = set(vecs)
        if len(vset) != len(vecs):
            raise ValueError("stencil contains duplicates")
        for v in vecs:
            if tuple(-a for a in v) not in vset:
                raise ValueError(f"stencil not symmetric: {v} has no inverse")
        self.d = d
        self.stencil = tuple(vecs)
        super().__init__(Generator(v, tuple(-a for a in v)) for v in vecs)

    @property
    def identity(self):
        return (0,) * self.d

    def validate(self, g):
        return _int_tuple(g, self.d)

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def element(self, k):
        return self.stencil[k]

    def step(self, g, k, side=RIGHT):
        return tuple(a + b for a, b in zip(g, self.stencil[k]))

    def params(self):
        return {"d": self.d, "stencil": [list(v) for v in self.stencil]}


def axis_lattice(d: int) -> ZdStencil:
    return ZdStencil(d)


# ---------------------------------------------------------------------------
# Torus (Z_m)^d with the axis generators counted with multiplicity


class Torus(GroupGraph):
    family = "torus"

    def __init__(self, d: int, m: int):
        if d < 1 or m < 1:
            raise ValueError("torus needs d >= 1 and m >= 1")
        self.d, self.m = d, m
        gens = []
        for i in range(d):
            gens.append(Generator(("+", i), ("-", i)))
            gens.append(Generator(("-", i), ("+", i)))
        super().__init__(gens)

    @property
    def identity(self):
        return (0,) * self.d

    def validate(self, g):
        t = _int_tuple(g, self.d)
        if any(not 0 <= a < self.m for a in t):
            raise EncodingError(f"torus residues must lie in [0,{self.m})")
        return t

    def mul(self, g, h):
        return tuple((a + b) % self.m for a, b in zip(g, h))

    def inverse(self, g):
        return tuple((-a) % self.m for a in g)

    def element(self, k):
        i, sgn = divmod(k, 2)
        e = [0] * self.d
        e[i] = (1 if sgn == 0 else -1) % self.m
        return tuple(e)

    def params(self):
        return {"d": self.d, "m": self.m}


# ---------------------------------------------------------------------------
# Heisenberg group, coordinates (x, y, z) with (x,y,z)(x',y',z') = (.., z+z'+xy')


class Heisenberg(GroupGraph):
    family = "heisenberg"

    def __init__(self, central: bool = False):
        self.central = bool(central)
        gens = [Generator(("a",), ("a-",)), Generator(("a-",), ("a",)),
                Generator(("b",), ("b-",)), Generator(("b-",), ("b",))]
        self._elems = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
        if self.central:
            gens += [Generator(("c",), ("c-",)), Generator(("c-",), ("c",))]
            self._elems += [(0, 0, 1), (0, 0, -1)]
        super().__init__(gens)

    @property
    def identity(self):
        return (0, 0, 0)

    def validate(self, g):
        return _int_tuple(g, 3)

    def mul(self, g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def inverse(self, g):
        return (-g[0], -g[1], -g[2] + g[0] * g[1])

    def element(self, k):
        return self._elems[k]

    def params(self):
        return {"central": self.central}


# ---------------------------------------------------------------------------
# Step-2 lattices Z^d x Z^m with a bilinear upper-triangular cocycle


class Step2(GroupGraph):
    family = "step2"

    def __init__(self, d: int, m: int, omega, central: bool = False):
        if d < 1 or m < 1:
            raise ValueError("step2 needs d >= 1 and m >= 1")
        om = [[_int_tuple(omega[i][j], m, "cocycle entry") for j in range(d)] for i in range(d)]
        for i in range(d):
            for j in range(i + 1):
                if any(om[i][j]):
                    raise ValueError("cocycle must be strictly upper-triangular")
        self.d, self.m, self.omega = d, m, tuple(tuple(r) for r in om)
        self.central = bool(central)
        gens, elems = [], []
        zero_h = (0,) * m
        for i in range(d):
            e = [0] * d
            e[i] = 1
            gens += [Generator(("e", i), ("e-", i)), Generator(("e-", i), ("e", i))]
            elems += [(tuple(e), zero_h), (tuple(-a for a in e), zero_h)]
        if self.central:
            for j in range(m):
                c = [0] * m
                c[j] = 1
                gens += [Generator(("c", j), ("c-", j)), Generator(("c-", j), ("c", j))]
                elems += [((0,) * d, tuple(c)), ((0,) * d, tuple(-a for a in c))]
        self._elems = elems
        super().__init__(gens)

    def form(self, x, y):
        """omega(x, y) = sum_{i<j} x_i y_j omega(e_i, e_j)."""
        out = [0] * self.m
        for i in range(self.d):
            if x[i] == 0:
                continue
            for j in range(i + 1, self.d):
                if y[j] == 0:
                    continue
                c = x[i] * y[j]
                for r, w in enumerate(self.omega[i][j]):
                    out[r] += c * w
        return tuple(out)

    @property
    def identity(self):
        return ((0,) * self.d, (0,) * self.m)

    def validate(self, g):
        try:
            x, h = g
        except (TypeError, ValueError):
            raise EncodingError(f"step2 vertex {g!r} must be (x, h)") from None
        return (_int_tuple(x, self.d), _int_tuple(h, self.m))

    def mul(self, g, h):
        w = self.form(g[0], h[0])
        return (tuple(a + b for a, b in zip(g[0], h[0])),
                tuple(a + b + c for a, b, c in zip(g[1], h[1], w)))

    def inverse(self, g):
        w = self.form(g[0], g[0])
        return (tuple(-a for a in g[0]), tuple(-a + b for a, b in zip(g[1], w)))

    def element(self, k):
        return self._elems[k]

    def params(self):
        return {"d": self.d, "m": self.m, "omega": [[list(v) for v in r] for r in self.omega],
                "central": self.central}


# ---------------------------------------------------------------------------
# Lamplighter Z_{q+1} wr base


class Lamplighter(GroupGraph):
    """Lamps valued in Z_{q+1} over a group-family base.

    Vertices are ``(lamps, cursor)`` where ``lamps`` is a sorted tuple of
    ``(base_vertex, value)`` pairs with nonzero values.  ``toggles`` lists the
    nonzero lamp increments used as generators; the default is the symmetric
    closure of ``{1}``.
    """

    family = "lamplighter"

    def __init__(self, q: int, base: GroupGraph | None = None, toggles=None):
        if q < 1:
            raise ValueError("lamp alphabet needs q >= 1")
        base = ZdStencil(1) if base is None else base
        if not base.is_group:
            raise UnsupportedFamilyError("lamplighter base must be a group family")
        n = q + 1
        if toggles is None:
            toggles = sorted({1 % n, (-1) % n})
        toggles = sorted({int(a) % n for a in toggles})
        if 0 in toggles or not toggles:
            raise ValueError("toggle amounts must be nonzero mod q+1")
        if any((-a) % n not in toggles for a in toggles):
            raise ValueError("toggle set must be closed under negation")
        self.q, self.base, self.toggles = q, base, tuple(toggles)
        gens = [Generator(("move",) + (g.label,), ("move",) + (g.inverse_label,))
                for g in base.generators]
        gens += [Generator(("toggle", a), ("toggle", (-a) % n)) for a in self.toggles]
        super().__init__(gens)
        self._nbase = base.degree

    @property
    def identity(self):
        return ((), self.base.identity)

    def validate(self, g):
        try:
            lamps, cursor = g
        except (TypeError, ValueError):
            raise EncodingError(f"lamplighter vertex {g!r} must be (lamps, cursor)") from None
        cursor = self.base.validate(cursor)
        out = {}
        for item in lamps:
            try:
                key, val = item
            except (TypeError, ValueError):
                raise EncodingError(f"bad lamp entry {item!r}") from None
            key = self.base.validate(key)
            if not isinstance(val, int) or not 0 < val <= self.q:
                raise EncodingError(f"lamp value {val!r} outside 1..{self.q}")
            if key in out:
                raise EncodingError(f"duplicate lamp key {key!r}")
            out[key] = val
        canon = tuple(sorted(out.items()))
        if canon != tuple(lamps):
            raise EncodingError("lamps must be sorted by base key")
        return (canon, cursor)

    @staticmethod
    def make(lamps: dict, cursor):
        return (tuple(sorted((k, v) for k, v in lamps.items() if v)), cursor)

    def _add(self, lamps, extra):
        n = self.q + 1
        out = dict(lamps)
        for k, v in extra:
            nv = (out.get(k, 0) + v) % n
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return tuple(sorted(out.items()))

    def _shift(self, x, lamps):
        return tuple((self.base.mul(x, k), v) for k, v in lamps)

    def mul(self, g, h):
        lamps = self._add(g[0], self._shift(g[1], h[0]))
        return (lamps, self.base.mul(g[1], h[1]))

    def inverse(self, g):
        xi = self.base.inverse(g[1])
        n = self.q + 1
        lamps = tuple(sorted((self.base.mul(xi, k), (-v) % n) for k, v in g[0]))
        return (lamps, xi)

    def element(self, k):
        if k < self._nbase:
            return ((), self.base.element(k))
        a = self.toggles[k - self._nbase]
        return (((self.base.identity, a),), self.base.identity)

    def step(self, g, k, side=RIGHT):
        if side == RIGHT:
            if k < self._nbase:
                return (g[0], self.base.step(g[1], k, RIGHT))
            a = self.toggles[k - self._nbase]
            return (self._add(g[0], ((g[1], a),)), g[1])
        return self.mul(self.element(k), g)

    def params(self):
        return {"q": self.q, "base": self.base.to_json(), "toggles": list(self.toggles)}


# ---------------------------------------------------------------------------
# Semidirect products Z^d x|_A Z


def _mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


def _mat_vec(a, v):
    return tuple(sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a)))


def int_det(a) -> int:
    """Exact determinant of a small integer matrix (fraction-free Bareiss)."""
    m = [list(r) for r in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def int_adjugate(a):
    n = len(a)
    if n == 1:
        return ((1,),)
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof[i][j] = (-1) ** (i + j) * int_det(minor)
    return tuple(tuple(cof[j][i] for j in range(n)) for i in range(n))


class Semidirect(GroupGraph):
    """Z^d x|_A Z with law (x,k)(y,l) = (x + A^k y, k+l)."""

    family = "semidirect"

    def __init__(self, A):
        A = tuple(tuple(int(v) for v in row) for row in A)
        d = len(A)
        if d < 1 or any(len(r) != d for r in A):
            raise ValueError("A must be a square integer matrix")
        det = int_det(A)
        if det not in (1, -1):
            raise ValueError("A must lie in GL(d, Z)")
        self.d, self.A = d, A
        adj = int_adjugate(A)
        self.A_inv = tuple(tuple(det * v for v in r) for r in adj)
        self._pow = {0: tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), 1: A,
                     -1: self.A_inv}
        gens, elems = [], []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            gens += [Generator(("s", i), ("s-", i)), Generator(("s-", i), ("s", i))]
            elems += [(tuple(e), 0), (tuple(-a for a in e), 0)]
        gens += [Generator(("t",), ("t-",)), Generator(("t-",), ("t",))]
        elems += [((0,) * d, 1), ((0,) * d, -1)]
        self._elems = elems
        super().__init__(gens)

    def power(self, k: int):
        if k not in self._pow:
            base = self.A if k > 0 else self.A_inv
            prev = self.power(k - 1 if k > 0 else k + 1)
            self._pow[k] = _mat_mul(prev, base)
        return self._pow[k]

    def act(self, k: int, v):
        return _mat_vec(self.power(k), v)

    @property
    def identity(self):
        return ((0,) * self.d, 0)

    def validate(self, g):
        try:
            x, k = g
        except (TypeError, ValueError):
            raise EncodingError(f"semidirect vertex {g!r} must be (x, k)") from None
        if not isinstance(k, int):
            raise EncodingError("layer index must be an integer")
        return (_int_tuple(x, self.d), k)

    def mul(self, g, h):
        y = self.act(g[1], h[0])
        return (tuple(a + b for a, b in zip(g[0], y)), g[1] + h[1])

    def inverse(self, g):
        y = self.act(-g[1], g[0])
        return (tuple(-a for a in y), -g[1])

    def element(self, k):
        return self._elems[k]

    def params(self):
        return {"A": [list(r) for r in self.A]}


# ---------------------------------------------------------------------------
# Explicit finite graphs


class Explicit(GroupGraph):
    """Undirected simple graph given by adjacency lists; vertices are ints."""

    family = "explicit"
    is_group = False

    def __init__(self, adjacency):
        adj = {int(v): tuple(sorted({int(w) for w in nb})) for v, nb in dict(adjacency).items()}
        for v, nb in adj.items():
            for w in nb:
                if w == v:
                    raise ValueError("explicit graphs must be loop-free")
                if w not in adj or v not in adj[w]:
                    raise ValueError(f"adjacency not symmetric at edge {v}-{w}")
        self.adj = adj
        self._deg = max((len(nb) for nb in adj.values()), default=0)
        gens = [Generator(("slot", k), ("slot", k)) for k in range(self._deg)]
        super().__init__(gens)

    @property
    def degree(self):
        return self._deg

    @property
    def identity(self):
        return min(self.adj)

    def validate(self, g):
        if isinstance(g, tuple) and len(g) == 1:
            g = g[0]
        if not isinstance(g, int) or g not in self.adj:
            raise EncodingError(f"unknown vertex {g!r}")
        return g

    def neighbors(self, g, side=RIGHT):
        g = self.validate(g)
        return [(self.generators[k], w) for k, w in enumerate(self.adj[g])]

    def neighbor_vertices(self, g, side=RIGHT):
        return list(self.adj[g])

    def step(self, g, k, side=RIGHT):
        raise UnsupportedFamilyError("explicit graphs have no generator steps")

    def vertices(self):
        return sorted(self.adj)

    def params(self):
        return {"adjacency": {str(v): list(nb) for v, nb in sorted(self.adj.items())}}


# ---------------------------------------------------------------------------
# JSON construction


def _tupleize(obj):
    if isinstance(obj, list):
        return tuple(_tupleize(x) for x in obj)
    return obj


def graph_from_json(doc: dict) -> GroupGraph:
    """Build a graph from ``{"family": ..., "params": {...}}``."""
    if not isinstance(doc, dict) or "family" not in doc:
        raise ValueError("group spec needs a 'family' key")
    fam = str(doc["family"]).lower()
    p = dict(doc.get("params") or {})
    if fam in ("zd", "z", "z2", "z3"):
        d = int(p.get("d", {"z": 1, "z2": 2, "z3": 3}.get(fam, 2)))
        return ZdStencil(d, p.get("stencil"))
    if fam == "torus":
        return Torus(int(p["d"]), int(p["m"]))
    if fam == "heisenberg":
        return Heisenberg(bool(p.get("central", False)))
    if fam == "step2":
        return Step2(int(p["d"]), int(p["m"]), p["omega"], bool(p.get("central", False)))
    if fam == "lamplighter":
        base = graph_from_json(p["base"]) if "base" in p else None
        return Lamplighter(int(p.get("q", 1)), base, p.get("toggles"))
    if fam == "semidirect":
        return Semidirect(p["A"])
    if fam == "explicit":
        return Explicit({int(k): v for k, v in p["adjacency"].items()})
    raise ValueError(f"unknown family {fam!r}")


def decode_vertex(graph: GroupGraph, raw):
    """Turn JSON-style nested lists into a canonical vertex."""
    return graph.validate(_tupleize(raw))


# ---------------------------------------------------------------------------
# Finite vertex sets


class VertexSet:
    """Immutable finite set of vertices of one graph, iterated in sorted order."""

    __slots__ = ("graph", "members", "_sorted")

    def __init__(self, members: Iterable, graph: GroupGraph, validate: bool = True):
        if validate:
            members = frozenset(graph.validate(v) for v in members)
        else:
            members = frozenset(members)
        self.graph = graph
        self.members = members
        self._sorted = None

    def __len__(self):
        return len(self.members)

    def __contains__(self, v):
        return v in self.members

    def __iter__(self) -> Iterator:
        if self._sorted is None:
            self._sorted = tuple(sorted(self.members))
        return iter(self._sorted)

    def __eq__(self, other):
        if isinstance(other, VertexSet):
            return self.members == other.members and self.graph == other.graph
        return NotImplemented

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"VertexSet({list(self)!r})"

    def translate(self, g, side=LEFT) -> "VertexSet":
        _check_side(side)
        mul = self.graph.mul
        g = self.graph.validate(g)
        if side == LEFT:
            return VertexSet((mul(g, y) for y in self.members), self.graph, validate=False)
        return VertexSet((mul(y, g) for y in self.members), self.graph, validate=False)

    def inverse(self) -> "VertexSet":
        if not self.graph.is_group:
            raise UnsupportedFamilyError("inversion needs a group family")
        return VertexSet((self.graph.inverse(y) for y in self.members), self.graph,
                         validate=False)

    def union(self, other: Iterable) -> "VertexSet":
        return VertexSet(self.members | frozenset(other), self.graph, validate=False)


def as_vertex_set(Y, graph: GroupGraph | None = None) -> VertexSet:
    if isinstance(Y, VertexSet):
        return Y
    if graph is None:
        raise ValueError("a graph is required for raw vertex collections")
    return VertexSet(Y, graph)


# ---------------------------------------------------------------------------
# Boundary functionals


def neighbors(g, graph: GroupGraph, side=RIGHT):
    return graph.neighbors(g, side)


def vertex_boundary(Y, graph=None, side=RIGHT) -> VertexSet:
    """Outer vertex boundary SY minus Y."""
    Y = as_vertex_set(Y, graph)
    G, mem = Y.graph, Y.members
    out = set()
    for y in mem:
        for z in G.neighbor_vertices(y, side):
            if z not in mem:
                out.add(z)
    return VertexSet(out, G, validate=False)


DIRECTED = "directed"
UNDIRECTED = "undirected"


def edge_boundary(Y, mode=DIRECTED, graph=None, side=RIGHT) -> int:
    """Directed pairs #{(y,s): ys not in Y} or the undirected crossing count."""
    Y = as_vertex_set(Y, graph)
    G, mem = Y.graph, Y.members
    if mode in (DIRECTED, "DirectedPairs"):
        return sum(1 for y in mem for z in G.neighbor_vertices(y, side) if z not in mem)
    if mode in (UNDIRECTED, "UndirectedCut"):
        cut = set()
        for y in mem:
            for z in G.neighbor_vertices(y, side):
                if z not in mem:
                    cut.add((y, z))
        return len(cut)
    raise ValueError(f"unknown mode {mode!r}")


def per_generator_counts(Y, graph=None, side=LEFT) -> dict:
    """D_s(F) = #{y in F: s.y not in F}, keyed by Generator (left action by default)."""
    Y = as_vertex_set(Y, graph)
    G, mem = Y.graph, Y.members
    if not G.is_group:
        raise UnsupportedFamilyError("per-generator counts need a group family")
    return {gen: sum(1 for y in mem if G.step(y, k, side) not in mem)
            for k, gen in enumerate(G.generators)}


def positive_representatives(graph: GroupGraph) -> list[int]:
    """One generator index per inverse pair (the first one listed)."""
    seen, reps = set(), []
    for k in range(graph.degree):
        if k in seen:
            continue
        reps.append(k)
        seen.add(k)
        seen.add(graph.inverse_index[k])
    return reps


def left_cut(Y, graph=None) -> int:
    """Undirected left edges {g, sg} with exactly one endpoint in Y."""
    Y = as_vertex_set(Y, graph)
    G, mem = Y.graph, Y.members
    cut = set()
    for y in mem:
        for k in range(G.degree):
            z = G.step(y, k, LEFT)
            if z not in mem:
                cut.add((y, z))
    return len(cut)


class SigmaBoundary(NamedTuple):
    colored: int
    left: int
    right_via_inverse: int


def colored_cut(Y, graph=None) -> int:
    """Crossing edges of the multigraph coloured by (s, e) and (e, s), s in S+."""
    Y = as_vertex_set(Y, graph)
    G, mem = Y.graph, Y.members
    cut = set()
    for k in positive_representatives(G):
        kinv = G.inverse_index[k]
        for y in mem:
            for side, tag in ((LEFT, "L"), (RIGHT, "R")):
                for kk in (k, kinv):
                    z = G.step(y, kk, side)
                    if z not in mem:
                        cut.add((k, tag, frozenset((y, z))))
    return len(cut)


def sigma_boundary(Y, graph=None) -> SigmaBoundary:
    Y = as_vertex_set(Y, graph)
    if not Y.graph.is_group:
        raise UnsupportedFamilyError("colored boundary needs inversion")
    left = left_cut(Y)
    right = left_cut(Y.inverse())
    return SigmaBoundary(colored_cut(Y), left, right)


def ball(graph: GroupGraph, radius: int, side=RIGHT, guard: int = DEFAULT_BALL_GUARD) -> VertexSet:
    """Word-metric ball around the identity, by breadth-first search."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    e = graph.identity
    seen = {e}
    frontier = deque([(e, 0)])
    while frontier:
        g, r = frontier.popleft()
        if r == radius:
            continue
        for z in graph.neighbor_vertices(g, side):
            if z not in seen:
                seen.add(z)
                if len(seen) > guard:
                    raise ResourceError(f"ball exceeds guard of {guard} vertices")
                frontier.append((z, r + 1))
    return VertexSet(seen, graph, validate=False)


def word_distance(graph: GroupGraph, g, h, side=RIGHT, guard: int = DEFAULT_BALL_GUARD) -> int:
    """Graph distance by BFS from g to h."""
    if g == h:
        return 0
    seen = {g}
    frontier = [g]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for v in frontier:
            for z in graph.neighbor_vertices(v, side):
                if z == h:
                    return dist
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        if len(seen) > guard:
            raise ResourceError("distance search exceeded guard")
        frontier = nxt
    raise ValueError("vertices are in different components")
