"""Metric graphs, models, points and divisors.

A :class:`Model` is a finite connected multigraph with positive rational edge
lengths and nonnegative integer vertex weights.  Every edge carries a fixed
orientation (tail -> head) and positions along an edge are measured from the
tail.  Refinements remember their parent so that divisors living on different
refinements of the same curve can be compared.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

__all__ = [
    "TropsymError",
    "ModelError",
    "DivisorError",
    "Edge",
    "Point",
    "Model",
    "Divisor",
    "ChainOfLoopsSpec",
    "as_fraction",
    "new_model",
    "validate_strictly_semistable",
    "make_loop_free",
    "genus",
    "refine",
    "canonical_divisor",
    "chain_of_loops",
    "is_generic_chain",
]


class TropsymError(ValueError):
    """Base class for domain errors."""


class ModelError(TropsymError):
    pass


class DivisorError(TropsymError):
    pass


def as_fraction(x) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ints, Fractions and strings such as ``"3/4"`` or ``"2"``.  Floats
    are refused because every equality test downstream is exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {x!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Point:
    """A point of a model: either a vertex or an interior position on an edge."""

    vertex: str | None = None
    edge: str | None = None
    pos: Fraction | None = None

    def __post_init__(self):
        if self.vertex is not None:
            if self.edge is not None or self.pos is not None:
                raise DivisorError("a vertex point carries no edge reference")
        else:
            if self.edge is None or self.pos is None:
                raise DivisorError("an edge point needs both an edge and a position")
            object.__setattr__(self, "pos", as_fraction(self.pos))

    @classmethod
    def at(cls, vertex: str) -> Point:
        return cls(vertex=vertex)

    @classmethod
    def on(cls, edge: str, pos) -> Point:
        return cls(edge=edge, pos=as_fraction(pos))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self):
        if self.vertex is not None:
            return (0, self.vertex, Fraction(0))
        return (1, self.edge, self.pos)

    def __str__(self) -> str:
        if self.vertex is not None:
            return self.vertex
        return f"{self.edge}@{_fmt(self.pos)}"


class Model:
    """A model (G, |.|, h) of a tropical curve.

    Parameters
    ----------
    vertices : iterable of str
    weights : mapping vertex -> int, missing vertices get weight 0
    edges : iterable of ``Edge`` or ``(id, tail, head, length)`` tuples
    """

    def __init__(self, vertices, weights=None, edges=(), *, _parent=None,
                 _vertex_origin=None, _splits=None):
        verts = tuple(str(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise ModelError("duplicate vertex id")
        if not verts:
            raise ModelError("a model needs at least one vertex")
        vset = set(verts)
        weights = dict(weights or {})
        for v, h in weights.items():
            if v not in vset:
                raise ModelError(f"weight given for unknown vertex {v!r}")
            if not isinstance(h, int) or isinstance(h, bool) or h < 0:
                raise ModelError(f"weight of {v!r} must be a nonnegative integer")
        w = {v: int(weights.get(v, 0)) for v in verts}

        es = []
        for e in edges:
            if not isinstance(e, Edge):
                eid, tail, head, length = e
                e = Edge(str(eid), str(tail), str(head), as_fraction(length))
            elif not isinstance(e.length, Fraction):
                e = Edge(e.id, e.tail, e.head, as_fraction(e.length))
            if e.tail not in vset or e.head not in vset:
                raise ModelError(f"edge {e.id!r} has a dangling endpoint")
            if e.length <= 0:
                raise ModelError(f"edge {e.id!r} has nonpositive length {e.length}")
            es.append(e)
        ids = [e.id for e in es]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate edge id")

        self._vertices = verts
        self._weights = w
        self._edges = tuple(es)
        self._edge_by_id = {e.id: e for e in es}
        self._incident = {v: [] for v in verts}
        for e in es:
            self._incident[e.tail].append(e)
            if not e.is_loop:
                self._incident[e.head].append(e)
        if not self._connected():
            raise ModelError("the underlying graph is disconnected")

        self._parent = _parent
        self._vertex_origin = _vertex_origin or {}
        self._splits = _splits or {}
        self._seg_origin = {sid: (pe, off) for pe, segs in self._splits.items() for off, sid in segs}

    def _connected(self) -> bool:
        seen = {self._vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for e in self._incident[v]:
                u = e.head if e.tail == v else e.tail
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == len(self._vertices)

    # -- basic accessors
    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def weights(self) -> Mapping[str, int]:
        return MappingProxyType(self._weights)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_by_id[eid]
        except KeyError:
            raise ModelError(f"unknown edge {eid!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._incident

    def incident(self, v: str) -> list[Edge]:
        return list(self._incident[v])

    def valence(self, v: str) -> int:
        return sum(2 if e.is_loop else 1 for e in self._incident[v])

    @property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self._edges), Fraction(0))

    @property
    def base_vertex(self) -> str:
        """Lowest vertex id; the default base point for reductions."""
        return min(self._vertices)

    def has_loops(self) -> bool:
        return any(e.is_loop for e in self._edges)

    # -- points
    def normalize(self, p: Point) -> Point:
        """Validate ``p`` against this model and fold edge endpoints onto vertices."""
        if p.vertex is not None:
            if p.vertex not in self._incident:
                raise DivisorError(f"unknown vertex {p.vertex!r}")
            return p
        e = self.edge(p.edge)
        if p.pos == 0:
            return Point(vertex=e.tail)
        if p.pos == e.length:
            return Point(vertex=e.head)
        if not 0 < p.pos < e.length:
            raise DivisorError(f"position {p.pos} outside edge {e.id!r} of length {e.length}")
        return p

    def point(self, where, pos=None) -> Point:
        """``m.point("v")`` for a vertex, ``m.point("e", "1/2")`` for an edge point."""
        if pos is None:
            return self.normalize(Point(vertex=where))
        return self.normalize(Point(edge=where, pos=as_fraction(pos)))

    # -- refinement lineage
    @property
    def parent(self) -> Model | None:
        return self._parent

    @property
    def root(self) -> Model:
        m = self
        while m._parent is not None:
            m = m._parent
        return m

    def to_parent(self, p: Point) -> Point:
        p = self.normalize(p)
        if self._parent is None:
            return p
        if p.vertex is not None:
            return self._vertex_origin[p.vertex]
        pe, offset = self._segment_origin(p.edge)
        return self._parent.normalize(Point(edge=pe, pos=offset + p.pos))

    def _segment_origin(self, eid):
        return self._seg_origin.get(eid, (eid, Fraction(0)))

    def from_parent(self, p: Point) -> Point:
        if self._parent is None:
            return self.normalize(p)
        p = self._parent.normalize(p)
        if p.vertex is not None:
            return p
        segs = self._splits.get(p.edge)
        if segs is None:
            return p
        for off, sid in reversed(segs):
            if p.pos == off:
                return Point(vertex=self.edge(sid).tail)
            if p.pos > off:
                return self.normalize(Point(edge=sid, pos=p.pos - off))
        raise AssertionError("unreachable: segments start at 0")

    def to_root(self, p: Point) -> Point:
        m = self
        while m._parent is not None:
            p = m.to_parent(p)
            m = m._parent
        return m.normalize(p)

    def from_root(self, p: Point) -> Point:
        chain = []
        m = self
        while m is not None:
            chain.append(m)
            m = m._parent
        p = chain[-1].normalize(p)
        for m in reversed(chain[:-1]):
            p = m.from_parent(p)
        return p

    def same_curve(self, other: Model) -> bool:
        return self.root == other.root

    # -- identity
    def _key(self):
        return (self._vertices, tuple(sorted(self._weights.items())), self._edges)

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Model(|V|={len(self._vertices)}, |E|={len(self._edges)}, g={genus(self)})"


def new_model(vertices, weights, edges) -> Model:
    """Build and validate a model; see :class:`Model`."""
    return Model(vertices, weights, edges)


def validate_strictly_semistable(m: Model) -> list[str]:
    """List loop edges and 1-valent weight-0 vertices of ``m``."""
    out = [f"loop edge {e.id!r} at vertex {e.tail!r}" for e in m.edges if e.is_loop]
    for v in m.vertices:
        if m.valence(v) == 1 and m.weights[v] == 0:
            out.append(f"vertex {v!r} is 1-valent with weight 0")
    return out


def genus(m: Model) -> int:
    return len(m.edges) - len(m.vertices) + 1 + sum(m.weights.values())


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def refine(m: Model, points: Iterable[Point]) -> tuple[Model, dict[Point, str]]:
    """Subdivide ``m`` at the given points.

    Returns the refined model and a mapping from each (normalized) input point
    to its vertex id in the refinement.  Edge orientations are inherited, so
    positions on a segment are still measured towards the original head.
    """
    pts = [m.normalize(p) for p in points]
    if len(set(pts)) != len(pts):
        raise DivisorError("duplicate points in refinement")
    by_edge: dict[str, list[Fraction]] = {}
    mapping: dict[Point, str] = {}
    for p in pts:
        if p.vertex is not None:
            mapping[p] = p.vertex
        else:
            by_edge.setdefault(p.edge, []).append(p.pos)
    if not by_edge:
        return m, mapping

    vnames = set(m.vertices)
    enames = set(e.id for e in m.edges)
    vertices = list(m.vertices)
    origin = {v: Point(vertex=v) for v in m.vertices}
    new_edges = []
    splits: dict[str, list[tuple[Fraction, str]]] = {}
    for e in m.edges:
        cuts = sorted(by_edge.get(e.id, ()))
        if not cuts:
            new_edges.append(e)
            continue
        enames.discard(e.id)
        chain = [e.tail]
        for pos in cuts:
            v = _fresh(f"{e.id}@{_fmt(pos)}", vnames)
            vertices.append(v)
            origin[v] = Point(edge=e.id, pos=pos)
            mapping[Point(edge=e.id, pos=pos)] = v
            chain.append(v)
        chain.append(e.head)
        bounds = [Fraction(0)] + cuts + [e.length]
        segs = []
        for i in range(len(chain) - 1):
            sid = _fresh(f"{e.id}.{i}", enames)
            new_edges.append(Edge(sid, chain[i], chain[i + 1], bounds[i + 1] - bounds[i]))
            segs.append((bounds[i], sid))
        splits[e.id] = segs
    refined = Model(vertices, dict(m.weights), new_edges, _parent=m,
                    _vertex_origin=origin, _splits=splits)
    return refined, mapping


def make_loop_free(m: Model) -> Model:
    """Put a weight-0 vertex at the midpoint of every loop edge."""
    mids = [Point(edge=e.id, pos=e.length / 2) for e in m.edges if e.is_loop]
    if not mids:
        return m
    return refine(m, mids)[0]


class Divisor:
    """A finite integer combination of points of a model.

    ``terms`` may be a mapping or an iterable of ``(point, coeff)`` pairs.
    Points are normalized against ``host`` and repeated points are combined;
    zero coefficients are dropped.
    """

    __slots__ = ("_host", "_terms", "_hash")

    def __init__(self, host: Model, terms=()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Point, int] = {}
        for p, c in items:
            if not isinstance(c, int) or isinstance(c, bool):
                raise DivisorError(f"coefficient {c!r} is not an integer")
            p = host.normalize(p)
            acc[p] = acc.get(p, 0) + c
        ordered = sorted(((p, c) for p, c in acc.items() if c), key=lambda t: t[0].sort_key())
        self._host = host
        self._terms = dict(ordered)
        self._hash = None

    @classmethod
    def zero(cls, host: Model) -> Divisor:
        return cls(host)

    @classmethod
    def from_vertices(cls, host: Model, weights: Mapping[str, int]) -> Divisor:
        return cls(host, [(Point(vertex=v), c) for v, c in weights.items()])

    @property
    def host(self) -> Model:
        return self._host

    @property
    def terms(self) -> Mapping[Point, int]:
        return MappingProxyType(self._terms)

    @property
    def degree(self) -> int:
        return sum(self._terms.values())

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(self._terms)

    def __getitem__(self, p: Point) -> int:
        return self._terms.get(self._host.normalize(p), 0)

    def __bool__(self):
        return bool(self._terms)

    def to_root(self) -> Divisor:
        if self._host.parent is None:
            return self
        return Divisor(self._host.root, [(self._host.to_root(p), c) for p, c in self._terms.items()])

    def transport(self, model: Model) -> Divisor:
        """The same divisor expressed on another model of the same curve."""
        if model == self._host:
            return Divisor(model, self._terms)
        if not model.same_curve(self._host):
            raise DivisorError("models are not refinements of the same curve")
        root = self.to_root()
        return Divisor(model, [(model.from_root(p), c) for p, c in root._terms.items()])

    def _align(self, other: Divisor):
        if not isinstance(other, Divisor):
            return None
        if other._host == self._host:
            return self, other
        if not self._host.same_curve(other._host):
            raise DivisorError("divisors live on different curves")
        return self.to_root(), other.to_root()

    def __add__(self, other):
        pair = self._align(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Divisor(a._host, list(a._terms.items()) + list(b._terms.items()))

    def __neg__(self):
        return Divisor(self._host, [(p, -c) for p, c in self._terms.items()])

    def __sub__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k):
        if not isinstance(k, int) or isinstance(k, bool):
            return NotImplemented
        return Divisor(self._host, [(p, k * c) for p, c in self._terms.items()])

    __rmul__ = __mul__

    def key(self) -> tuple:
        """Canonical sortable key (host-independent only within one model)."""
        return tuple((p.sort_key(), c) for p, c in self._terms.items())

    def __eq__(self, other):
        if not isinstance(other, Divisor):
            return NotImplemented
        if other._host == self._host:
            return self._terms == other._terms
        if not self._host.same_curve(other._host):
            return False
        return self.to_root()._terms == other.to_root()._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.to_root()._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "Divisor(0)"
        parts = []
        for p, c in self._terms.items():
            parts.append(f"{p}" if c == 1 else f"{c}*{p}")
        return "Divisor(" + " + ".join(parts) + ")"


def canonical_divisor(m: Model) -> Divisor:
    """K = sum over vertices of (valence + 2*weight - 2) * v."""
    return Divisor.from_vertices(m, {v: m.valence(v) + 2 * m.weights[v] - 2 for v in m.vertices})


@dataclass(frozen=True)
class ChainOfLoopsSpec:
    """Loop ``i`` is two parallel edges of lengths ``l[i]`` and ``m[i]``.

    ``bridges`` holds ``g - 1`` nonnegative lengths; a zero (or no bridges at
    all) means consecutive loops share a vertex.
    """

    l: tuple
    m: tuple
    bridges: tuple | None = None

    def __post_init__(self):
        l = tuple(as_fraction(x) for x in self.l)
        m = tuple(as_fraction(x) for x in self.m)
        if len(l) != len(m):
            raise ModelError("l and m must have one entry per loop")
        if not l:
            raise ModelError("a chain needs at least one loop")
        if any(x <= 0 for x in l + m):
            raise ModelError("loop lengths must be positive")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "m", m)
        if self.bridges is not None:
            b = tuple(as_fraction(x) for x in self.bridges)
            if len(b) != len(l) - 1:
                raise ModelError(f"expected {len(l) - 1} bridge lengths, got {len(b)}")
            if any(x < 0 for x in b):
                raise ModelError("bridge lengths must be nonnegative")
            object.__setattr__(self, "bridges", b)

    @property
    def genus(self) -> int:
        return len(self.l)

    def scaled(self, factor) -> ChainOfLoopsSpec:
        f = as_fraction(factor)
        b = None if self.bridges is None else tuple(f * x for x in self.bridges)
        return ChainOfLoopsSpec(tuple(f * x for x in self.l), tuple(f * x for x in self.m), b)


def chain_of_loops(spec: ChainOfLoopsSpec) -> Model:
    g = spec.genus
    if g < 1:
        raise ModelError("genus must be at least 1")
    bridges = spec.bridges or (Fraction(0),) * (g - 1)
    vertices = ["v0"]
    edges = []
    current = "v0"
    for i in range(g):
        right = f"v{len(vertices)}"
        vertices.append(right)
        edges.append((f"l{i + 1}", current, right, spec.l[i]))
        edges.append((f"m{i + 1}", current, right, spec.m[i]))
        current = right
        if i < g - 1 and bridges[i] > 0:
            nxt = f"v{len(vertices)}"
            vertices.append(nxt)
            edges.append((f"b{i + 1}", current, nxt, bridges[i]))
            current = nxt
    return Model(vertices, {}, edges)


def is_generic_chain(spec: ChainOfLoopsSpec) -> bool:
    """True iff no ratio l_i/m_i equals p/q with positive p, q and p + q <= 2g - 2.

    If l/m = a/b in lowest terms then every representation p/q has
    p + q = k(a + b), so it is enough to test a + b.
    """
    bound = 2 * spec.genus - 2
    for l, m in zip(spec.l, spec.m):
        r = l / m
        if r.numerator + r.denominator <= bound:
            return False
    return True


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for q in values:
        out = math.lcm(out, q.denominator)
    return out
