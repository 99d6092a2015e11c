"""Linear equivalence, reduced divisors and Baker-Norine rank on metric graphs.

Everything is computed on a lattice: lengths and positions are scaled by the
lcm of their denominators, the model is cut into unit segments and Dhar's
burning algorithm runs on the resulting finite multigraph.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .core import (
    Divisor,
    DivisorError,
    Model,
    Point,
    as_fraction,
    canonical_divisor,
    genus,
)
from .lattice import Lattice

__all__ = [
    "PLFunction",
    "DivisorClass",
    "div_of",
    "q_reduced",
    "linearly_equivalent",
    "has_effective_rep",
    "rank",
    "rr_defect",
    "divisor_class",
]


class PLFunction:
    """A continuous function on ``host`` that is linear with integer slope on each edge.

    ``values`` gives f at every vertex, ``slopes`` the slope along each edge in
    its tail -> head direction.  Functions with interior breakpoints live on a
    refinement of the curve (see :func:`tropsym.core.refine`).
    """

    def __init__(self, host: Model, values: Mapping[str, object], slopes: Mapping[str, int]):
        vals = {v: as_fraction(values[v]) for v in host.vertices}
        sl = {}
        for e in host.edges:
            s = slopes[e.id]
            if not isinstance(s, int) or isinstance(s, bool):
                raise DivisorError(f"slope on {e.id!r} must be an integer")
            if vals[e.head] - vals[e.tail] != s * e.length:
                raise DivisorError(f"slope on {e.id!r} does not match the endpoint values")
            sl[e.id] = s
        self.host = host
        self.values = MappingProxyType(vals)
        self.slopes = MappingProxyType(sl)

    @classmethod
    def from_values(cls, host: Model, values: Mapping[str, object]) -> PLFunction:
        """Interpolate linearly along edges; fails unless every slope is an integer."""
        vals = {v: as_fraction(values[v]) for v in host.vertices}
        slopes = {}
        for e in host.edges:
            s = (vals[e.head] - vals[e.tail]) / e.length
            if s.denominator != 1:
                raise DivisorError(f"non-integer slope {s} on edge {e.id!r}")
            slopes[e.id] = int(s)
        return cls(host, vals, slopes)

    def __call__(self, p: Point) -> Fraction:
        p = self.host.normalize(p)
        if p.vertex is not None:
            return self.values[p.vertex]
        e = self.host.edge(p.edge)
        return self.values[e.tail] + self.slopes[e.id] * p.pos

    def __add__(self, other: PLFunction) -> PLFunction:
        if other.host != self.host:
            raise DivisorError("functions live on different models")
        return PLFunction(self.host,
                          {v: self.values[v] + other.values[v] for v in self.host.vertices},
                          {e: self.slopes[e] + other.slopes[e] for e in self.slopes})


def div_of(f: PLFunction) -> Divisor:
    """sum_p ord_p(f) p, ord_p being the sum of outgoing slopes at p.

    The result is expressed on the root of ``f.host``'s refinement lineage.
    """
    ords = {v: 0 for v in f.host.vertices}
    for e in f.host.edges:
        s = f.slopes[e.id]
        ords[e.tail] += s
        ords[e.head] -= s
    return Divisor.from_vertices(f.host, ords).to_root()


@dataclass(frozen=True)
class DivisorClass:
    """An element of Pic(Γ), stored as its reduced representative at ``base``."""

    host: Model
    base: Point
    representative: Divisor

    @property
    def degree(self) -> int:
        return self.representative.degree

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return (self.host == other.host and self.base == other.base
                and self.representative == other.representative)

    def __hash__(self):
        return hash((self.base, self.representative))


def _base_point(host: Model, q) -> Point:
    if q is None:
        return Point(vertex=host.base_vertex)
    if isinstance(q, str):
        return host.normalize(Point(vertex=q))
    return host.normalize(q)


def _lattice_for(root: Model, divisors, points=(), factor: int = 1) -> Lattice:
    pts = list(points)
    for d in divisors:
        pts.extend(d.support)
    return Lattice.for_points(root, pts, factor)


def _reduce_on(lat: Lattice, d: Divisor, q: Point) -> Divisor:
    return lat.divisor(lat.reduce(lat.vector(d), lat.point_index(q)))


def q_reduced(d: Divisor, q=None, *, factor: int = 1) -> Divisor:
    """The unique q-reduced divisor linearly equivalent to ``d``.

    ``q`` is a vertex id or a :class:`Point` on ``d.host``; it defaults to the
    lowest vertex id.  The answer is expressed on ``d.host``.
    """
    host = d.host
    q = _base_point(host, q)
    root = host.root
    droot, qroot = d.to_root(), host.to_root(q)
    lat = _lattice_for(root, [droot], [qroot], factor)
    return _reduce_on(lat, droot, qroot).transport(host)


def divisor_class(d: Divisor, q=None) -> DivisorClass:
    root = d.host.root
    qroot = d.host.to_root(_base_point(d.host, q))
    return DivisorClass(root, qroot, q_reduced(d.to_root(), qroot))


def linearly_equivalent(d1: Divisor, d2: Divisor, q=None) -> bool:
    if not d1.host.same_curve(d2.host):
        raise DivisorError("divisors live on different curves")
    if d1.degree != d2.degree:
        return False
    a, b = d1.to_root(), d2.to_root()
    root = a.host
    qroot = d1.host.to_root(_base_point(d1.host, q))
    lat = _lattice_for(root, [a, b], [qroot])
    qi = lat.point_index(qroot)
    return lat.reduce(lat.vector(a), qi) == lat.reduce(lat.vector(b), qi)


def has_effective_rep(d: Divisor) -> Divisor | None:
    """An effective divisor equivalent to ``d`` (its reduced form), or None."""
    if d.degree < 0:
        return None
    red = q_reduced(d)
    return red if red.is_effective() else None


def rank(d: Divisor, *, factor: int = 1, probes: str = "vertices") -> int:
    """Baker-Norine rank of ``d``.

    ``factor`` refines the lattice beyond the minimal one.  ``probes`` selects
    where the subtracted effective divisors E are placed: ``"vertices"`` uses
    the vertices of a loopless model (a rank-determining set), ``"lattice"``
    uses every lattice point.
    """
    if d.degree < 0:
        return -1
    droot = d.to_root()
    root = droot.host
    q = Point(vertex=root.base_vertex)
    lat = _lattice_for(root, [droot], [q], factor)
    if probes == "vertices":
        where = lat.rank_determining()
    elif probes == "lattice":
        where = None
    else:
        raise ValueError(f"unknown probe set {probes!r}")
    return lat.rank(lat.vector(droot), lat.point_index(q), where)


def rr_defect(d: Divisor, **kwargs) -> int:
    """r(D) - r(K - D) - (deg D - g + 1); zero by Riemann-Roch."""
    root = d.host.root
    droot = d.to_root()
    K = canonical_divisor(root)
    return rank(droot, **kwargs) - rank(K - droot, **kwargs) - (droot.degree - genus(root) + 1)
