"""Diagonal maps, the Abel-Jacobi map and a grid search for de Jonquières divisors."""

from __future__ import annotations

import itertools
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chipfiring import DivisorClass, divisor_class
from .core import Divisor, DivisorError, Model, Point, as_fraction
from .lattice import Lattice, lattice_scale

__all__ = [
    "DiagonalSpec",
    "DeJonquieresQuery",
    "diagonal",
    "abel_jacobi",
    "grid_points",
    "dejonquieres_search",
]


@dataclass(frozen=True)
class DiagonalSpec:
    """Multiplicities (m_1..m_n) and degrees (d_1..d_n); the target degree is sum m_i d_i."""

    multiplicities: tuple[int, ...]
    degrees: tuple[int, ...]
    d: int | None = None

    def __post_init__(self):
        ms, ds = tuple(self.multiplicities), tuple(self.degrees)
        if len(ms) != len(ds) or not ms:
            raise DivisorError("need one degree per multiplicity")
        if any(x < 1 for x in ms + ds):
            raise DivisorError("multiplicities and degrees must be positive")
        total = sum(m * k for m, k in zip(ms, ds))
        if self.d is not None and self.d != total:
            raise DivisorError(f"sum of m_i d_i is {total}, not {self.d}")
        object.__setattr__(self, "multiplicities", ms)
        object.__setattr__(self, "degrees", ds)
        object.__setattr__(self, "d", total)


def diagonal(spec: DiagonalSpec, divisors: Sequence[Divisor]) -> Divisor:
    """(D_1, ..., D_n) -> m_1 D_1 + ... + m_n D_n."""
    if len(divisors) != len(spec.degrees):
        raise DivisorError(f"expected {len(spec.degrees)} divisors")
    out = None
    for m, k, D in zip(spec.multiplicities, spec.degrees, divisors):
        if D.degree != k:
            raise DivisorError(f"divisor of degree {D.degree} given for a slot of degree {k}")
        if not D.is_effective():
            raise DivisorError("diagonal maps take effective divisors")
        out = m * D if out is None else out + m * D
    return out


def abel_jacobi(D: Divisor, base=None) -> DivisorClass:
    """Send an effective divisor to its class in Pic_d, as a reduced normal form."""
    if not D.is_effective():
        raise DivisorError("the Abel-Jacobi map is defined on effective divisors")
    return divisor_class(D, base)


@dataclass(frozen=True)
class DeJonquieresQuery:
    """Search |D| for divisors a_1 p_1 + ... + a_k p_k with distinct grid points p_i.

    ``target`` is a :class:`DivisorClass` or any representative divisor.
    Grid points sit at multiples of ``resolution`` from each tail.
    """

    host: Model
    target: DivisorClass | Divisor
    shape: tuple[int, ...]
    resolution: Fraction

    def __post_init__(self):
        shape = tuple(int(a) for a in self.shape)
        if not shape or any(a < 1 for a in shape):
            raise DivisorError("shape must be a nonempty tuple of positive integers")
        r = as_fraction(self.resolution)
        if r <= 0:
            raise DivisorError("resolution must be positive")
        for e in self.host.edges:
            if (e.length / r).denominator != 1:
                raise DivisorError(f"resolution {r} does not divide the length of {e.id!r}")
        object.__setattr__(self, "shape", tuple(sorted(shape, reverse=True)))
        object.__setattr__(self, "resolution", r)

    @property
    def representative(self) -> Divisor:
        if isinstance(self.target, DivisorClass):
            return self.target.representative.transport(self.host)
        return self.target.transport(self.host)


def grid_points(m: Model, resolution) -> list[Point]:
    r = as_fraction(resolution)
    pts = [Point(vertex=v) for v in m.vertices]
    for e in m.edges:
        steps = e.length / r
        if steps.denominator != 1:
            raise DivisorError(f"resolution {r} does not divide the length of {e.id!r}")
        pts.extend(Point(edge=e.id, pos=j * r) for j in range(1, int(steps)))
    return pts


def _placements(n_points: int, shape: tuple[int, ...], first: int):
    """Injective assignments of grid indices to parts, up to permuting equal parts.

    Only placements whose largest-part group starts at index ``first`` are
    produced, which splits the search into disjoint chunks.
    """
    groups = sorted(Counter(shape).items(), reverse=True)

    def rec(g, used):
        if g == len(groups):
            yield ()
            return
        a, mult = groups[g]
        free = [i for i in range(n_points) if i not in used]
        for combo in itertools.combinations(free, mult):
            for rest in rec(g + 1, used | set(combo)):
                yield tuple((a, i) for i in combo) + rest

    a, mult = groups[0]
    for tail in itertools.combinations(range(first + 1, n_points), mult - 1):
        combo = (first,) + tail
        for rest in rec(1, set(combo)):
            yield tuple((a, i) for i in combo) + rest


def _search_chunk(args):
    lattice, grid_idx, shape, target, q, firsts = args
    found = []
    n = lattice.n
    for first in firsts:
        for placement in _placements(len(grid_idx), shape, first):
            vec = [0] * n
            for a, i in placement:
                vec[grid_idx[i]] += a
            if lattice.reduce(vec, q) == target:
                found.append(placement)
    return found


def dejonquieres_search(query: DeJonquieresQuery, workers: int | None = None) -> list[Divisor]:
    """All grid divisors of the requested shape linearly equivalent to the target.

    Exhaustive over grid points only: points off the grid are never tried.
    ``workers`` (default: ``TROPSYM_THREADS`` or 1) fans the search out over
    processes; the output order is canonical either way.
    """
    host = query.host
    rep = query.representative
    if rep.degree != sum(query.shape):
        raise DivisorError(f"class has degree {rep.degree} but the shape has degree {sum(query.shape)}")
    grid = grid_points(host, query.resolution)
    root = host.root
    rep_root = rep.to_root()
    grid_root = [host.to_root(p) for p in grid]
    positions = [p.pos for p in grid_root + list(rep_root.support) if p.vertex is None]
    lat = Lattice(root, lattice_scale(root, positions))
    q = lat.point_index(Point(vertex=root.base_vertex))
    target = lat.reduce(lat.vector(rep_root), q)
    grid_idx = [lat.point_index(p) for p in grid_root]

    if workers is None:
        workers = int(os.environ.get("TROPSYM_THREADS", "1") or 1)
    firsts = list(range(len(grid)))
    if workers > 1:
        chunks = [firsts[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_search_chunk, [(lat, grid_idx, query.shape, target, q, ch) for ch in chunks])
            placements = [p for part in parts for p in part]
    else:
        placements = _search_chunk((lat, grid_idx, query.shape, target, q, firsts))

    found = {Divisor(host, [(grid[i], a) for a, i in pl]) for pl in placements}
    return sorted(found, key=lambda D: D.key())
