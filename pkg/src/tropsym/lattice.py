"""Unit-subdivided lattice graphs and Dhar's burning algorithm.

A model whose edge lengths are integers after scaling by ``scale`` becomes a
finite multigraph with unit edges: every edge of scaled length ``L`` is cut
into ``L`` segments.  Vertex weights are modelled by virtual cycles of two unit
edges hanging off the weighted vertex, so ranks on weighted curves follow the
usual virtual-loop convention.

Reduced divisors and ranks on the lattice agree with the ones on the metric
graph when every point involved is a lattice point.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Divisor, DivisorError, Model, Point, lcm_of_denominators

__all__ = ["Lattice", "lattice_scale"]


def lattice_scale(model: Model, positions: Iterable[Fraction] = (), factor: int = 1) -> int:
    """Smallest scale making every length and position integral, times ``factor``.

    Loop edges must end up at least two segments long.
    """
    n = lcm_of_denominators([e.length for e in model.edges] + list(positions)) * factor
    if any(e.is_loop and e.length * n == 1 for e in model.edges):
        n *= 2
    return n


class Lattice:
    def __init__(self, model: Model, scale: int):
        self.model = model
        self.scale = scale
        index: dict[Point, int] = {}
        points: list[Point | None] = []

        def add(p):
            index[p] = len(points)
            points.append(p)
            return index[p]

        for v in model.vertices:
            add(Point(vertex=v))
        self.n_model_vertices = len(points)
        edge_pairs = []
        self.edge_chains = {}
        for e in model.edges:
            L = e.length * scale
            if L.denominator != 1:
                raise DivisorError(f"edge {e.id!r} is not a multiple of 1/{scale}")
            L = int(L)
            if e.is_loop and L < 2:
                raise DivisorError(f"loop {e.id!r} needs at least two lattice segments")
            chain = [index[Point(vertex=e.tail)]]
            for j in range(1, L):
                chain.append(add(Point(edge=e.id, pos=Fraction(j, scale))))
            chain.append(index[Point(vertex=e.head)])
            self.edge_chains[e.id] = chain
            edge_pairs.extend(zip(chain, chain[1:]))
        self.n_curve_points = len(points)
        # virtual cycles for vertex weights
        for v in model.vertices:
            for _ in range(model.weights[v]):
                x = len(points)
                points.append(None)
                edge_pairs.append((index[Point(vertex=v)], x))
                edge_pairs.append((index[Point(vertex=v)], x))

        self.index = index
        self.points = points
        self.n = len(points)
        adj: list[dict[int, int]] = [dict() for _ in range(self.n)]
        for a, b in edge_pairs:
            adj[a][b] = adj[a].get(b, 0) + 1
            adj[b][a] = adj[b].get(a, 0) + 1
        self.adj = [sorted(d.items()) for d in adj]
        self._bfs_cache: dict[int, list[list[int]]] = {}

    @classmethod
    def for_points(cls, model: Model, points: Iterable[Point], factor: int = 1) -> Lattice:
        pos = [p.pos for p in points if p.vertex is None]
        return cls(model, lattice_scale(model, pos, factor))

    # -- conversions
    def point_index(self, p: Point) -> int:
        p = self.model.normalize(p)
        try:
            return self.index[p]
        except KeyError:
            raise DivisorError(f"{p} is not a lattice point at scale {self.scale}") from None

    def vector(self, d: Divisor) -> list[int]:
        vec = [0] * self.n
        for p, c in d.terms.items():
            vec[self.point_index(p)] += c
        return vec

    def divisor(self, vec: Sequence[int]) -> Divisor:
        terms = []
        for i, c in enumerate(vec):
            if not c:
                continue
            p = self.points[i]
            if p is None:
                raise DivisorError("divisor has chips on a virtual weight cycle")
            terms.append((p, c))
        return Divisor(self.model, terms)

    def rank_determining(self) -> list[int]:
        """Vertices of a loopless model of the curve, including virtual cycles."""
        out = list(range(self.n_model_vertices))
        for e in self.model.edges:
            if e.is_loop:
                chain = self.edge_chains[e.id]
                out.append(chain[len(chain) // 2])
        out.extend(range(self.n_curve_points, self.n))
        return out

    # -- chip firing
    def _layers(self, q: int) -> list[list[int]]:
        layers = self._bfs_cache.get(q)
        if layers is None:
            dist = [-1] * self.n
            dist[q] = 0
            layers = [[q]]
            queue = deque([q])
            while queue:
                v = queue.popleft()
                for u, _ in self.adj[v]:
                    if dist[u] < 0:
                        dist[u] = dist[v] + 1
                        if dist[u] == len(layers):
                            layers.append([])
                        layers[dist[u]].append(u)
                        queue.append(u)
            self._bfs_cache[q] = layers
        return layers

    def _fire(self, D: list[int], inside: Sequence[bool], times: int) -> None:
        for v in range(self.n):
            if inside[v]:
                for u, mult in self.adj[v]:
                    if not inside[u]:
                        D[v] -= times * mult
                        D[u] += times * mult

    def reduce(self, vec: Sequence[int], q: int) -> tuple[int, ...]:
        """The q-reduced divisor linearly equivalent to ``vec``."""
        D = list(vec)
        layers = self._layers(q)
        # make D effective away from q by firing BFS balls, outermost first
        inside = [False] * self.n
        balls = []
        for layer in layers:
            for v in layer:
                inside[v] = True
            balls.append(inside[:])
        for j in range(len(layers) - 2, -1, -1):
            ball = balls[j]
            times = 0
            for u in layers[j + 1]:
                if D[u] < 0:
                    into = sum(m for w, m in self.adj[u] if ball[w])
                    times = max(times, -(D[u] // into))
            if times:
                self._fire(D, ball, times)
        # Dhar's burning: fire the unburnt set until everything burns
        while True:
            burnt = [False] * self.n
            burnt[q] = True
            heat = [0] * self.n
            queue = deque([q])
            while queue:
                v = queue.popleft()
                for u, mult in self.adj[v]:
                    if not burnt[u]:
                        heat[u] += mult
                        if heat[u] > D[u]:
                            burnt[u] = True
                            queue.append(u)
            unburnt = [not b for b in burnt]
            if not any(unburnt):
                return tuple(D)
            times = min(D[u] // heat[u] for u in range(self.n) if unburnt[u] and heat[u])
            self._fire(D, unburnt, times)

    def rank(self, vec: Sequence[int], q: int, probes: Sequence[int] | None = None) -> int:
        """Baker-Norine rank, quantifying over chips placed at ``probes``.

        Uses r(D) = 1 + min_v r(D - v) over a rank-determining set, memoized on
        reduced forms.
        """
        probes = list(range(self.n)) if probes is None else list(probes)
        if sum(vec) < 0:
            return -1
        memo: dict[tuple[int, ...], int] = {}

        def r(v):
            red = self.reduce(v, q)
            if red[q] < 0:
                return -1
            hit = memo.get(red)
            if hit is not None:
                return hit
            best = math.inf
            for p in probes:
                nxt = list(red)
                nxt[p] -= 1
                best = min(best, r(nxt))
                if best < 0:
                    break
            memo[red] = best + 1
            return best + 1

        return r(list(vec))
