"""The symmetric power Δ(G, d) as a colored polysimplicial complex.

A cell is a stable pair: chips on the vertices of G plus, for every edge, an
ordered (tail -> head) sequence of positive chip counts at new interior
points.  An edge of length a carrying k interior points contributes the factor
Δ(k, a), whose k + 1 coordinates are the consecutive segment lengths.  Setting
one coordinate to zero merges two neighbouring points, which gives the face
relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .core import Divisor, DivisorError, Model, Point, TropsymError, as_fraction

__all__ = [
    "ComplexError",
    "Polysimplex",
    "StableCell",
    "Face",
    "SymPowComplex",
    "CellPoint",
    "compositions",
    "contract",
    "enumerate_cells",
    "f_vector",
    "euler_characteristic",
    "faces_of",
    "poset_leq",
    "cell_of_divisor",
    "realize",
    "validate_complex",
    "face_coordinate_map",
    "to_dot",
]


class ComplexError(TropsymError):
    pass


@dataclass(frozen=True)
class Polysimplex:
    """Δ(k_1, a_1) x ... x Δ(k_r, a_r).

    Factor i is the set of (k_i + 1)-tuples of nonnegative rationals summing to
    a_i, so a factor with k = 0 is the single point (a,).
    """

    factors: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        fs = []
        for k, a in self.factors:
            a = as_fraction(a)
            if k < 0 or a <= 0:
                raise ComplexError(f"bad factor Δ({k}, {a})")
            fs.append((int(k), a))
        object.__setattr__(self, "factors", tuple(fs))

    @property
    def dim(self) -> int:
        return sum(k for k, _ in self.factors)

    @property
    def n_coords(self) -> int:
        return sum(k + 1 for k, _ in self.factors)

    def blocks(self) -> list[range]:
        """Coordinate index ranges, one per factor."""
        out, start = [], 0
        for k, _ in self.factors:
            out.append(range(start, start + k + 1))
            start += k + 1
        return out

    def contains(self, coords: Sequence) -> bool:
        if len(coords) != self.n_coords:
            return False
        for (k, a), blk in zip(self.factors, self.blocks()):
            xs = [coords[i] for i in blk]
            if any(x < 0 for x in xs) or sum(xs) != a:
                return False
        return True

    def faces(self) -> Iterator[frozenset[int]]:
        """Every face, as the set of coordinates it forces to zero (including the empty set)."""
        per_factor = []
        for blk in self.blocks():
            idx = list(blk)
            subsets = [frozenset(c) for r in range(len(idx)) for c in itertools.combinations(idx, r)]
            per_factor.append(subsets)
        for combo in itertools.product(*per_factor):
            yield frozenset().union(*combo)

    def n_faces(self) -> int:
        n = 1
        for k, _ in self.factors:
            n *= 2 ** (k + 1) - 1
        return n


@dataclass(frozen=True)
class StableCell:
    """One stable pair over ``host`` of total degree ``d``.

    ``vertex_weights`` and ``sequences`` list every vertex / edge of the host
    in model order; edges without interior points carry an empty sequence.
    """

    host: Model
    vertex_weights: tuple[tuple[str, int], ...]
    sequences: tuple[tuple[str, tuple[int, ...]], ...]

    @classmethod
    def make(cls, host: Model, vertex_weights: Mapping[str, int] | None = None,
             sequences: Mapping[str, Sequence[int]] | None = None) -> StableCell:
        vw = dict(vertex_weights or {})
        sq = dict(sequences or {})
        for v in vw:
            if not host.has_vertex(v):
                raise ComplexError(f"unknown vertex {v!r}")
        for e in sq:
            host.edge(e)
        cell = cls(host,
                   tuple((v, int(vw.get(v, 0))) for v in host.vertices),
                   tuple((e.id, tuple(int(x) for x in sq.get(e.id, ()))) for e in host.edges))
        if any(w < 0 for _, w in cell.vertex_weights):
            raise ComplexError("vertex weights must be nonnegative")
        if any(x < 1 for _, s in cell.sequences for x in s):
            raise ComplexError("interior points need positive weight")
        return cell

    @property
    def d(self) -> int:
        return sum(w for _, w in self.vertex_weights) + sum(sum(s) for _, s in self.sequences)

    @property
    def dim(self) -> int:
        return sum(len(s) for _, s in self.sequences)

    def weight(self, v: str) -> int:
        return dict(self.vertex_weights)[v]

    def sequence(self, e: str) -> tuple[int, ...]:
        return dict(self.sequences)[e]

    @property
    def subdivided(self) -> list[tuple[str, tuple[int, ...]]]:
        return [(e, s) for e, s in self.sequences if s]

    @property
    def shape(self) -> Polysimplex:
        return Polysimplex(tuple((len(s), self.host.edge(e).length) for e, s in self.subdivided))

    def coordinate_owner(self, i: int) -> tuple[str, int]:
        """Map a global coordinate index to (edge id, local index)."""
        for e, s in self.subdivided:
            if i <= len(s):
                return e, i
            i -= len(s) + 1
        raise ComplexError("coordinate index out of range")

    @property
    def id(self) -> str:
        vs = ",".join(f"{v}:{w}" for v, w in self.vertex_weights if w)
        es = ",".join(f"{e}:" + ".".join(map(str, s)) for e, s in self.subdivided)
        return f"V[{vs}]E[{es}]"

    def __repr__(self):
        return f"StableCell({self.id})"


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    """Ordered sequences of positive integers summing to n (one empty one for n = 0)."""
    if n == 0:
        yield ()
        return
    for cuts in itertools.product((False, True), repeat=n - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def contract(cell: StableCell, zeroed) -> StableCell:
    """The face of ``cell`` obtained by setting the given coordinates to zero."""
    zeroed = set(zeroed)
    vw = dict(cell.vertex_weights)
    seqs = dict(cell.sequences)
    offset = 0
    for eid, seq in cell.subdivided:
        k = len(seq)
        local = {i - offset for i in zeroed if offset <= i <= offset + k}
        offset += k + 1
        if not local:
            continue
        if len(local) == k + 1:
            raise ComplexError(f"cannot zero every segment of edge {eid!r}")
        e = cell.host.edge(eid)
        # points 0 and k+1 are tail and head; segment j joins points j and j+1
        weights = [0] + list(seq) + [0]
        blocks, cur = [], [0]
        for j in range(k + 1):
            if j in local:
                cur.append(j + 1)
            else:
                blocks.append(cur)
                cur = [j + 1]
        blocks.append(cur)
        new_seq = []
        for b in blocks:
            w = sum(weights[i] for i in b)
            if b[0] == 0:
                vw[e.tail] += w
            elif b[-1] == k + 1:
                vw[e.head] += w
            else:
                new_seq.append(w)
        seqs[eid] = tuple(new_seq)
    if any(i >= offset or i < 0 for i in zeroed):
        raise ComplexError("coordinate index out of range")
    return StableCell(cell.host, tuple(vw.items()), tuple(seqs.items()))


@dataclass(frozen=True)
class Face:
    """A codimension-one face relation: ``cell`` is the face where ``zeroed`` vanish."""

    cell: str
    zeroed: tuple[int, ...]


class SymPowComplex:
    """Cells of Δ(G, d) with their codimension-one face relations.

    The constructor trusts its input; :func:`validate_complex` checks it.
    """

    def __init__(self, host: Model, d: int, cells: Sequence[StableCell],
                 faces: Mapping[str, Sequence[Face]]):
        self.host = host
        self.d = d
        self.cells = tuple(cells)
        self._by_id = {c.id: c for c in self.cells}
        self.faces = {cid: tuple(fs) for cid, fs in faces.items()}

    def cell(self, cid: str) -> StableCell:
        try:
            return self._by_id[cid]
        except KeyError:
            raise ComplexError(f"unknown cell {cid!r}") from None

    def __contains__(self, cell) -> bool:
        cid = cell.id if isinstance(cell, StableCell) else cell
        return cid in self._by_id

    def __len__(self):
        return len(self.cells)

    @property
    def dim(self) -> int:
        return max(c.dim for c in self.cells)

    def maximal_cells(self) -> list[StableCell]:
        covered = {f.cell for fs in self.faces.values() for f in fs}
        return [c for c in self.cells if c.id not in covered]

    def shape_counts(self, dim: int | None = None) -> dict[tuple[int, ...], int]:
        """Multiset of factor dimensions (sorted descending) over cells, optionally of one dimension."""
        out: dict[tuple[int, ...], int] = {}
        for c in self.cells:
            if dim is None or c.dim == dim:
                key = tuple(sorted((k for k, _ in c.shape.factors), reverse=True))
                out[key] = out.get(key, 0) + 1
        return out


def _check_loop_free(G: Model) -> None:
    loops = [e.id for e in G.edges if e.is_loop]
    if loops:
        raise ComplexError(f"loop edges {loops} present; apply make_loop_free first")


def enumerate_cells(G: Model, d: int) -> SymPowComplex:
    """All stable pairs of degree d over the loop-free model G, with faces."""
    if d < 0:
        raise ComplexError("degree must be nonnegative")
    _check_loop_free(G)
    nv, ne = len(G.vertices), len(G.edges)
    cells = []

    def place(slot, left, acc):
        if slot == nv + ne:
            if left == 0:
                cells.append(acc)
            return
        if slot < nv:
            for w in range(left + 1):
                place(slot + 1, left - w, acc + [w])
        else:
            for n in range(left + 1):
                for comp in compositions(n):
                    place(slot + 1, left - n, acc + [comp])

    place(0, d, [])
    out = []
    for acc in cells:
        out.append(StableCell(G,
                              tuple(zip(G.vertices, acc[:nv])),
                              tuple(zip((e.id for e in G.edges), acc[nv:]))))
    out.sort(key=lambda c: (c.dim, c.id))
    if len({c.id for c in out}) != len(out):
        raise ComplexError("cell ids collide; vertex or edge ids contain separator characters")
    faces = {}
    for c in out:
        faces[c.id] = tuple(Face(contract(c, {i}).id, (i,)) for i in range(c.shape.n_coords))
    return SymPowComplex(G, d, out, faces)


def f_vector(c: SymPowComplex) -> list[int]:
    counts = [0] * (c.dim + 1)
    for cell in c.cells:
        counts[cell.dim] += 1
    return counts


def euler_characteristic(c: SymPowComplex) -> int:
    return sum((-1) ** i * n for i, n in enumerate(f_vector(c)))


def faces_of(c: SymPowComplex, cid: str) -> list[Face]:
    c.cell(cid)
    return list(c.faces.get(cid, ()))


def _edge_options(s1: tuple[int, ...], s2: tuple[int, ...]):
    """Ways to merge s2 into s1 plus amounts absorbed at (tail, head)."""
    k = len(s2)
    prefix = [0]
    for x in s2:
        prefix.append(prefix[-1] + x)
    opts = set()
    for a in range(k + 1):
        for b in range(a, k + 1):
            middle = s2[a:b]
            if not s1:
                if middle:
                    continue
            else:
                # middle must coarsen to s1 by summing consecutive runs
                if not middle or not _coarsens(middle, s1):
                    continue
            opts.add((prefix[a], prefix[k] - prefix[b]))
    return opts


def _coarsens(fine: Sequence[int], coarse: Sequence[int]) -> bool:
    i, run = 0, 0
    for x in fine:
        run += x
        if i >= len(coarse) or run > coarse[i]:
            return False
        if run == coarse[i]:
            i += 1
            run = 0
    return run == 0 and i == len(coarse)


def poset_leq(c1: StableCell, c2: StableCell) -> bool:
    """True iff c1 is obtained from c2 by merging neighbouring points on edges."""
    if c1.host != c2.host:
        raise ComplexError("cells live on different models")
    if c1.d != c2.d or c1.dim > c2.dim:
        return False
    G = c1.host
    need = {v: w1 - w2 for (v, w1), (_, w2) in zip(c1.vertex_weights, c2.vertex_weights)}
    if any(x < 0 for x in need.values()):
        return False
    choices = []
    for (eid, s1), (_, s2) in zip(c1.sequences, c2.sequences):
        opts = _edge_options(s1, s2)
        if not opts:
            return False
        e = G.edge(eid)
        choices.append((e.tail, e.head, sorted(opts)))

    def search(i, left):
        if i == len(choices):
            return all(x == 0 for x in left.values())
        tail, head, opts = choices[i]
        for t, h in opts:
            if left[tail] >= t and left[head] >= h:
                left[tail] -= t
                left[head] -= h
                if search(i + 1, left):
                    return True
                left[tail] += t
                left[head] += h
        return False

    return search(0, need)


@dataclass(frozen=True)
class CellPoint:
    """A point of |Δ(G, d)|: a cell plus segment lengths along every edge.

    ``coordinates`` has one entry per host edge, a (k + 1)-tuple for an edge
    carrying k interior points of the cell.
    """

    cell: StableCell
    coordinates: tuple[tuple[str, tuple[Fraction, ...]], ...]

    @property
    def cell_id(self) -> str:
        return self.cell.id

    def coords(self, eid: str) -> tuple[Fraction, ...]:
        return dict(self.coordinates)[eid]

    def is_interior(self) -> bool:
        return all(x > 0 for _, xs in self.coordinates for x in xs)


def cell_of_divisor(D: Divisor) -> CellPoint:
    """The carrier cell of an effective divisor and its segment coordinates."""
    if not D.is_effective():
        raise DivisorError("divisor is not effective")
    G = D.host
    _check_loop_free(G)
    vw = {v: 0 for v in G.vertices}
    interior: dict[str, list[tuple[Fraction, int]]] = {e.id: [] for e in G.edges}
    for p, c in D.terms.items():
        if p.vertex is not None:
            vw[p.vertex] += c
        else:
            interior[p.edge].append((p.pos, c))
    seqs, coords = [], []
    for e in G.edges:
        pts = sorted(interior[e.id])
        seqs.append((e.id, tuple(c for _, c in pts)))
        marks = [Fraction(0)] + [x for x, _ in pts] + [e.length]
        coords.append((e.id, tuple(b - a for a, b in zip(marks, marks[1:]))))
    cell = StableCell(G, tuple(vw.items()), tuple(seqs))
    return CellPoint(cell, tuple(coords))


def realize(c: SymPowComplex | None, p: CellPoint) -> Divisor:
    """The effective divisor at a (possibly boundary) point of a cell."""
    cell = p.cell
    if c is not None and cell.id not in c:
        raise ComplexError(f"cell {cell.id} is not in the complex")
    G = cell.host
    coords = dict(p.coordinates)
    terms = [(Point(vertex=v), w) for v, w in cell.vertex_weights if w]
    for eid, seq in cell.sequences:
        e = G.edge(eid)
        xs = tuple(as_fraction(x) for x in coords.get(eid, (e.length,)))
        if len(xs) != len(seq) + 1:
            raise ComplexError(f"edge {eid!r} needs {len(seq) + 1} coordinates")
        if any(x < 0 for x in xs):
            raise ComplexError(f"negative coordinate on edge {eid!r}")
        if sum(xs) != e.length:
            raise ComplexError(f"coordinates on {eid!r} sum to {sum(xs)}, not {e.length}")
        pos = Fraction(0)
        for x, w in zip(xs, seq):
            pos += x
            terms.append((Point(edge=eid, pos=pos) if 0 < pos < e.length else
                          Point(vertex=e.tail if pos == 0 else e.head), w))
    return Divisor(G, terms)


def face_coordinate_map(cell: StableCell, z: int) -> list[int | None]:
    """Coordinates of the codimension-one face ``z`` as coordinates of ``cell``.

    Entry i is the index in ``cell`` that face coordinate i lands on.  When a
    one-point edge loses its point the surviving segment is the whole edge and
    drops out of the face's coordinates.
    """
    eid, j = cell.coordinate_owner(z)
    k = len(cell.sequence(eid))
    out = []
    for i in range(cell.shape.n_coords):
        if i == z:
            continue
        if k == 1 and cell.coordinate_owner(i)[0] == eid:
            continue
        out.append(i)
    return out


def validate_complex(c: SymPowComplex) -> list[str]:
    """Check grading, colors and the unique-face-morphism condition.

    A face morphism into a cell is identified by the coordinates it sets to
    zero.  Every codimension-one face must carry exactly one stored morphism,
    composites of stored morphisms must agree with direct contraction
    (functoriality), and the cells reached this way must be exactly the cells
    below in the stable-pair order.
    """
    out = []
    ids = set()
    for cell in c.cells:
        if cell.id in ids:
            out.append(f"duplicate cell {cell.id}")
        ids.add(cell.id)
        if cell.host != c.host:
            out.append(f"cell {cell.id} lives on another model")
        if cell.d != c.d:
            out.append(f"cell {cell.id} has degree {cell.d}, expected {c.d}")
        if any(x < 1 for _, s in cell.sequences for x in s):
            out.append(f"cell {cell.id} violates stability")

    for cell in c.cells:
        shape = cell.shape
        hits: dict[tuple[int, ...], list[Face]] = {}
        for f in c.faces.get(cell.id, ()):
            hits.setdefault(tuple(sorted(f.zeroed)), []).append(f)
        stored: dict[int, StableCell] = {}
        for z in range(shape.n_coords):
            got = hits.pop((z,), [])
            if len(got) != 1:
                out.append(f"face {z} of {cell.id} is the image of {len(got)} stored morphisms")
                continue
            f = got[0]
            if f.cell not in ids:
                out.append(f"face of {cell.id} points to unknown cell {f.cell}")
                continue
            expected = contract(cell, {z})
            if f.cell != expected.id:
                out.append(f"face {z} of {cell.id} is {f.cell}, expected {expected.id}")
                continue
            low = c.cell(f.cell)
            stored[z] = low
            if low.dim != cell.dim - 1:
                out.append(f"face {f.cell} of {cell.id} breaks the grading")
            # colors: a factor of the face may only map onto the factor of the same edge
            big = dict(zip((e for e, _ in cell.subdivided), shape.factors))
            small = dict(zip((e for e, _ in low.subdivided), low.shape.factors))
            for e, (k, a) in small.items():
                if e not in big or big[e][1] != a or big[e][0] < k:
                    out.append(f"face {f.cell} of {cell.id} does not preserve the color of {e}")
        for z in hits:
            out.append(f"{cell.id} has a stored face with bad coordinates {list(z)}")

        reached = set()
        for zs in shape.faces():
            low = contract(cell, zs)
            reached.add(low.id)
            if low.id not in ids:
                out.append(f"face {sorted(zs)} of {cell.id} is not a cell of the complex")
                continue
            if low.dim != cell.dim - len(zs):
                out.append(f"face {sorted(zs)} of {cell.id} has the wrong dimension")
            # functoriality: peel off one zeroed coordinate through a stored face
            for z in zs:
                if z not in stored:
                    continue
                back = face_coordinate_map(cell, z)
                rest = {back.index(i) for i in zs if i != z}
                if contract(stored[z], rest).id != low.id:
                    out.append(f"composite through face {z} of {cell.id} misses {low.id}")
        below = {o.id for o in c.cells if o.dim <= cell.dim and poset_leq(o, cell)}
        if below != reached:
            out.append(f"cells below {cell.id} differ from the images of its faces")
    return out


def to_dot(c: SymPowComplex) -> str:
    """Hasse diagram of the stable-pair poset in Graphviz format."""
    lines = ["digraph stable_pairs {", "  rankdir=BT;"]
    names = {cell.id: f"c{i}" for i, cell in enumerate(c.cells)}
    for cell in c.cells:
        lines.append(f'  {names[cell.id]} [label="{cell.id}\\ndim {cell.dim}"];')
    for cell in c.cells:
        for f in c.faces.get(cell.id, ()):
            if f.cell in names:
                lines.append(f"  {names[f.cell]} -> {names[cell.id]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
