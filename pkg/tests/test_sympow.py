from __future__ import annotations

import random
from fractions import Fraction

import pytest

from conftest import random_effective
from oracles import count_stable_pairs, macdonald_euler
from tropsym import (
    CellPoint,
    ComplexError,
    Divisor,
    DivisorError,
    Face,
    Model,
    Point,
    Polysimplex,
    StableCell,
    SymPowComplex,
    cell_of_divisor,
    compositions,
    contract,
    enumerate_cells,
    euler_characteristic,
    f_vector,
    genus,
    poset_leq,
    realize,
    to_dot,
    validate_complex,
)

LOOP_FREE = ["interval", "circle", "dumbbell", "chain_g2", "chain_g3"]


def test_compositions():
    assert list(compositions(0)) == [()]
    assert sorted(compositions(3)) == [(1, 1, 1), (1, 2), (2, 1), (3,)]
    assert all(len(list(compositions(n))) == 2 ** (n - 1) for n in range(1, 8))


def test_polysimplex_faces():
    P = Polysimplex(((2, Fraction(1)), (1, Fraction(3))))
    assert P.dim == 3 and P.n_coords == 5
    assert P.n_faces() == 7 * 3
    faces = list(P.faces())
    assert len(faces) == P.n_faces() and frozenset() in faces
    assert frozenset({0, 1, 2}) not in faces
    assert P.contains([Fraction(1, 2), Fraction(1, 2), 0, 1, 2])
    assert not P.contains([1, 1, 0, 1, 2])


@pytest.mark.parametrize("name", LOOP_FREE)
@pytest.mark.parametrize("d", range(0, 4))
def test_f_vector_matches_generating_function(models, name, d):
    c = enumerate_cells(models[name], d)
    assert f_vector(c) == count_stable_pairs(models[name], d)


@pytest.mark.parametrize("name", LOOP_FREE)
@pytest.mark.parametrize("d", range(1, 4))
def test_euler_characteristic_macdonald(models, name, d):
    m = models[name]
    assert euler_characteristic(enumerate_cells(m, d)) == macdonald_euler(1 - genus(m), d)


def test_known_f_vectors(models):
    assert f_vector(enumerate_cells(models["interval"], 2)) == [3, 3, 1]
    assert f_vector(enumerate_cells(models["circle"], 2)) == [3, 6, 3]
    assert f_vector(enumerate_cells(models["dumbbell"], 3)) == [20, 75, 90, 35]
    assert f_vector(enumerate_cells(models["chain_g3"], 3)) == [20, 90, 126, 56]


def test_dumbbell_square_shapes(models):
    c = enumerate_cells(models["dumbbell"], 2)
    assert len(c.maximal_cells()) == 15
    assert c.shape_counts(2) == {(1, 1): 10, (2,): 5}


def test_degree_zero_is_a_point(models):
    c = enumerate_cells(models["chain_g3"], 0)
    assert f_vector(c) == [1] and c.cells[0].id == "V[]E[]"


def test_loops_rejected():
    m = Model(["v"], {}, [("e", "v", "v", 1)])
    with pytest.raises(ComplexError, match="make_loop_free"):
        enumerate_cells(m, 1)
    with pytest.raises(ComplexError):
        enumerate_cells(Model(["v", "w"], {}, [("e", "v", "w", 1)]), -1)


def test_cells_sorted_and_ids_unique(models):
    c = enumerate_cells(models["dumbbell"], 3)
    ids = [x.id for x in c.cells]
    assert len(set(ids)) == len(ids)
    assert [x.dim for x in c.cells] == sorted(x.dim for x in c.cells)


def test_contract_examples(models):
    m = models["interval"]
    cell = StableCell.make(m, {}, {"e": (1, 1)})
    # coordinates: segments [a, p1], [p1, p2], [p2, b]
    assert contract(cell, {0}).id == "V[a:1]E[e:1]"
    assert contract(cell, {1}).id == "V[]E[e:2]"
    assert contract(cell, {2}).id == "V[b:1]E[e:1]"
    assert contract(cell, {0, 2}).id == "V[a:1,b:1]E[]"
    with pytest.raises(ComplexError):
        contract(cell, {0, 1, 2})


def test_parallel_edge_squares_share_a_corner(models):
    # two corners of a square on parallel edges contract to the same stable pair
    m = models["circle"]
    sq = StableCell.make(m, {}, {"e1": (1,), "e2": (1,)})
    assert contract(sq, {0, 3}).id == contract(sq, {1, 2}).id == "V[a:1,b:1]E[]"


@pytest.mark.parametrize("name", LOOP_FREE)
def test_validate_complex_clean(models, name):
    for d in range(0, 3):
        assert validate_complex(enumerate_cells(models[name], d)) == []


def _corrupt(c, **changes):
    cells = changes.get("cells", c.cells)
    faces = changes.get("faces", c.faces)
    return SymPowComplex(c.host, c.d, cells, faces)


def test_validate_detects_corruption(models):
    c = enumerate_cells(models["circle"], 2)
    top = c.cells[-1]
    # a duplicated face morphism
    faces = dict(c.faces)
    faces[top.id] = faces[top.id] + (faces[top.id][0],)
    out = validate_complex(_corrupt(c, faces=faces))
    assert len(out) == 1 and "2 stored morphisms" in out[0]
    # a missing face
    faces = dict(c.faces)
    faces[top.id] = faces[top.id][1:]
    assert validate_complex(_corrupt(c, faces=faces))
    # a face pointing at the wrong cell
    faces = dict(c.faces)
    f0 = faces[top.id][0]
    faces[top.id] = (Face(c.cells[0].id, f0.zeroed),) + faces[top.id][1:]
    assert validate_complex(_corrupt(c, faces=faces))
    # a missing cell
    assert validate_complex(_corrupt(c, cells=c.cells[1:]))
    # a cell of the wrong degree
    extra = StableCell.make(c.host, {"a": 1})
    assert any("degree" in s for s in validate_complex(_corrupt(c, cells=c.cells + (extra,))))


def test_poset_leq_agrees_with_contraction(models):
    c = enumerate_cells(models["dumbbell"], 2)
    for hi in c.cells:
        images = {contract(hi, zs).id for zs in hi.shape.faces()}
        for lo in c.cells:
            assert poset_leq(lo, hi) == (lo.id in images)


def test_to_dot(models):
    c = enumerate_cells(models["interval"], 2)
    dot = to_dot(c)
    assert dot.startswith("digraph") and dot.count("->") == sum(len(v) for v in c.faces.values())


# -- points of the complex
@pytest.mark.parametrize("name", LOOP_FREE)
def test_cell_of_divisor_round_trip(models, name):
    m = models[name]
    rng = random.Random(31)
    for _ in range(100):
        D = random_effective(rng, m, rng.randint(0, 4))
        p = cell_of_divisor(D)
        assert realize(None, p) == D
        assert p.is_interior()
        assert p.cell.d == D.degree


def test_cell_of_divisor_lands_in_complex(models):
    m = models["dumbbell"]
    c = enumerate_cells(m, 3)
    rng = random.Random(4)
    for _ in range(50):
        D = random_effective(rng, m, 3)
        p = cell_of_divisor(D)
        assert p.cell.id in c and p.is_interior()


def test_realize_boundary_point_moves_to_face(models):
    m = models["interval"]
    cell = StableCell.make(m, {}, {"e": (1, 2)})
    p = CellPoint(cell, (("e", (Fraction(0), Fraction(1, 3), Fraction(2, 3))),))
    D = realize(None, p)
    assert D == Divisor(m, [(Point.at("a"), 1), (Point.on("e", Fraction(1, 3)), 2)])
    assert cell_of_divisor(D).cell == contract(cell, {0})


def test_realize_validates(models):
    m = models["interval"]
    cell = StableCell.make(m, {}, {"e": (1,)})
    with pytest.raises(ComplexError):
        realize(None, CellPoint(cell, (("e", (Fraction(1, 2), Fraction(1, 3))),)))
    with pytest.raises(ComplexError):
        realize(None, CellPoint(cell, (("e", (Fraction(3, 2), Fraction(-1, 2))),)))
    c = enumerate_cells(m, 2)
    with pytest.raises(ComplexError):
        realize(c, CellPoint(cell, (("e", (Fraction(1, 2), Fraction(1, 2))),)))


def test_cell_of_non_effective_rejected(models):
    m = models["circle"]
    with pytest.raises(DivisorError):
        cell_of_divisor(Divisor(m, [(Point.at("a"), -1)]))
