from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropsym import (
    ChainOfLoopsSpec,
    Divisor,
    DivisorError,
    Model,
    ModelError,
    Point,
    as_fraction,
    canonical_divisor,
    chain_of_loops,
    genus,
    is_generic_chain,
    make_loop_free,
    refine,
    validate_strictly_semistable,
)


def test_as_fraction_rejects_floats_and_bools():
    assert as_fraction("3/6") == Fraction(1, 2)
    assert as_fraction(2) == 2
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


@pytest.mark.parametrize("name,g", [("interval", 0), ("circle", 1), ("dumbbell", 2),
                                    ("chain_g2", 2), ("chain_g3", 3)])
def test_fixture_genus_and_canonical_degree(models, name, g):
    m = models[name]
    assert genus(m) == g
    assert canonical_divisor(m).degree == 2 * g - 2


def test_weights_count_towards_genus():
    m = Model(["v"], {"v": 2}, [])
    assert genus(m) == 2
    assert canonical_divisor(m) == Divisor.from_vertices(m, {"v": 2})


@pytest.mark.parametrize("vertices,edges,msg", [
    (["a", "b"], [("e", "a", "b", 0)], "positive"),
    (["a", "b"], [("e", "a", "c", 1)], "dangling"),
    (["a", "b", "c"], [("e", "a", "b", 1)], "connected"),
    (["a", "a"], [], "duplicate"),
    (["a", "b"], [("e", "a", "b", 1), ("e", "b", "a", 1)], "duplicate"),
])
def test_model_rejects_bad_input(vertices, edges, msg):
    with pytest.raises(ModelError, match=msg):
        Model(vertices, {}, edges)


def test_strict_semistability(models):
    assert validate_strictly_semistable(models["dumbbell"]) == []
    bad = validate_strictly_semistable(models["interval"])
    assert len(bad) == 2 and all("1-valent" in s for s in bad)
    loop = Model(["v"], {}, [("e", "v", "v", 1)])
    assert any("loop" in s for s in validate_strictly_semistable(loop))


def test_loop_valence_and_make_loop_free():
    m = Model(["v"], {}, [("e", "v", "v", 2)])
    assert m.valence("v") == 2 and genus(m) == 1
    lf = make_loop_free(m)
    assert not lf.has_loops() and genus(lf) == 1 and lf.total_length == 2
    assert lf.same_curve(m)
    assert make_loop_free(lf) is lf


def test_point_normalization(models):
    m = models["interval"]
    assert m.normalize(Point.on("e", 0)) == Point.at("a")
    assert m.normalize(Point.on("e", 1)) == Point.at("b")
    with pytest.raises(DivisorError):
        m.normalize(Point.on("e", 2))
    assert str(Point.on("e", Fraction(1, 2))) == "e@1/2"


def test_refine_lineage_round_trip(models):
    m = models["chain_g2"]
    pts = [Point.on("m1", Fraction(1, 3)), Point.on("m1", 2), Point.on("l2", Fraction(1, 2))]
    r, mapping = refine(m, pts)
    assert genus(r) == genus(m) and r.total_length == m.total_length
    assert len(r.vertices) == len(m.vertices) + 3
    for p in pts:
        assert r.to_root(Point.at(mapping[p])) == p
        assert r.from_root(p) == Point.at(mapping[p])
    q = Point.on("m1", Fraction(5, 2))
    assert r.to_root(r.from_root(q)) == q


def test_divisor_transport_and_equality_across_refinements(models):
    m = models["chain_g2"]
    D = Divisor(m, [(Point.on("m1", 1), 2), (Point.at("v0"), -1)])
    r, _ = refine(m, [Point.on("m1", 1)])
    Dr = D.transport(r)
    assert Dr == D and hash(Dr) == hash(D)
    assert all(p.vertex is not None for p in Dr.support)
    assert (Dr + D).host == m and (Dr + D) == 2 * D


def test_divisor_arithmetic(models):
    m = models["circle"]
    a, b = Point.at("a"), Point.on("e1", Fraction(1, 3))
    D = Divisor(m, [(a, 2), (b, -1), (a, -2)])
    assert D.support == (b,)
    assert (D - D) == Divisor.zero(m)
    assert (-D).degree == 1 and (3 * D).degree == -3
    assert not D.is_effective() and Divisor.zero(m).is_effective()
    with pytest.raises(DivisorError):
        Divisor(m, [(a, Fraction(1, 2))])


def test_chain_of_loops_layout():
    m = chain_of_loops(ChainOfLoopsSpec((1, 1), (3, 3)))
    assert m.vertices == ("v0", "v1", "v2")
    assert canonical_divisor(m) == Divisor.from_vertices(m, {"v1": 2})
    mb = chain_of_loops(ChainOfLoopsSpec((1, 1, 1), (2, 2, 2), (1, 0)))
    assert genus(mb) == 3 and [e.id for e in mb.edges].count("b1") == 1
    assert "b2" not in [e.id for e in mb.edges]
    with pytest.raises(ModelError):
        ChainOfLoopsSpec((1, 1), (1,))
    with pytest.raises(ModelError):
        ChainOfLoopsSpec((1, 1), (1, 1), (1, 1))


def _forbidden(g):
    return {Fraction(p, q) for p in range(1, 2 * g) for q in range(1, 2 * g) if p + q <= 2 * g - 2}


ratios = st.fractions(min_value=Fraction(1, 12), max_value=20, max_denominator=12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5).flatmap(lambda g: st.tuples(
    st.lists(ratios, min_size=g, max_size=g), st.lists(ratios, min_size=g, max_size=g))))
def test_genericity_matches_enumeration(lm):
    l, m = lm
    spec = ChainOfLoopsSpec(tuple(l), tuple(m))
    bad = _forbidden(spec.genus)
    assert is_generic_chain(spec) == all(a / b not in bad for a, b in zip(l, m))


def test_genericity_scale_invariant():
    spec = ChainOfLoopsSpec((1, 2, 3), (5, 7, 11))
    for f in (Fraction(1, 3), 2, Fraction(7, 5)):
        assert is_generic_chain(spec.scaled(f)) == is_generic_chain(spec)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_forbidden_ratios_are_rejected(g):
    for p, q in itertools.product(range(1, 2 * g - 2), repeat=2):
        if p + q <= 2 * g - 2:
            assert not is_generic_chain(ChainOfLoopsSpec((p,) * g, (q,) * g))
