import pytest

from omegak.cells import gen, ident, comp_raw, CellError
from omegak.polygraph import (Generator, Polygraph, OmegaFunctor,
                              validate_functor, identity_functor,
                              inclusion_functor, compose_functors, disk,
                              boundary_disk)


def test_duplicate_generator_rejected():
    with pytest.raises(CellError):
        Polygraph("bad", [Generator("x", 0), Generator("x", 0)])


def test_validate_catches_non_globular_attachment():
    p = Polygraph("bad", [
        Generator("x", 0), Generator("y", 0), Generator("z", 0),
        Generator("u", 1, gen("x"), gen("y")),
        Generator("v", 1, gen("y"), gen("z")),
        Generator("w", 2, gen("u"), gen("v")),   # u, v are not parallel
    ])
    with pytest.raises(CellError):
        p.validate()


def test_counts_and_max_dim():
    d3 = disk(3)
    assert d3.counts() == [2, 2, 2, 1]
    assert d3.max_dim == 3
    assert boundary_disk(3).counts() == [2, 2, 2]
    d3.validate()
    boundary_disk(3).validate()


def test_json_roundtrip():
    d2 = disk(2)
    again = Polygraph.from_json(d2.to_json())
    assert again.to_json() == d2.to_json()
    assert {g.name for g in again.generators()} == \
        {g.name for g in d2.generators()}


def test_functor_validation_flags_bad_assignment():
    d1 = disk(1)
    p = Polygraph("pt", [Generator("x", 0)])
    f = OmegaFunctor(d1, p, {"d0s": gen("x"), "d0t": gen("x"),
                             "e1": gen("x")}, name="collapse")
    rep = validate_functor(f)
    assert not rep.ok          # e1 lands in dimension 0
    # collapsing e1 to an identity is fine
    g = OmegaFunctor(d1, p, {"d0s": gen("x"), "d0t": gen("x"),
                             "e1": ident(gen("x"))}, name="collapse")
    assert validate_functor(g).ok
    p2 = Polygraph("two", [Generator("x", 0), Generator("y", 0)])
    h = OmegaFunctor(d1, p2, {"d0s": gen("x"), "d0t": gen("y"),
                              "e1": ident(gen("x"))}, name="bad")
    assert not validate_functor(h).ok   # target endpoint mismatch


def test_identity_inclusion_compose(tower):
    q = tower.stage(1).polygraph
    idq = identity_functor(q)
    assert validate_functor(idq).ok
    s2 = tower.stage(2).polygraph
    inc = inclusion_functor(q, s2)
    assert validate_functor(inc).ok
    comp = compose_functors(inclusion_functor(s2, tower.stage(3).polygraph),
                            inc)
    rep = validate_functor(comp)
    assert rep.ok
    assert comp.apply(comp_raw(0, gen("g"), gen("f"))) is \
        comp_raw(0, gen("g"), gen("f"))


def test_functor_apply_unknown_generator(tower):
    q = tower.stage(1).polygraph
    f = identity_functor(q)
    with pytest.raises(CellError):
        f.apply(gen("missing"))
