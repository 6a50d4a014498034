import pytest

from omegak.cells import gen, ident, comp_raw, sexpr, CellError
from omegak.kernel import dim, cells_equal
from omegak.polygraph import (Generator, Polygraph, OmegaFunctor,
                              validate_functor, disk)
from omegak.constructions import (suspend, suspend_cell, desuspend_cell,
                                  suspend_functor, total_dual, dual_cell,
                                  coproduct, pushout, SequentialColimit,
                                  hom_of_suspension, truncate_intelligent,
                                  POLE_BOT, POLE_TOP, SUSP_PREFIX)
from omegak.walking import build_Q


def _table(p):
    return {(g.name, g.dim,
             None if g.src is None else sexpr(g.src),
             None if g.tgt is None else sexpr(g.tgt))
            for g in p.generators()}


def test_suspend_shifts_dimensions():
    q = build_Q()
    sq = suspend(q)
    assert sq.counts() == [2, 2, 3]
    sq.validate()
    for g in q.generators():
        assert sq.gen_dim(SUSP_PREFIX + g.name) == g.dim + 1
    assert POLE_BOT in sq and POLE_TOP in sq


def test_suspend_desuspend_cells_roundtrip():
    c = comp_raw(0, gen("g"), gen("f"))
    assert desuspend_cell(suspend_cell(c)) is c
    s = suspend_cell(c)
    assert s is comp_raw(1, gen("s.g"), gen("s.f"))


def test_hom_of_suspension_roundtrip():
    q = build_Q()
    back = hom_of_suspension(q)
    assert _table(back) == _table(q)


def test_total_dual_involution():
    for p in (disk(3), build_Q()):
        assert _table(total_dual(total_dual(p))) == _table(p)
        total_dual(p).validate()


def test_dual_cell_swaps_composition():
    c = comp_raw(0, gen("g"), gen("f"))
    assert dual_cell(c) is comp_raw(0, gen("f"), gen("g"))
    assert dual_cell(dual_cell(c)) is c


def test_coproduct_prefixes():
    q = build_Q()
    both, l, r = coproduct(q, q)
    assert both.counts() == [4, 6]
    assert validate_functor(l).ok and validate_functor(r).ok
    assert l.apply(gen("f")) is gen("l.f")
    assert r.apply(gen("f")) is gen("r.f")


def test_pushout_of_span():
    # glue two walking 1-cells along their shared source point
    pt = Polygraph("pt", [Generator("x", 0)])
    d1 = disk(1)
    i = OmegaFunctor(pt, d1, {"x": gen("d0s")}, name="i")
    f = OmegaFunctor(pt, d1, {"x": gen("d0s")}, name="f")
    out, inc, glued = pushout(i, f, namer=lambda n: "o." + n)
    assert sorted(g.name for g in out.generators()) == \
        ["d0s", "d0t", "e1", "o.d0t", "o.e1"]
    assert validate_functor(inc).ok and validate_functor(glued).ok
    assert glued.apply(gen("d0s")) is gen("d0s")
    assert glued.apply(gen("e1")) is gen("o.e1")


def test_pushout_rejects_non_inclusion():
    pt = Polygraph("pt", [Generator("x", 0)])
    d1 = disk(1)
    bad = OmegaFunctor(d1, d1, {"d0s": gen("d0s"), "d0t": gen("d0s"),
                                "e1": ident(gen("d0s"))}, name="bad")
    f = OmegaFunctor(d1, pt, {"d0s": gen("x"), "d0t": gen("x"),
                              "e1": ident(gen("x"))}, name="f")
    with pytest.raises(CellError):
        pushout(bad, f)


def test_sequential_colimit_caps_materialization(tower):
    col = SequentialColimit(lambda k: tower.stage(k).polygraph,
                            stage_for=lambda d: max(d, 1), max_dim=2)
    assert col.gen_dim("a.f") == 2
    with pytest.raises(CellError):
        col.ensure_dim(3)
    assert col.truncation(2).counts() == [2, 3, 6]


def test_suspend_functor_validates(tower):
    stage = tower.stage(2)
    sf = suspend_functor(stage.alpha)
    assert validate_functor(sf).ok
    assert sf.apply(gen(SUSP_PREFIX + "s.f")) is \
        suspend_cell(stage.alpha.apply(gen("s.f")))


def test_truncate_intelligent_counts(tower):
    col = tower.colimit
    pres = truncate_intelligent(col.truncation(3), 2)
    assert pres.polygraph.counts() == [2, 3, 6]
    assert len(pres.relations) == 12
    for lhs, rhs in pres.relations:
        assert dim(pres.polygraph, lhs) == 2
        v = cells_equal(col, lhs, rhs)
        # relations identify cells that are distinct below truncation
        assert v.kind == "unequal"
    assert '"relations"' in pres.to_json()
