import random

import pytest

from omegak.cells import gen, ident, comp_raw, CellError
from omegak.kernel import cells_equal
from omegak.polygraph import validate_functor
from omegak.marked import (Marking, marked, flat, sharp, natural,
                           marked_suspend, build_C1_sharp,
                           build_marked_AB_Q, MarkedTower,
                           comparison_report, closure_check)
from omegak.walking import build_Q
from omegak.invertibility import omegaE_cell_witness


def test_flat_and_sharp():
    q = build_Q()
    mf, ms = flat(q), sharp(q)
    gf = comp_raw(0, gen("g"), gen("f"))
    assert not marked(mf, gen("f"))
    assert marked(mf, ident(gen("p")))
    assert marked(ms, gen("f"))
    assert marked(ms, gf)
    # flat is contained in sharp
    for c in (gen("f"), gen("g"), gf, ident(gen("q"))):
        assert not marked(mf, c) or marked(ms, c)


def test_marking_rejects_unknown_seed():
    q = build_Q()
    with pytest.raises(CellError):
        Marking(q, frozenset({"nope"}))


def test_natural_marking(tower, colim):
    q = build_Q()
    assert natural(q, family="omegaE").seeds == sharp(q).seeds
    # with certificates only for f, g-composites stay unmarked
    wf = omegaE_cell_witness(tower, gen("f"))
    m = natural(q, certificates={"f": wf})
    assert marked(m, gen("f"))
    assert not marked(m, comp_raw(0, gen("g"), gen("f")))
    with pytest.raises(CellError):
        natural(q, certificates={"nope": wf})


def test_marked_suspend():
    m = marked_suspend(build_C1_sharp())
    assert m.seeds == frozenset({"s.f"})
    assert marked(m, gen("s.f"))
    assert not marked(m, gen("s.p"))


def test_marked_AB_Q_tables():
    mA, mB, mQ = build_marked_AB_Q()
    assert mA.base.counts() == [2, 2, 1]
    assert mB.base.counts() == [2, 2, 1]
    assert mQ.base.counts() == [2, 3, 2]
    assert mA.seeds == frozenset({"f", "alpha"})
    assert mB.seeds == frozenset({"f", "beta"})
    assert mQ.seeds == frozenset({"f", "alpha", "beta"})
    assert marked(mQ, gen("alpha"))
    assert not marked(mQ, gen("g"))
    assert not marked(mQ, comp_raw(0, gen("g"), gen("f")))
    # dim <= 1 restriction of Qbar is the base span
    assert sorted(g.name for g in mQ.base.generators() if g.dim <= 1) == \
        sorted(g.name for g in build_Q().generators())


def test_marked_tower_stages_validate(mtower):
    for k in range(4):
        stage = mtower.stage(k)
        stage.polygraph.validate()
        for leg in (stage.iota, stage.alpha, stage.beta):
            if leg is not None:
                rep = leg.validate()
                assert rep.ok and not rep.soft, (k, leg.name)


def test_marked_stage1_leg_images(mtower):
    s1 = mtower.stage(1)
    assert s1.alpha.apply(gen("s.f")) is gen("alpha")
    assert s1.beta.apply(gen("s.f")) is gen("beta")


def test_closure_on_random_composites(mtower):
    rng = random.Random(5)
    for k in (1, 2):
        m = mtower.stage(k).marking
        tested, failures = closure_check(m, rng, count=60)
        assert tested == 60
        assert failures == 0


def test_eta_mu_validate_and_compose(mtower):
    problems = comparison_report(mtower, 2)
    assert problems == []


def test_mu1_sends_triangles_to_fresh_2_cells(mtower):
    mu1 = mtower.mu(1)
    assert mu1.apply(gen("alpha")) is gen("a.f")
    assert mu1.apply(gen("beta")) is gen("b.f")


def test_eta_marked_preserves_seeds(mtower):
    for k in (1, 2):
        rep = mtower.eta_marked(k).validate()
        assert rep.ok


def test_colimit_marked_membership(mtower):
    assert mtower.colimit_marked(gen("f"))
    assert mtower.colimit_marked(gen("alpha"))
    assert not mtower.colimit_marked(gen("g"))
    assert mtower.colimit_marked(ident(gen("g")))
