import json
import random

from omegak.cells import gen, ident, comp_raw, sexpr
from omegak.kernel import dim, boundary, cells_equal
from omegak.polygraph import validate_functor
from omegak.invertibility import (witness_identity, witness_horizontal,
                                  witness_vertical, witness_half_inverse,
                                  bi_to_inv, inv_to_bi, map_witness,
                                  check_set, classify, omegaE_cell_witness,
                                  witness_to_json)
from omegak.rewrites import CellPool


def test_identity_witness_is_clean(colim):
    w = witness_identity(colim, gen("f"))
    rep = check_set([w], depth=3)
    assert rep.clean


def test_generator_witness_f(tower, colim):
    w = omegaE_cell_witness(tower, gen("f"))
    assert w.aL is gen("g")
    assert w.aR is gen("g'")
    ccell, cwit = w.child_c
    assert ccell is gen("a.f")
    cpcell, _ = w.child_cprime
    assert cpcell is gen("b.f")
    assert check_set([w], depth=2).clean


def test_all_low_generators_check(tower, colim):
    names = [g.name for d in (1, 2, 3)
             for g in tower.stage(3).polygraph.gens_of_dim(d)]
    ws = [omegaE_cell_witness(tower, gen(n)) for n in names]
    rep = check_set(ws, depth=1)
    assert rep.clean, rep.hard + rep.unknown


def test_vertical_and_horizontal_closure(tower, colim):
    wf = omegaE_cell_witness(tower, gen("f"))
    wg = omegaE_cell_witness(tower, gen("g"))
    wh = witness_vertical(colim, wg, wf)   # g *_0 f, top level for 1-cells
    assert wh.a is comp_raw(0, gen("g"), gen("f"))
    waf = omegaE_cell_witness(tower, gen("a.f"))
    wid = witness_identity(colim, comp_raw(0, gen("g"), gen("f")))
    wv = witness_vertical(colim, waf, wid)
    wh2 = witness_horizontal(colim, 0, waf, waf)  # both live in hom(p, p)
    assert check_set([wh, wv, wh2], depth=1).clean


def test_half_inverse_closure(tower, colim):
    wf = omegaE_cell_witness(tower, gen("f"))
    wb = witness_identity(colim, gen("p"))
    w = witness_half_inverse(colim, wb, wf, "left")   # id_p *_0 g
    assert cells_equal(colim, w.a,
                       comp_raw(0, ident(gen("p")), gen("g"))).kind == "equal"
    assert check_set([w], depth=1).ok
    wr = witness_half_inverse(colim, witness_identity(colim, gen("q")),
                              wf, "right")
    assert check_set([wr], depth=1).ok


def test_bi_inv_conversions(tower, colim):
    w = omegaE_cell_witness(tower, gen("f"))
    iw = bi_to_inv(w)
    assert iw.flavor == "inv"
    assert iw.aL is iw.aR
    back = inv_to_bi(iw)
    assert back.aL is back.aR
    assert check_set([back], depth=1).ok


def test_map_witness_transports(tower, colim):
    # push the witness for f along the a-branch suspension
    from omegak.constructions import suspend_cell
    w = omegaE_cell_witness(tower, gen("f"))
    moved = map_witness(colim, lambda c: tower.alpha_infty(suspend_cell(c)),
                        w)
    assert moved.a is gen("a.f")
    assert check_set([moved], depth=1).ok


def test_witness_json_deterministic(tower, colim):
    w = omegaE_cell_witness(tower, gen("f"))
    one = witness_to_json(colim, w, depth=1)
    two = witness_to_json(colim, omegaE_cell_witness(tower, gen("f")),
                          depth=1)
    assert one == two
    data = json.loads(one)
    assert data["a"] == "gen:f"
    assert data["c"]["cell"] == "gen:a.f"


def test_classify_validates_and_hits_the_cell(tower, colim):
    for name in ("f", "a.f", "a.a.f"):
        c = gen(name)
        w = omegaE_cell_witness(tower, c)
        n = dim(colim, c)
        for k in range(0, 3):
            F = classify(tower, colim, c, w, k)
            assert validate_functor(F).ok, (name, k)
            pre = "s." * (n - 1)
            if k >= 1:
                assert F.assign[pre + "f"] is c
                assert F.assign[pre + "g"] is w.aL
                assert F.assign[pre + "g'"] is w.aR


def test_classify_restricts_along_stage_inclusion(tower, colim):
    c = gen("a.f")
    w = omegaE_cell_witness(tower, c)
    f2 = classify(tower, colim, c, w, 2)
    f1 = classify(tower, colim, c, w, 1)
    for name, img in f1.assign.items():
        assert f2.assign[name] is img
