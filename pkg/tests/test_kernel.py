import random

import pytest

from omegak.cells import (gen, ident, comp_raw, sexpr, parse_cell, Gen,
                          Ident, Comp, CellError)
from omegak.kernel import (dim, boundary, normalize, compose, identity,
                           check_cell, cells_equal, canonical,
                           top_generator_multiset, src, tgt)
from omegak.polygraph import disk
from omegak.rewrites import CellPool, rewrite_candidates


def test_hash_consing():
    assert gen("x") is gen("x")
    assert ident(gen("x")) is ident(gen("x"))
    a = comp_raw(0, gen("y"), gen("x"))
    assert a is comp_raw(0, gen("y"), gen("x"))
    assert a is not comp_raw(1, gen("y"), gen("x"))


def test_sexpr_roundtrip():
    c = comp_raw(1, ident(gen("u")), comp_raw(0, gen("v"), ident(gen("w"))))
    assert parse_cell(sexpr(c)) is c
    with pytest.raises(CellError):
        parse_cell("(comp x gen:a gen:b)")


def test_dim_and_boundary_on_disks():
    d2 = disk(2)
    e = gen("e2")
    assert dim(d2, e) == 2
    assert boundary(d2, 1, "-", e) is gen("d1s")
    assert boundary(d2, 0, "-", e) is gen("d0s")
    assert boundary(d2, 0, "+", e) is gen("d0t")
    assert src(d2, e) is gen("d1s")
    assert tgt(d2, e) is gen("d1t")


def test_check_cell_rejects_bad_composites():
    d1 = disk(1)
    with pytest.raises(CellError):
        check_cell(d1, comp_raw(0, gen("e1"), gen("e1")))
    with pytest.raises(CellError):
        check_cell(d1, gen("nope"))


def test_units_and_associativity(tower):
    poly = tower.colimit
    f, g = gen("f"), gen("g")
    gf = comp_raw(0, g, f)
    assert cells_equal(poly, comp_raw(0, f, ident(gen("p"))), f).kind == "equal"
    assert cells_equal(poly, comp_raw(0, ident(gen("q")), f), f).kind == "equal"
    left = comp_raw(0, gen("f"), gf)
    right = comp_raw(0, comp_raw(0, gen("f"), g), f)
    assert cells_equal(poly, left, right).kind == "equal"
    assert cells_equal(poly, f, g).kind == "unequal"


def test_identity_functoriality(tower):
    # id(b) *_k id(a) = id(b *_k a)
    poly = tower.colimit
    gf = compose(poly, 0, gen("g"), gen("f"))
    lhs = comp_raw(0, ident(gen("g")), ident(gen("f")))
    assert cells_equal(poly, lhs, identity(gf)).kind == "equal"


def test_interchange_dim2(tower):
    # two whiskered orders of 0-composing a.f with itself agree
    poly = tower.colimit
    phi = gen("a.f")                      # g *_0 f => id p, in hom(p, p)
    u = comp_raw(0, gen("g"), gen("f"))   # source 1-cell
    up = ident(gen("p"))                  # target 1-cell
    one = comp_raw(1, comp_raw(0, phi, ident(up)),
                   comp_raw(0, ident(u), phi))
    other = comp_raw(1, comp_raw(0, ident(up), phi),
                     comp_raw(0, phi, ident(u)))
    check_cell(poly, one)
    check_cell(poly, other)
    assert cells_equal(poly, one, other).kind == "equal"


def test_normalize_idempotent_and_boundary_preserving(tower):
    poly = tower.stage(3).polygraph
    pool = CellPool(poly, random.Random(7), max_dim=3)
    pool.grow(300)
    for c in pool.sample(120, min_dim=1):
        nf = normalize(poly, c)
        assert normalize(poly, nf) is nf
        n = dim(poly, c)
        for s in ("-", "+"):
            v = cells_equal(poly, boundary(poly, n - 1, s, nf),
                            boundary(poly, n - 1, s, c))
            assert v.kind == "equal"


def test_canonical_is_idempotent_and_equal(tower):
    poly = tower.stage(3).polygraph
    pool = CellPool(poly, random.Random(11), max_dim=3)
    pool.grow(200)
    for c in pool.sample(60, min_dim=1):
        cc = canonical(poly, c)
        assert canonical(poly, cc) is cc
        assert cells_equal(poly, c, cc).kind == "equal"


# ---------------------------------------------------------------------------
# independent dimension-2 oracle: a 2-cell over a polygraph is, up to the
# axioms, a word rewrite sequence; equality is orbit equality under swaps
# of adjacent rewrites with disjoint supports.


def _word(poly, c):
    """A 1-cell as the tuple of its generator letters in diagram order."""
    if isinstance(c, Gen):
        return (c.name,)
    if isinstance(c, Ident):
        return ()
    assert c.level == 0
    return _word(poly, c.before) + _word(poly, c.after)


def _moves(poly, c):
    """A 2-cell as (source word, [(position, generator)]) rewrite trace."""
    if isinstance(c, Gen):
        return (_word(poly, poly.gen_src(c.name)), [(0, c.name)])
    if isinstance(c, Ident):
        w = _word(poly, c.base)
        return (w, [])
    if c.level == 1:
        s1, m1 = _moves(poly, c.before)
        s2, m2 = _moves(poly, c.after)
        return (s1, m1 + m2)
    s1, m1 = _moves(poly, c.before)
    s2, m2 = _moves(poly, c.after)
    t1 = _apply_moves(poly, s1, m1)
    return (s1 + s2, m1 + [(p + len(t1), g) for p, g in m2])


def _apply_moves(poly, w, moves):
    for p, g in moves:
        s = _word(poly, poly.gen_src(g))
        t = _word(poly, poly.gen_tgt(g))
        assert w[p:p + len(s)] == s
        w = w[:p] + t + w[p + len(s):]
    return w


def _orbit(poly, start, cap=100000):
    """All rewrite traces reachable from `start` by disjoint-support
    swaps of adjacent moves."""
    def lens(g):
        return (len(_word(poly, poly.gen_src(g))),
                len(_word(poly, poly.gen_tgt(g))))

    seen = {tuple(start)}
    frontier = [tuple(start)]
    while frontier:
        m = frontier.pop()
        for i in range(len(m) - 1):
            (p1, g1), (p2, g2) = m[i], m[i + 1]
            s1, t1 = lens(g1)
            s2, t2 = lens(g2)
            if p2 + s2 <= p1:
                swapped = ((p2, g2), (p1 + t2 - s2, g1))
            elif p2 >= p1 + t1:
                swapped = ((p2 - t1 + s1, g2), (p1, g1))
            else:
                continue
            out = m[:i] + swapped + m[i + 2:]
            if out not in seen:
                assert len(seen) <= cap
                seen.add(out)
                frontier.append(out)
    return seen


def _oracle_equal(poly, a, b):
    sa, ma = _moves(poly, a)
    sb, mb = _moves(poly, b)
    if sa != sb or len(ma) != len(mb):
        return False
    # empty words do not remember their 0-cell
    if normalize(poly, boundary(poly, 0, "-", a)) is not \
            normalize(poly, boundary(poly, 0, "-", b)):
        return False
    if sorted(g for _, g in ma) != sorted(g for _, g in mb):
        return False
    if _apply_moves(poly, sa, ma) != _apply_moves(poly, sb, mb):
        return False
    return tuple(mb) in _orbit(poly, ma)


def test_dim2_equality_matches_word_oracle(tower):
    poly = tower.stage(2).polygraph
    rng = random.Random(23)
    pool = CellPool(poly, rng, max_dim=2)
    pool.grow(400)
    cells = [c for c in pool.sample(240, min_dim=2)
             if dim(poly, c) == 2 and len(_moves(poly, c)[1]) <= 7]
    # equal pairs from rewrite steps, arbitrary pairs for the negatives
    pairs = []
    for c in cells[:60]:
        for _, cand in rewrite_candidates(poly, c)[:2]:
            pairs.append((c, cand))
    for i in range(0, len(cells) - 1, 2):
        pairs.append((cells[i], cells[i + 1]))
    checked = 0
    for a, b in pairs:
        want = _oracle_equal(poly, a, b)
        got = cells_equal(poly, a, b)
        assert got.kind != "unknown", (sexpr(a), sexpr(b))
        assert (got.kind == "equal") == want, (sexpr(a), sexpr(b))
        checked += 1
    assert checked >= 100


def test_top_generator_multiset(tower):
    poly = tower.colimit
    c = comp_raw(1, gen("a.f"), comp_raw(0, gen("b.f"),
                                         ident(comp_raw(0, gen("g"),
                                                        gen("f")))))
    ms = top_generator_multiset(poly, normalize(poly, c))
    assert sorted(ms) == ["a.f", "b.f"]
