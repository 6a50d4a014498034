"""Axiom-level rewriting on raw cell terms, plus random term generation.

The rewrite rules are the defining equations of a free omega-category:
associativity at each level, unit introduction and elimination,
distribution of identities over composites, and the interchange law.
Every rule preserves dimension, boundaries, and the multiset of
top-dimensional generators, so a random walk through the rewrite graph
must stay inside one normal-form class.  The property tests drive the
walk and compare against the normalizer.
"""
from __future__ import annotations

import random

from .cells import (Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError,
                    sexpr)
from .kernel import (dim, boundary, normalize, maxgendim, lift_to,
                     check_cell, compose, canonical, _layers, _swap_memo)

__all__ = ["RULES", "local_rewrites", "rewrite_candidates", "random_walk",
           "CellPool"]

RULES = ("assoc_left", "assoc_right", "unit_elim", "unit_intro_src",
         "unit_intro_tgt", "ident_split", "ident_merge", "interchange")


def local_rewrites(poly, t: Cell):
    """All single-rule rewrites of the term t at its root.
    Returns (rule name, new term) pairs; each result has the same
    dimension and boundaries as t."""
    out = []
    n = dim(poly, t)
    if isinstance(t, Comp):
        k, g, f = t.level, t.after, t.before
        if isinstance(g, Comp) and g.level == k:
            out.append(("assoc_right",
                        comp_raw(k, g.after, comp_raw(k, g.before, f))))
        if isinstance(f, Comp) and f.level == k:
            out.append(("assoc_left",
                        comp_raw(k, comp_raw(k, g, f.after), f.before)))
        if maxgendim(poly, g) <= k:
            out.append(("unit_elim", f))
        if maxgendim(poly, f) <= k:
            out.append(("unit_elim", g))
    if n >= 1:
        # interchange as a layer swap: exchange two adjacent independent
        # layers of the chain decomposition.  Unrestricted middle-four
        # rearrangement is unsound when degenerate boundaries make the
        # split alignment ambiguous, so only aligned swaps are emitted.
        nf = normalize(poly, t)
        layers = _layers(poly, nf, n)
        for i in range(len(layers) - 1):
            sw = _swap_memo(poly, layers[i], layers[i + 1], n)
            if sw is None:
                continue
            swapped = layers[:i] + [sw[0], sw[1]] + layers[i + 2:]
            cand = swapped[0]
            for lam in swapped[1:]:
                cand = comp_raw(n - 1, lam, cand)
            if cand is t:
                continue
            try:
                # junction boundaries of a swap are equal cells, but the
                # verifier may only see that up to Unknown; emit the
                # candidate only when it is checkably well formed
                check_cell(poly, cand)
            except CellError:
                continue
            out.append(("interchange", cand))
    if isinstance(t, Ident) and isinstance(t.base, Comp):
        b = t.base
        out.append(("ident_split",
                    comp_raw(b.level, ident(b.after), ident(b.before))))
    if isinstance(t, Comp) and isinstance(t.after, Ident) \
            and isinstance(t.before, Ident) and t.level < n - 1:
        out.append(("ident_merge",
                    ident(comp_raw(t.level, t.after.base, t.before.base))))
    if n > 0:
        for k in range(n):
            out.append(("unit_intro_tgt",
                        comp_raw(k, lift_to(poly, boundary(poly, k, "+", t),
                                            n), t)))
            out.append(("unit_intro_src",
                        comp_raw(k, t, lift_to(poly, boundary(poly, k, "-", t),
                                               n))))
    return out


def rewrite_candidates(poly, c: Cell):
    """One-step rewrites of c, at any subterm position, that the kernel
    certifies: a candidate is kept only when its canonical form agrees
    with that of c, so every emitted step re-verifies as Equal.  Above
    dimension 2 the equality tier is incomplete and an unverifiable swap
    is useless as a rewrite step."""
    raw = []

    def visit(t, rebuild):
        for rule, new in local_rewrites(poly, t):
            raw.append((rule, rebuild(new)))
        if isinstance(t, Ident):
            visit(t.base, lambda s, rb=rebuild: rb(ident(s)))
        elif isinstance(t, Comp):
            visit(t.after,
                  lambda s, rb=rebuild, t=t: rb(comp_raw(t.level, s,
                                                         t.before)))
            visit(t.before,
                  lambda s, rb=rebuild, t=t: rb(comp_raw(t.level, t.after,
                                                         s)))

    visit(c, lambda s: s)
    cc = canonical(poly, c)
    return [(rule, cand) for rule, cand in raw
            if cand is not c and canonical(poly, cand) is cc]


def random_walk(poly, c: Cell, rng: random.Random, steps: int,
                recheck: bool = True):
    """Walk the rewrite graph from c; yields each visited term."""
    cur = c
    trace = [cur]
    for _ in range(steps):
        cands = rewrite_candidates(poly, cur)
        if not cands:
            break
        _, cur = rng.choice(cands)
        if recheck:
            check_cell(poly, cur)
        trace.append(cur)
    return trace


_SIZE = {}


def term_size(c: Cell) -> int:
    """Number of generator leaves in the raw term."""
    s = _SIZE.get(c)
    if s is None:
        if isinstance(c, Gen):
            s = 1
        elif isinstance(c, Ident):
            s = term_size(c.base)
        else:
            s = term_size(c.after) + term_size(c.before)
        _SIZE[c] = s
    return s


class CellPool:
    """Grows a pool of random well-formed cells over a polygraph by
    composing boundary-compatible members and taking identities."""

    def __init__(self, poly, rng: random.Random, max_dim: int,
                 max_size: int = 16):
        self.poly = poly
        self.rng = rng
        self.max_dim = max_dim
        self.max_size = max_size
        self.by_dim: dict[int, list[Cell]] = {}
        # (dim, level, side, boundary sexpr) -> cells
        self.buckets: dict[tuple, list[Cell]] = {}
        for g in poly.generators():
            if g.dim <= max_dim:
                self.add(gen(g.name))

    def add(self, c: Cell):
        n = dim(self.poly, c)
        self.by_dim.setdefault(n, []).append(c)
        for k in range(n):
            for side in ("-", "+"):
                key = (n, k, side,
                       sexpr(normalize(self.poly,
                                       boundary(self.poly, k, side, c))))
                self.buckets.setdefault(key, []).append(c)

    def grow(self, steps: int):
        for _ in range(steps):
            self._step()

    def _step(self):
        rng = self.rng
        dims = [n for n, cs in self.by_dim.items() if cs and n > 0]
        if not dims:
            return
        if rng.random() < 0.25:
            n = rng.choice(sorted(self.by_dim))
            if n + 1 <= self.max_dim:
                self.add(ident(rng.choice(self.by_dim[n])))
            return
        n = rng.choice(dims)
        x = rng.choice(self.by_dim[n])
        k = rng.randrange(n)
        key = (n, k, "+", sexpr(normalize(
            self.poly, boundary(self.poly, k, "-", x))))
        ys = self.buckets.get(key, [])
        if not ys:
            return
        y = rng.choice(ys)
        if term_size(x) + term_size(y) > self.max_size:
            return
        self.add(compose(self.poly, k, x, y))

    def sample(self, count: int, min_dim: int = 0):
        cells = [c for n, cs in self.by_dim.items() if n >= min_dim
                 for c in cs]
        return [self.rng.choice(cells) for _ in range(count)]

    def composable_pairs(self, count: int, min_dim: int = 1):
        """Random (level, after, before) triples of composable cells."""
        rng = self.rng
        out = []
        guard = 0
        while len(out) < count and guard < count * 200:
            guard += 1
            dims = [n for n in self.by_dim if n >= min_dim and self.by_dim[n]]
            if not dims:
                break
            n = rng.choice(dims)
            x = rng.choice(self.by_dim[n])
            k = rng.randrange(n)
            key = (n, k, "+", sexpr(normalize(
                self.poly, boundary(self.poly, k, "-", x))))
            ys = self.buckets.get(key, [])
            if not ys:
                continue
            out.append((k, x, rng.choice(ys)))
        return out
