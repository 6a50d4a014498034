"""Constructions on polygraphs: suspension, duality, colimits, truncation."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .cells import Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError, \
    parse_cell, sexpr
from .kernel import dim, boundary, cells_equal, normalize
from .polygraph import Generator, Polygraph, OmegaFunctor

__all__ = [
    "suspend", "suspend_cell", "suspend_functor", "desuspend_cell",
    "total_dual", "dual_cell", "coproduct", "pushout",
    "SequentialColimit", "hom_of_suspension",
    "TruncatedPresentation", "truncate_intelligent",
    "POLE_BOT", "POLE_TOP", "SUSP_PREFIX",
]

POLE_BOT = "bot"
POLE_TOP = "top"
SUSP_PREFIX = "s."


def suspend_cell(c: Cell) -> Cell:
    """Image of a cell under suspension: dimensions and levels shift by one."""
    if isinstance(c, Gen):
        return gen(SUSP_PREFIX + c.name)
    if isinstance(c, Ident):
        return ident(suspend_cell(c.base))
    if isinstance(c, Comp):
        return comp_raw(c.level + 1, suspend_cell(c.after),
                        suspend_cell(c.before))
    raise CellError(f"not a cell: {c!r}")


def desuspend_cell(c: Cell) -> Cell:
    if isinstance(c, Gen):
        if not c.name.startswith(SUSP_PREFIX):
            raise CellError(f"cannot desuspend pole or foreign cell {c.name}")
        return gen(c.name[len(SUSP_PREFIX):])
    if isinstance(c, Ident):
        return ident(desuspend_cell(c.base))
    if isinstance(c, Comp):
        if c.level == 0:
            raise CellError("cannot desuspend a level-0 composite")
        return comp_raw(c.level - 1, desuspend_cell(c.after),
                        desuspend_cell(c.before))
    raise CellError(f"not a cell: {c!r}")


def suspend(p: Polygraph) -> Polygraph:
    """Two fresh poles; every n-generator becomes an (n+1)-generator
    suspended between them."""
    gens = [Generator(POLE_BOT, 0), Generator(POLE_TOP, 0)]
    for g in p.generators():
        if g.dim == 0:
            gens.append(Generator(SUSP_PREFIX + g.name, 1,
                                  gen(POLE_BOT), gen(POLE_TOP)))
        else:
            gens.append(Generator(SUSP_PREFIX + g.name, g.dim + 1,
                                  suspend_cell(g.src), suspend_cell(g.tgt)))
    return Polygraph(f"susp({p.name})", gens)


def suspend_functor(f: OmegaFunctor, sp=None, tq=None) -> OmegaFunctor:
    sp = sp or suspend(f.source)
    tq = tq or suspend(f.target)
    assign = {POLE_BOT: gen(POLE_BOT), POLE_TOP: gen(POLE_TOP)}
    for name, c in f.assign.items():
        assign[SUSP_PREFIX + name] = suspend_cell(c)
    return OmegaFunctor(sp, tq, assign, name=f"susp({f.name})")


def dual_cell(c: Cell) -> Cell:
    if isinstance(c, Gen):
        return gen(c.name)
    if isinstance(c, Ident):
        return ident(dual_cell(c.base))
    if isinstance(c, Comp):
        return comp_raw(c.level, dual_cell(c.before), dual_cell(c.after))
    raise CellError(f"not a cell: {c!r}")


def total_dual(p: Polygraph) -> Polygraph:
    """Reverse every cell in every dimension (src and tgt swap)."""
    gens = []
    for g in p.generators():
        if g.dim == 0:
            gens.append(g)
        else:
            gens.append(Generator(g.name, g.dim,
                                  dual_cell(g.tgt), dual_cell(g.src)))
    return Polygraph(f"dual({p.name})", gens)


def _prefix_cell(prefix: str, c: Cell) -> Cell:
    if isinstance(c, Gen):
        return gen(prefix + c.name)
    if isinstance(c, Ident):
        return ident(_prefix_cell(prefix, c.base))
    return comp_raw(c.level, _prefix_cell(prefix, c.after),
                    _prefix_cell(prefix, c.before))


def coproduct(a: Polygraph, b: Polygraph,
              prefixes=("l.", "r.")) -> tuple[Polygraph, OmegaFunctor, OmegaFunctor]:
    """Disjoint union with id prefixing; returns (sum, inj_left, inj_right)."""
    gens = []
    for prefix, p in zip(prefixes, (a, b)):
        for g in p.generators():
            gens.append(Generator(
                prefix + g.name, g.dim,
                None if g.src is None else _prefix_cell(prefix, g.src),
                None if g.tgt is None else _prefix_cell(prefix, g.tgt)))
    out = Polygraph(f"({a.name}+{b.name})", gens)
    inl = OmegaFunctor(a, out, {g.name: gen(prefixes[0] + g.name)
                                for g in a.generators()}, name="inl")
    inr = OmegaFunctor(b, out, {g.name: gen(prefixes[1] + g.name)
                                for g in b.generators()}, name="inr")
    return out, inl, inr


def pushout(i: OmegaFunctor, f: OmegaFunctor, namer=None,
            name: str = "") -> tuple[Polygraph, OmegaFunctor, OmegaFunctor]:
    """Pushout of a span  R <-f- P -i-> P' where i is a generator inclusion.

    `i` must send every generator of P to a generator of P' (injectively).
    Returns (result, inc, glued) with inc: R -> result the identity-on-ids
    inclusion and glued: P' -> result the cone leg extending f.
    `namer(gen_name)` chooses fresh ids for generators outside the image
    of i (default: "po." prefix).
    """
    p, pprime, r = i.source, i.target, f.target
    namer = namer or (lambda x: "po." + x)
    image = {}          # generator of P' reached by i  ->  generator of P
    for g in p.generators():
        c = i.assign[g.name]
        if not isinstance(c, Gen):
            raise CellError(f"pushout: {i.name or 'i'} is not a generator "
                            f"inclusion at {g.name}")
        if c.name in image:
            raise CellError(f"pushout: inclusion not injective at {c.name}")
        image[c.name] = g.name
    glue_assign: dict[str, Cell] = {}
    gens = list(r.generators())
    taken = {g.name for g in gens}
    out = Polygraph(name or f"po({pprime.name})", gens)

    def translate(c: Cell) -> Cell:
        if isinstance(c, Gen):
            return glue_assign[c.name]
        if isinstance(c, Ident):
            return ident(translate(c.base))
        return comp_raw(c.level, translate(c.after), translate(c.before))

    for g in sorted(pprime.generators(), key=lambda g: (g.dim, g.name)):
        if g.name in image:
            glue_assign[g.name] = f.assign[image[g.name]]
            continue
        fresh = namer(g.name)
        if fresh in taken:
            raise CellError(f"pushout: fresh id {fresh!r} collides")
        taken.add(fresh)
        if g.dim == 0:
            ng = Generator(fresh, 0)
        else:
            ng = Generator(fresh, g.dim, translate(g.src), translate(g.tgt))
        out._gens[ng.name] = ng
        glue_assign[g.name] = gen(fresh)

    inc = OmegaFunctor(r, out, {g.name: gen(g.name) for g in r.generators()},
                       name="inc")
    glued = OmegaFunctor(pprime, out, glue_assign, name="glued")
    return out, inc, glued


class SequentialColimit:
    """Lazy colimit of a chain of generator inclusions.

    `stage_fn(k)` returns the k-th polygraph; stages must agree on ids:
    each stage contains all generators of the previous one unchanged.
    A generator of dimension d is read off from stage `stage_for(d)`
    (default: stage d), so the chain must be dimensionwise stable from
    that point on.  Materialization is capped at `max_dim`.
    """

    def __init__(self, stage_fn, stage_for=None, max_dim: int = 24,
                 name: str = "colim"):
        self.stage_fn = stage_fn
        self.stage_for = stage_for or (lambda d: d)
        self.max_dim = max_dim
        self.name = name
        self._gens: dict[str, Generator] = {}
        self._done_dim = -1

    def ensure_dim(self, d: int):
        if d > self.max_dim:
            raise CellError(
                f"{self.name}: dimension {d} exceeds materialization cap "
                f"{self.max_dim}")
        while self._done_dim < d:
            j = self._done_dim + 1
            stage = self.stage_fn(self.stage_for(j))
            for g in stage.gens_of_dim(j):
                self._gens[g.name] = g
            self._done_dim = j

    def _lookup(self, name: str) -> Generator:
        g = self._gens.get(name)
        d = self._done_dim
        while g is None and d < self.max_dim:
            d += 1
            self.ensure_dim(d)
            g = self._gens.get(name)
        if g is None:
            raise CellError(f"unknown generator {name!r} in {self.name}")
        return g

    def gen_dim(self, name):
        return self._lookup(name).dim

    def gen_src(self, name):
        return self._lookup(name).src

    def gen_tgt(self, name):
        return self._lookup(name).tgt

    def __contains__(self, name):
        try:
            self._lookup(name)
            return True
        except CellError:
            return False

    def truncation(self, d: int) -> Polygraph:
        """The finite polygraph of all generators of dimension <= d."""
        self.ensure_dim(d)
        gens = [g for g in self._gens.values() if g.dim <= d]
        return Polygraph(f"{self.name}<= {d}", gens)


def hom_of_suspension(p: Polygraph) -> Polygraph:
    """The hom of suspend(p) from its bottom pole to its top pole,
    presented as a polygraph; the round trip is the identity on p."""
    sp = suspend(p)
    gens = []
    for g in sp.generators():
        if g.dim == 0:
            continue  # poles
        name = g.name[len(SUSP_PREFIX):]
        if g.dim == 1:
            gens.append(Generator(name, 0))
        else:
            gens.append(Generator(name, g.dim - 1,
                                  desuspend_cell(g.src), desuspend_cell(g.tgt)))
    return Polygraph(f"hom(susp({p.name}))", gens)


@dataclass(frozen=True)
class TruncatedPresentation:
    name: str
    polygraph: Polygraph
    relations: tuple          # pairs (lhs, rhs) of parallel n-cells

    def to_json(self) -> str:
        gens = sorted(self.polygraph.generators(),
                      key=lambda g: (g.dim, g.name))
        return json.dumps({
            "name": self.name,
            "generators": [
                {"id": g.name, "dim": g.dim,
                 "src": None if g.src is None else sexpr(g.src),
                 "tgt": None if g.tgt is None else sexpr(g.tgt)}
                for g in gens],
            "relations": [{"lhs": sexpr(l), "rhs": sexpr(r)}
                          for l, r in self.relations],
        }, sort_keys=True, indent=2)


def truncate_intelligent(p, n: int, gens=None) -> TruncatedPresentation:
    """Keep generators of dimension <= n; every (n+1)-generator becomes a
    relation between its source and target."""
    if gens is None:
        gens = p.generators()
    keep = [g for g in gens if g.dim <= n]
    rels = tuple((g.src, g.tgt) for g in sorted(gens, key=lambda g: g.name)
                 if g.dim == n + 1)
    return TruncatedPresentation(
        f"tr{n}({getattr(p, 'name', '?')})",
        Polygraph(f"tr{n}({getattr(p, 'name', '?')})", keep), rels)
