"""Marked polygraphs and the comparison with the unmarked tower.

A marking is the composition-closed class of cells generated by a set
of generator seeds together with all identities.  On layered normal
forms membership is simple: a cell is marked iff it is degenerate or
every layer's top-dimensional generator is a seed.

The marked tower starts from the walking 1-cell with f marked, glues
the two marked triangles A (retraction alpha: g *_0 f => id_p) and
B (section beta: f *_0 g' => id_q) into Qbar, and continues with the
same suspension pushout as the unmarked tower.  The comparison maps
eta (unmarked stage into marked stage) and mu (marked stage into the
next unmarked stage) compose to stage inclusions in both orders, so
they become mutually inverse isomorphisms on the colimits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cells import Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError
from .kernel import (dim, boundary, normalize, maxgendim, cells_equal,
                     top_generator_multiset)
from .polygraph import Generator, Polygraph, OmegaFunctor, FunctorReport
from .constructions import (suspend, suspend_cell, coproduct, pushout,
                            SequentialColimit, POLE_BOT, POLE_TOP,
                            SUSP_PREFIX)
from .walking import Tower

__all__ = [
    "Marking", "MarkedFunctor", "marked", "flat", "sharp", "natural",
    "marked_suspend", "build_C1_sharp", "build_marked_AB_Q", "MarkedStage",
    "MarkedTower", "comparison_report", "closure_check",
]


@dataclass(frozen=True)
class Marking:
    base: Polygraph
    seeds: frozenset

    def __post_init__(self):
        for s in self.seeds:
            if s not in self.base:
                raise CellError(f"marking seed {s!r} is not a generator")

    def to_json_dict(self):
        return {"seeds": sorted(self.seeds)}


def marked(m: Marking, c: Cell) -> bool:
    """Membership in the marking generated by the seeds and identities."""
    poly = m.base
    if dim(poly, c) == 0:
        return True
    nf = normalize(poly, c)
    return all(name in m.seeds
               for name in top_generator_multiset(poly, nf))


def flat(p: Polygraph) -> Marking:
    return Marking(p, frozenset())


def sharp(p: Polygraph) -> Marking:
    return Marking(p, frozenset(g.name for g in p.generators()
                                if g.dim > 0))


def natural(p: Polygraph, certificates=None, family: str | None = None):
    """Marking by certified equivalences.  certificates maps generator
    names to checked bi-invertibility witnesses; for the walking-tower
    family every positive generator is an equivalence, so the natural
    marking is the sharp one."""
    if family == "omegaE":
        return sharp(p)
    from .invertibility import check_set
    certificates = certificates or {}
    seeds = set()
    for name, w in certificates.items():
        if name not in p:
            raise CellError(f"certificate for unknown generator {name!r}")
        if w.a is not gen(name):
            raise CellError(f"certificate for {name!r} witnesses another cell")
        if not check_set([w], depth=1).ok:
            raise CellError(f"certificate for {name!r} fails its equations")
        seeds.add(name)
    return Marking(p, frozenset(seeds))


def marked_suspend(m: Marking) -> Marking:
    return Marking(suspend(m.base),
                   frozenset(SUSP_PREFIX + s for s in m.seeds))


@dataclass
class MarkedFunctor:
    underlying: OmegaFunctor
    source_marking: Marking
    target_marking: Marking

    @property
    def name(self):
        return self.underlying.name

    def apply(self, c: Cell) -> Cell:
        return self.underlying.apply(c)

    def validate(self) -> FunctorReport:
        rep = self.underlying.validate()
        hard = list(rep.hard)
        for s in sorted(self.source_marking.seeds):
            img = self.underlying.apply(gen(s))
            if not marked(self.target_marking, img):
                hard.append((s, "seed image unmarked"))
        return FunctorReport(tuple(hard), rep.soft)


# ---------------------------------------------------------------------------
# the marked tower


def build_C1_sharp():
    """The walking 1-cell with its cell marked."""
    p = Polygraph("C1", [
        Generator("p", 0),
        Generator("q", 0),
        Generator("f", 1, gen("p"), gen("q")),
    ])
    return Marking(p, frozenset({"f"}))


def build_marked_AB_Q():
    """The marked retraction triangle A, section triangle B, and their
    pushout Qbar over the marked walking 1-cell."""
    c1 = build_C1_sharp()
    a_poly = Polygraph("A", [
        Generator("p", 0),
        Generator("q", 0),
        Generator("f", 1, gen("p"), gen("q")),
        Generator("g", 1, gen("q"), gen("p")),
        Generator("alpha", 2, comp_raw(0, gen("g"), gen("f")),
                  ident(gen("p"))),
    ])
    b_poly = Polygraph("B", [
        Generator("p", 0),
        Generator("q", 0),
        Generator("f", 1, gen("p"), gen("q")),
        Generator("g'", 1, gen("q"), gen("p")),
        Generator("beta", 2, comp_raw(0, gen("f"), gen("g'")),
                  ident(gen("q"))),
    ])
    mA = Marking(a_poly, frozenset({"f", "alpha"}))
    mB = Marking(b_poly, frozenset({"f", "beta"}))
    i = OmegaFunctor(c1.base, a_poly,
                     {g.name: gen(g.name) for g in c1.base.generators()},
                     name="C1_into_A")
    j = OmegaFunctor(c1.base, b_poly,
                     {g.name: gen(g.name) for g in c1.base.generators()},
                     name="C1_into_B")
    qbar, _, glued = pushout(i, j, namer=lambda n: n, name="Qbar")
    mQbar = Marking(qbar, frozenset({"f", "alpha", "beta"}))
    return mA, mB, mQbar


@dataclass
class MarkedStage:
    k: int
    polygraph: Polygraph
    marking: Marking
    iota: MarkedFunctor | None
    alpha: MarkedFunctor | None
    beta: MarkedFunctor | None
    fresh: tuple


class MarkedTower:
    """The marked counterpart of the walking-equivalence tower, built
    from the sharp walking 1-cell by the same suspension pushout."""

    def __init__(self, tower: Tower | None = None, max_dim: int | None = None):
        self.tower = tower or Tower(max_dim=max_dim)
        self.max_dim = self.tower.max_dim
        self._stages: list[MarkedStage] = []
        self._eta: dict[int, OmegaFunctor] = {}
        self._mu: dict[int, OmegaFunctor] = {}
        self._colimit = None

    def stage(self, k: int) -> MarkedStage:
        if k < 0:
            raise CellError("marked tower stages start at 0")
        while len(self._stages) <= k:
            self._stages.append(self._build(len(self._stages)))
        return self._stages[k]

    def _build(self, k: int) -> MarkedStage:
        if k == 0:
            m = build_C1_sharp()
            return MarkedStage(0, m.base, m, None, None, None,
                               ("p", "q", "f"))
        if k == 1:
            _, _, mq = build_marked_AB_Q()
            prev = self.stage(0)
            iota = OmegaFunctor(prev.polygraph, mq.base, {
                g.name: gen(g.name) for g in prev.polygraph.generators()},
                name="miota1")
            sm = marked_suspend(prev.marking)
            alpha = OmegaFunctor(sm.base, mq.base, {
                POLE_BOT: gen("p"), POLE_TOP: gen("p"),
                "s.p": comp_raw(0, gen("g"), gen("f")),
                "s.q": ident(gen("p")),
                "s.f": gen("alpha"),
            }, name="malpha1")
            beta = OmegaFunctor(sm.base, mq.base, {
                POLE_BOT: gen("q"), POLE_TOP: gen("q"),
                "s.p": comp_raw(0, gen("f"), gen("g'")),
                "s.q": ident(gen("q")),
                "s.f": gen("beta"),
            }, name="mbeta1")
            fresh = ("alpha", "beta", "g", "g'")
            return MarkedStage(
                1, mq.base, mq,
                MarkedFunctor(iota, prev.marking, mq),
                MarkedFunctor(alpha, sm, mq),
                MarkedFunctor(beta, sm, mq), fresh)
        older = self.stage(k - 2)
        prev = self.stage(k - 1)
        sm_old = marked_suspend(older.marking)
        sm_prev = marked_suspend(prev.marking)
        dom, _, _ = coproduct(sm_old.base, sm_old.base)
        cod, _, _ = coproduct(sm_prev.base, sm_prev.base)
        incl = OmegaFunctor(dom, cod, {
            g.name: gen(g.name) for g in dom.generators()}, name="inc")
        fold = {}
        for g in sm_old.base.generators():
            fold["l." + g.name] = prev.alpha.underlying.assign[g.name]
            fold["r." + g.name] = prev.beta.underlying.assign[g.name]
        fold_f = OmegaFunctor(dom, prev.polygraph, fold,
                              name=f"[malpha{k-1},mbeta{k-1}]")

        def namer(name):
            side, rest = name.split(".", 1)
            if not rest.startswith(SUSP_PREFIX):
                raise CellError(f"unexpected fresh pushout generator {name}")
            parent = rest[len(SUSP_PREFIX):]
            return ("a." if side == "l" else "b.") + parent

        out, inc, glued = pushout(incl, fold_f, namer=namer,
                                  name=f"mstage{k}")
        seeds = set(prev.marking.seeds)
        for s in prev.marking.seeds:
            if s in prev.fresh:
                seeds.add("a." + s)
                seeds.add("b." + s)
        marking = Marking(out, frozenset(seeds))
        # suspended seeds over non-fresh generators land on already
        # marked cells of the previous stage
        for s in prev.marking.seeds:
            if s not in prev.fresh:
                for side in ("l.", "r."):
                    img = glued.assign[side + SUSP_PREFIX + s]
                    assert marked(marking, img), (k, s, side)
        alpha = OmegaFunctor(sm_prev.base, out, {
            g.name: glued.assign["l." + g.name]
            for g in sm_prev.base.generators()}, name=f"malpha{k}")
        beta = OmegaFunctor(sm_prev.base, out, {
            g.name: glued.assign["r." + g.name]
            for g in sm_prev.base.generators()}, name=f"mbeta{k}")
        inc.name = f"miota{k}"
        fresh = tuple(sorted(g.name for g in out.generators()
                             if g.name not in prev.polygraph))
        return MarkedStage(
            k, out, marking,
            MarkedFunctor(inc, prev.marking, marking),
            MarkedFunctor(alpha, sm_prev, marking),
            MarkedFunctor(beta, sm_prev, marking), fresh)

    # ----- colimit -------------------------------------------------------

    @property
    def colimit(self) -> SequentialColimit:
        if self._colimit is None:
            self._colimit = SequentialColimit(
                lambda k: self.stage(k).polygraph,
                stage_for=lambda d: max(d, 1),
                max_dim=self.max_dim, name="omegaEbar")
        return self._colimit

    def colimit_marking_seed(self, name: str) -> bool:
        """Whether a colimit generator is a marking seed at its stage."""
        k = 1
        while name not in self.stage(k).polygraph:
            k += 1
            if k > self.max_dim + 1:
                raise CellError(f"unknown colimit generator {name!r}")
        return name in self.stage(k).marking.seeds

    def colimit_marked(self, c: Cell) -> bool:
        poly = self.colimit
        if dim(poly, c) == 0:
            return True
        nf = normalize(poly, c)
        return all(self.colimit_marking_seed(name)
                   for name in top_generator_multiset(poly, nf))

    # ----- comparison with the unmarked tower ----------------------------

    def eta(self, k: int) -> OmegaFunctor:
        """Stage k of the unmarked tower into stage k of the marked one."""
        if k in self._eta:
            return self._eta[k]
        src = self.tower.stage(k)
        dst = self.stage(k)
        if k == 0:
            assign = {"p": gen("p"), "q": gen("q")}
        elif k == 1:
            assign = {g.name: gen(g.name)
                      for g in src.polygraph.generators()}
        else:
            prev = self.eta(k - 1)
            assign = dict(prev.assign)
            for name in src.fresh:
                side, parent = name.split(".", 1)
                leg = dst.alpha if side == "a" else dst.beta
                assign[name] = leg.apply(
                    suspend_cell(prev.assign[parent]
                                 if parent in prev.assign
                                 else prev.apply(gen(parent))))
        f = OmegaFunctor(src.polygraph, dst.polygraph, assign,
                         name=f"eta{k}")
        self._eta[k] = f
        return f

    def mu(self, k: int) -> OmegaFunctor:
        """Stage k of the marked tower into stage k+1 of the unmarked one."""
        if k in self._mu:
            return self._mu[k]
        src = self.stage(k)
        dst = self.tower.stage(k + 1)
        if k == 0:
            assign = {"p": gen("p"), "q": gen("q"), "f": gen("f")}
        elif k == 1:
            assign = {"p": gen("p"), "q": gen("q"), "f": gen("f"),
                      "g": gen("g"), "g'": gen("g'"),
                      "alpha": gen("a.f"), "beta": gen("b.f")}
        else:
            prev = self.mu(k - 1)
            assign = dict(prev.assign)
            for name in src.fresh:
                side, parent = name.split(".", 1)
                leg = dst.alpha if side == "a" else dst.beta
                assign[name] = leg.apply(suspend_cell(prev.apply(gen(parent))))
        f = OmegaFunctor(src.polygraph, dst.polygraph, assign,
                         name=f"mu{k}")
        self._mu[k] = f
        return f

    def eta_marked(self, k: int) -> MarkedFunctor:
        """eta with the sharp marking on both sides.  Every generator of
        either tower is an equivalence, so sharp is the natural marking;
        the constructed seed marking of a finite marked stage is smaller
        (g and g' only reach it through the colimit isomorphism)."""
        return MarkedFunctor(self.eta(k), sharp(self.tower.stage(k).polygraph),
                             sharp(self.stage(k).polygraph))

    def eta_infty(self, c: Cell) -> Cell:
        """Colimit-level comparison, unmarked to marked."""
        def image(g: Gen) -> Cell:
            k = max(dim(self.tower.colimit, g), 1)
            return self.eta(k).apply(g)
        return _map_cell(image, c)

    def mu_infty(self, c: Cell) -> Cell:
        """Colimit-level comparison, marked to unmarked."""
        def image(g: Gen) -> Cell:
            k = 0
            while g.name not in self.stage(k).polygraph:
                k += 1
            return self.mu(k).apply(g)
        return _map_cell(image, c)


# ---------------------------------------------------------------------------
# diagnostics used by the CLI and the test suite


def comparison_report(mt: MarkedTower, max_k: int):
    """Check the eta/mu comparison through stage max_k.

    Per stage: both functors validate with no hard failures and no
    Unknowns, mu(k).eta(k) is the stage inclusion of the unmarked tower
    and eta(k+1).mu(k) is the stage inclusion of the marked one.  At the
    colimit the two induced maps are mutually inverse on all generators
    of dimension <= max_k.  Returns a list of problem records; empty
    means the comparison holds.
    """
    tower = mt.tower
    problems = []
    for k in range(max_k + 1):
        eta, mu = mt.eta(k), mt.mu(k)
        for f in (eta, mu):
            rep = f.validate()
            if not rep.ok or rep.soft:
                problems.append((f.name, "validate",
                                 tuple(rep.hard) + tuple(rep.soft)))
        up = tower.stage(k + 1).polygraph
        for g in tower.stage(k).polygraph.generators():
            v = cells_equal(up, mu.apply(eta.apply(gen(g.name))),
                            gen(g.name))
            if v.kind != "equal":
                problems.append((f"mu{k}.eta{k}", g.name, v.kind))
        eta_up = mt.eta(k + 1)
        mup = mt.stage(k + 1).polygraph
        for g in mt.stage(k).polygraph.generators():
            v = cells_equal(mup, eta_up.apply(mu.apply(gen(g.name))),
                            gen(g.name))
            if v.kind != "equal":
                problems.append((f"eta{k + 1}.mu{k}", g.name, v.kind))
    col, mcol = tower.colimit, mt.colimit
    col.ensure_dim(max_k)
    mcol.ensure_dim(max_k)
    for g in col.truncation(max_k).generators():
        v = cells_equal(col, mt.mu_infty(mt.eta_infty(gen(g.name))),
                        gen(g.name))
        if v.kind != "equal":
            problems.append(("mu_infty.eta_infty", g.name, v.kind))
    for g in mcol.truncation(max_k).generators():
        v = cells_equal(mcol, mt.eta_infty(mt.mu_infty(gen(g.name))),
                        gen(g.name))
        if v.kind != "equal":
            problems.append(("eta_infty.mu_infty", g.name, v.kind))
    return problems


def closure_check(m: Marking, rng, count: int, max_dim: int | None = None):
    """Compose `count` random boundary-compatible pairs of marked cells
    and test that each composite is still marked.  Returns the pair
    (tested, failures)."""
    from .cells import sexpr
    from .kernel import compose
    poly = m.base
    if max_dim is None:
        max_dim = poly.max_dim
    cells = [gen(g.name) for g in poly.generators()
             if g.dim <= max_dim and (g.dim == 0 or g.name in m.seeds)]
    cells += [ident(gen(g.name)) for g in poly.generators()
              if g.dim < max_dim]
    buckets = {}

    def index(c):
        n = dim(poly, c)
        for k in range(n):
            key = (n, k, sexpr(normalize(poly, boundary(poly, k, "+", c))))
            buckets.setdefault(key, []).append(c)

    for c in cells:
        index(c)
    tested = failures = 0
    guard = 0
    while tested < count and guard < count * 50:
        guard += 1
        x = rng.choice(cells)
        n = dim(poly, x)
        if n == 0:
            continue
        k = rng.randrange(n)
        key = (n, k, sexpr(normalize(poly, boundary(poly, k, "-", x))))
        ys = buckets.get(key)
        if not ys:
            continue
        y = rng.choice(ys)
        z = compose(poly, k, x, y)
        tested += 1
        if not marked(m, z):
            failures += 1
            continue
        if len(cells) < 8 * count:
            cells.append(z)
            index(z)
    return tested, failures


def _map_cell(gen_image, c: Cell) -> Cell:
    if isinstance(c, Gen):
        return gen_image(c)
    if isinstance(c, Ident):
        return ident(_map_cell(gen_image, c.base))
    return comp_raw(c.level, _map_cell(gen_image, c.after),
                    _map_cell(gen_image, c.before))
