"""The walking-equivalence tower and its colimit.

Stage 0 is the pair of objects {p, q}.  Stage 1 is the one-generator
span Q = {f: p -> q, g: q -> p, g': q -> p}.  Each later stage is the
pushout gluing two suspended copies of the previous stage along the
images of the stage before it; the two cone legs are the stage maps
alpha_k and beta_k, and the fresh generators are named a.<parent> and
b.<parent> after the generator they suspend.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

from .cells import Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError
from .kernel import dim, boundary
from .polygraph import Generator, Polygraph, OmegaFunctor
from .constructions import (suspend, suspend_cell, suspend_functor, coproduct,
                            pushout, SequentialColimit, POLE_BOT, POLE_TOP,
                            SUSP_PREFIX)

__all__ = ["build_Q", "TowerStage", "Tower", "generators_E",
            "expected_E_names", "default_max_dim"]

ENV_MAX_DIM = "OMEGAK_MAX_DIM"


def default_max_dim() -> int:
    try:
        return int(os.environ.get(ENV_MAX_DIM, "16"))
    except ValueError:
        return 16


def build_Q() -> Polygraph:
    """The span q <- p -> q of one section and two retraction candidates."""
    return Polygraph("Q", [
        Generator("p", 0),
        Generator("q", 0),
        Generator("f", 1, gen("p"), gen("q")),
        Generator("g", 1, gen("q"), gen("p")),
        Generator("g'", 1, gen("q"), gen("p")),
    ])


@dataclass
class TowerStage:
    k: int
    polygraph: Polygraph
    iota: OmegaFunctor | None      # stage k-1 -> stage k
    alpha: OmegaFunctor | None     # susp(stage k-1) -> stage k
    beta: OmegaFunctor | None
    fresh: tuple                   # generator names new at this stage


class Tower:
    """Lazily materialized tower of walking-equivalence stages."""

    def __init__(self, max_dim: int | None = None):
        self._stages: list[TowerStage] = []
        self.max_dim = default_max_dim() if max_dim is None else max_dim
        self._colimit = None

    def stage(self, k: int) -> TowerStage:
        if k < 0:
            raise CellError("tower stages start at 0")
        while len(self._stages) <= k:
            self._stages.append(self._build(len(self._stages)))
        return self._stages[k]

    def _build(self, k: int) -> TowerStage:
        if k == 0:
            p0 = Polygraph("stage0", [Generator("p", 0), Generator("q", 0)])
            return TowerStage(0, p0, None, None, None, ("p", "q"))
        if k == 1:
            q = build_Q()
            prev = self.stage(0).polygraph
            iota = OmegaFunctor(prev, q, {"p": gen("p"), "q": gen("q")},
                                name="iota1")
            sp = suspend(prev)
            gf = comp_raw(0, gen("g"), gen("f"))
            fg = comp_raw(0, gen("f"), gen("g'"))
            alpha = OmegaFunctor(sp, q, {
                POLE_BOT: gen("p"), POLE_TOP: gen("p"),
                "s.p": gf, "s.q": ident(gen("p")),
            }, name="alpha1")
            beta = OmegaFunctor(sp, q, {
                POLE_BOT: gen("q"), POLE_TOP: gen("q"),
                "s.p": fg, "s.q": ident(gen("q")),
            }, name="beta1")
            return TowerStage(1, q, iota, alpha, beta, ("f", "g", "g'"))
        older = self.stage(k - 2)
        prev = self.stage(k - 1)
        s_old = suspend(older.polygraph)
        s_prev = suspend(prev.polygraph)
        dom, l_old, r_old = coproduct(s_old, s_old)
        cod, l_prev, r_prev = coproduct(s_prev, s_prev)
        incl = OmegaFunctor(dom, cod, {
            g.name: gen(g.name) for g in dom.generators()}, name="inc")
        fold = {}
        for g in s_old.generators():
            fold["l." + g.name] = prev.alpha.assign[g.name]
            fold["r." + g.name] = prev.beta.assign[g.name]
        fold_f = OmegaFunctor(dom, prev.polygraph, fold,
                              name=f"[alpha{k-1},beta{k-1}]")

        def namer(name):
            side, rest = name.split(".", 1)
            if not rest.startswith(SUSP_PREFIX):
                raise CellError(f"unexpected fresh pushout generator {name}")
            parent = rest[len(SUSP_PREFIX):]
            return ("a." if side == "l" else "b.") + parent

        out, inc, glued = pushout(incl, fold_f, namer=namer, name=f"stage{k}")
        alpha = OmegaFunctor(s_prev, out, {
            g.name: glued.assign["l." + g.name] for g in s_prev.generators()},
            name=f"alpha{k}")
        beta = OmegaFunctor(s_prev, out, {
            g.name: glued.assign["r." + g.name] for g in s_prev.generators()},
            name=f"beta{k}")
        inc.name = f"iota{k}"
        fresh = tuple(sorted(g.name for g in out.generators()
                             if g.name not in prev.polygraph))
        return TowerStage(k, out, inc, alpha, beta, fresh)

    # ----- colimit -------------------------------------------------------

    @property
    def colimit(self) -> SequentialColimit:
        if self._colimit is None:
            self._colimit = SequentialColimit(
                lambda k: self.stage(k).polygraph,
                stage_for=lambda d: max(d, 1),
                max_dim=self.max_dim, name="omegaE")
        return self._colimit

    def alpha_gen_image(self, name: str) -> Cell:
        """Colimit-level image of a suspended generator under the a-branch."""
        if name in (POLE_BOT, POLE_TOP):
            return gen("p")
        if name == "s.p":
            return comp_raw(0, gen("g"), gen("f"))
        if name == "s.q":
            return ident(gen("p"))
        if name.startswith(SUSP_PREFIX):
            return gen("a." + name[len(SUSP_PREFIX):])
        raise CellError(f"not a suspended-colimit generator: {name}")

    def beta_gen_image(self, name: str) -> Cell:
        if name in (POLE_BOT, POLE_TOP):
            return gen("q")
        if name == "s.p":
            return comp_raw(0, gen("f"), gen("g'"))
        if name == "s.q":
            return ident(gen("q"))
        if name.startswith(SUSP_PREFIX):
            return gen("b." + name[len(SUSP_PREFIX):])
        raise CellError(f"not a suspended-colimit generator: {name}")

    def _map_cell(self, gen_image, c: Cell) -> Cell:
        if isinstance(c, Gen):
            return gen_image(c.name)
        if isinstance(c, Ident):
            return ident(self._map_cell(gen_image, c.base))
        return comp_raw(c.level, self._map_cell(gen_image, c.after),
                        self._map_cell(gen_image, c.before))

    def alpha_infty(self, c: Cell) -> Cell:
        """Colimit-level a-branch image of a cell of the suspended colimit."""
        return self._map_cell(self.alpha_gen_image, c)

    def beta_infty(self, c: Cell) -> Cell:
        return self._map_cell(self.beta_gen_image, c)


def generators_E(tower: Tower, k: int):
    """The free generating set in dimension k, read off the tower."""
    stage = tower.stage(max(k, 1))
    return sorted(g.name for g in stage.polygraph.gens_of_dim(k))


def expected_E_names(k: int):
    """Independent oracle: the recursive name tree of the a/b branches."""
    if k == 0:
        return ["p", "q"]
    if k == 1:
        return ["f", "g", "g'"]
    return sorted(w + "." + x
                  for w in ("a", "b") for x in expected_E_names(k - 1))
