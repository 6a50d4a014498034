"""Finite polygraph presentations and omega-functors between them."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cells import Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError, \
    parse_cell, sexpr, ID_RE
from . import kernel
from .kernel import dim, boundary, cells_equal, normalize, check_cell, EqVerdict

__all__ = [
    "Generator", "Polygraph", "OmegaFunctor", "FunctorReport",
    "identity_functor", "inclusion_functor", "compose_functors",
    "validate_functor", "disk", "boundary_disk",
]


@dataclass(frozen=True)
class Generator:
    name: str
    dim: int
    src: Cell | None = None
    tgt: Cell | None = None

    def __post_init__(self):
        if not ID_RE.match(self.name):
            raise CellError(f"invalid generator id: {self.name!r}")
        if self.dim < 0:
            raise CellError(f"negative dimension for generator {self.name}")
        if (self.dim == 0) != (self.src is None and self.tgt is None):
            raise CellError(
                f"generator {self.name}: attachments required exactly in "
                f"positive dimension")


class Polygraph:
    """A dimension-indexed family of generators with attachments."""

    def __init__(self, name: str, generators):
        self.name = name
        self._gens: dict[str, Generator] = {}
        for g in generators:
            if g.name in self._gens:
                raise CellError(f"duplicate generator id {g.name!r}")
            self._gens[g.name] = g

    # generator-table interface used by the kernel
    def gen_dim(self, name: str) -> int:
        g = self._gens.get(name)
        if g is None:
            raise CellError(f"unknown generator {name!r} in {self.name}")
        return g.dim

    def gen_src(self, name: str) -> Cell | None:
        g = self._gens.get(name)
        if g is None:
            raise CellError(f"unknown generator {name!r} in {self.name}")
        return g.src

    def gen_tgt(self, name: str) -> Cell | None:
        g = self._gens.get(name)
        if g is None:
            raise CellError(f"unknown generator {name!r} in {self.name}")
        return g.tgt

    # convenience
    def __contains__(self, name):
        return name in self._gens

    def generators(self):
        return list(self._gens.values())

    def gens_of_dim(self, d: int):
        return [g for g in self._gens.values() if g.dim == d]

    @property
    def max_dim(self) -> int:
        return max((g.dim for g in self._gens.values()), default=-1)

    def counts(self) -> list[int]:
        out = [0] * (self.max_dim + 1)
        for g in self._gens.values():
            out[g.dim] += 1
        return out

    def validate(self) -> None:
        """Check attachments: well-formed, correct dimension, globular."""
        for g in sorted(self._gens.values(), key=lambda g: (g.dim, g.name)):
            if g.dim == 0:
                continue
            for side, cell in (("src", g.src), ("tgt", g.tgt)):
                check_cell(self, cell)
                d = dim(self, cell)
                if d != g.dim - 1:
                    raise CellError(
                        f"{g.name}.{side} has dimension {d}, expected {g.dim - 1}")
            for k in range(g.dim - 1):
                for s in ("-", "+"):
                    v = cells_equal(self, boundary(self, k, s, g.src),
                                    boundary(self, k, s, g.tgt))
                    if v.kind != "equal":
                        raise CellError(
                            f"{g.name}: globularity fails at d{s}_{k} [{v.kind}]")

    # serialization
    def to_json(self) -> str:
        gens = sorted(self._gens.values(), key=lambda g: (g.dim, g.name))
        return json.dumps({
            "name": self.name,
            "generators": [
                {"id": g.name, "dim": g.dim,
                 "src": None if g.src is None else sexpr(g.src),
                 "tgt": None if g.tgt is None else sexpr(g.tgt)}
                for g in gens
            ],
        }, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Polygraph":
        data = json.loads(text)
        gens = [Generator(e["id"], e["dim"],
                          None if e["src"] is None else parse_cell(e["src"]),
                          None if e["tgt"] is None else parse_cell(e["tgt"]))
                for e in data["generators"]]
        return cls(data["name"], gens)


@dataclass(frozen=True)
class FunctorReport:
    hard: tuple            # (generator, check, EqVerdict/message)
    soft: tuple

    @property
    def ok(self) -> bool:
        return not self.hard

    @property
    def clean(self) -> bool:
        return not self.hard and not self.soft


class OmegaFunctor:
    """An omega-functor presented by a generator assignment."""

    def __init__(self, source: Polygraph, target, assign: dict[str, Cell],
                 name: str = ""):
        self.source = source
        self.target = target
        self.assign = dict(assign)
        self.name = name

    def apply(self, c: Cell) -> Cell:
        if isinstance(c, Gen):
            out = self.assign.get(c.name)
            if out is None:
                raise CellError(f"functor has no assignment for {c.name!r}")
            return out
        if isinstance(c, Ident):
            return ident(self.apply(c.base))
        if isinstance(c, Comp):
            return comp_raw(c.level, self.apply(c.after), self.apply(c.before))
        raise CellError(f"not a cell: {c!r}")

    def validate(self) -> FunctorReport:
        hard, soft = [], []
        for g in sorted(self.source.generators(), key=lambda g: (g.dim, g.name)):
            img = self.assign.get(g.name)
            if img is None:
                hard.append((g.name, "assignment", "missing"))
                continue
            try:
                check_cell(self.target, img)
            except CellError as e:
                hard.append((g.name, "image", str(e)))
                continue
            if dim(self.target, img) != g.dim:
                hard.append((g.name, "dim",
                             f"{dim(self.target, img)} != {g.dim}"))
                continue
            if g.dim == 0:
                continue
            for side, att in (("src", g.src), ("tgt", g.tgt)):
                s = "-" if side == "src" else "+"
                lhs = self.apply(att)
                rhs = boundary(self.target, g.dim - 1, s, img)
                v = cells_equal(self.target, lhs, rhs)
                if v.kind == "unequal":
                    hard.append((g.name, side, v))
                elif v.kind == "unknown":
                    soft.append((g.name, side, v))
        return FunctorReport(tuple(hard), tuple(soft))


def validate_functor(f: OmegaFunctor) -> FunctorReport:
    return f.validate()


def identity_functor(p: Polygraph) -> OmegaFunctor:
    return OmegaFunctor(p, p, {g.name: gen(g.name) for g in p.generators()},
                        name=f"id_{p.name}")


def inclusion_functor(p: Polygraph, q, rename=None) -> OmegaFunctor:
    rename = rename or (lambda x: x)
    return OmegaFunctor(p, q, {g.name: gen(rename(g.name))
                               for g in p.generators()},
                        name=f"{p.name}->{getattr(q, 'name', '?')}")


def compose_functors(g: OmegaFunctor, f: OmegaFunctor) -> OmegaFunctor:
    if f.target is not g.source:
        # allow structural match as well
        pass
    return OmegaFunctor(f.source, g.target,
                        {name: g.apply(c) for name, c in f.assign.items()},
                        name=f"{g.name}.{f.name}")


# ---------------------------------------------------------------------------
# disks


def disk(n: int) -> Polygraph:
    """The n-disk: two generators in every dimension below n, one on top."""
    gens = []
    for j in range(n):
        if j == 0:
            gens.append(Generator("d0s", 0))
            gens.append(Generator("d0t", 0))
        else:
            s, t = gen(f"d{j-1}s"), gen(f"d{j-1}t")
            gens.append(Generator(f"d{j}s", j, s, t))
            gens.append(Generator(f"d{j}t", j, s, t))
    if n == 0:
        gens.append(Generator("e0", 0))
    else:
        gens.append(Generator(f"e{n}", n, gen(f"d{n-1}s"), gen(f"d{n-1}t")))
    return Polygraph(f"disk{n}", gens)


def boundary_disk(n: int) -> Polygraph:
    """The boundary of the n-disk: the (n-1)-disk with its top cell doubled."""
    if n <= 0:
        raise CellError("boundary_disk needs n >= 1")
    gens = []
    for j in range(n - 1):
        if j == 0:
            gens.append(Generator("d0s", 0))
            gens.append(Generator("d0t", 0))
        else:
            s, t = gen(f"d{j-1}s"), gen(f"d{j-1}t")
            gens.append(Generator(f"d{j}s", j, s, t))
            gens.append(Generator(f"d{j}t", j, s, t))
    if n == 1:
        gens.append(Generator("e0s", 0))
        gens.append(Generator("e0t", 0))
    else:
        s, t = gen(f"d{n-2}s"), gen(f"d{n-2}t")
        gens.append(Generator(f"e{n-1}s", n - 1, s, t))
        gens.append(Generator(f"e{n-1}t", n - 1, s, t))
    return Polygraph(f"bdisk{n}", gens)
