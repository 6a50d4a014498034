"""Immutable composition terms for cells of free omega-categories.

A cell term is one of

    Gen(name)              a generator reference
    Ident(base)            the identity cell on a lower-dimensional cell
    Comp(level, after, before)
                           the composite of `before` followed by `after`
                           along their shared `level`-boundary

Terms are hash-consed: building the same shape twice yields the same
Python object, so term equality is object identity and terms can be used
as dictionary keys cheaply.  Terms carry no typing information by
themselves; dimensions and boundaries are computed relative to a
generator table (see kernel.py).
"""
from __future__ import annotations

import re

__all__ = [
    "Cell", "Gen", "Ident", "Comp", "gen", "ident", "comp_raw",
    "CellError", "parse_cell", "sexpr", "ID_RE",
]

ID_RE = re.compile(r"[A-Za-z0-9_'.\-]+\Z")


class CellError(Exception):
    """Ill-formed cell, invalid operation, or unknown generator."""


class Cell:
    __slots__ = ()

    def __str__(self):
        return sexpr(self)

    def __repr__(self):
        return sexpr(self)


class Gen(Cell):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class Ident(Cell):
    __slots__ = ("base",)

    def __init__(self, base):
        self.base = base


class Comp(Cell):
    __slots__ = ("level", "after", "before")

    def __init__(self, level, after, before):
        self.level = level
        self.after = after
        self.before = before


_TABLE: dict = {}


def gen(name: str) -> Gen:
    if not isinstance(name, str) or not ID_RE.match(name):
        raise CellError(f"invalid generator id: {name!r}")
    key = ("g", name)
    c = _TABLE.get(key)
    if c is None:
        c = _TABLE[key] = Gen(name)
    return c


def ident(base: Cell) -> Ident:
    key = ("i", id(base))
    c = _TABLE.get(key)
    if c is None:
        c = _TABLE[key] = Ident(base)
    return c


def comp_raw(level: int, after: Cell, before: Cell) -> Comp:
    """Build a composite term without any well-formedness checks."""
    if not isinstance(level, int) or level < 0:
        raise CellError(f"invalid composition level: {level!r}")
    key = ("c", level, id(after), id(before))
    c = _TABLE.get(key)
    if c is None:
        c = _TABLE[key] = Comp(level, after, before)
    return c


# ---------------------------------------------------------------------------
# S-expression syntax
#
#   gen:<id>
#   (id <cell>)
#   (comp <k> <after> <before>)


def sexpr(c: Cell) -> str:
    if isinstance(c, Gen):
        return f"gen:{c.name}"
    if isinstance(c, Ident):
        return f"(id {sexpr(c.base)})"
    if isinstance(c, Comp):
        return f"(comp {c.level} {sexpr(c.after)} {sexpr(c.before)})"
    raise CellError(f"not a cell: {c!r}")


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_cell(text: str) -> Cell:
    tokens = _TOKEN.findall(text)
    pos = 0

    def err(msg):
        raise CellError(f"parse error: {msg} (in {text!r})")

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            err("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                err("unexpected end of input")
            head = tokens[pos]
            pos += 1
            if head == "id":
                base = parse()
                out = ident(base)
            elif head == "comp":
                if pos >= len(tokens):
                    err("missing composition level")
                lvl = tokens[pos]
                pos += 1
                if not lvl.isdigit():
                    err(f"bad composition level {lvl!r}")
                after = parse()
                before = parse()
                out = comp_raw(int(lvl), after, before)
            else:
                err(f"unknown form {head!r}")
            if pos >= len(tokens) or tokens[pos] != ")":
                err("missing ')'")
            pos += 1
            return out
        if tok == ")":
            err("unexpected ')'")
        if tok.startswith("gen:"):
            name = tok[4:]
            if not ID_RE.match(name):
                err(f"bad generator id {name!r}")
            return gen(name)
        err(f"unexpected token {tok!r}")

    out = parse()
    if pos != len(tokens):
        err("trailing input")
    return out
