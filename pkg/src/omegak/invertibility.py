"""Coinductive (bi-)invertibility witnesses and their checker.

A bi-invertibility witness for an n-cell a provides a left inverse aL, a
right inverse aR, and two cancellation cells

    c  : aL *_{n-1} a  ->  id(d-(a))
    c' : a *_{n-1} aR  ->  id(d+(a))

each again equipped with a witness.  The children are lazy: they are
produced on first access and cached, so a witness is a finitely
representable piece of an infinite coinductive tree.  `check_set`
expands such trees to a requested depth and verifies every boundary
equation, reporting Equal / Unknown / Unequal per equation.

An invertibility witness is the special case where a single cell plays
both inverse roles.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .cells import Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError, sexpr
from .kernel import dim, boundary, cells_equal, normalize, EqVerdict
from .constructions import suspend, suspend_cell, SUSP_PREFIX, POLE_BOT, POLE_TOP
from .polygraph import Polygraph, OmegaFunctor
from .walking import Tower

__all__ = [
    "BiInvWitness", "InvWitness", "witness_identity", "witness_horizontal",
    "witness_vertical", "witness_half_inverse", "bi_to_inv", "inv_to_bi",
    "map_witness", "check_set", "CheckReport", "classify",
    "omegaE_cell_witness", "witness_to_json",
]


class _Lazy:
    __slots__ = ("thunk", "value")

    def __init__(self, thunk):
        self.thunk = thunk
        self.value = None

    def force(self):
        if self.thunk is not None:
            self.value = self.thunk()
            self.thunk = None
        return self.value


class BiInvWitness:
    """Node of a coinductive bi-invertibility witness tree."""

    flavor = "bi"

    def __init__(self, poly, a, aL, aR, c_pair, cprime_pair):
        """c_pair / cprime_pair: thunks returning (cell, witness)."""
        self.poly = poly
        self.a = a
        self.aL = aL
        self.aR = aR
        self._c = _Lazy(c_pair)
        self._cprime = _Lazy(cprime_pair)

    @property
    def child_c(self):
        return self._c.force()

    @property
    def child_cprime(self):
        return self._cprime.force()


class InvWitness:
    """Witness that a single cell is a strict two-sided quasi-inverse."""

    flavor = "inv"

    def __init__(self, poly, a, tilde, c_pair, cprime_pair):
        self.poly = poly
        self.a = a
        self.tilde = tilde
        self._c = _Lazy(c_pair)
        self._cprime = _Lazy(cprime_pair)

    @property
    def aL(self):
        return self.tilde

    @property
    def aR(self):
        return self.tilde

    @property
    def child_c(self):
        return self._c.force()

    @property
    def child_cprime(self):
        return self._cprime.force()


# ---------------------------------------------------------------------------
# constructors


def witness_identity(poly, base: Cell) -> BiInvWitness:
    """The canonical witness for the identity cell on `base`."""
    a = ident(base)

    def child():
        return ident(a), witness_identity(poly, a)

    return BiInvWitness(poly, a, a, a, child, child)


def witness_horizontal(poly, k: int, wb: BiInvWitness,
                       wa: BiInvWitness) -> BiInvWitness:
    """Witness for b *_k a at a level k below n-1."""
    a, b = wa.a, wb.a
    n = dim(poly, a)
    if dim(poly, b) != n:
        raise CellError("horizontal composite of cells of different dimension")
    if not 0 <= k < n - 1:
        raise CellError(f"horizontal composition needs level < {n - 1}")
    e = comp_raw(k, b, a)
    eL = comp_raw(k, wb.aL, wa.aL)
    eR = comp_raw(k, wb.aR, wa.aR)

    def child_c():
        (ccell_a, cwit_a) = wa.child_c
        (ccell_b, cwit_b) = wb.child_c
        cell = comp_raw(k, ccell_b, ccell_a)
        return cell, witness_horizontal(poly, k, cwit_b, cwit_a)

    def child_cprime():
        (ca, wa2) = wa.child_cprime
        (cb, wb2) = wb.child_cprime
        cell = comp_raw(k, cb, ca)
        return cell, witness_horizontal(poly, k, wb2, wa2)

    return BiInvWitness(poly, e, eL, eR, child_c, child_cprime)


def witness_vertical(poly, wb: BiInvWitness, wa: BiInvWitness) -> BiInvWitness:
    """Witness for b *_{n-1} a (top-level composition)."""
    a, b = wa.a, wb.a
    n = dim(poly, a)
    if dim(poly, b) != n:
        raise CellError("vertical composite of cells of different dimension")
    e = comp_raw(n - 1, b, a)
    eL = comp_raw(n - 1, wa.aL, wb.aL)
    eR = comp_raw(n - 1, wa.aR, wb.aR)

    def child_c():
        ccell_a, cwit_a = wa.child_c
        ccell_b, cwit_b = wb.child_c
        whisk = comp_raw(n - 1, ident(wa.aL),
                         comp_raw(n - 1, ccell_b, ident(a)))
        cell = comp_raw(n, ccell_a, whisk)
        w_whisk = witness_horizontal(
            poly, n - 1, witness_identity(poly, wa.aL),
            witness_horizontal(poly, n - 1, cwit_b,
                               witness_identity(poly, a)))
        return cell, witness_vertical(poly, cwit_a, w_whisk)

    def child_cprime():
        ca, wa2 = wa.child_cprime
        cb, wb2 = wb.child_cprime
        whisk = comp_raw(n - 1, ident(b),
                         comp_raw(n - 1, ca, ident(wb.aR)))
        cell = comp_raw(n, cb, whisk)
        w_whisk = witness_horizontal(
            poly, n - 1, witness_identity(poly, b),
            witness_horizontal(poly, n - 1, wa2,
                               witness_identity(poly, wb.aR)))
        return cell, witness_vertical(poly, wb2, w_whisk)

    return BiInvWitness(poly, e, eL, eR, child_c, child_cprime)


def witness_half_inverse(poly, wb: BiInvWitness, wa: BiInvWitness,
                         side: str = "left") -> BiInvWitness:
    """Witness for the composite of a cell with a (co)inverse:
    b *_{n-1} aL when side='left', aR *_{n-1} b when side='right'."""
    if side == "right":
        return _half_inverse_right(poly, wb, wa)
    a, b = wa.a, wb.a
    n = dim(poly, a)
    aL, aR = wa.aL, wa.aR
    bL, bR = wb.aL, wb.aR
    m = n - 1
    e = comp_raw(m, b, aL)
    eL = comp_raw(m, a, bL)
    eR = comp_raw(m, a, bR)

    # T = a * bL * b * aL, the target of the auxiliary cell x
    T = comp_raw(m, a, comp_raw(m, bL, comp_raw(m, b, aL)))

    def children():
        ccell, cwit = wa.child_c
        cpcell, cpwit = wa.child_cprime
        dcell, dwit = wb.child_c
        dpcell, dpwit = wb.child_cprime
        # x : a*bL*b*aL*a*aR -> a*bL*b*aL   (cancel a*aR on the inside)
        x = comp_raw(m, ident(T), cpcell)
        wx = witness_horizontal(poly, m, witness_identity(poly, T), cpwit)
        # y : a*bL*b*aL*a*aR -> id(d+ a)
        y = comp_raw(n, cpcell,
                     comp_raw(m, ident(a),
                              comp_raw(m, dcell,
                                       comp_raw(m, ccell, ident(aR)))))
        wy = witness_vertical(
            poly, cpwit,
            witness_horizontal(
                poly, m, witness_identity(poly, a),
                witness_horizontal(
                    poly, m, dwit,
                    witness_horizontal(poly, m, cwit,
                                       witness_identity(poly, aR)))))
        xL = wx.aL
        ell = comp_raw(n, y, xL)

        def w_ell():
            return witness_half_inverse(poly, wy, wx, "left")

        ellp = comp_raw(n, dpcell,
                        comp_raw(m, ident(b),
                                 comp_raw(m, ccell, ident(bR))))

        def w_ellp():
            return witness_vertical(
                poly, dpwit,
                witness_horizontal(
                    poly, m, witness_identity(poly, b),
                    witness_horizontal(poly, m, cwit,
                                       witness_identity(poly, bR))))

        return (ell, w_ell), (ellp, w_ellp)

    state = {}

    def child_c():
        if not state:
            state["v"] = children()
        (ell, w_ell), _ = state["v"]
        return ell, w_ell()

    def child_cprime():
        if not state:
            state["v"] = children()
        _, (ellp, w_ellp) = state["v"]
        return ellp, w_ellp()

    return BiInvWitness(poly, e, eL, eR, child_c, child_cprime)


def _half_inverse_right(poly, wb: BiInvWitness, wa: BiInvWitness):
    """Mirror case: witness for aR *_{n-1} b."""
    a, b = wa.a, wb.a
    n = dim(poly, a)
    aL, aR = wa.aL, wa.aR
    bL, bR = wb.aL, wb.aR
    m = n - 1
    e = comp_raw(m, aR, b)
    eL = comp_raw(m, bL, a)
    eR = comp_raw(m, bR, a)
    # T = aR * b * bR * a, the source of e *_m eR and target of x
    T = comp_raw(m, aR, comp_raw(m, b, comp_raw(m, bR, a)))

    def children():
        ccell, cwit = wa.child_c
        cpcell, cpwit = wa.child_cprime
        dcell, dwit = wb.child_c
        dpcell, dpwit = wb.child_cprime
        # x : aR*b*bR*a*aL*a -> aR*b*bR*a  (cancel aL*a on the outside)
        x = comp_raw(m, ccell, ident(T))
        wx = witness_horizontal(poly, m, cwit, witness_identity(poly, T))
        # y : aR*b*bR*a*aL*a -> id(sa)
        y = comp_raw(n, ccell,
                     comp_raw(m, ident(aL),
                              comp_raw(m, cpcell,
                                       comp_raw(m, dpcell, ident(a)))))
        wy = witness_vertical(
            poly, cwit,
            witness_horizontal(
                poly, m, witness_identity(poly, aL),
                witness_horizontal(
                    poly, m, cpwit,
                    witness_horizontal(poly, m, dpwit,
                                       witness_identity(poly, a)))))
        xL = wx.aL
        ellp = comp_raw(n, y, xL)

        def w_ellp():
            return witness_half_inverse(poly, wy, wx, "left")

        ell = comp_raw(n, dcell,
                       comp_raw(m, ident(bL),
                                comp_raw(m, cpcell, ident(b))))

        def w_ell():
            return witness_vertical(
                poly, dwit,
                witness_horizontal(
                    poly, m, witness_identity(poly, bL),
                    witness_horizontal(poly, m, cpwit,
                                       witness_identity(poly, b))))

        return (ell, w_ell), (ellp, w_ellp)

    state = {}

    def child_c():
        if not state:
            state["v"] = children()
        (ell, w_ell), _ = state["v"]
        return ell, w_ell()

    def child_cprime():
        if not state:
            state["v"] = children()
        _, (ellp, w_ellp) = state["v"]
        return ellp, w_ellp()

    return BiInvWitness(poly, e, eL, eR, child_c, child_cprime)


def bi_to_inv(w: BiInvWitness) -> InvWitness:
    """Strictify: the left inverse of a bi-invertible cell is two-sided."""
    poly = w.poly
    a, aL, aR = w.a, w.aL, w.aR
    n = dim(poly, a)
    m = n - 1

    def child_c():
        ccell, cwit = w.child_c
        return ccell, bi_to_inv(cwit)

    def child_cprime():
        ccell, cwit = w.child_c
        cpcell, cpwit = w.child_cprime
        # left inverse of c' via a half-inverse witness for id * c'L
        w_cpL = witness_half_inverse(
            poly, witness_identity(poly, boundary(poly, n, "-", cpcell)),
            cpwit, "left")
        cpL = cpwit.aL
        aaL = comp_raw(m, a, aL)
        step1 = comp_raw(m, ident(aaL), cpL)
        step2 = comp_raw(m, ident(a), comp_raw(m, ccell, ident(aR)))
        ell = comp_raw(n, cpcell, comp_raw(n, step2, step1))
        w_step1 = witness_horizontal(
            poly, m, witness_identity(poly, aaL), w_cpL)
        w_step2 = witness_horizontal(
            poly, m, witness_identity(poly, a),
            witness_horizontal(poly, m, cwit, witness_identity(poly, aR)))
        w_ell = witness_vertical(
            poly, cpwit, witness_vertical(poly, w_step2, w_step1))
        return ell, bi_to_inv(w_ell)

    return InvWitness(poly, a, aL, child_c, child_cprime)


def inv_to_bi(w: InvWitness) -> BiInvWitness:
    def child_c():
        cell, cw = w.child_c
        return cell, inv_to_bi(cw)

    def child_cprime():
        cell, cw = w.child_cprime
        return cell, inv_to_bi(cw)

    return BiInvWitness(w.poly, w.a, w.tilde, w.tilde, child_c, child_cprime)


def map_witness(poly, cell_map, w: BiInvWitness) -> BiInvWitness:
    """Push a witness forward along an omega-functor given as a cell map."""

    def child(pair_prop):
        def thunk():
            cell, wit = pair_prop()
            return cell_map(cell), map_witness(poly, cell_map, wit)
        return thunk

    return BiInvWitness(poly, cell_map(w.a), cell_map(w.aL), cell_map(w.aR),
                        child(lambda: w.child_c),
                        child(lambda: w.child_cprime))


# ---------------------------------------------------------------------------
# checker


@dataclass(frozen=True)
class CheckReport:
    entries: tuple     # (path, equation, EqVerdict)

    @property
    def hard(self):
        return [e for e in self.entries if e[2].kind == "unequal"]

    @property
    def unknown(self):
        return [e for e in self.entries if e[2].kind == "unknown"]

    @property
    def ok(self):
        return not self.hard

    @property
    def clean(self):
        return not self.hard and not self.unknown


def _check_node(poly, w, depth, path, entries):
    a, aL, aR = w.a, w.aL, w.aR
    n = dim(poly, a)
    if n < 1:
        raise CellError("witnessed cells must have positive dimension")
    sa = boundary(poly, n - 1, "-", a)
    ta = boundary(poly, n - 1, "+", a)
    for nm, inv in (("aL", aL), ("aR", aR)):
        entries.append((path, f"{nm} source",
                        cells_equal(poly, boundary(poly, n - 1, "-", inv), ta)))
        entries.append((path, f"{nm} target",
                        cells_equal(poly, boundary(poly, n - 1, "+", inv), sa)))
    if depth <= 0:
        return
    ccell, cwit = w.child_c
    entries.append((path, "c source",
                    cells_equal(poly, boundary(poly, n, "-", ccell),
                                comp_raw(n - 1, aL, a))))
    entries.append((path, "c target",
                    cells_equal(poly, boundary(poly, n, "+", ccell),
                                ident(sa))))
    _check_node(poly, cwit, depth - 1, path + ("c",), entries)
    cpcell, cpwit = w.child_cprime
    entries.append((path, "c' source",
                    cells_equal(poly, boundary(poly, n, "-", cpcell),
                                comp_raw(n - 1, a, aR))))
    entries.append((path, "c' target",
                    cells_equal(poly, boundary(poly, n, "+", cpcell),
                                ident(ta))))
    _check_node(poly, cpwit, depth - 1, path + ("c'",), entries)


def check_set(witnesses, depth: int = 1) -> CheckReport:
    """Expand each witness to `depth` levels of children and verify all
    boundary equations."""
    entries = []
    for i, w in enumerate(witnesses):
        _check_node(w.poly, w, depth, (f"w{i}",), entries)
    return CheckReport(tuple(entries))


def witness_to_json(poly, w, depth: int = 1) -> str:
    def node(w, d):
        out = {"a": sexpr(w.a), "aL": sexpr(w.aL), "aR": sexpr(w.aR)}
        if w.flavor == "inv":
            out["tilde"] = sexpr(w.tilde)
        for key, prop in (("c", lambda: w.child_c),
                          ("c_prime", lambda: w.child_cprime)):
            if d <= 0:
                out[key] = "deferred"
            else:
                cell, wit = prop()
                out[key] = {"cell": sexpr(cell), "witness": node(wit, d - 1)}
        return out

    return json.dumps(node(w, depth), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# classifiers into an ambient omega-category


def classify(tower: Tower, ambient, a: Cell, w: BiInvWitness,
             k: int) -> OmegaFunctor:
    """The functor from the (dim(a)-1)-fold suspension of tower stage k
    classifying the witnessed cell a."""
    n = dim(ambient, a)
    if n < 1:
        raise CellError("classify needs a cell of positive dimension")

    def stage_images(k, a, w):
        """Map bare stage-k generator names to ambient cells."""
        m = dim(ambient, a) - 1
        out = {"p": boundary(ambient, m, "-", a),
               "q": boundary(ambient, m, "+", a)}
        if k == 0:
            return out
        out["f"] = a
        out["g"] = w.aL
        out["g'"] = w.aR
        if k >= 2:
            ccell, cwit = w.child_c
            cpcell, cpwit = w.child_cprime
            for name, cell in stage_images(k - 1, ccell, cwit).items():
                out["a." + name] = cell
            for name, cell in stage_images(k - 1, cpcell, cpwit).items():
                out["b." + name] = cell
        return out

    pre = SUSP_PREFIX * (n - 1)
    assign: dict[str, Cell] = {}
    for j in range(n - 1):
        assign[SUSP_PREFIX * j + POLE_BOT] = boundary(ambient, j, "-", a)
        assign[SUSP_PREFIX * j + POLE_TOP] = boundary(ambient, j, "+", a)
    for name, cell in stage_images(k, a, w).items():
        assign[pre + name] = cell
    source = tower.stage(k).polygraph
    for _ in range(n - 1):
        source = suspend(source)
    assign = {nm: cell for nm, cell in assign.items() if nm in source}
    return OmegaFunctor(source, ambient, assign, name=f"classify{k}")


# ---------------------------------------------------------------------------
# canonical witnesses for cells of the walking-equivalence colimit


def omegaE_cell_witness(tower: Tower, c: Cell) -> BiInvWitness:
    poly = tower.colimit
    cache = poly.__dict__.setdefault("_witness_cache", {})
    hit = cache.get(c)
    if hit is not None:
        return hit
    w = _build_omegaE_witness(tower, poly, c)
    cache[c] = w
    return w


def _build_omegaE_witness(tower, poly, c: Cell) -> BiInvWitness:
    if isinstance(c, Ident):
        return witness_identity(poly, c.base)
    if isinstance(c, Comp):
        n = dim(poly, c)
        wb = omegaE_cell_witness(tower, c.after)
        wa = omegaE_cell_witness(tower, c.before)
        if c.level == n - 1:
            return witness_vertical(poly, wb, wa)
        return witness_horizontal(poly, c.level, wb, wa)
    if not isinstance(c, Gen):
        raise CellError(f"not a cell: {c!r}")
    name = c.name
    if name == "f":
        def child_c():
            return gen("a.f"), omegaE_cell_witness(tower, gen("a.f"))

        def child_cprime():
            return gen("b.f"), omegaE_cell_witness(tower, gen("b.f"))

        return BiInvWitness(poly, c, gen("g"), gen("g'"),
                            child_c, child_cprime)
    if name == "g":
        # g is the left inverse of f: witness id_p *_0 g, rebased onto g
        wf = omegaE_cell_witness(tower, gen("f"))
        w = witness_half_inverse(
            poly, witness_identity(poly, gen("p")), wf, "left")
        return _rebase(poly, w, c)
    if name == "g'":
        wf = omegaE_cell_witness(tower, gen("f"))
        w = witness_half_inverse(
            poly, witness_identity(poly, gen("q")), wf, "right")
        return _rebase(poly, w, c)
    if name.startswith("a."):
        parent = omegaE_cell_witness(tower, gen(name[2:]))
        return map_witness(
            poly, lambda t: tower.alpha_infty(suspend_cell(t)), parent)
    if name.startswith("b."):
        parent = omegaE_cell_witness(tower, gen(name[2:]))
        return map_witness(
            poly, lambda t: tower.beta_infty(suspend_cell(t)), parent)
    raise CellError(f"no canonical witness for generator {name!r}")


def _rebase(poly, w: BiInvWitness, a: Cell) -> BiInvWitness:
    """Replace the root cell of a witness by an equal cell."""
    return BiInvWitness(poly, a, w.aL, w.aR,
                        lambda: w.child_c, lambda: w.child_cprime)
