"""Core operations on cell terms over a generator table.

A generator table ("poly") is any object with

    gen_dim(name) -> int
    gen_src(name) -> Cell | None
    gen_tgt(name) -> Cell | None

All per-cell results are memoized on the table object, so tables are
assumed immutable once in use.

Normalization produces a layered normal form.  A cell of dimension n is
rewritten into a top-level sequence of layers composed at level n-1,
where each layer contains exactly one n-dimensional generator whiskered
by identities of lower cells.  Units are eliminated, identities are
distributed towards the leaves, composites are flattened, and adjacent
layers that provably commute are put into a canonical order.  The form
is a decision procedure for equality in dimensions <= 2 and a sound
partial check above that; `cells_equal` reports Equal / Unequal (with a
named separating invariant) / Unknown accordingly.
"""
from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass

from .cells import Cell, Gen, Ident, Comp, gen, ident, comp_raw, CellError, sexpr

__all__ = [
    "dim", "boundary", "maxgendim", "lift", "lift_to", "identity",
    "compose", "check_cell", "normalize", "top_generator_multiset",
    "EqVerdict", "cells_equal", "EQUAL", "src", "tgt", "canonical",
]


def _cache(poly, key):
    store = poly.__dict__.setdefault("_kernel_caches", {})
    table = store.get(key)
    if table is None:
        table = store[key] = {}
    return table


# ---------------------------------------------------------------------------
# dimension / boundaries


def dim(poly, c: Cell) -> int:
    table = _cache(poly, "dim")
    d = table.get(c)
    if d is not None:
        return d
    if isinstance(c, Gen):
        d = poly.gen_dim(c.name)
    elif isinstance(c, Ident):
        d = dim(poly, c.base) + 1
    elif isinstance(c, Comp):
        d = dim(poly, c.before)
    else:
        raise CellError(f"not a cell: {c!r}")
    table[c] = d
    return d


def boundary(poly, k: int, s: str, c: Cell) -> Cell:
    """The k-dimensional source (s='-') or target (s='+') of c."""
    if s not in ("-", "+"):
        raise CellError(f"boundary side must be '-' or '+', got {s!r}")
    n = dim(poly, c)
    if not 0 <= k < n:
        raise CellError(f"boundary dimension {k} out of range for a {n}-cell")
    table = _cache(poly, "bd")
    key = (k, s, c)
    out = table.get(key)
    if out is not None:
        return out
    if isinstance(c, Gen):
        out = poly.gen_src(c.name) if s == "-" else poly.gen_tgt(c.name)
        if k < n - 1:
            out = boundary(poly, k, s, out)
    elif isinstance(c, Ident):
        out = c.base if k == dim(poly, c.base) else boundary(poly, k, s, c.base)
    elif isinstance(c, Comp):
        m = c.level
        if k <= m:
            out = boundary(poly, k, s, c.before if s == "-" else c.after)
        else:
            out = comp_raw(m, boundary(poly, k, s, c.after),
                           boundary(poly, k, s, c.before))
    table[key] = out
    return out


def src(poly, c: Cell) -> Cell:
    return boundary(poly, dim(poly, c) - 1, "-", c)


def tgt(poly, c: Cell) -> Cell:
    return boundary(poly, dim(poly, c) - 1, "+", c)


def maxgendim(poly, c: Cell) -> int:
    """The largest dimension of any generator occurring in the term.

    A cell is an iterated identity on its k-boundary exactly when this
    value is <= k.
    """
    table = _cache(poly, "mgd")
    d = table.get(c)
    if d is not None:
        return d
    if isinstance(c, Gen):
        d = poly.gen_dim(c.name)
    elif isinstance(c, Ident):
        d = maxgendim(poly, c.base)
    else:
        d = max(maxgendim(poly, c.after), maxgendim(poly, c.before))
    table[c] = d
    return d


def identity(c: Cell) -> Cell:
    return ident(c)


_LIFT_MEMO = {}


def lift(poly, c: Cell) -> Cell:
    """The identity on c, with the Ident constructor pushed to the leaves."""
    out = _LIFT_MEMO.get(c)
    if out is None:
        if isinstance(c, Comp):
            out = comp_raw(c.level, lift(poly, c.after), lift(poly, c.before))
        else:
            out = ident(c)
        _LIFT_MEMO[c] = out
    return out


def lift_to(poly, c: Cell, n: int) -> Cell:
    d = dim(poly, c)
    if d > n:
        raise CellError(f"cannot lift a {d}-cell to dimension {n}")
    for _ in range(n - d):
        c = lift(poly, c)
    return c


# ---------------------------------------------------------------------------
# well-formedness


def check_cell(poly, c: Cell) -> None:
    """Raise CellError unless c is a well-formed cell over poly."""
    table = _cache(poly, "ok")
    if table.get(c):
        return
    if isinstance(c, Gen):
        poly.gen_dim(c.name)
    elif isinstance(c, Ident):
        check_cell(poly, c.base)
    elif isinstance(c, Comp):
        check_cell(poly, c.before)
        check_cell(poly, c.after)
        nb, na = dim(poly, c.before), dim(poly, c.after)
        if nb != na:
            raise CellError(
                f"composition of cells of different dimensions {nb} and {na}")
        if not 0 <= c.level < nb:
            raise CellError(
                f"composition level {c.level} out of range for {nb}-cells")
        lhs = boundary(poly, c.level, "+", c.before)
        rhs = boundary(poly, c.level, "-", c.after)
        v = cells_equal(poly, lhs, rhs)
        if v.kind != "equal":
            raise CellError(
                f"boundary mismatch at level {c.level}: "
                f"{sexpr(normalize(poly, lhs))} vs {sexpr(normalize(poly, rhs))}"
                f" [{v.kind}]")
    else:
        raise CellError(f"not a cell: {c!r}")
    table[c] = True


def compose(poly, k: int, after: Cell, before: Cell) -> Cell:
    """Checked composite of `before` followed by `after` along level k."""
    c = comp_raw(k, after, before)
    check_cell(poly, c)
    return c


# ---------------------------------------------------------------------------
# normalization


def normalize(poly, c: Cell) -> Cell:
    table = _cache(poly, "nf")
    out = table.get(c)
    if out is not None:
        return out
    n = dim(poly, c)
    if n == 0:
        if not isinstance(c, Gen):
            raise CellError(f"0-cell is not a generator: {c!r}")
        out = c
    else:
        ls = _layers(poly, c, n)
        if not ls:
            out = lift(poly, normalize(poly, boundary(poly, n - 1, "-", c)))
        else:
            if n >= 2 and len(ls) > 1:
                ls = _sort_layers(poly, ls, n)
            out = _chain(n - 1, ls)
    table[c] = out
    table[out] = out
    return out


def _chain(k: int, layers):
    t = layers[0]
    for lam in layers[1:]:
        t = comp_raw(k, lam, t)
    return t


def _layers(poly, c: Cell, n: int):
    """Decompose c (dim n) into canonical layers composed at level n-1."""
    if isinstance(c, Gen):
        return [c]
    if isinstance(c, Ident):
        return []
    if maxgendim(poly, c) < n:
        return []
    k = c.level
    if k == n - 1:
        return _layers(poly, c.before, n) + _layers(poly, c.after, n)
    out = []
    lf = _layers(poly, c.before, n)
    lg = _layers(poly, c.after, n)
    if lf:
        pad = canonical(poly, boundary(poly, n - 1, "-", c.after))
        out.extend(_whisker(poly, n, k, lam, pad, "after") for lam in lf)
    if lg:
        pad = canonical(poly, boundary(poly, n - 1, "+", c.before))
        out.extend(_whisker(poly, n, k, lam, pad, "before") for lam in lg)
    return out


def _parts(poly, lam: Cell, k: int, n: int):
    """View a layer as (before_pad, core, after_pad) at level k.

    Pads are returned as canonical (n-1)-cells or None.  Only pads in
    the canonical nesting Comp(k, after, Comp(k, core, before)) are
    recognized.
    """
    before = after = None
    core = lam
    if isinstance(core, Comp) and core.level == k and \
            maxgendim(poly, core.after) < n:
        after = canonical(poly, boundary(poly, n - 1, "-", core.after))
        core = core.before
    if isinstance(core, Comp) and core.level == k and \
            maxgendim(poly, core.before) < n:
        before = canonical(poly, boundary(poly, n - 1, "-", core.before))
        core = core.after
    return before, core, after


def _canon_layer(poly, n: int, k: int, before, core, after):
    t = core
    if before is not None and maxgendim(poly, before) > k:
        t = comp_raw(k, t, lift(poly, before))
    if after is not None and maxgendim(poly, after) > k:
        t = comp_raw(k, lift(poly, after), t)
    return t


def _whisker(poly, n: int, k: int, lam: Cell, padbase: Cell, side: str):
    """Compose layer `lam` (dim n) with the identity on `padbase` at level k."""
    if maxgendim(poly, padbase) <= k:
        return lam
    before, core, after = _parts(poly, lam, k, n)
    if side == "after":
        after = padbase if after is None else \
            canonical(poly, comp_raw(k, padbase, after))
    else:
        before = padbase if before is None else \
            canonical(poly, comp_raw(k, before, padbase))
    return _canon_layer(poly, n, k, before, core, after)


def _layer_gen(poly, lam: Cell, n: int):
    if isinstance(lam, Gen):
        return lam.name
    if isinstance(lam, Comp):
        g = _layer_gen(poly, lam.after, n)
        if g is None:
            g = _layer_gen(poly, lam.before, n)
        return g
    return None


def _pad_levels(poly, lam: Cell, n: int):
    levels = []
    core = lam
    while isinstance(core, Comp) and core.level < n - 1:
        b, inner, a = _parts(poly, core, core.level, n)
        if b is None and a is None:
            break
        levels.append(core.level)
        core = inner
    return levels


def _nf_comp(poly, k: int, upper, lower):
    """Normalized level-k composite of optional (n-1)-cells (None = absent)."""
    if upper is None:
        return lower
    if lower is None:
        return upper
    return normalize(poly, comp_raw(k, upper, lower))


def _sort_key(poly, lam: Cell, n: int):
    return (_layer_gen(poly, lam, n) or "", sexpr(lam))


def _try_swap(poly, lam1: Cell, lam2: Cell, n: int, depth: int = 0):
    """If the adjacent layers lam1 (first) and lam2 provably commute,
    return the pair (lam2', lam1') performing lam2's generator first.
    Return None when commutation cannot be established."""
    if depth > 8:
        return None
    if n == 2:
        return _try_swap_dim2(poly, lam1, lam2)
    levels = sorted(set(_pad_levels(poly, lam1, n) + _pad_levels(poly, lam2, n)),
                    reverse=True)
    cp = lambda x: None if x is None else canonical(poly, x)
    for k in levels:
        b1, c1, a1 = _parts(poly, lam1, k, n)
        b2, c2, a2 = _parts(poly, lam2, k, n)
        # pads compare by identity below, so take canonical representatives
        b1, a1, b2, a2 = cp(b1), cp(a1), cp(b2), cp(a2)
        if (b1 is not None or a1 is not None) and b1 is b2 and a1 is a2:
            # identical whisker context: commute inside it
            inner = _try_swap(poly, c1, c2, n, depth + 1)
            if inner is not None:
                i2, i1 = inner
                return (_canon_layer(poly, n, k, b1, i2, a1),
                        _canon_layer(poly, n, k, b1, i1, a1))
        if c1 is lam1 and c2 is lam2:
            continue
        d_minus = lambda x: canonical(poly, boundary(poly, n - 1, "-", x))
        d_plus = lambda x: canonical(poly, boundary(poly, n - 1, "+", x))
        c_comp = lambda upper, lower: cp(_nf_comp(poly, k, upper, lower))
        pn = lambda x: None if x is None or maxgendim(poly, x) <= k else x
        # core of lam1 below core of lam2 along level k
        if pn(b2) is pn(c_comp(d_plus(c1), b1)) and \
                pn(a1) is pn(c_comp(a2, d_minus(c2))):
            lam2p = _canon_layer(poly, n, k,
                                 c_comp(d_minus(c1), b1), c2, a2)
            lam1p = _canon_layer(poly, n, k, b1, c1,
                                 c_comp(a2, d_plus(c2)))
            return lam2p, lam1p
        # core of lam1 above core of lam2 along level k
        if pn(b1) is pn(c_comp(d_minus(c2), b2)) and \
                pn(a2) is pn(c_comp(a1, d_plus(c1))):
            lam2p = _canon_layer(poly, n, k, b2, c2,
                                 c_comp(a1, d_minus(c1)))
            lam1p = _canon_layer(poly, n, k,
                                 c_comp(d_plus(c2), b2), c1, a1)
            return lam2p, lam1p
    # degenerate junction: the shared (n-1)-boundary between the layers
    # is an iterated identity at some level k, so the layers interchange
    # past each other picking up whisker pads at that level
    mid = normalize(poly, boundary(poly, n - 1, "+", lam1))
    mk = maxgendim(poly, mid)
    if mk <= n - 2:
        k = mk
        pad_before = canonical(poly, boundary(poly, n - 1, "-", lam1))
        pad_after = canonical(poly, boundary(poly, n - 1, "+", lam2))
        lam2p = _whisker(poly, n, k, lam2, pad_before, "before")
        lam1p = _whisker(poly, n, k, lam1, pad_after, "after")
        return lam2p, lam1p
    return None


# --- complete swap logic for 2-cells (layers over paths) -------------------


def _as_path(poly, c: Cell):
    """A normalized 1-cell as a tuple of generator names."""
    if isinstance(c, Gen):
        return (c.name,)
    if isinstance(c, Ident):
        return ()
    return _as_path(poly, c.before) + _as_path(poly, c.after)


def _path_cell(poly, point, names):
    if not names:
        return ident(point)
    return _chain(0, [gen(nm) for nm in names])


def _path_points(poly, start_name, names):
    pts = [start_name]
    for nm in names:
        t = poly.gen_tgt(nm)
        pts.append(t.name)
    return pts


def _try_swap_dim2(poly, lam1: Cell, lam2: Cell):
    b1, c1, a1 = _parts(poly, lam1, 0, 2)
    b2, c2, a2 = _parts(poly, lam2, 0, 2)
    if not isinstance(c1, Gen) or not isinstance(c2, Gen):
        return None
    pb1 = _as_path(poly, b1) if b1 is not None else ()
    pa1 = _as_path(poly, a1) if a1 is not None else ()
    pb2 = _as_path(poly, b2) if b2 is not None else ()
    pa2 = _as_path(poly, a2) if a2 is not None else ()
    s1 = _as_path(poly, normalize(poly, boundary(poly, 1, "-", c1)))
    t1 = _as_path(poly, normalize(poly, boundary(poly, 1, "+", c1)))
    s2 = _as_path(poly, normalize(poly, boundary(poly, 1, "-", c2)))
    t2 = _as_path(poly, normalize(poly, boundary(poly, 1, "+", c2)))
    start = boundary(poly, 0, "-", lam1).name
    state0 = pb1 + s1 + pa1                    # source path of lam1
    pts0 = _path_points(poly, start, state0)

    def build(before_names, before_start, g, after_names, after_start):
        before = None if not before_names else \
            _path_cell(poly, gen(before_start), before_names)
        after = None if not after_names else \
            _path_cell(poly, gen(after_start), after_names)
        return _canon_layer(poly, 2, 0, before, g, after)

    if len(pb2) + len(s2) <= len(pb1):
        # lam2's generator acts strictly below lam1's
        rest = pb1[len(pb2) + len(s2):]
        mid = pts0[len(pb2) + len(s2)]
        lam2p = build(pb2, start, c2, rest + s1 + pa1, mid)
        nb1 = pb2 + t2 + rest
        lam1p = build(nb1, start, c1,
                      pa1, pts0[len(pb1) + len(s1)] if pa1 else start)
        return lam2p, lam1p
    if len(pb2) >= len(pb1) + len(t1):
        # lam2's generator acts strictly above lam1's
        rest = pb2[len(pb1) + len(t1):]
        nb2 = pb1 + s1 + rest
        state_end = len(pb2) + len(s2)
        # points along d+(lam1) = pb1 + t1 + pa1; reuse generator tables
        pts1 = _path_points(poly, start, pb1 + t1 + pa1)
        lam2p = build(nb2, start, c2, pa2,
                      pts1[state_end] if pa2 else start)
        lam1p = build(pb1, start, c1, rest + t2 + pa2,
                      pts0[len(pb1) + len(s1)] if (rest or t2 or pa2) else start)
        return lam2p, lam1p
    return None


def _swap_memo(poly, a: Cell, b: Cell, n: int):
    memo = poly.__dict__.setdefault("_swap_cache", {})
    key = (a, b, n)
    if key not in memo:
        memo[key] = _try_swap(poly, a, b, n)
    return memo[key]


_skey_memo = {}


def _skey(c: Cell) -> str:
    s = _skey_memo.get(c)
    if s is None:
        s = _skey_memo[c] = sexpr(c)
    return s


def _sort_layers(poly, layers, n: int):
    rem = list(layers)
    out = []
    while rem:
        cands = []
        for i in range(len(rem)):
            front = rem[i]
            rebuilt = []
            ok = True
            for j in range(i - 1, -1, -1):
                sw = _swap_memo(poly, rem[j], front, n)
                if sw is None:
                    ok = False
                    break
                front, behind = sw
                rebuilt.append(behind)
            if not ok:
                continue
            rebuilt.reverse()
            cands.append((_sort_key(poly, front, n), front,
                          rebuilt + rem[i + 1:]))
        kmin = min(k for k, _, _ in cands)
        ties = [c for c in cands if c[0] == kmin]
        if len(ties) > 1:
            # tie-break on the tail: swap-equivalent fronts can leave the
            # remaining layers in different whisker positions
            ties.sort(key=lambda c: tuple(_skey(l) for l in c[2]))
        _, front, rem = ties[0]
        out.append(front)
    return out


def _canon_pads(poly, lam: Cell, n: int):
    """Rebuild a layer with every whisker pad replaced by its canonical
    representative.  Normal forms of pads above dimension 1 are not
    unique, so equal layers can otherwise differ textually."""
    if not isinstance(lam, Comp) or lam.level >= n - 1:
        return lam
    memo = poly.__dict__.setdefault("_cpad_cache", {})
    key = (lam, n)
    out = memo.get(key)
    if out is not None:
        return out
    k = lam.level
    b, core, a = _parts(poly, lam, k, n)
    if b is None and a is None:
        out = lam
    else:
        out = _canon_layer(poly, n, k,
                           None if b is None else canonical(poly, b),
                           _canon_pads(poly, core, n),
                           None if a is None else canonical(poly, a))
    memo[key] = out
    memo[(out, n)] = out
    return out


def _orbit_min(poly, layers, n: int, cap: int):
    """Least chain (by printed form) in the bounded swap orbit of `layers`.
    Falls back to the input when the chain is long or the orbit exceeds
    the cap; the fallback is still deterministic per chain."""
    if len(layers) <= 1 or len(layers) > 6:
        return layers
    start = tuple(layers)
    seen = {start}
    front = [start]
    best = start
    bestkey = tuple(_skey(l) for l in start)
    while front:
        if len(seen) > cap:
            return tuple(layers)
        s = front.pop()
        for i in range(len(s) - 1):
            sw = _swap_memo(poly, s[i], s[i + 1], n)
            if sw is None:
                continue
            t = s[:i] + (_canon_pads(poly, sw[0], n),
                         _canon_pads(poly, sw[1], n)) + s[i + 2:]
            if t in seen:
                continue
            seen.add(t)
            front.append(t)
            key = tuple(_skey(l) for l in t)
            if key < bestkey:
                best, bestkey = t, key
    return best


def canonical(poly, c: Cell, cap: int = 720) -> Cell:
    """Canonical representative used by the equality tier: the normal
    form with pads canonicalized recursively and, when the layer-swap
    orbit fits in the budget, the least chain of that orbit."""
    table = _cache(poly, "canon")
    out = table.get(c)
    if out is not None:
        return out
    nf = normalize(poly, c)
    out = table.get(nf)
    if out is None:
        n = dim(poly, c)
        if n <= 1:
            out = nf
        else:
            ls = _layers(poly, nf, n)
            if not ls:
                out = lift(poly, canonical(
                    poly, boundary(poly, n - 1, "-", nf), cap))
            else:
                ls = [_canon_pads(poly, lam, n) for lam in ls]
                out = _chain(n - 1, list(_orbit_min(poly, ls, n, cap)))
    table[c] = out
    table[nf] = out
    table[out] = out
    return out


# ---------------------------------------------------------------------------
# invariants / equality


def top_generator_multiset(poly, c: Cell) -> Counter:
    n = dim(poly, c)
    out = Counter()

    def walk(t):
        if isinstance(t, Gen):
            if poly.gen_dim(t.name) == n:
                out[t.name] += 1
        elif isinstance(t, Ident):
            walk(t.base)
        elif isinstance(t, Comp):
            walk(t.after)
            walk(t.before)

    walk(c)
    return out


@dataclass(frozen=True)
class EqVerdict:
    kind: str              # "equal" | "unequal" | "unknown"
    reason: str = ""

    def __bool__(self):
        return self.kind == "equal"


EQUAL = EqVerdict("equal")


def _orbit_meet(poly, a: Cell, b: Cell, n: int, cap: int = 4000):
    """Search the adjacent-swap orbit of one layer chain for the other.

    Best-first search guided by the number of positions whose layer
    already matches the target.  Returns True if the chains are connected
    (the cells are equal), False if the orbit was exhausted without
    reaching the target, None if the cap was reached.
    """
    A = tuple(_layers(poly, a, n))
    B = tuple(_layers(poly, b, n))
    if len(A) != len(B):
        return False
    if A == B:
        return True

    def miss(s):
        return sum(1 for x, y in zip(s, A) if x is not y)

    seen = {B}
    heap = [(miss(B), 0, B)]
    tick = 0
    while heap:
        if len(seen) > cap:
            return None
        _, _, s = heapq.heappop(heap)
        for i in range(len(s) - 1):
            sw = _swap_memo(poly, s[i], s[i + 1], n)
            if sw is None:
                continue
            t = s[:i] + (_canon_pads(poly, sw[0], n),
                         _canon_pads(poly, sw[1], n)) + s[i + 2:]
            if t == A:
                return True
            if t in seen:
                continue
            seen.add(t)
            tick += 1
            heapq.heappush(heap, (miss(t), tick, t))
    return False


def cells_equal(poly, a: Cell, b: Cell) -> EqVerdict:
    da, db = dim(poly, a), dim(poly, b)
    if da != db:
        return EqVerdict("unequal", f"dimension: {da} vs {db}")
    na, nb = normalize(poly, a), normalize(poly, b)
    if na is nb:
        return EQUAL
    table = _cache(poly, "eq")
    v = table.get((na, nb))
    if v is None:
        v = _cells_equal_nf(poly, na, nb, da)
        table[(na, nb)] = v
        table[(nb, na)] = v
    return v


def _cells_equal_nf(poly, a: Cell, b: Cell, da: int) -> EqVerdict:
    na, nb = a, b
    ma, mb = top_generator_multiset(poly, a), top_generator_multiset(poly, b)
    if ma != mb:
        return EqVerdict("unequal", "top-dimensional generator multiset")
    if da <= 1:
        return EqVerdict("unequal", "normal form (complete in dimension <= 1)")
    for k in range(da):
        for s in ("-", "+"):
            v = cells_equal(poly, boundary(poly, k, s, a),
                            boundary(poly, k, s, b))
            if v.kind == "unequal":
                return EqVerdict("unequal", f"boundary d{s}_{k}: {v.reason}")
    ca, cb = canonical(poly, na), canonical(poly, nb)
    if ca is cb:
        return EQUAL
    meet = _orbit_meet(poly, ca, cb, da)
    if meet is True:
        return EQUAL
    if meet is False and da == 2:
        return EqVerdict("unequal", "layer-swap orbit (complete in dimension 2)")
    return EqVerdict("unknown", "normal forms differ, no separating invariant")
