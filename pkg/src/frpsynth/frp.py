"""Core FRP combinators over discretized traces.

Event operations map fixed-length cell vectors to cell vectors; behavior
operations additionally thread an initial value. Simultaneity is resolved
per timestep: mergeE is left-biased, snapshotE and startsWith see same-step
events. Stateful operations (fold, delay, timers, latching) are the ones
whose output at t depends on cells before t.

Value-level type mismatches (an int predicate on a bool payload, a non-int
delay count) yield ERROR for the whole register, poisoning downstream use.
"""
from __future__ import annotations

from .programs import C_ANY, C_INT, K_BEHAVIOR, K_STREAM, OpSpec, PredFamily
from .traces import (
    ERROR,
    FALSE,
    INT,
    TRUE,
    Behavior,
    EventStream,
    Value,
    is_error,
    truthy,
    vbool,
    vint,
)


# ---------------------------------------------------------------------------
# Predicate families
# ---------------------------------------------------------------------------

def _int_unary(fn):
    def make(c):
        cv = c.val

        def pred(v):
            if v.tag != INT:
                return ERROR
            return vint(fn(v.val, cv))

        return pred

    return make


def _int_cmp(fn):
    def make(c):
        cv = c.val

        def pred(v):
            if v.tag != INT:
                return ERROR
            return vbool(fn(v.val, cv))

        return pred

    return make


def _int_two_bound(fn):
    def make(c):
        c1, c2 = c.val

        def pred(v):
            if v.tag != INT:
                return ERROR
            return vbool(fn(v.val, c1, c2))

        return pred

    return make


def _int2(fn):
    def make(_):
        def pred(a, b):
            if a.tag != INT or b.tag != INT:
                return ERROR
            return vint(fn(a.val, b.val))

        return pred

    return make


FRP_PREDS = {}


def _pred(name, table, const, make, show):
    FRP_PREDS[name] = PredFamily(name, table, const, make, show)


_pred("add-c", "int", "int", _int_unary(lambda i, c: i + c), lambda c: "(+ i %d)" % c.val)
_pred("sub-c", "int", "int", _int_unary(lambda i, c: i - c), lambda c: "(- i %d)" % c.val)
_pred("rsub-c", "int", "int", _int_unary(lambda i, c: c - i), lambda c: "(- %d i)" % c.val)
_pred("mul-c", "int", "int", _int_unary(lambda i, c: i * c), lambda c: "(* i %d)" % c.val)

_pred("eq-c", "bool", "int", _int_cmp(lambda i, c: i == c), lambda c: "(= i %d)" % c.val)
_pred("le-c", "bool", "int", _int_cmp(lambda i, c: i <= c), lambda c: "(<= i %d)" % c.val)
_pred("ge-c", "bool", "int", _int_cmp(lambda i, c: i >= c), lambda c: "(>= i %d)" % c.val)
_pred("lt-c", "bool", "int", _int_cmp(lambda i, c: i < c), lambda c: "(< i %d)" % c.val)
_pred("gt-c", "bool", "int", _int_cmp(lambda i, c: i > c), lambda c: "(> i %d)" % c.val)
_pred(
    "ge-or-le",
    "bool",
    "pair",
    _int_two_bound(lambda i, c1, c2: i >= c1 or i <= c2),
    lambda c: "(or (>= i %d) (<= i %d))" % c.val,
)
_pred(
    "ge-and-le",
    "bool",
    "pair",
    _int_two_bound(lambda i, c1, c2: i >= c1 and i <= c2),
    lambda c: "(and (>= i %d) (<= i %d))" % c.val,
)
# Truthiness of the value itself; not in the comparison grammar but used by
# hand-written programs that gate on boolean payloads.
_pred("id", "bool", None, lambda _c: (lambda v: v), lambda _c: "(lambda (i) i)")

_pred("add", "int2", None, _int2(lambda a, b: a + b), lambda _c: "(+ i acc)")
_pred("sub", "int2", None, _int2(lambda a, b: a - b), lambda _c: "(- i acc)")
_pred("min", "int2", None, _int2(min), lambda _c: "(min i acc)")
_pred("max", "int2", None, _int2(max), lambda _c: "(max i acc)")


# ---------------------------------------------------------------------------
# Event stream operations
# ---------------------------------------------------------------------------

def e_identity(ctx, pred, const, args):
    return args[0]


def e_once(ctx, pred, const, args):
    out = []
    seen = False
    for c in args[0].cells:
        if c is not None and not seen:
            out.append(c)
            seen = True
        else:
            out.append(None)
    return EventStream(tuple(out))


def e_zero(ctx, pred, const, args):
    return EventStream((None,) * ctx.length)


def e_map(ctx, pred, const, args):
    out = []
    for c in args[0].cells:
        if c is None:
            out.append(None)
        else:
            r = pred(c)
            if is_error(r):
                return ERROR
            out.append(r)
    return EventStream(tuple(out))


def e_merge(ctx, pred, const, args):
    a, b = args
    return EventStream(
        tuple(ca if ca is not None else cb for ca, cb in zip(a.cells, b.cells))
    )


def e_filter(ctx, pred, const, args):
    out = []
    for c in args[0].cells:
        if c is None:
            out.append(None)
        else:
            r = pred(c)
            if is_error(r):
                return ERROR
            out.append(c if truthy(r) else None)
    return EventStream(tuple(out))


def e_if(ctx, pred, const, args):
    g, a, b = args
    out = []
    for t, gc in enumerate(g.cells):
        if gc is None:
            out.append(None)
        elif truthy(gc):
            out.append(a.cells[t])
        else:
            out.append(b.cells[t])
    return EventStream(tuple(out))


def e_constant(ctx, pred, const, args):
    return EventStream(
        tuple(const if c is not None else None for c in args[0].cells)
    )


def e_collect(ctx, pred, const, args):
    acc = const
    out = []
    for c in args[0].cells:
        if c is None:
            out.append(None)
        else:
            acc = pred(c, acc)
            if is_error(acc):
                return ERROR
            out.append(acc)
    return EventStream(tuple(out))


def e_filter_repeats(ctx, pred, const, args):
    out = []
    last = None
    emitted = False
    for c in args[0].cells:
        if c is not None and (not emitted or c != last):
            out.append(c)
            last = c
            emitted = True
        else:
            out.append(None)
    return EventStream(tuple(out))


def e_snapshot(ctx, pred, const, args):
    s, b = args
    return EventStream(
        tuple(b.cells[t] if c is not None else None for t, c in enumerate(s.cells))
    )


def e_delay(ctx, pred, const, args):
    k = const.val
    if k < 0:
        return ERROR
    n = len(args[0].cells)
    out = [None] * n
    for t, c in enumerate(args[0].cells):
        if c is not None and t + k < n:
            out[t + k] = c
    return EventStream(tuple(out))


def e_timer(ctx, pred, const, args):
    # The stream operand only fixes arity; ticks depend on the clock alone.
    n = const.val
    length = len(args[0].cells)
    if n <= 0:
        return EventStream((None,) * length)
    return EventStream(
        tuple(vint(t) if t > 0 and t % n == 0 else None for t in range(length))
    )


def _bool2(fn):
    def op(ctx, pred, const, args):
        a, b = args
        out = []
        for ca, cb in zip(a.cells, b.cells):
            if ca is None or cb is None:
                out.append(None)
            else:
                out.append(vbool(fn(truthy(ca), truthy(cb))))
        return EventStream(tuple(out))

    return op


e_and = _bool2(lambda x, y: x and y)
e_or = _bool2(lambda x, y: x or y)


def e_not(ctx, pred, const, args):
    return EventStream(
        tuple(
            None if c is None else vbool(not truthy(c)) for c in args[0].cells
        )
    )


def e_changes(ctx, pred, const, args):
    b = args[0]
    out = []
    prev = b.init
    for c in b.cells:
        out.append(c if c != prev else None)
        prev = c
    return EventStream(tuple(out))


# ---------------------------------------------------------------------------
# Behavior operations
# ---------------------------------------------------------------------------

def b_starts_with(ctx, pred, const, args):
    cur = const
    out = []
    for c in args[0].cells:
        if c is not None:
            cur = c
        out.append(cur)
    return Behavior(const, tuple(out))


def b_constant(ctx, pred, const, args):
    return Behavior(const, (const,) * ctx.length)


def b_delay(ctx, pred, const, args):
    k = const.val
    if k < 0:
        return ERROR
    b = args[0]
    cells = tuple(
        b.cells[t - k] if t >= k else b.init for t in range(len(b.cells))
    )
    return Behavior(b.init, cells)


def b_lift(ctx, pred, const, args):
    b = args[0]
    init = pred(b.init)
    if is_error(init):
        return ERROR
    out = []
    for c in b.cells:
        r = pred(c)
        if is_error(r):
            return ERROR
        out.append(r)
    return Behavior(init, tuple(out))


def b_if(ctx, pred, const, args):
    g, a, b = args
    init = a.init if truthy(g.init) else b.init
    cells = tuple(
        a.cells[t] if truthy(g.cells[t]) else b.cells[t]
        for t in range(len(g.cells))
    )
    return Behavior(init, cells)


def b_timer(ctx, pred, const, args):
    n = const.val
    length = len(args[0].cells)
    last = 0
    out = []
    for t in range(length):
        if n > 0 and t > 0 and t % n == 0:
            last = t
        out.append(vint(last))
    return Behavior(vint(0), tuple(out))


def _bool2_b(fn):
    def op(ctx, pred, const, args):
        a, b = args
        init = vbool(fn(truthy(a.init), truthy(b.init)))
        cells = tuple(
            vbool(fn(truthy(ca), truthy(cb)))
            for ca, cb in zip(a.cells, b.cells)
        )
        return Behavior(init, cells)

    return op


b_and = _bool2_b(lambda x, y: x and y)
b_or = _bool2_b(lambda x, y: x or y)


def b_not(ctx, pred, const, args):
    b = args[0]
    return Behavior(
        vbool(not truthy(b.init)),
        tuple(vbool(not truthy(c)) for c in b.cells),
    )


# ---------------------------------------------------------------------------
# Operation registry (order matches the surface grammar; sketch opcode
# indices follow this order unless a permuted table is supplied)
# ---------------------------------------------------------------------------

S = K_STREAM
B = K_BEHAVIOR

FRP_OPS = {}


def _op(name, operands, result, pred_table, const, stateful, fn):
    FRP_OPS[name] = OpSpec(name, "frp", operands, result, pred_table, const, stateful, fn)


_op("identityE", (S,), S, None, None, False, e_identity)
_op("onceE", (S,), S, None, None, True, e_once)
_op("zeroE", (), S, None, None, False, e_zero)
_op("mapE", (S,), S, "int", None, False, e_map)
_op("mergeE", (S, S), S, None, None, False, e_merge)
_op("filterE", (S,), S, "bool", None, False, e_filter)
_op("ifE", (S, S, S), S, None, None, False, e_if)
_op("constantE", (S,), S, None, C_ANY, False, e_constant)
_op("collectE", (S,), S, "int2", C_ANY, True, e_collect)
_op("filterRepeatsE", (S,), S, None, None, True, e_filter_repeats)
_op("snapshotE", (S, B), S, None, None, False, e_snapshot)
_op("delayE", (S,), S, None, C_INT, True, e_delay)
_op("timerE", (S,), S, None, C_INT, True, e_timer)
_op("andE", (S, S), S, None, None, False, e_and)
_op("orE", (S, S), S, None, None, False, e_or)
_op("notE", (S,), S, None, None, False, e_not)
_op("changes", (B,), S, None, None, True, e_changes)

_op("startsWith", (S,), B, None, C_ANY, True, b_starts_with)
_op("constantB", (), B, None, C_ANY, False, b_constant)
_op("delayB", (B,), B, None, C_INT, True, b_delay)
_op("liftB", (B,), B, "int", None, False, b_lift)
_op("ifB", (B, B, B), B, None, None, False, b_if)
_op("timerB", (B,), B, None, C_INT, True, b_timer)
_op("andB", (B, B), B, None, None, False, b_and)
_op("orB", (B, B), B, None, None, False, b_or)
_op("notB", (B,), B, None, None, False, b_not)

DEFAULT_OP_ORDER = tuple(FRP_OPS)

STATEFUL_OPS = frozenset(n for n, s in FRP_OPS.items() if s.stateful)


# ---------------------------------------------------------------------------
# Default sketch tables
# ---------------------------------------------------------------------------

def default_const_table(ints=(0, 1, 2, 3, 4, 5), bools=True) -> tuple:
    consts = []
    if bools:
        consts.extend([FALSE, TRUE])
    consts.extend(vint(n) for n in ints)
    return tuple(consts)


def default_int_pred_table(consts=(0, 1, 2, 3, 4, 5)) -> tuple:
    """(family, constant) entries; multiplication stays out of sketch tables."""
    out = []
    for fam in ("add-c", "sub-c", "rsub-c"):
        out.extend((fam, vint(c)) for c in consts)
    return tuple(out)


def default_bool_pred_table(consts=(0, 1, 2, 3, 4, 5), two_bound=True) -> tuple:
    out = []
    for fam in ("le-c", "ge-c", "lt-c", "gt-c"):
        out.extend((fam, vint(c)) for c in consts)
    if two_bound:
        for fam in ("ge-or-le", "ge-and-le"):
            out.extend(
                (fam, Value("pair", (c1, c2))) for c1 in consts for c2 in consts
            )
    return tuple(out)


def default_int2_pred_table() -> tuple:
    return (("add", None), ("sub", None), ("min", None), ("max", None))
