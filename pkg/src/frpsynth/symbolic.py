"""Symbolic evaluation of both DSLs over bounded symbolic traces.

Terms form a small integer/boolean expression language with constant folding,
a concrete evaluator (used to check agreement with the concrete interpreters
by substitution) and an SMT-LIB 2 rendering hook. Nonlinear arithmetic never
appears as a term operator; it is a Lookup node over the same bounded tables
the concrete path uses, so the two paths cannot diverge.

Symbolic payload values are tagged unions (int/bool/pair) so branch-mixing
operations like ifE stay expressible. Every register evaluation returns the
value alongside an `ok` term; `ok` false means the register poisons (the
symbolic counterpart of ERROR).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import listdsl
from .programs import K_BEHAVIOR, K_INT, K_LIST, K_STREAM, Program
from .traces import (
    BOOL,
    ERROR,
    INT,
    PAIR,
    Behavior,
    EventStream,
    Trace,
    Value,
    is_error,
    vbool,
    vint,
    vpair,
)

# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

I_SORT = "Int"
B_SORT = "Bool"


class Term:
    __slots__ = ("op", "args", "val")

    def __init__(self, op, args=(), val=None):
        self.op = op
        self.args = args
        self.val = val

    def __repr__(self):
        if self.op in ("iconst", "bconst"):
            return repr(self.val)
        if self.op == "var":
            return self.val
        return "(%s %s)" % (self.op, " ".join(map(repr, self.args)))


TRUE_T = Term("bconst", val=True)
FALSE_T = Term("bconst", val=False)
ZERO_T = Term("iconst", val=0)

_ICONST_CACHE = {0: ZERO_T}


def iconst(n: int) -> Term:
    t = _ICONST_CACHE.get(n)
    if t is None:
        t = Term("iconst", val=n)
        if -64 <= n <= 64:
            _ICONST_CACHE[n] = t
    return t


def bconst(b: bool) -> Term:
    return TRUE_T if b else FALSE_T


def ivar(name: str) -> Term:
    return Term("var", val=name, args=(I_SORT,))


def bvar(name: str) -> Term:
    return Term("var", val=name, args=(B_SORT,))


def is_const(t: Term) -> bool:
    return t.op in ("iconst", "bconst")


def add(a: Term, b: Term) -> Term:
    if a.op == "iconst" and b.op == "iconst":
        return iconst(a.val + b.val)
    if a.op == "iconst" and a.val == 0:
        return b
    if b.op == "iconst" and b.val == 0:
        return a
    return Term("add", (a, b))


def sub(a: Term, b: Term) -> Term:
    if a.op == "iconst" and b.op == "iconst":
        return iconst(a.val - b.val)
    if b.op == "iconst" and b.val == 0:
        return a
    return Term("sub", (a, b))


def neg(a: Term) -> Term:
    if a.op == "iconst":
        return iconst(-a.val)
    return Term("neg", (a,))


def mulc(c: int, a: Term) -> Term:
    if a.op == "iconst":
        return iconst(c * a.val)
    if c == 0:
        return ZERO_T
    if c == 1:
        return a
    return Term("mulc", (a,), c)


def eq(a: Term, b: Term) -> Term:
    if a is b:
        return TRUE_T
    if is_const(a) and is_const(b):
        return bconst(a.val == b.val)
    return Term("eq", (a, b))


def le(a: Term, b: Term) -> Term:
    if a is b:
        return TRUE_T
    if a.op == "iconst" and b.op == "iconst":
        return bconst(a.val <= b.val)
    return Term("le", (a, b))


def lt(a: Term, b: Term) -> Term:
    if a is b:
        return FALSE_T
    if a.op == "iconst" and b.op == "iconst":
        return bconst(a.val < b.val)
    return Term("lt", (a, b))


def not_(a: Term) -> Term:
    if a.op == "bconst":
        return bconst(not a.val)
    if a.op == "not":
        return a.args[0]
    return Term("not", (a,))


def and_(*ts) -> Term:
    flat = []
    for t in ts:
        if t.op == "bconst":
            if not t.val:
                return FALSE_T
            continue
        if t.op == "and":
            flat.extend(t.args)
        else:
            flat.append(t)
    if not flat:
        return TRUE_T
    if len(flat) == 1:
        return flat[0]
    return Term("and", tuple(flat))


def or_(*ts) -> Term:
    flat = []
    for t in ts:
        if t.op == "bconst":
            if t.val:
                return TRUE_T
            continue
        if t.op == "or":
            flat.extend(t.args)
        else:
            flat.append(t)
    if not flat:
        return FALSE_T
    if len(flat) == 1:
        return flat[0]
    return Term("or", tuple(flat))


def implies(a: Term, b: Term) -> Term:
    return or_(not_(a), b)


def ite(c: Term, a: Term, b: Term) -> Term:
    if c.op == "bconst":
        return a if c.val else b
    if a is b:
        return a
    if is_const(a) and is_const(b) and a.val == b.val and a.op == b.op:
        return a
    return Term("ite", (c, a, b))


def divisible(n: int, a: Term) -> Term:
    if a.op == "iconst":
        return bconst(a.val % n == 0)
    return Term("divisible", (a,), n)


def lookup_term(kind: str, bound: int, a: Term, b: Optional[Term] = None,
                divisor: Optional[int] = None) -> Term:
    """Bounded table lookup; evaluation uses the concrete tables, SMT emission
    expands to a key-wise case split over the same bounded domain."""
    args = (a,) if b is None else (a, b)
    if all(x.op == "iconst" for x in args):
        val = _lookup_concrete(kind, bound, [x.val for x in args], divisor)
        if not is_error(val):
            return iconst(val)
        # leave the node symbolic; its ok-guard is handled by the caller
    return Term("lookup", args, (kind, bound, divisor))


_TABLES_BY_BOUND = {listdsl.DEFAULT_TABLE_BOUND: listdsl.DEFAULT_TABLES}


def tables_for_bound(bound: int) -> listdsl.TableSet:
    ts = _TABLES_BY_BOUND.get(bound)
    if ts is None:
        ts = listdsl.build_tables(bound)
        _TABLES_BY_BOUND[bound] = ts
    return ts


def _lookup_concrete(kind, bound, vals, divisor):
    ts = tables_for_bound(bound)
    if kind == "multiply":
        return listdsl.lookup_multiply(ts.multiply, vals[0], vals[1])
    if kind == "square":
        return listdsl.lookup_square(ts.square, vals[0])
    if kind == "divide":
        return listdsl.lookup_divide(ts.divide, vals[0], divisor)
    if kind == "remainder":
        return listdsl.lookup_remainder(ts.remainder, vals[0], divisor)
    raise ValueError(kind)


def lookup_in_bound(kind: str, bound: int, a: Term, b: Optional[Term] = None) -> Term:
    conds = [and_(le(iconst(-bound), a), le(a, iconst(bound)))]
    if b is not None:
        conds.append(and_(le(iconst(-bound), b), le(b, iconst(bound))))
    return and_(*conds)


def eval_term(t: Term, env: dict, memo: Optional[dict] = None):
    """Evaluate under an assignment of variable names to ints/bools."""
    if memo is None:
        memo = {}
    key = id(t)
    if key in memo:
        return memo[key]
    op = t.op
    if op in ("iconst", "bconst"):
        v = t.val
    elif op == "var":
        v = env[t.val]
    elif op == "add":
        v = eval_term(t.args[0], env, memo) + eval_term(t.args[1], env, memo)
    elif op == "sub":
        v = eval_term(t.args[0], env, memo) - eval_term(t.args[1], env, memo)
    elif op == "neg":
        v = -eval_term(t.args[0], env, memo)
    elif op == "mulc":
        v = t.val * eval_term(t.args[0], env, memo)
    elif op == "ite":
        v = (
            eval_term(t.args[1], env, memo)
            if eval_term(t.args[0], env, memo)
            else eval_term(t.args[2], env, memo)
        )
    elif op == "eq":
        v = eval_term(t.args[0], env, memo) == eval_term(t.args[1], env, memo)
    elif op == "le":
        v = eval_term(t.args[0], env, memo) <= eval_term(t.args[1], env, memo)
    elif op == "lt":
        v = eval_term(t.args[0], env, memo) < eval_term(t.args[1], env, memo)
    elif op == "not":
        v = not eval_term(t.args[0], env, memo)
    elif op == "divisible":
        v = eval_term(t.args[0], env, memo) % t.val == 0
    elif op == "and":
        v = all(eval_term(a, env, memo) for a in t.args)
    elif op == "or":
        v = any(eval_term(a, env, memo) for a in t.args)
    elif op == "lookup":
        kind, bound, divisor = t.val
        vals = [eval_term(a, env, memo) for a in t.args]
        r = _lookup_concrete(kind, bound, vals, divisor)
        # out-of-bound lookups are guarded by ok terms; give a total default
        v = 0 if is_error(r) else r
    else:
        raise ValueError("unknown term op %r" % op)
    memo[key] = v
    return v


# ---------------------------------------------------------------------------
# Symbolic tagged values
# ---------------------------------------------------------------------------

TAG_INT = 0
TAG_BOOL = 1
TAG_PAIR = 2

_TAG_CODES = {INT: TAG_INT, BOOL: TAG_BOOL, PAIR: TAG_PAIR}


@dataclass(frozen=True)
class SymValue:
    tag: Term
    i: Term
    b: Term
    x: Term
    y: Term


_DUMMY = ZERO_T


def sv_int(t: Term) -> SymValue:
    return SymValue(iconst(TAG_INT), t, FALSE_T, _DUMMY, _DUMMY)


def sv_bool(t: Term) -> SymValue:
    return SymValue(iconst(TAG_BOOL), _DUMMY, t, _DUMMY, _DUMMY)


def sv_pair(x: Term, y: Term) -> SymValue:
    return SymValue(iconst(TAG_PAIR), _DUMMY, FALSE_T, x, y)


def sv_const(v: Value) -> SymValue:
    if v.tag == INT:
        return sv_int(iconst(v.val))
    if v.tag == BOOL:
        return sv_bool(bconst(v.val))
    return sv_pair(iconst(v.val[0]), iconst(v.val[1]))


def sv_ite(c: Term, a: SymValue, b: SymValue) -> SymValue:
    if c.op == "bconst":
        return a if c.val else b
    return SymValue(
        ite(c, a.tag, b.tag),
        ite(c, a.i, b.i),
        ite(c, a.b, b.b),
        ite(c, a.x, b.x),
        ite(c, a.y, b.y),
    )


def sv_truthy(v: SymValue) -> Term:
    return or_(not_(eq(v.tag, iconst(TAG_BOOL))), v.b)


def sv_eq(a: SymValue, b: SymValue) -> Term:
    same_tag = eq(a.tag, b.tag)
    payload = and_(
        implies(eq(a.tag, iconst(TAG_INT)), eq(a.i, b.i)),
        implies(eq(a.tag, iconst(TAG_BOOL)), eq(a.b, b.b)),
        implies(eq(a.tag, iconst(TAG_PAIR)), and_(eq(a.x, b.x), eq(a.y, b.y))),
    )
    return and_(same_tag, payload)


def sv_concrete(v: SymValue, env: dict, memo: dict) -> Value:
    tag = eval_term(v.tag, env, memo)
    if tag == TAG_INT:
        return vint(eval_term(v.i, env, memo))
    if tag == TAG_BOOL:
        return vbool(eval_term(v.b, env, memo))
    return vpair(eval_term(v.x, env, memo), eval_term(v.y, env, memo))


# Symbolic signals ---------------------------------------------------------


@dataclass(frozen=True)
class SymStream:
    cells: tuple  # of (presence Term, SymValue)


@dataclass(frozen=True)
class SymBehavior:
    init: SymValue
    cells: tuple  # of SymValue


@dataclass(frozen=True)
class SymInt:
    term: Term


@dataclass(frozen=True)
class SymList:
    length: Term
    elems: tuple  # of Term, fixed capacity
    capacity: int


def lift_value(v: Value) -> SymValue:
    return sv_const(v)


def lift_signal(sig):
    if isinstance(sig, EventStream):
        return SymStream(
            tuple(
                (FALSE_T, sv_int(ZERO_T)) if c is None else (TRUE_T, sv_const(c))
                for c in sig.cells
            )
        )
    if isinstance(sig, Behavior):
        return SymBehavior(sv_const(sig.init), tuple(sv_const(c) for c in sig.cells))
    if isinstance(sig, int) and not isinstance(sig, bool):
        return SymInt(iconst(sig))
    if isinstance(sig, tuple):
        return SymList(iconst(len(sig)), tuple(iconst(x) for x in sig), len(sig))
    raise TypeError("cannot lift %r" % (sig,))


def concrete_stream(s: SymStream, env: dict, memo: dict) -> EventStream:
    out = []
    for p, v in s.cells:
        out.append(sv_concrete(v, env, memo) if eval_term(p, env, memo) else None)
    return EventStream(tuple(out))


def concrete_signal(sig, env: dict, memo: Optional[dict] = None):
    if memo is None:
        memo = {}
    if isinstance(sig, SymStream):
        return concrete_stream(sig, env, memo)
    if isinstance(sig, SymBehavior):
        return Behavior(
            sv_concrete(sig.init, env, memo),
            tuple(sv_concrete(c, env, memo) for c in sig.cells),
        )
    if isinstance(sig, SymInt):
        return eval_term(sig.term, env, memo)
    if isinstance(sig, SymList):
        n = eval_term(sig.length, env, memo)
        return tuple(eval_term(e, env, memo) for e in sig.elems[:n])
    raise TypeError(sig)


# ---------------------------------------------------------------------------
# Fresh symbolic inputs
# ---------------------------------------------------------------------------

@dataclass
class SymbolicInput:
    """A fresh-variable trace plus the bookkeeping to bind concrete traces."""

    env: dict  # port name -> symbolic signal
    variables: list  # of (Term, lo, hi) for ints / (Term,) for bools
    range_constraints: list  # of Term


def symbolic_stream_input(name: str, length: int, tag: str, bound: int,
                          si: SymbolicInput) -> SymStream:
    cells = []
    for t in range(length):
        p = bvar("%s.p%d" % (name, t))
        si.variables.append(p)
        if tag == INT:
            v = ivar("%s.v%d" % (name, t))
            si.variables.append(v)
            si.range_constraints.append(
                and_(le(iconst(-bound), v), le(v, iconst(bound)))
            )
            sv = sv_int(v)
        elif tag == BOOL:
            v = bvar("%s.v%d" % (name, t))
            si.variables.append(v)
            sv = sv_bool(v)
        else:
            x = ivar("%s.x%d" % (name, t))
            y = ivar("%s.y%d" % (name, t))
            si.variables.extend([x, y])
            for v in (x, y):
                si.range_constraints.append(
                    and_(le(iconst(-bound), v), le(v, iconst(bound)))
                )
            sv = sv_pair(x, y)
        cells.append((p, sv))
    return SymStream(tuple(cells))


def symbolic_behavior_input(name: str, length: int, tag: str, bound: int,
                            si: SymbolicInput) -> SymBehavior:
    def mk(label):
        if tag == INT:
            v = ivar("%s.%s" % (name, label))
            si.variables.append(v)
            si.range_constraints.append(
                and_(le(iconst(-bound), v), le(v, iconst(bound)))
            )
            return sv_int(v)
        if tag == BOOL:
            v = bvar("%s.%s" % (name, label))
            si.variables.append(v)
            return sv_bool(v)
        x = ivar("%s.%sx" % (name, label))
        y = ivar("%s.%sy" % (name, label))
        si.variables.extend([x, y])
        for v in (x, y):
            si.range_constraints.append(
                and_(le(iconst(-bound), v), le(v, iconst(bound)))
            )
        return sv_pair(x, y)

    init = mk("init")
    cells = tuple(mk("v%d" % t) for t in range(length))
    return SymBehavior(init, cells)


def bind_trace(trace: Trace, ports_tags: dict) -> dict:
    """Assignment mapping the symbolic input variables to a concrete trace."""
    env = {}
    for name, sig in trace.ports.items():
        tag = ports_tags[name]
        if isinstance(sig, EventStream):
            for t, c in enumerate(sig.cells):
                env["%s.p%d" % (name, t)] = c is not None
                if tag == INT:
                    env["%s.v%d" % (name, t)] = c.val if c is not None else 0
                elif tag == BOOL:
                    env["%s.v%d" % (name, t)] = c.val if c is not None else False
                else:
                    env["%s.x%d" % (name, t)] = c.val[0] if c is not None else 0
                    env["%s.y%d" % (name, t)] = c.val[1] if c is not None else 0
        else:
            def put(label, v):
                if tag == PAIR:
                    env["%s.%sx" % (name, label)] = v.val[0]
                    env["%s.%sy" % (name, label)] = v.val[1]
                else:
                    env["%s.%s" % (name, label)] = v.val

            put("init", sig.init)
            for t, c in enumerate(sig.cells):
                put("v%d" % t, c)
    return env


def bind_inputs(concrete: dict, tags: dict, list_capacity: int = 5) -> dict:
    """Like bind_trace but for arbitrary input kinds (ints, lists, signals)."""
    env = {}
    for name, sig in concrete.items():
        if isinstance(sig, (EventStream, Behavior)):
            env.update(
                bind_trace(_one_port_trace(name, sig),
                           {name: tags.get(name, INT)})
            )
        elif isinstance(sig, bool):
            raise TypeError("bare bool input")
        elif isinstance(sig, int):
            env["%s.n" % name] = sig
        elif isinstance(sig, tuple):
            env["%s.len" % name] = len(sig)
            for i in range(list_capacity):
                env["%s.e%d" % (name, i)] = sig[i] if i < len(sig) else 0
        else:
            raise TypeError(sig)
    return env


def _one_port_trace(name, sig):
    n = len(sig.cells)
    return Trace(n, {name: sig})


# ---------------------------------------------------------------------------
# Symbolic predicates
# ---------------------------------------------------------------------------

def _sym_int_unary(fn):
    def apply(v: SymValue, c: Value):
        ok = eq(v.tag, iconst(TAG_INT))
        return sv_int(fn(v.i, c.val)), ok

    return apply


def _sym_int_cmp(fn):
    def apply(v: SymValue, c: Value):
        ok = eq(v.tag, iconst(TAG_INT))
        return sv_bool(fn(v.i, c.val)), ok

    return apply


def _sym_two_bound(fn):
    def apply(v: SymValue, c: Value):
        c1, c2 = c.val
        ok = eq(v.tag, iconst(TAG_INT))
        return sv_bool(fn(v.i, c1, c2)), ok

    return apply


def _sym_id(v: SymValue, c):
    return v, TRUE_T


def _sym_int2(fn):
    def apply(a: SymValue, b: SymValue):
        ok = and_(eq(a.tag, iconst(TAG_INT)), eq(b.tag, iconst(TAG_INT)))
        return sv_int(fn(a.i, b.i)), ok

    return apply


FRP_SYM_PREDS = {
    "add-c": _sym_int_unary(lambda t, c: add(t, iconst(c))),
    "sub-c": _sym_int_unary(lambda t, c: sub(t, iconst(c))),
    "rsub-c": _sym_int_unary(lambda t, c: sub(iconst(c), t)),
    "mul-c": _sym_int_unary(lambda t, c: mulc(c, t)),
    "eq-c": _sym_int_cmp(lambda t, c: eq(t, iconst(c))),
    "le-c": _sym_int_cmp(lambda t, c: le(t, iconst(c))),
    "ge-c": _sym_int_cmp(lambda t, c: le(iconst(c), t)),
    "lt-c": _sym_int_cmp(lambda t, c: lt(t, iconst(c))),
    "gt-c": _sym_int_cmp(lambda t, c: lt(iconst(c), t)),
    "ge-or-le": _sym_two_bound(
        lambda t, c1, c2: or_(le(iconst(c1), t), le(t, iconst(c2)))
    ),
    "ge-and-le": _sym_two_bound(
        lambda t, c1, c2: and_(le(iconst(c1), t), le(t, iconst(c2)))
    ),
    "id": _sym_id,
    "add": _sym_int2(add),
    "sub": _sym_int2(sub),
    "min": _sym_int2(lambda a, b: ite(le(a, b), a, b)),
    "max": _sym_int2(lambda a, b: ite(le(a, b), b, a)),
}


def _list_pred_ok(t: Term) -> tuple:
    return t, TRUE_T


def make_list_sym_preds(bound: int) -> dict:
    def lb(a):
        return lookup_in_bound("divide", bound, a)

    return {
        "add1": lambda t: (add(t, iconst(1)), TRUE_T),
        "sub1": lambda t: (sub(t, iconst(1)), TRUE_T),
        "mul2": lambda t: (mulc(2, t), TRUE_T),
        "div2": lambda t: (lookup_term("divide", bound, t, divisor=2), lb(t)),
        "neg": lambda t: (neg(t), TRUE_T),
        "square": lambda t: (lookup_term("square", bound, t), lb(t)),
        "mul3": lambda t: (mulc(3, t), TRUE_T),
        "div3": lambda t: (lookup_term("divide", bound, t, divisor=3), lb(t)),
        "mul4": lambda t: (mulc(4, t), TRUE_T),
        "div4": lambda t: (lookup_term("divide", bound, t, divisor=4), lb(t)),
        "positive": lambda t: (lt(ZERO_T, t), TRUE_T),
        "negative": lambda t: (lt(t, ZERO_T), TRUE_T),
        "odd": lambda t: (not_(divisible(2, t)), TRUE_T),
        "even": lambda t: (divisible(2, t), TRUE_T),
        "add": lambda a, b: (add(a, b), TRUE_T),
        "sub": lambda a, b: (sub(a, b), TRUE_T),
        "mul": lambda a, b: (
            lookup_term("multiply", bound, a, b),
            and_(lb(a), lb(b)),
        ),
        "min": lambda a, b: (ite(le(a, b), a, b), TRUE_T),
        "max": lambda a, b: (ite(le(a, b), b, a), TRUE_T),
    }


# ---------------------------------------------------------------------------
# Symbolic FRP combinators
# ---------------------------------------------------------------------------
#
# Every function takes already-symbolic operand signals and returns
# (signal, ok). Constants arriving from instructions are concrete Values.

_ABSENT = (FALSE_T, sv_int(ZERO_T))


def y_identity(s: SymStream):
    return s, TRUE_T


def y_once(s: SymStream):
    out = []
    seen = FALSE_T
    for p, v in s.cells:
        out.append((and_(p, not_(seen)), v))
        seen = or_(seen, p)
    return SymStream(tuple(out)), TRUE_T


def y_zero(length: int):
    return SymStream(tuple(_ABSENT for _ in range(length))), TRUE_T


def y_map(s: SymStream, pred):
    out = []
    oks = []
    for p, v in s.cells:
        r, ok = pred(v)
        out.append((p, r))
        oks.append(implies(p, ok))
    return SymStream(tuple(out)), and_(*oks)


def y_merge(a: SymStream, b: SymStream):
    out = []
    for (pa, va), (pb, vb) in zip(a.cells, b.cells):
        out.append((or_(pa, pb), sv_ite(pa, va, vb)))
    return SymStream(tuple(out)), TRUE_T


def y_filter(s: SymStream, pred):
    out = []
    oks = []
    for p, v in s.cells:
        r, ok = pred(v)
        out.append((and_(p, sv_truthy(r)), v))
        oks.append(implies(p, ok))
    return SymStream(tuple(out)), and_(*oks)


def y_if(g: SymStream, a: SymStream, b: SymStream):
    out = []
    for (pg, vg), (pa, va), (pb, vb) in zip(g.cells, a.cells, b.cells):
        take_a = sv_truthy(vg)
        out.append((and_(pg, ite(take_a, pa, pb)), sv_ite(take_a, va, vb)))
    return SymStream(tuple(out)), TRUE_T


def y_constant(s: SymStream, const: Value):
    cv = sv_const(const)
    return SymStream(tuple((p, cv) for p, _ in s.cells)), TRUE_T


def y_collect(s: SymStream, pred2, const: Value):
    acc = sv_const(const)
    out = []
    oks = []
    for p, v in s.cells:
        stepped, ok = pred2(v, acc)
        oks.append(implies(p, ok))
        acc = sv_ite(p, stepped, acc)
        out.append((p, acc))
    return SymStream(tuple(out)), and_(*oks)


def y_filter_repeats(s: SymStream):
    out = []
    emitted = FALSE_T
    last = sv_int(ZERO_T)
    for p, v in s.cells:
        fresh = and_(p, or_(not_(emitted), not_(sv_eq(v, last))))
        out.append((fresh, v))
        last = sv_ite(fresh, v, last)
        emitted = or_(emitted, fresh)
    return SymStream(tuple(out)), TRUE_T


def y_snapshot(s: SymStream, b: SymBehavior):
    out = []
    for (p, _), bv in zip(s.cells, b.cells):
        out.append((p, bv))
    return SymStream(tuple(out)), TRUE_T


def y_delay(s: SymStream, const: Value):
    k = const.val
    if k < 0:
        return SymStream(tuple(_ABSENT for _ in s.cells)), FALSE_T
    out = []
    for t in range(len(s.cells)):
        out.append(s.cells[t - k] if t - k >= 0 else _ABSENT)
    return SymStream(tuple(out)), TRUE_T


def y_timer(s: SymStream, const: Value):
    n = const.val
    out = []
    for t in range(len(s.cells)):
        if n > 0 and t > 0 and t % n == 0:
            out.append((TRUE_T, sv_int(iconst(t))))
        else:
            out.append(_ABSENT)
    return SymStream(tuple(out)), TRUE_T


def _y_bool2(op):
    def f(a: SymStream, b: SymStream):
        out = []
        for (pa, va), (pb, vb) in zip(a.cells, b.cells):
            out.append((and_(pa, pb), sv_bool(op(sv_truthy(va), sv_truthy(vb)))))
        return SymStream(tuple(out)), TRUE_T

    return f


y_and = _y_bool2(lambda x, y: and_(x, y))
y_or = _y_bool2(lambda x, y: or_(x, y))


def y_not(s: SymStream):
    out = [(p, sv_bool(not_(sv_truthy(v)))) for p, v in s.cells]
    return SymStream(tuple(out)), TRUE_T


def y_changes(b: SymBehavior):
    out = []
    prev = b.init
    for cur in b.cells:
        out.append((not_(sv_eq(cur, prev)), cur))
        prev = cur
    return SymStream(tuple(out)), TRUE_T


def y_starts_with(s: SymStream, const: Value):
    cur = sv_const(const)
    cells = []
    for p, v in s.cells:
        cur = sv_ite(p, v, cur)
        cells.append(cur)
    return SymBehavior(sv_const(const), tuple(cells)), TRUE_T


def y_constant_b(length: int, const: Value):
    cv = sv_const(const)
    return SymBehavior(cv, (cv,) * length), TRUE_T


def y_delay_b(b: SymBehavior, const: Value):
    k = const.val
    if k < 0:
        return SymBehavior(b.init, b.cells), FALSE_T
    cells = []
    for t in range(len(b.cells)):
        cells.append(b.cells[t - k] if t - k >= 0 else b.init)
    return SymBehavior(b.init, tuple(cells)), TRUE_T


def y_lift_b(b: SymBehavior, pred):
    iv, iok = pred(b.init)
    cells = []
    oks = [iok]
    for c in b.cells:
        v, ok = pred(c)
        cells.append(v)
        oks.append(ok)
    return SymBehavior(iv, tuple(cells)), and_(*oks)


def y_if_b(g: SymBehavior, a: SymBehavior, b: SymBehavior):
    init = sv_ite(sv_truthy(g.init), a.init, b.init)
    cells = tuple(
        sv_ite(sv_truthy(cg), ca, cb)
        for cg, ca, cb in zip(g.cells, a.cells, b.cells)
    )
    return SymBehavior(init, cells), TRUE_T


def y_timer_b(b: SymBehavior, const: Value):
    n = const.val
    cells = []
    last = 0
    for t in range(len(b.cells)):
        if n > 0 and t > 0 and t % n == 0:
            last = t
        cells.append(sv_int(iconst(last)))
    return SymBehavior(sv_int(ZERO_T), tuple(cells)), TRUE_T


def _y_bool2_b(op):
    def f(a: SymBehavior, b: SymBehavior):
        init = sv_bool(op(sv_truthy(a.init), sv_truthy(b.init)))
        cells = tuple(
            sv_bool(op(sv_truthy(ca), sv_truthy(cb)))
            for ca, cb in zip(a.cells, b.cells)
        )
        return SymBehavior(init, cells), TRUE_T

    return f


y_and_b = _y_bool2_b(lambda x, y: and_(x, y))
y_or_b = _y_bool2_b(lambda x, y: or_(x, y))


def y_not_b(b: SymBehavior):
    return (
        SymBehavior(
            sv_bool(not_(sv_truthy(b.init))),
            tuple(sv_bool(not_(sv_truthy(c))) for c in b.cells),
        ),
        TRUE_T,
    )


# ---------------------------------------------------------------------------
# Symbolic list combinators
# ---------------------------------------------------------------------------
#
# Lists are fixed-capacity element vectors plus a length term. Elements at
# positions >= length are unconstrained and must never influence results.

_BIG = 10 ** 6


def _clamp_take(n: Term, ln: Term) -> Term:
    return ite(le(n, ZERO_T), ZERO_T, ite(le(ln, n), ln, n))


def l_take(xs: SymList, n: SymInt):
    return SymList(_clamp_take(n.term, xs.length), xs.elems, xs.capacity), TRUE_T


def l_drop(xs: SymList, n: SymInt):
    k = _clamp_take(n.term, xs.length)
    new_len = sub(xs.length, k)
    elems = []
    for i in range(xs.capacity):
        acc = ZERO_T
        for s in range(xs.capacity, -1, -1):
            if i + s < xs.capacity:
                acc = ite(eq(k, iconst(s)), xs.elems[i + s], acc)
        elems.append(acc)
    return SymList(new_len, tuple(elems), xs.capacity), TRUE_T


def l_access(n: SymInt, xs: SymList):
    ok = and_(le(ZERO_T, n.term), lt(n.term, xs.length))
    acc = ZERO_T
    for i in range(xs.capacity - 1, -1, -1):
        acc = ite(eq(n.term, iconst(i)), xs.elems[i], acc)
    return SymInt(acc), ok


def l_reverse(xs: SymList):
    elems = []
    for i in range(xs.capacity):
        acc = ZERO_T
        for ln in range(xs.capacity, 0, -1):
            if ln - 1 - i >= 0:
                acc = ite(eq(xs.length, iconst(ln)), xs.elems[ln - 1 - i], acc)
        elems.append(acc)
    return SymList(xs.length, tuple(elems), xs.capacity), TRUE_T


def l_sort(xs: SymList):
    # mask the dead suffix with a sentinel, then a fixed compare-exchange net
    work = [
        ite(lt(iconst(i), xs.length), xs.elems[i], iconst(_BIG))
        for i in range(xs.capacity)
    ]
    n = xs.capacity
    for _ in range(n):
        for j in range(n - 1):
            a, b = work[j], work[j + 1]
            c = le(a, b)
            work[j] = ite(c, a, b)
            work[j + 1] = ite(c, b, a)
    return SymList(xs.length, tuple(work), xs.capacity), TRUE_T


def l_map(xs: SymList, pred):
    elems = []
    oks = []
    for i in range(xs.capacity):
        r, ok = pred(xs.elems[i])
        elems.append(r)
        oks.append(implies(lt(iconst(i), xs.length), ok))
    return SymList(xs.length, tuple(elems), xs.capacity), and_(*oks)


def l_filter(xs: SymList, pred):
    keeps = []
    oks = []
    for i in range(xs.capacity):
        live = lt(iconst(i), xs.length)
        r, ok = pred(xs.elems[i])
        keeps.append(and_(live, r))
        oks.append(implies(live, ok))
    # prefix counts: cnt[i] = kept among positions < i
    cnt = [ZERO_T]
    for i in range(xs.capacity):
        cnt.append(add(cnt[i], ite(keeps[i], iconst(1), ZERO_T)))
    elems = []
    for j in range(xs.capacity):
        acc = ZERO_T
        for i in range(xs.capacity - 1, -1, -1):
            acc = ite(and_(keeps[i], eq(cnt[i], iconst(j))), xs.elems[i], acc)
        elems.append(acc)
    return SymList(cnt[-1], tuple(elems), xs.capacity), and_(*oks)


def l_count(xs: SymList, pred):
    total = ZERO_T
    oks = []
    for i in range(xs.capacity):
        live = lt(iconst(i), xs.length)
        r, ok = pred(xs.elems[i])
        oks.append(implies(live, ok))
        total = add(total, ite(and_(live, r), iconst(1), ZERO_T))
    return SymInt(total), and_(*oks)


def l_zipwith(a: SymList, b: SymList, pred2):
    ln = ite(le(a.length, b.length), a.length, b.length)
    cap = min(a.capacity, b.capacity)
    elems = []
    oks = []
    for i in range(cap):
        r, ok = pred2(a.elems[i], b.elems[i])
        elems.append(r)
        oks.append(implies(lt(iconst(i), ln), ok))
    return SymList(ln, tuple(elems), cap), and_(*oks)


def l_scanl1(xs: SymList, pred2):
    elems = []
    oks = []
    acc = None
    for i in range(xs.capacity):
        if acc is None:
            acc = xs.elems[i]
        else:
            stepped, ok = pred2(xs.elems[i], acc)
            oks.append(implies(lt(iconst(i), xs.length), ok))
            acc = stepped
        elems.append(acc)
    return SymList(xs.length, tuple(elems), xs.capacity), and_(*oks)


def _l_extreme(xs: SymList, sentinel: int, keep_le: bool):
    ok = lt(ZERO_T, xs.length)
    best = iconst(sentinel)
    for i in range(xs.capacity):
        cand = ite(lt(iconst(i), xs.length), xs.elems[i], iconst(sentinel))
        c = le(cand, best) if keep_le else le(best, cand)
        best = ite(c, cand, best)
    return SymInt(best), ok


def l_minimum(xs: SymList):
    return _l_extreme(xs, _BIG, True)


def l_maximum(xs: SymList):
    return _l_extreme(xs, -_BIG, False)


def l_sum(xs: SymList):
    total = ZERO_T
    for i in range(xs.capacity):
        total = add(total, ite(lt(iconst(i), xs.length), xs.elems[i], ZERO_T))
    return SymInt(total), TRUE_T


# ---------------------------------------------------------------------------
# Program-level symbolic evaluation
# ---------------------------------------------------------------------------

FRP_SYM_FNS = {
    "identityE": lambda L, pred, const, a: y_identity(a[0]),
    "onceE": lambda L, pred, const, a: y_once(a[0]),
    "zeroE": lambda L, pred, const, a: y_zero(L),
    "mapE": lambda L, pred, const, a: y_map(a[0], pred),
    "mergeE": lambda L, pred, const, a: y_merge(a[0], a[1]),
    "filterE": lambda L, pred, const, a: y_filter(a[0], pred),
    "ifE": lambda L, pred, const, a: y_if(a[0], a[1], a[2]),
    "constantE": lambda L, pred, const, a: y_constant(a[0], const),
    "collectE": lambda L, pred, const, a: y_collect(a[0], pred, const),
    "filterRepeatsE": lambda L, pred, const, a: y_filter_repeats(a[0]),
    "snapshotE": lambda L, pred, const, a: y_snapshot(a[0], a[1]),
    "delayE": lambda L, pred, const, a: y_delay(a[0], const),
    "timerE": lambda L, pred, const, a: y_timer(a[0], const),
    "andE": lambda L, pred, const, a: y_and(a[0], a[1]),
    "orE": lambda L, pred, const, a: y_or(a[0], a[1]),
    "notE": lambda L, pred, const, a: y_not(a[0]),
    "changes": lambda L, pred, const, a: y_changes(a[0]),
    "startsWith": lambda L, pred, const, a: y_starts_with(a[0], const),
    "constantB": lambda L, pred, const, a: y_constant_b(L, const),
    "delayB": lambda L, pred, const, a: y_delay_b(a[0], const),
    "liftB": lambda L, pred, const, a: y_lift_b(a[0], pred),
    "ifB": lambda L, pred, const, a: y_if_b(a[0], a[1], a[2]),
    "timerB": lambda L, pred, const, a: y_timer_b(a[0], const),
    "andB": lambda L, pred, const, a: y_and_b(a[0], a[1]),
    "orB": lambda L, pred, const, a: y_or_b(a[0], a[1]),
    "notB": lambda L, pred, const, a: y_not_b(a[0]),
}

LIST_SYM_FNS = {
    "take": lambda L, pred, const, a: l_take(a[1], a[0]),
    "drop": lambda L, pred, const, a: l_drop(a[1], a[0]),
    "access": lambda L, pred, const, a: l_access(a[0], a[1]),
    "reverse": lambda L, pred, const, a: l_reverse(a[0]),
    "sort": lambda L, pred, const, a: l_sort(a[0]),
    "map": lambda L, pred, const, a: l_map(a[0], pred),
    "filter": lambda L, pred, const, a: l_filter(a[0], pred),
    "count": lambda L, pred, const, a: l_count(a[0], pred),
    "zipwith": lambda L, pred, const, a: l_zipwith(a[0], a[1], pred),
    "scanl1": lambda L, pred, const, a: l_scanl1(a[0], pred),
    "minimum": lambda L, pred, const, a: l_minimum(a[0]),
    "maximum": lambda L, pred, const, a: l_maximum(a[0]),
    "sum": lambda L, pred, const, a: l_sum(a[0]),
}


def _sym_pred_for(insn, spec, dsl: str, bound: int):
    """Resolve the symbolic predicate callable for one instruction.

    int2 families stay binary (a, b); unary families come back pre-bound to
    the instruction constant so every caller just applies them to values.
    """
    from .frp import FRP_PREDS

    if insn.pred is None:
        return None
    if dsl == "frp":
        fam = FRP_PREDS[insn.pred]
        base = FRP_SYM_PREDS[insn.pred]
        if spec.pred_table == "int2":
            return base
        if fam.const is None:
            return lambda v: base(v, None)
        const = insn.const
        return lambda v: base(v, const)
    return make_list_sym_preds(bound)[insn.pred]


def eval_symbolic(program: Program, env: dict, length: int,
                  bound: int = listdsl.DEFAULT_TABLE_BOUND):
    """Run a concrete program over symbolic inputs.

    `env` maps input port names to symbolic signals (see lift_signal and the
    symbolic_*_input builders). Returns (value, ok-term); a false ok means
    the whole result register is poisoned, mirroring ERROR propagation.
    """
    from .frp import FRP_OPS
    from .listdsl import LIST_OPS

    if not program.insns:
        raise ValueError("empty program")
    dsl = "list" if program.insns[0].op in LIST_OPS else "frp"

    regs = []
    oks = []
    for decl in program.inputs:
        regs.append(env[decl.name])
        oks.append(TRUE_T)
    for insn in program.insns:
        spec = (FRP_OPS if dsl == "frp" else LIST_OPS)[insn.op]
        args = [regs[a] for a in insn.args]
        arg_ok = and_(*[oks[a] for a in insn.args])
        pred = _sym_pred_for(insn, spec, dsl, bound)
        fns = FRP_SYM_FNS if dsl == "frp" else LIST_SYM_FNS
        value, ok = fns[insn.op](length, pred, insn.const, args)
        regs.append(value)
        oks.append(and_(arg_ok, ok))
    return regs[-1], oks[-1]


def symbolic_list_input(name: str, capacity: int, bound: int,
                        si: SymbolicInput, length_term: Optional[Term] = None
                        ) -> SymList:
    elems = []
    for i in range(capacity):
        v = ivar("%s.e%d" % (name, i))
        si.variables.append(v)
        si.range_constraints.append(
            and_(le(iconst(-bound), v), le(v, iconst(bound)))
        )
        elems.append(v)
    if length_term is None:
        ln = ivar("%s.len" % name)
        si.variables.append(ln)
        si.range_constraints.append(
            and_(le(ZERO_T, ln), le(ln, iconst(capacity)))
        )
    else:
        ln = length_term
    return SymList(ln, tuple(elems), capacity)


def symbolic_trace_env(program: Program, length: int, tags: dict,
                       bound: int = 4, list_capacity: int = 5) -> tuple:
    """Fresh symbolic inputs for every program input port.

    Returns (env, SymbolicInput). `tags` maps port name -> payload tag
    (stream/behavior ports only).
    """
    si = SymbolicInput(env={}, variables=[], range_constraints=[])
    for decl in program.inputs:
        if decl.kind == K_STREAM:
            sig = symbolic_stream_input(decl.name, length, tags[decl.name],
                                        bound, si)
        elif decl.kind == K_BEHAVIOR:
            sig = symbolic_behavior_input(decl.name, length, tags[decl.name],
                                          bound, si)
        elif decl.kind == K_INT:
            v = ivar("%s.n" % decl.name)
            si.variables.append(v)
            si.range_constraints.append(
                and_(le(iconst(-bound), v), le(v, iconst(bound)))
            )
            sig = SymInt(v)
        elif decl.kind == K_LIST:
            sig = symbolic_list_input(decl.name, list_capacity, bound, si)
        else:
            raise ValueError("unknown input kind %r" % decl.kind)
        si.env[decl.name] = sig
    return si.env, si
