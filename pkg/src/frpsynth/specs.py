"""Specifications: example pairs plus declarative trace constraints.

A specification is a bag of items sharing one trace length:
  * IoPair          -- a full input trace and the expected output signal
  * InputAssumption -- a clause restricting which input traces are relevant
  * OutputConstraint / RelationalConstraint -- clauses over inputs and the
    candidate's output that must hold on every relevant trace

Clauses are a small bounded-time logic: atoms talk about one cell of one
port (presence, value comparisons, cell equality), quantifiers unroll over
the trace length. The port name "out" refers to the candidate's result.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .traces import (
    Behavior,
    EventStream,
    INT,
    Trace,
    Value,
    is_error,
    value_from_json,
    value_to_json,
)

OUT_PORT = "out"


# ---------------------------------------------------------------------------
# Time references
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeRef:
    """Either an absolute timestep or a bound variable plus offset."""

    var: Optional[str] = None
    offset: int = 0

    def resolve(self, tenv: dict) -> int:
        if self.var is None:
            return self.offset
        return tenv[self.var] + self.offset


def at(t: int) -> TimeRef:
    return TimeRef(None, t)


def tv(name: str, offset: int = 0) -> TimeRef:
    return TimeRef(name, offset)


# ---------------------------------------------------------------------------
# Clause AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Present:
    port: str
    when: TimeRef


@dataclass(frozen=True)
class ValueCmp:
    """Compare one cell against a constant; absent cells never satisfy it."""

    port: str
    when: TimeRef
    op: str  # eq ne le lt ge gt
    value: Value


@dataclass(frozen=True)
class CellsEqual:
    """Both cells present (or behavior-valued) and equal."""

    a_port: str
    a_when: TimeRef
    b_port: str
    b_when: TimeRef


@dataclass(frozen=True)
class OutputKindIs:
    kind: str  # "stream" | "behavior"


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    clauses: tuple


@dataclass(frozen=True)
class Or:
    clauses: tuple


@dataclass(frozen=True)
class Implies:
    antecedent: object
    consequent: object


@dataclass(frozen=True)
class ForallT:
    var: str
    body: object
    lo: int = 0
    hi: Optional[int] = None  # None means the trace length


@dataclass(frozen=True)
class ExistsT:
    var: str
    body: object
    lo: int = 0
    hi: Optional[int] = None


@dataclass(frozen=True)
class Mutex:
    """At most one of the named event ports fires per timestep."""

    ports: tuple


@dataclass(frozen=True)
class Alternate:
    """Occurrences of a and b strictly alternate, starting with a."""

    a_port: str
    b_port: str


def and_(*cs) -> And:
    return And(tuple(cs))


def or_(*cs) -> Or:
    return Or(tuple(cs))


# ---------------------------------------------------------------------------
# Concrete evaluation
# ---------------------------------------------------------------------------

_CMPS = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "le": lambda a, b: a <= b,
    "lt": lambda a, b: a < b,
    "ge": lambda a, b: a >= b,
    "gt": lambda a, b: a > b,
}


def _cell(port: str, t: int, trace: Trace, out, length: int):
    """(defined, value) for one cell; behaviors are always defined."""
    if t < 0 or t >= length:
        return False, None
    sig = out if port == OUT_PORT else trace.ports.get(port)
    if sig is None:
        raise KeyError("unknown port %r" % port)
    if isinstance(sig, EventStream):
        c = sig.cells[t]
        return (c is not None), c
    if isinstance(sig, Behavior):
        return True, sig.cells[t]
    raise TypeError("port %r is not a signal" % port)


def eval_clause(clause, trace: Trace, out=None, tenv: Optional[dict] = None) -> bool:
    length = trace.length
    tenv = tenv or {}
    c = clause
    if isinstance(c, Present):
        defined, _ = _cell(c.port, c.when.resolve(tenv), trace, out, length)
        return defined
    if isinstance(c, ValueCmp):
        defined, v = _cell(c.port, c.when.resolve(tenv), trace, out, length)
        if not defined:
            return False
        if v.tag != c.value.tag:
            return False
        if v.tag == INT or c.op in ("eq", "ne"):
            return _CMPS[c.op](v.val, c.value.val)
        return False
    if isinstance(c, CellsEqual):
        da, va = _cell(c.a_port, c.a_when.resolve(tenv), trace, out, length)
        db, vb = _cell(c.b_port, c.b_when.resolve(tenv), trace, out, length)
        return da and db and va == vb
    if isinstance(c, OutputKindIs):
        if c.kind == "stream":
            return isinstance(out, EventStream)
        return isinstance(out, Behavior)
    if isinstance(c, Not):
        return not eval_clause(c.body, trace, out, tenv)
    if isinstance(c, And):
        return all(eval_clause(x, trace, out, tenv) for x in c.clauses)
    if isinstance(c, Or):
        return any(eval_clause(x, trace, out, tenv) for x in c.clauses)
    if isinstance(c, Implies):
        return (not eval_clause(c.antecedent, trace, out, tenv)) or eval_clause(
            c.consequent, trace, out, tenv
        )
    if isinstance(c, (ForallT, ExistsT)):
        hi = length if c.hi is None else c.hi
        results = (
            eval_clause(c.body, trace, out, {**tenv, c.var: t})
            for t in range(c.lo, hi)
        )
        return all(results) if isinstance(c, ForallT) else any(results)
    if isinstance(c, Mutex):
        for t in range(length):
            live = 0
            for p in c.ports:
                defined, _ = _cell(p, t, trace, out, length)
                live += 1 if defined else 0
            if live > 1:
                return False
        return True
    if isinstance(c, Alternate):
        expect_a = True
        for t in range(length):
            da, _ = _cell(c.a_port, t, trace, out, length)
            db, _ = _cell(c.b_port, t, trace, out, length)
            if da and db:
                return False
            if da:
                if not expect_a:
                    return False
                expect_a = False
            elif db:
                if expect_a:
                    return False
                expect_a = True
        return True
    raise TypeError("not a clause: %r" % (c,))


# ---------------------------------------------------------------------------
# Specification items
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IoPair:
    trace: Trace
    expected: object  # EventStream | Behavior


@dataclass(frozen=True)
class InputAssumption:
    clause: object
    note: str = ""


@dataclass(frozen=True)
class OutputConstraint:
    clause: object
    note: str = ""


@dataclass(frozen=True)
class RelationalConstraint:
    clause: object
    note: str = ""


CONSTRAINT_ITEMS = (OutputConstraint, RelationalConstraint)


@dataclass(frozen=True)
class Specification:
    length: int
    items: tuple

    def __post_init__(self):
        for item in self.items:
            if isinstance(item, IoPair):
                if item.trace.length != self.length:
                    raise ValueError("IoPair length differs from specification")
                if isinstance(item.expected, EventStream):
                    if len(item.expected.cells) != self.length:
                        raise ValueError("expected output has wrong length")
                elif isinstance(item.expected, Behavior):
                    if len(item.expected.cells) != self.length:
                        raise ValueError("expected output has wrong length")
                else:
                    raise TypeError("expected output must be a signal")

    def io_pairs(self) -> list:
        return [i for i in self.items if isinstance(i, IoPair)]

    def assumptions(self) -> list:
        return [i for i in self.items if isinstance(i, InputAssumption)]

    def constraints(self) -> list:
        return [i for i in self.items if isinstance(i, CONSTRAINT_ITEMS)]

    def with_items(self, extra: Sequence) -> "Specification":
        return Specification(self.length, self.items + tuple(extra))


def assumptions_hold(spec: Specification, trace: Trace) -> bool:
    return all(eval_clause(a.clause, trace) for a in spec.assumptions())


def constraints_hold(spec: Specification, trace: Trace, out) -> bool:
    if is_error(out):
        return not spec.constraints()
    return all(eval_clause(c.clause, trace, out) for c in spec.constraints())


# ---------------------------------------------------------------------------
# JSON codec
# ---------------------------------------------------------------------------

def _tr_to_json(tr: TimeRef):
    if tr.var is None:
        return {"at": tr.offset}
    d = {"var": tr.var}
    if tr.offset:
        d["off"] = tr.offset
    return d


def _tr_from_json(d) -> TimeRef:
    if "at" in d:
        return TimeRef(None, d["at"])
    return TimeRef(d["var"], d.get("off", 0))


def clause_to_json(c) -> dict:
    if isinstance(c, Present):
        return {"c": "present", "port": c.port, "when": _tr_to_json(c.when)}
    if isinstance(c, ValueCmp):
        return {
            "c": "valuecmp",
            "port": c.port,
            "when": _tr_to_json(c.when),
            "op": c.op,
            "value": value_to_json(c.value),
        }
    if isinstance(c, CellsEqual):
        return {
            "c": "cellseq",
            "a_port": c.a_port,
            "a_when": _tr_to_json(c.a_when),
            "b_port": c.b_port,
            "b_when": _tr_to_json(c.b_when),
        }
    if isinstance(c, OutputKindIs):
        return {"c": "outkind", "kind": c.kind}
    if isinstance(c, Not):
        return {"c": "not", "body": clause_to_json(c.body)}
    if isinstance(c, And):
        return {"c": "and", "clauses": [clause_to_json(x) for x in c.clauses]}
    if isinstance(c, Or):
        return {"c": "or", "clauses": [clause_to_json(x) for x in c.clauses]}
    if isinstance(c, Implies):
        return {
            "c": "implies",
            "antecedent": clause_to_json(c.antecedent),
            "consequent": clause_to_json(c.consequent),
        }
    if isinstance(c, (ForallT, ExistsT)):
        d = {
            "c": "forall" if isinstance(c, ForallT) else "exists",
            "var": c.var,
            "body": clause_to_json(c.body),
        }
        if c.lo:
            d["lo"] = c.lo
        if c.hi is not None:
            d["hi"] = c.hi
        return d
    if isinstance(c, Mutex):
        return {"c": "mutex", "ports": list(c.ports)}
    if isinstance(c, Alternate):
        return {"c": "alternate", "a_port": c.a_port, "b_port": c.b_port}
    raise TypeError("not a clause: %r" % (c,))


def clause_from_json(d) -> object:
    k = d["c"]
    if k == "present":
        return Present(d["port"], _tr_from_json(d["when"]))
    if k == "valuecmp":
        return ValueCmp(
            d["port"], _tr_from_json(d["when"]), d["op"], value_from_json(d["value"])
        )
    if k == "cellseq":
        return CellsEqual(
            d["a_port"], _tr_from_json(d["a_when"]),
            d["b_port"], _tr_from_json(d["b_when"]),
        )
    if k == "outkind":
        return OutputKindIs(d["kind"])
    if k == "not":
        return Not(clause_from_json(d["body"]))
    if k == "and":
        return And(tuple(clause_from_json(x) for x in d["clauses"]))
    if k == "or":
        return Or(tuple(clause_from_json(x) for x in d["clauses"]))
    if k == "implies":
        return Implies(
            clause_from_json(d["antecedent"]), clause_from_json(d["consequent"])
        )
    if k in ("forall", "exists"):
        cls = ForallT if k == "forall" else ExistsT
        return cls(d["var"], clause_from_json(d["body"]), d.get("lo", 0), d.get("hi"))
    if k == "mutex":
        return Mutex(tuple(d["ports"]))
    if k == "alternate":
        return Alternate(d["a_port"], d["b_port"])
    raise ValueError("unknown clause kind %r" % k)


def _signal_to_json(sig):
    from .traces import trace_to_json

    wrapped = trace_to_json(Trace(len(sig.cells), {"out": sig}))
    return wrapped["ports"]["out"]


def _signal_from_json(d, length):
    from .traces import trace_from_json

    tr = trace_from_json({"length": length, "ports": {"out": d}})
    return tr.ports["out"]


def item_to_json(item) -> dict:
    from .traces import trace_to_json

    if isinstance(item, IoPair):
        return {
            "item": "io_pair",
            "trace": trace_to_json(item.trace),
            "expected": _signal_to_json(item.expected),
        }
    names = {
        InputAssumption: "input_assumption",
        OutputConstraint: "output_constraint",
        RelationalConstraint: "relational_constraint",
    }
    d = {"item": names[type(item)], "clause": clause_to_json(item.clause)}
    if item.note:
        d["note"] = item.note
    return d


def item_from_json(d, length: int):
    from .traces import trace_from_json

    k = d["item"]
    if k == "io_pair":
        tr = trace_from_json(d["trace"])
        return IoPair(tr, _signal_from_json(d["expected"], tr.length))
    cls = {
        "input_assumption": InputAssumption,
        "output_constraint": OutputConstraint,
        "relational_constraint": RelationalConstraint,
    }[k]
    return cls(clause_from_json(d["clause"]), d.get("note", ""))


def spec_to_json(spec: Specification) -> dict:
    return {
        "length": spec.length,
        "items": [item_to_json(i) for i in spec.items],
    }


def spec_from_json(d) -> Specification:
    length = d["length"]
    return Specification(
        length, tuple(item_from_json(i, length) for i in d["items"])
    )


# ---------------------------------------------------------------------------
# Symbolic clause compilation
# ---------------------------------------------------------------------------

def clause_to_term(clause, trace: Trace, out_sym):
    """Compile a clause to a boolean term over a symbolic output signal.

    Input ports come from the concrete trace (their cells fold to constants);
    the "out" port resolves to the given symbolic stream or behavior.
    """
    from . import symbolic as sy

    length = trace.length

    def cell(port, t):
        # (presence term, SymValue or None)
        if t < 0 or t >= length:
            return sy.FALSE_T, None
        if port == OUT_PORT:
            sig = out_sym
        else:
            sig = sy.lift_signal(trace.ports[port])
        if isinstance(sig, sy.SymStream):
            return sig.cells[t]
        return sy.TRUE_T, sig.cells[t]

    def go(c, tenv):
        if isinstance(c, Present):
            p, _ = cell(c.port, c.when.resolve(tenv))
            return p
        if isinstance(c, ValueCmp):
            p, v = cell(c.port, c.when.resolve(tenv))
            if v is None:
                return sy.FALSE_T
            want = sy.sv_const(c.value)
            if c.op == "eq":
                payload = sy.sv_eq(v, want)
            elif c.op == "ne":
                # tags must agree even for "ne" (mismatch means "no verdict")
                payload = sy.and_(
                    sy.eq(v.tag, want.tag), sy.not_(sy.sv_eq(v, want))
                )
            else:
                if c.value.tag != INT:
                    return sy.FALSE_T
                tag_ok = sy.eq(v.tag, sy.iconst(sy.TAG_INT))
                k = sy.iconst(c.value.val)
                cmp = {
                    "le": sy.le(v.i, k),
                    "lt": sy.lt(v.i, k),
                    "ge": sy.le(k, v.i),
                    "gt": sy.lt(k, v.i),
                }[c.op]
                payload = sy.and_(tag_ok, cmp)
            return sy.and_(p, payload)
        if isinstance(c, CellsEqual):
            pa, va = cell(c.a_port, c.a_when.resolve(tenv))
            pb, vb = cell(c.b_port, c.b_when.resolve(tenv))
            if va is None or vb is None:
                return sy.FALSE_T
            return sy.and_(pa, pb, sy.sv_eq(va, vb))
        if isinstance(c, OutputKindIs):
            want_stream = c.kind == "stream"
            is_stream = isinstance(out_sym, sy.SymStream)
            return sy.TRUE_T if want_stream == is_stream else sy.FALSE_T
        if isinstance(c, Not):
            return sy.not_(go(c.body, tenv))
        if isinstance(c, And):
            return sy.and_(*[go(x, tenv) for x in c.clauses])
        if isinstance(c, Or):
            return sy.or_(*[go(x, tenv) for x in c.clauses])
        if isinstance(c, Implies):
            return sy.implies(go(c.antecedent, tenv), go(c.consequent, tenv))
        if isinstance(c, (ForallT, ExistsT)):
            hi = length if c.hi is None else c.hi
            parts = [
                go(c.body, {**tenv, c.var: t}) for t in range(c.lo, hi)
            ]
            return sy.and_(*parts) if isinstance(c, ForallT) else sy.or_(*parts)
        if isinstance(c, Mutex):
            parts = []
            for t in range(length):
                ps = [cell(p, t)[0] for p in c.ports]
                for i in range(len(ps)):
                    for j in range(i + 1, len(ps)):
                        parts.append(sy.not_(sy.and_(ps[i], ps[j])))
            return sy.and_(*parts)
        if isinstance(c, Alternate):
            expect_a = sy.TRUE_T
            violated = sy.FALSE_T
            for t in range(length):
                pa, _ = cell(c.a_port, t)
                pb, _ = cell(c.b_port, t)
                violated = sy.or_(
                    violated,
                    sy.and_(pa, pb),
                    sy.and_(pa, sy.not_(expect_a)),
                    sy.and_(pb, expect_a),
                )
                expect_a = sy.ite(pa, sy.FALSE_T, sy.ite(pb, sy.TRUE_T, expect_a))
            return sy.not_(violated)
        raise TypeError("not a clause: %r" % (c,))

    return go(clause, {})


# ---------------------------------------------------------------------------
# Assumption-aware trace supply
# ---------------------------------------------------------------------------

def traces_satisfying(spec: Specification, ports, length: int):
    """Deterministic stream of assumption-satisfying traces."""
    from .traces import enumerate_traces

    for tr in enumerate_traces(ports, length):
        if assumptions_hold(spec, tr):
            yield tr


def sample_satisfying(spec: Specification, ports, length: int, rng,
                      tries: int = 200) -> Optional[Trace]:
    """Rejection-sample one assumption-satisfying trace, or None."""
    from .traces import random_trace

    for _ in range(tries):
        tr = random_trace(rng, ports, length)
        if assumptions_hold(spec, tr):
            return tr
    return None
