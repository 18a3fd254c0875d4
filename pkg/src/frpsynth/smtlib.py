"""SMT-LIB 2 backend: talks to an external solver over a subprocess pipe.

Encoding: one integer choice variable per sketch slot selects among the
slot's well-kinded instruction fillings; register values are fieldwise
ite-muxes over those choices. Inputs are concrete, so everything except the
choice variables constant-folds. Boolean variables (none in the common path,
but presence bits of symbolic inputs if a caller supplies them) are lowered
to 0/1 integers so the whole script stays in linear integer arithmetic.
Nonlinear table lookups are emitted as bounded key case-splits, which keeps
each branch linear.
"""
from __future__ import annotations

import subprocess
from dataclasses import dataclass, field
from typing import Optional

from . import symbolic as sy
from .backends import Problem, SynthesisResult, default_schedule
from .frp import FRP_OPS, FRP_PREDS
from .listdsl import LIST_OPS, LIST_PREDS
from .programs import (
    Instruction,
    K_BEHAVIOR,
    K_INT,
    K_LIST,
    K_STREAM,
    Program,
    is_error,
    run_program,
)
from .sketch import Sketch, kind_vectors, ops_table, slot_choices
from .specs import clause_to_term, eval_clause
from .symbolic import Term
from .traces import Behavior, EventStream

# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

_BOOL_OPS = {"bconst", "eq", "le", "lt", "not", "and", "or", "divisible"}


def term_sort(t: Term) -> str:
    if t.op == "var":
        return t.args[0]
    if t.op == "ite":
        return term_sort(t.args[1])
    return sy.B_SORT if t.op in _BOOL_OPS else sy.I_SORT


class Emitter:
    """Writes terms as SMT-LIB 2 with shared subterms named via define-fun."""

    def __init__(self):
        self.defs = []
        self.var_sorts = {}
        self._names = {}
        self._keep = []  # the name cache is id-keyed; keep terms alive
        self._counter = 0
        self.uses_divisible = False

    def _fresh(self) -> str:
        self._counter += 1
        return ".d%d" % self._counter

    def _declare(self, name: str, sort: str):
        prev = self.var_sorts.get(name)
        if prev is None:
            self.var_sorts[name] = sort
        elif prev != sort:
            raise ValueError("variable %r used at two sorts" % name)

    def ref(self, t: Term) -> str:
        key = id(t)
        got = self._names.get(key)
        if got is not None:
            return got
        self._keep.append(t)
        op = t.op
        if op == "iconst":
            s = str(t.val) if t.val >= 0 else "(- %d)" % -t.val
            self._names[key] = s
            return s
        if op == "bconst":
            s = "true" if t.val else "false"
            self._names[key] = s
            return s
        if op == "var":
            name = t.val
            self._declare(name, t.args[0])
            # bool variables are lowered to 0/1 integers
            s = "(= %s 1)" % name if t.args[0] == sy.B_SORT else name
            self._names[key] = s
            return s
        expr = self._compose(t)
        name = self._fresh()
        sort = "Bool" if term_sort(t) == sy.B_SORT else "Int"
        self.defs.append("(define-fun %s () %s %s)" % (name, sort, expr))
        self._names[key] = name
        return name

    def _compose(self, t: Term) -> str:
        op = t.op
        a = [self.ref(x) for x in t.args]
        if op == "add":
            return "(+ %s %s)" % (a[0], a[1])
        if op == "sub":
            return "(- %s %s)" % (a[0], a[1])
        if op == "neg":
            return "(- %s)" % a[0]
        if op == "mulc":
            c = str(t.val) if t.val >= 0 else "(- %d)" % -t.val
            return "(* %s %s)" % (c, a[0])
        if op == "ite":
            return "(ite %s %s %s)" % (a[0], a[1], a[2])
        if op == "eq":
            return "(= %s %s)" % (a[0], a[1])
        if op == "le":
            return "(<= %s %s)" % (a[0], a[1])
        if op == "lt":
            return "(< %s %s)" % (a[0], a[1])
        if op == "not":
            return "(not %s)" % a[0]
        if op == "and":
            return "(and %s)" % " ".join(a)
        if op == "or":
            return "(or %s)" % " ".join(a)
        if op == "divisible":
            self.uses_divisible = True
            return "((_ divisible %d) %s)" % (t.val, a[0])
        if op == "lookup":
            return self._lookup(t, a)
        raise ValueError("cannot emit term op %r" % op)

    def _lookup(self, t: Term, a) -> str:
        kind, bound, divisor = t.val

        def num(n):
            return str(n) if n >= 0 else "(- %d)" % -n

        if kind == "multiply":
            # case-split one factor; each branch is linear
            expr = "0"
            for k in range(-bound, bound + 1):
                expr = "(ite (= %s %s) (* %s %s) %s)" % (
                    a[0], num(k), num(k), a[1], expr
                )
            return expr
        if kind == "square":
            absx = "(ite (< %s 0) (- %s) %s)" % (a[0], a[0], a[0])
            expr = "0"
            for k in range(0, bound + 1):
                expr = "(ite (= %s %d) %d %s)" % (absx, k, k * k, expr)
            return expr
        if kind in ("divide", "remainder"):
            expr = "0"
            for k in range(-bound, bound + 1):
                q, r = abs(k) // divisor, abs(k) % divisor
                if k < 0:
                    q, r = -q, -r
                out = q if kind == "divide" else r
                expr = "(ite (= %s %s) %s %s)" % (a[0], num(k), num(out), expr)
            return expr
        raise ValueError(kind)

    def script_lines(self, assertions) -> list:
        body = []
        for t in assertions:
            body.append("(assert %s)" % self.ref(t))
        lines = ["(set-option :produce-models true)"]
        lines.append("(set-logic %s)" % ("ALL" if self.uses_divisible else "QF_LIA"))
        for name, sort in sorted(self.var_sorts.items()):
            lines.append("(declare-fun %s () Int)" % name)
            if sort == sy.B_SORT:
                lines.append("(assert (or (= %s 0) (= %s 1)))" % (name, name))
        lines.extend(self.defs)
        lines.extend(body)
        lines.append("(check-sat)")
        lines.append("(get-model)")
        lines.append("(exit)")
        return lines


# ---------------------------------------------------------------------------
# Model parsing
# ---------------------------------------------------------------------------

def _tokenize(text: str):
    out = []
    cur = []
    for ch in text:
        if ch in "()":
            if cur:
                out.append("".join(cur))
                cur = []
            out.append(ch)
        elif ch.isspace():
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return out


def _read_sexprs(tokens):
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                raise ValueError("unbalanced model output")
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced model output")
    return stack[0]


def _value_of(sexpr):
    if isinstance(sexpr, str):
        if sexpr == "true":
            return True
        if sexpr == "false":
            return False
        return int(sexpr)
    if len(sexpr) == 2 and sexpr[0] == "-":
        return -_value_of(sexpr[1])
    raise ValueError("unparseable model value %r" % (sexpr,))


def parse_model(text: str) -> dict:
    """Variable assignments from (get-model) output; tolerant of wrappers."""
    out = {}

    def walk(node):
        if not isinstance(node, list):
            return
        if len(node) >= 5 and node[0] == "define-fun" and node[2] == []:
            try:
                out[node[1]] = _value_of(node[4])
            except (ValueError, TypeError):
                pass
            return
        for x in node:
            walk(x)

    for top in _read_sexprs(_tokenize(text)):
        walk(top)
    return out


# ---------------------------------------------------------------------------
# Sketch encoding
# ---------------------------------------------------------------------------

@dataclass
class EncodedQuery:
    script: str
    choice_names: list
    choices: list  # per slot, list of Instruction fillings


def _mux_values(sel_terms, values):
    """Fieldwise ite-mux over per-choice symbolic register values."""
    first = values[0]
    if isinstance(first, sy.SymStream):
        length = len(first.cells)
        cells = []
        for t in range(length):
            p = first.cells[t][0]
            v = first.cells[t][1]
            for sel, other in zip(sel_terms[1:], values[1:]):
                p = sy.ite(sel, other.cells[t][0], p)
                v = sy.sv_ite(sel, other.cells[t][1], v)
            cells.append((p, v))
        return sy.SymStream(tuple(cells))
    if isinstance(first, sy.SymBehavior):
        init = first.init
        for sel, other in zip(sel_terms[1:], values[1:]):
            init = sy.sv_ite(sel, other.init, init)
        cells = []
        for t in range(len(first.cells)):
            v = first.cells[t]
            for sel, other in zip(sel_terms[1:], values[1:]):
                v = sy.sv_ite(sel, other.cells[t], v)
            cells.append(v)
        return sy.SymBehavior(init, tuple(cells))
    if isinstance(first, sy.SymInt):
        v = first.term
        for sel, other in zip(sel_terms[1:], values[1:]):
            v = sy.ite(sel, other.term, v)
        return sy.SymInt(v)
    if isinstance(first, sy.SymList):
        cap = max(x.capacity for x in values)

        def pad(x):
            return list(x.elems) + [sy.ZERO_T] * (cap - x.capacity)

        ln = first.length
        elems = pad(first)
        for sel, other in zip(sel_terms[1:], values[1:]):
            ln = sy.ite(sel, other.length, ln)
            oe = pad(other)
            elems = [sy.ite(sel, oe[i], elems[i]) for i in range(cap)]
        return sy.SymList(ln, tuple(elems), cap)
    raise TypeError(first)


def _expected_term(out_sig, expected):
    """out symbolic signal equals the concrete expected value."""
    if isinstance(expected, EventStream):
        if not isinstance(out_sig, sy.SymStream):
            return sy.FALSE_T
        parts = []
        for (p, v), c in zip(out_sig.cells, expected.cells):
            if c is None:
                parts.append(sy.not_(p))
            else:
                parts.append(sy.and_(p, sy.sv_eq(v, sy.sv_const(c))))
        return sy.and_(*parts)
    if isinstance(expected, Behavior):
        if not isinstance(out_sig, sy.SymBehavior):
            return sy.FALSE_T
        parts = [sy.sv_eq(out_sig.init, sy.sv_const(expected.init))]
        for v, c in zip(out_sig.cells, expected.cells):
            parts.append(sy.sv_eq(v, sy.sv_const(c)))
        return sy.and_(*parts)
    if isinstance(expected, bool):
        raise TypeError("bare bool expectation")
    if isinstance(expected, int):
        if not isinstance(out_sig, sy.SymInt):
            return sy.FALSE_T
        return sy.eq(out_sig.term, sy.iconst(expected))
    if isinstance(expected, tuple):
        if not isinstance(out_sig, sy.SymList):
            return sy.FALSE_T
        parts = [sy.eq(out_sig.length, sy.iconst(len(expected)))]
        for i, x in enumerate(expected):
            if i < out_sig.capacity:
                parts.append(sy.eq(out_sig.elems[i], sy.iconst(x)))
            else:
                return sy.FALSE_T
        return sy.and_(*parts)
    raise TypeError(expected)


def encode_sketch(problem: Problem, n: int, stateful_slots: tuple,
                  kind_vec: tuple) -> Optional[EncodedQuery]:
    """Build the solver script for one sketch shape, or None if infeasible."""
    g = problem.grammar
    mask = set(stateful_slots)
    reg_kinds = [d.kind for d in problem.inputs]
    per_slot = []
    for j in range(n):
        cs = slot_choices(g, reg_kinds, stateful=j in mask,
                          result_kind=kind_vec[j])
        if not cs:
            return None
        per_slot.append(cs)
        reg_kinds.append(kind_vec[j])

    choice_vars = [sy.ivar("c%d" % j) for j in range(n)]
    assertions = []
    for j, cs in enumerate(per_slot):
        assertions.append(sy.le(sy.iconst(0), choice_vars[j]))
        assertions.append(sy.lt(choice_vars[j], sy.iconst(len(cs))))

    cases = []
    for env, expected in problem.examples:
        cases.append(("example", env, expected))
    for trace, clause in problem.clause_cases:
        env = {d.name: trace.ports[d.name] for d in problem.inputs}
        cases.append(("clause", env, (trace, clause)))
    for trace, clause in problem.any_of_cases:
        env = {d.name: trace.ports[d.name] for d in problem.inputs}
        cases.append(("anyof", env, (trace, clause)))

    any_of_disjuncts = []
    for tag, env, payload in cases:
        regs = [sy.lift_signal(env[d.name]) for d in problem.inputs]
        oks = [sy.TRUE_T] * len(regs)
        for j, cs in enumerate(per_slot):
            sels = [sy.eq(choice_vars[j], sy.iconst(k)) for k in range(len(cs))]
            vals = []
            choice_oks = []
            for insn in cs:
                spec = ops_table(g)[insn.op]
                pred = sy._sym_pred_for(insn, spec, g.dsl, 64)
                fns = sy.FRP_SYM_FNS if g.dsl == "frp" else sy.LIST_SYM_FNS
                args = [regs[a] for a in insn.args]
                arg_ok = sy.and_(*[oks[a] for a in insn.args])
                v, ok = fns[insn.op](problem.length, pred, insn.const, args)
                vals.append(v)
                choice_oks.append(sy.and_(arg_ok, ok))
            regs.append(_mux_values(sels, vals))
            ok = choice_oks[0]
            for sel, other in zip(sels[1:], choice_oks[1:]):
                ok = sy.ite(sel, other, ok)
            oks.append(ok)
        out_sig, out_ok = regs[-1], oks[-1]
        if tag == "anyof":
            # error on an any_of probe only falsifies that disjunct
            trace, clause = payload
            any_of_disjuncts.append(
                sy.and_(out_ok, clause_to_term(clause, trace, out_sig))
            )
            continue
        assertions.append(out_ok)
        if tag == "example":
            assertions.append(_expected_term(out_sig, payload))
        else:
            trace, clause = payload
            assertions.append(clause_to_term(clause, trace, out_sig))
    if any_of_disjuncts:
        assertions.append(sy.or_(*any_of_disjuncts))

    em = Emitter()
    script = "\n".join(em.script_lines(assertions)) + "\n"
    return EncodedQuery(script, ["c%d" % j for j in range(n)], per_slot)


def decode_model(q: EncodedQuery, model: dict, problem: Problem) -> Program:
    insns = []
    for name, cs in zip(q.choice_names, q.choices):
        k = model.get(name)
        if k is None or not (0 <= k < len(cs)):
            raise ValueError("model is missing choice %s" % name)
        insns.append(cs[k])
    return Program(tuple(problem.inputs), tuple(insns))


# ---------------------------------------------------------------------------
# Subprocess driver
# ---------------------------------------------------------------------------

class SolverFailure(RuntimeError):
    pass


@dataclass
class SmtLibBackend:
    cmd: list
    name: str = "smtlib"
    query_timeout: Optional[float] = None

    def _run(self, script: str) -> tuple:
        try:
            proc = subprocess.run(
                self.cmd,
                input=script.encode(),
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                timeout=self.query_timeout,
            )
        except subprocess.TimeoutExpired:
            return "timeout", ""
        except OSError as e:
            raise SolverFailure("cannot run solver %r: %s" % (self.cmd, e))
        text = proc.stdout.decode(errors="replace")
        first = text.strip().split("\n", 1)[0].strip()
        if first == "sat":
            return "sat", text
        if first == "unsat":
            return "unsat", text
        if first == "unknown":
            return "unknown", text
        raise SolverFailure(
            "unexpected solver output %r (stderr: %s)"
            % (text[:200], proc.stderr.decode(errors="replace")[:200])
        )

    def _check_concrete(self, program: Program, problem: Problem) -> bool:
        g = problem.grammar
        ops = FRP_OPS if g.dsl == "frp" else LIST_OPS
        preds = FRP_PREDS if g.dsl == "frp" else LIST_PREDS
        for env, expected in problem.examples:
            if run_program(program, env, ops, preds, problem.length) != expected:
                return False
        for trace, clause in problem.clause_cases:
            env = {d.name: trace.ports[d.name] for d in problem.inputs}
            out = run_program(program, env, ops, preds, problem.length)
            if is_error(out) or not eval_clause(clause, trace, out):
                return False
        return True

    def synthesize(self, problem: Problem, max_insns: int,
                   schedule=None, deadline=None) -> SynthesisResult:
        if schedule is None:
            schedule = default_schedule(max_insns)
        queries = 0
        saw_timeout = False
        saw_unknown = False
        for n, slots in schedule:
            sk = Sketch(tuple(problem.inputs), n, tuple(slots),
                        problem.out_kind, problem.grammar)
            for kv in kind_vectors(sk):
                q = encode_sketch(problem, n, tuple(slots), kv)
                if q is None:
                    continue
                queries += 1
                verdict, text = self._run(q.script)
                if verdict == "timeout":
                    saw_timeout = True
                    continue
                if verdict == "unknown":
                    saw_unknown = True
                    continue
                if verdict == "unsat":
                    continue
                program = decode_model(q, parse_model(text), problem)
                if not self._check_concrete(program, problem):
                    raise SolverFailure(
                        "solver model does not satisfy the obligations"
                    )
                return SynthesisResult(
                    program, n=n, stateful_slots=tuple(slots), status="sat",
                    stats={"queries": queries},
                )
        status = "timeout" if saw_timeout else (
            "unknown" if saw_unknown else "exhausted"
        )
        return SynthesisResult(None, status=status, stats={"queries": queries})
