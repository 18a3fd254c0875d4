"""Symbolic evaluator tests.

The core obligation: for every operator, evaluating a program symbolically
and then substituting a concrete input gives exactly what the concrete
interpreter computes, including ERROR poisoning (ok-term false iff the
concrete run errors). Sweeps are exhaustive over small domains.
"""
from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import insn, prog
from frpsynth import symbolic as sy
from frpsynth.frp import FRP_OPS, FRP_PREDS
from frpsynth.listdsl import LIST_OPS, LIST_PREDS
from frpsynth.programs import (
    K_BEHAVIOR,
    K_INT,
    K_LIST,
    K_STREAM,
    run_on_trace,
    run_program,
)
from frpsynth.traces import (
    BOOL,
    INT,
    PAIR,
    TRUE,
    PortSpec,
    bool_domain,
    enumerate_traces,
    int_domain,
    is_error,
    pair_domain,
    vbool,
    vint,
    vpair,
)

# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


def test_constant_folding():
    a = sy.iconst(3)
    b = sy.iconst(4)
    assert sy.add(a, b).val == 7
    assert sy.sub(a, b).val == -1
    assert sy.mulc(5, a).val == 15
    assert sy.neg(a).val == -3
    assert sy.eq(a, a) is sy.TRUE_T
    assert sy.le(a, b).val is True
    assert sy.lt(b, a).val is False
    assert sy.ite(sy.TRUE_T, a, b) is a
    assert sy.ite(sy.FALSE_T, a, b) is b
    assert sy.and_(sy.TRUE_T, sy.TRUE_T) is sy.TRUE_T
    assert sy.and_(sy.TRUE_T, sy.FALSE_T) is sy.FALSE_T
    assert sy.or_(sy.FALSE_T) is sy.FALSE_T
    assert sy.not_(sy.not_(sy.bvar("p"))).val == "p"
    assert sy.divisible(2, sy.iconst(6)).val is True
    assert sy.divisible(2, sy.iconst(7)).val is False


def test_eval_term_basics():
    x = sy.ivar("x")
    p = sy.bvar("p")
    t = sy.ite(p, sy.add(x, sy.iconst(1)), sy.neg(x))
    assert sy.eval_term(t, {"x": 4, "p": True}) == 5
    assert sy.eval_term(t, {"x": 4, "p": False}) == -4
    assert sy.eval_term(sy.divisible(3, x), {"x": 9}) is True
    assert sy.eval_term(sy.divisible(3, x), {"x": 10}) is False


@st.composite
def _term_case(draw, depth=3):
    """A random term together with its expected value under a fixed env."""
    env = {"a": draw(st.integers(-20, 20)), "b": draw(st.integers(-20, 20))}

    def build(d):
        kind = draw(
            st.sampled_from(
                ["const", "var", "add", "sub", "neg", "ite", "min"]
                if d > 0
                else ["const", "var"]
            )
        )
        if kind == "const":
            n = draw(st.integers(-10, 10))
            return sy.iconst(n), n
        if kind == "var":
            name = draw(st.sampled_from(["a", "b"]))
            return sy.ivar(name), env[name]
        if kind == "neg":
            t, v = build(d - 1)
            return sy.neg(t), -v
        t1, v1 = build(d - 1)
        t2, v2 = build(d - 1)
        if kind == "add":
            return sy.add(t1, t2), v1 + v2
        if kind == "sub":
            return sy.sub(t1, t2), v1 - v2
        if kind == "min":
            return sy.ite(sy.le(t1, t2), t1, t2), min(v1, v2)
        # ite on a comparison of the operands
        t3, v3 = build(d - 1)
        return sy.ite(sy.lt(t1, t2), t2, t3), (v2 if v1 < v2 else v3)

    term, expected = build(depth)
    return term, expected, env


@given(_term_case())
def test_eval_matches_construction(case):
    term, expected, env = case
    assert sy.eval_term(term, env) == expected


def test_lookup_terms():
    a, b = sy.ivar("a"), sy.ivar("b")
    m = sy.lookup_term("multiply", 64, a, b)
    assert sy.eval_term(m, {"a": 7, "b": -6}) == -42
    assert sy.eval_term(m, {"a": -6, "b": 7}) == -42
    guard = sy.lookup_in_bound("multiply", 64, a, b)
    assert sy.eval_term(guard, {"a": 64, "b": 2}) is True
    assert sy.eval_term(guard, {"a": 65, "b": 2}) is False
    # constant args fold through the table
    assert sy.lookup_term("multiply", 64, sy.iconst(5), sy.iconst(6)).val == 30
    assert sy.lookup_term("square", 64, sy.iconst(-9)).val == 81
    assert sy.lookup_term("divide", 64, sy.iconst(-5), divisor=2).val == -2


def test_symvalue_ops():
    vi = sy.sv_const(vint(0))
    vb = sy.sv_const(vbool(False))
    vp = sy.sv_const(vpair(1, 2))
    assert sy.sv_truthy(vi) is sy.TRUE_T
    assert sy.sv_truthy(vb) is sy.FALSE_T
    assert sy.sv_truthy(sy.sv_const(vbool(True))) is sy.TRUE_T
    assert sy.sv_eq(vi, vi) is sy.TRUE_T
    assert sy.sv_eq(vi, vb) is sy.FALSE_T
    assert sy.sv_eq(vp, sy.sv_const(vpair(1, 2))) is sy.TRUE_T
    assert sy.sv_eq(vp, sy.sv_const(vpair(2, 1))) is sy.FALSE_T


# ---------------------------------------------------------------------------
# FRP agreement sweeps
# ---------------------------------------------------------------------------

_DOMS = {
    (K_STREAM, INT): int_domain(1)[::2],  # {-1, 1}
    (K_STREAM, BOOL): bool_domain(),
    (K_STREAM, PAIR): (vpair(0, 0), vpair(1, 1)),
    (K_BEHAVIOR, INT): int_domain(1)[::2],
    (K_BEHAVIOR, BOOL): bool_domain(),
    (K_BEHAVIOR, PAIR): (vpair(0, 0), vpair(1, 1)),
}


def _frp_ports(program, tags):
    ports = []
    for decl in program.inputs:
        pk = "events" if decl.kind == K_STREAM else "behavior"
        ports.append(PortSpec(decl.name, pk, _DOMS[(decl.kind, tags[decl.name])]))
    return ports


def assert_frp_agreement(program, tags, length=3, bound=4):
    env, si = sy.symbolic_trace_env(program, length, tags, bound=bound)
    out, ok = sy.eval_symbolic(program, env, length)
    ports = _frp_ports(program, tags)
    n = 0
    for tr in enumerate_traces(ports, length):
        asg = sy.bind_trace(tr, tags)
        memo = {}
        conc = run_on_trace(program, tr, FRP_OPS, FRP_PREDS)
        ok_v = sy.eval_term(ok, asg, memo)
        if is_error(conc):
            assert ok_v is False, (program, tr)
        else:
            assert ok_v is True, (program, tr)
            assert sy.concrete_signal(out, asg, memo) == conc, (program, tr)
        n += 1
    assert n > 0


def _single(op, pred=None, const=None, tags=None):
    spec = FRP_OPS[op]
    names = ["s%d" % i for i in range(len(spec.operands))]
    inputs = list(zip(names, spec.operands))
    p = prog(inputs, insn(op, *range(len(names)), pred=pred, const=const))
    tag_map = {}
    for i, nm in enumerate(names):
        tag_map[nm] = tags[i] if tags else INT
    return p, tag_map


FRP_CASES = [
    ("identityE", None, None, None),
    ("onceE", None, None, None),
    ("zeroE", None, None, None),
    ("mapE", "add-c", 1, None),
    ("mapE", "rsub-c", 2, None),
    ("mapE", "mul-c", 3, None),
    ("mapE", "add-c", 1, (BOOL,)),  # tag mismatch must poison
    ("mergeE", None, None, None),
    ("filterE", "ge-c", 0, None),
    ("filterE", "le-c", 0, None),
    ("filterE", "lt-c", 1, None),
    ("filterE", "gt-c", -1, None),
    ("filterE", "eq-c", 1, None),
    ("filterE", "ge-or-le", (1, -1), None),
    ("filterE", "ge-and-le", (-1, 1), None),
    ("filterE", "id", None, (BOOL,)),
    ("ifE", None, None, (BOOL, INT, INT)),
    ("ifE", None, None, None),
    ("constantE", None, True, None),
    ("constantE", None, 4, (BOOL,)),
    ("collectE", "add", 0, None),
    ("collectE", "sub", 1, None),
    ("collectE", "max", 0, None),
    ("filterRepeatsE", None, None, None),
    ("filterRepeatsE", None, None, (BOOL,)),
    ("snapshotE", None, None, (INT, INT)),
    ("delayE", None, 1, None),
    ("delayE", None, 0, None),
    ("delayE", None, 2, None),
    ("delayE", None, -1, None),  # negative delay poisons
    ("timerE", None, 2, None),
    ("timerE", None, 1, None),
    ("timerE", None, 0, None),
    ("andE", None, None, (BOOL, BOOL)),
    ("orE", None, None, (BOOL, BOOL)),
    ("notE", None, None, (BOOL,)),
    ("andE", None, None, (INT, BOOL)),
    ("changes", None, None, None),
    ("startsWith", None, 0, None),
    ("constantB", None, 5, None),
    ("delayB", None, 1, None),
    ("delayB", None, -1, None),
    ("liftB", "add-c", 1, None),
    ("liftB", "rsub-c", 0, None),
    ("liftB", "add-c", 1, (BOOL,)),  # poison via tag mismatch
    ("ifB", None, None, (BOOL, INT, INT)),
    ("timerB", None, 2, None),
    ("andB", None, None, (BOOL, BOOL)),
    ("orB", None, None, (BOOL, BOOL)),
    ("notB", None, None, (BOOL,)),
]


@pytest.mark.parametrize("op,pred,const,tags", FRP_CASES)
def test_frp_op_agreement(op, pred, const, tags):
    program, tag_map = _single(op, pred, const, tags)
    assert_frp_agreement(program, tag_map)


def test_counter_pipeline_agreement():
    p = prog(
        [("inc", K_STREAM), ("dec", K_STREAM)],
        insn("constantE", 0, const=1),
        insn("constantE", 1, const=-1),
        insn("mergeE", 2, 3),
        insn("collectE", 4, pred="add", const=0),
        insn("startsWith", 5, const=0),
    )
    tags = {"inc": BOOL, "dec": BOOL}
    env, si = sy.symbolic_trace_env(p, 3, tags)
    out, ok = sy.eval_symbolic(p, env, 3)
    ports = [
        PortSpec("inc", "events", (TRUE,)),
        PortSpec("dec", "events", (TRUE,)),
    ]
    for tr in enumerate_traces(ports, 3):
        asg = sy.bind_trace(tr, tags)
        memo = {}
        conc = run_on_trace(p, tr, FRP_OPS, FRP_PREDS)
        assert sy.eval_term(ok, asg, memo) is True
        assert sy.concrete_signal(out, asg, memo) == conc


def test_drag_pipeline_agreement():
    # the seven-instruction drag shape: gate pos events between down and up
    p = prog(
        [("down", K_STREAM), ("up", K_STREAM), ("pos", K_STREAM)],
        insn("constantE", 0, const=True),
        insn("constantE", 1, const=False),
        insn("mergeE", 3, 4),
        insn("startsWith", 5, const=False),
        insn("snapshotE", 2, 6),
        insn("filterE", 7, pred="id"),
        insn("ifE", 8, 2, 2),
    )
    tags = {"down": BOOL, "up": BOOL, "pos": PAIR}
    env, si = sy.symbolic_trace_env(p, 3, tags)
    out, ok = sy.eval_symbolic(p, env, 3)
    ports = [
        PortSpec("down", "events", (TRUE,)),
        PortSpec("up", "events", (TRUE,)),
        PortSpec("pos", "events", (vpair(0, 0), vpair(1, 1))),
    ]
    for tr in enumerate_traces(ports, 3):
        asg = sy.bind_trace(tr, tags)
        memo = {}
        conc = run_on_trace(p, tr, FRP_OPS, FRP_PREDS)
        assert sy.eval_term(ok, asg, memo) is True
        assert sy.concrete_signal(out, asg, memo) == conc


def test_toy_pipeline_agreement():
    p = prog(
        [("s", K_STREAM)],
        insn("delayE", 0, const=1),
        insn("filterE", 1, pred="eq-c", const=3),
        insn("constantE", 2, const=2),
    )
    tags = {"s": INT}
    env, si = sy.symbolic_trace_env(p, 3, tags)
    out, ok = sy.eval_symbolic(p, env, 3)
    ports = [PortSpec("s", "events", (vint(1), vint(3)))]
    for tr in enumerate_traces(ports, 3):
        asg = sy.bind_trace(tr, tags)
        memo = {}
        conc = run_on_trace(p, tr, FRP_OPS, FRP_PREDS)
        assert sy.eval_term(ok, asg, memo) is True
        assert sy.concrete_signal(out, asg, memo) == conc


# ---------------------------------------------------------------------------
# List DSL agreement sweeps
# ---------------------------------------------------------------------------

_LISTS3 = [
    tuple(xs)
    for n in range(4)
    for xs in itertools.product(range(-2, 3), repeat=n)
]
_LISTS2 = [
    tuple(xs)
    for n in range(3)
    for xs in itertools.product(range(-2, 3), repeat=n)
]
_NS = [-1, 0, 1, 2, 3, 4]


def _sym_list_env(decls, capacity=3, bound=8):
    si = sy.SymbolicInput({}, [], [])
    env = {}
    for name, kind in decls:
        if kind == K_LIST:
            env[name] = sy.symbolic_list_input(name, capacity, bound, si)
        else:
            v = sy.ivar("%s.n" % name)
            si.variables.append(v)
            env[name] = sy.SymInt(v)
    return env


def assert_list_agreement(program, concrete_envs, capacity=3):
    decls = [(d.name, d.kind) for d in program.inputs]
    env = _sym_list_env(decls, capacity=capacity)
    out, ok = sy.eval_symbolic(program, env, 0)
    for conc in concrete_envs:
        asg = sy.bind_inputs(conc, {}, list_capacity=capacity)
        memo = {}
        want = run_program(program, conc, LIST_OPS, LIST_PREDS)
        ok_v = sy.eval_term(ok, asg, memo)
        if is_error(want):
            assert ok_v is False, (program, conc)
        else:
            assert ok_v is True, (program, conc)
            got = sy.concrete_signal(out, asg, memo)
            assert got == want, (program, conc, got, want)


UNARY_LIST_CASES = [
    ("reverse", None),
    ("sort", None),
    ("minimum", None),
    ("maximum", None),
    ("sum", None),
    ("map", "add1"),
    ("map", "sub1"),
    ("map", "div2"),
    ("map", "div3"),
    ("map", "square"),
    ("map", "neg"),
    ("map", "mul3"),
    ("filter", "positive"),
    ("filter", "negative"),
    ("filter", "odd"),
    ("filter", "even"),
    ("count", "even"),
    ("count", "positive"),
    ("scanl1", "add"),
    ("scanl1", "sub"),
    ("scanl1", "min"),
    ("scanl1", "max"),
    ("scanl1", "mul"),
]


@pytest.mark.parametrize("op,pred", UNARY_LIST_CASES)
def test_list_unary_agreement(op, pred):
    p = prog([("xs", K_LIST)], insn(op, 0, pred=pred))
    assert_list_agreement(p, [{"xs": xs} for xs in _LISTS3])


@pytest.mark.parametrize("op", ["take", "drop", "access"])
def test_list_int_agreement(op):
    p = prog([("n", K_INT), ("xs", K_LIST)], insn(op, 0, 1))
    envs = [{"n": n, "xs": xs} for n in _NS for xs in _LISTS3]
    assert_list_agreement(p, envs)


@pytest.mark.parametrize("pred", ["add", "sub", "mul", "min", "max"])
def test_zipwith_agreement(pred):
    p = prog([("xs", K_LIST), ("ys", K_LIST)], insn("zipwith", 0, 1, pred=pred))
    envs = [{"xs": xs, "ys": ys} for xs in _LISTS2 for ys in _LISTS2]
    assert_list_agreement(p, envs, capacity=2)


def test_list_pipeline_agreement():
    p = prog(
        [("n", K_INT), ("xs", K_LIST)],
        insn("sort", 1),
        insn("take", 0, 2),
        insn("sum", 3),
    )
    envs = [{"n": n, "xs": xs} for n in _NS for xs in _LISTS3]
    assert_list_agreement(p, envs)


def test_list_poison_matches_concrete():
    # push a value past the divide-table key bound through linear ops
    p = prog(
        [("xs", K_LIST)],
        insn("map", 0, pred="mul4"),
        insn("map", 1, pred="mul4"),
        insn("map", 2, pred="mul4"),
        insn("map", 3, pred="div2"),
    )
    ok_env = {"xs": (1,)}
    bad_env = {"xs": (-2,)}  # -128 is outside the table's key range
    assert not is_error(run_program(p, ok_env, LIST_OPS, LIST_PREDS))
    assert is_error(run_program(p, bad_env, LIST_OPS, LIST_PREDS))
    assert_list_agreement(p, [ok_env, bad_env], capacity=1)


def test_scanl1_symbolic_shape():
    """Element-first fold over three fresh symbolic inputs.

    The result list must be (xs0, (+ xs1 xs0), (+ xs2 (+ xs1 xs0))) with the
    accumulator shared structurally between steps two and three.
    """
    si = sy.SymbolicInput({}, [], [])
    xs = sy.symbolic_list_input("xs", 3, 8, si, length_term=sy.iconst(3))
    p = prog([("xs", K_LIST)], insn("scanl1", 0, pred="add"))
    out, ok = sy.eval_symbolic(p, {"xs": xs}, 0)
    assert ok is sy.TRUE_T
    e0, e1, e2 = out.elems
    assert e0 is xs.elems[0]
    assert e1.op == "add" and e1.args == (xs.elems[1], xs.elems[0])
    assert e2.op == "add" and e2.args[0] is xs.elems[2] and e2.args[1] is e1
    env = {"xs.len": 3, "xs.e0": 4, "xs.e1": -2, "xs.e2": 7}
    assert [sy.eval_term(t, env) for t in out.elems] == [4, 2, 9]
    # subtraction pins the operand order observably
    p2 = prog([("xs", K_LIST)], insn("scanl1", 0, pred="sub"))
    out2, _ = sy.eval_symbolic(p2, {"xs": xs}, 0)
    got = [sy.eval_term(t, {"xs.len": 3, "xs.e0": 5, "xs.e1": 2, "xs.e2": 1})
           for t in out2.elems]
    assert got == [5, -3, 4]
