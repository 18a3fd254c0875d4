"""SMT-LIB backend: emission, model parsing, and the subprocess protocol.

No solver binary is assumed to exist. The emitter and sketch encoder are
checked against a small independent SMT-LIB interpreter written here, and
the subprocess driver is exercised with stub executables that print canned
solver responses. A final integration test runs only when a real solver is
on PATH.
"""
import os
import shutil
import stat
import textwrap

import pytest

from conftest import insn, prog
from frpsynth import symbolic as sy
from frpsynth.backends import Problem, parse_backend
from frpsynth.frp import FRP_OPS, FRP_PREDS
from frpsynth.programs import K_STREAM, PortDecl, run_program
from frpsynth.sketch import frp_grammar
from frpsynth.smtlib import (
    Emitter,
    SmtLibBackend,
    SolverFailure,
    _read_sexprs,
    _tokenize,
    encode_sketch,
    parse_model,
)
from frpsynth.specs import Present, at
from frpsynth.traces import Trace, Value, events

# ---------------------------------------------------------------------------
# A tiny independent SMT-LIB interpreter (evaluation only, no solving)
# ---------------------------------------------------------------------------


def run_script(script: str, env: dict):
    """Evaluate every (assert ...) under env; returns the list of booleans."""
    scope = dict(env)
    results = []

    def ev(x):
        if isinstance(x, str):
            if x == "true":
                return True
            if x == "false":
                return False
            try:
                return int(x)
            except ValueError:
                return scope[x]
        head = x[0]
        if isinstance(head, list):
            if head[0] == "_" and head[1] == "divisible":
                return ev(x[1]) % int(head[2]) == 0
            raise ValueError(head)
        if head == "+":
            return ev(x[1]) + ev(x[2])
        if head == "-":
            return -ev(x[1]) if len(x) == 2 else ev(x[1]) - ev(x[2])
        if head == "*":
            return ev(x[1]) * ev(x[2])
        if head == "ite":
            return ev(x[2]) if ev(x[1]) else ev(x[3])
        if head == "=":
            return ev(x[1]) == ev(x[2])
        if head == "<=":
            return ev(x[1]) <= ev(x[2])
        if head == "<":
            return ev(x[1]) < ev(x[2])
        if head == "not":
            return not ev(x[1])
        if head == "and":
            return all(ev(y) for y in x[1:])
        if head == "or":
            return any(ev(y) for y in x[1:])
        raise ValueError("unknown form %r" % head)

    for form in _read_sexprs(_tokenize(script)):
        if not isinstance(form, list) or not form:
            continue
        if form[0] == "define-fun":
            scope[form[1]] = ev(form[4])
        elif form[0] == "declare-fun":
            if form[1] not in scope:
                raise KeyError("undeclared input %s" % form[1])
        elif form[0] == "assert":
            results.append(ev(form[1]))
    return results


def assert_script_matches(term, py_env, smt_env):
    """Emitted script for `term == its eval_term value` must check out."""
    want = sy.eval_term(term, py_env, {})
    if isinstance(want, bool):
        goal = term if want else sy.not_(term)
    else:
        goal = sy.eq(term, sy.iconst(want))
    em = Emitter()
    script = "\n".join(em.script_lines([goal]))
    assert all(run_script(script, smt_env)), script


# ---------------------------------------------------------------------------
# Emitter
# ---------------------------------------------------------------------------


def test_emit_arithmetic_and_logic():
    x, y = sy.ivar("x"), sy.ivar("y")
    q = sy.bvar("q")
    cases = [
        sy.add(x, sy.iconst(-3)),
        sy.sub(sy.iconst(2), y),
        sy.neg(x),
        sy.mulc(-2, x),
        sy.ite(q, x, sy.neg(x)),
        sy.and_(sy.le(x, y), sy.not_(q)),
        sy.or_(sy.lt(y, x), q, sy.eq(x, sy.iconst(7))),
        sy.implies(q, sy.le(sy.iconst(0), x)),
    ]
    for env in ({"x": 3, "y": -2, "q": True}, {"x": -5, "y": 5, "q": False}):
        smt_env = {k: (int(v) if isinstance(v, bool) else v)
                   for k, v in env.items()}
        for t in cases:
            assert_script_matches(t, env, smt_env)


def test_emit_divisible():
    x = sy.ivar("x")
    t = sy.divisible(3, x)
    for v in range(-7, 8):
        assert_script_matches(t, {"x": v}, {"x": v})
    em = Emitter()
    script = "\n".join(em.script_lines([t]))
    assert "(_ divisible 3)" in script
    assert "(set-logic ALL)" in script  # divisibility leaves plain QF_LIA


def test_emit_logic_defaults_to_qflia():
    em = Emitter()
    script = "\n".join(em.script_lines([sy.le(sy.ivar("x"), sy.iconst(4))]))
    assert "(set-logic QF_LIA)" in script
    assert "(check-sat)" in script and "(get-model)" in script


def test_emit_bool_vars_lowered_to_01_ints():
    q = sy.bvar("q")
    em = Emitter()
    script = "\n".join(em.script_lines([q]))
    assert "(declare-fun q () Int)" in script
    assert "(assert (or (= q 0) (= q 1)))" in script
    assert all(run_script(script, {"q": 1}))
    assert not all(run_script(script, {"q": 0}))


def test_emit_lookup_tables():
    x, y = sy.ivar("x"), sy.ivar("y")
    mul = sy.lookup_term("multiply", 4, x, b=y)
    sq = sy.lookup_term("square", 5, x)
    dv = sy.lookup_term("divide", 6, x, divisor=2)
    rm = sy.lookup_term("remainder", 6, x, divisor=4)
    for vx in range(-6, 7):
        for vy in (-3, 0, 2):
            env = {"x": vx, "y": vy}
            for t in (mul, sq, dv, rm):
                assert_script_matches(t, env, env)


def test_emit_shares_subterms():
    x = sy.ivar("x")
    big = sy.add(x, sy.iconst(1))
    t = sy.and_(sy.le(big, sy.iconst(9)), sy.lt(sy.iconst(0), big))
    em = Emitter()
    script = "\n".join(em.script_lines([t]))
    assert script.count("(+ x 1)") == 1


def test_emitter_rejects_sort_confusion():
    em = Emitter()
    em.ref(sy.ivar("x"))
    with pytest.raises(ValueError):
        em.ref(sy.bvar("x"))


# ---------------------------------------------------------------------------
# Model parsing
# ---------------------------------------------------------------------------


def test_parse_model_plain_and_wrapped():
    plain = "((define-fun c0 () Int 2)\n (define-fun c1 () Int (- 3)))"
    assert parse_model(plain) == {"c0": 2, "c1": -3}
    z3ish = "(model\n  (define-fun c0 () Int 0)\n  (define-fun q () Bool true)\n)"
    assert parse_model(z3ish) == {"c0": 0, "q": True}


def test_parse_model_ignores_functions_with_args():
    text = "((define-fun f ((a Int)) Int (* 2 a)) (define-fun c0 () Int 1))"
    assert parse_model(text) == {"c0": 1}


def test_parse_model_unbalanced_raises():
    with pytest.raises(ValueError):
        parse_model("((define-fun c0 () Int 2)")


# ---------------------------------------------------------------------------
# Sketch encoding, checked with the interpreter instead of a solver
# ---------------------------------------------------------------------------


def _map_problem():
    g = frp_grammar(op_order=("identityE", "mapE", "constantE"),
                    consts=(0, 1), bools=False)
    tr1 = Trace(3, {"s": events(1, 2, None)})
    tr2 = Trace(3, {"s": events(None, 0, 4)})
    examples = [
        ({"s": tr1.ports["s"]}, events(2, 3, None)),
        ({"s": tr2.ports["s"]}, events(None, 1, 5)),
    ]
    return Problem((PortDecl("s", K_STREAM),), K_STREAM, g, 3,
                   examples=examples)


def _choice_index(q, op, pred=None, const=None):
    for k, ins in enumerate(q.choices[0]):
        if ins.op == op and ins.pred == pred and ins.const == const:
            return k
    raise AssertionError("choice not offered")


def test_encode_sketch_assertions_discriminate():
    problem = _map_problem()
    q = encode_sketch(problem, 1, (), (K_STREAM,))
    assert q is not None and q.choice_names == ["c0"]
    good = _choice_index(q, "mapE", pred="add-c", const=Value("int", 1))
    bad = _choice_index(q, "identityE")
    assert all(run_script(q.script, {"c0": good}))
    assert not all(run_script(q.script, {"c0": bad}))
    # every other choice fails too: the examples pin the program
    for k in range(len(q.choices[0])):
        if k != good:
            assert not all(run_script(q.script, {"c0": k}))


def test_encode_sketch_clause_obligations():
    g = frp_grammar(op_order=("identityE", "zeroE"), consts=(0,), bools=False)
    tr = Trace(2, {"s": events(3, None)})
    problem = Problem(
        (PortDecl("s", K_STREAM),), K_STREAM, g, 2,
        clause_cases=[(tr, Present("out", at(0)))],
    )
    q = encode_sketch(problem, 1, (), (K_STREAM,))
    keep = _choice_index(q, "identityE")
    drop = _choice_index(q, "zeroE")
    assert all(run_script(q.script, {"c0": keep}))
    assert not all(run_script(q.script, {"c0": drop}))


def test_encode_sketch_infeasible_shape_is_none():
    problem = _map_problem()
    # no stateful stream->stream op in this grammar
    assert encode_sketch(problem, 1, (0,), (K_STREAM,)) is None


def test_encode_choice_range_asserted():
    problem = _map_problem()
    q = encode_sketch(problem, 1, (), (K_STREAM,))
    n = len(q.choices[0])
    assert not all(run_script(q.script, {"c0": n}))
    assert not all(run_script(q.script, {"c0": -1}))


# ---------------------------------------------------------------------------
# Subprocess driver with stub solvers
# ---------------------------------------------------------------------------


def _stub(tmp_path, name, body):
    path = tmp_path / name
    path.write_text("#!/bin/sh\ncat > /dev/null\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


def test_backend_sat_path_decodes_and_rechecks(tmp_path):
    problem = _map_problem()
    q = encode_sketch(problem, 1, (), (K_STREAM,))
    good = _choice_index(q, "mapE", pred="add-c", const=Value("int", 1))
    stub = _stub(
        tmp_path, "sat.sh",
        "echo sat\necho '((define-fun c0 () Int %d))'\n" % good,
    )
    res = SmtLibBackend([stub]).synthesize(problem, 1)
    assert res.ok and res.status == "sat"
    assert [i.op for i in res.program.insns] == ["mapE"]
    for env, expected in problem.examples:
        assert run_program(res.program, env, FRP_OPS, FRP_PREDS, 3) == expected


def test_backend_rejects_model_that_fails_concretely(tmp_path):
    problem = _map_problem()
    q = encode_sketch(problem, 1, (), (K_STREAM,))
    bad = _choice_index(q, "identityE")
    stub = _stub(
        tmp_path, "lying.sh",
        "echo sat\necho '((define-fun c0 () Int %d))'\n" % bad,
    )
    with pytest.raises(SolverFailure):
        SmtLibBackend([stub]).synthesize(problem, 1)


def test_backend_unsat_exhausts_schedule(tmp_path):
    problem = _map_problem()
    stub = _stub(tmp_path, "unsat.sh", "echo unsat\n")
    res = SmtLibBackend([stub]).synthesize(problem, 1)
    assert res.program is None and res.status == "exhausted"
    assert res.stats["queries"] >= 1


def test_backend_timeout_is_not_unsat(tmp_path):
    problem = _map_problem()
    stub = _stub(tmp_path, "slow.sh", "sleep 5\necho unsat\n")
    res = SmtLibBackend([stub], query_timeout=0.2).synthesize(problem, 1)
    assert res.program is None and res.status == "timeout"


def test_backend_unknown_reported(tmp_path):
    problem = _map_problem()
    stub = _stub(tmp_path, "unknown.sh", "echo unknown\n")
    res = SmtLibBackend([stub]).synthesize(problem, 1)
    assert res.program is None and res.status == "unknown"


def test_backend_garbage_output_raises(tmp_path):
    problem = _map_problem()
    stub = _stub(tmp_path, "noise.sh", "echo kaboom\n")
    with pytest.raises(SolverFailure):
        SmtLibBackend([stub]).synthesize(problem, 1)


def test_backend_missing_executable_raises():
    problem = _map_problem()
    with pytest.raises(SolverFailure):
        SmtLibBackend(["/nonexistent/solver"]).synthesize(problem, 1)


def test_parse_backend_factory():
    b = parse_backend("smtlib:z3 -in")
    assert isinstance(b, SmtLibBackend) and b.cmd == ["z3", "-in"]
    with pytest.raises(ValueError):
        parse_backend("smtlib:")
    with pytest.raises(ValueError):
        parse_backend("cvc5")


# ---------------------------------------------------------------------------
# Optional integration against a real solver
# ---------------------------------------------------------------------------

_SOLVER = shutil.which("z3") or shutil.which("cvc5")


@pytest.mark.skipif(_SOLVER is None, reason="no SMT solver on PATH")
def test_real_solver_round_trip():
    cmd = [_SOLVER, "-in"] if "z3" in os.path.basename(_SOLVER) else [_SOLVER]
    problem = _map_problem()
    res = SmtLibBackend(cmd).synthesize(problem, 2)
    assert res.ok
    for env, expected in problem.examples:
        assert run_program(res.program, env, FRP_OPS, FRP_PREDS, 3) == expected
