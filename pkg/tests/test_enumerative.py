from __future__ import annotations

import pytest

from conftest import insn, prog
from frpsynth.backends import Problem, SynthesisResult
from frpsynth.enumerative import EnumerativeBackend, EnumerativeSearch
from frpsynth.frp import FRP_OPS, FRP_PREDS
from frpsynth.listdsl import LIST_OPS, LIST_PREDS
from frpsynth.programs import (
    K_INT,
    K_LIST,
    K_STREAM,
    PortDecl,
    program_dumps,
    run_on_trace,
    run_program,
)
from frpsynth.sketch import frp_grammar, list_grammar
from frpsynth.specs import Present, at
from frpsynth.traces import Trace, events


def _stream_problem(grammar, pairs, out_kind=K_STREAM, **kw):
    inputs = tuple(sorted({n for tr, _ in pairs for n in tr.ports}))
    decls = tuple(PortDecl(n, K_STREAM) for n in inputs)
    examples = []
    length = pairs[0][0].length
    for tr, expected in pairs:
        env = {n: tr.ports[n] for n in inputs}
        examples.append((env, expected))
    return Problem(decls, out_kind, grammar, length, examples=examples, **kw)


def test_identity_is_found_first():
    g = frp_grammar(op_order=("onceE", "identityE", "mapE"), consts=(0, 1))
    tr = Trace(3, {"s": events(2, None, 5)})
    problem = _stream_problem(g, [(tr, events(2, None, 5))])
    res = EnumerativeBackend().synthesize(problem, 3)
    assert res.ok
    # onceE agrees on this trace but costs a stateful slot; identity wins
    assert [i.op for i in res.program.insns] == ["identityE"]
    assert res.n == 1 and res.stateful_slots == ()


def test_map_add_constant():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(0, 1, 2))
    tr = Trace(3, {"s": events(1, 2, None)})
    problem = _stream_problem(g, [(tr, events(3, 4, None))])
    res = EnumerativeBackend().synthesize(problem, 3)
    assert res.ok
    p = res.program
    assert len(p.insns) == 1
    assert p.insns[0].op == "mapE"
    assert run_on_trace(p, tr, FRP_OPS, FRP_PREDS) == events(3, 4, None)


def _counter_reference():
    return prog(
        [("inc", K_STREAM), ("dec", K_STREAM)],
        insn("constantE", 0, const=1),
        insn("constantE", 1, const=-1),
        insn("mergeE", 2, 3),
        insn("collectE", 4, pred="add", const=0),
        insn("startsWith", 5, const=0),
    )


def test_counter_synthesis_from_examples():
    ref = _counter_reference()
    g = frp_grammar(
        op_order=("identityE", "constantE", "mergeE", "collectE", "startsWith"),
        consts=(0, 1, -1),
        bools=False,
    )
    traces = [
        Trace(4, {"inc": events(True, True, None, True),
                  "dec": events(None, None, True, None)}),
        Trace(4, {"inc": events(None, True, None, None),
                  "dec": events(True, None, True, True)}),
    ]
    pairs = [(tr, run_on_trace(ref, tr, FRP_OPS, FRP_PREDS)) for tr in traces]
    from frpsynth.programs import K_BEHAVIOR

    problem = _stream_problem(g, pairs, out_kind=K_BEHAVIOR)
    res = EnumerativeBackend().synthesize(problem, 5)
    assert res.ok, res.status
    assert len(res.program.insns) <= 5
    for tr in traces:
        assert run_on_trace(res.program, tr, FRP_OPS, FRP_PREDS) == \
            run_on_trace(ref, tr, FRP_OPS, FRP_PREDS)
    assert res.stats["dedup_hits"] > 0


def test_clause_obligations():
    g = frp_grammar(op_order=("zeroE", "identityE"), consts=(0,))
    tr = Trace(3, {"s": events(1, None, None)})
    decls = (PortDecl("s", K_STREAM),)
    problem = Problem(
        decls, K_STREAM, g, 3,
        clause_cases=[(tr, Present("out", at(0)))],
    )
    res = EnumerativeBackend().synthesize(problem, 2)
    assert res.ok
    assert res.program.insns[0].op == "identityE"


def test_budget_exhaustion_reported():
    g = frp_grammar()
    tr = Trace(3, {"s": events(1, None, None)})
    # unsatisfiable: expected output is longer-lived than any budget allows
    problem = _stream_problem(g, [(tr, events(None, None, 4))],
                              candidate_budget=50)
    res = EnumerativeBackend().synthesize(problem, 4)
    assert not res.ok
    assert res.status == "budget"


def test_unsat_small_grammar_is_exhausted():
    g = frp_grammar(op_order=("identityE", "zeroE"), consts=(0,))
    tr = Trace(2, {"s": events(1, None)})
    problem = _stream_problem(g, [(tr, events(None, 7))])
    res = EnumerativeBackend().synthesize(problem, 3)
    assert not res.ok
    assert res.status == "exhausted"


def test_list_pbe():
    g = list_grammar()
    examples = [
        ({"n": 2, "xs": (3, 1, 2)}, (1, 2)),
        ({"n": 1, "xs": (5, 4, 0, -1)}, (-1,)),
    ]
    problem = Problem(
        (PortDecl("n", K_INT), PortDecl("xs", K_LIST)), K_LIST, g, 0,
        examples=examples,
    )
    res = EnumerativeBackend().synthesize(problem, 3)
    assert res.ok
    for env, want in examples:
        assert run_program(res.program, env, LIST_OPS, LIST_PREDS) == want


def test_determinism():
    g = frp_grammar(op_order=("identityE", "mapE", "mergeE"), consts=(0, 1, 2))
    tr = Trace(3, {"s": events(1, 2, None)})
    problem = _stream_problem(g, [(tr, events(2, 3, None))])
    r1 = EnumerativeBackend().synthesize(problem, 3)
    problem2 = _stream_problem(g, [(tr, events(2, 3, None))])
    r2 = EnumerativeBackend().synthesize(problem2, 3)
    assert r1.ok and r2.ok
    assert program_dumps(r1.program) == program_dumps(r2.program)
    assert r1.stats == r2.stats


def test_error_candidates_pruned():
    # delayE with a negative constant errors everywhere; bank must drop it
    g = frp_grammar(op_order=("delayE", "identityE"), consts=(-1,))
    tr = Trace(2, {"s": events(1, None)})
    problem = _stream_problem(g, [(tr, events(1, None))])
    search = EnumerativeSearch(problem)
    search.grow_to(1)
    size1 = search.bank.get((K_STREAM, 1), [])
    assert all(n.op != "delayE" for n in size1)
