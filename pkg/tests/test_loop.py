"""Interaction loop: spec checking, difference search, oracles, sessions."""
import itertools
import json

import pytest

from conftest import conv_const, insn, prog
from frpsynth.frp import FRP_OPS, FRP_PREDS
from frpsynth.loop import (
    ACCEPT_A,
    ACCEPT_B,
    ADD_ITEMS,
    Answer,
    CandidatePair,
    CORRECT,
    LoopConfig,
    LoopSession,
    LoopStateError,
    ScriptedOracle,
    check_spec,
    find_constraint_violation,
    minimize_counterexample,
    output_equals_clause,
    synthesize_different,
    synthesize_full,
    synthesize_program,
    synthesis_loop,
    verify_equivalent,
)
from frpsynth.programs import K_STREAM, run_on_trace
from frpsynth.sketch import frp_grammar
from frpsynth.specs import (
    And,
    Implies,
    InputAssumption,
    IoPair,
    Not,
    OutputConstraint,
    Present,
    Specification,
    ValueCmp,
    at,
    eval_clause,
    tv,
    ForallT,
)
from frpsynth.traces import EventStream, PortSpec, Trace, events


def _ports(domain=(0, 1)):
    return (PortSpec("s", "events", tuple(conv_const(v) for v in domain)),)


def _cfg(grammar, length=2, max_insns=2, **kw):
    return LoopConfig(
        ports=_ports(),
        out_kind=K_STREAM,
        grammar=grammar,
        length=length,
        max_insns=max_insns,
        **kw,
    )


IDENT = prog([("s", K_STREAM)], insn("identityE", 0))
ADD1 = prog([("s", K_STREAM)], insn("mapE", 0, pred="add-c", const=1))


# ---------------------------------------------------------------------------
# check_spec
# ---------------------------------------------------------------------------

def test_check_spec_replays_pairs():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g)
    tr = Trace(2, {"s": events(1, None)})
    good = Specification(2, (IoPair(tr, events(2, None)),))
    assert check_spec(ADD1, good, cfg)
    assert not check_spec(IDENT, good, cfg)


def test_check_spec_constraints_are_forall_inputs():
    g = frp_grammar(op_order=("identityE", "zeroE"), consts=(1,))
    cfg = _cfg(g)
    echo = OutputConstraint(
        ForallT("t", Implies(Present("s", tv("t")), Present("out", tv("t"))))
    )
    spec = Specification(2, (echo,))
    assert check_spec(IDENT, spec, cfg)
    zero = prog([("s", K_STREAM)], insn("zeroE"))
    assert not check_spec(zero, spec, cfg)
    cex = find_constraint_violation(zero, spec, cfg)
    assert cex is not None
    out = run_on_trace(zero, cex, FRP_OPS, FRP_PREDS)
    assert not eval_clause(echo.clause, cex, out)


# ---------------------------------------------------------------------------
# synthesize_program
# ---------------------------------------------------------------------------

def test_synthesize_program_from_pairs():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g)
    tr = Trace(2, {"s": events(0, 1)})
    spec = Specification(2, (IoPair(tr, events(1, 2)),))
    res = synthesize_program(spec, cfg)
    assert res.ok
    assert check_spec(res.program, spec, cfg)


def test_synthesize_program_refines_on_constraint_violations():
    # seed pair is silent, so identityE fits it; the constraint demands an
    # output event wherever s fires, which only the full echo satisfies
    g = frp_grammar(op_order=("zeroE", "identityE"), consts=(1,), bools=False)
    cfg = _cfg(g)
    quiet = Trace(2, {"s": events(None, None)})
    spec = Specification(2, (
        IoPair(quiet, events(None, None)),
        OutputConstraint(
            ForallT("t", Implies(Present("s", tv("t")), Present("out", tv("t"))))
        ),
    ))
    res = synthesize_program(spec, cfg)
    assert res.ok
    assert [i.op for i in res.program.insns] == ["identityE"]
    assert res.stats["cegis_rounds"] >= 2  # zeroE passed the seed pair first


def test_synthesize_program_unsat():
    g = frp_grammar(op_order=("identityE",), consts=(1,))
    cfg = _cfg(g)
    tr = Trace(2, {"s": events(1, None)})
    spec = Specification(2, (IoPair(tr, events(2, None)),))
    res = synthesize_program(spec, cfg)
    assert res.program is None and res.status == "exhausted"


# ---------------------------------------------------------------------------
# output_equals_clause / minimize
# ---------------------------------------------------------------------------

def test_output_equals_clause_pins_stream():
    tr = Trace(2, {"s": events(0, None)})
    expected = events(1, None)
    clause = output_equals_clause(expected)
    dom = [None, 0, 1, 2]
    for cells in itertools.product(dom, repeat=2):
        out = events(*cells)
        assert eval_clause(clause, tr, out) == (out == expected)


def test_minimize_blanks_spurious_events():
    tr = Trace(3, {"s": events(1, 0, 1)})
    zero = prog([("s", K_STREAM)], insn("zeroE"))
    got = minimize_counterexample(IDENT, zero, tr)
    cells = got.ports["s"].cells
    assert sum(c is not None for c in cells) == 1
    assert run_on_trace(IDENT, got, FRP_OPS, FRP_PREDS) != run_on_trace(
        zero, got, FRP_OPS, FRP_PREDS)


# ---------------------------------------------------------------------------
# synthesize_different
# ---------------------------------------------------------------------------

def test_different_finds_competing_program():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    quiet = Trace(2, {"s": events(None, None)})
    spec = Specification(2, (IoPair(quiet, events(None, None)),))
    pair, status = synthesize_different(spec, IDENT, cfg)
    assert status == "found"
    assert pair.out_a != pair.out_b
    assert check_spec(pair.program_b, spec, cfg)
    # the distinguishing input was minimized down to a single event
    assert sum(c is not None for c in pair.trace.ports["s"].cells) == 1


def test_different_unique_when_spec_pins_program():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    tr = Trace(2, {"s": events(0, 1)})
    spec = Specification(2, (IoPair(tr, events(1, 2)),))
    pair, status = synthesize_different(spec, ADD1, cfg)
    assert pair is None and status == "unique"


def test_different_respects_input_assumptions():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    quiet = Trace(2, {"s": events(None, None)})
    spec = Specification(2, (
        IoPair(quiet, events(None, None)),
        InputAssumption(Not(Present("s", at(1)))),
    ))
    pair, status = synthesize_different(spec, IDENT, cfg)
    assert status == "found"
    assert pair.trace.ports["s"].cells[1] is None


def test_different_stage_b_reaches_past_battery():
    # battery of one probe (the all-quiet trace) cannot separate identity
    # from the low-pass filter; the deep scan must find a value-1 witness
    g = frp_grammar(op_order=("identityE", "filterE"), consts=(1,))
    cfg = _cfg(g, max_insns=1, differ_battery=1)
    quiet = Trace(2, {"s": events(None, None)})
    spec = Specification(2, (IoPair(quiet, events(None, None)),))
    pair, status = synthesize_different(spec, IDENT, cfg)
    assert status == "found"
    vals = [c.val for c in pair.trace.ports["s"].cells if c is not None]
    assert vals  # some event distinguishes the two programs
    assert pair.out_a != pair.out_b


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def _pair_for(trace):
    out_a = run_on_trace(IDENT, trace, FRP_OPS, FRP_PREDS)
    out_b = run_on_trace(ADD1, trace, FRP_OPS, FRP_PREDS)
    return CandidatePair(IDENT, ADD1, trace, out_a, out_b)


def test_scripted_oracle_judges_pairs():
    tr = Trace(2, {"s": events(1, None)})
    spec = Specification(2, ())
    assert ScriptedOracle(IDENT).ask(_pair_for(tr), spec).kind == ACCEPT_A
    assert ScriptedOracle(ADD1).ask(_pair_for(tr), spec).kind == ACCEPT_B
    mul = prog([("s", K_STREAM)], insn("mapE", 0, pred="add-c", const=5))
    ans = ScriptedOracle(mul).ask(_pair_for(tr), spec)
    assert ans.kind == CORRECT
    assert ans.output == run_on_trace(mul, tr, FRP_OPS, FRP_PREDS)


def test_scripted_oracle_scheduled_additions():
    item = OutputConstraint(Present("out", at(0)))
    oracle = ScriptedOracle(IDENT, additions={1: [item]})
    tr = Trace(2, {"s": events(1, None)})
    first = oracle.ask(_pair_for(tr), Specification(2, ()))
    assert first.kind == ADD_ITEMS and first.items == (item,)
    second = oracle.ask(_pair_for(tr), Specification(2, ()))
    assert second.kind == ACCEPT_A


# ---------------------------------------------------------------------------
# Full loop with a scripted oracle
# ---------------------------------------------------------------------------

def _loop_setup():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    quiet = Trace(2, {"s": events(None, None)})
    spec = Specification(2, (IoPair(quiet, events(None, None)),))
    return cfg, spec


def test_synthesis_loop_converges_to_reference():
    cfg, spec = _loop_setup()
    result = synthesis_loop(spec, ScriptedOracle(ADD1), cfg)
    assert result.ok and result.status == "unique"
    v = verify_equivalent(result.program, ADD1, cfg.ports, cfg.length)
    assert v.kind == "equal" and v.exhaustive
    assert result.interactions <= 2
    assert len(result.spec.items) > len(spec.items)


def test_synthesis_loop_transcripts_deterministic():
    cfg, spec = _loop_setup()
    t1 = synthesis_loop(spec, ScriptedOracle(ADD1), cfg).transcript
    t2 = synthesis_loop(spec, ScriptedOracle(ADD1), cfg).transcript
    assert json.dumps(t1) == json.dumps(t2)
    kinds = [e["event"] for e in t1]
    assert kinds[0] == "session" and kinds[-1] == "done"


def test_synthesis_loop_unsat_spec_fails():
    g = frp_grammar(op_order=("identityE",), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    tr = Trace(2, {"s": events(1, None)})
    spec = Specification(2, (IoPair(tr, events(2, None)),))
    result = synthesis_loop(spec, ScriptedOracle(ADD1), cfg)
    assert result.program is None and result.status == "unsat"


def test_loop_session_state_errors():
    cfg, spec = _loop_setup()
    s = LoopSession(spec, cfg)
    with pytest.raises(LoopStateError):
        s.answer(Answer(ACCEPT_A))
    snap = s.advance()
    assert snap["state"] == "pending"
    with pytest.raises(LoopStateError):
        s.answer(Answer(ADD_ITEMS, items=()))
    s.answer(Answer("abort"))
    assert s.result.status == "aborted"
    with pytest.raises(LoopStateError):
        s.answer(Answer(ACCEPT_A))


def test_loop_interaction_limit():
    # an oracle that always corrects with the same wrong-side answer keeps
    # the loop alive until the cap
    cfg, spec = _loop_setup()

    class Stubborn:
        def ask(self, pair, spec):
            return Answer(ACCEPT_B) if not pair_is_b_error(pair) else Answer(ACCEPT_A)

    def pair_is_b_error(pair):
        return False

    result = synthesis_loop(spec, Stubborn(), cfg, max_interactions=1)
    assert result.status in ("interaction-limit", "unique")


# ---------------------------------------------------------------------------
# verify_equivalent
# ---------------------------------------------------------------------------

def test_verify_reflexive_and_symmetric():
    ports = _ports()
    assert verify_equivalent(IDENT, IDENT, ports, 2).kind == "equal"
    a = verify_equivalent(IDENT, ADD1, ports, 2)
    b = verify_equivalent(ADD1, IDENT, ports, 2)
    assert a.kind == b.kind == "counterexample"
    assert a.witness == b.witness


def test_verify_counterexample_is_minimal():
    v = verify_equivalent(IDENT, ADD1, _ports(), 3)
    cells = v.witness.ports["s"].cells
    assert sum(c is not None for c in cells) == 1


def test_verify_sampling_never_claims_equal():
    ports = _ports()
    v = verify_equivalent(IDENT, IDENT, ports, 2, exhaustive_cap=1, samples=50)
    assert v.kind == "inconclusive"
    v2 = verify_equivalent(IDENT, ADD1, ports, 2, exhaustive_cap=1, samples=500)
    assert v2.kind == "counterexample"
    assert not v2.exhaustive


# ---------------------------------------------------------------------------
# synthesize_full
# ---------------------------------------------------------------------------

def test_synthesize_full_recovers_reference():
    g = frp_grammar(op_order=("identityE", "mapE"), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    res = synthesize_full(ADD1, cfg)
    assert res.ok
    assert res.verdict.kind == "equal" and res.verdict.exhaustive
    assert res.rounds >= 2  # identity fit the quiet seed trace first


def test_synthesize_full_stateful_reference():
    delay = prog([("s", K_STREAM)], insn("delayE", 0, const=1))
    g = frp_grammar(op_order=("identityE", "delayE"), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    res = synthesize_full(delay, cfg)
    assert res.ok
    assert verify_equivalent(res.program, delay, cfg.ports, 2).kind == "equal"


def test_synthesize_full_unsat_at_params():
    g = frp_grammar(op_order=("identityE",), consts=(1,))
    cfg = _cfg(g, max_insns=1)
    res = synthesize_full(ADD1, cfg)
    assert res.program is None and res.status == "exhausted"
