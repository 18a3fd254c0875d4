"""Interactive synthesis: candidate pairs, distinguishing inputs, oracles.

The session keeps a growing Specification. Each step synthesizes a program
P meeting the spec, then hunts for a second program P' that also meets the
spec but disagrees with P on some assumption-valid input i. The pair
(P, P', i) goes to an oracle (a person, or a scripted reference program);
the answer is folded back into the spec and the step repeats. When no
disagreeing program exists at the current bounds, P is reported unique.

Difference search runs in two stages. Stage A asks the backend for a
program that differs from P on at least one trace of a small probe battery
(a disjunctive obligation both backends support). If that is unsatisfiable,
stage B walks the enumerative bank's obligation-passing candidates: any
candidate whose obligation outputs differ from P's yields a pair straight
from the stored vectors, and the lone candidate class matching P everywhere
gets one full bounded scan. Uniqueness claims are therefore relative to the
candidates the bank represents; collapsed members of P's own equivalence
class are not re-examined.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .backends import DEFAULT_CANDIDATE_BUDGET, Problem, SynthesisResult
from .enumerative import EnumerativeBackend, EnumerativeSearch, node_to_program
from .frp import FRP_OPS, FRP_PREDS
from .programs import (
    K_BEHAVIOR,
    K_STREAM,
    PortDecl,
    Program,
    is_error,
    program_dumps,
    program_to_json,
    run_on_trace,
    run_program,
)
from .sketch import Grammar, reorder_grammar
from .specs import (
    And,
    IoPair,
    Not,
    Present,
    Specification,
    ValueCmp,
    assumptions_hold,
    at,
    constraints_hold,
    item_to_json,
    sample_satisfying,
    traces_satisfying,
    _signal_to_json,
)
from .traces import (
    Behavior,
    EventStream,
    KIND_BEHAVIOR,
    KIND_EVENTS,
    Trace,
    input_space_size,
    trace_to_json,
)

_PORT_KINDS = {KIND_EVENTS: K_STREAM, KIND_BEHAVIOR: K_BEHAVIOR}


@dataclass
class LoopConfig:
    """Bounds and knobs for one synthesis session."""

    ports: tuple  # PortSpec with concrete value domains
    out_kind: str
    grammar: Grammar
    length: int
    max_insns: int
    seed: int = 0
    backend: object = None  # defaults to the built-in enumerative solver
    exhaustive_cap: int = 1_000_000
    sample_probes: int = 200  # probe draws when the space is too large
    differ_battery: int = 16  # probes inside the stage-A disjunction
    battery_cap: int = 1024  # escalation ceiling for the probe battery
    cegis_rounds: int = 16
    deep_candidates: int = 4096  # stage-B candidate classes to inspect
    candidate_budget: int = DEFAULT_CANDIDATE_BUDGET
    verify_samples: int = 10_000
    step_timeout: Optional[float] = None  # seconds per backend call

    def decls(self) -> tuple:
        return tuple(PortDecl(p.name, _PORT_KINDS[p.kind]) for p in self.ports)

    def make_backend(self):
        return self.backend if self.backend is not None else EnumerativeBackend()


def _deadline(cfg: LoopConfig) -> Optional[float]:
    if cfg.step_timeout is None:
        return None
    return time.monotonic() + cfg.step_timeout


def _expired(deadline: Optional[float]) -> bool:
    return deadline is not None and time.monotonic() > deadline


# ---------------------------------------------------------------------------
# Spec checking
# ---------------------------------------------------------------------------

def _env_of(trace: Trace, decls) -> dict:
    return {d.name: trace.ports[d.name] for d in decls}


def find_constraint_violation(program: Program, spec: Specification,
                              cfg: LoopConfig, rng=None,
                              deadline=None) -> Optional[Trace]:
    """An assumption-valid trace where a constraint fails, if we can find one.

    Exhaustive when the input space fits the cap; otherwise rejection
    sampling, which can miss violations but never fabricates them.
    """
    if not spec.constraints():
        return None
    decls = cfg.decls()
    space = input_space_size(cfg.ports, cfg.length)
    if space <= cfg.exhaustive_cap:
        for tr in traces_satisfying(spec, cfg.ports, cfg.length):
            if _expired(deadline):
                return None
            out = run_on_trace(program, tr, FRP_OPS, FRP_PREDS)
            if not constraints_hold(spec, tr, out):
                return tr
        return None
    rng = rng or random.Random(cfg.seed)
    for _ in range(cfg.sample_probes):
        if _expired(deadline):
            return None
        tr = sample_satisfying(spec, cfg.ports, cfg.length, rng)
        if tr is None:
            return None
        out = run_on_trace(program, tr, FRP_OPS, FRP_PREDS)
        if not constraints_hold(spec, tr, out):
            return tr
    return None


def check_spec(program: Program, spec: Specification, cfg: LoopConfig) -> bool:
    """IoPairs replay exactly; constraints hold over assumption-valid inputs."""
    for pair in spec.io_pairs():
        if run_on_trace(program, pair.trace, FRP_OPS, FRP_PREDS) != pair.expected:
            return False
    return find_constraint_violation(program, spec, cfg) is None


# ---------------------------------------------------------------------------
# Problem assembly
# ---------------------------------------------------------------------------

def _dedup_traces(traces) -> list:
    out = []
    for tr in traces:
        if not any(tr == seen for seen in out):
            out.append(tr)
    return out


def problem_for(spec: Specification, cfg: LoopConfig, extra_traces=(),
                battery=(), any_of=(), grammar=None) -> Problem:
    examples = []
    decls = cfg.decls()
    for pair in spec.io_pairs():
        examples.append((_env_of(pair.trace, decls), pair.expected))
    clause_cases = []
    cons = [c.clause for c in spec.constraints()]
    case_traces = _dedup_traces(
        [p.trace for p in spec.io_pairs()] + list(battery) + list(extra_traces)
    )
    if cons:
        for tr in case_traces:
            for cl in cons:
                clause_cases.append((tr, cl))
    else:
        # tautologies keep battery outputs in the candidate fingerprint,
        # so observational dedup cannot hide a probe-distinguishable pair
        for tr in battery:
            clause_cases.append((tr, And(())))
    return Problem(
        decls,
        cfg.out_kind,
        grammar or cfg.grammar,
        cfg.length,
        examples=examples,
        clause_cases=clause_cases,
        any_of_cases=list(any_of),
        candidate_budget=cfg.candidate_budget,
    )


def synthesize_program(spec: Specification, cfg: LoopConfig,
                       deadline=None, grammar=None) -> SynthesisResult:
    """Smallest spec-meeting program, with constraint refinement.

    Clause constraints are instantiated on the spec's own traces first; any
    candidate is then checked across the assumption-valid input space, and a
    violating trace joins the obligations for the next round.
    """
    backend = cfg.make_backend()
    rng = random.Random(cfg.seed)
    extra = []
    rounds = 0
    while rounds < cfg.cegis_rounds:
        rounds += 1
        problem = problem_for(spec, cfg, extra_traces=extra, grammar=grammar)
        res = backend.synthesize(problem, cfg.max_insns, deadline=deadline)
        if not res.ok:
            res.stats["cegis_rounds"] = rounds
            return res
        cex = find_constraint_violation(res.program, spec, cfg, rng, deadline)
        if cex is None:
            res.stats["cegis_rounds"] = rounds
            return res
        extra.append(cex)
    return SynthesisResult(None, status="budget",
                           stats={"cegis_rounds": rounds})


# ---------------------------------------------------------------------------
# Difference search
# ---------------------------------------------------------------------------

@dataclass
class CandidatePair:
    program_a: Program
    program_b: Program
    trace: Trace
    out_a: object  # signal or ERROR
    out_b: object  # signal, never ERROR


def output_equals_clause(expected):
    """Clause satisfied exactly by outputs whose cells match `expected`.

    Behavior initial values are not addressable by clauses; a pair differing
    only there is caught by the stage-B scan instead.
    """
    parts = []
    if isinstance(expected, EventStream):
        for t, c in enumerate(expected.cells):
            if c is None:
                parts.append(Not(Present("out", at(t))))
            else:
                parts.append(ValueCmp("out", at(t), "eq", c))
    elif isinstance(expected, Behavior):
        for t, c in enumerate(expected.cells):
            parts.append(ValueCmp("out", at(t), "eq", c))
    else:
        raise TypeError(expected)
    return And(tuple(parts))


def _differs(a, b) -> bool:
    return a != b


def minimize_counterexample(p: Program, q: Program, trace: Trace,
                            keep=None) -> Trace:
    """Blank event cells greedily while the two programs still disagree."""

    def good(tr: Trace) -> bool:
        if keep is not None and not keep(tr):
            return False
        return _differs(run_on_trace(p, tr, FRP_OPS, FRP_PREDS),
                        run_on_trace(q, tr, FRP_OPS, FRP_PREDS))

    assert good(trace)
    current = trace
    improved = True
    while improved:
        improved = False
        for port in sorted(current.ports):
            sig = current.ports[port]
            if not isinstance(sig, EventStream):
                continue
            for t, cell in enumerate(sig.cells):
                if cell is None:
                    continue
                cells = list(current.ports[port].cells)
                cells[t] = None
                cand = Trace(current.length,
                             {**current.ports, port: EventStream(tuple(cells))})
                if good(cand):
                    current = cand
                    improved = True
    return current


def _probe_iter(spec: Specification, cfg: LoopConfig, exhaustive: bool,
                sampled: list):
    if exhaustive:
        return traces_satisfying(spec, cfg.ports, cfg.length)
    return iter(sampled)


def _finish_pair(p: Program, p2: Program, tr: Trace, spec: Specification,
                 cfg: LoopConfig) -> CandidatePair:
    def keep(cand: Trace) -> bool:
        if not assumptions_hold(spec, cand):
            return False
        return not is_error(run_on_trace(p2, cand, FRP_OPS, FRP_PREDS))

    tr = minimize_counterexample(p, p2, tr, keep=keep)
    out_a = run_on_trace(p, tr, FRP_OPS, FRP_PREDS)
    out_b = run_on_trace(p2, tr, FRP_OPS, FRP_PREDS)
    return CandidatePair(p, p2, tr, out_a, out_b)


def _stage_a(spec, p, cfg, battery, g2, backend, rng, deadline):
    """Backend query: meets the spec, differs from p on >= 1 battery trace.

    Returns ("found", pair) | ("none", last backend status) | ("timeout", _).
    """
    p_out = [(tr, run_on_trace(p, tr, FRP_OPS, FRP_PREDS)) for tr in battery]
    any_of = []
    for tr, out in p_out:
        if is_error(out):
            # P errors here, so any well-defined output differs
            any_of.append((tr, And(())))
        else:
            any_of.append((tr, Not(output_equals_clause(out))))
    if not any_of:
        return "none", "exhausted"
    extra = []
    for _ in range(cfg.cegis_rounds):
        problem = problem_for(spec, cfg, extra_traces=extra, battery=battery,
                              any_of=any_of, grammar=g2)
        res = backend.synthesize(problem, cfg.max_insns, deadline=deadline)
        if res.status == "timeout":
            return "timeout", None
        if not res.ok:
            return "none", res.status
        p2 = res.program
        violation = find_constraint_violation(p2, spec, cfg, rng, deadline)
        if violation is not None:
            extra.append(violation)
            continue
        for tr, out in p_out:
            out2 = run_on_trace(p2, tr, FRP_OPS, FRP_PREDS)
            if not is_error(out2) and _differs(out, out2):
                return "found", _finish_pair(p, p2, tr, spec, cfg)
        raise RuntimeError("backend met the disjunction but no probe differs")
    return "none", "budget"


def _stage_b(spec, p, cfg, battery, g2, rng, probe_iter, deadline):
    """Walk the enumerative bank's spec-passing classes for a disagreement.

    Candidates whose obligation vectors differ from p's give a pair from the
    stored values; representatives matching p everywhere get a full bounded
    scan. Returns ("found", pair) | ("none", truncated?) | ("timeout", _).
    """
    problem = problem_for(spec, cfg, battery=battery, grammar=g2)
    search = EnumerativeSearch(problem)
    if deadline is not None:
        search.deadline = deadline
    search.grow_to(cfg.max_insns)
    p_values = tuple(
        run_program(p, env, FRP_OPS, FRP_PREDS, cfg.length)
        for _, env, _ in search.cases
    )
    p_text = program_dumps(p)
    full_scan = []
    for nd in search.passing_spec[: cfg.deep_candidates]:
        p2 = node_to_program(nd, problem.inputs)
        if program_dumps(p2) == p_text:
            continue
        diff_at = None
        for i, (tag, _, payload) in enumerate(search.cases):
            if tag == "example":
                continue  # pinned outputs cannot differ
            if nd.values[i] != p_values[i]:
                diff_at = payload[0]  # the clause case's trace
                break
        if diff_at is None:
            full_scan.append(p2)
            continue
        if find_constraint_violation(p2, spec, cfg, rng, deadline) is not None:
            continue
        return "found", _finish_pair(p, p2, diff_at, spec, cfg)
    for p2 in full_scan:
        if find_constraint_violation(p2, spec, cfg, rng, deadline) is not None:
            continue
        for tr in probe_iter():
            if _expired(deadline):
                return "timeout", None
            out2 = run_on_trace(p2, tr, FRP_OPS, FRP_PREDS)
            if is_error(out2):
                continue
            if _differs(run_on_trace(p, tr, FRP_OPS, FRP_PREDS), out2):
                return "found", _finish_pair(p, p2, tr, spec, cfg)
    truncated = (search.budget_hit
                 or len(search.passing_spec) > cfg.deep_candidates)
    return "none", truncated


def synthesize_different(spec: Specification, p: Program, cfg: LoopConfig,
                         round_seed: int = 0, deadline=None):
    """(CandidatePair, "found") or (None, "unique" | "unknown" | "timeout").

    The probe battery starts small and escalates geometrically whenever
    nothing distinguishable turns up, because candidates that agree on every
    battery trace collapse into one observational class and can hide a
    disagreeing member. "unique" is sound when the final battery covered the
    whole assumption-valid space; at the escalation cap it additionally
    relies on the per-class full scans, so it is relative to the classes the
    bank represents. Truncated searches and sampled probe spaces degrade the
    verdict to "unknown".
    """
    backend = cfg.make_backend()
    rng = random.Random("%d:%d" % (cfg.seed, round_seed))
    g2 = reorder_grammar(cfg.grammar, cfg.seed + round_seed)
    space = input_space_size(cfg.ports, cfg.length)
    exhaustive = space <= cfg.exhaustive_cap
    sampled = []
    if not exhaustive:
        seen = set()
        for _ in range(cfg.sample_probes):
            tr = sample_satisfying(spec, cfg.ports, cfg.length, rng)
            if tr is None:
                break
            key = repr(trace_to_json(tr))
            if key not in seen:
                seen.add(key)
                sampled.append(tr)

    def probe_iter():
        return _probe_iter(spec, cfg, exhaustive, sampled)

    enum = isinstance(backend, EnumerativeBackend)
    batt_size = max(1, cfg.differ_battery)
    while True:
        battery = list(itertools.islice(probe_iter(), batt_size + 1))
        covered = len(battery) <= batt_size
        battery = battery[:batt_size]
        if enum:
            # the bank walk subsumes the disjunctive backend query here and
            # costs a single grow, so stage A is solver-backend only
            verdict, info = _stage_b(spec, p, cfg, battery, g2, rng,
                                     probe_iter, deadline)
            truncated = bool(info)
        else:
            verdict, info = _stage_a(spec, p, cfg, battery, g2, backend, rng,
                                     deadline)
            truncated = info != "exhausted"
        if verdict == "found":
            return info, "found"
        if verdict == "timeout":
            return None, "timeout"
        if covered:
            if exhaustive and not truncated:
                return None, "unique"
            return None, "unknown"
        if batt_size >= cfg.battery_cap:
            # classes were audited via full scans, but members collapsed
            # into another class beyond the battery cannot be ruled out
            return None, "unknown" if (truncated or not exhaustive) else "unique"
        batt_size = min(batt_size * 4, cfg.battery_cap)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

ACCEPT_A = "accept_a"
ACCEPT_B = "accept_b"
CORRECT = "correct"
ADD_ITEMS = "items"
ABORT = "abort"


@dataclass(frozen=True)
class Answer:
    kind: str
    output: object = None  # for CORRECT: the corrected output signal
    items: tuple = ()  # for ADD_ITEMS


class ScriptedOracle:
    """Answers computed from a hidden reference program.

    `additions` optionally schedules extra spec items: {interaction: [items]}
    mimics a user who adds invariants mid-session before judging more pairs.
    """

    def __init__(self, reference: Program, additions=None):
        self.reference = reference
        self.additions = dict(additions or {})
        self.asked = 0

    def ask(self, pair: CandidatePair, spec: Specification) -> Answer:
        self.asked += 1
        pending = self.additions.pop(self.asked, None)
        if pending is not None:
            return Answer(ADD_ITEMS, items=tuple(pending))
        want = run_on_trace(self.reference, pair.trace, FRP_OPS, FRP_PREDS)
        if is_error(want):
            raise RuntimeError("reference program errored on a probe trace")
        if want == pair.out_a:
            return Answer(ACCEPT_A)
        if want == pair.out_b:
            return Answer(ACCEPT_B)
        return Answer(CORRECT, output=want)


# ---------------------------------------------------------------------------
# Session state machine
# ---------------------------------------------------------------------------

@dataclass
class LoopResult:
    program: Optional[Program]
    status: str  # unique | unsat | timeout | unknown | aborted | interaction-limit
    spec: Specification
    transcript: list
    interactions: int

    @property
    def ok(self) -> bool:
        return self.status == "unique" and self.program is not None


class LoopStateError(RuntimeError):
    pass


def _out_json(v):
    if is_error(v):
        return {"error": True}
    return _signal_to_json(v)


class LoopSession:
    """Stepper: advance() until a pair is pending, answer(), repeat."""

    def __init__(self, spec: Specification, cfg: LoopConfig,
                 max_interactions: int = 25):
        self.spec = spec
        self.cfg = cfg
        self.max_interactions = max_interactions
        self.pending: Optional[CandidatePair] = None
        self.program: Optional[Program] = None
        self.result: Optional[LoopResult] = None
        self.interactions = 0
        self.transcript = [
            {
                "event": "session",
                "length": cfg.length,
                "max_insns": cfg.max_insns,
                "seed": cfg.seed,
                "spec": [item_to_json(i) for i in spec.items],
            }
        ]

    def _finish(self, status: str, program) -> LoopResult:
        self.transcript.append({
            "event": "done",
            "status": status,
            "program": program_to_json(program) if program else None,
            "interactions": self.interactions,
        })
        self.result = LoopResult(program, status, self.spec,
                                 self.transcript, self.interactions)
        self.pending = None
        return self.result

    def advance(self) -> dict:
        """Run until an oracle answer is needed or the session finishes."""
        if self.result is not None or self.pending is not None:
            return self.snapshot()
        deadline = _deadline(self.cfg)
        res = synthesize_program(self.spec, self.cfg, deadline=deadline)
        if res.program is None:
            status = "unsat" if res.status == "exhausted" else res.status
            self.transcript.append({"event": "synthesized", "status": status,
                                    "program": None})
            self._finish(status, None)
            return self.snapshot()
        self.program = res.program
        self.transcript.append({
            "event": "synthesized",
            "status": "sat",
            "program": program_to_json(res.program),
            "insns": len(res.program.insns),
            "cegis_rounds": res.stats.get("cegis_rounds", 1),
        })
        pair, dstatus = synthesize_different(
            self.spec, self.program, self.cfg,
            round_seed=self.interactions, deadline=_deadline(self.cfg),
        )
        if pair is None:
            self.transcript.append({"event": "different", "status": dstatus})
            self._finish(dstatus, self.program)
        else:
            self.pending = pair
            self.transcript.append({
                "event": "candidates",
                "program_a": program_to_json(pair.program_a),
                "program_b": program_to_json(pair.program_b),
                "input": trace_to_json(pair.trace),
                "out_a": _out_json(pair.out_a),
                "out_b": _out_json(pair.out_b),
            })
        return self.snapshot()

    def answer(self, ans: Answer) -> dict:
        if self.result is not None:
            raise LoopStateError("session already finished")
        if self.pending is None:
            raise LoopStateError("no candidate pair awaiting an answer")
        pair = self.pending
        event = {"event": "answer", "kind": ans.kind}
        if ans.kind == ABORT:
            self.transcript.append(event)
            self._finish("aborted", self.program)
            return self.snapshot()
        if ans.kind == ACCEPT_A:
            if is_error(pair.out_a):
                raise LoopStateError("cannot accept an erroring output")
            items = (IoPair(pair.trace, pair.out_a),)
        elif ans.kind == ACCEPT_B:
            items = (IoPair(pair.trace, pair.out_b),)
        elif ans.kind == CORRECT:
            items = (IoPair(pair.trace, ans.output),)
        elif ans.kind == ADD_ITEMS:
            if not ans.items:
                raise LoopStateError("no items supplied")
            items = tuple(ans.items)
        else:
            raise LoopStateError("unknown answer kind %r" % ans.kind)
        event["items"] = [item_to_json(i) for i in items]
        self.transcript.append(event)
        self.spec = self.spec.with_items(items)
        self.pending = None
        self.interactions += 1
        if self.interactions >= self.max_interactions:
            self._finish("interaction-limit", self.program)
        return self.snapshot()

    def snapshot(self) -> dict:
        if self.result is not None:
            return {
                "state": "done",
                "status": self.result.status,
                "program": (program_to_json(self.result.program)
                            if self.result.program else None),
                "interactions": self.interactions,
            }
        if self.pending is not None:
            return {"state": "pending", "candidates": self.transcript[-1]}
        return {"state": "idle", "interactions": self.interactions}


def synthesis_loop(spec: Specification, oracle, cfg: LoopConfig,
                   max_interactions: int = 25) -> LoopResult:
    session = LoopSession(spec, cfg, max_interactions)
    while session.result is None:
        session.advance()
        if session.result is not None:
            break
        session.answer(oracle.ask(session.pending, session.spec))
    return session.result


# ---------------------------------------------------------------------------
# Bounded equivalence
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    kind: str  # equal | counterexample | inconclusive
    witness: Optional[Trace] = None
    checked: int = 0
    exhaustive: bool = False


def verify_equivalent(p: Program, q: Program, ports, length: int,
                      exhaustive_cap: int = 1_000_000,
                      samples: int = 10_000, seed: int = 0,
                      deadline=None) -> Verdict:
    """Compare two programs over every trace at this length and bound.

    Exhaustive below the cap. Above it, random search can only ever return
    a counterexample or an honest "inconclusive", never Equal.
    """
    from .traces import enumerate_traces, random_trace

    space = input_space_size(ports, length)
    checked = 0
    if space <= exhaustive_cap:
        for tr in enumerate_traces(ports, length):
            if _expired(deadline):
                return Verdict("inconclusive", checked=checked)
            checked += 1
            if _differs(run_on_trace(p, tr, FRP_OPS, FRP_PREDS),
                        run_on_trace(q, tr, FRP_OPS, FRP_PREDS)):
                tr = minimize_counterexample(p, q, tr)
                return Verdict("counterexample", witness=tr, checked=checked,
                               exhaustive=True)
        return Verdict("equal", checked=checked, exhaustive=True)
    rng = random.Random(seed)
    for _ in range(samples):
        if _expired(deadline):
            break
        tr = random_trace(rng, ports, length)
        checked += 1
        if _differs(run_on_trace(p, tr, FRP_OPS, FRP_PREDS),
                    run_on_trace(q, tr, FRP_OPS, FRP_PREDS)):
            tr = minimize_counterexample(p, q, tr)
            return Verdict("counterexample", witness=tr, checked=checked)
    return Verdict("inconclusive", checked=checked)


# ---------------------------------------------------------------------------
# Full-specification synthesis (reference-equivalence CEGIS)
# ---------------------------------------------------------------------------

@dataclass
class FullSynthesisResult:
    program: Optional[Program]
    status: str  # sat | exhausted | budget | timeout | inconclusive
    rounds: int
    verdict: Optional[Verdict]
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "sat" and self.program is not None


def synthesize_full(reference: Program, cfg: LoopConfig,
                    deadline=None, max_rounds: int = 64) -> FullSynthesisResult:
    """A program equivalent to the reference on all bounded inputs.

    Counterexample-guided: solve on a growing trace set, verify against the
    reference, feed the first disagreeing trace back as a new example.
    """
    from .traces import enumerate_traces

    backend = cfg.make_backend()
    decls = cfg.decls()
    examples = []
    for tr in enumerate_traces(cfg.ports, cfg.length):
        want = run_on_trace(reference, tr, FRP_OPS, FRP_PREDS)
        if not is_error(want):
            examples.append((_env_of(tr, decls), want))
            break
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        problem = Problem(decls, cfg.out_kind, cfg.grammar, cfg.length,
                          examples=list(examples),
                          candidate_budget=cfg.candidate_budget)
        res = backend.synthesize(problem, cfg.max_insns, deadline=deadline)
        if not res.ok:
            return FullSynthesisResult(None, res.status, rounds, None,
                                       stats=res.stats)
        verdict = verify_equivalent(
            res.program, reference, cfg.ports, cfg.length,
            exhaustive_cap=cfg.exhaustive_cap, samples=cfg.verify_samples,
            seed=cfg.seed, deadline=deadline,
        )
        if verdict.kind == "equal":
            return FullSynthesisResult(res.program, "sat", rounds, verdict,
                                       stats=res.stats)
        if verdict.kind == "counterexample":
            want = run_on_trace(reference, verdict.witness, FRP_OPS, FRP_PREDS)
            if is_error(want):
                return FullSynthesisResult(res.program, "inconclusive",
                                           rounds, verdict, stats=res.stats)
            examples.append((_env_of(verdict.witness, decls), want))
            continue
        return FullSynthesisResult(res.program, "inconclusive", rounds,
                                   verdict, stats=res.stats)
    return FullSynthesisResult(None, "budget", rounds, None)
