"""HTTP session API for the interactive refinement loop.

One session holds one loop: create it with ports and bounds, seed spec items,
poll `/candidates` to run synthesis until a distinguishing pair is pending,
then post an answer. The transcript endpoint exposes the full deterministic
event log at any point.

Sessions serialize on a per-session lock; synthesis runs inside the request
that asked for candidates.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import Body, FastAPI, HTTPException

from .backends import parse_backend
from .benchmarks import BENCHMARKS, bench_config
from .loop import (
    ABORT,
    ACCEPT_A,
    ACCEPT_B,
    ADD_ITEMS,
    Answer,
    CORRECT,
    LoopConfig,
    LoopSession,
    LoopStateError,
)
from .frp import FRP_OPS, FRP_PREDS
from .programs import K_BEHAVIOR, K_STREAM, format_program
from .sketch import frp_grammar
from .specs import IoPair, Specification, _signal_from_json, item_from_json
from .traces import port_from_json, port_to_json, validate_trace


@dataclass
class _SessionState:
    cfg: LoopConfig
    max_interactions: int
    items: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    session: Optional[LoopSession] = None

    def ensure(self) -> LoopSession:
        if self.session is None:
            spec = Specification(self.cfg.length, tuple(self.items))
            self.session = LoopSession(spec, self.cfg, self.max_interactions)
        return self.session

    @property
    def started(self) -> bool:
        s = self.session
        # The constructor emits one header event; anything past that means
        # synthesis has run and the spec can only grow through answers.
        return s is not None and (len(s.transcript) > 1 or s.result is not None)


def _bad(detail: str, code: int = 422):
    raise HTTPException(status_code=code, detail=detail)


def _session_config(body: dict) -> tuple:
    seed = int(body.get("seed", 0))
    step_timeout = body.get("step_timeout")
    backend_name = body.get("backend", "enum")
    try:
        backend = parse_backend(backend_name)
    except ValueError as exc:
        _bad(str(exc))
    overrides = dict(seed=seed, backend=backend)
    if step_timeout is not None:
        overrides["step_timeout"] = float(step_timeout)
    name = body.get("benchmark")
    if name is not None:
        b = BENCHMARKS.get(name)
        if b is None:
            _bad("unknown benchmark %r" % name)
        if body.get("length") is not None:
            overrides["length"] = int(body["length"])
        if body.get("max_insns") is not None:
            overrides["max_insns"] = int(body["max_insns"])
        return bench_config(b, **overrides), name
    raw_ports = body.get("ports")
    if not isinstance(raw_ports, list) or not raw_ports:
        _bad("need a benchmark name or a non-empty ports list")
    try:
        ports = tuple(port_from_json(p) for p in raw_ports)
    except (KeyError, TypeError, ValueError) as exc:
        _bad("bad port: %s" % exc)
    for p in ports:
        if not p.domain:
            _bad("port %r has an empty domain" % p.name)
    out_kind = body.get("out_kind", "events")
    if out_kind not in ("events", "behavior"):
        _bad("out_kind must be events or behavior")
    bound = int(body.get("bound", 5))
    cfg = LoopConfig(
        ports=ports,
        out_kind=K_BEHAVIOR if out_kind == "behavior" else K_STREAM,
        grammar=frp_grammar(consts=tuple(range(bound + 1))),
        length=int(body.get("length", 3)),
        max_insns=int(body.get("max_insns", 5)),
        **overrides,
    )
    return cfg, None


def _parse_items(body: dict, length: int) -> list:
    raw = body.get("items")
    if not isinstance(raw, list) or not raw:
        _bad("need a non-empty items list")
    if "length" in body and int(body["length"]) != length:
        _bad("spec length %s does not match session length %d"
             % (body["length"], length))
    items = []
    for d in raw:
        try:
            item = item_from_json(d, length)
            if isinstance(item, IoPair):
                if item.trace.length != length:
                    raise ValueError(
                        "io pair trace length %d does not match session length %d"
                        % (item.trace.length, length)
                    )
                validate_trace(item.trace)
        except (KeyError, TypeError, ValueError) as exc:
            _bad("bad spec item: %s" % exc)
        items.append(item)
    return items


def _parse_answer(body: dict, length: int) -> Answer:
    kind = body.get("kind")
    if kind in (ACCEPT_A, ACCEPT_B, ABORT):
        return Answer(kind)
    if kind == CORRECT:
        if "output" not in body:
            _bad("kind correct needs an output signal")
        try:
            sig = _signal_from_json(body["output"], length)
        except (KeyError, TypeError, ValueError) as exc:
            _bad("bad output signal: %s" % exc)
        return Answer(CORRECT, output=sig)
    if kind == ADD_ITEMS:
        return Answer(ADD_ITEMS, items=tuple(_parse_items(body, length)))
    _bad("kind must be one of accept_a, accept_b, correct, items, abort")


def create_app() -> FastAPI:
    app = FastAPI(title="frpsynth sessions")
    sessions: dict = {}
    ids = itertools.count(1)
    registry_lock = threading.Lock()

    def lookup(sid: str) -> _SessionState:
        state = sessions.get(sid)
        if state is None:
            _bad("unknown session %r" % sid, code=404)
        return state

    @app.get("/benchmarks")
    def list_benchmarks():
        out = []
        for name in sorted(BENCHMARKS):
            b = BENCHMARKS[name]
            out.append({
                "name": name,
                "description": b.description,
                "ports": [port_to_json(p) for p in b.ports],
                "out_kind": b.out_kind,
                "length": b.length,
                "max_insns": b.max_insns,
            })
        return {"benchmarks": out}

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        cfg, bench_name = _session_config(body)
        max_interactions = int(body.get("max_interactions", 25))
        state = _SessionState(cfg, max_interactions)
        with registry_lock:
            sid = "s%d" % next(ids)
            sessions[sid] = state
        doc = {
            "id": sid,
            "state": "new",
            "length": cfg.length,
            "max_insns": cfg.max_insns,
            "seed": cfg.seed,
            "out_kind": cfg.out_kind,
            "ports": [port_to_json(p) for p in cfg.ports],
        }
        if bench_name:
            doc["benchmark"] = bench_name
        return doc

    @app.post("/sessions/{sid}/spec")
    def post_spec(sid: str, body: dict = Body(...)):
        state = lookup(sid)
        with state.lock:
            if state.started:
                _bad("session already started; add items via an answer",
                     code=409)
            items = _parse_items(body, state.cfg.length)
            state.items.extend(items)
            state.session = None
            return {"id": sid, "items": len(state.items)}

    @app.get("/sessions/{sid}/candidates")
    def get_candidates(sid: str):
        state = lookup(sid)
        with state.lock:
            session = state.ensure()
            snap = session.advance()
            doc = {"id": sid, **snap}
            # Pretty prints ride on the response only; stored transcripts
            # keep the pure JSON encoding.
            pair = session.pending
            if pair is not None:
                doc["pretty_a"] = format_program(pair.program_a, FRP_OPS,
                                                 FRP_PREDS, name="candidate_a")
                doc["pretty_b"] = format_program(pair.program_b, FRP_OPS,
                                                 FRP_PREDS, name="candidate_b")
            elif session.result is not None and session.result.program:
                doc["pretty"] = format_program(session.result.program,
                                               FRP_OPS, FRP_PREDS)
            return doc

    @app.post("/sessions/{sid}/answer")
    def post_answer(sid: str, body: dict = Body(...)):
        state = lookup(sid)
        with state.lock:
            session = state.ensure()
            if session.pending is None:
                _bad("no candidate pair awaiting an answer", code=409)
            ans = _parse_answer(body, state.cfg.length)
            try:
                snap = session.answer(ans)
            except LoopStateError as exc:
                _bad(str(exc), code=409)
            return {"id": sid, **snap}

    @app.get("/sessions/{sid}/transcript")
    def get_transcript(sid: str):
        state = lookup(sid)
        with state.lock:
            session = state.ensure()
            return {
                "id": sid,
                "state": session.snapshot()["state"],
                "transcript": session.transcript,
            }

    return app


app = create_app()
