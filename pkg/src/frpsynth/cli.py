"""Command line front end.

Subcommands cover single-program execution (`run`), synthesis against a
reference program (`synth-full`), programming by example (`synth-pbe`), the
interactive refinement loop (`loop`), the two benchmark suites
(`bench-lists`, `bench-frp`), bounded equivalence checking (`verify`), and
the HTTP session service (`serve`).

Exit codes: 0 when every job completed, 2 when any job timed out, 1 for
harness errors such as bad arguments or malformed input files.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace

from .backends import DEFAULT_CANDIDATE_BUDGET, parse_backend
from .benchmarks import BENCHMARKS, bench_config
from .frp import FRP_OPS, FRP_PREDS
from .listdsl import LIST_OPS, LIST_PREDS
from .loop import (
    ACCEPT_A,
    ACCEPT_B,
    ABORT,
    ADD_ITEMS,
    Answer,
    CORRECT,
    LoopConfig,
    ScriptedOracle,
    synthesis_loop,
    synthesize_full,
    synthesize_program,
    verify_equivalent,
)
from .programs import (
    K_BEHAVIOR,
    K_INT,
    K_LIST,
    K_STREAM,
    PortDecl,
    format_program,
    program_from_json,
    program_to_json,
    run_on_trace,
    run_program,
)
from .sketch import frp_grammar, list_grammar
from .specs import (
    IoPair,
    Specification,
    _signal_from_json,
    _signal_to_json,
    item_from_json,
    spec_from_json,
)
from .traces import (
    Trace,
    is_error,
    port_from_json,
    quiet_trace,
    trace_from_json,
    trace_to_json,
    validate_trace,
)


class CliError(Exception):
    """Bad arguments or malformed input files; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # Usage errors are harness errors (exit 1), not the timeout code 2
    # that stock argparse would exit with.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


# ---------------------------------------------------------------------------
# Input and output helpers
# ---------------------------------------------------------------------------

def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("cannot read %s: %s" % (path, exc))


def _load_program(path: str):
    obj = _read_json(path)
    try:
        return program_from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError("bad program in %s: %s" % (path, exc))


def _load_ports(path: str) -> tuple:
    obj = _read_json(path)
    if not isinstance(obj, list) or not obj:
        raise CliError("%s: expected a non-empty list of port objects" % path)
    try:
        return tuple(port_from_json(d) for d in obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError("bad port in %s: %s" % (path, exc))


def _emit(doc, out_path=None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path and out_path != "-":
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_text(text, out_path=None):
    if out_path and out_path != "-":
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _plain(v):
    """Plain JSON shape for a list-DSL value."""
    if is_error(v):
        return {"error": True}
    if isinstance(v, tuple):
        return list(v)
    return v


def _signal_json(out):
    if is_error(out):
        return {"error": True}
    return _signal_to_json(out)


def _verdict_json(v, length):
    doc = {
        "length": length,
        "kind": v.kind,
        "checked": v.checked,
        "exhaustive": v.exhaustive,
    }
    if v.witness is not None:
        doc["witness"] = trace_to_json(v.witness)
    return doc


def _program_doc(program, ops, preds):
    if program is None:
        return None
    return {
        "json": program_to_json(program),
        "pretty": format_program(program, ops, preds),
    }


def _deadline_from(args):
    if args.timeout is None:
        return None
    return time.monotonic() + args.timeout


# ---------------------------------------------------------------------------
# Session setup shared by synth-full / synth-pbe / loop / verify
# ---------------------------------------------------------------------------

def _benchmark(name: str):
    b = BENCHMARKS.get(name)
    if b is None:
        raise CliError(
            "unknown benchmark %r (choose from: %s)"
            % (name, ", ".join(sorted(BENCHMARKS)))
        )
    return b


def _frp_config(args) -> LoopConfig:
    """LoopConfig from --benchmark or from --ports plus bounds."""
    overrides = {"seed": args.seed, "backend": parse_backend(args.backend)}
    if getattr(args, "budget", None):
        overrides["candidate_budget"] = args.budget
    if args.benchmark:
        b = _benchmark(args.benchmark)
        if args.length is not None:
            overrides["length"] = args.length
        if args.insns is not None:
            overrides["max_insns"] = args.insns
        return bench_config(b, **overrides)
    if not args.ports:
        raise CliError("need --benchmark or --ports")
    ports = _load_ports(args.ports)
    out_kind = K_BEHAVIOR if args.out_kind == "behavior" else K_STREAM
    return LoopConfig(
        ports=ports,
        out_kind=out_kind,
        grammar=frp_grammar(consts=tuple(range(args.bound + 1))),
        length=args.length if args.length is not None else 3,
        max_insns=args.insns if args.insns is not None else 5,
        **overrides,
    )


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    program = _load_program(args.program)
    if args.trace:
        trace = trace_from_json(_read_json(args.trace))
        validate_trace(trace)
        out = run_on_trace(program, trace, FRP_OPS, FRP_PREDS)
        _emit({"output": _signal_json(out)}, args.out)
        return 0
    if not args.env:
        raise CliError("need --trace (stream program) or --env (list program)")
    raw = _read_json(args.env)
    if not isinstance(raw, dict):
        raise CliError("%s: expected an object of input bindings" % args.env)
    env = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
    out = run_program(program, env, LIST_OPS, LIST_PREDS)
    _emit({"output": _plain(out)}, args.out)
    return 0


# ---------------------------------------------------------------------------
# synth-full
# ---------------------------------------------------------------------------

def cmd_synth_full(args) -> int:
    cfg = _frp_config(args)
    if args.reference:
        reference = _load_program(args.reference)
    elif args.benchmark:
        reference = _benchmark(args.benchmark).reference
    else:
        raise CliError("need --benchmark or --reference")
    deadline = _deadline_from(args)
    res = synthesize_full(reference, cfg, deadline=deadline)
    doc = {
        "status": res.status,
        "rounds": res.rounds,
        "program": _program_doc(res.program, FRP_OPS, FRP_PREDS),
        "stats": res.stats,
    }
    if res.program is not None:
        length = cfg.length + args.verify_extra
        v = verify_equivalent(
            res.program, reference, cfg.ports, length,
            exhaustive_cap=args.exhaustive_cap, samples=0,
            seed=args.seed, deadline=deadline,
        )
        doc["verify"] = _verdict_json(v, length)
    _emit(doc, args.out)
    return 2 if res.status == "timeout" else 0


# ---------------------------------------------------------------------------
# synth-pbe
# ---------------------------------------------------------------------------

def _list_examples(obj) -> list:
    if isinstance(obj, dict):
        obj = obj.get("examples", obj)
    if not isinstance(obj, list) or not obj:
        raise CliError("expected a non-empty list of {inputs, output} examples")
    pairs = []
    for ex in obj:
        env = {
            k: tuple(v) if isinstance(v, list) else v
            for k, v in ex["inputs"].items()
        }
        want = ex["output"]
        pairs.append((env, tuple(want) if isinstance(want, list) else want))
    return pairs


def _pbe_lists(args) -> int:
    from .backends import Problem

    pairs = _list_examples(_read_json(args.examples))
    env0, out0 = pairs[0]
    decls = tuple(
        PortDecl(name, K_LIST if isinstance(v, tuple) else K_INT)
        for name, v in env0.items()
    )
    problem = Problem(
        decls,
        K_LIST if isinstance(out0, tuple) else K_INT,
        list_grammar(),
        0,
        examples=pairs,
        candidate_budget=args.budget or DEFAULT_CANDIDATE_BUDGET,
    )
    backend = parse_backend(args.backend)
    max_insns = args.insns if args.insns is not None else 5
    res = backend.synthesize(problem, max_insns, deadline=_deadline_from(args))
    doc = {
        "status": res.status,
        "program": _program_doc(res.program, LIST_OPS, LIST_PREDS),
        "stats": res.stats,
    }
    _emit(doc, args.out)
    return 2 if res.status == "timeout" else 0


def _frp_spec_from_file(obj) -> Specification:
    if isinstance(obj, dict) and "items" in obj:
        return spec_from_json(obj)
    if isinstance(obj, list) and obj:
        length = obj[0]["trace"]["length"]
        items = tuple(
            item_from_json({"item": "io_pair", **d}, length) for d in obj
        )
        return Specification(length, items)
    raise CliError("expected a spec object or a list of {trace, expected} pairs")


def _pbe_frp(args) -> int:
    spec = _frp_spec_from_file(_read_json(args.examples))
    cfg = _frp_config(args)
    if spec.length != cfg.length:
        if args.length is not None:
            raise CliError("spec length %d does not match --length %d"
                           % (spec.length, args.length))
        cfg = replace(cfg, length=spec.length)
    res = synthesize_program(spec, cfg, deadline=_deadline_from(args))
    doc = {
        "status": res.status,
        "program": _program_doc(res.program, FRP_OPS, FRP_PREDS),
        "stats": res.stats,
    }
    _emit(doc, args.out)
    return 2 if res.status == "timeout" else 0


def cmd_synth_pbe(args) -> int:
    if args.dsl == "list":
        return _pbe_lists(args)
    return _pbe_frp(args)


# ---------------------------------------------------------------------------
# loop
# ---------------------------------------------------------------------------

class InteractiveOracle:
    """Prompts a human on stderr; reads one answer per line from stdin.

    Accepted lines: `a` / `b` (accept a candidate), `x` (abort),
    `c <signal json>` (supply the correct output for the probe trace),
    `items <path>` (add spec items from a JSON file).
    """

    def __init__(self, length: int):
        self.length = length

    def ask(self, pair, spec) -> Answer:
        err = sys.stderr
        print("--- candidate A " + "-" * 24, file=err)
        print(format_program(pair.program_a, FRP_OPS, FRP_PREDS, "a"), file=err)
        print("--- candidate B " + "-" * 24, file=err)
        print(format_program(pair.program_b, FRP_OPS, FRP_PREDS, "b"), file=err)
        print("--- distinguishing input ---", file=err)
        print(json.dumps(trace_to_json(pair.trace)), file=err)
        print("out A: %s" % json.dumps(_signal_json(pair.out_a)), file=err)
        print("out B: %s" % json.dumps(_signal_json(pair.out_b)), file=err)
        while True:
            print("[a|b|c <signal json>|items <path>|x] > ",
                  end="", file=err, flush=True)
            line = sys.stdin.readline()
            if not line:
                return Answer(ABORT)
            line = line.strip()
            if line == "a":
                return Answer(ACCEPT_A)
            if line == "b":
                return Answer(ACCEPT_B)
            if line == "x":
                return Answer(ABORT)
            if line.startswith("c "):
                try:
                    sig = _signal_from_json(json.loads(line[2:]), self.length)
                    return Answer(CORRECT, output=sig)
                except (ValueError, KeyError, TypeError) as exc:
                    print("bad signal: %s" % exc, file=err)
                    continue
            if line.startswith("items "):
                try:
                    raw = _read_json(line.split(None, 1)[1])
                    items = tuple(item_from_json(d, self.length) for d in raw)
                    return Answer(ADD_ITEMS, items=items)
                except (CliError, ValueError, KeyError, TypeError) as exc:
                    print("bad items: %s" % exc, file=err)
                    continue
            print("unrecognized answer %r" % line, file=err)


def cmd_loop(args) -> int:
    cfg = _frp_config(args)
    if args.timeout is not None:
        cfg = replace(cfg, step_timeout=args.timeout)
    reference = None
    if args.oracle == "interactive":
        oracle = InteractiveOracle(cfg.length)
    elif args.oracle == "scripted":
        if not args.benchmark:
            raise CliError("--oracle scripted needs --benchmark "
                           "(or use scripted:<program.json>)")
        reference = _benchmark(args.benchmark).reference
        oracle = ScriptedOracle(reference)
    elif args.oracle.startswith("scripted:"):
        reference = _load_program(args.oracle.split(":", 1)[1])
        oracle = ScriptedOracle(reference)
    else:
        raise CliError("--oracle must be interactive, scripted, "
                       "or scripted:<program.json>")
    if args.spec:
        spec = spec_from_json(_read_json(args.spec))
        if spec.length != cfg.length:
            raise CliError("spec length %d does not match session length %d"
                           % (spec.length, cfg.length))
    elif reference is not None:
        quiet = quiet_trace(cfg.ports, cfg.length)
        out0 = run_on_trace(reference, quiet, FRP_OPS, FRP_PREDS)
        if is_error(out0):
            raise CliError("reference errors on the quiet trace; pass --spec")
        spec = Specification(cfg.length, (IoPair(quiet, out0),))
    else:
        spec = Specification(cfg.length, ())
    res = synthesis_loop(spec, oracle, cfg,
                         max_interactions=args.max_interactions)
    doc = {
        "status": res.status,
        "interactions": res.interactions,
        "program": _program_doc(res.program, FRP_OPS, FRP_PREDS),
        "transcript": res.transcript,
    }
    _emit(doc, args.out)
    return 2 if res.status == "timeout" else 0


# ---------------------------------------------------------------------------
# bench-lists / bench-frp
# ---------------------------------------------------------------------------

def cmd_bench_lists(args) -> int:
    from .bench import BenchConfig, report_to_json, run_deepcoder_bench

    kw = dict(
        count=args.count,
        io_pairs=args.io_pairs,
        list_length=args.list_length,
        value_range=(-args.bound, args.bound),
        seed=args.seed,
        backend=args.backend,
        workers=args.workers,
    )
    if args.insns is not None:
        kw["program_length"] = args.insns
    if args.timeout is not None:
        kw["timeout"] = args.timeout
    if args.budget:
        kw["candidate_budget"] = args.budget
    report = run_deepcoder_bench(BenchConfig(**kw))
    _emit_text(report_to_json(report, include_times=args.include_times),
               args.out)
    return 2 if report.any_timeout else 0


def cmd_bench_frp(args) -> int:
    from .bench import FrpSweep, report_to_json, run_frp_bench

    kw = dict(
        verify_extra=args.verify_extra,
        seed=args.seed,
        backend=args.backend,
        workers=args.workers,
    )
    if args.names:
        names = tuple(args.names.split(","))
        for n in names:
            _benchmark(n)
        kw["names"] = names
    if args.ns:
        kw["ns"] = tuple(int(x) for x in args.ns.split(","))
    if args.lengths:
        kw["lengths"] = tuple(int(x) for x in args.lengths.split(","))
    if args.timeout is not None:
        kw["timeout"] = args.timeout
    if args.budget:
        kw["candidate_budget"] = args.budget
    report = run_frp_bench(FrpSweep(**kw))
    _emit_text(report_to_json(report, include_times=args.include_times),
               args.out)
    return 2 if report.any_timeout else 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    program = _load_program(args.program)
    if args.benchmark:
        b = _benchmark(args.benchmark)
        against = _load_program(args.against) if args.against else b.reference
        ports = b.ports
        length = args.length if args.length is not None else b.length + 2
    else:
        if not (args.against and args.ports):
            raise CliError("need --benchmark or both --against and --ports")
        against = _load_program(args.against)
        ports = _load_ports(args.ports)
        if args.length is None:
            raise CliError("--length is required without --benchmark")
        length = args.length
    deadline = _deadline_from(args)
    v = verify_equivalent(
        program, against, ports, length,
        exhaustive_cap=args.exhaustive_cap, samples=args.samples,
        seed=args.seed, deadline=deadline,
    )
    _emit(_verdict_json(v, length), args.out)
    timed_out = deadline is not None and time.monotonic() > deadline
    return 2 if (v.kind == "inconclusive" and timed_out) else 0


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------

def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port,
                log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="RNG seed (default 0)")
    common.add_argument("--timeout", type=float, default=None,
                        help="wall-clock budget in seconds")
    common.add_argument("--backend", default="enum",
                        help="solver backend: enum or smtlib:<command>")
    common.add_argument("--length", type=int, default=None,
                        help="trace length override")
    common.add_argument("--insns", type=int, default=None,
                        help="instruction-count bound override")
    common.add_argument("--bound", type=int, default=5,
                        help="constant/value magnitude bound (default 5)")
    common.add_argument("--out", default=None,
                        help="write the JSON result to this file")

    session = _Parser(add_help=False)
    session.add_argument("--benchmark", default=None,
                         help="named benchmark supplying ports and bounds")
    session.add_argument("--ports", default=None,
                         help="JSON file with port declarations")
    session.add_argument("--out-kind", choices=("events", "behavior"),
                         default="events",
                         help="output kind when --ports is used")
    session.add_argument("--budget", type=int, default=None,
                         help="candidate evaluation budget")

    top = _Parser(prog="frpsynth",
                  description="Synthesize stream programs interactively.")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("run", parents=[common],
                       help="execute a program on a trace or list inputs")
    p.add_argument("--program", required=True, help="program JSON file")
    p.add_argument("--trace", help="trace JSON file (stream programs)")
    p.add_argument("--env", help="input bindings JSON file (list programs)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("synth-full", parents=[common, session],
                       help="resynthesize a reference program and verify")
    p.add_argument("--reference", default=None,
                   help="reference program JSON (defaults to the benchmark's)")
    p.add_argument("--verify-extra", type=int, default=2,
                   help="extra trace length for the closing check (default 2)")
    p.add_argument("--exhaustive-cap", type=int, default=1_000_000,
                   help="max input space size for exhaustive verification")
    p.set_defaults(func=cmd_synth_full)

    p = sub.add_parser("synth-pbe", parents=[common, session],
                       help="synthesize from input/output examples")
    p.add_argument("--dsl", choices=("list", "frp"), required=True)
    p.add_argument("--examples", required=True,
                   help="JSON examples (list) or spec/io pairs (frp)")
    p.set_defaults(func=cmd_synth_pbe)

    p = sub.add_parser("loop", parents=[common, session],
                       help="run the interactive refinement loop")
    p.add_argument("--oracle", default="interactive",
                   help="interactive, scripted, or scripted:<program.json>")
    p.add_argument("--spec", default=None,
                   help="initial spec JSON (default: quiet-trace seed)")
    p.add_argument("--max-interactions", type=int, default=25)
    p.set_defaults(func=cmd_loop)

    p = sub.add_parser("bench-lists", parents=[common],
                       help="random list-program suite from examples")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--io-pairs", type=int, default=5)
    p.add_argument("--list-length", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--include-times", action="store_true",
                   help="keep wall-clock fields in the report")
    p.set_defaults(func=cmd_bench_lists)

    p = sub.add_parser("bench-frp", parents=[common],
                       help="resynthesis sweep over the stream benchmarks")
    p.add_argument("--names", default=None, help="comma-separated benchmarks")
    p.add_argument("--ns", default=None,
                   help="comma-separated instruction bounds")
    p.add_argument("--lengths", default=None,
                   help="comma-separated trace lengths")
    p.add_argument("--verify-extra", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--include-times", action="store_true")
    p.set_defaults(func=cmd_bench_frp)

    p = sub.add_parser("verify", parents=[common],
                       help="bounded equivalence of two programs")
    p.add_argument("--program", required=True, help="program JSON file")
    p.add_argument("--against", default=None,
                   help="second program JSON (defaults to the benchmark's)")
    p.add_argument("--benchmark", default=None)
    p.add_argument("--ports", default=None)
    p.add_argument("--exhaustive-cap", type=int, default=1_000_000)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", parents=[common],
                       help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
