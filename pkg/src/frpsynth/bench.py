"""Randomized list-program suite and the reactive benchmark sweep.

Two harnesses share one report shape. The list suite generates random
register programs, derives input/output pairs from them, synthesizes from
the pairs alone, and compares the result against the generating program.
The reactive sweep resynthesizes the shipped reference programs per
(instruction bound, trace length) cell and verifies each find at a longer
length, so undergeneralized solutions stay visible.

Reports are plain dicts throughout: rows plus aggregates recomputable from
the rows. Wall-clock fields are stripped by the canonical serialization so
reruns with the same seed and backend compare byte-for-byte. Jobs run in a
bounded worker pool; each job builds its own backend from the config
string, and rows are reassembled in job order so pooling never reorders a
report.

Without a solver binary, list-program equivalence cannot be proved in
general; the "equivalent" verdict here means exhaustive agreement over a
reduced input domain (short lists, small values) plus seeded sampling over
the full benchmark domain. "different" is always witnessed.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from random import Random
from typing import Optional

from .backends import DEFAULT_CANDIDATE_BUDGET, Problem, parse_backend
from .benchmarks import BENCHMARKS, bench_config
from .frp import FRP_OPS, FRP_PREDS
from .listdsl import LIST_OPS, LIST_PREDS
from .loop import synthesize_full, verify_equivalent
from .programs import (
    K_INT,
    K_LIST,
    PortDecl,
    Program,
    program_dumps,
    run_program,
    run_registers,
)
from .sketch import list_grammar, slot_choices
from .traces import is_error

SIGNATURES = {
    "int-list": (PortDecl("k", K_INT), PortDecl("xs", K_LIST)),
    "list-list": (PortDecl("xs", K_LIST), PortDecl("ys", K_LIST)),
}

QUANTILES = (20, 40, 60, 80)

# stripped from the canonical report serialization; everything else must be
# identical across reruns with the same seed and backend
TIME_FIELDS = ("wall_time", "quantiles", "total_wall_time", "fastest")


# ---------------------------------------------------------------------------
# Random program generation
# ---------------------------------------------------------------------------

def _result_kind(program: Program, reg: int) -> str:
    n_in = len(program.inputs)
    if reg < n_in:
        return program.inputs[reg].kind
    return LIST_OPS[program.insns[reg - n_in].op].result


def _all_registers_live(program: Program) -> bool:
    n_in = len(program.inputs)
    live = set()
    stack = [n_in + len(program.insns) - 1]
    while stack:
        r = stack.pop()
        if r in live:
            continue
        live.add(r)
        if r >= n_in:
            stack.extend(program.insns[r - n_in].args)
    return set(range(n_in, n_in + len(program.insns))) <= live


def _same_kind_operand(program: Program, i: int) -> Optional[int]:
    insn = program.insns[i]
    want = LIST_OPS[insn.op].result
    for a in insn.args:
        if _result_kind(program, a) == want:
            return a
    return None


def _delete_insn(program: Program, i: int, sub: int) -> Program:
    """Drop instruction i, rerouting its consumers to register `sub`."""
    n_in = len(program.inputs)
    victim = n_in + i

    def remap(a: int) -> int:
        if a == victim:
            a = sub  # operands precede their instruction, so sub < victim
        return a - 1 if a > victim else a

    insns = []
    for j, insn in enumerate(program.insns):
        if j == i:
            continue
        insns.append(replace(insn, args=tuple(remap(a) for a in insn.args)))
    return Program(program.inputs, tuple(insns))


def random_env(decls, rng: Random, value_range=(-5, 5), list_length=5) -> dict:
    lo, hi = value_range
    env = {}
    for d in decls:
        if d.kind == K_INT:
            env[d.name] = rng.randint(lo, hi)
        else:
            env[d.name] = tuple(rng.randint(lo, hi) for _ in range(list_length))
    return env


def _clean_envs(program: Program, rng: Random, want: int, value_range,
                list_length, tries: int = 2000) -> Optional[list]:
    """Inputs on which the program computes an actual value, not ERROR."""
    out = []
    for _ in range(tries):
        env = random_env(program.inputs, rng, value_range, list_length)
        if not is_error(run_program(program, env, LIST_OPS, LIST_PREDS)):
            out.append(env)
            if len(out) == want:
                return out
    return None


def _passes_liveness_audit(program: Program, envs) -> bool:
    """Deleting any instruction must change the output on some input.

    Instructions whose operands do not include a register of their own
    result kind cannot be spliced out (nothing can stand in for them), so
    they are exempt; structural liveness already covers them.
    """
    n_in = len(program.inputs)
    last = len(program.insns) - 1
    for i in range(len(program.insns)):
        sub = _same_kind_operand(program, i)
        if sub is None:
            continue
        if i == last:
            changed = any(
                run_registers(program, env, LIST_OPS, LIST_PREDS)[sub]
                != run_program(program, env, LIST_OPS, LIST_PREDS)
                for env in envs
            )
        else:
            mutant = _delete_insn(program, i, sub)
            changed = any(
                run_program(mutant, env, LIST_OPS, LIST_PREDS)
                != run_program(program, env, LIST_OPS, LIST_PREDS)
                for env in envs
            )
        if not changed:
            return False
    return True


def generate_random_program(signature, length: int, rng: Random, *,
                            audit_inputs: int = 100, value_range=(-5, 5),
                            list_length: int = 5,
                            max_attempts: int = 100_000) -> Program:
    """A random well-kinded program whose every instruction earns its keep.

    Rejection-sampled: candidates are kept only if every instruction is on
    a dependency path to the result, the program computes a value (not
    ERROR) on enough random inputs, and no single instruction can be
    deleted without changing the output on at least one of `audit_inputs`
    random inputs. Deterministic for a given rng state.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    decls = SIGNATURES[signature] if isinstance(signature, str) else tuple(signature)
    g = list_grammar()
    for _ in range(max_attempts):
        kinds = [d.kind for d in decls]
        insns = []
        for _slot in range(length):
            choices = slot_choices(g, kinds, stateful=False)
            pick = rng.choice(choices)
            insns.append(pick)
            kinds.append(LIST_OPS[pick.op].result)
        program = Program(decls, tuple(insns))
        if not _all_registers_live(program):
            continue
        envs = _clean_envs(program, rng, audit_inputs, value_range, list_length)
        if envs is None:
            continue
        if _passes_liveness_audit(program, envs):
            return program
    raise RuntimeError("random program generation did not converge")


# ---------------------------------------------------------------------------
# List-program equivalence (bounded)
# ---------------------------------------------------------------------------

def _env_json(env: dict) -> dict:
    return {
        k: list(v) if isinstance(v, tuple) else v for k, v in sorted(env.items())
    }


def _bounded_envs(decls, bound: int, max_len: int):
    values = range(-bound, bound + 1)
    lists = [
        tuple(xs)
        for n in range(max_len + 1)
        for xs in itertools.product(values, repeat=n)
    ]
    pools = [list(values) if d.kind == K_INT else lists for d in decls]
    for combo in itertools.product(*pools):
        yield dict(zip((d.name for d in decls), combo))


def list_equivalence(p: Program, q: Program, *, samples: int = 2000,
                     value_range=(-5, 5), list_length: int = 5,
                     bound: int = 2, max_len: int = 3, seed: int = 0,
                     deadline: Optional[float] = None) -> dict:
    """Bounded-domain equivalence verdict for two list programs.

    Seeded sampling over the full benchmark domain plus exhaustive
    enumeration over short small-valued inputs. A difference is returned
    with its witness; agreement everywhere checked yields "equivalent"
    (bounded, per the scope recorded in the verdict), a deadline expiry
    yields "inconclusive".
    """
    assert tuple(p.inputs) == tuple(q.inputs)
    scope = {"samples": samples, "bound": bound, "max_len": max_len}
    rng = Random(seed)
    checked = 0

    def verdict(kind, witness=None):
        out = {"kind": kind, "checked": checked, "scope": scope}
        if witness is not None:
            out["witness"] = _env_json(witness)
        return out

    sampled = (
        random_env(p.inputs, rng, value_range, list_length)
        for _ in range(samples)
    )
    for env in itertools.chain(sampled, _bounded_envs(p.inputs, bound, max_len)):
        if deadline is not None and time.monotonic() > deadline:
            return verdict("inconclusive")
        checked += 1
        a = run_program(p, env, LIST_OPS, LIST_PREDS)
        b = run_program(q, env, LIST_OPS, LIST_PREDS)
        if a != b:
            return verdict("different", env)
    return verdict("equivalent")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class BenchReport:
    kind: str  # "lists" | "frp"
    config: dict
    rows: list
    aggregates: dict

    @property
    def any_timeout(self) -> bool:
        return any(r.get("status") == "timeout" for r in self.rows)


def _strip_times(obj):
    if isinstance(obj, dict):
        return {
            k: _strip_times(v) for k, v in obj.items() if k not in TIME_FIELDS
        }
    if isinstance(obj, list):
        return [_strip_times(v) for v in obj]
    return obj


def report_to_json(report: BenchReport, include_times: bool = True) -> str:
    obj = {
        "kind": report.kind,
        "config": report.config,
        "rows": report.rows,
        "aggregates": report.aggregates,
    }
    if not include_times:
        obj = _strip_times(obj)
    return json.dumps(obj, sort_keys=True, indent=2)


def _quantile_table(rows) -> dict:
    """Per-quantile minimum timeout that would have solved that share of rows."""
    times = sorted(r["wall_time"] for r in rows if r["solved"])
    out = {}
    for q in QUANTILES:
        k = math.ceil(q / 100 * len(rows)) if rows else 0
        out[str(q)] = round(times[k - 1], 3) if 0 < k <= len(times) else None
    return out


def _count_by(rows, key) -> dict:
    out = {}
    for r in rows:
        v = r.get(key)
        if v is not None:
            out[v] = out.get(v, 0) + 1
    return dict(sorted(out.items()))


def lists_aggregates(rows) -> dict:
    return {
        "count": len(rows),
        "solved": sum(1 for r in rows if r["solved"]),
        "replayed": sum(1 for r in rows if r.get("replay_ok")),
        "statuses": _count_by(rows, "status"),
        "verdicts": _count_by(rows, "verdict"),
        "quantiles": _quantile_table(rows),
        "total_wall_time": round(sum(r["wall_time"] for r in rows), 3),
    }


def frp_aggregates(rows) -> dict:
    solved = [r for r in rows if r["solved"]]
    fastest = min(solved, key=lambda r: r["wall_time"]) if solved else None
    return {
        "cells": len(rows),
        "classes": _count_by(rows, "cell_class"),
        "statuses": _count_by(rows, "status"),
        "fastest": None
        if fastest is None
        else {
            "benchmark": fastest["benchmark"],
            "n": fastest["n"],
            "length": fastest["length"],
        },
        "quantiles": _quantile_table(rows),
        "total_wall_time": round(sum(r["wall_time"] for r in rows), 3),
    }


def _run_jobs(worker, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, jobs))


# ---------------------------------------------------------------------------
# List suite
# ---------------------------------------------------------------------------

# Five-combinator list jobs need a deeper scan than the interactive loop;
# this cap stays below the 600 s wall timeout on one desk-class core.
LIST_SUITE_BUDGET = 30_000_000


@dataclass(frozen=True)
class BenchConfig:
    """Randomized list-suite parameters; defaults are the desk-scale run."""

    count: int = 20
    program_length: int = 5  # combinators per generated program
    signature_mix: tuple = ("int-list", "list-list")
    list_length: int = 5
    value_range: tuple = (-5, 5)
    io_pairs: int = 5
    timeout: float = 600.0  # seconds per job
    seed: int = 0
    backend: str = "enum"
    workers: int = 1
    candidate_budget: int = LIST_SUITE_BUDGET
    audit_inputs: int = 100

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "program_length": self.program_length,
            "signature_mix": list(self.signature_mix),
            "list_length": self.list_length,
            "value_range": list(self.value_range),
            "io_pairs": self.io_pairs,
            "timeout": self.timeout,
            "seed": self.seed,
            "backend": self.backend,
            "workers": self.workers,
            "candidate_budget": self.candidate_budget,
            "audit_inputs": self.audit_inputs,
        }


def _list_job(job: dict) -> dict:
    cfg = BenchConfig(**job["config"])
    index = job["index"]
    signature = cfg.signature_mix[index % len(cfg.signature_mix)]
    rng = Random(cfg.seed * 1_000_003 + index)
    target = generate_random_program(
        signature,
        cfg.program_length,
        rng,
        audit_inputs=cfg.audit_inputs,
        value_range=cfg.value_range,
        list_length=cfg.list_length,
    )
    envs = _clean_envs(target, rng, cfg.io_pairs, cfg.value_range, cfg.list_length)
    pairs = [
        (env, run_program(target, env, LIST_OPS, LIST_PREDS)) for env in envs
    ]
    row = {
        "index": index,
        "signature": signature,
        "target": program_dumps(target),
        "examples": [
            {"inputs": _env_json(env), "output": _out_json(out)}
            for env, out in pairs
        ],
        "solved": False,
        "replay_ok": None,
        "solution": None,
        "verdict": None,
        "verify": None,
    }
    backend = parse_backend(cfg.backend)
    problem = Problem(
        target.inputs,
        _result_kind(target, len(target.inputs) + len(target.insns) - 1),
        list_grammar(),
        0,
        examples=list(pairs),
        candidate_budget=cfg.candidate_budget,
    )
    start = time.monotonic()
    deadline = start + cfg.timeout
    res = backend.synthesize(problem, cfg.program_length, deadline=deadline)
    row["status"] = res.status
    row["wall_time"] = round(time.monotonic() - start, 3)
    if res.ok:
        row["solved"] = True
        row["solution"] = program_dumps(res.program)
        row["replay_ok"] = all(
            run_program(res.program, env, LIST_OPS, LIST_PREDS) == out
            for env, out in pairs
        )
        ver = list_equivalence(
            res.program, target, seed=cfg.seed * 31 + index, deadline=deadline
        )
        row["verify"] = ver
        row["verdict"] = ver["kind"]
    return row


def _out_json(v):
    if is_error(v):
        return "error"
    return list(v) if isinstance(v, tuple) else v


def run_deepcoder_bench(cfg: BenchConfig = BenchConfig()) -> BenchReport:
    """Generate, synthesize from examples alone, and grade the list suite."""
    jobs = [{"index": i, "config": cfg.to_json()} for i in range(cfg.count)]
    rows = _run_jobs(_list_job, jobs, cfg.workers)
    return BenchReport("lists", cfg.to_json(), rows, lists_aggregates(rows))


# ---------------------------------------------------------------------------
# Reactive sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrpSweep:
    """Cells to run: each benchmark crossed with instruction/length bounds.

    Empty `ns`/`lengths` mean each benchmark's own shipped bound, giving
    the headline suite run; explicit tuples give the grid used to map out
    where synthesis degrades.
    """

    names: tuple = tuple(sorted(BENCHMARKS))
    ns: tuple = ()
    lengths: tuple = ()
    verify_extra: int = 2  # verify at L + this
    timeout: float = 300.0  # seconds per cell
    seed: int = 0
    backend: str = "enum"
    workers: int = 1
    candidate_budget: int = DEFAULT_CANDIDATE_BUDGET

    def to_json(self) -> dict:
        return {
            "names": list(self.names),
            "ns": list(self.ns),
            "lengths": list(self.lengths),
            "verify_extra": self.verify_extra,
            "timeout": self.timeout,
            "seed": self.seed,
            "backend": self.backend,
            "workers": self.workers,
            "candidate_budget": self.candidate_budget,
        }


def _frp_job(job: dict) -> dict:
    conf = job["config"]
    b = BENCHMARKS[job["benchmark"]]
    n, length = job["n"], job["length"]
    verify_length = length + conf["verify_extra"]
    row = {
        "benchmark": b.name,
        "n": n,
        "length": length,
        "verify_length": verify_length,
        "solved": False,
        "cell_class": "none",
        "insns": None,
        "stateful": None,
        "solution": None,
        "verify": None,
        "rounds": 0,
    }
    cfg = bench_config(
        b,
        max_insns=n,
        length=length,
        seed=conf["seed"],
        backend=parse_backend(conf["backend"]),
        candidate_budget=conf["candidate_budget"],
    )
    start = time.monotonic()
    deadline = start + conf["timeout"]
    if n < 1:
        res = None
        row["status"] = "exhausted"
    else:
        res = synthesize_full(b.reference, cfg, deadline=deadline)
        row["status"] = res.status
        row["rounds"] = res.rounds
    row["wall_time"] = round(time.monotonic() - start, 3)
    if res is not None and res.ok:
        row["solved"] = True
        row["solution"] = program_dumps(res.program)
        row["insns"] = len(res.program.insns)
        row["stateful"] = res.program.stateful_count(FRP_OPS)
        v = verify_equivalent(
            res.program, b.reference, b.ports, verify_length, samples=0,
            deadline=deadline,
        )
        row["verify"] = {"kind": v.kind, "checked": v.checked,
                         "exhaustive": v.exhaustive}
        row["cell_class"] = {
            "equal": "success",
            "counterexample": "wrong-at-longer",
        }.get(v.kind, "unverified")
    return row


def run_frp_bench(sweep: FrpSweep = FrpSweep()) -> BenchReport:
    """Resynthesize the shipped references across the sweep's cells."""
    jobs = []
    for name in sweep.names:
        b = BENCHMARKS[name]
        for n in sweep.ns or (b.max_insns,):
            for length in sweep.lengths or (b.length,):
                jobs.append(
                    {
                        "benchmark": name,
                        "n": n,
                        "length": length,
                        "config": sweep.to_json(),
                    }
                )
    rows = _run_jobs(_frp_job, jobs, sweep.workers)
    return BenchReport("frp", sweep.to_json(), rows, frp_aggregates(rows))
