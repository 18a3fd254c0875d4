"""Command line front end: argument handling, output shape, exit codes."""
from __future__ import annotations

import json

import pytest

from conftest import insn, prog
from frpsynth.benchmarks import BENCHMARKS, drag_and_drop_five
from frpsynth.cli import main
from frpsynth.programs import (
    K_INT,
    K_LIST,
    program_from_json,
    program_to_json,
)
from frpsynth.traces import Trace, events, trace_to_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def take_rev(tmp_path):
    p = prog([("k", K_INT), ("xs", K_LIST)], insn("take", 0, 1),
             insn("reverse", 2))
    return write_json(tmp_path, "takerev.json", program_to_json(p))


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def test_run_list_program(tmp_path, capsys, take_rev):
    env = write_json(tmp_path, "env.json", {"k": 2, "xs": [5, 1, 4, 2, 3]})
    code, doc = run_cli(capsys, "run", "--program", take_rev, "--env", env)
    assert code == 0
    assert doc["output"] == [1, 5]


def test_run_stream_program(tmp_path, capsys):
    b = BENCHMARKS["mousetail"]
    path = write_json(tmp_path, "mt.json", program_to_json(b.reference))
    tr = write_json(tmp_path, "tr.json",
                    trace_to_json(Trace(3, {"move": events(1, -2, 0)})))
    code, doc = run_cli(capsys, "run", "--program", path, "--trace", tr)
    assert code == 0
    assert doc["output"]["kind"] == "events"
    assert doc["output"]["cells"] == [None, {"t": "int", "v": 2}, None]


def test_run_requires_some_input(tmp_path, capsys, take_rev):
    code = main(["run", "--program", take_rev])
    assert code == 1


def test_missing_file_is_harness_error(capsys):
    code = main(["run", "--program", "/nonexistent.json",
                 "--env", "/nonexistent.json"])
    assert code == 1


def test_bad_arguments_exit_one(capsys):
    assert main(["no-such-command"]) == 1
    assert main([]) == 1


# ---------------------------------------------------------------------------
# synth-pbe
# ---------------------------------------------------------------------------

def test_pbe_list_solves_reverse(tmp_path, capsys):
    examples = write_json(tmp_path, "ex.json", [
        {"inputs": {"xs": [3, 1, 2]}, "output": [2, 1, 3]},
        {"inputs": {"xs": [5, 4]}, "output": [4, 5]},
        {"inputs": {"xs": [-1, 0, 2, 2]}, "output": [2, 2, 0, -1]},
    ])
    code, doc = run_cli(capsys, "synth-pbe", "--dsl", "list",
                        "--examples", examples, "--insns", "2")
    assert code == 0
    assert doc["status"] == "sat"
    got = program_from_json(doc["program"]["json"])
    assert got.insns[-1].op == "reverse"


def test_pbe_frp_from_io_pairs(tmp_path, capsys):
    b = BENCHMARKS["mousetail"]
    tr = Trace(3, {"move": events(1, -2, 0)})
    examples = write_json(tmp_path, "io.json", [{
        "trace": trace_to_json(tr),
        "expected": {"kind": "events",
                     "cells": [None, {"t": "int", "v": 2}, None]},
    }])
    code, doc = run_cli(capsys, "synth-pbe", "--dsl", "frp",
                        "--examples", examples, "--benchmark", "mousetail")
    assert code == 0
    assert doc["status"] == "sat"
    assert doc["program"] is not None


# ---------------------------------------------------------------------------
# synth-full
# ---------------------------------------------------------------------------

def test_synth_full_benchmark_verifies(capsys):
    code, doc = run_cli(capsys, "synth-full", "--benchmark", "mousetail")
    assert code == 0
    assert doc["status"] == "sat"
    assert doc["verify"]["kind"] == "equal"
    assert doc["verify"]["exhaustive"]
    assert doc["verify"]["length"] == BENCHMARKS["mousetail"].length + 2


def test_synth_full_unknown_benchmark(capsys):
    assert main(["synth-full", "--benchmark", "nope"]) == 1


# ---------------------------------------------------------------------------
# loop
# ---------------------------------------------------------------------------

def test_loop_scripted_converges_and_is_deterministic(capsys):
    code, doc = run_cli(capsys, "loop", "--benchmark", "mousetail",
                        "--oracle", "scripted")
    assert code == 0
    assert doc["status"] == "unique"
    assert doc["program"] is not None
    events_seen = [e["event"] for e in doc["transcript"]]
    assert events_seen[0] == "session"
    assert events_seen[-1] == "done"
    assert "candidates" in events_seen
    code2, doc2 = run_cli(capsys, "loop", "--benchmark", "mousetail",
                          "--oracle", "scripted")
    assert doc2 == doc


def test_loop_scripted_program_file(tmp_path, capsys):
    path = write_json(tmp_path, "dd5.json",
                      program_to_json(drag_and_drop_five()))
    code, doc = run_cli(capsys, "loop", "--benchmark", "drag-and-drop",
                        "--oracle", "scripted:%s" % path,
                        "--length", "2", "--insns", "5",
                        "--max-interactions", "4")
    assert code == 0
    assert doc["status"] in ("unique", "interaction-limit")
    assert doc["interactions"] <= 4


def test_loop_rejects_unknown_oracle(capsys):
    assert main(["loop", "--benchmark", "mousetail",
                 "--oracle", "psychic"]) == 1


# ---------------------------------------------------------------------------
# bench subcommands
# ---------------------------------------------------------------------------

def test_bench_lists_writes_report(tmp_path, capsys):
    out = str(tmp_path / "report.json")
    code = main(["bench-lists", "--count", "2", "--insns", "2",
                 "--timeout", "120", "--out", out])
    assert code == 0
    doc = json.loads(open(out).read())
    assert doc["kind"] == "lists"
    assert len(doc["rows"]) == 2
    assert "wall_time" not in doc["rows"][0]


def test_bench_lists_reports_are_byte_identical(tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    argv = ["bench-lists", "--count", "2", "--insns", "2",
            "--timeout", "120"]
    assert main(argv + ["--out", a]) == 0
    assert main(argv + ["--out", b]) == 0
    assert open(a).read() == open(b).read()


def test_bench_frp_sweep(tmp_path, capsys):
    out = str(tmp_path / "frp.json")
    code = main(["bench-frp", "--names", "mousetail", "--ns", "3",
                 "--lengths", "3", "--timeout", "120", "--out", out])
    assert code == 0
    doc = json.loads(open(out).read())
    assert doc["kind"] == "frp"
    assert doc["rows"][0]["cell_class"] == "success"


def test_bench_frp_rejects_unknown_name(capsys):
    assert main(["bench-frp", "--names", "mousetail,bogus"]) == 1


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_benchmark_reference_variants(tmp_path, capsys):
    path = write_json(tmp_path, "dd5.json",
                      program_to_json(drag_and_drop_five()))
    code, doc = run_cli(capsys, "verify", "--benchmark", "drag-and-drop",
                        "--program", path)
    assert code == 0
    assert doc["kind"] == "equal"
    assert doc["exhaustive"]
    assert doc["checked"] == 20736


def test_verify_reports_counterexample(tmp_path, capsys):
    b = BENCHMARKS["mousetail"]
    ref = write_json(tmp_path, "ref.json", program_to_json(b.reference))
    other = prog([("move", "stream")], insn("identityE", 0))
    oth = write_json(tmp_path, "oth.json", program_to_json(other))
    code, doc = run_cli(capsys, "verify", "--benchmark", "mousetail",
                        "--program", oth, "--against", ref)
    assert code == 0
    assert doc["kind"] == "counterexample"
    assert doc["witness"]["length"] == b.length + 2
