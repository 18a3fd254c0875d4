"""Shipped reference programs: shape, semantics, and grammar coverage.

Expected signals in the pinned cases were worked out by hand from the
operator semantics before running the programs.
"""
from __future__ import annotations

import itertools

import pytest

from frpsynth.benchmarks import BENCHMARKS, bench_config, drag_and_drop_five
from frpsynth.frp import FRP_OPS, FRP_PREDS
from frpsynth.loop import verify_equivalent
from frpsynth.programs import run_on_trace, validate_program
from frpsynth.sketch import ops_table, pred_const_choices
from frpsynth.traces import (
    Behavior,
    EventStream,
    Trace,
    behavior,
    enumerate_traces,
    events,
    is_error,
)

ALL = sorted(BENCHMARKS)


def run_ref(name, **ports):
    b = BENCHMARKS[name]
    length = next(iter(ports.values())).length
    return run_on_trace(b.reference, Trace(length, ports), FRP_OPS, FRP_PREDS)


# ---------------------------------------------------------------------------
# Shape
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ALL)
def test_reference_is_well_formed(name):
    b = BENCHMARKS[name]
    validate_program(b.reference, FRP_OPS, FRP_PREDS)
    assert b.name == name
    assert b.description
    assert len(b.reference.insns) <= b.max_insns
    assert {p.name for p in b.ports} == {n for n, _ in b.reference.inputs}
    assert all(p.domain for p in b.ports)


def test_instruction_and_stateful_counts():
    # (instructions, stateful instructions) per reference.
    expected = {
        "mousetail": (3, 1),
        "counter": (5, 2),
        "drag-and-drop": (7, 1),
        "save-draft": (5, 2),
        "thermostat": (7, 1),
        "sprinklers": (8, 3),
        "kitchen-light": (4, 0),
    }
    got = {
        b.name: (len(b.reference.insns), b.stateful_count)
        for b in BENCHMARKS.values()
    }
    assert got == expected


@pytest.mark.parametrize("name", ALL)
def test_every_register_feeds_the_output(name):
    b = BENCHMARKS[name]
    n_in = len(b.reference.inputs)
    live = set()
    stack = [n_in + len(b.reference.insns) - 1]
    while stack:
        r = stack.pop()
        if r in live:
            continue
        live.add(r)
        if r >= n_in:
            stack.extend(b.reference.insns[r - n_in].args)
    assert set(range(n_in, n_in + len(b.reference.insns))) <= live


@pytest.mark.parametrize("name", ALL)
def test_reference_is_expressible_in_its_own_grammar(name):
    # The sketch must be able to reproduce the program it benchmarks.
    b = BENCHMARKS[name]
    ops = ops_table(b.grammar)
    for i in b.reference.insns:
        assert i.op in b.grammar.op_order
        assert (i.pred, i.const) in pred_const_choices(b.grammar, ops[i.op])


@pytest.mark.parametrize("name", ALL)
def test_reference_runs_clean_on_domain_traces(name):
    b = BENCHMARKS[name]
    want = EventStream if b.out_kind == "stream" else Behavior
    for tr in itertools.islice(enumerate_traces(b.ports, b.length), 60):
        out = run_on_trace(b.reference, tr, FRP_OPS, FRP_PREDS)
        assert isinstance(out, want)
        assert out.length == b.length
        assert not any(is_error(c) for c in out.cells)


def test_bench_config_carries_benchmark_fields():
    b = BENCHMARKS["counter"]
    cfg = bench_config(b, seed=7)
    assert cfg.ports == b.ports
    assert cfg.out_kind == b.out_kind
    assert cfg.grammar is b.grammar
    assert cfg.length == b.length
    assert cfg.max_insns == b.max_insns
    assert cfg.seed == 7


# ---------------------------------------------------------------------------
# Pinned behavior
# ---------------------------------------------------------------------------

def test_mousetail_offsets_delays_and_clips():
    out = run_ref("mousetail", move=events(1, -2, 0))
    assert out == events(None, 2, None)


def test_counter_counts_presses():
    out = run_ref(
        "counter",
        inc=events(True, True, None),
        dec=events(None, None, True),
    )
    assert out == behavior(0, 1, 2, 1)


def drag_ports(up, down, pos):
    return {"mouse-up": up, "mouse-down": down, "mouse-pos": pos}


DRAG = drag_ports(
    events(None, None, None, True),
    events(True, None, None, None),
    events((1, 1), (2, 2), (3, 3), (4, 4)),
)


def test_drag_and_drop_moves_while_dragging():
    out = run_ref("drag-and-drop", **DRAG)
    assert out == events((1, 1), (2, 2), (3, 3), None)


def test_drag_and_drop_press_wins_a_simultaneous_release():
    tie = drag_ports(
        events(None, True, None),
        events(True, True, None),
        events((1, 1), (2, 2), (3, 3)),
    )
    out = run_ref("drag-and-drop", **tie)
    assert out == events((1, 1), (2, 2), (3, 3))
    five = run_on_trace(drag_and_drop_five(), Trace(3, tie), FRP_OPS, FRP_PREDS)
    assert five == out


def test_five_instruction_drag_matches_reference_everywhere():
    b = BENCHMARKS["drag-and-drop"]
    five = drag_and_drop_five()
    assert len(five.insns) == 5
    v = verify_equivalent(five, b.reference, b.ports, 4, samples=0)
    assert v.kind == "equal"
    assert v.exhaustive and v.checked == 20736


def test_save_draft_autosaves_changes_and_saves_on_demand():
    out = run_ref(
        "save-draft",
        save=events(None, None, None, True, None),
        text=behavior(0, 1, 1, 1, 1, 1),
    )
    # Autosave fires at t=2; t=4 repeats the value and is dropped; the
    # button at t=3 always fires.
    assert out == events(None, None, 1, 1, None)


def test_thermostat_hysteresis_gated_by_night():
    out = run_ref(
        "thermostat",
        temp=events(0, None, 3, None),
        night=behavior(False, True, True, True, False),
    )
    assert out == behavior(False, True, True, False, False)


def test_sprinklers_tick_window_and_motion_interrupt():
    out = run_ref(
        "sprinklers",
        rain=events(None, None, None, None, None),
        motion=events(None, None, None, True, None),
    )
    # On at the t=2 tick, off again one step later (motion at t=3 also
    # stops it), on again at the t=4 tick.
    assert out == behavior(False, False, False, True, False, True)


def test_kitchen_light_color_tracks_time_of_day():
    out = run_ref(
        "kitchen-light",
        motion=events(True, None, True),
        night=behavior(False, False, True, True),
    )
    assert out == events(1, None, 2)
