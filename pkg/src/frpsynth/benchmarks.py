"""Reference reactive programs used as synthesis targets.

Each benchmark bundles a hand-written reference program with the port
signature it runs over, finite payload domains for enumeration, and a
restricted operator grammar that is sufficient to express the reference.
The drag-and-drop reference merges the mouse-down side first so that a
five-instruction variant (raw down events reused as both merge operand and
ifE else-branch) is equivalent on every input, not just on traces where
presses and releases never coincide.
"""
from __future__ import annotations

from dataclasses import dataclass

from .frp import FRP_OPS, FRP_PREDS, default_int2_pred_table
from .loop import LoopConfig
from .programs import (
    Instruction,
    K_BEHAVIOR,
    K_STREAM,
    PortDecl,
    Program,
    validate_program,
)
from .sketch import Grammar
from .traces import (
    KIND_BEHAVIOR,
    KIND_EVENTS,
    PortSpec,
    vbool,
    vint,
    vpair,
)

FALSE = vbool(False)
TRUE = vbool(True)


def _insn(op, *args, pred=None, const=None):
    return Instruction(op, tuple(args), pred, const)


def _program(inputs, *insns) -> Program:
    return Program(tuple(PortDecl(n, k) for n, k in inputs), tuple(insns))


def _consts(*values) -> tuple:
    return tuple(values)


def _int_preds(families, consts) -> tuple:
    return tuple((f, vint(c)) for f in families for c in consts)


@dataclass(frozen=True)
class Benchmark:
    """A reference program plus everything needed to synthesize against it."""

    name: str
    description: str
    ports: tuple  # of PortSpec
    out_kind: str  # register kind of the reference result
    reference: Program
    grammar: Grammar
    length: int  # trace length used for synthesis
    max_insns: int  # sketch bound; the reference fits within it

    def __post_init__(self):
        validate_program(self.reference, FRP_OPS, FRP_PREDS)
        assert len(self.reference.insns) <= self.max_insns

    @property
    def stateful_count(self) -> int:
        return self.reference.stateful_count(FRP_OPS)


def bench_config(b: Benchmark, **overrides) -> LoopConfig:
    kw = dict(
        ports=b.ports,
        out_kind=b.out_kind,
        grammar=b.grammar,
        length=b.length,
        max_insns=b.max_insns,
    )
    kw.update(overrides)
    return LoopConfig(**kw)


# ---------------------------------------------------------------------------
# Web benchmarks
# ---------------------------------------------------------------------------

def _mousetail() -> Benchmark:
    # Tail segment trails the pointer by one step at a spatial offset and
    # only positions that are on screen (>= 0) are emitted.
    ref = _program(
        [("move", K_STREAM)],
        _insn("mapE", 0, pred="add-c", const=vint(1)),
        _insn("delayE", 1, const=vint(1)),
        _insn("filterE", 2, pred="ge-c", const=vint(0)),
    )
    g = Grammar(
        dsl="frp",
        op_order=("identityE", "mapE", "delayE", "filterE", "mergeE"),
        int_preds=_int_preds(("add-c", "sub-c", "rsub-c"), (0, 1)),
        bool_preds=_int_preds(("ge-c", "le-c", "lt-c", "gt-c"), (0, 1)),
        int2_preds=(),
        const_table=_consts(vint(0), vint(1)),
    )
    return Benchmark(
        name="mousetail",
        description="an element follows the pointer at an offset, one step behind",
        ports=(PortSpec("move", KIND_EVENTS, (vint(-2), vint(0), vint(1))),),
        out_kind=K_STREAM,
        reference=ref,
        grammar=g,
        length=3,
        max_insns=3,
    )


def _counter() -> Benchmark:
    # Two buttons drive a running total that is held as a behavior.
    ref = _program(
        [("inc", K_STREAM), ("dec", K_STREAM)],
        _insn("constantE", 0, const=vint(1)),
        _insn("constantE", 1, const=vint(-1)),
        _insn("mergeE", 2, 3),
        _insn("collectE", 4, pred="add", const=vint(0)),
        _insn("startsWith", 5, const=vint(0)),
    )
    g = Grammar(
        dsl="frp",
        op_order=("identityE", "constantE", "mergeE", "collectE", "startsWith"),
        int_preds=(),
        bool_preds=(),
        int2_preds=default_int2_pred_table(),
        const_table=_consts(vint(-1), vint(0), vint(1)),
    )
    return Benchmark(
        name="counter",
        description="increment and decrement buttons maintain a running count",
        ports=(
            PortSpec("inc", KIND_EVENTS, (TRUE,)),
            PortSpec("dec", KIND_EVENTS, (TRUE,)),
        ),
        out_kind=K_BEHAVIOR,
        reference=ref,
        grammar=g,
        length=3,
        max_insns=5,
    )


def _drag_and_drop() -> Benchmark:
    # Dragging state: presses switch it on, releases switch it off, and a
    # simultaneous press-and-release counts as a press (down side of the
    # merge wins). Coordinates pass through only while dragging.
    ref = _program(
        [("mouse-up", K_STREAM), ("mouse-down", K_STREAM),
         ("mouse-pos", K_STREAM)],
        _insn("constantE", 0, const=FALSE),
        _insn("constantE", 1, const=TRUE),
        _insn("mergeE", 4, 3),
        _insn("startsWith", 5, const=FALSE),
        _insn("snapshotE", 2, 6),
        _insn("ifE", 7, 2, 7),
        _insn("filterE", 8, pred="id"),
    )
    g = Grammar(
        dsl="frp",
        op_order=("constantE", "mergeE", "startsWith", "snapshotE", "ifE",
                  "filterE", "zeroE"),
        int_preds=(),
        bool_preds=(("id", None),),
        int2_preds=(),
        const_table=_consts(FALSE, TRUE),
    )
    return Benchmark(
        name="drag-and-drop",
        description="click an element, move it with the pointer, release to drop",
        ports=(
            PortSpec("mouse-up", KIND_EVENTS, (TRUE,)),
            PortSpec("mouse-down", KIND_EVENTS, (TRUE,)),
            PortSpec("mouse-pos", KIND_EVENTS, (vpair(1, 1), vpair(2, 2))),
        ),
        out_kind=K_STREAM,
        reference=ref,
        grammar=g,
        length=2,
        max_insns=7,
    )


def drag_and_drop_five() -> Program:
    """Five-instruction program equivalent to the drag-and-drop reference.

    Raw mouse-down events are truthy, so they can seed the dragging state
    directly; and while not dragging the down stream is necessarily quiet
    (the down side of the merge wins ties), so it doubles as the ifE
    else-branch.
    """
    return _program(
        [("mouse-up", K_STREAM), ("mouse-down", K_STREAM),
         ("mouse-pos", K_STREAM)],
        _insn("constantE", 0, const=FALSE),
        _insn("mergeE", 1, 3),
        _insn("startsWith", 4, const=FALSE),
        _insn("snapshotE", 2, 5),
        _insn("ifE", 6, 2, 1),
    )


# ---------------------------------------------------------------------------
# IoT benchmarks
# ---------------------------------------------------------------------------

def _save_draft() -> Benchmark:
    # Periodic autosave emits the field content when it changed since the
    # last autosave; the save button always emits, and wins ties.
    ref = _program(
        [("save", K_STREAM), ("text", K_BEHAVIOR)],
        _insn("timerE", 0, const=vint(2)),
        _insn("snapshotE", 2, 1),
        _insn("filterRepeatsE", 3),
        _insn("snapshotE", 0, 1),
        _insn("mergeE", 5, 4),
    )
    g = Grammar(
        dsl="frp",
        op_order=("timerE", "snapshotE", "filterRepeatsE", "mergeE",
                  "constantE"),
        int_preds=(),
        bool_preds=(),
        int2_preds=(),
        const_table=_consts(vint(0), vint(1), vint(2)),
    )
    return Benchmark(
        name="save-draft",
        description="save the field content on a timer when it changed, or on demand",
        ports=(
            PortSpec("save", KIND_EVENTS, (TRUE,)),
            PortSpec("text", KIND_BEHAVIOR, (vint(0), vint(1), vint(2))),
        ),
        out_kind=K_STREAM,
        reference=ref,
        grammar=g,
        length=4,
        max_insns=5,
    )


def _thermostat() -> Benchmark:
    # Hysteresis: readings below the low setpoint switch heating on, readings
    # above the high one switch it off, anything between holds the last
    # state. The heater only actually runs at night.
    ref = _program(
        [("temp", K_STREAM), ("night", K_BEHAVIOR)],
        _insn("filterE", 0, pred="lt-c", const=vint(2)),
        _insn("constantE", 2, const=TRUE),
        _insn("filterE", 0, pred="gt-c", const=vint(2)),
        _insn("constantE", 4, const=FALSE),
        _insn("mergeE", 5, 3),
        _insn("startsWith", 6, const=FALSE),
        _insn("andB", 1, 7),
    )
    g = Grammar(
        dsl="frp",
        op_order=("filterE", "constantE", "mergeE", "startsWith", "andB",
                  "orB", "notB"),
        int_preds=(),
        bool_preds=_int_preds(("lt-c", "gt-c", "le-c", "ge-c"), (1, 2, 3)),
        int2_preds=(),
        const_table=_consts(FALSE, TRUE),
    )
    return Benchmark(
        name="thermostat",
        description="heat at night, switching on below the low setpoint and off above the high one",
        ports=(
            PortSpec("temp", KIND_EVENTS, tuple(vint(n) for n in range(4))),
            PortSpec("night", KIND_BEHAVIOR, (FALSE, TRUE)),
        ),
        out_kind=K_BEHAVIOR,
        reference=ref,
        grammar=g,
        length=3,
        max_insns=7,
    )


def _sprinklers() -> Benchmark:
    # Scheduled ticks switch watering on for one step; the delayed tick,
    # rain, or yard motion switch it off, and off wins simultaneous starts.
    ref = _program(
        [("rain", K_STREAM), ("motion", K_STREAM)],
        _insn("timerE", 1, const=vint(2)),
        _insn("delayE", 2, const=vint(1)),
        _insn("mergeE", 1, 0),
        _insn("mergeE", 4, 3),
        _insn("constantE", 5, const=FALSE),
        _insn("constantE", 2, const=TRUE),
        _insn("mergeE", 6, 7),
        _insn("startsWith", 8, const=FALSE),
    )
    g = Grammar(
        dsl="frp",
        op_order=("timerE", "delayE", "mergeE", "constantE", "startsWith"),
        int_preds=(),
        bool_preds=(),
        int2_preds=(),
        const_table=_consts(FALSE, TRUE, vint(1), vint(2)),
    )
    return Benchmark(
        name="sprinklers",
        description="water on a schedule for a fixed window unless interrupted",
        ports=(
            PortSpec("rain", KIND_EVENTS, (TRUE,)),
            PortSpec("motion", KIND_EVENTS, (TRUE,)),
        ),
        out_kind=K_BEHAVIOR,
        reference=ref,
        grammar=g,
        length=4,
        max_insns=8,
    )


def _kitchen_light() -> Benchmark:
    # Motion turns the light on; the command carries the color for the
    # current time of day (1 = white, 2 = orange).
    ref = _program(
        [("motion", K_STREAM), ("night", K_BEHAVIOR)],
        _insn("snapshotE", 0, 1),
        _insn("constantE", 0, const=vint(2)),
        _insn("constantE", 0, const=vint(1)),
        _insn("ifE", 2, 3, 4),
    )
    g = Grammar(
        dsl="frp",
        op_order=("snapshotE", "constantE", "ifE", "mergeE", "filterE"),
        int_preds=(),
        bool_preds=(("id", None),),
        int2_preds=(),
        const_table=_consts(vint(1), vint(2)),
    )
    return Benchmark(
        name="kitchen-light",
        description="motion turns the light on in a color chosen by time of day",
        ports=(
            PortSpec("motion", KIND_EVENTS, (TRUE,)),
            PortSpec("night", KIND_BEHAVIOR, (FALSE, TRUE)),
        ),
        out_kind=K_STREAM,
        reference=ref,
        grammar=g,
        length=3,
        max_insns=4,
    )


BENCHMARKS = {
    b.name: b
    for b in (
        _mousetail(),
        _counter(),
        _drag_and_drop(),
        _save_draft(),
        _thermostat(),
        _sprinklers(),
        _kitchen_light(),
    )
}
