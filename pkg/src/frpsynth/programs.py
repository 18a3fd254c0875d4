"""Straight-line register programs over typed registers.

A program names its input registers (with kinds) and then applies one
operation per instruction. Instruction operands index previously defined
registers; the final register is the program result. Register kinds are
'int', 'list', 'stream', 'behavior'.

Wire format:

    {"inputs": [{"name": ..., "kind": ...}, ...],
     "insns":  [{"op": ..., "args": [...], "pred": ..., "const": ...}, ...]}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .traces import (
    ERROR,
    Behavior,
    EventStream,
    Trace,
    Value,
    is_error,
    value_from_json,
    value_to_json,
)

K_INT = "int"
K_LIST = "list"
K_STREAM = "stream"
K_BEHAVIOR = "behavior"

KINDS = (K_INT, K_LIST, K_STREAM, K_BEHAVIOR)

# Constant-slot requirements an operation may declare.
C_NONE = None
C_INT = "int"
C_ANY = "any"


@dataclass(frozen=True)
class PredFamily:
    """A named predicate family; `const` says what constant it closes over."""

    name: str
    table: str  # 'int' | 'bool' | 'int2'
    const: Optional[str]  # None | 'int' | 'pair'
    make: object  # callable(const) -> concrete predicate function
    show: object  # callable(const) -> source-ish rendering


@dataclass(frozen=True)
class OpSpec:
    """Operation signature and evaluator.

    fn is called as fn(ctx, pred, const, args) where args are the operand
    register values, pred is the instantiated predicate (or None) and const
    the instruction constant (or None). ctx carries the trace length.
    """

    name: str
    dsl: str  # 'list' | 'frp'
    operands: tuple
    result: str
    pred_table: Optional[str]  # None | 'int' | 'bool' | 'int2'
    const: Optional[str]  # C_NONE | C_INT | C_ANY
    stateful: bool
    fn: object


class EvalContext(NamedTuple):
    length: int


class PortDecl(NamedTuple):
    name: str
    kind: str


@dataclass(frozen=True)
class Instruction:
    op: str
    args: tuple
    pred: Optional[str] = None
    const: Optional[Value] = None

    def __post_init__(self):
        assert isinstance(self.args, tuple)


@dataclass(frozen=True)
class Program:
    """Inputs plus instructions; the last register is the result."""

    inputs: tuple  # of PortDecl
    insns: tuple  # of Instruction

    @property
    def n_registers(self) -> int:
        return len(self.inputs) + len(self.insns)

    def register_kinds(self, ops: dict) -> list:
        kinds = [p.kind for p in self.inputs]
        kinds.extend(ops[i.op].result for i in self.insns)
        return kinds

    def stateful_count(self, ops: dict) -> int:
        return sum(1 for i in self.insns if ops[i.op].stateful)


class ProgramError(ValueError):
    pass


def validate_program(program: Program, ops: dict, preds: dict) -> None:
    """Well-kindedness: operand indices in range, kinds line up, predicate and
    constant slots filled exactly as the operation demands."""
    kinds = [p.kind for p in program.inputs]
    for p in program.inputs:
        if p.kind not in KINDS:
            raise ProgramError("unknown input kind %r" % (p.kind,))
    for idx, insn in enumerate(program.insns):
        spec = ops.get(insn.op)
        if spec is None:
            raise ProgramError("unknown op %r" % insn.op)
        if len(insn.args) != len(spec.operands):
            raise ProgramError(
                "%s expects %d operands, got %d"
                % (insn.op, len(spec.operands), len(insn.args))
            )
        for ref, want in zip(insn.args, spec.operands):
            if not (0 <= ref < len(kinds)):
                raise ProgramError(
                    "instruction %d references register %d before definition"
                    % (idx, ref)
                )
            if kinds[ref] != want:
                raise ProgramError(
                    "instruction %d operand kind %s, expected %s"
                    % (idx, kinds[ref], want)
                )
        fam = None
        if spec.pred_table is None:
            if insn.pred is not None:
                raise ProgramError("%s takes no predicate" % insn.op)
        else:
            fam = preds.get(insn.pred)
            if fam is None or fam.table != spec.pred_table:
                raise ProgramError(
                    "%s needs a %s predicate, got %r"
                    % (insn.op, spec.pred_table, insn.pred)
                )
        # The single constant slot belongs to the op or to its predicate family.
        const_shape = spec.const
        if fam is not None and fam.const is not None:
            const_shape = fam.const
        if const_shape is None:
            if insn.const is not None:
                raise ProgramError(
                    "instruction %d (%s) carries a constant it cannot use"
                    % (idx, insn.op)
                )
        else:
            if insn.const is None:
                raise ProgramError(
                    "instruction %d (%s) is missing its constant" % (idx, insn.op)
                )
            if const_shape in (C_INT, "pair") and insn.const.tag != (
                "int" if const_shape == C_INT else "pair"
            ):
                raise ProgramError(
                    "instruction %d (%s) needs a %s constant, got %r"
                    % (idx, insn.op, const_shape, insn.const)
                )
        kinds.append(spec.result)


def apply_op(ops: dict, preds: dict, op: str, pred_name, const, args,
             ctx: EvalContext):
    """Evaluate one operator application; ERROR operands poison the result."""
    if any(is_error(a) for a in args):
        return ERROR
    spec = ops[op]
    pred = None
    if pred_name is not None:
        fam = preds[pred_name]
        pred = fam.make(const) if fam.const is not None else fam.make(None)
    try:
        return spec.fn(ctx, pred, const, tuple(args))
    except ZeroDivisionError:
        return ERROR


def run_program(program: Program, env: dict, ops: dict, preds: dict, length: int = 0):
    """Evaluate on an input environment (register name -> value).

    Returns the final register value, or ERROR if any register poisons.
    """
    return run_registers(program, env, ops, preds, length)[-1]


def run_registers(program: Program, env: dict, ops: dict, preds: dict, length: int = 0):
    """Like run_program but returns every register value (debugging, audits)."""
    regs = [env[p.name] for p in program.inputs]
    ctx = EvalContext(length)
    for insn in program.insns:
        args = tuple(regs[a] for a in insn.args)
        regs.append(apply_op(ops, preds, insn.op, insn.pred, insn.const, args, ctx))
    return regs


def trace_env(program: Program, trace: Trace) -> dict:
    """Bind the program's stream/behavior inputs from a trace, checking kinds."""
    env = {}
    for port in program.inputs:
        sig = trace.ports.get(port.name)
        if sig is None:
            raise ProgramError("trace is missing port %r" % port.name)
        if port.kind == K_STREAM and not isinstance(sig, EventStream):
            raise ProgramError("port %r should be an event stream" % port.name)
        if port.kind == K_BEHAVIOR and not isinstance(sig, Behavior):
            raise ProgramError("port %r should be a behavior" % port.name)
        env[port.name] = sig
    return env


def run_on_trace(program: Program, trace: Trace, ops: dict, preds: dict):
    return run_program(program, trace_env(program, trace), ops, preds, trace.length)


# ---------------------------------------------------------------------------
# JSON codec
# ---------------------------------------------------------------------------

def program_to_json(program: Program) -> dict:
    insns = []
    for i in program.insns:
        ent = {"op": i.op, "args": list(i.args)}
        if i.pred is not None:
            ent["pred"] = i.pred
        if i.const is not None:
            ent["const"] = value_to_json(i.const)
        insns.append(ent)
    return {
        "inputs": [{"name": p.name, "kind": p.kind} for p in program.inputs],
        "insns": insns,
    }


def program_from_json(obj: dict, ops: dict = None, preds: dict = None) -> Program:
    inputs = tuple(PortDecl(p["name"], p["kind"]) for p in obj["inputs"])
    insns = []
    for ent in obj["insns"]:
        insns.append(
            Instruction(
                ent["op"],
                tuple(int(a) for a in ent["args"]),
                ent.get("pred"),
                value_from_json(ent["const"]) if ent.get("const") is not None else None,
            )
        )
    program = Program(inputs, tuple(insns))
    if ops is not None and preds is not None:
        validate_program(program, ops, preds)
    return program


def program_dumps(program: Program) -> str:
    return json.dumps(program_to_json(program), separators=(",", ":"))


def program_loads(text: str, ops: dict = None, preds: dict = None) -> Program:
    return program_from_json(json.loads(text), ops, preds)


# ---------------------------------------------------------------------------
# Register values as JSON (examples for programming-by-example sessions)
# ---------------------------------------------------------------------------

def regval_to_json(v) -> dict:
    from .traces import trace_to_json  # local import to avoid cycle noise

    if is_error(v):
        return {"kind": "error"}
    if isinstance(v, bool):
        raise TypeError("bare bools are not register values")
    if isinstance(v, int):
        return {"kind": K_INT, "v": v}
    if isinstance(v, tuple):
        return {"kind": K_LIST, "v": list(v)}
    if isinstance(v, EventStream):
        return {
            "kind": "events",
            "cells": [None if c is None else value_to_json(c) for c in v.cells],
        }
    if isinstance(v, Behavior):
        return {
            "kind": "behavior",
            "init": value_to_json(v.init),
            "cells": [value_to_json(c) for c in v.cells],
        }
    raise TypeError("cannot serialize register value %r" % (v,))


def regval_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "error":
        return ERROR
    if kind == K_INT:
        return int(obj["v"])
    if kind == K_LIST:
        return tuple(int(x) for x in obj["v"])
    if kind == "events":
        return EventStream(
            tuple(None if c is None else value_from_json(c) for c in obj["cells"])
        )
    if kind == "behavior":
        return Behavior(
            value_from_json(obj["init"]),
            tuple(value_from_json(c) for c in obj["cells"]),
        )
    raise ValueError("unknown register value kind %r" % kind)


# ---------------------------------------------------------------------------
# Pretty-printer: one register definition per line.
# ---------------------------------------------------------------------------

def format_program(program: Program, ops: dict, preds: dict, name: str = "program") -> str:
    lines = [
        "(define (%s %s)" % (name, " ".join(p.name for p in program.inputs))
    ]
    names = ["r%d" % (i + 1) for i in range(program.n_registers)]
    for k, p in enumerate(program.inputs):
        lines.append("  ; %s = %s [%s]" % (names[k], p.name, p.kind))
    for j, insn in enumerate(program.insns):
        reg = names[len(program.inputs) + j]
        spec = ops[insn.op]
        parts = [insn.op]
        if spec.const is not None and insn.const is not None:
            if insn.pred is None or preds[insn.pred].const is None:
                parts.append(repr(insn.const))
        if insn.pred is not None:
            parts.append(preds[insn.pred].show(insn.const))
        parts.extend(names[a] for a in insn.args)
        lines.append("  %s = (%s)" % (reg, " ".join(parts)))
    lines[-1] += ")"
    return "\n".join(lines)
