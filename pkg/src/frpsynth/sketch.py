"""Sketches: bounded program shapes that synthesis searches over.

A sketch fixes the input ports, an instruction count, which slots must hold
stateful operators, and a grammar (operator order plus predicate/constant
tables). The metasketch sequence walks sketches from small to large and from
stateless to stateful, so the first solution found is minimal under that
preference order.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Sequence

from .frp import (
    DEFAULT_OP_ORDER,
    FRP_OPS,
    default_bool_pred_table,
    default_const_table,
    default_int2_pred_table,
    default_int_pred_table,
)
from .listdsl import (
    BOOL_PRED_NAMES,
    INT2_PRED_NAMES,
    INT_PRED_NAMES,
    LIST_OPS,
)
from .programs import (
    C_ANY,
    C_INT,
    Instruction,
    K_BEHAVIOR,
    K_INT,
    K_LIST,
    K_STREAM,
    PortDecl,
    Program,
    validate_program,
)
from .traces import INT, Value


@dataclass(frozen=True)
class Grammar:
    """The operator and predicate vocabulary available to a sketch."""

    dsl: str  # "frp" | "list"
    op_order: tuple
    int_preds: tuple  # (family, const Value | None) entries
    bool_preds: tuple
    int2_preds: tuple
    const_table: tuple  # Values offered to operator-owned constant slots


def frp_grammar(op_order: Optional[Sequence[str]] = None,
                consts=(0, 1, 2, 3, 4, 5),
                bools: bool = True,
                two_bound: bool = False) -> Grammar:
    return Grammar(
        dsl="frp",
        op_order=tuple(op_order) if op_order else DEFAULT_OP_ORDER,
        int_preds=default_int_pred_table(consts),
        bool_preds=default_bool_pred_table(consts, two_bound=two_bound),
        int2_preds=default_int2_pred_table(),
        const_table=default_const_table(consts, bools=bools),
    )


def list_grammar(op_order: Optional[Sequence[str]] = None) -> Grammar:
    return Grammar(
        dsl="list",
        op_order=tuple(op_order) if op_order else tuple(LIST_OPS),
        int_preds=tuple((n, None) for n in INT_PRED_NAMES),
        bool_preds=tuple((n, None) for n in BOOL_PRED_NAMES),
        int2_preds=tuple((n, None) for n in INT2_PRED_NAMES),
        const_table=(),
    )


def ops_table(g: Grammar) -> dict:
    return FRP_OPS if g.dsl == "frp" else LIST_OPS


def reorder_operators(op_order: Sequence[str], seed: int) -> tuple:
    """Deterministic permutation of the operator preference order."""
    out = list(op_order)
    random.Random(seed).shuffle(out)
    return tuple(out)


def reorder_grammar(g: Grammar, seed: int) -> Grammar:
    return replace(g, op_order=reorder_operators(g.op_order, seed))


# ---------------------------------------------------------------------------
# Metasketch schedule
# ---------------------------------------------------------------------------

def metasketch_sequence(max_n: int) -> Iterator[tuple]:
    """(instruction count, stateful slot indices) in search-preference order.

    Counts ascend; within a count the number of stateful slots ascends;
    within that, slot combinations ascend lexicographically.
    """
    for n in range(1, max_n + 1):
        for k in range(0, n + 1):
            for slots in itertools.combinations(range(n), k):
                yield (n, slots)


@dataclass(frozen=True)
class Sketch:
    inputs: tuple  # PortDecl
    n_insns: int
    stateful_slots: tuple
    out_kind: str
    grammar: Grammar


def sketch_sequence(inputs: Sequence[PortDecl], out_kind: str, grammar: Grammar,
                    max_n: int) -> Iterator[Sketch]:
    for n, slots in metasketch_sequence(max_n):
        yield Sketch(tuple(inputs), n, slots, out_kind, grammar)


# ---------------------------------------------------------------------------
# Per-slot instruction choices
# ---------------------------------------------------------------------------

def pred_const_choices(g: Grammar, spec) -> list:
    """All (pred, const) fillings for one operator's predicate/constant slot."""
    if spec.pred_table is None:
        preds = [(None, None)]
    elif spec.pred_table == "int":
        preds = list(g.int_preds)
    elif spec.pred_table == "bool":
        preds = list(g.bool_preds)
    elif spec.pred_table == "int2":
        preds = list(g.int2_preds)
    else:
        raise ValueError(spec.pred_table)

    if spec.const is None:
        return preds
    if spec.const == C_INT:
        consts = [c for c in g.const_table if c.tag == INT]
    elif spec.const == C_ANY:
        consts = list(g.const_table)
    else:
        raise ValueError(spec.const)
    out = []
    for pred, pconst in preds:
        if pconst is not None:
            raise ValueError("operator and predicate cannot both own the constant")
        for c in consts:
            out.append((pred, c))
    return out


def slot_choices(g: Grammar, reg_kinds: Sequence[str], stateful: bool,
                 result_kind: Optional[str] = None) -> list:
    """Well-kinded instructions for the next slot given existing registers."""
    ops = ops_table(g)
    out = []
    for name in g.op_order:
        spec = ops[name]
        if spec.stateful != stateful:
            continue
        if result_kind is not None and spec.result != result_kind:
            continue
        per_operand = []
        feasible = True
        for k in spec.operands:
            idxs = [i for i, rk in enumerate(reg_kinds) if rk == k]
            if not idxs:
                feasible = False
                break
            per_operand.append(idxs)
        if not feasible:
            continue
        for args in itertools.product(*per_operand):
            for pred, const in pred_const_choices(g, spec):
                out.append(Instruction(name, tuple(args), pred, const))
    return out


def kind_vectors(sketch: Sketch) -> Iterator[tuple]:
    """Feasible result-kind assignments for the sketch's slots.

    The last slot must produce the sketch's output kind and every slot must
    admit at least one operator of the required statefulness.
    """
    g = sketch.grammar
    ops = ops_table(g)
    kinds = (K_STREAM, K_BEHAVIOR) if g.dsl == "frp" else (K_INT, K_LIST)
    stateful_slots = set(sketch.stateful_slots)

    def producible(avail, want_stateful, kind):
        for name in g.op_order:
            spec = ops[name]
            if spec.stateful != want_stateful or spec.result != kind:
                continue
            if all(any(rk == k for rk in avail) for k in spec.operands):
                return True
        return False

    def rec(slot, avail, acc):
        if slot == sketch.n_insns:
            yield tuple(acc)
            return
        want_stateful = slot in stateful_slots
        for kind in kinds:
            if slot == sketch.n_insns - 1 and kind != sketch.out_kind:
                continue
            if not producible(avail, want_stateful, kind):
                continue
            acc.append(kind)
            avail.append(kind)
            yield from rec(slot + 1, avail, acc)
            acc.pop()
            avail.pop()

    yield from rec(0, [d.kind for d in sketch.inputs], [])


def build_program(sketch: Sketch, insns: Sequence[Instruction]) -> Program:
    """Assemble and check a full hole assignment."""
    if len(insns) != sketch.n_insns:
        raise ValueError("wrong instruction count for sketch")
    p = Program(sketch.inputs, tuple(insns))
    ops = ops_table(sketch.grammar)
    stateful_slots = set(sketch.stateful_slots)
    for i, insn in enumerate(insns):
        want = i in stateful_slots
        if ops[insn.op].stateful != want:
            raise ValueError("slot %d violates the sketch's stateful mask" % i)
    from .frp import FRP_PREDS
    from .listdsl import LIST_PREDS

    preds = FRP_PREDS if sketch.grammar.dsl == "frp" else LIST_PREDS
    validate_program(p, ops, preds)
    return p
