"""Built-in bottom-up enumerative solver.

Grows a bank of live expression trees by size, collapsing candidates that
are observationally equivalent on the problem's obligation inputs. Trees
whose value errors on any obligation are pruned: ERROR poisons every
ancestor, and no obligation accepts an ERROR output.

The bank answers metasketch queries (n instructions, k stateful) in the
schedule's preference order; the emitted register program shares repeated
subtrees, so its instruction count can undercut the tree size.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .backends import Problem, SynthesisResult, default_schedule
from .frp import FRP_OPS, FRP_PREDS
from .listdsl import LIST_OPS, LIST_PREDS
from .programs import EvalContext, Instruction, Program, apply_op, is_error
from .sketch import ops_table, pred_const_choices
from .specs import eval_clause


class _Node:
    __slots__ = ("kind", "op", "pred", "const", "args", "size", "stateful",
                 "values", "input_index")

    def __init__(self, kind, op, pred, const, args, size, stateful, values,
                 input_index=None):
        self.kind = kind
        self.op = op
        self.pred = pred
        self.const = const
        self.args = args
        self.size = size
        self.stateful = stateful
        self.values = values
        self.input_index = input_index


def node_to_program(node: _Node, inputs) -> Program:
    """Emit a register program, sharing structurally identical subtrees."""
    order = []
    placed = {}

    def visit(nd: _Node) -> int:
        key = id(nd)
        if key in placed:
            return placed[key]
        if nd.op is None:
            placed[key] = nd.input_index
            return nd.input_index
        arg_idx = [visit(a) for a in nd.args]
        idx = len(inputs) + len(order)
        order.append(Instruction(nd.op, tuple(arg_idx), nd.pred, nd.const))
        placed[key] = idx
        return idx

    visit(node)
    return Program(tuple(inputs), tuple(order))


class EnumerativeSearch:
    """Bank state for one problem; grown lazily as the schedule advances."""

    def __init__(self, problem: Problem):
        self.problem = problem
        g = problem.grammar
        self.ops = ops_table(g)
        self.preds = FRP_PREDS if g.dsl == "frp" else LIST_PREDS
        self.ctx = EvalContext(problem.length)
        self.cases = self._build_cases()
        self.n_obligations = len(problem.examples) + len(problem.clause_cases)
        self.seen = {}
        self.bank = {}  # (kind, size) -> list of nodes
        self.solutions = {}  # (n, k) -> Program
        self.passing_spec = []  # out-kind nodes meeting the conjunctive part
        self.grown_to = 0
        self.scanned_level = None
        self.evaluated = 0
        self.dedup_hits = 0
        self.budget_hit = False
        self.deadline = None
        self._install_inputs()

    # -- obligations --------------------------------------------------------

    def _build_cases(self):
        cases = []
        for env, expected in self.problem.examples:
            if is_error(expected):
                raise ValueError("an expected output cannot be ERROR")
            cases.append(("example", env, expected))
        for trace, clause in self.problem.clause_cases:
            env = {d.name: trace.ports[d.name] for d in self.problem.inputs}
            cases.append(("clause", env, (trace, clause)))
        for trace, clause in self.problem.any_of_cases:
            env = {d.name: trace.ports[d.name] for d in self.problem.inputs}
            cases.append(("anyof", env, (trace, clause)))
        return cases

    def _meets_obligations(self, node: _Node) -> bool:
        for (tag, _, payload), value in zip(self.cases, node.values):
            if tag == "anyof":
                continue
            if is_error(value):
                return False
            if tag == "example":
                if value != payload:
                    return False
            else:
                trace, clause = payload
                if not eval_clause(clause, trace, out=value):
                    return False
        return True

    def _any_of_holds(self, node: _Node) -> bool:
        if not self.problem.any_of_cases:
            return True
        for (tag, _, payload), value in zip(self.cases, node.values):
            if tag != "anyof" or is_error(value):
                continue
            trace, clause = payload
            if eval_clause(clause, trace, out=value):
                return True
        return False

    def _passes(self, node: _Node) -> bool:
        return self._meets_obligations(node) and self._any_of_holds(node)

    # -- bank ---------------------------------------------------------------

    def _install_inputs(self):
        # inputs stay out of the dedup map: a 1-instruction program may
        # legitimately reproduce an input value vector (e.g. identityE)
        for i, decl in enumerate(self.problem.inputs):
            values = tuple(env[decl.name] for _, env, _ in self.cases)
            node = _Node(decl.kind, None, None, None, (), 0, 0, values, i)
            self.bank.setdefault((decl.kind, 0), []).append(node)

    def _nodes(self, kind, size):
        return self.bank.get((kind, size), ())

    def _eval_candidate(self, op_name, pred, const, args):
        self.evaluated += 1
        out = []
        for i in range(len(self.cases)):
            vals = [a.values[i] for a in args]
            out.append(
                apply_op(self.ops, self.preds, op_name, pred, const, vals, self.ctx)
            )
        return tuple(out)

    def _size_partitions(self, arity, total):
        if arity == 0:
            return [()] if total == 0 else []
        if arity == 1:
            return [(total,)]
        out = []

        def rec(left, budget, acc):
            if left == 1:
                acc.append(budget)
                out.append(tuple(acc))
                acc.pop()
                return
            for s in range(0, budget + 1):
                acc.append(s)
                rec(left - 1, budget - s, acc)
                acc.pop()

        rec(arity, total, [])
        return out

    def _out_of_budget(self) -> bool:
        if self.evaluated > self.problem.candidate_budget:
            self.budget_hit = True
            return True
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.budget_hit = True
            return True
        return False

    def _lookup(self, table, kind, values, h):
        for nd in table.get(h, ()):
            if nd.kind == kind and nd.values == values:
                return nd
        return None

    def grow_to(self, n: int):
        g = self.problem.grammar
        while self.grown_to < n and not self.budget_hit:
            size = self.grown_to + 1
            # per-size winners, deduplicated as they are generated so that
            # duplicate candidates never pile up their value vectors; buckets
            # are keyed by hash with true equality checked inside
            fresh = {}
            fresh_order = []
            for op_name in g.op_order:
                spec = self.ops[op_name]
                arity = len(spec.operands)
                if arity == 0 and size != 1:
                    continue
                for sizes in self._size_partitions(arity, size - 1):
                    pools = [
                        self._nodes(spec.operands[i], sizes[i])
                        for i in range(arity)
                    ]
                    if any(not p for p in pools):
                        continue
                    pc = pred_const_choices(g, spec)
                    for args in _product(pools):
                        for pred, const in pc:
                            if self._out_of_budget():
                                return
                            values = self._eval_candidate(
                                op_name, pred, const, args
                            )
                            # obligations never accept ERROR; an error on an
                            # any_of probe only falsifies that one disjunct
                            if self.n_obligations and any(
                                is_error(v)
                                for v in values[: self.n_obligations]
                            ):
                                continue
                            stateful = int(spec.stateful) + sum(
                                a.stateful for a in args
                            )
                            nd = _Node(
                                spec.result, op_name, pred, const,
                                tuple(args), size, stateful, values,
                            )
                            if not self.cases:
                                # every vector is (); keep all candidates
                                fresh_order.append(nd)
                                continue
                            h = hash((nd.kind, values))
                            if self._lookup(self.seen, nd.kind, values, h):
                                self.dedup_hits += 1
                                continue
                            prior = self._lookup(fresh, nd.kind, values, h)
                            if prior is not None:
                                self.dedup_hits += 1
                                # prefer fewer stateful operators among
                                # observationally equal same-size candidates
                                if nd.stateful < prior.stateful:
                                    bucket = fresh[h]
                                    bucket[bucket.index(prior)] = nd
                                    fresh_order[
                                        fresh_order.index(prior)
                                    ] = nd
                                continue
                            fresh.setdefault(h, []).append(nd)
                            fresh_order.append(nd)
            for nd in fresh_order:
                if self.cases:
                    h = hash((nd.kind, nd.values))
                    self.seen.setdefault(h, []).append(nd)
                self.bank.setdefault((nd.kind, nd.size), []).append(nd)
                if nd.kind == self.problem.out_kind:
                    if self._meets_obligations(nd):
                        self.passing_spec.append(nd)
                        if self._any_of_holds(nd):
                            program = node_to_program(nd, self.problem.inputs)
                            sig = (
                                len(program.insns),
                                program.stateful_count(self.ops),
                            )
                            self.solutions.setdefault(sig, program)
            self.grown_to = size

    def scan_level(self, size: int):
        """Obligation-check size-`size` candidates without banking them.

        Sound only when nothing will compose on top of this size: the bank
        gains no nodes, so peak memory stays at the previous level. Only
        operators producing the output kind are enumerated; a candidate
        observationally equal to a smaller one is skipped because its
        obligations were already decided at that size.
        """
        if self.scanned_level == size:
            return
        self.grow_to(size - 1)
        if self.budget_hit:
            return
        self.scanned_level = size
        g = self.problem.grammar
        passing = {}  # dedup among passing candidates only; stays small
        for op_name in g.op_order:
            spec = self.ops[op_name]
            if spec.result != self.problem.out_kind:
                continue
            arity = len(spec.operands)
            if arity == 0 and size != 1:
                continue
            for sizes in self._size_partitions(arity, size - 1):
                pools = [
                    self._nodes(spec.operands[i], sizes[i])
                    for i in range(arity)
                ]
                if any(not p for p in pools):
                    continue
                pc = pred_const_choices(g, spec)
                for args in _product(pools):
                    for pred, const in pc:
                        if self._out_of_budget():
                            return
                        values = self._eval_candidate(op_name, pred, const, args)
                        if self.n_obligations and any(
                            is_error(v) for v in values[: self.n_obligations]
                        ):
                            continue
                        h = hash((spec.result, values))
                        if self.cases and self._lookup(
                            self.seen, spec.result, values, h
                        ):
                            self.dedup_hits += 1
                            continue
                        stateful = int(spec.stateful) + sum(
                            a.stateful for a in args
                        )
                        nd = _Node(
                            spec.result, op_name, pred, const,
                            tuple(args), size, stateful, values,
                        )
                        if not self._meets_obligations(nd):
                            continue
                        prior = self._lookup(passing, nd.kind, values, h)
                        if prior is not None:
                            self.dedup_hits += 1
                            continue
                        passing.setdefault(h, []).append(nd)
                        self.passing_spec.append(nd)
                        if self._any_of_holds(nd):
                            program = node_to_program(nd, self.problem.inputs)
                            sig = (
                                len(program.insns),
                                program.stateful_count(self.ops),
                            )
                            self.solutions.setdefault(sig, program)

    def query(self, n: int, k: int, terminal: bool = False) -> Optional[Program]:
        if terminal:
            self.scan_level(n)
        else:
            self.grow_to(n)
        return self.solutions.get((n, k))

    def stats(self) -> dict:
        return {
            "evaluated": self.evaluated,
            "dedup_hits": self.dedup_hits,
            "bank_sizes": {
                "%s/%d" % key: len(v) for key, v in sorted(self.bank.items())
            },
            "grown_to": self.grown_to,
        }


def _product(pools):
    if not pools:
        yield ()
        return
    head, rest = pools[0], pools[1:]
    if not rest:
        for x in head:
            yield (x,)
        return
    for x in head:
        for tail in _product(rest):
            yield (x,) + tail


class EnumerativeBackend:
    name = "enum"

    def synthesize(self, problem: Problem, max_insns: int,
                   schedule=None, deadline=None) -> SynthesisResult:
        search = EnumerativeSearch(problem)
        search.deadline = deadline
        if schedule is None:
            schedule = default_schedule(max_insns)
        max_n = max((n for n, _ in schedule), default=0)
        asked = set()
        for n, slots in schedule:
            key = (n, len(slots))
            if key in asked:
                continue
            asked.add(key)
            # the last size composes into nothing, so it is scanned in a
            # streaming pass instead of being added to the bank
            program = search.query(n, len(slots), terminal=(n == max_n))
            if program is not None:
                return SynthesisResult(
                    program,
                    n=len(program.insns),
                    stateful_slots=tuple(
                        i
                        for i, insn in enumerate(program.insns)
                        if search.ops[insn.op].stateful
                    ),
                    status="sat",
                    stats=search.stats(),
                )
        status = "budget" if search.budget_hit else "exhausted"
        if search.budget_hit and deadline is not None \
                and time.monotonic() > deadline:
            status = "timeout"
        return SynthesisResult(None, status=status, stats=search.stats())
