"""Solver-facing problem statement and backend selection.

A Problem is fully concrete: input declarations, a target register kind, a
grammar, and finite obligations (example pairs and clause cases). Backends
walk a (instruction count, stateful slots) schedule and return the first
assignment meeting every obligation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .programs import Program
from .sketch import Grammar, metasketch_sequence

DEFAULT_CANDIDATE_BUDGET = 2_000_000


@dataclass
class Problem:
    inputs: tuple  # PortDecl
    out_kind: str
    grammar: Grammar
    length: int  # trace length for stream programs; 0 for list programs
    examples: list = field(default_factory=list)  # (env dict, expected value)
    clause_cases: list = field(default_factory=list)  # (trace, clause)
    # disjunctive obligation: at least one (trace, clause) must hold;
    # empty means unconstrained. Used to demand "differs from P somewhere".
    any_of_cases: list = field(default_factory=list)
    candidate_budget: int = DEFAULT_CANDIDATE_BUDGET


@dataclass
class SynthesisResult:
    program: Optional[Program]
    n: Optional[int] = None
    stateful_slots: Optional[tuple] = None
    status: str = "exhausted"  # sat | exhausted | budget | timeout
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "sat" and self.program is not None


def default_schedule(max_insns: int) -> list:
    return list(metasketch_sequence(max_insns))


def parse_backend(spec: str):
    """Backend factory for CLI strings: "enum" or "smtlib:<command line>"."""
    if spec == "enum":
        from .enumerative import EnumerativeBackend

        return EnumerativeBackend()
    if spec.startswith("smtlib:"):
        cmd = spec[len("smtlib:"):].strip()
        if not cmd:
            raise ValueError("smtlib backend needs a solver command")
        from .smtlib import SmtLibBackend

        return SmtLibBackend(cmd.split())
    raise ValueError("unknown backend %r (want 'enum' or 'smtlib:<cmd>')" % spec)
