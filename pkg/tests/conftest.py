from __future__ import annotations

from frpsynth.programs import Instruction, PortDecl, Program
from frpsynth.traces import Value, vbool, vint, vpair


def conv_const(c):
    if c is None or isinstance(c, Value):
        return c
    if isinstance(c, bool):
        return vbool(c)
    if isinstance(c, int):
        return vint(c)
    if isinstance(c, tuple):
        return Value("pair", (c[0], c[1]))
    raise TypeError(c)


def insn(op, *args, pred=None, const=None):
    return Instruction(op, tuple(args), pred, conv_const(const))


def prog(inputs, *insns):
    return Program(tuple(PortDecl(n, k) for n, k in inputs), tuple(insns))
