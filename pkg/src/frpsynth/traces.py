"""Discretized traces: dense per-timestep encodings of event streams and behaviors.

Time is logical. A trace fixes a length L and gives every port exactly L cells.
Event stream cells are either a value or the no-event sentinel; behavior cells
are always values, plus an initial value observable before the first timestep.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence, Union

INT = "int"
BOOL = "bool"
PAIR = "pair"

KIND_EVENTS = "events"
KIND_BEHAVIOR = "behavior"


class Value(NamedTuple):
    """Tagged payload value: bounded int, bool, or pair of ints."""

    tag: str
    val: object

    def __repr__(self) -> str:
        if self.tag == BOOL:
            return "#t" if self.val else "#f"
        if self.tag == PAIR:
            return "(%d . %d)" % self.val
        return str(self.val)


TRUE = Value(BOOL, True)
FALSE = Value(BOOL, False)

_INT_CACHE = {n: Value(INT, n) for n in range(-16, 17)}


def vint(n: int) -> Value:
    v = _INT_CACHE.get(n)
    return v if v is not None else Value(INT, n)


def vbool(b: bool) -> Value:
    return TRUE if b else FALSE


def vpair(x: int, y: int) -> Value:
    return Value(PAIR, (x, y))


def truthy(v: Value) -> bool:
    # Racket-style: only the boolean false value is falsy; 0 is truthy.
    return not (v.tag == BOOL and v.val is False)


# The no-event sentinel for event stream cells.
NO_EVENT = None
Cell = Optional[Value]


class _ErrorResult:
    """Poison value produced by partial operations; propagates through programs."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Error"


ERROR = _ErrorResult()


def is_error(x: object) -> bool:
    return x is ERROR


@dataclass(frozen=True)
class EventStream:
    """A fixed-length sequence of cells, each an event value or NO_EVENT."""

    cells: tuple

    def __post_init__(self):
        assert isinstance(self.cells, tuple)

    @property
    def length(self) -> int:
        return len(self.cells)

    def events(self) -> list:
        """(timestep, value) pairs for the present events."""
        return [(t, c) for t, c in enumerate(self.cells) if c is not None]


@dataclass(frozen=True)
class Behavior:
    """A value at every timestep plus the value held before the first timestep."""

    init: Value
    cells: tuple

    def __post_init__(self):
        assert isinstance(self.cells, tuple)
        assert isinstance(self.init, Value)

    @property
    def length(self) -> int:
        return len(self.cells)


Signal = Union[EventStream, Behavior]


@dataclass(frozen=True)
class PortSpec:
    """Port signature: name, kind, and the finite payload domain used when
    enumerating or sampling inputs for this port."""

    name: str
    kind: str
    domain: tuple = ()

    def __post_init__(self):
        assert self.kind in (KIND_EVENTS, KIND_BEHAVIOR), self.kind


@dataclass(frozen=True)
class Trace:
    """Named ports over a shared logical clock of `length` timesteps."""

    length: int
    ports: dict

    def __post_init__(self):
        validate_trace(self)

    def port(self, name: str) -> Signal:
        return self.ports[name]

    def __hash__(self):
        return hash((self.length, tuple(sorted(self.ports.items()))))

    def __eq__(self, other):
        return (
            isinstance(other, Trace)
            and self.length == other.length
            and self.ports == other.ports
        )


def validate_trace(trace: Trace) -> None:
    """Every port must carry exactly trace.length cells of its declared shape."""
    for name, sig in trace.ports.items():
        if isinstance(sig, EventStream):
            if sig.length != trace.length:
                raise ValueError(
                    "port %r has %d cells, trace length is %d"
                    % (name, sig.length, trace.length)
                )
            for c in sig.cells:
                if c is not None and not isinstance(c, Value):
                    raise ValueError("port %r has a malformed cell %r" % (name, c))
        elif isinstance(sig, Behavior):
            if sig.length != trace.length:
                raise ValueError(
                    "port %r has %d cells, trace length is %d"
                    % (name, sig.length, trace.length)
                )
            for c in sig.cells:
                if not isinstance(c, Value):
                    raise ValueError(
                        "behavior port %r has a non-value cell %r" % (name, c)
                    )
        else:
            raise ValueError("port %r is not an EventStream or Behavior" % name)


def events(*cells) -> EventStream:
    """Build an event stream from values / None literals."""
    out = []
    for c in cells:
        if c is None:
            out.append(None)
        elif isinstance(c, Value):
            out.append(c)
        elif isinstance(c, bool):
            out.append(vbool(c))
        elif isinstance(c, int):
            out.append(vint(c))
        elif isinstance(c, tuple) and len(c) == 2:
            out.append(vpair(*c))
        else:
            raise TypeError("bad cell literal %r" % (c,))
    return EventStream(tuple(out))


def behavior(init, *cells) -> Behavior:
    def conv(c):
        if isinstance(c, Value):
            return c
        if isinstance(c, bool):
            return vbool(c)
        if isinstance(c, int):
            return vint(c)
        if isinstance(c, tuple) and len(c) == 2:
            return vpair(*c)
        raise TypeError("bad behavior cell literal %r" % (c,))

    return Behavior(conv(init), tuple(conv(c) for c in cells))


# ---------------------------------------------------------------------------
# JSON wire format
#
#   value:  {"t": "int", "v": n} | {"t": "bool", "v": b} | {"t": "pair", "v": [x, y]}
#   cell:   value | null
#   trace:  {"length": L, "ports": {name: {"kind": "events"|"behavior",
#                                          "init": value?, "cells": [cell...]}}}
# ---------------------------------------------------------------------------


def value_to_json(v: Value) -> dict:
    if v.tag == PAIR:
        return {"t": PAIR, "v": [v.val[0], v.val[1]]}
    return {"t": v.tag, "v": v.val}


def value_from_json(obj: dict) -> Value:
    tag = obj["t"]
    if tag == INT:
        if not isinstance(obj["v"], int) or isinstance(obj["v"], bool):
            raise ValueError("int value payload must be an integer: %r" % obj)
        return vint(obj["v"])
    if tag == BOOL:
        if not isinstance(obj["v"], bool):
            raise ValueError("bool value payload must be a boolean: %r" % obj)
        return vbool(obj["v"])
    if tag == PAIR:
        x, y = obj["v"]
        return vpair(int(x), int(y))
    raise ValueError("unknown value tag %r" % tag)


def trace_to_json(trace: Trace) -> dict:
    ports = {}
    for name, sig in trace.ports.items():
        if isinstance(sig, EventStream):
            ports[name] = {
                "kind": KIND_EVENTS,
                "cells": [None if c is None else value_to_json(c) for c in sig.cells],
            }
        else:
            ports[name] = {
                "kind": KIND_BEHAVIOR,
                "init": value_to_json(sig.init),
                "cells": [value_to_json(c) for c in sig.cells],
            }
    return {"length": trace.length, "ports": ports}


def trace_from_json(obj: dict) -> Trace:
    length = obj["length"]
    ports = {}
    for name, ent in obj["ports"].items():
        kind = ent["kind"]
        if kind == KIND_EVENTS:
            cells = tuple(
                None if c is None else value_from_json(c) for c in ent["cells"]
            )
            ports[name] = EventStream(cells)
        elif kind == KIND_BEHAVIOR:
            ports[name] = Behavior(
                value_from_json(ent["init"]),
                tuple(value_from_json(c) for c in ent["cells"]),
            )
        else:
            raise ValueError("unknown port kind %r" % kind)
    return Trace(length, ports)


def trace_dumps(trace: Trace) -> str:
    return json.dumps(trace_to_json(trace), separators=(",", ":"))


def trace_loads(text: str) -> Trace:
    return trace_from_json(json.loads(text))


def port_to_json(port: PortSpec) -> dict:
    return {
        "name": port.name,
        "kind": port.kind,
        "domain": [value_to_json(v) for v in port.domain],
    }


def port_from_json(obj: dict) -> PortSpec:
    return PortSpec(
        obj["name"],
        obj["kind"],
        tuple(value_from_json(v) for v in obj.get("domain", ())),
    )


def quiet_trace(ports, length: int) -> Trace:
    """Trace with no event occurrences; behaviors hold their first domain value."""
    sigs = {}
    for p in ports:
        if p.kind == KIND_BEHAVIOR:
            init = p.domain[0]
            sigs[p.name] = Behavior(init, (init,) * length)
        else:
            sigs[p.name] = EventStream((NO_EVENT,) * length)
    return Trace(length, sigs)


# ---------------------------------------------------------------------------
# Input space enumeration and sampling (used by verification and benches)
# ---------------------------------------------------------------------------


def port_cell_choices(port: PortSpec) -> list:
    """All cells a single timestep of this port may take."""
    if port.kind == KIND_EVENTS:
        return [None] + list(port.domain)
    return list(port.domain)


def input_space_size(ports: Sequence[PortSpec], length: int) -> int:
    """Number of distinct traces of the given length over the port domains."""
    total = 1
    for p in ports:
        per_step = len(port_cell_choices(p))
        total *= per_step ** length
        if p.kind == KIND_BEHAVIOR:
            total *= len(p.domain)  # the init cell
    return total


def enumerate_traces(ports: Sequence[PortSpec], length: int) -> Iterator[Trace]:
    """All traces of the given length, in a deterministic order."""
    choice_lists = []
    for p in ports:
        cells = port_cell_choices(p)
        if p.kind == KIND_BEHAVIOR:
            choice_lists.append([list(p.domain)] + [cells] * length)
        else:
            choice_lists.append([cells] * length)

    def rec(i, acc):
        if i == len(ports):
            yield Trace(length, dict(acc))
            return
        p = ports[i]
        for combo in _product(choice_lists[i]):
            if p.kind == KIND_BEHAVIOR:
                sig = Behavior(combo[0], tuple(combo[1:]))
            else:
                sig = EventStream(tuple(combo))
            yield from rec(i + 1, acc + [(p.name, sig)])

    yield from rec(0, [])


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product(lists[1:]):
            yield (head,) + rest


def random_trace(rng, ports: Sequence[PortSpec], length: int) -> Trace:
    """One trace sampled uniformly per cell from the port domains."""
    d = {}
    for p in ports:
        cells = port_cell_choices(p)
        if p.kind == KIND_BEHAVIOR:
            d[p.name] = Behavior(
                rng.choice(list(p.domain)),
                tuple(rng.choice(cells) for _ in range(length)),
            )
        else:
            d[p.name] = EventStream(tuple(rng.choice(cells) for _ in range(length)))
    return Trace(length, d)


def int_domain(bound: int) -> tuple:
    return tuple(vint(n) for n in range(-bound, bound + 1))


def bool_domain() -> tuple:
    return (FALSE, TRUE)


def pair_domain(bound: int, lo: int = 0) -> tuple:
    return tuple(
        vpair(x, y) for x in range(lo, bound + 1) for y in range(lo, bound + 1)
    )
