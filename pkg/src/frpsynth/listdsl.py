"""List-manipulation DSL: first-order list combinators over bounded integers.

Registers hold ints or tuples of ints. Partial operations (access out of range,
minimum/maximum of the empty list, arithmetic outside the lookup-table bound)
return ERROR, which poisons every downstream register.

Nonlinear arithmetic (division by a constant, squaring, multiplication of two
register values) routes through precomputed bounded lookup tables so the
concrete and symbolic evaluation paths share one definition of the math.
"""
from __future__ import annotations

from dataclasses import dataclass

from .programs import K_INT, K_LIST, OpSpec, PredFamily
from .traces import ERROR, is_error

DEFAULT_TABLE_BOUND = 64
DIVISORS = (2, 3, 4)


def _trunc_div(a: int, d: int) -> int:
    # Division truncates toward zero (Racket quotient), not Python floor.
    q = abs(a) // abs(d)
    return q if (a >= 0) == (d >= 0) else -q


@dataclass(frozen=True)
class LookupTable:
    """Precomputed results of one arithmetic operation over a bounded domain.

    Keys are canonical: multiply stores sorted pairs only, square stores
    non-negative keys only. Lookups outside the bound return ERROR.
    """

    tag: str
    bound: int
    entries: dict

    def __hash__(self):
        return hash((self.tag, self.bound))


def build_multiply_table(bound: int = DEFAULT_TABLE_BOUND) -> LookupTable:
    entries = {}
    for a in range(-bound, bound + 1):
        for b in range(a, bound + 1):
            entries[(a, b)] = a * b
    return LookupTable("multiply", bound, entries)


def build_square_table(bound: int = DEFAULT_TABLE_BOUND) -> LookupTable:
    entries = {a: a * a for a in range(0, bound + 1)}
    return LookupTable("square", bound, entries)


def build_divide_table(bound: int = DEFAULT_TABLE_BOUND) -> LookupTable:
    entries = {}
    for d in DIVISORS:
        for a in range(-bound, bound + 1):
            entries[(a, d)] = _trunc_div(a, d)
    return LookupTable("divide", bound, entries)


def build_remainder_table(bound: int = DEFAULT_TABLE_BOUND) -> LookupTable:
    """Remainder after truncating division (sign follows the dividend).

    Shipped for parity with the other tables; no combinator or predicate in the
    grammar currently consumes it.
    """
    entries = {}
    for d in DIVISORS:
        for a in range(-bound, bound + 1):
            entries[(a, d)] = a - d * _trunc_div(a, d)
    return LookupTable("remainder", bound, entries)


def lookup_multiply(table: LookupTable, a: int, b: int):
    key = (a, b) if a <= b else (b, a)
    return table.entries.get(key, ERROR)


def lookup_square(table: LookupTable, a: int):
    return table.entries.get(abs(a), ERROR)


def lookup_divide(table: LookupTable, a: int, d: int):
    return table.entries.get((a, d), ERROR)


def lookup_remainder(table: LookupTable, a: int, d: int):
    return table.entries.get((a, d), ERROR)


@dataclass(frozen=True)
class TableSet:
    multiply: LookupTable
    square: LookupTable
    divide: LookupTable
    remainder: LookupTable


def build_tables(bound: int = DEFAULT_TABLE_BOUND) -> TableSet:
    return TableSet(
        build_multiply_table(bound),
        build_square_table(bound),
        build_divide_table(bound),
        build_remainder_table(bound),
    )


DEFAULT_TABLES = build_tables()


# ---------------------------------------------------------------------------
# Predicate tables
# ---------------------------------------------------------------------------

def make_int_preds(tables: TableSet) -> dict:
    """Unary int -> int predicates used by map and scanl1-adjacent combinators."""
    return {
        "add1": lambda a: a + 1,
        "sub1": lambda a: a - 1,
        "mul2": lambda a: a * 2,
        "div2": lambda a: lookup_divide(tables.divide, a, 2),
        "neg": lambda a: -a,
        "square": lambda a: lookup_square(tables.square, a),
        "mul3": lambda a: a * 3,
        "div3": lambda a: lookup_divide(tables.divide, a, 3),
        "mul4": lambda a: a * 4,
        "div4": lambda a: lookup_divide(tables.divide, a, 4),
    }


BOOL_PREDS = {
    "positive": lambda a: a > 0,
    "negative": lambda a: a < 0,
    "odd": lambda a: a % 2 != 0,
    "even": lambda a: a % 2 == 0,
}


def make_int2_preds(tables: TableSet) -> dict:
    """Binary int predicates for zipwith and scanl1."""
    return {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: lookup_multiply(tables.multiply, a, b),
        "min": lambda a, b: a if a <= b else b,
        "max": lambda a, b: a if a >= b else b,
    }


INT_PREDS = make_int_preds(DEFAULT_TABLES)
INT2_PREDS = make_int2_preds(DEFAULT_TABLES)

INT_PRED_NAMES = tuple(INT_PREDS)
BOOL_PRED_NAMES = tuple(BOOL_PREDS)
INT2_PRED_NAMES = tuple(INT2_PREDS)


# ---------------------------------------------------------------------------
# Combinators. xs/ys are tuples of ints; n is an int.
# ---------------------------------------------------------------------------

def op_take(n, xs):
    # Out-of-range counts clamp instead of erroring.
    if n <= 0:
        return ()
    return xs[:n]


def op_drop(n, xs):
    if n <= 0:
        return xs
    return xs[n:]


def op_access(n, xs):
    # Zero-indexed; out of range is an error.
    if 0 <= n < len(xs):
        return xs[n]
    return ERROR


def op_reverse(xs):
    return tuple(reversed(xs))


def op_sort(xs):
    return tuple(sorted(xs))


def op_map(pred, xs):
    out = []
    for a in xs:
        r = pred(a)
        if is_error(r):
            return ERROR
        out.append(r)
    return tuple(out)


def op_filter(pred, xs):
    return tuple(a for a in xs if pred(a))


def op_count(pred, xs):
    return sum(1 for a in xs if pred(a))


def op_zipwith(pred2, xs, ys):
    # Unequal lengths truncate to the shorter list, zip-style.
    out = []
    for a, b in zip(xs, ys):
        r = pred2(a, b)
        if is_error(r):
            return ERROR
        out.append(r)
    return tuple(out)


def op_scanl1(pred2, xs):
    """Prefix folds of xs under pred2.

    Element i is the fold of xs[1..i] onto the accumulator xs[0], applying
    pred2(element, accumulator) left to right. For non-commutative pred2 this
    operand order is observable: scanl1(sub, [5, 2]) = [5, -3].
    """
    if not xs:
        return ()
    out = []
    for i in range(len(xs)):
        acc = xs[0]
        for x in xs[1 : 1 + i]:
            acc = pred2(x, acc)
            if is_error(acc):
                return ERROR
        out.append(acc)
    return tuple(out)


def op_minimum(xs):
    return min(xs) if xs else ERROR


def op_maximum(xs):
    return max(xs) if xs else ERROR


def op_sum(xs):
    return sum(xs)


# ---------------------------------------------------------------------------
# Registry for the register machine
# ---------------------------------------------------------------------------

LIST_PREDS = {}


def _fam(name, table, fn):
    LIST_PREDS[name] = PredFamily(
        name, table, None, (lambda f: (lambda _c: f))(fn), (lambda n: (lambda _c: n))(name)
    )


for _n, _f in INT_PREDS.items():
    _fam(_n, "int", _f)
for _n, _f in BOOL_PREDS.items():
    _fam(_n, "bool", _f)
for _n, _f in INT2_PREDS.items():
    _fam(_n, "int2", _f)


LIST_OPS = {}


def _lop(name, operands, result, pred_table, fn):
    LIST_OPS[name] = OpSpec(name, "list", operands, result, pred_table, None, False, fn)


_lop("take", (K_INT, K_LIST), K_LIST, None, lambda ctx, p, c, a: op_take(*a))
_lop("drop", (K_INT, K_LIST), K_LIST, None, lambda ctx, p, c, a: op_drop(*a))
_lop("access", (K_INT, K_LIST), K_INT, None, lambda ctx, p, c, a: op_access(*a))
_lop("reverse", (K_LIST,), K_LIST, None, lambda ctx, p, c, a: op_reverse(*a))
_lop("sort", (K_LIST,), K_LIST, None, lambda ctx, p, c, a: op_sort(*a))
_lop("map", (K_LIST,), K_LIST, "int", lambda ctx, p, c, a: op_map(p, a[0]))
_lop("filter", (K_LIST,), K_LIST, "bool", lambda ctx, p, c, a: op_filter(p, a[0]))
_lop("count", (K_LIST,), K_INT, "bool", lambda ctx, p, c, a: op_count(p, a[0]))
_lop(
    "zipwith",
    (K_LIST, K_LIST),
    K_LIST,
    "int2",
    lambda ctx, p, c, a: op_zipwith(p, a[0], a[1]),
)
_lop("scanl1", (K_LIST,), K_LIST, "int2", lambda ctx, p, c, a: op_scanl1(p, a[0]))
_lop("minimum", (K_LIST,), K_INT, None, lambda ctx, p, c, a: op_minimum(*a))
_lop("maximum", (K_LIST,), K_INT, None, lambda ctx, p, c, a: op_maximum(*a))
_lop("sum", (K_LIST,), K_INT, None, lambda ctx, p, c, a: op_sum(*a))

LIST_OP_ORDER = tuple(LIST_OPS)
