"""Exact nonnegative rational arithmetic.

Backed by :class:`fractions.Fraction` (arbitrary-precision, always kept in
lowest terms).  This module adds what the game engine needs on top of it:
nonnegativity checks, partial subtraction and the canonical ``"p/q"`` wire
format used by traces.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Fraction

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class NegativeValue(ValueError):
    """Raised when an operation would produce a negative capital value."""


def normalize(num: int, den: int) -> Fraction:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    value = Fraction(num, den)
    if value < 0:
        raise NegativeValue(f"{num}/{den} is negative")
    return value


def q(x: RationalLike) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a nonnegative Fraction."""
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use an exact 'p/q' string")
    value = Fraction(x)
    if value < 0:
        raise NegativeValue(str(value))
    return value


def add(a: Fraction, b: Fraction) -> Fraction:
    return a + b


def sub(a: Fraction, b: Fraction) -> Fraction:
    if b > a:
        raise NegativeValue(f"{fmt(a)} - {fmt(b)} < 0")
    return a - b


def mul(a: Fraction, b: Fraction) -> Fraction:
    return a * b


def div(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise ZeroDivisionError("division by zero")
    return a / b


def cmp(a: Fraction, b: Fraction) -> int:
    # cross-multiplication on canonical forms (denominators are positive)
    lhs = a.numerator * b.denominator
    rhs = b.numerator * a.denominator
    return (lhs > rhs) - (lhs < rhs)


_OPS = {"add": add, "sub": sub, "mul": mul, "div": div, "cmp": cmp}


def arith(a: Fraction, b: Fraction, op: str):
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    return fn(a, b)


def fmt(x: Fraction) -> str:
    """Canonical wire form, always with an explicit denominator ("1/1", "0/1")."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse(s: str) -> Fraction:
    """Parse the canonical ``"p/q"`` form.  Bare integers are accepted too."""
    s = s.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {s!r}") from None
    return normalize(n, d)
