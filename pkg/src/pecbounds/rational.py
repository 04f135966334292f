"""Exact probability parsing and formatting.

All probabilities in the library are `fractions.Fraction` values. Inputs may
be rational strings ("9/10"), decimal strings ("0.9", "1e-3"), ints, or JSON
numbers; JSON floats are interpreted by their shortest decimal literal, so
0.9 means exactly 9/10 rather than the nearest binary double.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Parse a number into an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # decimal-literal semantics: repr() is the shortest round-tripping form
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational from {value!r}") from exc
    raise ValueError(f"cannot parse rational from {value!r}")


def parse_probability(value) -> Fraction:
    """Parse a probability and check it lies in [0, 1]."""
    p = parse_rational(value)
    if not 0 <= p <= 1:
        raise ValueError(f"probability out of [0, 1]: {value!r}")
    return p


def fmt_rational(x: Fraction) -> str:
    """Render a Fraction as 'p' or 'p/q'."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
