"""Exact rational helpers shared by every module."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence



def q(value) -> Fraction:
    """Convert an int, float, decimal string or Fraction to an exact Fraction.

    Floats convert to their exact binary value; strings such as ``"0.1"``
    convert to the exact decimal ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in {"nan", "inf", "-inf", "+inf", "infinity", "-infinity"}:
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(text)
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {value!r}")
    return Fraction(v)


def qvec(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(q(v) for v in values)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def fmt_exact(value: Fraction) -> str:
    """Exact text form: a plain decimal when the value terminates, else ``p/q``."""
    value = q(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(value.numerator)
    scaled = abs(value.numerator) * (10**digits // value.denominator)
    sign = "-" if value < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def fmt_decimal(value, precision: int) -> str:
    """Fixed-precision decimal rendering (round half to even on the exact value)."""
    value = q(value)
    scaled = round(value * 10**precision)
    if precision == 0:
        return str(scaled)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**precision)
    return f"{sign}{whole}.{frac:0{precision}d}"
