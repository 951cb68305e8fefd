"""Numeric helpers shared across the package.

Values flow through the library in one of two arithmetic modes:

* exact mode: entries are ``int`` or ``fractions.Fraction``; equality-sensitive
  relations (two-partitions, model construction, certificates) are evaluated
  with exact arithmetic;
* double mode: entries are ``float``; equality-sensitive operations take an
  explicit absolute tolerance.

Instances are normally expressed on an integer grid (grid units plus an
optional ``scale`` recording the physical size of one unit), which keeps the
exact path in plain machine integers.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, Fraction, float]


def is_exact(value: Number) -> bool:
    """True for integers and rationals, False for floats."""
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def all_exact(values: Iterable[Number]) -> bool:
    return all(is_exact(v) for v in values)


def as_fraction(value: Number) -> Fraction:
    """Exact conversion; floats convert to their binary-exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a number here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"unsupported numeric type {type(value).__name__}")


def parse_grid_unit(scale: Union[str, float, int]) -> Fraction:
    """Parse a grid unit given as a decimal literal or number.

    Strings and the decimal renderings of floats go through ``Decimal`` so
    that ``1e-6`` means one millionth exactly, not its binary approximation.
    """
    if isinstance(scale, Fraction):
        value = scale
    elif isinstance(scale, int):
        value = Fraction(scale)
    else:
        value = Fraction(Decimal(repr(scale) if isinstance(scale, float) else scale))
    if value <= 0:
        raise ValueError("grid unit must be positive")
    return value


def snap_to_grid(value: Number, unit: Fraction, rel_tol: float = 1e-9) -> int:
    """Nearest grid multiple of ``value``; rejects values off the grid.

    Returns the integer multiplier k with ``value ~= k * unit``; raises
    ``ValueError`` when the value is further than ``rel_tol * unit`` from
    every multiple.
    """
    exact = as_fraction(value) / unit
    k = round(exact)
    if abs(exact - k) > Fraction(rel_tol).limit_denominator(10**12):
        raise ValueError(f"value {value} is not on the declared grid (unit {unit})")
    return int(k)


def parse_decimal_exact(text: str) -> Number:
    """Parse a decimal literal exactly: int when integral, else Fraction."""
    value = Fraction(Decimal(text.strip()))
    return int(value) if value.denominator == 1 else value


def decimal_str(value: Number) -> str:
    """Exact decimal rendering of a number whose denominator is 2^a * 5^b.

    Floats always qualify (binary rationals); general fractions qualify only
    when their reduced denominator has no other prime factors.  Used by the
    model-export path, which promises bit-exact decimal coefficients.
    """
    f = as_fraction(value)
    num, den = f.numerator, f.denominator
    if den == 1:
        return str(num)
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ValueError(f"{value} has no finite decimal expansion")
    digits = max(twos, fives)
    scaled = abs(num) * 10**digits // f.denominator
    text = str(scaled).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:]
    frac = frac.rstrip("0")
    sign = "-" if num < 0 else ""
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"
