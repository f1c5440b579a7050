"""Exact rational parsing and formatting for the rate layer.

Capacities, rates and interval endpoints stay `fractions.Fraction` so that
capacity comparisons and spectrum measures are exact; floating point enters
only when distortion values are evaluated.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value, *, what: str = "number") -> Fraction:
    """Parse a scalar from a JSON document ("0.5", "3/4", 2, 0.25) exactly.

    Floats are interpreted through their shortest decimal representation so
    that a literal ``0.1`` in a document means one tenth, not the nearest
    binary double.
    """
    if isinstance(value, bool):
        raise ValueError(f"{what}: expected a number, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"{what}: cannot parse {value!r} as a rational") from exc
    raise ValueError(f"{what}: unsupported type {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as a terminating decimal when one exists, else p/q."""
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    rest = den
    while rest % 2 == 0:
        rest //= 2
        twos += 1
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{num}/{den}"
    places = max(twos, fives)
    scaled = abs(num) * 10**places // den
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if num < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"
