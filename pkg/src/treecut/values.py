"""Exact value carriers: rational parsing/formatting and scaled integers.

All decision arithmetic in this package runs on integers in global scaled
units (every input rational is multiplied through by a common denominator).
:class:`ScaledValue` wraps such an integer or the distinguished infinity,
which absorbs addition and compares greater than every finite value.
Floating point is never used in comparisons.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Parse a user-supplied number into an exact :class:`Fraction`.

    Accepts ints, Fractions, ``"p/q"`` strings, and decimal strings such as
    ``"0.25"``.  Floats are converted through their shortest decimal
    representation, so a literal typed as ``0.1`` means exactly 1/10.
    """
    if type(value) is int:
        return Fraction(value)
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as an exact ``"p/q"`` string (q always present)."""
    return f"{value.numerator}/{value.denominator}"


class ScaledValue:
    """An exact integer in scaled units, or infinity.

    Infinity is absorbing under addition and strictly greater than every
    finite value; two infinities compare equal.  Finite arithmetic is plain
    arbitrary-precision integer arithmetic, so it never overflows or rounds.
    """

    __slots__ = ("value",)

    def __init__(self, value: int | None):
        if value is not None and not isinstance(value, int):
            raise TypeError(f"scaled value must be int or None, got {type(value)}")
        self.value = value

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def finite(self) -> int:
        if self.value is None:
            raise ValueError("value is infinite")
        return self.value

    def __add__(self, other):
        o = other.value if isinstance(other, ScaledValue) else other
        if self.value is None or o is None:
            return INFINITY
        return ScaledValue(self.value + o)

    __radd__ = __add__

    def _cmp_key(self):
        # infinity sorts above every int
        return (1,) if self.value is None else (0, self.value)

    def __eq__(self, other):
        if isinstance(other, ScaledValue):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other):
        o = other if isinstance(other, ScaledValue) else ScaledValue(other)
        return self._cmp_key() < o._cmp_key()

    def __le__(self, other):
        o = other if isinstance(other, ScaledValue) else ScaledValue(other)
        return self._cmp_key() <= o._cmp_key()

    def __gt__(self, other):
        return not self.__le__(other)

    def __ge__(self, other):
        return not self.__lt__(other)

    def __repr__(self):
        return "ScaledValue(inf)" if self.value is None else f"ScaledValue({self.value})"


INFINITY = ScaledValue(None)
ZERO = ScaledValue(0)
