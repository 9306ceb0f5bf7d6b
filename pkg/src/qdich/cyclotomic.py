"""Exact arithmetic in Q(w), w = exp(i*pi/4), as four rationals over the basis 1, w, w^2, w^3.

The reduction rule is w^4 = -1.  1/sqrt(2) lives in the field as (w - w^3)/2,
so Hadamard-type gate entries need no separate radical type.  Values are
immutable and all operations are pure.
"""

from __future__ import annotations

import math
from fractions import Fraction

RationalLike = int | Fraction

# w^k for k in 0..7 as (component index, sign); w^4 = -1 folds the upper half.
_POWER_TABLE = [
    (0, 1), (1, 1), (2, 1), (3, 1),
    (0, -1), (1, -1), (2, -1), (3, -1),
]

_OMEGA_COMPLEX = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))


class Cyclotomic:
    """c0 + c1*w + c2*w^2 + c3*w^3 with rational coefficients in lowest terms."""

    __slots__ = ("c0", "c1", "c2", "c3")

    def __init__(self, c0: RationalLike = 0, c1: RationalLike = 0,
                 c2: RationalLike = 0, c3: RationalLike = 0) -> None:
        object.__setattr__(self, "c0", Fraction(c0))
        object.__setattr__(self, "c1", Fraction(c1))
        object.__setattr__(self, "c2", Fraction(c2))
        object.__setattr__(self, "c3", Fraction(c3))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Cyclotomic values are immutable")

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.c0, self.c1, self.c2, self.c3)

    @classmethod
    def from_int(cls, x: int) -> Cyclotomic:
        return cls(x, 0, 0, 0)

    @classmethod
    def root_power(cls, k: int) -> Cyclotomic:
        """w^(k mod 8) expressed in the basis."""
        idx, sign = _POWER_TABLE[k % 8]
        coeffs = [0, 0, 0, 0]
        coeffs[idx] = sign
        return cls(*coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Cyclotomic.from_int(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __add__(self, other: Cyclotomic | int) -> Cyclotomic:
        if isinstance(other, int):
            other = Cyclotomic.from_int(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return Cyclotomic(self.c0 + other.c0, self.c1 + other.c1,
                          self.c2 + other.c2, self.c3 + other.c3)

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic(-self.c0, -self.c1, -self.c2, -self.c3)

    def __sub__(self, other: Cyclotomic | int) -> Cyclotomic:
        if isinstance(other, int):
            other = Cyclotomic.from_int(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Cyclotomic | int) -> Cyclotomic:
        return (-self) + other

    def __mul__(self, other: Cyclotomic | int) -> Cyclotomic:
        if isinstance(other, int):
            other = Cyclotomic.from_int(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        out = [Fraction(0)] * 4
        for i in range(4):
            if not a[i]:
                continue
            for j in range(4):
                if not b[j]:
                    continue
                idx, sign = _POWER_TABLE[(i + j) % 8]
                out[idx] += sign * a[i] * b[j]
        return Cyclotomic(*out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Cyclotomic:
        if k < 0:
            raise ValueError("negative powers are not supported (no field inversion)")
        result = Cyclotomic.from_int(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> Cyclotomic:
        """Complex conjugate: w -> w^7 = -w^3, w^2 -> -w^2, w^3 -> -w."""
        return Cyclotomic(self.c0, -self.c3, -self.c2, -self.c1)

    def to_complex(self) -> complex:
        """Evaluate the basis expansion at w = exp(i*pi/4) in double precision."""
        return (complex(self.c0) + complex(self.c1) * _OMEGA_COMPLEX
                + complex(self.c2) * _OMEGA_COMPLEX ** 2
                + complex(self.c3) * _OMEGA_COMPLEX ** 3)

    def is_zero(self) -> bool:
        return not (self.c0 or self.c1 or self.c2 or self.c3)

    def is_real(self) -> bool:
        """True iff the value is fixed by conjugation (c2 = 0 and c3 = -c1)."""
        return self.c2 == 0 and self.c3 == -self.c1

    def __str__(self) -> str:
        return " + ".join(
            f"{_fmt(c)}{suffix}"
            for c, suffix in zip(self.coefficients, ("", "*w", "*w^2", "*w^3"))
        )

    def __repr__(self) -> str:
        return f"Cyclotomic({self.c0!r}, {self.c1!r}, {self.c2!r}, {self.c3!r})"


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


ZERO = Cyclotomic(0)
ONE = Cyclotomic(1)
OMEGA = Cyclotomic(0, 1)
SQRT2 = OMEGA - Cyclotomic.root_power(3)          # w - w^3 = sqrt(2)
INV_SQRT2 = Cyclotomic(0, Fraction(1, 2), 0, Fraction(-1, 2))


def add(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    return x + y


def mul(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    return x * y


def conj(x: Cyclotomic) -> Cyclotomic:
    return x.conjugate()


def root_power(k: int) -> Cyclotomic:
    return Cyclotomic.root_power(k)


def to_complex(x: Cyclotomic) -> complex:
    return x.to_complex()


def from_sqrt2_pair(a: RationalLike, b: RationalLike) -> Cyclotomic:
    """The real field element a + b*sqrt(2) embedded via sqrt(2) = w - w^3."""
    b = Fraction(b)
    return Cyclotomic(a, b, 0, -b)
