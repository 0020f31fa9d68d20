"""Exact arithmetic on truncated p-adic integers.

A vertex (or ball) address in the hierarchy is a base-p digit string of
fixed length, least significant digit first.  Everything here is exact
integer arithmetic; floating point enters only at the final
trigonometric step in :func:`character_eval`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "PAdicCode",
    "PhaseFraction",
    "PrecisionError",
    "is_prime",
    "padic_order",
    "ball_contains",
    "refine_ball",
    "fractional_part_scaled",
    "character_eval",
    "digit_weight",
]


class PrecisionError(ValueError):
    """A code does not carry enough digits for the requested operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PAdicCode:
    """A p-adic integer known to ``precision`` base-p digits.

    ``digits[i]`` is the coefficient of p**i; the represented integer is
    ``sum(digits[i] * p**i)`` and lies in ``[0, p**precision - 1]``.
    """

    p: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if len(self.digits) < 1:
            raise ValueError("a code needs at least one digit")
        if not isinstance(self.digits, tuple):
            object.__setattr__(self, "digits", tuple(self.digits))
        for d in self.digits:
            if not 0 <= d < self.p:
                raise ValueError(f"digit {d} out of range [0, {self.p})")

    @property
    def precision(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        v = 0
        for d in reversed(self.digits):
            v = v * self.p + d
        return v

    @classmethod
    def from_int(cls, value: int, p: int, precision: int) -> "PAdicCode":
        """Base-p expansion of ``value mod p**precision``."""
        if precision < 1:
            raise ValueError("precision must be >= 1")
        value %= p**precision
        digits = []
        for _ in range(precision):
            digits.append(value % p)
            value //= p
        return cls(p, tuple(digits))

    def extended(self, precision: int) -> "PAdicCode":
        """Same integer, re-expressed with ``precision >= self.precision`` digits."""
        if precision < self.precision:
            raise ValueError("cannot shorten a code; slice its digits instead")
        return PAdicCode(self.p, self.digits + (0,) * (precision - self.precision))

    def __repr__(self) -> str:
        return f"PAdicCode(p={self.p}, digits={self.digits})"


@dataclass(frozen=True)
class PhaseFraction:
    """Exact rational in [0, 1) whose denominator is a power of p.

    Values of this kind are the fractional parts that drive the additive
    character; keeping them as integer pairs avoids any rounding until
    the final cosine/sine evaluation.
    """

    p: int
    numerator: int
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 0 or self.numerator < 0:
            raise ValueError("numerator and exponent must be non-negative")
        num, k = self.numerator, self.exponent
        num %= self.p**k if k > 0 else 1
        while k > 0 and num % self.p == 0:
            num //= self.p
            k -= 1
        if num == 0:
            k = 0
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", k)

    @property
    def denominator(self) -> int:
        return self.p**self.exponent

    def as_float(self) -> float:
        return self.numerator / self.denominator

    def __add__(self, other: "PhaseFraction") -> "PhaseFraction":
        """Exact sum modulo 1 (both operands must share the prime)."""
        if self.p != other.p:
            raise ValueError("cannot add fractions over different primes")
        k = max(self.exponent, other.exponent)
        num = (
            self.numerator * self.p ** (k - self.exponent)
            + other.numerator * self.p ** (k - other.exponent)
        )
        return PhaseFraction(self.p, num % self.p**k if k > 0 else 0, k)


def padic_order(x: PAdicCode) -> float:
    """Index of the first nonzero digit; ``math.inf`` when x is 0 mod p**L.

    The norm of the represented residue is ``p**(-padic_order(x))``.
    """
    for i, d in enumerate(x.digits):
        if d != 0:
            return i
    return math.inf


def ball_contains(center: PAdicCode, level: int, x: PAdicCode) -> bool:
    """Whether x lies in the radius-``p**-level`` ball around ``center``.

    Equivalent to the first ``level`` digits of the two codes agreeing.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    if x.p != center.p:
        raise ValueError("codes use different primes")
    if x.precision < level or center.precision < level:
        raise PrecisionError(
            f"ball membership at level {level} needs {level} digits, "
            f"got {center.precision} and {x.precision}"
        )
    return x.digits[:level] == center.digits[:level]


def refine_ball(center: PAdicCode, M: int) -> list[PAdicCode]:
    """Addresses of the p**(M-N) sub-balls of a level-N ball, offset ascending.

    Each returned code extends ``center``'s digit prefix; this fixed
    ordering defines every matrix row/column indexing downstream.
    """
    N = center.precision
    if M < N:
        raise ValueError(f"target level {M} is finer than {N}? refinement needs M >= N")
    p = center.p
    base = center.value
    return [PAdicCode.from_int(base + c * p**N, p, M) for c in range(p ** (M - N))]


def fractional_part_scaled(x: PAdicCode, j: int, N: int) -> PhaseFraction:
    """Fractional part of j*x / p**(N+1) as an exact fraction in [0, 1)."""
    p = x.p
    if not 1 <= j <= p - 1:
        raise ValueError(f"j must lie in [1, {p - 1}], got {j}")
    if N < 0:
        raise ValueError("N must be >= 0")
    if x.precision < N + 1:
        raise PrecisionError(
            f"need {N + 1} digits to scale by p**-{N + 1}, code has {x.precision}"
        )
    modulus = p ** (N + 1)
    return PhaseFraction(p, (j * x.value) % modulus, N + 1)


def character_eval(f: PhaseFraction) -> tuple[float, float]:
    """(cos, sin) of the full turn 2*pi*f; exact on quarter turns."""
    num, den = f.numerator, f.denominator
    if num == 0:
        return (1.0, 0.0)
    if 4 * num == den:
        return (0.0, 1.0)
    if 2 * num == den:
        return (-1.0, 0.0)
    if 4 * num == 3 * den:
        return (0.0, -1.0)
    angle = 2.0 * math.pi * num / den
    return (math.cos(angle), math.sin(angle))


def digit_weight(x: PAdicCode) -> float:
    """sum(digits[i] * p**-(i+1)): a function separating all codes of a level.

    Restricted to codes of one precision this is injective, which makes
    it a convenient genuinely non-locally-constant test datum.
    """
    w = 0.0
    scale = 1.0 / x.p
    for d in x.digits:
        w += d * scale
        scale /= x.p
    return w


def codes_of_level(p: int, precision: int) -> Iterable[PAdicCode]:
    """All p**precision codes of a given precision, by integer value."""
    for v in range(p**precision):
        yield PAdicCode.from_int(v, p, precision)
