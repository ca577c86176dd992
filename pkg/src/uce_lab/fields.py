"""Exact scalar domains: the rationals or a prime field F_p.

Every computation in this package runs over one FieldConfig; there is no
floating point anywhere.  Scalars are `fractions.Fraction` when the
characteristic is 0 and plain ints in ``range(p)`` when it is a prime p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class DomainError(ValueError):
    """A scalar domain violates the workbench's ground rules."""


#: Large prime used as the fast probabilistic dimension oracle.
ORACLE_PRIME = 32003


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in (2, 3, 5, 7):
        if n % d == 0:
            return n == d
    d = 11
    while d * d <= n:
        if n % d == 0 or n % (d + 2) == 0:
            return False
        d += 6
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Exact coefficient field.

    characteristic 0 means the rationals, otherwise a prime p.  The small
    characteristics 2 and 3 are refused unless ``allow_small_char`` is set,
    mirroring the blanket assumption every theorem verified here makes.
    """

    characteristic: int = 0
    allow_small_char: bool = False

    def __post_init__(self):
        c = self.characteristic
        if c < 0 or (c != 0 and not is_prime(c)):
            raise DomainError(f"characteristic must be 0 or a prime, got {c}")
        if c in (2, 3) and not self.allow_small_char:
            raise DomainError(
                f"characteristic {c} is refused by default; "
                "pass allow_small_char=True to override")

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    # -- scalar constructors ------------------------------------------------

    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def coerce(self, value):
        """Turn an int, Fraction or 'p/q' string into a scalar of this field."""
        p = self.characteristic
        if isinstance(value, str):
            value = Fraction(value)
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            den = value.denominator % p
            if den == 0:
                raise DomainError(f"denominator of {value} vanishes mod {p}")
            return (value.numerator % p) * pow(den, -1, p) % p
        return int(value) % p

    # -- arithmetic (not used in hot loops; those specialise per field) -----

    def add(self, a, b):
        return (a + b) % self.characteristic if self.characteristic else a + b

    def sub(self, a, b):
        return (a - b) % self.characteristic if self.characteristic else a - b

    def mul(self, a, b):
        return (a * b) % self.characteristic if self.characteristic else a * b

    def neg(self, a):
        return (-a) % self.characteristic if self.characteristic else -a

    def inv(self, a):
        if self.characteristic:
            if a % self.characteristic == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, -1, self.characteristic)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return Fraction(1) / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return (a % self.characteristic == 0) if self.characteristic else a == 0

    def format(self, a) -> str:
        """Canonical string form; round-trips through coerce bit-exactly."""
        return str(a)


QQ = FieldConfig(0)
