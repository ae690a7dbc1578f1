"""Exact ground fields: the rationals and prime fields F_p.

Elements are plain Python objects (``Fraction`` for Q, ``int`` in
``range(p)`` for F_p).  Arithmetic is done with the usual operators and
then passed through :meth:`norm`, which is the identity over Q and a
reduction mod p over F_p.  Division always goes through :meth:`inv`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Union


class FieldMismatchError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Rationals:
    characteristic = 0
    name = "Q"

    def __call__(self, x) -> Fraction:
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)

    def norm(self, x):
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("division by zero in Q")
        return 1 / Fraction(x)

    def is_zero(self, x) -> bool:
        return x == 0

    def encode(self, x) -> str:
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"

    def decode(self, s) -> Fraction:
        if isinstance(s, bool):
            raise ValueError(f"not a rational: {s!r}")
        if isinstance(s, int):
            return Fraction(s)
        if not isinstance(s, str):
            raise ValueError(f"not a rational: {s!r}")
        return Fraction(s.strip())

    def to_json(self) -> Any:
        return "Q"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField:
    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"F{p}"

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % self.p

    def norm(self, x):
        return x % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return pow(x, -1, self.p)

    def is_zero(self, x) -> bool:
        return x % self.p == 0

    def encode(self, x) -> str:
        return str(x % self.p)

    def decode(self, s) -> int:
        if isinstance(s, bool):
            raise ValueError(f"not a residue: {s!r}")
        if isinstance(s, int):
            return s % self.p
        if not isinstance(s, str):
            raise ValueError(f"not a residue: {s!r}")
        return self(s.strip())

    def to_json(self) -> Any:
        return {"p": self.p}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"GF({self.p})"


Field = Union[Rationals, PrimeField]

QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_json(obj) -> Field:
    if obj == "Q":
        return QQ
    if isinstance(obj, dict) and set(obj) == {"p"} and isinstance(obj["p"], int):
        return PrimeField(obj["p"])
    raise ValueError(f"unrecognised field descriptor {obj!r}")


def parse_field(text: str) -> Field:
    """Parse a field given on the command line: ``Q`` or a prime such as ``31``."""
    text = text.strip()
    if text.upper() in ("Q", "QQ"):
        return QQ
    if text.upper().startswith("F"):
        text = text[1:]
    return PrimeField(int(text))


def same_field(*fields: Field) -> Field:
    first = fields[0]
    for f in fields[1:]:
        if f != first:
            raise FieldMismatchError(f"cannot mix {first!r} and {f!r}")
    return first
