"""Exact arithmetic substrate: bit strings, dyadic rationals, prefix-free sets.

Bit strings are plain ``str`` values over the alphabet ``"01"``; the empty
string is the null sequence.  Probabilities are :class:`fractions.Fraction`
values throughout, so every identity can be asserted with ``==``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Hashable, Iterable, Iterator

__all__ = [
    "BudgetExceeded",
    "Dyadic",
    "EMPTY",
    "PrefixFreeSet",
    "all_strings",
    "as_fraction",
    "check_bits",
    "complement_last",
    "format_bits",
    "is_dyadic",
    "is_prefix",
    "is_prefix_free",
    "parse_bits",
    "prefixes",
    "sigma",
    "strings_of_length",
]

EMPTY = ""


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of evaluation steps before it could conclude."""


def check_bits(x: str) -> str:
    if not isinstance(x, str) or x.strip("01"):
        raise ValueError(f"not a binary string: {x!r}")
    return x


def parse_bits(text: str) -> str:
    """Parse the serialized form, where ``"."`` stands for the empty string."""
    text = text.strip()
    if text == ".":
        return EMPTY
    if not text:
        raise ValueError("empty field; write '.' for the empty string")
    return check_bits(text)


def format_bits(x: str) -> str:
    return x if x else "."


def is_prefix(x: str, y: str) -> bool:
    return y.startswith(x)


def prefixes(x: str, proper: bool = False) -> Iterator[str]:
    """Yield the prefixes of ``x`` from shortest to longest."""
    stop = len(x) if proper else len(x) + 1
    for i in range(stop):
        yield x[:i]


def complement_last(x: str) -> str:
    """Flip the final digit of a non-empty bit string."""
    if not x:
        raise ValueError("the empty string has no last digit")
    return x[:-1] + ("1" if x[-1] == "0" else "0")


def strings_of_length(n: int) -> Iterator[str]:
    """All bit strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield EMPTY
        return
    for digits in product("01", repeat=n):
        yield "".join(digits)


def all_strings(max_len: int, root: str = EMPTY) -> Iterator[str]:
    """Extensions of ``root`` up to total length ``max_len``, shortest first."""
    for k in range(max_len - len(root) + 1):
        for tail in strings_of_length(k):
            yield root + tail


def as_fraction(value) -> Fraction:
    if isinstance(value, Dyadic):
        return value.to_fraction()
    if isinstance(value, float):
        raise TypeError("floats are not accepted where exact values are required")
    return Fraction(value)


def is_dyadic(value: Fraction) -> bool:
    den = Fraction(value).denominator
    return den & (den - 1) == 0


@dataclass(frozen=True)
class Dyadic:
    """``mantissa * 2**-exponent`` in canonical form (odd mantissa, or zero)."""

    mantissa: int
    exponent: int = 0

    def __post_init__(self):
        m, e = self.mantissa, self.exponent
        if m < 0 or e < 0:
            raise ValueError("dyadic values here are nonnegative with exponent >= 0")
        if m == 0:
            e = 0
        else:
            while e > 0 and m % 2 == 0:
                m //= 2
                e -= 1
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def from_fraction(cls, value) -> "Dyadic":
        value = Fraction(value)
        if value < 0 or not is_dyadic(value):
            raise ValueError(f"{value} has no finite radix-2 representation")
        return cls(value.numerator, value.denominator.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.exponent)

    def digits(self) -> list[int]:
        """Positions ``i`` of the set binary digits ``2**-i``, most significant first."""
        m, e = self.mantissa, self.exponent
        return [e - b for b in range(m.bit_length() - 1, -1, -1) if m >> b & 1]

    def __str__(self):
        return f"{self.mantissa}*2^-{self.exponent}"


class PrefixFreeSet(frozenset):
    """A finite set of bit strings none of which properly extends another."""

    def __new__(cls, members: Iterable[str] = ()):
        members = frozenset(check_bits(x) for x in members)
        if not is_prefix_free(members):
            raise ValueError("set is not prefix-free")
        return super().__new__(cls, members)


def is_prefix_free(members: Iterable[str]) -> bool:
    members = set(members)
    for x in members:
        for p in prefixes(x, proper=True):
            if p in members:
                return False
    return True


def sigma(members: Iterable[str]) -> Fraction:
    """Sum of ``2**-len(x)`` over a prefix-free set."""
    members = set(members)
    if not is_prefix_free(members):
        raise ValueError("sigma is only defined on prefix-free sets")
    return sum((Fraction(1, 1 << len(x)) for x in members), Fraction(0))


class Memo:
    """Thread-safe memo table.

    Values are computed outside the lock, so recursive computations that
    consult the same table do not deadlock; a racing duplicate computation
    yields the same pure value and the first stored one wins.
    """

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, key: Hashable, compute: Callable[[], object]):
        with self._lock:
            if key in self._data:
                return self._data[key]
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)

    def __len__(self):
        return len(self._data)
