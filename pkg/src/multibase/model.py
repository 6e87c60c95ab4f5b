"""Base systems, representations and digit statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BaseTooSmall,
    DigitBoundTooSmall,
    DomainError,
    InvalidRepresentation,
    NonCoprimeBases,
    TooFewBases,
    UnsortedBases,
)


@dataclass(frozen=True)
class BaseSystem:
    """Pairwise coprime bases ``p_1 < ... < p_m`` with digits ``0..d-1``."""

    bases: tuple[int, ...]
    digit_bound: int

    def __post_init__(self):
        bases = tuple(int(p) for p in self.bases)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "digit_bound", int(self.digit_bound))
        if len(bases) < 2:
            raise TooFewBases(f"need at least two bases, got {len(bases)}")
        for p in bases:
            if p < 2:
                raise BaseTooSmall(f"every base must be >= 2, got {p}")
        for a, b in zip(bases, bases[1:]):
            if a >= b:
                raise UnsortedBases(f"bases must be strictly increasing: {bases}")
        for i in range(len(bases)):
            for j in range(i + 1, len(bases)):
                if math.gcd(bases[i], bases[j]) != 1:
                    raise NonCoprimeBases(i + 1, j + 1, bases)
        if self.digit_bound < 2:
            raise DigitBoundTooSmall(f"digit bound d must be >= 2, got {self.digit_bound}")

    @property
    def m(self) -> int:
        return len(self.bases)

    @property
    def d(self) -> int:
        return self.digit_bound

    @property
    def log_bases(self) -> tuple[float, ...]:
        return tuple(math.log(p) for p in self.bases)

    def contains(self, h: int) -> bool:
        """True iff ``h`` is a product of powers of the bases."""
        if h < 1:
            return False
        for p in self.bases:
            while h % p == 0:
                h //= p
        return h == 1

    def representation(self, terms: Iterable[tuple[int, int]]) -> Representation:
        return Representation(self, tuple(terms))

    def __str__(self):
        return f"bases={','.join(map(str, self.bases))} d={self.digit_bound}"


def validate_base_system(bases: Sequence[int], d: int) -> BaseSystem:
    return BaseSystem(tuple(bases), d)


@dataclass(frozen=True)
class Representation:
    """One expansion ``n = sum a_l B_l``; only nonzero digits are stored.

    ``terms`` holds ``(B_l, a_l)`` pairs with strictly increasing ``B_l``.
    """

    system: BaseSystem
    terms: tuple[tuple[int, int], ...]
    value: int = field(init=False)

    def __post_init__(self):
        terms = tuple((int(b), int(a)) for b, a in self.terms)
        object.__setattr__(self, "terms", terms)
        d = self.system.digit_bound
        prev = 0
        total = 0
        for b, a in terms:
            if b <= prev:
                raise InvalidRepresentation(f"terms not strictly increasing at {b}")
            if not 1 <= a <= d - 1:
                raise InvalidRepresentation(f"digit {a} outside 1..{d - 1}")
            if not self.system.contains(b):
                raise InvalidRepresentation(f"{b} is not a product of the bases")
            prev = b
            total += a * b
        object.__setattr__(self, "value", total)

    @property
    def length(self) -> int:
        return len(self.terms)

    def digit_at(self, h: int) -> int:
        for b, a in self.terms:
            if b == h:
                return a
        return 0

    def evaluate(self) -> int:
        return sum(a * b for b, a in self.terms)


_KINDS = ("sum", "weight", "digit")


@dataclass(frozen=True)
class Statistic:
    """A digit statistic: sum of digits, Hamming weight, or count of digit b."""

    kind: str
    digit: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown statistic {self.kind!r}")
        if self.kind == "digit":
            if self.digit is None or self.digit < 1:
                # zero digits fill all of S, so their count is not finite
                raise DomainError("DigitCount needs a digit b >= 1")
        elif self.digit is not None:
            raise DomainError(f"{self.kind} takes no digit argument")

    @classmethod
    def sum_of_digits(cls) -> Statistic:
        return cls("sum")

    @classmethod
    def hamming_weight(cls) -> Statistic:
        return cls("weight")

    @classmethod
    def digit_count(cls, b: int) -> Statistic:
        return cls("digit", int(b))

    @classmethod
    def parse(cls, text: str) -> Statistic:
        """Parse ``sum``, ``weight`` or ``digit:b``."""
        text = text.strip().lower()
        if text in ("sum", "weight"):
            return cls(text)
        if text.startswith("digit:"):
            try:
                b = int(text.split(":", 1)[1])
            except ValueError:
                raise DomainError(f"bad digit in {text!r}") from None
            return cls.digit_count(b)
        raise DomainError(f"unknown statistic {text!r}; use sum, weight or digit:b")

    def check(self, system: BaseSystem) -> Statistic:
        if self.kind == "digit" and self.digit > system.digit_bound - 1:
            raise DomainError(
                f"digit {self.digit} outside 1..{system.digit_bound - 1}")
        return self

    def weight(self, a: int) -> int:
        """Contribution of a single digit ``a`` to the statistic."""
        if self.kind == "sum":
            return a
        if self.kind == "weight":
            return 1 if a else 0
        return 1 if a == self.digit else 0

    def weights(self, d: int) -> list[int]:
        return [self.weight(a) for a in range(d)]

    def __str__(self):
        return f"digit:{self.digit}" if self.kind == "digit" else self.kind


def statistic_value(rep: Representation, stat: Statistic) -> int:
    return sum(stat.weight(a) for _, a in rep.terms)
