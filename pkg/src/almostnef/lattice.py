"""Integer intersection theory on the Neron-Severi lattice of an iterated blow-up.

The surface is the plane blown up along chains of infinitely near points.  The
lattice has the basis ``H`` (pulled-back line) and ``C(i, j)`` (total transform
of the exceptional curve created at the j-th point of chain i), with

    H.H = 1,  H.C = 0,  C(i, j).C(k, m) = -1 if (i, j) == (k, m) else 0.

Only the tuple of chain lengths matters for the lattice, so classes carry it
and refuse to interact with classes over a different chain structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import ConfigurationMismatch, InvalidPointRef

Lengths = tuple[int, ...]


@dataclass(frozen=True, order=True)
class PointRef:
    """The ``slot``-th infinitely near point of chain ``chain`` (both 1-based)."""

    chain: int
    slot: int

    def __str__(self) -> str:
        return f"p{self.chain},{self.slot}"


@lru_cache(maxsize=None)
def points_of(lengths: Lengths) -> tuple[PointRef, ...]:
    """All point references of a chain structure, chain by chain."""
    return tuple(
        PointRef(i, j) for i, n in enumerate(lengths, start=1) for j in range(1, n + 1)
    )


@lru_cache(maxsize=None)
def _index(lengths: Lengths) -> dict[PointRef, int]:
    return {p: k for k, p in enumerate(points_of(lengths))}


def point_index(lengths: Lengths, p: PointRef) -> int:
    try:
        return _index(lengths)[p]
    except KeyError:
        raise InvalidPointRef(f"{p} is not a point of chains {list(lengths)}") from None


def _lengths_of(obj) -> Lengths:
    if isinstance(obj, tuple):
        return obj
    return obj.lengths


@dataclass(frozen=True)
class DivisorClass:
    """A class ``h*H + sum c[p]*C(p)``.

    Coefficients are stored densely in :func:`points_of` order; :attr:`c`
    gives the sparse view with zero entries pruned.
    """

    lengths: Lengths
    h: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != sum(self.lengths):
            raise ValueError("coefficient vector does not match the chain structure")

    @classmethod
    def from_map(cls, lattice, h: int, c: Mapping[PointRef, int] | None = None) -> "DivisorClass":
        lengths = _lengths_of(lattice)
        dense = [0] * sum(lengths)
        for p, v in (c or {}).items():
            dense[point_index(lengths, p)] += int(v)
        return cls(lengths, int(h), tuple(dense))

    @classmethod
    def zero(cls, lattice) -> "DivisorClass":
        lengths = _lengths_of(lattice)
        return cls(lengths, 0, (0,) * sum(lengths))

    @classmethod
    def from_vector(cls, lattice, vector: Iterable[int]) -> "DivisorClass":
        h, *rest = (int(v) for v in vector)
        return cls(_lengths_of(lattice), h, tuple(rest))

    @property
    def c(self) -> dict[PointRef, int]:
        return {p: v for p, v in zip(points_of(self.lengths), self.coeffs) if v}

    @property
    def vector(self) -> tuple[int, ...]:
        return (self.h, *self.coeffs)

    def coef(self, p: PointRef) -> int:
        return self.coeffs[point_index(self.lengths, p)]

    def is_zero(self) -> bool:
        return self.h == 0 and not any(self.coeffs)

    def _check(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass):
            raise TypeError(f"expected DivisorClass, got {type(other).__name__}")
        if other.lengths != self.lengths:
            raise ConfigurationMismatch(
                f"classes over chains {list(self.lengths)} and {list(other.lengths)}"
            )

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(
            self.lengths, self.h + other.h, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(
            self.lengths, self.h - other.h, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.lengths, -self.h, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "DivisorClass":
        if not isinstance(k, int):
            return NotImplemented
        return DivisorClass(self.lengths, k * self.h, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = [f"{self.h}H"] if self.h else []
        for p, v in self.c.items():
            terms.append(f"{'+' if v > 0 else '-'} {abs(v) if abs(v) != 1 else ''}C{p.chain},{p.slot}")
        return " ".join(terms) or "0"


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    a._check(b)
    return a.h * b.h - sum(x * y for x, y in zip(a.coeffs, b.coeffs))


def H(lattice) -> DivisorClass:
    lengths = _lengths_of(lattice)
    return DivisorClass(lengths, 1, (0,) * sum(lengths))


def C(lattice, p: PointRef) -> DivisorClass:
    return DivisorClass.from_map(lattice, 0, {p: 1})


def anticanonical(lattice) -> DivisorClass:
    """``-K = 3H - sum of all C(i, j)``."""
    lengths = _lengths_of(lattice)
    return DivisorClass(lengths, 3, (-1,) * sum(lengths))


def gram_matrix(lattice) -> list[list[int]]:
    n = sum(_lengths_of(lattice)) + 1
    return [[(1 if i == 0 else -1) if i == j else 0 for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class ExceptionalClass:
    """A class ``h*H + sum e[p]*E(p)`` in terms of strict transforms ``E(i, j)``.

    ``C(i, j) = E(i, j) + E(i, j+1) + ... + E(i, l(i))``.
    """

    lengths: Lengths
    h: int
    coeffs: tuple[int, ...]

    @property
    def e(self) -> dict[PointRef, int]:
        return {p: v for p, v in zip(points_of(self.lengths), self.coeffs) if v}


def to_exceptional(a: DivisorClass) -> ExceptionalClass:
    out = []
    pos = 0
    for n in a.lengths:
        running = 0
        for v in a.coeffs[pos:pos + n]:
            running += v
            out.append(running)
        pos += n
    return ExceptionalClass(a.lengths, a.h, tuple(out))


def from_exceptional(x: ExceptionalClass) -> DivisorClass:
    out = []
    pos = 0
    for n in x.lengths:
        prev = 0
        for v in x.coeffs[pos:pos + n]:
            out.append(v - prev)
            prev = v
        pos += n
    return DivisorClass(x.lengths, x.h, tuple(out))
