"""Combinatorial model of a simple surface.

A configuration is a list of chains of infinitely near points plus a set of
declared collinear triples.  Collinearity is input data: every incidence fact
used elsewhere is derived from the declarations through :func:`minimize`.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import InvalidConfiguration, InvalidPointRef
from .lattice import C, DivisorClass, H, PointRef, points_of

SUPPORTED_POINT_COUNTS = (4, 5)


@dataclass(frozen=True)
class LineDecl:
    """A declared triple of points lying on one line in the generalized sense."""

    points: frozenset[PointRef]

    @classmethod
    def of(cls, *points: PointRef) -> "LineDecl":
        return cls(frozenset(points))

    def sorted(self) -> tuple[PointRef, ...]:
        return tuple(sorted(self.points))


@dataclass(frozen=True)
class SurfaceConfig:
    lengths: tuple[int, ...]
    lines: tuple[LineDecl, ...] = ()
    names: tuple[tuple[str, ...], ...] | None = field(default=None, compare=False)

    @property
    def n_points(self) -> int:
        return sum(self.lengths)

    @property
    def degree(self) -> int:
        return 9 - self.n_points

    @property
    def r(self) -> int:
        return len(self.lengths)

    @property
    def points(self) -> tuple[PointRef, ...]:
        return points_of(self.lengths)

    def length(self, chain: int) -> int:
        return self.lengths[chain - 1]

    def has_point(self, p: PointRef) -> bool:
        return 1 <= p.chain <= len(self.lengths) and 1 <= p.slot <= self.lengths[p.chain - 1]

    @cached_property
    def point_names(self) -> dict[PointRef, str]:
        names = self.names or default_names(self.lengths)
        return {PointRef(i, j): n for i, chain in enumerate(names, 1) for j, n in enumerate(chain, 1)}

    def name(self, p: PointRef) -> str:
        return self.point_names[p]


def default_names(lengths: Sequence[int]) -> tuple[tuple[str, ...], ...]:
    letters = string.ascii_lowercase
    return tuple(
        (letters[i],) if n == 1 else tuple(f"{letters[i]}{j}" for j in range(1, n + 1))
        for i, n in enumerate(lengths)
    )


def from_names(chains: Sequence[Sequence[str]], lines: Iterable[Sequence[str]] = ()) -> SurfaceConfig:
    """Build a configuration from point names.  Raises KeyError on unknown names."""
    lookup = {}
    for i, chain in enumerate(chains, 1):
        for j, name in enumerate(chain, 1):
            lookup[name] = PointRef(i, j)
    decls = tuple(LineDecl(frozenset(lookup[n] for n in line)) for line in lines)
    return SurfaceConfig(
        tuple(len(ch) for ch in chains), decls, tuple(tuple(ch) for ch in chains)
    )


# --- validation ---------------------------------------------------------------

def _is_minimal(config: SurfaceConfig, pts: Iterable[PointRef]) -> bool:
    pts = set(pts)
    return pts == set(minimize(config, pts))


def validate(config: SurfaceConfig) -> list[str]:
    """Return every violated validity rule; an empty list means the config is valid."""
    errors = []
    if any(n < 1 for n in config.lengths):
        errors.append("chain lengths must be positive")
    if config.n_points not in SUPPORTED_POINT_COUNTS:
        errors.append(f"point count must be 4 or 5 (got {config.n_points})")
    if config.names is not None:
        flat = [n for chain in config.names for n in chain]
        if tuple(len(ch) for ch in config.names) != config.lengths:
            errors.append("point names do not match chain lengths")
        if len(set(flat)) != len(flat):
            errors.append("point names must be unique")
    good_lines = []
    for k, line in enumerate(config.lines):
        label = "{" + ", ".join(str(p) for p in sorted(line.points)) + "}"
        if len(line.points) != 3:
            errors.append(f"line {k} {label} must have exactly 3 distinct points")
            continue
        bad = [p for p in line.points if not config.has_point(p)]
        if bad:
            errors.append(f"line {k} {label} has invalid point reference {min(bad)}")
            continue
        if not _is_minimal(config, line.points):
            errors.append(f"line {k} {label} is a non-minimal declaration")
            continue
        good_lines.append((k, line))
    for (k1, a), (k2, b) in itertools.combinations(good_lines, 2):
        if len(a.points & b.points) >= 2:
            errors.append(f"lines {k1} and {k2} share a pair")
    return errors


def ensure_valid(config: SurfaceConfig) -> SurfaceConfig:
    errors = validate(config)
    if errors:
        raise InvalidConfiguration(errors)
    return config


# --- minimization and incidence -------------------------------------------------

def minimize(config: SurfaceConfig, points: Iterable[PointRef]) -> frozenset[PointRef]:
    """Slide the points of each chain down to the prefix of the same size."""
    counts: dict[int, set[int]] = {}
    for p in points:
        if not config.has_point(p):
            raise InvalidPointRef(f"{p} is not a point of chains {list(config.lengths)}")
        counts.setdefault(p.chain, set()).add(p.slot)
    return frozenset(
        PointRef(i, j) for i, slots in counts.items() for j in range(1, len(slots) + 1)
    )


@dataclass(frozen=True)
class LineRecord:
    base: frozenset[PointRef]
    through: frozenset[PointRef]
    cls: DivisorClass

    @property
    def self_intersection(self) -> int:
        return 1 - len(self.through)


def line_through(config: SurfaceConfig, pair: Iterable[PointRef]) -> LineRecord:
    pair = set(pair)
    if len(pair) != 2:
        raise ValueError("a line is determined by exactly two distinct points")
    base = minimize(config, pair)
    through = base
    for decl in config.lines:
        if base <= decl.points:
            through = decl.points
            break
    cls = H(config.lengths)
    for p in through:
        cls = cls - C(config.lengths, p)
    return LineRecord(base, frozenset(through), cls)


def collinear(config: SurfaceConfig, p: PointRef, q: PointRef, r: PointRef) -> bool:
    triple = minimize(config, (p, q, r))
    if len(triple) != 3:
        raise ValueError("collinearity needs three distinct points")
    a, b, _ = sorted(triple)
    return triple <= line_through(config, (a, b)).through


def good_position(config: SurfaceConfig, four: Iterable[PointRef]) -> bool:
    four = tuple(four)
    if len(set(four)) != 4:
        raise ValueError("good position needs four distinct points")
    return not any(collinear(config, *t) for t in itertools.combinations(four, 3))


def minimal_good_quadruples(config: SurfaceConfig) -> list[tuple[PointRef, ...]]:
    """Minimal 4-subsets in good position, in lexicographic order."""
    return [
        four
        for four in itertools.combinations(config.points, 4)
        if _is_minimal(config, four) and good_position(config, four)
    ]


# --- sub-configurations ---------------------------------------------------------

def restriction_map(config: SurfaceConfig, keep: Iterable[PointRef]) -> dict[PointRef, PointRef]:
    keep = frozenset(keep)
    if not _is_minimal(config, keep):
        raise InvalidConfiguration([f"restriction set {sorted(map(str, keep))} is not minimal"])
    mapping = {}
    new_chain = 0
    for i in range(1, config.r + 1):
        slots = sorted(p.slot for p in keep if p.chain == i)
        if slots:
            new_chain += 1
            for j in slots:
                mapping[PointRef(i, j)] = PointRef(new_chain, j)
    return mapping


def restrict(config: SurfaceConfig, keep: Iterable[PointRef]) -> SurfaceConfig:
    """The configuration blowing up only the (minimal) subset ``keep``."""
    mapping = restriction_map(config, keep)
    lengths = []
    names = []
    for i in range(1, config.r + 1):
        kept = [p for p in config.points if p.chain == i and p in mapping]
        if kept:
            lengths.append(len(kept))
            names.append(tuple(config.name(p) for p in kept))
    lines = tuple(
        LineDecl(frozenset(mapping[p] for p in decl.points))
        for decl in config.lines
        if decl.points <= mapping.keys()
    )
    return SurfaceConfig(tuple(lengths), lines, tuple(names))


def pullback(config: SurfaceConfig, keep: Iterable[PointRef], cls: DivisorClass) -> DivisorClass:
    """Pull a class on ``restrict(config, keep)`` back to ``config``."""
    mapping = restriction_map(config, keep)
    inverse = {new: old for old, new in mapping.items()}
    return DivisorClass.from_map(config.lengths, cls.h, {inverse[p]: v for p, v in cls.c.items()})


# --- canonical forms and enumeration --------------------------------------------

def _line_key(lines: Iterable[LineDecl]) -> tuple:
    return tuple(sorted(
        tuple((p.chain, p.slot) for p in decl.sorted()) for decl in lines
    ))


def canonical(config: SurfaceConfig) -> SurfaceConfig:
    """Sort chains by decreasing length, breaking ties by the smallest line signature."""
    order = sorted(range(config.r), key=lambda i: -config.lengths[i])
    lengths = tuple(config.lengths[i] for i in order)
    best = None
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda i: config.lengths[i])]
    for perm_groups in itertools.product(*(itertools.permutations(g) for g in groups)):
        perm = [i for g in perm_groups for i in g]
        new_index = {old + 1: new + 1 for new, old in enumerate(perm)}
        lines = tuple(
            LineDecl(frozenset(PointRef(new_index[p.chain], p.slot) for p in decl.points))
            for decl in config.lines
        )
        key = _line_key(lines)
        if best is None or key < best[0]:
            best = (key, perm, lines)
    key, perm, lines = best
    lines = tuple(sorted(lines, key=lambda d: _line_key([d])))
    names = tuple(tuple(config.names[i]) for i in perm) if config.names is not None else None
    return SurfaceConfig(lengths, lines, names)


def partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Integer partitions of n, parts in decreasing order, lexicographically decreasing."""
    largest = n if largest is None else largest
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        out.extend((first, *rest) for rest in partitions(n - first, first))
    return out


def _line_sets(candidates: list[frozenset], chosen: list[frozenset], start: int):
    yield list(chosen)
    for k in range(start, len(candidates)):
        cand = candidates[k]
        if all(len(cand & other) < 2 for other in chosen):
            chosen.append(cand)
            yield from _line_sets(candidates, chosen, k + 1)
            chosen.pop()


@lru_cache(maxsize=None)
def _enumerate(n_points: int) -> tuple[SurfaceConfig, ...]:
    found: dict[tuple, SurfaceConfig] = {}
    for lengths in partitions(n_points):
        shape = SurfaceConfig(lengths)
        candidates = [
            frozenset(t) for t in itertools.combinations(shape.points, 3) if _is_minimal(shape, t)
        ]
        for lines in _line_sets(candidates, [], 0):
            config = canonical(SurfaceConfig(lengths, tuple(LineDecl(t) for t in lines)))
            key = (config.lengths, _line_key(config.lines))
            found.setdefault(key, config)
    ordered = sorted(
        found.items(),
        key=lambda kv: (tuple(-n for n in kv[0][0]), len(kv[0][1]), kv[0][1]),
    )
    return tuple(
        SurfaceConfig(c.lengths, c.lines, default_names(c.lengths)) for _, c in ordered
    )


def enumerate_configs(n_points: int) -> list[SurfaceConfig]:
    """All valid configurations on ``n_points`` points up to relabeling equal chains."""
    if n_points not in SUPPORTED_POINT_COUNTS:
        raise ValueError("n_points must be 4 or 5")
    return list(_enumerate(n_points))
