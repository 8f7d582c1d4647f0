"""Negative curves of a configuration and effectivity of divisor classes.

Two independent deciders are provided:

* :func:`is_effective` peels forced fixed components.  If ``D`` is effective
  and ``D.G < 0`` for an irreducible curve ``G`` then ``G`` lies in every
  member of ``|D|``, so ``D - G`` is effective.  Peeling stops at a nef class
  (effective on these surfaces) or when a positivity bound fails.
* :func:`is_effective_bruteforce` enumerates decompositions
  ``D = (lines and conics) + (nef class) + (non-negative sum of E(i, j))``
  using the finite list of nef profiles with a given ``H`` coefficient.

Both rely only on the catalog being complete, which the tests check against a
class-enumeration sweep.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .configuration import SurfaceConfig, line_through, minimize
from .errors import InternalConsistencyError
from .lattice import (
    C,
    DivisorClass,
    ExceptionalClass,
    H,
    PointRef,
    anticanonical,
    from_exceptional,
    intersect,
    to_exceptional,
)

CHAIN, LINE, CONIC = "ChainCurve", "LineTransform", "ConicTransform"


@dataclass(frozen=True)
class CurveRecord:
    kind: str
    cls: DivisorClass
    self_int: int
    support: tuple[PointRef, ...]

    def label(self, names=None) -> str:
        name = (lambda p: names[p]) if names else str
        if self.kind == CHAIN:
            return f"E[{name(self.support[0])}]"
        if self.kind == LINE:
            return "L[" + ",".join(name(p) for p in self.support) + "]"
        return "Q[" + ",".join(name(p) for p in self.support) + "]"


def chain_curve(config: SurfaceConfig, p: PointRef) -> CurveRecord:
    cls = C(config.lengths, p)
    if p.slot < config.length(p.chain):
        cls = cls - C(config.lengths, PointRef(p.chain, p.slot + 1))
        return CurveRecord(CHAIN, cls, -2, (p,))
    return CurveRecord(CHAIN, cls, -1, (p,))


@lru_cache(maxsize=None)
def catalog(config: SurfaceConfig) -> tuple[CurveRecord, ...]:
    """All irreducible curves of negative self-intersection, in a fixed order."""
    records = [chain_curve(config, p) for p in config.points]
    seen = set()
    lines = []
    for pair in itertools.combinations(config.points, 2):
        if minimize(config, pair) != frozenset(pair):
            continue
        rec = line_through(config, pair)
        if rec.through in seen:
            continue
        seen.add(rec.through)
        lines.append(CurveRecord(LINE, rec.cls, rec.self_intersection, tuple(sorted(rec.through))))
    records.extend(sorted(lines, key=lambda r: r.support))
    if config.n_points == 5 and not config.lines:
        cls = 2 * H(config.lengths) - sum(
            (C(config.lengths, p) for p in config.points), DivisorClass.zero(config.lengths)
        )
        records.append(CurveRecord(CONIC, cls, -1, config.points))
    for rec in records:
        if intersect(rec.cls, rec.cls) != rec.self_int:
            raise InternalConsistencyError(f"{rec.label()} has wrong self-intersection")
    return tuple(records)


def passes_through_gen(line, p: PointRef) -> bool:
    """Generalized incidence of a line (a LineRecord or line CurveRecord) with a point."""
    through = line.through if hasattr(line, "through") else frozenset(line.support)
    return p in through


# --- weight class -------------------------------------------------------------------

@lru_cache(maxsize=None)
def weight_class(config: SurfaceConfig) -> tuple[DivisorClass, int]:
    """A positive weight ``A = scaled / denom`` with ``A.G > 0`` on every catalog curve.

    ``A = 3H - eps * sum (l(i) - j + 1) C(i, j)`` starting from ``eps = 1/8``.
    """
    denom = 8
    while True:
        scaled = DivisorClass.from_map(
            config.lengths,
            3 * denom,
            {p: -(config.length(p.chain) - p.slot + 1) for p in config.points},
        )
        if all(intersect(scaled, rec.cls) > 0 for rec in catalog(config)):
            return scaled, denom
        denom *= 2


def weight(config: SurfaceConfig, cls: DivisorClass) -> Fraction:
    scaled, denom = weight_class(config)
    return Fraction(intersect(scaled, cls), denom)


# --- vectorised kernel ---------------------------------------------------------------

def _signed(vectors) -> np.ndarray:
    """Rows ``v`` turned into ``s`` with ``s @ x == v . x`` under the lattice form."""
    arr = np.array(vectors, dtype=np.int64).reshape(len(vectors), -1)
    arr[:, 1:] *= -1
    return arr


@dataclass(frozen=True)
class _Kernel:
    records: tuple[CurveRecord, ...]
    curves: np.ndarray   # k x (n+1), plain coefficient vectors
    signed: np.ndarray   # k x (n+1), X @ signed.T gives intersections with curves
    gram: np.ndarray     # k x k
    anti: np.ndarray     # signed -K
    weight: np.ndarray   # signed scaled A
    curve_weight: np.ndarray


@lru_cache(maxsize=None)
def _kernel(config: SurfaceConfig) -> _Kernel:
    records = catalog(config)
    curves = np.array([r.cls.vector for r in records], dtype=np.int64)
    signed = _signed(curves)
    scaled, _ = weight_class(config)
    w = _signed([scaled.vector])[0]
    return _Kernel(
        records,
        curves,
        signed,
        curves @ signed.T,
        _signed([anticanonical(config.lengths).vector])[0],
        w,
        curves @ w,
    )


def peel_many(config: SurfaceConfig, vectors) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Forced-component peeling for many classes at once.

    Returns ``(effective, multiplicities, remainders)``; rows of ``vectors``
    are ``(h, c...)`` coefficient vectors.
    """
    kern = _kernel(config)
    X = np.array(vectors, dtype=np.int64).reshape(len(vectors), -1).copy()
    m = X.shape[0]
    inter = X @ kern.signed.T
    aw = X @ kern.weight
    mult = np.zeros((m, len(kern.records)), dtype=np.int64)
    effective = np.zeros(m, dtype=bool)
    active = (X @ kern.anti >= 0) & (aw >= 0)
    while active.any():
        rows = np.flatnonzero(active)
        neg = inter[rows] < 0
        has_neg = neg.any(axis=1)
        done = rows[~has_neg]
        effective[done] = True
        active[done] = False
        rows = rows[has_neg]
        if rows.size == 0:
            break
        j = np.argmax(neg[has_neg], axis=1)
        X[rows] -= kern.curves[j]
        inter[rows] -= kern.gram[j]
        aw[rows] -= kern.curve_weight[j]
        mult[rows, j] += 1
        active[rows[aw[rows] < 0]] = False
    return effective, mult, X


@dataclass(frozen=True)
class EffectivityWitness:
    parts: tuple[tuple[CurveRecord, int], ...]
    remainder: DivisorClass

    def total(self) -> DivisorClass:
        out = self.remainder
        for rec, k in self.parts:
            out = out + k * rec.cls
        return out


def _split_nef(config: SurfaceConfig, rem: DivisorClass) -> Counter | None:
    """Write a nef class as lines/conics plus exceptional curves, if possible."""
    records = catalog(config)
    planar = [k for k, r in enumerate(records) if r.kind != CHAIN]
    if rem.h == 0:
        return Counter() if rem.is_zero() else None
    for combo in itertools.combinations_with_replacement(planar, rem.h):
        if sum(records[k].cls.h for k in combo) != rem.h:
            continue
        rest = rem
        for k in combo:
            rest = rest - records[k].cls
        ex = to_exceptional(rest)
        if all(v >= 0 for v in ex.coeffs):
            counts = Counter(combo)
            for p, v in ex.e.items():
                counts[records.index(chain_curve(config, p))] += v
            return counts
    return None


def is_effective(config: SurfaceConfig, cls: DivisorClass) -> EffectivityWitness | None:
    """A witness that ``cls`` is effective, or None when it is not."""
    if intersect(cls, anticanonical(config.lengths)) < 0:
        return None
    effective, mult, rem = peel_many(config, [cls.vector])
    if not effective[0]:
        return None
    records = catalog(config)
    counts = Counter({k: int(v) for k, v in enumerate(mult[0]) if v})
    remainder = DivisorClass.from_vector(config.lengths, rem[0])
    extra = _split_nef(config, remainder)
    if extra is not None:
        counts.update(extra)
        remainder = DivisorClass.zero(config.lengths)
    parts = tuple((records[k], counts[k]) for k in sorted(counts))
    return EffectivityWitness(parts, remainder)


def is_effective_many(config: SurfaceConfig, vectors) -> np.ndarray:
    """Effectivity verdicts of :func:`is_effective` for many coefficient vectors."""
    return peel_many(config, vectors)[0]


def check_witness(config: SurfaceConfig, cls: DivisorClass, witness: EffectivityWitness) -> list[str]:
    problems = []
    if witness.total() != cls:
        problems.append("witness does not sum to the class")
    for rec, k in witness.parts:
        if k < 1:
            problems.append(f"non-positive multiplicity for {rec.label()}")
    for rec in catalog(config):
        if intersect(witness.remainder, rec.cls) < 0:
            problems.append(f"remainder meets {rec.label()} negatively")
    if intersect(witness.remainder, anticanonical(config.lengths)) < 0:
        problems.append("remainder has negative anticanonical degree")
    return problems


# --- brute-force oracle ---------------------------------------------------------------

def _e_matrix(lengths: tuple[int, ...], vectors: np.ndarray) -> np.ndarray:
    """E-basis coefficients (prefix sums along each chain) of coefficient vectors."""
    out = np.empty((vectors.shape[0], vectors.shape[1] - 1), dtype=np.int64)
    pos = 0
    for n in lengths:
        out[:, pos:pos + n] = np.cumsum(vectors[:, 1 + pos:1 + pos + n], axis=1)
        pos += n
    return out


def _concave_profiles(length: int, h: int) -> list[tuple[int, ...]]:
    """E-coefficients ``x`` along one chain of a nef class with H-coefficient h.

    Nefness against C(i, t) and E(i, t) makes the steps ``x[t-1] - x[t]``
    non-negative and non-increasing, and the fibre class bounds the first step by h.
    """
    out = []
    for steps in itertools.combinations_with_replacement(range(h, -1, -1), length):
        out.append(tuple(-v for v in itertools.accumulate(steps)))
    return out


@lru_cache(maxsize=None)
def _nef_profiles(config: SurfaceConfig, h: int) -> np.ndarray:
    """E-coefficients of every nef class with H-coefficient ``h``."""
    per_chain = [_concave_profiles(n, h) for n in config.lengths]
    rows = [sum(combo, ()) for combo in itertools.product(*per_chain)]
    E = np.array(rows, dtype=np.int64).reshape(len(rows), config.n_points)
    coeffs = np.empty_like(E)
    pos = 0
    for n in config.lengths:
        block = E[:, pos:pos + n]
        coeffs[:, pos:pos + n] = np.diff(block, axis=1, prepend=0)
        pos += n
    full = np.hstack([np.full((len(rows), 1), h, dtype=np.int64), coeffs])
    curves = np.array([r.cls.vector for r in catalog(config)], dtype=np.int64)
    nef = np.all(full @ _signed(curves).T >= 0, axis=1)
    return E[nef]


def _pareto_min(rows: np.ndarray) -> np.ndarray:
    rows = np.unique(rows, axis=0)
    keep = []
    order = np.argsort(rows.sum(axis=1), kind="stable")
    for idx in order:
        r = rows[idx]
        if any(np.all(k <= r) for k in keep):
            continue
        keep.append(r)
    return np.array(keep, dtype=np.int64).reshape(len(keep), rows.shape[1])


@lru_cache(maxsize=None)
def _generators(config: SurfaceConfig, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Minimal E-profiles ``e(sum L + R)`` over planar multisets L and nef R.

    Returns ``(profiles, planar_weight)``; the weight is the scaled A-weight of
    the planar part, so callers can honour an explicit search bound.
    """
    records = catalog(config)
    planar = [r for r in records if r.kind != CHAIN]
    scaled, _ = weight_class(config)
    by_weight: dict[int, list[np.ndarray]] = {}
    for size in range(0, h + 1):
        for combo in itertools.combinations_with_replacement(range(len(planar)), size):
            deg = sum(planar[k].cls.h for k in combo)
            if deg > h:
                continue
            total = sum((planar[k].cls for k in combo), DivisorClass.zero(config.lengths))
            e_part = np.array(to_exceptional(total).coeffs, dtype=np.int64)
            nef = _nef_profiles(config, h - deg)
            if nef.shape[0] == 0:
                continue
            w = intersect(scaled, total)
            by_weight.setdefault(w, []).append(nef + e_part)
    profiles, weights = [], []
    for w in sorted(by_weight):
        block = _pareto_min(np.vstack(by_weight[w]))
        profiles.append(block)
        weights.append(np.full(block.shape[0], w, dtype=np.int64))
    if not profiles:
        n = config.n_points
        return np.zeros((0, n), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.vstack(profiles), np.concatenate(weights)


def is_effective_bruteforce(config: SurfaceConfig, cls: DivisorClass, bound: Fraction | None = None) -> bool:
    """Exhaustive decomposition search, independent of the peeling algorithm.

    ``bound`` caps the A-weight of the line/conic part; the default ``cls.A``
    can never exclude a valid decomposition.
    """
    if cls.h < 0:
        return False
    _, denom = weight_class(config)
    limit = weight(config, cls) if bound is None else Fraction(bound)
    profiles, weights = _generators(config, cls.h)
    mask = weights <= limit * denom
    e = np.array(to_exceptional(cls).coeffs, dtype=np.int64)
    return bool(np.any(np.all(profiles[mask] <= e, axis=1)))


def is_effective_bruteforce_many(config: SurfaceConfig, vectors) -> np.ndarray:
    """Oracle verdicts for many classes via an up-closed grid of E-profiles."""
    V = np.array(vectors, dtype=np.int64).reshape(len(vectors), -1)
    out = np.zeros(V.shape[0], dtype=bool)
    E = _e_matrix(config.lengths, V)
    for h in np.unique(V[:, 0]):
        if h < 0:
            continue
        rows = np.flatnonzero(V[:, 0] == h)
        q = E[rows]
        lo, hi = q.min(axis=0), q.max(axis=0)
        gens, _ = _generators(config, int(h))
        gens = np.maximum(gens, lo)
        gens = gens[np.all(gens <= hi, axis=1)]
        grid = np.zeros(tuple(hi - lo + 1), dtype=bool)
        if gens.shape[0]:
            grid[tuple((gens - lo).T)] = True
            for axis in range(grid.ndim):
                np.logical_or.accumulate(grid, axis=axis, out=grid)
        out[rows] = grid[tuple((q - lo).T)]
    return out


def from_e(config: SurfaceConfig, h: int, e: dict[PointRef, int]) -> DivisorClass:
    """Convenience: a class given by its E-basis coefficients."""
    coeffs = tuple(e.get(p, 0) for p in config.points)
    return from_exceptional(ExceptionalClass(config.lengths, h, coeffs))
