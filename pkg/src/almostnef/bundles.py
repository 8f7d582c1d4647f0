"""Conic bundle structures of degree 1 and 2 and their singular fibres.

Singular fibres are found uniformly: the vertical catalog curves (those
orthogonal to the fibre class) are grouped into connected components of the
intersection graph, and each group's multiplicities are the unique rational
solution of ``sum a_k * cls_k = fibre class``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .configuration import SurfaceConfig, minimal_good_quadruples
from .curves import LINE, CurveRecord, catalog
from .errors import InternalConsistencyError
from .lattice import C, DivisorClass, H, PointRef, anticanonical, intersect


@dataclass(frozen=True)
class Fiber:
    components: tuple[tuple[CurveRecord, int], ...]
    # (k1, k2, count): indices into components and their intersection number
    nodes: tuple[tuple[int, int, int], ...]

    @property
    def M(self) -> int:
        return max(a for _, a in self.components)

    @property
    def reduced(self) -> bool:
        return all(a == 1 for _, a in self.components)

    @property
    def node_count(self) -> int:
        return sum(k for _, _, k in self.nodes)

    @property
    def euler(self) -> int:
        """Topological Euler number of the support, a tree of rational curves."""
        return 2 * len(self.components) - self.node_count

    def total(self, lengths) -> DivisorClass:
        out = DivisorClass.zero(lengths)
        for rec, a in self.components:
            out = out + a * rec.cls
        return out


@dataclass(frozen=True)
class ConicBundle:
    degree: int
    base_points: tuple[PointRef, ...]
    fiber_class: DivisorClass
    config: SurfaceConfig = field(repr=False, compare=False)
    singular_fibers: tuple[Fiber, ...] = ()

    @property
    def label(self) -> str:
        return f"deg{self.degree}[" + ",".join(self.config.name(p) for p in self.base_points) + "]"


def _fiber_class(config: SurfaceConfig, degree: int, points) -> DivisorClass:
    cls = degree * H(config.lengths)
    for p in points:
        cls = cls - C(config.lengths, p)
    return cls


def _build(config: SurfaceConfig, degree: int, points: tuple[PointRef, ...]) -> ConicBundle:
    bundle = ConicBundle(degree, points, _fiber_class(config, degree, points), config)
    return ConicBundle(degree, points, bundle.fiber_class, config, tuple(singular_fibers(bundle)))


@lru_cache(maxsize=None)
def _degree1(config: SurfaceConfig) -> tuple[ConicBundle, ...]:
    return tuple(_build(config, 1, (PointRef(i, 1),)) for i in range(1, config.r + 1))


@lru_cache(maxsize=None)
def _degree2(config: SurfaceConfig) -> tuple[ConicBundle, ...]:
    return tuple(_build(config, 2, four) for four in minimal_good_quadruples(config))


def degree1_bundles(config: SurfaceConfig) -> list[ConicBundle]:
    """One bundle ``H - C(i, 1)`` per chain, in chain order."""
    return list(_degree1(config))


def degree2_bundles(config: SurfaceConfig) -> list[ConicBundle]:
    """One bundle ``2H - (four C's)`` per minimal good-position 4-subset."""
    return list(_degree2(config))


def all_bundles(config: SurfaceConfig) -> list[ConicBundle]:
    return degree1_bundles(config) + degree2_bundles(config)


# --- singular fibres ---------------------------------------------------------------

def solve_exact(columns: list[tuple[int, ...]], rhs: tuple[int, ...]) -> list[Fraction] | None:
    """The unique solution of ``sum x_k * columns[k] = rhs``, or None.

    None covers both inconsistent and underdetermined systems.
    """
    n = len(columns)
    rows = [[Fraction(col[r]) for col in columns] + [Fraction(rhs[r])] for r in range(len(rhs))]
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if pivot is None:
            return None
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [v / lead for v in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                factor = rows[k][c]
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[n] != 0 for row in rows[r:]):
        return None
    return [rows[k][n] for k in range(n)]


def _groups(curves: list[CurveRecord]) -> list[list[int]]:
    parent = list(range(len(curves)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for a in range(len(curves)):
        for b in range(a + 1, len(curves)):
            if intersect(curves[a].cls, curves[b].cls) > 0:
                parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for k in range(len(curves)):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values())


def singular_fibers(bundle: ConicBundle) -> list[Fiber]:
    F = bundle.fiber_class
    vertical = [rec for rec in catalog(bundle.config) if intersect(rec.cls, F) == 0]
    fibers = []
    for group in _groups(vertical):
        recs = [vertical[k] for k in group]
        sol = solve_exact([r.cls.vector for r in recs], F.vector)
        if sol is None or any(a.denominator != 1 or a < 1 for a in sol):
            names = ", ".join(r.label() for r in recs)
            raise InternalConsistencyError(
                f"vertical curves {names} of {bundle.label} do not form a fibre (solution {sol})"
            )
        nodes = []
        for a in range(len(recs)):
            for b in range(a + 1, len(recs)):
                k = intersect(recs[a].cls, recs[b].cls)
                if k > 1:
                    raise InternalConsistencyError(
                        f"components {recs[a].label()} and {recs[b].label()} meet with multiplicity {k}"
                    )
                if k > 0:
                    nodes.append((a, b, k))
        fibers.append(Fiber(tuple(zip(recs, (int(a) for a in sol))), tuple(nodes)))
    return fibers


def ramification_class(bundle: ConicBundle) -> DivisorClass:
    out = DivisorClass.zero(bundle.config.lengths)
    for fiber in bundle.singular_fibers:
        for rec, a in fiber.components:
            out = out + (a - 1) * rec.cls
    return out


def relative_tangent_class(bundle: ConicBundle) -> DivisorClass:
    """``T_f = -K - 2F + R(f)``."""
    return (
        anticanonical(bundle.config.lengths) - 2 * bundle.fiber_class + ramification_class(bundle)
    )


def passing_points(bundle: ConicBundle, fiber: Fiber) -> frozenset[PointRef]:
    """Blown-up points on the line of a degree-1 fibre, other than the base point."""
    if bundle.degree != 1:
        raise ValueError("passing points are defined for degree-1 bundles")
    lines = [rec for rec, _ in fiber.components if rec.kind == LINE]
    if len(lines) != 1:
        raise InternalConsistencyError(f"fibre of {bundle.label} has {len(lines)} line components")
    return frozenset(lines[0].support) - set(bundle.base_points)
