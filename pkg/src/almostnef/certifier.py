"""Pseudo-effectivity criterion, certificate search and independent re-verification.

A certificate records ``k`` chosen conic bundles and the class
``E = sum of their relative tangent classes``.  It is valid when every chosen
bundle passes the criterion ``sum (1 - 1/(2M)) <= 2`` and ``E`` is effective.

:func:`verify` deliberately avoids the curves and bundles modules: it rebuilds
the negative curves straight from the line declarations and recomputes every
number stored in the certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import configuration as cfgmod
from .bundles import (
    ConicBundle,
    Fiber,
    degree1_bundles,
    degree2_bundles,
    ramification_class,
    relative_tangent_class,
)
from .configuration import SurfaceConfig
from .curves import EffectivityWitness, is_effective
from .errors import InternalConsistencyError, TheoremViolation
from .lattice import C, DivisorClass, H, PointRef, anticanonical, intersect, points_of

GOOD_POSITION = "good_position"
DEGENERATE = "degenerate"
CRITERION_BOUND = Fraction(2)


@dataclass(frozen=True)
class CriterionReport:
    terms: tuple[Fraction, ...]
    total: Fraction
    passed: bool


def fiber_term(M: int) -> Fraction:
    return 1 - Fraction(1, 2 * M)


def criterion(bundle: ConicBundle) -> CriterionReport:
    terms = tuple(fiber_term(f.M) for f in bundle.singular_fibers)
    total = sum(terms, Fraction(0))
    return CriterionReport(terms, total, total <= CRITERION_BOUND)


@dataclass(frozen=True)
class FiberZeta:
    component_coeffs: tuple[Fraction, ...]
    node_coeffs: tuple[Fraction, ...]  # aligned with Fiber.nodes


@dataclass(frozen=True)
class ZetaDecomposition:
    fibers: tuple[FiberZeta, ...]
    leftover: Fraction


def zeta_decomposition(bundle: ConicBundle) -> ZetaDecomposition:
    """Coefficients of the restricted tautological class on the blown-up divisor."""
    out = []
    total = Fraction(0)
    for fiber in bundle.singular_fibers:
        two_m = 2 * fiber.M
        comps = tuple(1 - Fraction(a, two_m) for _, a in fiber.components)
        nodes = tuple(
            1 - Fraction(fiber.components[i][1] + fiber.components[j][1], two_m)
            for i, j, _ in fiber.nodes
        )
        if any(v < 0 for v in comps + nodes):
            raise InternalConsistencyError(f"negative zeta coefficient on {bundle.label}")
        out.append(FiberZeta(comps, nodes))
        total += fiber_term(fiber.M)
    return ZetaDecomposition(tuple(out), CRITERION_BOUND - total)


@dataclass(frozen=True)
class Certificate:
    branch: str
    bundles: tuple[ConicBundle, ...]
    k: int
    E: DivisorClass
    E_witness: EffectivityWitness
    reports: tuple[CriterionReport, ...]


def _assemble(config: SurfaceConfig, branch: str, bundles: tuple[ConicBundle, ...]) -> Certificate | None:
    reports = tuple(criterion(b) for b in bundles)
    if not all(r.passed for r in reports):
        return None
    E = DivisorClass.zero(config.lengths)
    for b in bundles:
        E = E + relative_tangent_class(b)
    witness = is_effective(config, E)
    if witness is None:
        return None
    return Certificate(branch, bundles, len(bundles), E, witness, reports)


def complementary_point(config: SurfaceConfig, four) -> PointRef:
    (rest,) = set(config.points) - set(four)
    return rest


def certify(config: SurfaceConfig) -> Certificate:
    cfgmod.ensure_valid(config)
    if config.n_points != 5:
        raise ValueError("certificates are defined for 5-point configurations")
    deg2 = degree2_bundles(config)
    if deg2:
        g = deg2[0]
        p = complementary_point(config, g.base_points)
        f = degree1_bundles(config)[p.chain - 1]
        cert = _assemble(config, GOOD_POSITION, (f, g))
        if cert is None:
            raise TheoremViolation(f"good-position pair {f.label}, {g.label} does not certify")
        return cert
    for f in degree1_bundles(config):
        cert = _assemble(config, DEGENERATE, (f,))
        if cert is not None:
            return cert
    raise TheoremViolation("no degree-1 bundle has an effective relative tangent class")


def good_position_identity(cert: Certificate) -> tuple[DivisorClass, DivisorClass]:
    """Both sides of ``T_f + T_g - R(f) - R(g) = 2(C(i, 1) - C(i, j))``."""
    f, g = cert.bundles
    lhs = cert.E - ramification_class(f) - ramification_class(g)
    p = complementary_point(g.config, g.base_points)
    L = g.config.lengths
    return lhs, 2 * (C(L, PointRef(p.chain, 1)) - C(L, p))


# --- independent verification ---------------------------------------------------

@dataclass(frozen=True)
class Verification:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _irreducible_negative_classes(config: SurfaceConfig) -> set[DivisorClass]:
    """Negative curves straight from the declarations.

    A point set ``T`` of size 2 or 3 is the through-set of a line exactly when
    it is chain-prefix closed and either is a declared triple or (size 2) lies
    in no declared triple.
    """
    L = config.lengths
    pts = points_of(L)
    out = set()
    for p in pts:
        cls = C(L, p)
        if p.slot < config.length(p.chain):
            cls = cls - C(L, PointRef(p.chain, p.slot + 1))
        out.add(cls)
    declared = [d.points for d in config.lines]
    for size in (2, 3):
        for T in itertools.combinations(pts, size):
            T = frozenset(T)
            prefix_closed = all(q.slot == 1 or PointRef(q.chain, q.slot - 1) in T for q in T)
            if not prefix_closed:
                continue
            if size == 3 and T not in declared:
                continue
            if size == 2 and any(T <= d for d in declared):
                continue
            cls = H(L)
            for q in T:
                cls = cls - C(L, q)
            out.add(cls)
    if len(pts) == 5 and not declared:
        cls = 2 * H(L)
        for q in pts:
            cls = cls - C(L, q)
        out.add(cls)
    return out


def _connected(classes: list[DivisorClass]) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        a = stack.pop()
        for b in range(len(classes)):
            if b not in seen and intersect(classes[a], classes[b]) > 0:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(classes)


def _check_bundle(config, bundle, negatives, problems: list[str]) -> DivisorClass | None:
    L = config.lengths
    F = bundle.fiber_class
    tag = f"bundle {bundle.degree}:{','.join(map(str, bundle.base_points))}"
    d = bundle.degree
    expected = d * H(L)
    for p in bundle.base_points:
        expected = expected - C(L, p)
    if d not in (1, 2) or len(set(bundle.base_points)) != d * d or F != expected:
        problems.append(f"{tag}: fibre class does not have the shape dH - sum of d^2 C's")
        return None
    if intersect(F, F) != 0 or intersect(F, anticanonical(L)) != 2:
        problems.append(f"{tag}: fibre class is not a conic class")
    if d == 1 and bundle.base_points[0].slot != 1:
        problems.append(f"{tag}: degree-1 base point is not the first point of its chain")
    if d == 2:
        four = frozenset(bundle.base_points)
        if cfgmod.minimize(config, four) != four or not cfgmod.good_position(config, four):
            problems.append(f"{tag}: base points are not minimal and in good position")
    seen = []
    R = DivisorClass.zero(L)
    for n, fiber in enumerate(bundle.singular_fibers):
        classes = [rec.cls for rec, _ in fiber.components]
        mults = [a for _, a in fiber.components]
        total = DivisorClass.zero(L)
        for cls, a in zip(classes, mults):
            total = total + a * cls
            R = R + (a - 1) * cls
        if total != F:
            problems.append(f"{tag} fibre {n}: components do not sum to the fibre class")
        if any(cls not in negatives for cls in classes):
            problems.append(f"{tag} fibre {n}: a component is not an irreducible negative curve")
        if any(intersect(cls, F) != 0 for cls in classes):
            problems.append(f"{tag} fibre {n}: a component is not vertical")
        if any(a < 1 for a in mults):
            problems.append(f"{tag} fibre {n}: non-positive multiplicity")
        if len(classes) < 2 and max(mults, default=0) < 2:
            problems.append(f"{tag} fibre {n}: fibre is not singular")
        if not classes or not _connected(classes):
            problems.append(f"{tag} fibre {n}: components are not connected")
        nodes = {
            (i, j, intersect(classes[i], classes[j]))
            for i, j in itertools.combinations(range(len(classes)), 2)
            if intersect(classes[i], classes[j]) > 0
        }
        if nodes != set(fiber.nodes):
            problems.append(f"{tag} fibre {n}: node list does not match intersections")
        if any(k > 1 for _, _, k in nodes):
            problems.append(f"{tag} fibre {n}: components meet with multiplicity above 1")
        for other in seen:
            if any(intersect(a, b) != 0 for a in classes for b in other):
                problems.append(f"{tag} fibre {n}: not orthogonal to an earlier fibre")
        seen.append(classes)
    recorded = {cls for fib in seen for cls in fib}
    missing = [cls for cls in negatives if intersect(cls, F) == 0 and cls not in recorded]
    if missing:
        problems.append(f"{tag}: {len(missing)} vertical curve(s) missing from the fibres")
    return anticanonical(L) - 2 * F + R


def verify(config: SurfaceConfig, cert: Certificate) -> Verification:
    """Recompute everything a certificate claims; collect every mismatch."""
    problems = list(cfgmod.validate(config))
    if problems:
        return Verification(False, tuple(problems))
    L = config.lengths
    if config.n_points != 5:
        problems.append("certificates are defined for 5-point configurations")
    negatives = _irreducible_negative_classes(config)
    degrees = tuple(b.degree for b in cert.bundles)
    if cert.branch == GOOD_POSITION and degrees != (1, 2):
        problems.append("good-position branch needs a degree-1 and a degree-2 bundle")
    elif cert.branch == DEGENERATE and degrees != (1,):
        problems.append("degenerate branch needs exactly one degree-1 bundle")
    elif cert.branch not in (GOOD_POSITION, DEGENERATE):
        problems.append(f"unknown branch {cert.branch!r}")
    if cert.k != len(cert.bundles):
        problems.append(f"k = {cert.k} but {len(cert.bundles)} bundle(s) recorded")
    if len(cert.reports) != len(cert.bundles):
        problems.append("one criterion report per bundle is required")
    E = DivisorClass.zero(L)
    for n, bundle in enumerate(cert.bundles):
        T = _check_bundle(config, bundle, negatives, problems)
        if T is not None:
            E = E + T
        if n >= len(cert.reports):
            continue
        report = cert.reports[n]
        terms = tuple(1 - Fraction(1, 2 * max(a for _, a in f.components)) for f in bundle.singular_fibers)
        if tuple(report.terms) != terms:
            problems.append(f"bundle {n}: criterion terms do not match the fibres")
        if report.total != sum(terms, Fraction(0)):
            problems.append(f"bundle {n}: criterion total is not the sum of its terms")
        if not sum(terms, Fraction(0)) <= 2:
            problems.append(f"bundle {n}: criterion total exceeds 2")
        if report.passed != (sum(terms, Fraction(0)) <= 2):
            problems.append(f"bundle {n}: pass flag is inconsistent")
    if cert.branch == GOOD_POSITION and degrees == (1, 2):
        f, g = cert.bundles
        (rest,) = set(points_of(L)) - set(g.base_points) or {None}
        if rest is None or f.base_points[0].chain != rest.chain:
            problems.append("degree-1 bundle is not on the chain of the complementary point")
    if cert.E != E:
        problems.append("E is not the sum of the relative tangent classes")
    witness = cert.E_witness
    total = witness.remainder
    for rec, m in witness.parts:
        if m < 1:
            problems.append("witness has a non-positive multiplicity")
        if rec.cls not in negatives:
            problems.append("witness uses a class that is not an irreducible negative curve")
        total = total + m * rec.cls
    if total != cert.E:
        problems.append("witness does not sum to E")
    if any(intersect(witness.remainder, cls) < 0 for cls in negatives):
        problems.append("witness remainder is not nef")
    if intersect(witness.remainder, anticanonical(L)) < 0:
        problems.append("witness remainder has negative anticanonical degree")
    return Verification(not problems, tuple(problems))
