import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from almostnef.bundles import (
    all_bundles,
    degree1_bundles,
    degree2_bundles,
    passing_points,
    ramification_class,
    relative_tangent_class,
    singular_fibers,
    solve_exact,
)
from almostnef.configuration import enumerate_configs
from almostnef.curves import CONIC, LINE, catalog
from almostnef.lattice import C, DivisorClass, H, PointRef, anticanonical, intersect

from conftest import single_chain

P = PointRef
ALL = enumerate_configs(4) + enumerate_configs(5)


def fiber_labels(cfg, fiber):
    return sorted((rec.label(cfg.point_names), a) for rec, a in fiber.components)


def test_degree1_counts(GEN5):
    assert len(degree1_bundles(GEN5)) == 5
    assert len(degree1_bundles(single_chain())) == 1
    for cfg in ALL:
        bundles = degree1_bundles(cfg)
        assert len(bundles) == cfg.r
        for i, b in enumerate(bundles, 1):
            assert b.base_points == (P(i, 1),)
            assert intersect(b.fiber_class, H(cfg.lengths)) == 1


def test_degree2_examples(GEN5, COL3, CH3):
    assert len(degree2_bundles(GEN5)) == 5
    names = [{COL3.name(p) for p in b.base_points} for b in degree2_bundles(COL3)]
    assert names == [{"a", "b", "d", "e"}, {"a", "c", "d", "e"}, {"b", "c", "d", "e"}]
    assert degree2_bundles(CH3) == []


def test_conic_class_invariants():
    for cfg in ALL:
        K = anticanonical(cfg.lengths)
        seen = set()
        for b in all_bundles(cfg):
            F = b.fiber_class
            assert intersect(F, F) == 0 and intersect(F, K) == 2
            assert F.h == b.degree
            assert sorted(F.c.values()) == [-1] * b.degree ** 2
            assert F not in seen
            seen.add(F)


def test_degree2_fiber_is_nef():
    for cfg in ALL:
        for b in degree2_bundles(cfg):
            assert all(intersect(b.fiber_class, r.cls) >= 0 for r in catalog(cfg))


def test_gen5_degree1_fibers(GEN5):
    b = degree1_bundles(GEN5)[4]
    assert [fiber_labels(GEN5, f) for f in b.singular_fibers] == [
        [("E[a]", 1), ("L[a,e]", 1)],
        [("E[b]", 1), ("L[b,e]", 1)],
        [("E[c]", 1), ("L[c,e]", 1)],
        [("E[d]", 1), ("L[d,e]", 1)],
    ]
    assert all(f.M == 1 and f.reduced for f in b.singular_fibers)
    assert ramification_class(b).is_zero()
    L = GEN5.lengths
    expected = H(L) - C(L, P(1, 1)) - C(L, P(2, 1)) - C(L, P(3, 1)) - C(L, P(4, 1)) + C(L, P(5, 1))
    assert relative_tangent_class(b) == expected


def test_gen5_degree2_fibers(GEN5):
    b = degree2_bundles(GEN5)[0]
    assert sorted(fiber_labels(GEN5, f) for f in b.singular_fibers) == [
        [("E[e]", 1), ("Q[a,b,c,d,e]", 1)],
        [("L[a,b]", 1), ("L[c,d]", 1)],
        [("L[a,c]", 1), ("L[b,d]", 1)],
        [("L[a,d]", 1), ("L[b,c]", 1)],
    ]
    assert all(f.M == 1 for f in b.singular_fibers)


def test_ch3_first_chain(CH3):
    b = degree1_bundles(CH3)[0]
    fibers = [fiber_labels(CH3, f) for f in b.singular_fibers]
    assert fibers == [
        [("E[a2]", 1), ("E[a3]", 2), ("L[a1,a2,a3]", 1)],
        [("E[d]", 1), ("E[e]", 1), ("L[a1,d,e]", 1)],
    ]
    assert [f.M for f in b.singular_fibers] == [2, 1]
    assert ramification_class(b) == C(CH3.lengths, P(1, 3))
    assert [passing_points(b, f) for f in b.singular_fibers] == [
        {P(1, 2), P(1, 3)},
        {P(2, 1), P(3, 1)},
    ]


def test_fiber_sanity_everywhere():
    for cfg in ALL:
        for b in all_bundles(cfg):
            F = b.fiber_class
            assert intersect(ramification_class(b), F) == 0
            assert intersect(relative_tangent_class(b), F) == 2
            for n, fiber in enumerate(b.singular_fibers):
                assert fiber.total(cfg.lengths) == F
                assert all(intersect(rec.cls, F) == 0 for rec, _ in fiber.components)
                assert 1 <= fiber.M <= 2
                assert len(fiber.components) >= 2
                for other in b.singular_fibers[n + 1:]:
                    for (r1, _), (r2, _) in itertools.product(fiber.components, other.components):
                        assert intersect(r1.cls, r2.cls) == 0
                # a connected tree: one fewer node than components
                assert fiber.node_count == len(fiber.components) - 1
            vertical = {r.cls for r in catalog(cfg) if intersect(r.cls, F) == 0}
            assert vertical == {rec.cls for f in b.singular_fibers for rec, _ in f.components}


def test_euler_number():
    for cfg in ALL:
        expected = 9 - cfg.degree - 1  # e(S) - e(P1 x P1) where e(S) = 12 - K^2
        for b in all_bundles(cfg):
            assert sum(f.euler - 2 for f in b.singular_fibers) == expected


def test_no_conic_components_on_four_points():
    for cfg in enumerate_configs(4):
        for b in all_bundles(cfg):
            for f in b.singular_fibers:
                assert all(rec.kind != CONIC for rec, _ in f.components)


def test_degree2_fibers_on_four_points():
    for cfg in enumerate_configs(4):
        for b in degree2_bundles(cfg):
            fibers = b.singular_fibers
            assert len(fibers) <= 3
            for f in fibers:
                lines = [(rec, a) for rec, a in f.components if rec.kind == LINE]
                assert sum(a for _, a in lines) == 2
                assert (f.M == 2) == any(a == 2 for _, a in lines)
            if any(f.M == 2 for f in fibers):
                assert sum(f.M == 2 for f in fibers) == 1 and len(fibers) <= 2


def test_passing_points_needs_degree1(GEN5):
    b = degree2_bundles(GEN5)[0]
    with pytest.raises(ValueError):
        passing_points(b, b.singular_fibers[0])


def test_singular_fibers_recomputed(CH3):
    b = degree1_bundles(CH3)[0]
    assert tuple(singular_fibers(b)) == b.singular_fibers


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_solve_exact(cols, x):
    rhs = tuple(sum(x[k] * cols[k][r] for k in range(3)) for r in range(3))
    sol = solve_exact([tuple(c) for c in cols], rhs)
    det = (
        cols[0][0] * (cols[1][1] * cols[2][2] - cols[2][1] * cols[1][2])
        - cols[1][0] * (cols[0][1] * cols[2][2] - cols[2][1] * cols[0][2])
        + cols[2][0] * (cols[0][1] * cols[1][2] - cols[1][1] * cols[0][2])
    )
    if det == 0:
        assert sol is None
    else:
        assert sol == [Fraction(v) for v in x]


def test_solve_exact_inconsistent():
    assert solve_exact([(1, 0, 0), (0, 1, 0)], (0, 0, 1)) is None
