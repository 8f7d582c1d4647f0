import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from almostnef.configuration import enumerate_configs, from_names, line_through, minimize
from almostnef.curves import (
    CHAIN,
    CONIC,
    LINE,
    catalog,
    check_witness,
    from_e,
    is_effective,
    is_effective_bruteforce,
    is_effective_bruteforce_many,
    is_effective_many,
    passes_through_gen,
    weight,
    weight_class,
)
from almostnef.lattice import C, DivisorClass, H, PointRef, anticanonical, intersect

from conftest import ch3, col3, gen5, single_chain

P = PointRef
ALL = enumerate_configs(4) + enumerate_configs(5)


def kinds(cfg):
    return [r.kind for r in catalog(cfg)]


def test_gen5_catalog(GEN5):
    recs = catalog(GEN5)
    assert len(recs) == 16
    assert {r.self_int for r in recs} == {-1}
    assert (kinds(GEN5).count(CHAIN), kinds(GEN5).count(LINE), kinds(GEN5).count(CONIC)) == (5, 10, 1)


def test_col3_catalog(COL3):
    lines = [r for r in catalog(COL3) if r.kind == LINE]
    abc = [r for r in lines if P(1, 1) in r.support and P(2, 1) in r.support]
    assert len(abc) == 1
    assert set(abc[0].support) == {P(1, 1), P(2, 1), P(3, 1)} and abc[0].self_int == -2
    assert CONIC not in kinds(COL3)
    assert len(lines) == 8


def test_chain_curves():
    cfg = from_names([["a1", "a2"], ["b"], ["c"], ["d"]])
    E11, E12 = catalog(cfg)[:2]
    L = cfg.lengths
    assert E11.cls == C(L, P(1, 1)) - C(L, P(1, 2)) and E11.self_int == -2
    assert E12.cls == C(L, P(1, 2)) and E12.self_int == -1


def test_self_intersections_everywhere():
    for cfg in ALL:
        for rec in catalog(cfg):
            assert intersect(rec.cls, rec.cls) == rec.self_int
            assert rec.self_int in (-1, -2)
            assert intersect(rec.cls, anticanonical(cfg.lengths)) == rec.self_int + 2


def test_catalog_classes_distinct():
    for cfg in ALL:
        classes = [r.cls for r in catalog(cfg)]
        assert len(set(classes)) == len(classes)


def test_passes_through_gen(GEN5, COL3):
    a, b, c = P(1, 1), P(2, 1), P(3, 1)
    assert passes_through_gen(line_through(COL3, [a, b]), c)
    assert not passes_through_gen(line_through(GEN5, [a, b]), c)


def test_passes_through_monotone():
    for cfg in ALL:
        for pair in itertools.combinations(cfg.points, 2):
            line = line_through(cfg, pair)
            for p in cfg.points:
                if passes_through_gen(line, p):
                    assert all(passes_through_gen(line, P(p.chain, t)) for t in range(1, p.slot))


def test_weight_class_positive():
    for cfg in ALL:
        scaled, denom = weight_class(cfg)
        assert denom == 8
        assert all(weight(cfg, r.cls) > 0 for r in catalog(cfg))
        assert weight(cfg, H(cfg.lengths)) == 3


@pytest.mark.parametrize("k", [1, 2])
def test_classes_through_few_points_effective(k):
    for cfg in ALL:
        L = cfg.lengths
        cls = k * H(L)
        for p in cfg.points[: 2 * k]:
            cls = cls - C(L, p)
        assert is_effective(cfg, cls) is not None
        assert is_effective_bruteforce(cfg, cls)


def test_three_general_points_not_effective(GEN5):
    L = GEN5.lengths
    cls = H(L) - C(L, P(1, 1)) - C(L, P(2, 1)) - C(L, P(3, 1))
    assert is_effective(GEN5, cls) is None
    assert not is_effective_bruteforce(GEN5, cls)


def test_conic_plus_tangent_lines_decomposition():
    cfg = from_names([["a1", "a2", "a3", "a4"], ["b"]])
    L = cfg.lengths
    target = from_e(cfg, 2, {P(1, 1): -1, P(1, 2): -2, P(1, 3): -3, P(1, 4): -4})
    assert target == 2 * H(L) - sum((C(L, P(1, j)) for j in range(1, 5)), DivisorClass.zero(L))
    tangent = H(L) - C(L, P(1, 1)) - C(L, P(1, 2))
    E = lambda j: C(L, P(1, j)) - C(L, P(1, j + 1))
    assert target == 2 * tangent + E(1) + 2 * E(2) + E(3)
    w = is_effective(cfg, target)
    labels = {r.label(cfg.point_names): m for r, m in w.parts}
    assert labels == {"L[a1,a2]": 2, "E[a1]": 1, "E[a2]": 2, "E[a3]": 1}
    assert w.remainder.is_zero()


def test_ch3_tangent_witness(CH3):
    L = CH3.lengths
    T = H(L) + C(L, P(1, 1)) - C(L, P(1, 2)) - C(L, P(2, 1)) - C(L, P(3, 1))
    w = is_effective(CH3, T)
    labels = {r.label(CH3.point_names): m for r, m in w.parts}
    assert labels == {"L[a1,d,e]": 1, "E[a1]": 2, "E[a2]": 1, "E[a3]": 1}
    assert w.remainder.is_zero() and check_witness(CH3, T, w) == []


def test_trivial_classes(GEN5, CH3):
    zero = DivisorClass.zero(GEN5.lengths)
    w = is_effective(GEN5, zero)
    assert w.parts == () and w.remainder.is_zero()
    assert is_effective_bruteforce(GEN5, zero)
    minus_e11 = -catalog(CH3)[0].cls
    assert is_effective(CH3, minus_e11) is None
    assert not is_effective_bruteforce(CH3, minus_e11)


def test_negative_anticanonical_degree_rejected(GEN5):
    L = GEN5.lengths
    cls = H(L) - 2 * C(L, P(1, 1)) - 2 * C(L, P(2, 1))
    assert intersect(cls, anticanonical(L)) < 0
    assert is_effective(GEN5, cls) is None


def test_bruteforce_bound_is_respected(COL3):
    L = COL3.lengths
    line = H(L) - C(L, P(1, 1)) - C(L, P(2, 1)) - C(L, P(3, 1))
    assert is_effective_bruteforce(COL3, line)
    assert not is_effective_bruteforce(COL3, line, bound=Fraction(1, 8))


CONFIGS = [gen5(), col3(), ch3(), single_chain()] + enumerate_configs(5)[2:8]


@st.composite
def config_and_class(draw):
    cfg = draw(st.sampled_from(CONFIGS))
    h = draw(st.integers(-1, 5))
    coeffs = draw(st.lists(st.integers(-4, 3), min_size=cfg.n_points, max_size=cfg.n_points))
    return cfg, DivisorClass(cfg.lengths, h, tuple(coeffs))


@settings(max_examples=300, deadline=None)
@given(config_and_class())
def test_single_calls_agree(case):
    cfg, cls = case
    w = is_effective(cfg, cls)
    assert (w is not None) == is_effective_bruteforce(cfg, cls)
    if w is not None:
        assert check_witness(cfg, cls, w) == []


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(CONFIGS), st.randoms(use_true_random=False))
def test_batch_matches_single(cfg, rnd):
    vecs = [[rnd.randint(-1, 4)] + [rnd.randint(-3, 2) for _ in range(cfg.n_points)] for _ in range(20)]
    batch = is_effective_many(cfg, vecs)
    oracle = is_effective_bruteforce_many(cfg, vecs)
    for v, b, o in zip(vecs, batch, oracle):
        cls = DivisorClass.from_vector(cfg.lengths, v)
        assert b == (is_effective(cfg, cls) is not None)
        assert o == is_effective_bruteforce(cfg, cls)


def _negative_candidates(cfg):
    n = cfg.n_points
    rows = np.array(
        [(h, *c) for h in range(0, 4) for c in itertools.product(range(-3, 2), repeat=n)], dtype=np.int64
    )
    sq = rows[:, 0] ** 2 - (rows[:, 1:] ** 2).sum(axis=1)
    kdot = -3 * rows[:, 0] - rows[:, 1:].sum(axis=1)  # K.D with K = -3H + sum C
    keep = ((sq == -1) & (kdot == -1)) | ((sq == -2) & (kdot == 0))
    return rows[keep]


def test_catalog_completeness():
    """Every effective negative class outside the catalog splits off a catalog curve."""
    for cfg in ALL:
        known = {r.cls.vector for r in catalog(cfg)}
        cands = _negative_candidates(cfg)
        assert known <= {tuple(int(v) for v in row) for row in cands}
        effective = is_effective_bruteforce_many(cfg, cands)
        others = [row for row, e in zip(cands, effective) if e and tuple(int(v) for v in row) not in known]
        curves = np.array([r.cls.vector for r in catalog(cfg)], dtype=np.int64)
        for row in others:
            assert is_effective_bruteforce_many(cfg, row - curves).any(), (cfg, row)


def test_prefix_slot_and_tail_effectivity_agree():
    """Effectivity of H minus prefixes, arbitrary slots, or chain tails agrees."""
    for cfg in ALL:
        L = cfg.lengths
        choices = [
            [()] + [subset for s in range(1, n + 1) for subset in itertools.combinations(range(1, n + 1), s)]
            for n in L
        ]
        shapes = []
        for pick in itertools.product(*choices):
            if sum(map(len, pick)) > 4:
                continue
            prefix, chosen, tail = H(L), H(L), H(L)
            for i, slots in enumerate(pick, 1):
                for t, j in enumerate(slots, 1):
                    prefix = prefix - C(L, P(i, t))
                    chosen = chosen - C(L, P(i, j))
                    tail = tail - C(L, P(i, L[i - 1]))
            shapes.append((prefix.vector, chosen.vector, tail.vector))
        verdicts = is_effective_bruteforce_many(cfg, [v for triple in shapes for v in triple]).reshape(-1, 3)
        assert (verdicts == verdicts[:, :1]).all(), cfg


def test_effective_line_class_passes_minimized_points():
    for cfg in ALL:
        L = cfg.lengths
        for size in range(2, 5):
            for B in itertools.combinations(cfg.points, size):
                cls = H(L)
                for p in B:
                    cls = cls - C(L, p)
                if not is_effective_bruteforce(cfg, cls):
                    continue
                base = sorted(minimize(cfg, B))
                assert set(base) <= line_through(cfg, base[:2]).through


def test_extra_points_on_a_line_share_a_chain():
    for cfg in enumerate_configs(5):
        L = cfg.lengths
        for p1, p2 in itertools.combinations(cfg.points, 2):
            rest = [p for p in cfg.points if p not in (p1, p2)]
            ok = [p for p in rest if is_effective_bruteforce(cfg, H(L) - C(L, p1) - C(L, p2) - C(L, p))]
            assert len({p.chain for p in ok}) <= 1
