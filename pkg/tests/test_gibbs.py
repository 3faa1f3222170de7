import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hardcore.gibbs import (
    BoundaryCondition,
    Configuration,
    EnumerationCapExceeded,
    HypothesisViolation,
    InfeasibleConfiguration,
    ZeroMeasureError,
    check_double_counting,
    clamped_vertices,
    distribution,
    enumerate_feasible,
    format_measure,
    free_vertices,
    is_feasible,
    occupied_at,
    parse_activity,
    partition_function,
    probability,
    satisfies_bc,
    weight,
)
from hardcore.lattice import Box, neighbors


def brute_force(box, bc):
    """Every subset of the box that is independent and respects the clamps."""
    clamped = clamped_vertices(box, bc)
    out = set()
    verts = box.vertices
    for bits in itertools.product((0, 1), repeat=len(verts)):
        occ = frozenset(v for v, b in zip(verts, bits) if b)
        if clamped <= occ and all(w not in occ for v in occ for w in neighbors(v)):
            out.add(occ)
    return out


@pytest.mark.parametrize("d,n", [(1, 1), (1, 2), (1, 3), (2, 1)])
@pytest.mark.parametrize("bc", list(BoundaryCondition))
def test_enumeration_matches_brute_force(d, n, bc):
    box = Box(d, n)
    got = [w.occupied for w in enumerate_feasible(box, bc)]
    assert len(got) == len(set(got))
    assert set(got) == brute_force(box, bc)


def test_small_counts():
    assert sum(1 for _ in enumerate_feasible(Box(1, 1))) == 5
    # 3x3 grid: Z(1) counts independent sets
    assert partition_function(Box(2, 1), "free", 1) == 63


def path_partition(m, lam):
    """Transfer-matrix partition function of a path with m vertices."""
    a, b = Fraction(1), Fraction(0)  # last vertex vacant / occupied
    for _ in range(m):
        a, b = a + b, a * lam
    return a + b


@pytest.mark.parametrize("lam", [Fraction(1, 3), Fraction(1), Fraction(7, 2)])
def test_partition_function_on_a_path(lam):
    assert partition_function(Box(1, 4), "free", lam) == path_partition(9, lam)


def test_pinned_and_cap():
    box = Box(2, 2)
    pinned = list(enumerate_feasible(box, "odd", pinned=[(0, 0)]))
    assert len(pinned) == 1 and (0, 0) in pinned[0].occupied
    # a vertex next to a clamp cannot be pinned
    assert list(enumerate_feasible(box, "odd", pinned=[(1, 1)])) == []
    with pytest.raises(EnumerationCapExceeded):
        list(enumerate_feasible(Box(2, 3), "free", cap=10))


def test_free_vertices_excludes_clamps_and_their_neighbours():
    box = Box(2, 2)
    free = free_vertices(box, "odd")
    # the diagonal evens of the 3x3 interior touch odd clamps
    assert sorted(free) == [(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]
    assert len(free_vertices(Box(2, 3), "odd")) == 17


def test_parse_activity():
    assert parse_activity("3/4") == Fraction(3, 4)
    assert parse_activity("0.3") == Fraction(3, 10)
    assert parse_activity(0.3) == Fraction(3, 10)
    assert parse_activity(2) == 2
    with pytest.raises(ValueError):
        parse_activity("-1")
    with pytest.raises(TypeError):
        parse_activity(True)


def test_format_measure():
    assert format_measure(Fraction(1, 17)) == ("1/17", "0.0588235294118")


def test_configuration_basics():
    box = Box(2, 1)
    w = Configuration(box, {(0, 0), (1, 1)})
    assert w[(0, 0)] == 1 and w[(1, 0)] == 0 and w[(5, 5)] == 0
    assert Configuration.from_json(w.to_json()) == w
    assert w.with_values({(0, 0): 0}).occupied == {(1, 1)}
    with pytest.raises(ValueError):
        Configuration(box, {(2, 0)})


def test_weight_and_feasibility():
    box = Box(1, 2)
    bad = Configuration(box, {(0,), (1,)})
    assert not is_feasible(bad)
    with pytest.raises(InfeasibleConfiguration):
        weight(bad, 1)
    assert weight(Configuration(box, {(0,), (2,)}), Fraction(1, 2)) == Fraction(1, 4)


def test_odd_bc_anchor_probability():
    assert probability(occupied_at((0, 0)), Box(2, 2), "odd", 1) == Fraction(1, 17)


def test_lambda_zero_keeps_conditional_measure_defined():
    box = Box(2, 2)
    law = distribution(box, "odd", 0)
    (only,) = [w for w, p in law.items() if p]
    assert only.occupied == clamped_vertices(box, "odd")
    with pytest.raises(ZeroMeasureError):
        probability(lambda w: True, box, "odd", 0, given=occupied_at((0, 0)))


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10), max_value=5, max_denominator=10))
def test_distribution_sums_to_one_and_respects_bc(lam):
    law = distribution(Box(2, 2), "odd", lam)
    assert sum(law.values()) == 1
    assert all(satisfies_bc(w, "odd") for w in law)


def test_conditional_probability():
    box = Box(1, 2)
    p = probability(occupied_at((0,)), box, "free", 1, given=lambda w: (1,) not in w.occupied)
    # given (1,) vacant: left part {-2,-1,0} path with 5 sets, (0,) in 2 of them; (2,) free doubles both
    assert p == Fraction(2, 5)


def test_double_counting_accepts_valid_instance():
    X = ["a", "b", "c", "d"]
    mu = {"a": Fraction(1, 10), "b": Fraction(2, 10), "c": Fraction(3, 10), "d": Fraction(4, 10)}
    T = {"a": ["c", "d"]}
    assert check_double_counting(X, mu, ["a"], T, 1, 7)


def test_double_counting_rejects_broken_hypotheses():
    X = ["a", "b"]
    mu = {"a": Fraction(1, 2), "b": Fraction(1, 2)}
    with pytest.raises(HypothesisViolation):
        check_double_counting(X, {"a": Fraction(1, 3), "b": Fraction(1, 3)}, ["a"], {"a": ["b"]}, 1, 1)
    with pytest.raises(HypothesisViolation):
        check_double_counting(X, mu, ["a"], {"a": ["b"]}, 1, 2)  # mu(T(a)) < 2 mu(a)
    with pytest.raises(HypothesisViolation):
        check_double_counting(X, mu, ["a", "b"], {"a": ["b"], "b": ["b"]}, 1, 1)  # b covered twice
    with pytest.raises(HypothesisViolation):
        check_double_counting(X, mu, ["a"], {"a": ["z"]}, 1, 1)
