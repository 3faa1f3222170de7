from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hardcore.approx import (
    EXTENDED,
    STANDARD,
    ApproxInput,
    EpsilonParam,
    FamilyCensus,
    RetryCapExceeded,
    census_ngamma,
    direction_code,
    dominating_sets,
    family_census,
    g8_connectivity,
    interior_approx,
    predicate_b,
    predicate_c,
    predicate_d,
    predicates_hold,
    sampling_probability,
    satisfies_approx_chain,
    u_sets,
)
from hardcore.cutset import EdgeCutset, GuardExceeded
from hardcore.lattice import Box
from hardcore.transform import is_interior_approx

X = (0, 0)
EPS = [Fraction(3, 10), Fraction(1, 2)]


def test_u1_of_plus_pentomino(plus):
    u = u_sets(plus, 1, (1, 0), Fraction(1, 2))
    # every E1 vertex is two steps from (1,0) through x, and (1,0) itself counts
    assert u.u1 == plus.e1
    assert u.u2 == frozenset()  # 1 < sqrt(eps d) fails for every neighbour at d=2
    assert u.u3 == frozenset()


def test_u_sets_reject_foreign_vertex(plus):
    with pytest.raises(ValueError):
        u_sets(plus, 1, (2, 0), Fraction(1, 2))
    with pytest.raises(ValueError):
        u_sets(plus, 2, (1, 0), Fraction(1, 2))


def test_u_set_bounds_exhaustive(omcut3):
    d = 2
    for g in omcut3:
        for delta in (0, 1):
            for v in g.boundary_set(delta):
                P = g.p(v)
                for eps in EPS + [Fraction(1, 100)]:
                    u = u_sets(g, delta, v, eps)
                    assert len(u.u1) >= P * (2 * d - P) - min(P, 2 * d - P)
                    assert all(g.p(w) ** 2 < eps * d for w in u.u3)


def test_epsilon_regimes():
    with pytest.raises(ValueError, match="extended"):
        EpsilonParam.make(Fraction(1, 2), 2)
    assert EpsilonParam.make(Fraction(1, 2), 4).regime == STANDARD
    assert EpsilonParam.make(0.3, 2, EXTENDED).eps == Fraction(3, 10)
    with pytest.raises(ValueError):
        EpsilonParam.make(Fraction(3, 5), 9, EXTENDED)
    with pytest.raises(ValueError):
        EpsilonParam.make(Fraction(1, 2), 4, "lax")


def test_trivial_choice_satisfies_predicates(omcut3):
    for g in omcut3:
        for eps in EPS:
            assert predicates_hold(g, g.e0, g.e1, eps)


def test_direction_code_plus(plus):
    assert direction_code(plus, [(1, 0)]) == {(1, 0): (0, 1, 0, 0)}
    with pytest.raises(ValueError):
        direction_code(plus, [X])


def test_direction_code_counts(omcut3):
    for g in omcut3:
        codes = direction_code(g, g.e0 | g.e1)
        for v, c in codes.items():
            if v in g.e1:
                assert c.count(0) == g.p(v)
            else:
                assert c.count(1) == g.p(v)


def test_g8_plus(plus):
    assert g8_connectivity(plus, plus.e0, plus.e1, (1, 0))
    with pytest.raises(ValueError):
        g8_connectivity(plus, plus.e0, plus.e1, X)


def test_interior_approx_plus_trivial_sets(plus):
    data = ApproxInput(2, Fraction(1, 2), plus.e0, plus.e1, direction_code(plus, plus.e0 | plus.e1))
    E = interior_approx(data)
    assert E <= plus.a1
    assert is_interior_approx(E, plus)
    assert satisfies_approx_chain(E, plus, Fraction(1, 2))


def test_interior_approx_rejects_missing_code(plus):
    with pytest.raises(ValueError, match="code"):
        interior_approx(ApproxInput(2, Fraction(1, 2), plus.e0, plus.e1, {}))


def test_is_interior_approx_examples(plus, box3, omcut3):
    assert is_interior_approx(plus.a1, plus)
    assert is_interior_approx(plus.e1 - plus.e1_exposed, plus)
    regular = [g for g in omcut3 if g.e1 - g.e1_exposed]
    assert regular
    assert not is_interior_approx(set(), regular[0])


def test_sampling_probability_is_clamped(plus):
    assert sampling_probability(plus, (1, 0), Fraction(1, 2)) == 1.0


@pytest.mark.parametrize("eps", EPS)
def test_dominating_sets_sweep_n3(eps, omcut3):
    for g in omcut3:
        for seed in range(5):
            ds = dominating_sets(g, eps, seed, regime=EXTENDED)
            assert ds.e0t <= g.e0 and ds.e1t <= g.e1
            assert predicate_b(g, ds.e1t, eps)
            assert predicate_c(g, 0, ds.e0t, eps) and predicate_c(g, 1, ds.e1t, eps)
            assert predicate_d(g, 0, ds.e1t, eps) and predicate_d(g, 1, ds.e0t, eps)
            assert all(g8_connectivity(g, ds.e0t, ds.e1t, v) for v in g.e1)
            E = interior_approx(ApproxInput.from_cutset(g, ds))
            assert satisfies_approx_chain(E, g, eps) and is_interior_approx(E, g)


def test_dominating_sets_deterministic(plus):
    a = dominating_sets(plus, Fraction(1, 2), 7, regime=EXTENDED)
    b = dominating_sets(plus, Fraction(1, 2), 7, regime=EXTENDED)
    assert a == b
    assert set(a.diagnostics()) == {"R_E0t", "R_E1t", "retries", "epsilon", "regime", "seed"}


def test_dominating_sets_input_checks(box2, plus):
    with pytest.raises(ValueError):
        dominating_sets(plus, Fraction(1, 2), 0)  # standard regime is empty at d=2
    singleton = EdgeCutset.from_inner(box2, X, [X])
    with pytest.raises(ValueError):
        dominating_sets(singleton, Fraction(1, 2), 0, regime=EXTENDED)
    assert issubclass(RetryCapExceeded, RuntimeError)


def test_census_ngamma():
    box = Box(2, 2)
    assert census_ngamma(1, [(1, 0)], box, X) == 1
    assert census_ngamma(1, [(1, 0), (0, 1)], box, X) == 0
    assert census_ngamma(0, [(1, 0)], box, X) == 0
    with pytest.raises(GuardExceeded):
        census_ngamma(9, [(1, 0)], box, X)
    with pytest.raises(GuardExceeded):
        census_ngamma(1, [(1, 0)], Box(2, 4), X)


def census_oracle(R, E, cutsets):
    codes = set()
    for g in cutsets:
        if set(E) <= g.e0 | g.e1 and g.r_value(E) == R:
            codes.add(tuple(tuple(int(w in g.a1) for w in (
                (v[0] + 1, v[1]), (v[0] - 1, v[1]), (v[0], v[1] + 1), (v[0], v[1] - 1))) for v in E))
    return len(codes)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.sets(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=3))
def test_census_matches_oracle_and_bound(omcut3, R, E):
    box = Box(2, 3)
    ordered = sorted(E, key=box.index)
    got = census_ngamma(R, ordered, box, X)
    assert got <= 4 ** (2 * R)
    assert got == (0 if len(E) > R else census_oracle(R, ordered, omcut3))


def test_family_census(box3):
    c = family_census(box3, X, Fraction(1, 4), 20, regime=EXTENDED)
    assert (c.cutsets, c.distinct_approximations) == (2, 2)
    assert c.csv_row() == (20, "1/4", 2, 2, EXTENDED, 0)
    empty = family_census(box3, X, Fraction(1, 4), 12, regime=EXTENDED)
    assert (empty.cutsets, empty.distinct_approximations) == (0, 0)
    assert FamilyCensus.CSV_HEADER[0] == "L"


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([Fraction(1, 8), Fraction(1, 4), Fraction(3, 10), Fraction(1, 2)]),
       st.sampled_from([12, 16, 20, 24, 28]), st.integers(0, 1000))
def test_family_census_dedup_bound(box3, eps, L, seed):
    c = family_census(box3, X, eps, L, seed=seed, regime=EXTENDED)
    assert c.distinct_approximations <= c.cutsets
