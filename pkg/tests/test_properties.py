import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from hardcore.cutset import count_connected_sets, max_degree
from hardcore.gibbs import (
    Configuration,
    check_double_counting,
    distribution,
    enumerate_feasible,
    partition_function,
    satisfies_bc,
    weight,
)
from hardcore.lattice import Box
from hardcore.sampler import Lattice, meet_join, precedes, random_state
from hardcore.rng import stream

from helpers import double_counting_instance, random_graph

small_boxes = st.sampled_from([Box(1, 1), Box(1, 2), Box(1, 3), Box(2, 1), Box(2, 2)])
bcs = st.sampled_from(["odd", "even", "free"])
activities = st.fractions(min_value=0, max_value=4, max_denominator=6)


@settings(max_examples=40, deadline=None)
@given(small_boxes, bcs, activities)
def test_partition_function_is_sum_of_weights(box, bc, lam):
    states = list(enumerate_feasible(box, bc))
    assert partition_function(box, bc, lam) == sum(weight(w, lam) for w in states)
    assert all(satisfies_bc(w, bc) for w in states)


@settings(max_examples=30, deadline=None)
@given(small_boxes, bcs, st.fractions(min_value=Fraction(1, 5), max_value=4, max_denominator=6))
def test_distribution_is_normalised_and_positive(box, bc, lam):
    law = distribution(box, bc, lam)
    assert sum(law.values()) == 1 and all(p > 0 for p in law.values())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_double_counting_on_valid_instances(seed):
    X, mu, A, T, p, q = double_counting_instance(random.Random(seed))
    assert check_double_counting(X, mu, A, T, p, q)
    assert sum(mu[a] for a in A) <= Fraction(p) / q


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 5))
def test_connected_set_bound(seed, M):
    H, v = random_graph(random.Random(seed))
    count = count_connected_sets(H, v, M)
    delta = max_degree(H)
    assert count <= max(delta, 1) ** (2 * M - 2) if delta else count == (1 if M == 1 else 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), bcs)
def test_meet_and_join_bracket_both_states(seed, bc):
    lat = Lattice.build(Box(2, 3), bc)
    gen = stream(seed, 0, 1234)
    a, b = random_state(lat, gen), random_state(lat, gen)
    lo, hi = meet_join(lat, a, b)
    for s in (a, b):
        assert precedes(lat, lo, s) and precedes(lat, s, hi)


@given(st.sets(st.tuples(st.integers(-2, 2), st.integers(-2, 2))))
def test_configuration_json_round_trip(occupied):
    w = Configuration(Box(2, 2), occupied)
    assert Configuration.from_json(w.to_json()) == w
