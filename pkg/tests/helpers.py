"""Random instance builders shared by the property and acceptance tests."""

import random
from fractions import Fraction

import networkx as nx


def double_counting_instance(rng: random.Random):
    """A finite space with a measure, a set A and a map T meeting the hypotheses.

    The multiplicity p is chosen first and images are drawn so that no point
    is covered more than p times; q is then the largest admissible ratio.
    """
    k = rng.randint(2, 9)
    X = list(range(k))
    raw = [rng.randint(1, 20) for _ in X]
    total = sum(raw)
    mu = {x: Fraction(w, total) for x, w in zip(X, raw)}
    A = rng.sample(X, rng.randint(1, k))
    p = rng.randint(1, 3)
    cover = dict.fromkeys(X, 0)
    T = {}
    for a in A:
        room = [x for x in X if cover[x] < p]
        if not room:
            A = [b for b in A if b in T]
            break
        image = rng.sample(room, rng.randint(1, len(room)))
        for x in image:
            cover[x] += 1
        T[a] = image
    q = min(sum(mu[x] for x in T[a]) / mu[a] for a in A)
    return X, mu, A, T, p, q


def random_graph(rng: random.Random):
    """Either a small grid or an Erdos-Renyi graph, as an adjacency dict."""
    if rng.random() < 0.5:
        G = nx.grid_2d_graph(rng.randint(2, 5), rng.randint(2, 5))
    else:
        G = nx.gnp_random_graph(rng.randint(3, 10), rng.uniform(0.2, 0.8), seed=rng.randrange(2**32))
    return {v: list(G[v]) for v in G}, rng.choice(list(G))
