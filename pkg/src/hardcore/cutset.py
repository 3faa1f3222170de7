"""Minimal edge cutsets separating an anchor vertex from the box boundary.

A cutset is kept together with the two sides it induces: ``a1`` (the side of
the anchor ``x``) and ``a0`` (the side of the boundary). Vertices outside the
box are treated as part of ``a0`` so that every vertex has ``2d``
neighbours; cutset edges themselves always lie inside the box.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping

from .gibbs import (
    DEFAULT_ENUMERATION_CAP,
    BoundaryCondition,
    Configuration,
    enumerate_feasible,
    is_feasible,
    satisfies_bc,
)
from .lattice import Box, Vertex, component, is_even, neighbors, step

Edge = tuple[Vertex, Vertex]

ENUMERATION_MAX_N = 3
INTERIOR_MODIFICATION_GUARD = 20


class NonSeparatingError(ValueError):
    pass


class GuardExceeded(RuntimeError):
    pass


class OmegaMembershipError(ValueError):
    """A configuration is not in the bad event; ``reason`` says which condition failed."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


# exact threshold tests against square roots; a, b rational, b >= 0


def exceeds_sqrt(a, b) -> bool:
    """``a > sqrt(b)``."""
    return a > 0 and a * a > b


def at_least_sqrt(a, b) -> bool:
    """``a >= sqrt(b)``."""
    return a >= 0 and a * a >= b


def is_exposed_degree(p: int, d: int) -> bool:
    """``p >= 2d - sqrt(d)``."""
    return not exceeds_sqrt(2 * d - p, d)


def edge(v: Vertex, w: Vertex) -> Edge:
    v, w = tuple(v), tuple(w)
    if sum(abs(a - b) for a, b in zip(v, w)) != 1 or len(v) != len(w):
        raise ValueError(f"{v} and {w} are not adjacent")
    return (v, w) if v < w else (w, v)


def _edge_component(box: Box, sources: Iterable[Vertex], removed: frozenset[Edge]) -> set[Vertex]:
    adj = box.adjacency
    seen = set(sources)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen and ((v, w) if v < w else (w, v)) not in removed:
                seen.add(w)
                queue.append(w)
    return seen


class EdgeCutset:
    """A set of box edges separating ``x`` from the boundary.

    Raises :class:`NonSeparatingError` if some path from ``x`` to the boundary
    avoids every edge. The statistics below are meaningful for odd minimal
    cutsets.
    """

    def __init__(self, box: Box, x: Vertex, edges: Iterable[Edge]):
        self.box = box
        self.x = tuple(x)
        inside = box.adjacency
        es = set()
        for v, w in edges:
            v, w = tuple(v), tuple(w)
            if v not in inside or w not in inside:
                raise ValueError(f"edge {(v, w)} leaves the box")
            if w not in inside[v]:
                raise ValueError(f"{v} and {w} are not adjacent")
            es.add((v, w) if v < w else (w, v))
        self.edges = frozenset(es)
        self.a1 = frozenset(_edge_component(box, [self.x], self.edges))
        if self.a1 & box.boundary:
            raise NonSeparatingError(f"edge set does not separate {self.x} from the boundary")
        self.a0 = frozenset(_edge_component(box, box.boundary, self.edges))

    @classmethod
    def from_inner(cls, box: Box, x: Vertex, a1: Iterable[Vertex]) -> "EdgeCutset":
        """The edge boundary of a vertex set containing ``x``."""
        a1 = set(a1)
        adj = box.adjacency
        es = {(v, w) if v < w else (w, v) for v in a1 for w in adj[v] if w not in a1}
        return cls(box, x, es)

    def __eq__(self, other):
        return (
            isinstance(other, EdgeCutset)
            and (self.box, self.x, self.edges) == (other.box, other.x, other.edges)
        )

    def __hash__(self):
        return hash((self.box, self.x, self.edges))

    def __len__(self):
        return len(self.edges)

    def __repr__(self):
        return f"EdgeCutset(x={self.x}, |edges|={len(self.edges)}, |A1|={len(self.a1)})"

    @property
    def d(self) -> int:
        return self.box.d

    @cached_property
    def _degree(self) -> dict[Vertex, int]:
        deg: dict[Vertex, int] = {}
        for v, w in self.edges:
            deg[v] = deg.get(v, 0) + 1
            deg[w] = deg.get(w, 0) + 1
        return deg

    def p(self, v: Vertex) -> int:
        """Number of cutset edges at ``v``."""
        return self._degree.get(tuple(v), 0)

    def side(self, v: Vertex) -> int:
        """1 if ``v`` is on the anchor side, else 0 (outside the box counts as 0)."""
        return 1 if tuple(v) in self.a1 else 0

    def inner(self, delta: int) -> frozenset[Vertex]:
        """``A_delta``, restricted to box vertices."""
        return self.a1 if delta == 1 else frozenset(self.box.vertices) - self.a1

    @cached_property
    def e0(self) -> frozenset[Vertex]:
        return frozenset(v for v in self._degree if v in self.a0)

    @cached_property
    def e1(self) -> frozenset[Vertex]:
        return frozenset(v for v in self._degree if v in self.a1)

    def boundary_set(self, delta: int) -> frozenset[Vertex]:
        return self.e1 if delta == 1 else self.e0

    @cached_property
    def e1_exposed(self) -> frozenset[Vertex]:
        return frozenset(v for v in self.e1 if is_exposed_degree(self.p(v), self.d))

    def e1_j(self, j: int) -> frozenset[Vertex]:
        return frozenset(v for v in self.e1 if edge(v, step(v, j)) in self.edges)

    def e1_jx(self, j: int) -> frozenset[Vertex]:
        return frozenset(v for v in self.e1_exposed if step(v, j) in self.a1)

    def gamma_j(self, j: int) -> frozenset[Edge]:
        return frozenset(edge(v, step(v, j)) for v in self.e1_j(j))

    @cached_property
    def gamma_r(self) -> frozenset[Edge]:
        regular = self.e1 - self.e1_exposed
        return frozenset(e for e in self.edges if e[0] in regular or e[1] in regular)

    def gamma_r_j(self, j: int) -> frozenset[Edge]:
        return self.gamma_j(j) & self.gamma_r

    def r_value(self, vertices: Iterable[Vertex]) -> int:
        """Sum of ``min(P(v), 2d - P(v))`` over ``vertices``."""
        two_d = 2 * self.d
        return sum(min(self.p(v), two_d - self.p(v)) for v in set(map(tuple, vertices)))

    def sorted_edges(self) -> list[Edge]:
        idx = self.box.index
        return sorted(self.edges, key=lambda e: (idx(e[0]), idx(e[1])))

    def to_json(self) -> dict:
        return {
            "edges": [[list(v), list(w)] for v, w in self.sorted_edges()],
            "stats": stats(self).as_dict(),
        }


@dataclass(frozen=True)
class CutsetStats:
    L: int
    M: int
    R: int
    gamma_j: tuple[int, ...]
    gamma_r_j: tuple[int, ...]
    e1_j: tuple[int, ...]
    e1_jx: tuple[int, ...]
    e1_exposed: int
    gamma_r: int

    def as_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out


def stats(gamma: EdgeCutset) -> CutsetStats:
    js = range(1, 2 * gamma.d + 1)
    return CutsetStats(
        L=len(gamma.edges),
        M=len(gamma.e1),
        R=gamma.r_value(gamma.e1),
        gamma_j=tuple(len(gamma.gamma_j(j)) for j in js),
        gamma_r_j=tuple(len(gamma.gamma_r_j(j)) for j in js),
        e1_j=tuple(len(gamma.e1_j(j)) for j in js),
        e1_jx=tuple(len(gamma.e1_jx(j)) for j in js),
        e1_exposed=len(gamma.e1_exposed),
        gamma_r=len(gamma.gamma_r),
    )


def _separates(box: Box, x: Vertex, removed: frozenset[Edge]) -> bool:
    return not (_edge_component(box, [x], removed) & box.boundary)


def is_minimal_cutset(gamma: EdgeCutset) -> bool:
    """True iff dropping any single edge reconnects ``x`` to the boundary."""
    if not _separates(gamma.box, gamma.x, gamma.edges):
        raise NonSeparatingError("not a cutset")
    return all(not _separates(gamma.box, gamma.x, gamma.edges - {e}) for e in gamma.edges)


def is_odd_cutset(gamma: EdgeCutset) -> bool:
    return all(not is_even(v) for v in gamma.e1)


def is_omcut(gamma: EdgeCutset) -> bool:
    return is_minimal_cutset(gamma) and is_odd_cutset(gamma)


def _check_omega(omega: Configuration, x: Vertex) -> None:
    box = omega.box
    if box.n < 2:
        raise OmegaMembershipError("box-too-small", "the bad event needs n >= 2")
    if not box.contains(x):
        raise OmegaMembershipError("anchor-outside", f"{x} is not in the box")
    if not is_even(x):
        raise OmegaMembershipError("anchor-odd", f"anchor {x} is odd")
    if not satisfies_bc(omega, BoundaryCondition.ODD):
        raise OmegaMembershipError("boundary", "configuration violates the odd boundary condition")
    if omega[x] != 1:
        raise OmegaMembershipError("anchor-vacant", f"anchor {x} is vacant")


def in_omega(omega: Configuration, x: Vertex) -> bool:
    try:
        _check_omega(omega, tuple(x))
    except OmegaMembershipError:
        return False
    return True


def break_from_vacancies(omega: Configuration, x: Vertex) -> EdgeCutset:
    """The outermost cutset around ``x`` cut out by the vacant odd vertices.

    Does not require ``x`` to be occupied; raises :class:`OmegaMembershipError`
    when ``x`` is reachable from the boundary.
    """
    box = omega.box
    x = tuple(x)
    vacant_odd = {v for v in box.vertices if not is_even(v) and v not in omega.occupied}
    outer = component(box, box.boundary, blocked=vacant_odd)
    if x in outer:
        raise OmegaMembershipError("anchor-connected", f"{x} is connected to the boundary")
    inner = component(box, [x], blocked=outer)
    return EdgeCutset.from_inner(box, x, inner)


def break_of(omega: Configuration, x: Vertex) -> EdgeCutset:
    x = tuple(x)
    _check_omega(omega, x)
    return break_from_vacancies(omega, x)


def enumerate_omega(box: Box, x: Vertex, *, cap: int | None = None) -> Iterator[Configuration]:
    """Odd-boundary configurations with ``x`` occupied."""
    return enumerate_feasible(
        box, BoundaryCondition.ODD, pinned=[tuple(x)], cap=cap or DEFAULT_ENUMERATION_CAP
    )


def connected_sets(
    adj: Mapping[Hashable, Iterable[Hashable]], root: Hashable, max_size: int | None = None
) -> Iterator[frozenset]:
    """Every connected vertex set containing ``root`` (up to ``max_size``), once each.

    Include/exclude branching over a frontier list; a vertex excluded in one
    branch stays banned for the rest of that subtree.
    """
    order = {v: i for i, v in enumerate(adj)}

    def grow(current: frozenset, frontier: list, banned: frozenset) -> Iterator[frozenset]:
        yield current
        if max_size is not None and len(current) >= max_size:
            return
        frontier = list(frontier)
        while frontier:
            w = frontier.pop(0)
            grown = current | {w}
            extra = [
                u for u in adj[w] if u not in grown and u not in banned and u not in frontier
            ]
            nxt = sorted(set(frontier) | set(extra), key=order.__getitem__)
            yield from grow(grown, nxt, banned)
            banned = banned | {w}

    start = sorted({u for u in adj[root] if u != root}, key=order.__getitem__)
    yield from grow(frozenset([root]), start, frozenset([root]))


def count_connected_sets(H: Mapping[Hashable, Iterable[Hashable]], v: Hashable, M: int) -> int:
    """Number of connected ``M``-vertex sets of ``H`` containing ``v``."""
    if M < 1:
        raise ValueError("M must be positive")
    adj = {u: list(ws) for u, ws in H.items()}
    return sum(1 for s in connected_sets(adj, v, max_size=M) if len(s) == M)


def max_degree(H: Mapping[Hashable, Iterable[Hashable]]) -> int:
    return max((len(set(ws)) for ws in H.values()), default=0)


def check_omcut_guard(box: Box, force: bool = False) -> None:
    if not force and (box.d != 2 or box.n > ENUMERATION_MAX_N):
        raise GuardExceeded(f"cutset enumeration is limited to d=2, n<={ENUMERATION_MAX_N}")


def enumerate_omcut(box: Box, x: Vertex, *, force: bool = False) -> Iterator[EdgeCutset]:
    """All odd minimal cutsets separating ``x`` from the boundary.

    The anchor side of an odd cutset is the closed neighbourhood of its even
    vertices, and each of those even vertices must stay two steps away from
    the boundary. So the search grows sets of such "deep" even vertices that
    are connected at distance 2, and keeps those whose complement is
    connected. Output is sorted by (size, anchor-side vertex indices).
    """
    check_omcut_guard(box, force)
    x = tuple(x)
    if not box.contains(x) or not is_even(x):
        return iter(())
    deep = [v for v in box.vertices if is_even(v) and max(abs(c) for c in v) <= box.n - 2]
    if x not in deep:
        return iter(())
    adj = {
        v: [w for w in deep if w != v and sum(abs(a - b) for a, b in zip(v, w)) == 2]
        for v in deep
    }
    all_vertices = set(box.vertices)
    found = []
    for evens in connected_sets(adj, x):
        a1 = set(evens)
        for v in evens:
            a1.update(neighbors(v))
        rest = all_vertices - a1
        if component(box, box.boundary, blocked=a1) != rest:
            continue
        found.append(EdgeCutset.from_inner(box, x, a1))
    idx = box.index
    found.sort(key=lambda g: (len(g.edges), sorted(idx(v) for v in g.a1)))
    return iter(found)


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def omcut_class(gamma: EdgeCutset, eps) -> bool:
    """Membership in the slice ``eps |G| < |G_r| <= 2 eps |G|``."""
    eps = _as_fraction(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2]")
    L = len(gamma.edges)
    r = len(gamma.gamma_r)
    return eps * L < r <= 2 * eps * L


def dyadic_level(gamma: EdgeCutset) -> int | None:
    """The ``k >= 1`` with the cutset in the ``2^-k`` slice, or None when ``G_r`` is empty."""
    L = len(gamma.edges)
    r = len(gamma.gamma_r)
    if r == 0:
        return None
    k = 1
    while not (L < (2**k) * r <= 2 * L):
        k += 1
    return k


@dataclass(frozen=True)
class OmegaClass:
    part: int  # 1 or 2
    M: int | None = None
    R: int | None = None
    L: int | None = None
    r: int | None = None
    x_count: int | None = None
    k: int | None = None
    direction: int | None = None


def omega_class(omega: Configuration, x: Vertex, beta) -> OmegaClass:
    """Split of the bad event by how much of Break(omega) sits at exposed vertices.

    Part 1 iff ``|G_r| < 12 |G| / d^beta``, decided exactly as
    ``|G_r|^q d^p < (12|G|)^q`` for ``beta = p/q``.
    """
    from .transform import erase_set, t2_direction

    beta = _as_fraction(beta)
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    gamma = break_of(omega, x)
    d = gamma.d
    L = len(gamma.edges)
    rr = len(gamma.gamma_r)
    p, q = beta.numerator, beta.denominator
    if rr**q * d**p < (12 * L) ** q:
        return OmegaClass(part=1, M=len(gamma.e1), R=gamma.r_value(gamma.e1))
    j = t2_direction(gamma)
    return OmegaClass(
        part=2,
        L=L,
        r=len(gamma.gamma_r_j(j)),
        x_count=len(erase_set(omega, gamma, j)),
        k=dyadic_level(gamma),
        direction=j,
    )


def interior_modifications(
    omega: Configuration,
    x: Vertex,
    *,
    scope: str = "omega",
    guard: int = INTERIOR_MODIFICATION_GUARD,
) -> Iterator[Configuration]:
    """Configurations equal to ``omega`` off ``A1 \\ E1`` of its Break.

    ``scope="omega"`` keeps only those with ``x`` occupied; ``scope="f_odd"``
    keeps every feasible one.
    """
    if scope not in ("omega", "f_odd"):
        raise ValueError("scope must be 'omega' or 'f_odd'")
    x = tuple(x)
    gamma = break_of(omega, x)
    region = sorted(gamma.a1 - gamma.e1, key=omega.box.index)
    if len(region) > guard:
        raise GuardExceeded(f"{len(region)} interior vertices exceed the guard of {guard}")
    outside = omega.occupied - set(region)
    for bits in itertools.product((0, 1), repeat=len(region)):
        cand = Configuration(omega.box, outside | {v for v, b in zip(region, bits) if b})
        if not is_feasible(cand):
            continue
        if scope == "omega" and cand[x] != 1:
            continue
        yield cand
