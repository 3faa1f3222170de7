"""Hard-core configurations and exact measures on a box by exhaustive enumeration.

Everything here is exact: activities and probabilities are
:class:`fractions.Fraction`. This module is the reference oracle that the
sampler and the cutset machinery are checked against, so it is kept simple
on purpose (plain backtracking, no transfer matrices).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping

from .lattice import Box, Vertex, is_even, neighbors

MeasureValue = Fraction

DEFAULT_ENUMERATION_CAP = 30


class BoundaryCondition(str, enum.Enum):
    FREE = "free"
    ODD = "odd"
    EVEN = "even"


class InfeasibleConfiguration(ValueError):
    pass


class EnumerationCapExceeded(RuntimeError):
    pass


class ZeroMeasureError(ZeroDivisionError):
    pass


class HypothesisViolation(ValueError):
    """Raised when an instance does not satisfy the double-counting hypotheses."""


def as_bc(bc: BoundaryCondition | str) -> BoundaryCondition:
    return bc if isinstance(bc, BoundaryCondition) else BoundaryCondition(str(bc).replace("-occupied", ""))


def parse_activity(value) -> Fraction:
    """Exact activity from ``"p/q"``, a decimal string, an int or a Fraction.

    Floats go through their shortest repr, so ``0.3`` becomes ``3/10``.
    """
    if isinstance(value, Fraction):
        lam = value
    elif isinstance(value, bool):
        raise TypeError("activity cannot be a bool")
    elif isinstance(value, int):
        lam = Fraction(value)
    elif isinstance(value, float):
        lam = Fraction(repr(value))
    else:
        lam = Fraction(str(value).strip())
    if lam < 0:
        raise ValueError("activity must be nonnegative")
    return lam


def format_measure(p: Fraction) -> tuple[str, str]:
    """``("p/q", decimal to 12 significant digits)``."""
    with localcontext() as ctx:
        ctx.prec = 40
        dec = Decimal(p.numerator) / Decimal(p.denominator)
    return f"{p.numerator}/{p.denominator}", format(dec, ".12g")


@dataclass(frozen=True)
class Configuration:
    """0/1 occupation of a box, stored as the set of occupied vertices."""

    box: Box
    occupied: frozenset[Vertex]

    def __post_init__(self):
        if not isinstance(self.occupied, frozenset):
            object.__setattr__(self, "occupied", frozenset(tuple(v) for v in self.occupied))
        inside = self.box.adjacency
        for v in self.occupied:
            if v not in inside:
                raise ValueError(f"occupied vertex {v} lies outside the box")

    def __getitem__(self, v: Vertex) -> int:
        # vertices outside the box read as vacant
        return 1 if tuple(v) in self.occupied else 0

    @property
    def vacant(self) -> frozenset[Vertex]:
        return frozenset(self.box.vertices) - self.occupied

    def with_values(self, values: Mapping[Vertex, int]) -> "Configuration":
        occ = set(self.occupied)
        for v, b in values.items():
            if b:
                occ.add(tuple(v))
            else:
                occ.discard(tuple(v))
        return Configuration(self.box, frozenset(occ))

    def to_json(self) -> dict:
        order = self.box.index
        return {
            "box": self.box.to_json(),
            "occupied": [list(v) for v in sorted(self.occupied, key=order)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Configuration":
        return cls(Box.from_json(obj["box"]), frozenset(tuple(v) for v in obj["occupied"]))


def is_feasible(omega: Configuration) -> bool:
    occ = omega.occupied
    for v in occ:
        for w in neighbors(v):
            if w in occ:
                return False
    return True


def clamped_vertices(box: Box, bc: BoundaryCondition | str) -> frozenset[Vertex]:
    """Vertices the boundary condition fixes to occupied."""
    bc = as_bc(bc)
    if bc is BoundaryCondition.FREE:
        return frozenset()
    want_even = bc is BoundaryCondition.EVEN
    return frozenset(v for v in box.boundary if is_even(v) == want_even)


def free_vertices(box: Box, bc: BoundaryCondition | str) -> list[Vertex]:
    """Vertices whose value the boundary condition leaves undetermined, row-major.

    Neighbours of clamped vertices are forced vacant and are not counted.
    """
    clamped = clamped_vertices(box, bc)
    blocked = {w for v in clamped for w in neighbors(v)}
    return [v for v in box.vertices if v not in clamped and v not in blocked]


def satisfies_bc(omega: Configuration, bc: BoundaryCondition | str) -> bool:
    return is_feasible(omega) and clamped_vertices(omega.box, bc) <= omega.occupied


def weight(omega: Configuration, lam) -> Fraction:
    if not is_feasible(omega):
        raise InfeasibleConfiguration("weight of an infeasible configuration")
    return parse_activity(lam) ** len(omega.occupied)


def enumerate_feasible(
    box: Box,
    bc: BoundaryCondition | str = BoundaryCondition.FREE,
    *,
    pinned: Iterable[Vertex] = (),
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[Configuration]:
    """Every feasible configuration respecting ``bc``, exactly once.

    Order is lexicographic in the row-major free-vertex sequence with vacant
    before occupied. ``pinned`` vertices are additionally required to be
    occupied.
    """
    clamped = clamped_vertices(box, bc)
    free = free_vertices(box, bc)
    if len(free) > cap:
        raise EnumerationCapExceeded(f"{len(free)} free vertices exceed the cap of {cap}")
    pos = {v: i for i, v in enumerate(free)}
    pinned = {tuple(v) for v in pinned}
    for v in pinned:
        if v not in pos and v not in clamped:
            return  # pinned vertex is forced vacant: nothing to emit
    earlier = [
        [pos[w] for w in neighbors(v) if w in pos and pos[w] < i] for i, v in enumerate(free)
    ]
    must = [v in pinned for v in free]
    chosen = [0] * len(free)

    def rec(i: int) -> Iterator[Configuration]:
        if i == len(free):
            yield Configuration(box, clamped | {free[k] for k in range(len(free)) if chosen[k]})
            return
        if not must[i]:
            chosen[i] = 0
            yield from rec(i + 1)
        if all(not chosen[k] for k in earlier[i]):
            chosen[i] = 1
            yield from rec(i + 1)
            chosen[i] = 0

    yield from rec(0)


def partition_function(box: Box, bc, lam, *, cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    lam = parse_activity(lam)
    return sum((lam ** len(w.occupied) for w in enumerate_feasible(box, bc, cap=cap)), Fraction(0))


def _relative_weight(omega: Configuration, clamped: frozenset, lam: Fraction) -> Fraction:
    # clamped occupancy is common to every configuration and cancels in ratios;
    # dropping it keeps the conditional measure defined at lam = 0
    return lam ** len(omega.occupied - clamped)


def distribution(box: Box, bc, lam, *, cap: int = DEFAULT_ENUMERATION_CAP) -> dict[Configuration, Fraction]:
    """Exact law of the configuration under the hard-core measure conditioned on ``bc``."""
    lam = parse_activity(lam)
    clamped = clamped_vertices(box, bc)
    ws = {w: _relative_weight(w, clamped, lam) for w in enumerate_feasible(box, bc, cap=cap)}
    total = sum(ws.values(), Fraction(0))
    if total == 0:
        raise ZeroMeasureError("conditioning event has zero measure")
    return {w: p / total for w, p in ws.items()}


def probability(
    event: Callable[[Configuration], bool],
    box: Box,
    bc,
    lam,
    *,
    given: Callable[[Configuration], bool] | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Fraction:
    """Exact ``P(event | bc [, given])``."""
    lam = parse_activity(lam)
    clamped = clamped_vertices(box, bc)
    num = Fraction(0)
    den = Fraction(0)
    for w in enumerate_feasible(box, bc, cap=cap):
        if given is not None and not given(w):
            continue
        wt = _relative_weight(w, clamped, lam)
        den += wt
        if event(w):
            num += wt
    if den == 0:
        raise ZeroMeasureError("conditioning event has zero measure")
    return num / den


def occupied_at(x: Vertex) -> Callable[[Configuration], bool]:
    x = tuple(x)
    return lambda w: x in w.occupied


def check_double_counting(
    X: Iterable[Hashable],
    mu: Mapping[Hashable, Fraction],
    A: Iterable[Hashable],
    T: Mapping[Hashable, Iterable[Hashable]],
    p,
    q,
) -> bool:
    """Verify ``mu(A) <= p/q`` for an expanding map ``T`` on a finite space.

    The hypotheses (``mu`` a probability measure, ``mu(T(a)) >= q mu(a)`` and
    every point covered by at most ``p`` images) are checked first and a
    :class:`HypothesisViolation` is raised when one fails.
    """
    X = list(X)
    Xs = set(X)
    A = list(A)
    p, q = Fraction(p), Fraction(q)
    if p <= 0 or q <= 0:
        raise HypothesisViolation("p and q must be positive")
    if any(Fraction(mu.get(x, 0)) < 0 for x in X) or sum((Fraction(mu.get(x, 0)) for x in X), Fraction(0)) != 1:
        raise HypothesisViolation("mu is not a probability measure on X")
    if not set(A) <= Xs:
        raise HypothesisViolation("A is not a subset of X")
    cover = {x: 0 for x in X}
    for a in A:
        image = set(T.get(a, ()))
        if not image <= Xs:
            raise HypothesisViolation(f"T({a!r}) leaves X")
        if sum((Fraction(mu[x]) for x in image), Fraction(0)) < q * Fraction(mu[a]):
            raise HypothesisViolation(f"mu(T({a!r})) < q mu({a!r})")
        for x in image:
            cover[x] += 1
    if max(cover.values(), default=0) > p:
        raise HypothesisViolation("some point lies in more than p images")
    return sum((Fraction(mu[a]) for a in set(A)), Fraction(0)) <= p / q
