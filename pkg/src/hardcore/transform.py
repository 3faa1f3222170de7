"""Shift transformations of bad configurations and their inverses.

For a bad configuration ``omega`` with cutset ``G = Break(omega)``, shifting
the inside of ``G`` one step in direction ``j`` empties every vertex next to
the inner boundary vertices facing ``j``. Those vertices can then be refilled
freely (T1), or freely except at exposed vertices which are forced vacant
(T2). The image families are streamed, never materialised.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .cutset import EdgeCutset, break_from_vacancies, break_of, enumerate_omega, in_omega
from .gibbs import BoundaryCondition, Configuration, distribution, parse_activity
from .lattice import Vertex, step

FAMILY_STREAM_LIMIT = 2**20


@dataclass(frozen=True)
class ShiftResult:
    omega: Configuration
    j: int
    output: Configuration
    cutset: EdgeCutset


@dataclass(frozen=True)
class ImageFamily:
    """Configurations equal to ``base.output`` except on ``free`` (any bits) and ``forced_vacant`` (zero)."""

    base: ShiftResult
    free: tuple[Vertex, ...]
    forced_vacant: frozenset[Vertex]

    def __len__(self) -> int:
        return 2 ** len(self.free)

    @property
    def fixed_occupied(self) -> frozenset[Vertex]:
        return self.base.output.occupied - set(self.free) - self.forced_vacant

    def __iter__(self) -> Iterator[Configuration]:
        if len(self) > FAMILY_STREAM_LIMIT:
            raise OverflowError(f"family of size 2^{len(self.free)} exceeds the stream limit")
        box = self.base.output.box
        fixed = self.fixed_occupied
        for bits in itertools.product((0, 1), repeat=len(self.free)):
            yield Configuration(box, fixed | {v for v, b in zip(self.free, bits) if b})

    def __contains__(self, other: Configuration) -> bool:
        free = set(self.free)
        return (
            other.box == self.base.output.box
            and not (other.occupied & self.forced_vacant)
            and other.occupied - free == self.fixed_occupied
        )

    def total_weight(self, lam) -> Fraction:
        """Closed form of the summed weight: ``lam^|fixed| (1 + lam)^|free|``."""
        lam = parse_activity(lam)
        return lam ** len(self.fixed_occupied) * (1 + lam) ** len(self.free)


@dataclass(frozen=True)
class EraseRecord:
    j: int
    erased: frozenset[Vertex]


def _cutset(omega: Configuration, x: Vertex, gamma: EdgeCutset | None) -> EdgeCutset:
    return break_of(omega, x) if gamma is None else gamma


def shift(omega: Configuration, x: Vertex, j: int, gamma: EdgeCutset | None = None) -> ShiftResult:
    """Move the inside of Break(omega) by one step: ``out(v) = omega(v + f_j)`` on A1."""
    gamma = _cutset(omega, x, gamma)
    if not 1 <= j <= 2 * gamma.d:
        raise ValueError(f"direction {j} out of range")
    a1 = gamma.a1
    occ = {v for v in omega.occupied if v not in a1}
    occ.update(v for v in a1 if step(v, j) in omega.occupied)
    return ShiftResult(omega, j, Configuration(omega.box, frozenset(occ)), gamma)


def t1_direction(gamma: EdgeCutset) -> int:
    """Smallest ``j`` with ``2d |G^j| >= |G|``."""
    two_d = 2 * gamma.d
    L = len(gamma.edges)
    for j in range(1, two_d + 1):
        if two_d * len(gamma.gamma_j(j)) >= L:
            return j
    raise AssertionError("pigeonhole failed: directional counts do not sum to |G|")


def t2_direction(gamma: EdgeCutset) -> int:
    """Smallest ``j`` maximising ``|G_r^j| - 8 |E_{1,j,x}|``."""
    scores = [
        len(gamma.gamma_r_j(j)) - 8 * len(gamma.e1_jx(j)) for j in range(1, 2 * gamma.d + 1)
    ]
    return scores.index(max(scores)) + 1


def t1_images(omega: Configuration, x: Vertex) -> ImageFamily:
    gamma = break_of(omega, x)
    j = t1_direction(gamma)
    base = shift(omega, x, j, gamma)
    free = tuple(sorted(gamma.e1_j(j), key=omega.box.index))
    return ImageFamily(base, free, frozenset())


def erase_set(omega: Configuration, gamma: EdgeCutset, j: int) -> frozenset[Vertex]:
    """Exposed vertices whose shifted value is occupied and gets forced vacant."""
    return frozenset(v for v in gamma.e1_exposed if step(v, j) in omega.occupied)


def t2_images(omega: Configuration, x: Vertex) -> tuple[ImageFamily, EraseRecord]:
    gamma = break_of(omega, x)
    j = t2_direction(gamma)
    base = shift(omega, x, j, gamma)
    free = tuple(sorted(gamma.e1_j(j) - gamma.e1_exposed, key=omega.box.index))
    family = ImageFamily(base, free, gamma.e1_exposed)
    return family, EraseRecord(j, erase_set(omega, gamma, j))


def _unshift(
    image: Configuration, gamma: EdgeCutset, j: int, exposed: frozenset = frozenset(), erased: frozenset = frozenset()
) -> Configuration:
    a1 = gamma.a1
    occ = {v for v in image.occupied if v not in a1}
    for v in a1:
        u = step(v, j, -1)
        if u not in a1:
            continue  # v is an inner boundary vertex, hence vacant
        if u in exposed:
            if u in erased:
                occ.add(v)
        elif u in image.occupied:
            occ.add(v)
    return Configuration(image.box, frozenset(occ))


def invert_t1(gamma: EdgeCutset, image: Configuration) -> Configuration | None:
    """The unique bad configuration with this Break whose T1 family holds ``image``, if any."""
    if image.box != gamma.box:
        return None
    omega = _unshift(image, gamma, t1_direction(gamma))
    if not in_omega(omega, gamma.x) or break_of(omega, gamma.x) != gamma:
        return None
    if image not in t1_images(omega, gamma.x):
        return None
    return omega


def is_interior_approx(E, gamma: EdgeCutset) -> bool:
    E = {tuple(v) for v in E}
    return (gamma.e1 - gamma.e1_exposed) <= E and E <= gamma.a1


def invert_t2(E, X, image: Configuration, x: Vertex) -> Configuration | None:
    """Recover ``omega`` from an interior approximation ``E``, erase set ``X`` and a T2 image."""
    x = tuple(x)
    E = frozenset(tuple(v) for v in E)
    X = frozenset(tuple(v) for v in X)
    box = image.box
    if any(not box.contains(v) for v in E | X) or not box.contains(x):
        return None
    cleared = Configuration(box, image.occupied - E)
    try:
        gamma = break_from_vacancies(cleared, x)
    except ValueError:
        return None
    if not is_interior_approx(E, gamma):
        return None
    j = t2_direction(gamma)
    if not X <= gamma.e1_jx(j):
        return None
    omega = _unshift(image, gamma, j, gamma.e1_exposed, X)
    if not in_omega(omega, x) or break_of(omega, x) != gamma:
        return None
    family, record = t2_images(omega, x)
    if image not in family or record.erased != X:
        return None
    return omega


@dataclass(frozen=True)
class BreakBound:
    probability: Fraction  # exact mu_odd(Break = G)
    base: Fraction  # 1 + lam
    exponent: Fraction  # |G| / 2d, bound is base^-exponent
    holds: bool

    @property
    def bound_float(self) -> float:
        return float(self.base) ** -float(self.exponent)


def bound_holds(prob: Fraction, lam: Fraction, L: int, d: int) -> bool:
    """``prob <= (1+lam)^(-L/2d)`` decided as ``prob^(2d) (1+lam)^L <= 1``."""
    return prob ** (2 * d) * (1 + lam) ** L <= 1


def break_distribution(box, x: Vertex, lam, *, cap: int | None = None) -> dict[EdgeCutset, Fraction]:
    """Exact ``mu_odd(omega in bad event, Break(omega) = G)`` for every realised ``G``."""
    x = tuple(x)
    kwargs = {} if cap is None else {"cap": cap}
    law = distribution(box, BoundaryCondition.ODD, lam, **kwargs)
    out: dict[EdgeCutset, Fraction] = {}
    for omega in enumerate_omega(box, x, **kwargs):
        g = break_of(omega, x)
        out[g] = out.get(g, Fraction(0)) + law[omega]
    return out


def break_probability_bound(gamma: EdgeCutset, lam, *, table: dict | None = None) -> BreakBound:
    lam = parse_activity(lam)
    if table is None:
        table = break_distribution(gamma.box, gamma.x, lam)
    prob = table.get(gamma, Fraction(0))
    L, d = len(gamma.edges), gamma.d
    return BreakBound(prob, 1 + lam, Fraction(L, 2 * d), bound_holds(prob, lam, L, d))
