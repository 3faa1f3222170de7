"""Dominating sets, direction codes and interior approximations of odd cutsets.

Given an odd minimal cutset, a pair of small vertex sets ``E0t, E1t`` on
either side of it, together with the direction codes of their vertices, is
enough to rebuild a set squeezed between the non-exposed inner boundary and
the inside of the cutset. The reconstruction in :func:`interior_approx` sees
only that data, never the cutset itself.

Square-root thresholds (``sqrt(eps d)`` and friends) are compared exactly by
squaring. The sampling probabilities ``p_v`` are the one place floats appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .cutset import (
    EdgeCutset,
    GuardExceeded,
    _as_fraction,
    check_omcut_guard,
    enumerate_omcut,
    is_exposed_degree,
    is_omcut,
    omcut_class,
)
from .lattice import Box, Vertex, connected_in_power, neighbors, step
from .transform import is_interior_approx

DEFAULT_RETRY_CAP = 1000
NGAMMA_MAX_R = 8

STANDARD = "standard"
EXTENDED = "extended"

__all__ = [
    "ApproxInput",
    "DominatingSets",
    "EpsilonParam",
    "FamilyCensus",
    "RetryCapExceeded",
    "USets",
    "census_ngamma",
    "direction_code",
    "dominating_sets",
    "family_census",
    "g8_connectivity",
    "interior_approx",
    "is_interior_approx",
    "predicate_b",
    "predicate_c",
    "predicate_d",
    "predicates_hold",
    "sampling_probability",
    "satisfies_approx_chain",
    "u_sets",
]


class RetryCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EpsilonParam:
    """``eps`` with the regime it was admitted under.

    The standard regime ``[d^-1/2, 1/2]`` is empty below d = 4; ``extended``
    admits any ``eps`` in ``(0, 1/2]``.
    """

    eps: Fraction
    regime: str = STANDARD

    @classmethod
    def make(cls, eps, d: int, regime: str = STANDARD) -> "EpsilonParam":
        eps = _as_fraction(eps)
        if regime not in (STANDARD, EXTENDED):
            raise ValueError(f"unknown regime {regime!r}")
        if not 0 < eps <= Fraction(1, 2):
            raise ValueError("eps must lie in (0, 1/2]")
        if regime == STANDARD and eps * eps * d < 1:
            raise ValueError(f"eps={eps} is below d^(-1/2) for d={d}; use the extended regime")
        return cls(eps, regime)


def _eps(eps, d: int, regime: str | None) -> EpsilonParam:
    if isinstance(eps, EpsilonParam):
        return eps
    return EpsilonParam.make(eps, d, regime or STANDARD)


# exact comparisons against sqrt(eps d) and related thresholds


def _below_sqrt_eps_d(k: int, eps: Fraction, d: int) -> bool:
    return k * k < eps * d


def _u1_large(size: int, eps: Fraction, d: int) -> bool:
    # |U1| >= sqrt(eps) d^(3/2) / 2
    return (2 * size) ** 2 >= eps * d**3


def _p_at_most_sqrt_d(p: int, d: int) -> bool:
    return p * p <= d


def _side(gamma: EdgeCutset, delta: int):
    """Membership test for ``A_delta``; vertices off the box count as ``A_0``."""
    a1 = gamma.a1
    return (lambda v: v in a1) if delta == 1 else (lambda v: v not in a1)


def _boundary(gamma: EdgeCutset, delta: int) -> frozenset[Vertex]:
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    return gamma.boundary_set(delta)


@dataclass(frozen=True)
class USets:
    u1: frozenset[Vertex]
    u2: frozenset[Vertex]
    u3: frozenset[Vertex]


def u_sets(gamma: EdgeCutset, delta: int, v: Vertex, eps) -> USets:
    """The three neighbourhood sets of ``v`` in ``E_delta``.

    ``U1(v)`` contains ``v`` itself, since ``v -> u -> v`` is a valid two-step
    walk through any neighbour ``u`` on its own side.
    """
    v = tuple(v)
    E = _boundary(gamma, delta)
    if v not in E:
        raise ValueError(f"{v} is not in E_{delta}")
    eps = _as_fraction(eps.eps if isinstance(eps, EpsilonParam) else eps)
    d = gamma.d
    inside = _side(gamma, delta)
    own = [u for u in neighbors(v) if inside(u)]
    u1 = frozenset(w for u in own for w in neighbors(u) if w in E)
    u2 = frozenset(
        u for u in own if _below_sqrt_eps_d(sum(1 for w in neighbors(u) if w in E), eps, d)
    )
    u3 = frozenset(w for u in u2 for w in neighbors(u) if w in E and w != v)
    return USets(u1, u2, u3)


def _closed_nbhd(S: Iterable[Vertex]) -> set[Vertex]:
    return {w for v in S for w in neighbors(v)}


# the three required properties of (E0t, E1t)


def predicate_b(gamma: EdgeCutset, e1t, eps) -> bool:
    """Every ``v`` in ``E1`` with a large ``U1(v)`` meets ``E1t`` there."""
    eps = _as_fraction(eps)
    e1t = set(e1t)
    for v in gamma.e1:
        u1 = u_sets(gamma, 1, v, eps).u1
        if _u1_large(len(u1), eps, gamma.d) and not (u1 & e1t):
            return False
    return True


def predicate_c(gamma: EdgeCutset, delta: int, et, eps) -> bool:
    """Each ``v`` in ``E_delta`` with ``P(v) >= d`` sees ``sqrt(eps d)`` dominated neighbours across the cut."""
    eps = _as_fraction(eps)
    d = gamma.d
    near = _closed_nbhd(et)
    other = _boundary(gamma, 1 - delta)
    for v in _boundary(gamma, delta):
        if gamma.p(v) < d:
            continue
        k = sum(1 for w in neighbors(v) if w in other and w in near)
        if _below_sqrt_eps_d(k, eps, d):
            return False
    return True


def predicate_d(gamma: EdgeCutset, delta: int, et_other, eps) -> bool:
    """Low-degree ``v`` in ``E_delta`` with ``|U2(v)| >= d/2`` has ``U3(v)`` next to ``E_{1-delta}^t``."""
    eps = _as_fraction(eps)
    d = gamma.d
    near = _closed_nbhd(et_other)
    for v in _boundary(gamma, delta):
        if not _p_at_most_sqrt_d(gamma.p(v), d):
            continue
        us = u_sets(gamma, delta, v, eps)
        if 2 * len(us.u2) >= d and not (us.u3 & near):
            return False
    return True


def predicates_hold(gamma: EdgeCutset, e0t, e1t, eps) -> bool:
    ts = (set(e0t), set(e1t))
    return (
        predicate_b(gamma, ts[1], eps)
        and all(predicate_c(gamma, dl, ts[dl], eps) for dl in (0, 1))
        and all(predicate_d(gamma, dl, ts[1 - dl], eps) for dl in (0, 1))
    )


@dataclass(frozen=True)
class DominatingSets:
    e0t: frozenset[Vertex]
    e1t: frozenset[Vertex]
    r0: int  # R_G(E0t)
    r1: int
    retries: int
    eps: Fraction
    regime: str
    seed: int
    stages: Mapping[str, frozenset] = field(default_factory=dict, compare=False)

    def pair(self, delta: int) -> frozenset[Vertex]:
        return self.e1t if delta == 1 else self.e0t

    def diagnostics(self) -> dict:
        return {
            "R_E0t": self.r0,
            "R_E1t": self.r1,
            "retries": self.retries,
            "epsilon": str(self.eps),
            "regime": self.regime,
            "seed": self.seed,
        }


def sampling_probability(gamma: EdgeCutset, v: Vertex, eps: Fraction) -> float:
    """``p_v`` clamped to 1 (it exceeds 1 at small d)."""
    d = gamma.d
    base = 30 * math.log(d) / (2 * d - gamma.p(v))
    regular = v in gamma.e1 and not is_exposed_degree(gamma.p(v), d)
    factor = 1 / math.sqrt(eps * d) if regular else math.sqrt(eps / d)
    return min(1.0, base * float(factor))


def _uniforms(box: Box, seed: int, attempt: int) -> np.ndarray:
    # counter-based stream keyed by (seed, attempt); entry i belongs to vertex index i
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, attempt])))
    return gen.random(len(box))


def dominating_sets(
    gamma: EdgeCutset,
    eps,
    seed: int,
    *,
    regime: str | None = None,
    retry_cap: int = DEFAULT_RETRY_CAP,
) -> DominatingSets:
    """Randomised construction of ``E0t, E1t``.

    Each boundary vertex is kept independently with probability ``p_v``,
    then vertices that spoil one of the three required properties are
    patched in. The patch makes the properties hold by design, so a retry
    only happens if that reasoning fails for some input.
    """
    if not is_omcut(gamma):
        raise ValueError("input is not an odd minimal cutset")
    param = _eps(eps, gamma.d, regime)
    eps = param.eps
    box, d = gamma.box, gamma.d
    idx = box.index
    E = (gamma.e0, gamma.e1)
    order = [sorted(E[dl], key=idx) for dl in (0, 1)]
    probs = {v: sampling_probability(gamma, v, eps) for v in gamma.e0 | gamma.e1}
    us = {(dl, v): u_sets(gamma, dl, v, eps) for dl in (0, 1) for v in E[dl]}

    for attempt in range(retry_cap):
        draw = _uniforms(box, seed, attempt)
        es = [frozenset(v for v in order[dl] if draw[idx(v)] < probs[v]) for dl in (0, 1)]
        near_s = [_closed_nbhd(es[dl]) for dl in (0, 1)]

        b11 = frozenset(
            v
            for v in E[1]
            if _u1_large(len(us[1, v].u1), eps, d) and not (us[1, v].u1 & es[1])
        )
        b2 = [
            frozenset(
                v
                for v in E[dl]
                if gamma.p(v) >= d
                and _below_sqrt_eps_d(
                    sum(1 for w in neighbors(v) if w in E[1 - dl] and w in near_s[dl]), eps, d
                )
            )
            for dl in (0, 1)
        ]
        b3 = [
            frozenset(
                v
                for v in E[dl]
                if _p_at_most_sqrt_d(gamma.p(v), d)
                and 2 * len(us[dl, v].u2) >= d
                and not (us[dl, v].u3 & near_s[1 - dl])
            )
            for dl in (0, 1)
        ]
        # completion: one vertex of E_delta next to U3(v) for each v in E_{1-delta,3}^B
        comp = []
        for dl in (0, 1):
            chosen: set[Vertex] = set()
            for v in sorted(b3[1 - dl], key=idx):
                cands = sorted(_closed_nbhd(us[1 - dl, v].u3) & E[dl], key=idx)
                if cands and not (chosen & set(cands)):
                    chosen.add(cands[0])
            comp.append(frozenset(chosen))

        e0t = es[0] | b2[0] | comp[0]
        e1t = es[1] | b11 | b2[1] | comp[1]
        if predicates_hold(gamma, e0t, e1t, eps):
            return DominatingSets(
                e0t=e0t,
                e1t=e1t,
                r0=gamma.r_value(e0t),
                r1=gamma.r_value(e1t),
                retries=attempt,
                eps=eps,
                regime=param.regime,
                seed=seed,
                stages={
                    "E0s": es[0],
                    "E1s": es[1],
                    "E11B": b11,
                    "E02B": b2[0],
                    "E12B": b2[1],
                    "E03B": b3[0],
                    "E13B": b3[1],
                    "E03c": comp[0],
                    "E13c": comp[1],
                },
            )
    raise RetryCapExceeded(f"no valid dominating sets after {retry_cap} attempts")


def g8_connectivity(gamma: EdgeCutset, e0t, e1t, v: Vertex) -> bool:
    """Whether ``{v} | E0t | E1t`` is connected at L1 distance 8."""
    v = tuple(v)
    if v not in gamma.e1:
        raise ValueError(f"{v} is not in E1")
    return connected_in_power({v, *map(tuple, e0t), *map(tuple, e1t)}, 8)


def direction_code(gamma: EdgeCutset, E: Iterable[Vertex]) -> dict[Vertex, tuple[int, ...]]:
    """Bit ``j`` of ``v`` is 1 iff ``v + f_j`` lies inside the cutset."""
    allowed = gamma.e0 | gamma.e1
    out = {}
    for v in map(tuple, E):
        if v not in allowed:
            raise ValueError(f"{v} is not on the cutset boundary")
        out[v] = tuple(1 if step(v, j) in gamma.a1 else 0 for j in range(1, 2 * gamma.d + 1))
    return out


@dataclass(frozen=True)
class ApproxInput:
    """Everything the reconstruction may look at."""

    d: int
    eps: Fraction
    e0t: frozenset[Vertex]
    e1t: frozenset[Vertex]
    codes: Mapping[Vertex, tuple[int, ...]]

    @classmethod
    def from_cutset(cls, gamma: EdgeCutset, ds: DominatingSets) -> "ApproxInput":
        return cls(gamma.d, ds.eps, ds.e0t, ds.e1t, direction_code(gamma, ds.e0t | ds.e1t))


def interior_approx(data: ApproxInput) -> frozenset[Vertex]:
    d, eps = data.d, _as_fraction(data.eps)
    t = (frozenset(map(tuple, data.e0t)), frozenset(map(tuple, data.e1t)))
    for v in t[0] | t[1]:
        code = data.codes.get(v)
        if code is None or len(code) != 2 * d:
            raise ValueError(f"missing or malformed direction code for {v}")
    js = range(1, 2 * d + 1)

    def hits(v, bit):
        return [step(v, j) for j in js if data.codes[v][j - 1] == bit]

    ra = [{w for v in t[1 - dl] for w in hits(v, dl)} for dl in (0, 1)]
    rb = [_closed_nbhd(w for v in t[dl] for w in hits(v, dl)) for dl in (0, 1)]

    def in_v(dl, v):
        return _below_sqrt_eps_d(sum(1 for w in neighbors(v) if w in ra[1 - dl]), eps, d)

    candidates = _closed_nbhd(ra[1])
    U = {
        u
        for u in candidates
        if in_v(0, u) and any(w in ra[1] and in_v(1, w) for w in neighbors(u))
    }
    return frozenset(rb[1] | _closed_nbhd(U))


def satisfies_approx_chain(E, gamma: EdgeCutset, eps) -> bool:
    """``E_{1, P < 2d - sqrt(eps d)} <= E <= A1``."""
    eps = _as_fraction(eps)
    d = gamma.d
    E = set(map(tuple, E))
    # P < 2d - sqrt(eps d)  <=>  2d - P > sqrt(eps d)
    low = {v for v in gamma.e1 if _exceeds(2 * d - gamma.p(v), eps * d)}
    return low <= E and E <= gamma.a1


def _exceeds(a: int, b: Fraction) -> bool:
    return a > 0 and a * a > b


def census_ngamma(R: int, E: Iterable[Vertex], box: Box, x: Vertex) -> int:
    """Number of distinct direction-code tuples on ``E`` over cutsets with ``R_G(E) = R``."""
    if R > NGAMMA_MAX_R:
        raise GuardExceeded(f"R={R} exceeds the guard of {NGAMMA_MAX_R}")
    check_omcut_guard(box)
    E = sorted({tuple(v) for v in E}, key=box.index)
    if R < 0 or len(E) > R:
        return 0
    seen = set()
    for gamma in enumerate_omcut(box, x):
        if not set(E) <= (gamma.e0 | gamma.e1) or gamma.r_value(E) != R:
            continue
        codes = direction_code(gamma, E)
        seen.add(tuple(codes[v] for v in E))
    bound = (2 * box.d) ** (2 * R)
    if len(seen) > bound:
        raise AssertionError(f"census {len(seen)} exceeds (2d)^(2R) = {bound}")
    return len(seen)


@dataclass(frozen=True)
class FamilyCensus:
    L: int
    epsilon: Fraction
    cutsets: int
    distinct_approximations: int
    regime: str
    seed: int

    CSV_HEADER = ("L", "epsilon", "cutsets", "distinct_approximations", "regime_flag", "seed")

    def csv_row(self) -> tuple:
        return (self.L, str(self.epsilon), self.cutsets, self.distinct_approximations, self.regime, self.seed)


def family_census(box: Box, x: Vertex, eps, L: int, *, seed: int = 0, regime: str | None = None) -> FamilyCensus:
    """Count cutsets of size ``L`` in the ``eps`` slice and their distinct approximations."""
    check_omcut_guard(box)
    param = _eps(eps, box.d, regime)
    cutsets = 0
    found = set()
    for gamma in enumerate_omcut(box, x):
        if len(gamma.edges) != L or not omcut_class(gamma, param.eps):
            continue
        cutsets += 1
        ds = dominating_sets(gamma, param, seed)
        E = interior_approx(ApproxInput.from_cutset(gamma, ds))
        if not is_interior_approx(E, gamma):
            raise AssertionError(f"approximation for {gamma!r} is not an interior approximation")
        found.add(E)
    return FamilyCensus(L, param.eps, cutsets, len(found), param.regime, seed)
