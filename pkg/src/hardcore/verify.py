"""Exhaustive invariant suites over small boxes.

Each suite returns a :class:`Report` of named checks; a check fails with a
short description of its first counterexample. The command line ``verify``
command is a thin wrapper around :func:`run_suite`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from . import approx, cutset, transform
from .cutset import GuardExceeded
from .gibbs import BoundaryCondition, parse_activity, satisfies_bc, weight
from .lattice import Box, connected_in_power, is_even, neighbors, step

SUITES = ("props", "transforms", "approx")
MAX_N = 3
DEFAULT_LAMBDAS = (Fraction(1, 2), Fraction(1), Fraction(2))
DEFAULT_EPSILONS = (Fraction(3, 10), Fraction(1, 2))


@dataclass
class Check:
    name: str
    cases: int = 0
    failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.failure is None

    def record(self, ok: bool, detail: Callable[[], str] | str = "") -> None:
        self.cases += 1
        if not ok and self.failure is None:
            self.failure = detail() if callable(detail) else detail


@dataclass
class Report:
    suite: str
    params: dict
    checks: dict[str, Check] = field(default_factory=dict)

    def check(self, name: str) -> Check:
        return self.checks.setdefault(name, Check(name))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "params": self.params,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "cases": c.cases, "passed": c.passed, "failure": c.failure}
                for c in self.checks.values()
            ],
        }


def check_guard(d: int, n: int) -> None:
    if d != 2 or not 2 <= n <= MAX_N:
        raise GuardExceeded(f"suites run on d=2, 2<=n<={MAX_N}; got d={d}, n={n}")


def _realised(box: Box, x):
    """Bad configurations grouped by their Break."""
    groups: dict = {}
    for omega in cutset.enumerate_omega(box, x):
        groups.setdefault(cutset.break_of(omega, x), []).append(omega)
    return groups


def props_suite(d: int = 2, n: int = 2, x=None) -> Report:
    check_guard(d, n)
    box = Box(d, n)
    x = tuple(x) if x is not None else (0,) * d
    rep = Report("props", {"d": d, "n": n, "x": list(x)})
    groups = _realised(box, x)
    two_d = 2 * d

    for gamma, omegas in groups.items():
        for omega in omegas:
            rep.check("break is a minimal odd cutset").record(cutset.is_omcut(gamma), lambda: repr(gamma))
            rep.check("E0 even and vacant").record(
                all(is_even(v) and omega[v] == 0 for v in gamma.e0), lambda: repr(omega.occupied)
            )
            rep.check("E1 odd and vacant").record(
                all(not is_even(v) and omega[v] == 0 for v in gamma.e1), lambda: repr(omega.occupied)
            )
        rep.check("P <= 2d-1").record(
            all(gamma.p(v) <= two_d - 1 for v in gamma.e0 | gamma.e1), lambda: repr(gamma)
        )
        rep.check("|G| >= 2d(2d-1)").record(len(gamma.edges) >= two_d * (two_d - 1), lambda: repr(gamma))
        members = {w.occupied for w in omegas}
        for omega in omegas:
            mods = list(cutset.interior_modifications(omega, x))
            rep.check("interior modifications keep Break").record(
                omega in mods and all(m.occupied in members for m in mods), lambda: repr(omega.occupied)
            )

    enumerated = list(cutset.enumerate_omcut(box, x))
    rep.check("every realised Break is enumerated").record(
        set(groups) <= set(enumerated), "a realised Break is missing from the enumeration"
    )
    for gamma in enumerated:
        st = cutset.stats(gamma)
        rep.check("enumerated cutsets are minimal and odd").record(cutset.is_omcut(gamma), repr(gamma))
        rep.check("E0, E1 connected in G^2").record(
            connected_in_power(gamma.e0, 2) and connected_in_power(gamma.e1, 2), repr(gamma)
        )
        rep.check("direction counts sum to |G|").record(sum(st.gamma_j) == st.L, repr(gamma))
        rep.check("|E1,j| = |G^j| and |G_r^j| <= |G^j|").record(
            st.e1_j == st.gamma_j and all(r <= g for r, g in zip(st.gamma_r_j, st.gamma_j)), repr(gamma)
        )
        rep.check("P(v) + P(w) >= 2d on cutset edges").record(
            all(gamma.p(v) + gamma.p(w) >= two_d for v, w in gamma.edges), repr(gamma)
        )
        ok = True
        for delta in (0, 1):
            inside = (lambda u: u in gamma.a1) if delta else (lambda u: u not in gamma.a1)
            for v in gamma.boundary_set(delta):
                for j in range(1, two_d + 1):
                    w = step(v, j)
                    if inside(w) and not all(inside(u) for u in neighbors(w)):
                        ok = False
        rep.check("neighbours of inward steps stay on the same side").record(ok, repr(gamma))

    grid = {v: list(Box(2, 2).adjacency[v]) for v in Box(2, 2).vertices}
    delta = cutset.max_degree(grid)
    for M in range(1, 6):
        c = cutset.count_connected_sets(grid, (0, 0), M)
        rep.check("connected set count <= Delta^(2M-2)").record(c <= delta ** (2 * M - 2), f"M={M}: {c}")
    return rep


def transforms_suite(d: int = 2, n: int = 2, lambdas: Iterable = DEFAULT_LAMBDAS, x=None) -> Report:
    check_guard(d, n)
    box = Box(d, n)
    x = tuple(x) if x is not None else (0,) * d
    lambdas = [parse_activity(v) for v in lambdas]
    rep = Report("transforms", {"d": d, "n": n, "x": list(x), "lambdas": [str(v) for v in lambdas]})
    groups = _realised(box, x)
    t1_seen: dict = {}
    t2_seen: dict = {}

    for gamma, omegas in groups.items():
        for omega in omegas:
            fam1 = transform.t1_images(omega, x)
            fam2, rec = transform.t2_images(omega, x)
            j1, j2 = fam1.base.j, rec.j
            for j in range(1, 2 * d + 1):
                sh = transform.shift(omega, x, j, gamma)
                rep.check("shift preserves the occupation count").record(
                    len(sh.output.occupied) == len(omega.occupied), repr(omega.occupied)
                )
                rep.check("shift output respects the boundary condition").record(
                    satisfies_bc(sh.output, BoundaryCondition.ODD), repr(omega.occupied)
                )
                rep.check("gap around E1,j after shift").record(
                    all(sh.output[u] == 0 for v in gamma.e1_j(j) for u in neighbors(v)), repr(omega.occupied)
                )
            members1 = list(fam1)
            members2 = list(fam2)
            rep.check("image families respect the boundary condition").record(
                all(satisfies_bc(m, BoundaryCondition.ODD) for m in members1 + members2), repr(omega.occupied)
            )
            rep.check("X_j within E1,j,x").record(rec.erased <= gamma.e1_jx(j2), repr(omega.occupied))
            for lam in lambdas:
                w = weight(omega, lam)
                s1 = sum((weight(m, lam) for m in members1), Fraction(0))
                rep.check("T1 weight identity").record(
                    s1 == (1 + lam) ** len(gamma.gamma_j(j1)) * w and s1 == fam1.total_weight(lam),
                    lambda: f"lam={lam} {omega.occupied}",
                )
                s2 = sum((weight(m, lam) for m in members2), Fraction(0))
                rep.check("T2 weight identity").record(
                    s2 * lam ** len(rec.erased) == (1 + lam) ** len(gamma.gamma_r_j(j2)) * w,
                    lambda: f"lam={lam} {omega.occupied}",
                )
            E = gamma.e1 - gamma.e1_exposed
            for m in members1:
                rep.check("T1 round trip").record(transform.invert_t1(gamma, m) == omega, repr(m.occupied))
                key = (gamma, m.occupied)
                rep.check("T1 preimages are unique").record(t1_seen.setdefault(key, omega) == omega, repr(key))
            for m in members2:
                rep.check("T2 round trip").record(
                    transform.invert_t2(E, rec.erased, m, x) == omega, repr(m.occupied)
                )
                key = (E, rec.erased, m.occupied)
                rep.check("T2 preimages are unique").record(t2_seen.setdefault(key, omega) == omega, repr(key))
            bad = frozenset(gamma.e1_jx(j2)) | {step(next(iter(gamma.e1)), 1, 5)}
            rep.check("T2 inversion rejects X outside E1,j,x").record(
                transform.invert_t2(E, bad, members2[0], x) is None, repr(omega.occupied)
            )

    for lam in lambdas:
        table = transform.break_distribution(box, x, lam)
        for gamma in table:
            bound = transform.break_probability_bound(gamma, lam, table=table)
            rep.check("Break probability bound").record(bound.holds, lambda: f"lam={lam} {gamma!r}")
    return rep


def approx_suite(
    d: int = 2,
    n: int = 2,
    epsilons: Iterable = DEFAULT_EPSILONS,
    seeds: int = 100,
    seed: int = 0,
    x=None,
) -> Report:
    check_guard(d, n)
    box = Box(d, n)
    x = tuple(x) if x is not None else (0,) * d
    epsilons = [cutset._as_fraction(e) for e in epsilons]
    rep = Report(
        "approx",
        {"d": d, "n": n, "x": list(x), "epsilons": [str(e) for e in epsilons], "seeds": seeds, "seed": seed,
         "regime": approx.EXTENDED},
    )
    cutsets = list(cutset.enumerate_omcut(box, x))
    two_d = 2 * d
    for gamma in cutsets:
        for eps in epsilons:
            for delta in (0, 1):
                for v in gamma.boundary_set(delta):
                    us = approx.u_sets(gamma, delta, v, eps)
                    p = gamma.p(v)
                    rep.check("|U1(v)| lower bound").record(
                        len(us.u1) >= p * (two_d - p) - min(p, two_d - p), lambda: f"{gamma!r} {v}"
                    )
                    rep.check("P(w) < sqrt(eps d) on U3(v)").record(
                        all(gamma.p(w) ** 2 < eps * d for w in us.u3), lambda: f"{gamma!r} {v}"
                    )
            for s in range(seed, seed + seeds):
                ds = approx.dominating_sets(gamma, eps, s, regime=approx.EXTENDED)
                pair = (ds.e0t, ds.e1t)
                rep.check("E_t within the boundary sets").record(
                    ds.e0t <= gamma.e0 and ds.e1t <= gamma.e1, lambda: f"{gamma!r} seed={s}"
                )
                rep.check("predicate (b)").record(approx.predicate_b(gamma, ds.e1t, eps), lambda: f"seed={s}")
                rep.check("predicate (c)").record(
                    all(approx.predicate_c(gamma, dl, pair[dl], eps) for dl in (0, 1)), lambda: f"seed={s}"
                )
                rep.check("predicate (d)").record(
                    all(approx.predicate_d(gamma, dl, pair[1 - dl], eps) for dl in (0, 1)), lambda: f"seed={s}"
                )
                rep.check("G^8 connectivity").record(
                    all(approx.g8_connectivity(gamma, ds.e0t, ds.e1t, v) for v in gamma.e1), lambda: f"seed={s}"
                )
                E = approx.interior_approx(approx.ApproxInput.from_cutset(gamma, ds))
                rep.check("low-degree E1 inside E inside A1").record(
                    approx.satisfies_approx_chain(E, gamma, eps), lambda: f"{gamma!r} seed={s}"
                )
                rep.check("output is an interior approximation").record(
                    approx.is_interior_approx(E, gamma), lambda: f"{gamma!r} seed={s}"
                )

    # N(R, E) census over singletons and adjacent pairs of boundary vertices
    instances = set()
    for gamma in cutsets:
        bverts = sorted(gamma.e0 | gamma.e1, key=box.index)
        instances.update((v,) for v in bverts)
        instances.update(
            (v, w) for v, w in itertools.combinations(bverts, 2) if sum(abs(a - b) for a, b in zip(v, w)) <= 2
        )
    for E in sorted(instances, key=lambda t: [box.index(v) for v in t]):
        for R in range(0, 5):
            c = approx.census_ngamma(R, E, box, x)
            rep.check("N(R,E) <= (2d)^(2R)").record(c <= two_d ** (2 * R), lambda: f"R={R} E={E}: {c}")
    return rep


def run_suite(name: str, d: int, n: int, *, lambdas=DEFAULT_LAMBDAS, seed: int = 0, seeds: int = 100) -> list[Report]:
    if name == "all":
        check_guard(d, n)
        names = SUITES
    elif name in SUITES:
        names = (name,)
    else:
        raise ValueError(f"unknown suite {name!r}")
    out = []
    for s in names:
        if s == "props":
            out.append(props_suite(d, n))
        elif s == "transforms":
            out.append(transforms_suite(d, n, lambdas))
        else:
            out.append(approx_suite(d, n, seeds=seeds, seed=seed))
    return out
