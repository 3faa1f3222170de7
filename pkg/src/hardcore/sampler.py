"""Heat-bath Glauber dynamics and monotone coupling from the past.

States are ``int8`` arrays indexed like ``box.vertices``. Updates touch only
non-clamped vertices; a site becomes occupied with probability
``lam / (1 + lam)`` when none of its neighbours is occupied, otherwise it is
emptied. This is monotone for the parity order (even sites up, odd sites
down), so two extremal chains sandwich every other one.

Randomness for CFTP is keyed by ``(seed, sample index, block)``. Block 0
covers the last sweep before time 0 and block ``k >= 1`` covers
``[-2^k, -2^(k-1))`` sweeps, so each doubling reuses every older block
bit for bit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction

import numpy as np

from .cutset import EdgeCutset
from .gibbs import BoundaryCondition, Configuration, as_bc, clamped_vertices, parse_activity
from .kernels import BACKEND, run_coupled, run_updates
from .lattice import Box, Vertex, is_even, neighbors
from .rng import GLAUBER, MONOTONICITY, stream

MAX_SWEEPS = 2**24
CHUNK = 2**20  # steps drawn per generator call
CACHE_STEPS = 2**22  # blocks up to this many steps are kept between epochs


class CoalescenceError(RuntimeError):
    def __init__(self, epoch: int, sweeps: int):
        super().__init__(f"no coalescence after epoch {epoch} ({sweeps} sweeps)")
        self.epoch = epoch
        self.sweeps = sweeps


@dataclass(frozen=True)
class Lattice:
    """Array view of a box under a boundary condition."""

    box: Box
    bc: BoundaryCondition
    nbr: np.ndarray  # (N, 2d) int32, -1 outside the box
    sites: np.ndarray  # updatable (non-clamped) vertex indices
    clamped: np.ndarray  # bool mask
    even: np.ndarray  # bool mask

    @classmethod
    def build(cls, box: Box, bc) -> "Lattice":
        bc = as_bc(bc)
        idx = box.index
        nbr = np.full((len(box), 2 * box.d), -1, dtype=np.int32)
        for i, v in enumerate(box.vertices):
            for k, w in enumerate(neighbors(v)):
                if w in box.adjacency:
                    nbr[i, k] = idx(w)
        cl = clamped_vertices(box, bc)
        clamped = np.array([v in cl for v in box.vertices], dtype=bool)
        even = np.array([is_even(v) for v in box.vertices], dtype=bool)
        sites = np.flatnonzero(~clamped).astype(np.int32)
        return cls(box, bc, nbr, sites, clamped, even)

    @property
    def sweep(self) -> int:
        return len(self.sites)

    def to_array(self, omega: Configuration) -> np.ndarray:
        a = np.zeros(len(self.box), dtype=np.int8)
        for v in omega.occupied:
            a[self.box.index(v)] = 1
        return a

    def to_configuration(self, a: np.ndarray) -> Configuration:
        verts = self.box.vertices
        return Configuration(self.box, frozenset(verts[i] for i in np.flatnonzero(a)))

    def _blocked_by(self, mask: np.ndarray) -> np.ndarray:
        # vertices with a neighbour in ``mask``
        padded = np.append(mask, False)
        return padded[self.nbr].any(axis=1)

    @cached_property
    def _extremes(self) -> tuple[np.ndarray, np.ndarray]:
        blocked = self._blocked_by(self.clamped)
        top = (self.clamped | (self.even & ~blocked)).astype(np.int8)
        bottom = (self.clamped | (~self.even & ~self.clamped & ~blocked)).astype(np.int8)
        return top, bottom

    def top(self) -> np.ndarray:
        """Maximal state: clamps, then every even vertex they allow."""
        return self._extremes[0].copy()

    def bottom(self) -> np.ndarray:
        """Minimal state: clamps, then every odd vertex they allow."""
        return self._extremes[1].copy()


def accept_probability(lam) -> float:
    lam = parse_activity(lam)
    return float(lam / (1 + lam))


def _draws(gen: np.random.Generator, n_sites: int, steps: int):
    """Yield ``(sites, uniforms)`` chunks covering ``steps`` updates."""
    done = 0
    while done < steps:
        m = min(CHUNK, steps - done)
        picks = gen.integers(0, n_sites, size=m, dtype=np.int32)
        u = gen.random(m)
        yield picks, u
        done += m


@dataclass(frozen=True)
class ChainState:
    configuration: Configuration
    steps: int
    rng_state: dict = field(compare=False, repr=False)

    @classmethod
    def start(cls, omega: Configuration, seed: int) -> "ChainState":
        gen = stream(seed, 0, GLAUBER)
        return cls(omega, 0, gen.bit_generator.state)


def glauber_run(state: ChainState, lam, bc, steps: int) -> ChainState:
    """Advance ``steps`` single-site heat-bath updates."""
    lat = Lattice.build(state.configuration.box, bc)
    gen = np.random.Generator(np.random.Philox())
    gen.bit_generator.state = state.rng_state
    a = lat.to_array(state.configuration)
    p = accept_probability(lam)
    for picks, u in _draws(gen, lat.sweep, steps):
        run_updates(a, lat.nbr, lat.sites[picks], u, p)
    return ChainState(lat.to_configuration(a), state.steps + steps, gen.bit_generator.state)


def glauber_step(state: ChainState, lam, bc) -> ChainState:
    return glauber_run(state, lam, bc, 1)


def _block_steps(block: int, sweep: int) -> int:
    return sweep if block == 0 else sweep * 2 ** (block - 1)


def cftp_array(lat: Lattice, lam, seed: int, index: int = 0, *, max_sweeps: int = MAX_SWEEPS):
    """Exact sample as an array, with the number of sweeps that coalesced."""
    p = accept_probability(lam)
    sweep = lat.sweep
    if sweep == 0:
        return lat.top(), 0
    cache: dict[int, list] = {}
    cached = 0
    epoch = 0
    while True:
        sweeps = 2**epoch
        top, bottom = lat.top(), lat.bottom()
        for block in range(epoch, -1, -1):
            chunks = cache.get(block)
            if chunks is None:
                steps = _block_steps(block, sweep)
                chunks = ((lat.sites[k], u) for k, u in _draws(stream(seed, index, block), sweep, steps))
                if cached + steps <= CACHE_STEPS:
                    chunks = cache[block] = list(chunks)
                    cached += steps
            for sites, u in chunks:
                run_coupled(top, bottom, lat.nbr, sites, u, p)
        if np.array_equal(top, bottom):
            return top, sweeps
        epoch += 1
        if 2**epoch > max_sweeps:
            raise CoalescenceError(epoch - 1, sweeps)


def cftp_sample(box: Box, bc, lam, seed: int, *, index: int = 0, max_sweeps: int = MAX_SWEEPS) -> Configuration:
    lat = Lattice.build(box, bc)
    a, _ = cftp_array(lat, lam, seed, index, max_sweeps=max_sweeps)
    return lat.to_configuration(a)


@dataclass(frozen=True)
class EstimateRecord:
    target: str
    estimate: float
    samples: int
    stderr: float
    seed: int
    d: int
    n: int
    lam: Fraction
    bc: str
    x: Vertex
    failures: int = 0

    CSV_HEADER = ("target", "estimate", "samples", "stderr", "seed", "d", "n", "lambda", "bc", "x", "failures")

    def csv_row(self) -> list:
        return [
            self.target,
            f"{self.estimate:.10g}",
            self.samples,
            f"{self.stderr:.10g}",
            self.seed,
            self.d,
            self.n,
            str(self.lam),
            self.bc,
            " ".join(map(str, self.x)),
            self.failures,
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        w.writerow(self.csv_row())
        return buf.getvalue()


def estimate_occupancy(
    box: Box, bc, lam, x: Vertex, N: int, seed: int, *, max_sweeps: int = MAX_SWEEPS
) -> EstimateRecord:
    """Fraction of ``N`` independent exact samples with ``x`` occupied."""
    if N < 1:
        raise ValueError("N must be at least 1")
    x = tuple(x)
    lat = Lattice.build(box, bc)
    i = box.index(x)
    hits = 0
    failures = 0
    for k in range(N):
        try:
            a, _ = cftp_array(lat, lam, seed, k, max_sweeps=max_sweeps)
        except CoalescenceError:
            failures += 1
            continue
        hits += int(a[i])
    ok = N - failures
    phat = hits / ok if ok else float("nan")
    se = math.sqrt(phat * (1 - phat) / ok) if ok else float("nan")
    return EstimateRecord(
        target=f"P(omega({','.join(map(str, x))})=1)",
        estimate=phat,
        samples=ok,
        stderr=se,
        seed=seed,
        d=box.d,
        n=box.n,
        lam=parse_activity(lam),
        bc=lat.bc.value,
        x=x,
        failures=failures,
    )


def precedes(lat: Lattice, a: np.ndarray, b: np.ndarray) -> bool:
    """Parity order: ``a <= b`` on even sites and ``a >= b`` on odd sites."""
    ev = lat.even
    return bool(np.all(a[ev] <= b[ev]) and np.all(a[~ev] >= b[~ev]))


def random_state(lat: Lattice, gen: np.random.Generator) -> np.ndarray:
    """A random feasible state respecting the clamps (greedy over a random order)."""
    a = lat.clamped.astype(np.int8)
    density = gen.random()
    for s in gen.permutation(lat.sites):
        if gen.random() < density and not any(w >= 0 and a[w] for w in lat.nbr[s]):
            a[s] = 1
    return a


def meet_join(lat: Lattice, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ev = lat.even
    lo = np.where(ev, a & b, a | b).astype(np.int8)
    hi = np.where(ev, a | b, a & b).astype(np.int8)
    return lo, hi


def chain_monotonicity_check(box: Box, bc, lam, trials: int, seed: int) -> bool:
    """One shared update applied to random ordered pairs never breaks the order."""
    lat = Lattice.build(box, bc)
    if lat.sweep == 0:
        return True
    gen = stream(seed, 0, MONOTONICITY)
    p = accept_probability(lam)
    for _ in range(trials):
        lo, hi = meet_join(lat, random_state(lat, gen), random_state(lat, gen))
        site = lat.sites[gen.integers(0, lat.sweep, size=1, dtype=np.int32)]
        u = gen.random(1)
        run_coupled(hi, lo, lat.nbr, site, u, p)
        if not precedes(lat, lo, hi):
            return False
    return True


# snapshots

SCALE = 10


def render_snapshot(omega: Configuration, gamma: EdgeCutset | None = None) -> dict:
    """Plot-ready document: boundary markers, occupied sites by parity, cutset as dual segments."""
    box = omega.box
    if box.d != 2:
        raise ValueError("snapshots need d = 2")
    n = box.n
    order = box.index
    doc = {
        "n": n,
        "boundary": [list(v) for v in sorted(box.boundary, key=order)],
        "even": [list(v) for v in sorted(omega.occupied, key=order) if is_even(v)],
        "odd": [list(v) for v in sorted(omega.occupied, key=order) if not is_even(v)],
        "cutset": [],
    }
    if gamma is not None:
        for v, w in gamma.sorted_edges():
            mx, my = (v[0] + w[0]) / 2, (v[1] + w[1]) / 2
            if v[0] != w[0]:  # horizontal edge, vertical dual segment
                seg = [mx, my - 0.5, mx, my + 0.5]
            else:
                seg = [mx - 0.5, my, mx + 0.5, my]
            doc["cutset"].append(seg)
    return doc


def snapshot_svg(doc: dict) -> str:
    n = doc["n"]
    size = (2 * n + 2) * SCALE

    def px(x, y):
        return (x + n + 1) * SCALE, (n + 1 - y) * SCALE

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    r = SCALE * 0.4
    for x, y in doc["boundary"]:
        cx, cy = px(x, y)
        lines.append(
            f'<rect class="boundary" x="{cx - r:g}" y="{cy - r:g}" width="{2 * r:g}" height="{2 * r:g}" '
            'fill="none" stroke="gray"/>'
        )
    for cls, colour in (("even", "#1f77b4"), ("odd", "#d62728")):
        for x, y in doc[cls]:
            cx, cy = px(x, y)
            lines.append(f'<circle class="{cls}" cx="{cx:g}" cy="{cy:g}" r="{r * 0.8:g}" fill="{colour}"/>')
    for x1, y1, x2, y2 in doc["cutset"]:
        a, b = px(x1, y1)
        c, e = px(x2, y2)
        lines.append(f'<line class="cutset" x1="{a:g}" y1="{b:g}" x2="{c:g}" y2="{e:g}" stroke="black" stroke-width="2"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def odd_fraction(omega: Configuration) -> float:
    """Share of odd box vertices that are occupied."""
    odd = [v for v in omega.box.vertices if not is_even(v)]
    return sum(omega[v] for v in odd) / len(odd)


__all__ = [
    "BACKEND",
    "ChainState",
    "CoalescenceError",
    "EstimateRecord",
    "Lattice",
    "accept_probability",
    "cftp_array",
    "cftp_sample",
    "chain_monotonicity_check",
    "estimate_occupancy",
    "glauber_run",
    "glauber_step",
    "meet_join",
    "odd_fraction",
    "precedes",
    "random_state",
    "render_snapshot",
    "snapshot_svg",
]
