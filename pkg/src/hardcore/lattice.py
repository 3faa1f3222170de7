"""Finite boxes of the integer lattice Z^d.

Vertices are plain integer tuples. Directions are numbered 1..2d with
``f_{2i-1} = +e_i`` and ``f_{2i} = -e_i``; every tie-break elsewhere in the
package ("smallest index j") depends on this order.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

Vertex = tuple[int, ...]

EVEN = "even"
ODD = "odd"


class Direction(NamedTuple):
    index: int  # 1..2d
    axis: int  # 1..d
    sign: int  # +1 or -1

    def vector(self, d: int) -> Vertex:
        return tuple(self.sign if k == self.axis - 1 else 0 for k in range(d))


def direction(j: int, d: int) -> Direction:
    if not 1 <= j <= 2 * d:
        raise ValueError(f"direction index {j} outside [1, {2 * d}]")
    return Direction(j, (j + 1) // 2, 1 if j % 2 else -1)


def directions(d: int) -> list[Direction]:
    return [direction(j, d) for j in range(1, 2 * d + 1)]


def step(v: Vertex, j: int, times: int = 1) -> Vertex:
    """Return ``v + times * f_j``."""
    axis = (j - 1) // 2
    delta = times if j % 2 else -times
    return v[:axis] + (v[axis] + delta,) + v[axis + 1 :]


def parity(v: Sequence[int]) -> str:
    return EVEN if sum(v) % 2 == 0 else ODD


def is_even(v: Sequence[int]) -> bool:
    return sum(v) % 2 == 0


def graph_distance(v: Sequence[int], w: Sequence[int]) -> int:
    if len(v) != len(w):
        raise ValueError("dimension mismatch")
    return sum(abs(a - b) for a, b in zip(v, w))


@dataclass(frozen=True)
class Box:
    """The box ``[-n, n]^d`` with its nearest-neighbour graph."""

    d: int
    n: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.n < 1:
            raise ValueError("radius must be >= 1")

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        # itertools.product is row-major, so position == linear index
        r = range(-self.n, self.n + 1)
        return tuple(itertools.product(r, repeat=self.d))

    @cached_property
    def _index(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def __len__(self) -> int:
        return (2 * self.n + 1) ** self.d

    def index(self, v: Vertex) -> int:
        return self._index[tuple(v)]

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.d:
            raise ValueError(f"vertex {tuple(v)} has dimension {len(v)}, box has {self.d}")
        return all(-self.n <= c <= self.n for c in v)

    def on_boundary(self, v: Sequence[int]) -> bool:
        return self.contains(v) and any(abs(c) == self.n for c in v)

    @cached_property
    def boundary(self) -> frozenset[Vertex]:
        return frozenset(v for v in self.vertices if any(abs(c) == self.n for c in v))

    def neighbors(self, v: Vertex, mode: str = "in-box") -> list[Vertex]:
        return neighbors(v, self, mode)

    @cached_property
    def adjacency(self) -> dict[Vertex, tuple[Vertex, ...]]:
        """In-box neighbours of every vertex, in direction order."""
        return {v: tuple(neighbors(v, self, "in-box")) for v in self.vertices}

    @cached_property
    def edges(self) -> tuple[tuple[Vertex, Vertex], ...]:
        """All box edges as ``(v, v + e_i)`` pairs, lexicographically smaller first."""
        out = []
        for v in self.vertices:
            for j in range(1, 2 * self.d + 1, 2):
                w = step(v, j)
                if self.contains(w):
                    out.append((v, w))
        return tuple(out)

    def to_json(self) -> dict:
        return {"d": self.d, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "Box":
        return cls(int(obj["d"]), int(obj["n"]))


def neighbors(v: Vertex, box: Box | None = None, mode: str = "infinite") -> list[Vertex]:
    """Neighbours of ``v`` in ``f_j`` order.

    ``mode="in-box"`` drops neighbours outside ``box`` while keeping the order.
    """
    v = tuple(v)
    if mode not in ("infinite", "in-box"):
        raise ValueError(f"unknown neighbour mode {mode!r}")
    if box is not None and len(v) != box.d:
        raise ValueError(f"vertex {v} has dimension {len(v)}, box has {box.d}")
    out = [step(v, j) for j in range(1, 2 * len(v) + 1)]
    if mode == "in-box":
        if box is None:
            raise ValueError("in-box mode needs a box")
        if not box.contains(v):
            raise ValueError(f"{v} is not in the box")
        out = [w for w in out if box.contains(w)]
    return out


def boundary_set(box: Box) -> frozenset[Vertex]:
    return box.boundary


def component(box: Box, sources: Iterable[Vertex], blocked: Iterable[Vertex] = ()) -> set[Vertex]:
    """Vertices of ``box`` reachable from ``sources`` without entering ``blocked``."""
    blocked = set(blocked)
    adj = box.adjacency
    seen = {s for s in sources if s not in blocked}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen and w not in blocked:
                seen.add(w)
                queue.append(w)
    return seen


def connected_in_power(S: Iterable[Sequence[int]], k: int) -> bool:
    """True iff ``S`` is connected when vertices at L1 distance <= k are joined."""
    if k < 1:
        raise ValueError("power must be positive")
    pts = list(dict.fromkeys(tuple(v) for v in S))
    if len(pts) <= 1:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(len(pts)):
            if j not in seen and graph_distance(pts[i], pts[j]) <= k:
                seen.add(j)
                queue.append(j)
    return len(seen) == len(pts)
