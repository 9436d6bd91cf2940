"""LEACH baseline: rotating probabilistic heads, nearest-head joining, one hop to the sink."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lmeec import ClusterAssignment, build_tdma_schedule
from .topology import BASE_STATION


@dataclass(frozen=True)
class LeachParams:
    p: float = 0.05

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")

    @property
    def cycle(self) -> int:
        return cycle_length(self.p)


def cycle_length(p: float) -> int:
    # 1/p is meant as an integer period; guard against 1/0.05 -> 20.000000000000004
    return max(1, math.ceil(1.0 / p - 1e-9))


def leach_threshold(p: float, round_index: int, eligible: bool) -> float:
    if round_index < 0:
        raise ValueError("round must be >= 0")
    if not eligible:
        return 0.0
    return p / (1.0 - p * (round_index % cycle_length(p)))


@dataclass
class LeachRotation:
    """Who already served as head in the current rotation cycle."""

    p: float
    served: set[int] = field(default_factory=set)
    cycle_start: int = 0

    def eligible(self, node: int, round_index: int) -> bool:
        self._roll(round_index)
        return node not in self.served

    def record(self, heads, round_index: int):
        self._roll(round_index)
        self.served.update(heads)

    def _roll(self, round_index: int):
        start = round_index - round_index % cycle_length(self.p)
        if start != self.cycle_start:
            self.cycle_start = start
            self.served.clear()


def leach_elect(alive, rotation: LeachRotation, round_index: int, rng: np.random.Generator, n: int) -> set[int]:
    """Elect this round's heads among ``alive`` node ids.

    One uniform draw is consumed per deployed node every round, dead or not,
    so the random stream stays aligned across runs that lose nodes at
    different times.
    """
    draws = rng.random(n)
    heads = set()
    for i in sorted(alive):
        t = leach_threshold(rotation.p, round_index, rotation.eligible(i, round_index))
        if draws[i] < t:
            heads.add(i)
    rotation.record(heads, round_index)
    return heads


def leach_form_clusters(heads, alive, positions) -> list[ClusterAssignment]:
    """Each alive non-head joins its euclidean-nearest head (ties: smaller id).

    With no heads at all every alive node reports straight to the base station
    without aggregating.
    """
    pos = np.asarray(positions, dtype=float)
    alive = sorted(alive)
    if not heads:
        return [ClusterAssignment(head=i, relay=BASE_STATION, aggregates=False) for i in alive]
    head_ids = np.array(sorted(heads))
    chosen: dict[int, list[int]] = {int(h): [] for h in head_ids}
    for i in alive:
        if i in chosen:
            continue
        d = np.hypot(pos[head_ids, 0] - pos[i, 0], pos[head_ids, 1] - pos[i, 1])
        # argmin returns the first minimum, i.e. the smaller head id
        chosen[int(head_ids[int(np.argmin(d))])].append(i)
    return [
        ClusterAssignment(head=h, members=tuple(m), relay=BASE_STATION, tdma=build_tdma_schedule(m))
        for h, m in chosen.items()
    ]
