"""Compact, append-only simulation event log."""

from __future__ import annotations

import json
from array import array
from typing import NamedTuple

ACTIONS = (
    "hello_tx",
    "hello_rx",
    "announce_tx",
    "announce_rx",
    "join_tx",
    "join_rx",
    "data_tx",
    "data_rx",
    "aggregate",
    "forward_rx",
    "forward_tx",
    "death",
)
CODE = {name: code for code, name in enumerate(ACTIONS)}
DEATH = CODE["death"]


class Event(NamedTuple):
    time: float
    round: int
    actor: int
    action: str
    joules: float
    peer: int


class EventLog:
    """Columnar event store.

    ``level="all"`` keeps every energy debit; ``level="deaths"`` keeps only
    death records, which is all lifetime metrics need and saves a lot of memory
    on large sweeps.
    """

    def __init__(self, level: str = "all"):
        if level not in ("all", "deaths"):
            raise ValueError(f"unknown log level {level!r}")
        self.level = level
        self.time = array("d")
        self.round = array("l")
        self.actor = array("l")
        self.action = array("B")
        self.joules = array("d")
        self.peer = array("l")

    def append(self, time, round_index, actor, action, joules, peer):
        if self.level == "deaths" and action != DEATH:
            return
        self.time.append(time)
        self.round.append(round_index)
        self.actor.append(actor)
        self.action.append(action)
        self.joules.append(joules)
        self.peer.append(peer)

    def __len__(self):
        return len(self.time)

    def __getitem__(self, k) -> Event:
        return Event(self.time[k], self.round[k], self.actor[k], ACTIONS[self.action[k]], self.joules[k], self.peer[k])

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def slice(self, start: int, stop: int):
        return (self[k] for k in range(start, stop))

    def deaths(self) -> list[tuple[float, int]]:
        return [(self.time[k], self.actor[k]) for k in range(len(self)) if self.action[k] == DEATH]

    def total_joules(self) -> float:
        return sum(self.joules)

    def write_jsonl(self, fh):
        for e in self:
            fh.write(json.dumps(e._asdict()) + "\n")
