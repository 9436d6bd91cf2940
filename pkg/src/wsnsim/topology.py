"""Node deployment, unit-disk neighbor graph and hop-count layering."""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .energy import RadioParams, rx_cost, tx_cost

BASE_STATION = -1
BROADCAST = -2


class DegenerateTopologyWarning(UserWarning):
    """Some nodes cannot reach the base station."""


@dataclass(frozen=True)
class TopologyParams:
    field_width: float = 100.0
    field_height: float = 100.0
    comm_range: float = 25.0
    bs_x: float = 50.0
    bs_y: float = 50.0
    reconfigure_every_round: bool = True

    def __post_init__(self):
        if self.field_width <= 0 or self.field_height <= 0:
            raise ValueError("field dimensions must be positive")
        if self.comm_range <= 0:
            raise ValueError("comm_range must be positive")

    @property
    def base_station(self) -> tuple[float, float]:
        return (self.bs_x, self.bs_y)


@dataclass
class NetworkTopology:
    positions: np.ndarray
    base_station: tuple[float, float]
    comm_range: float
    adjacency: list[frozenset[int]]
    layer: dict[int, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.positions)

    def distance(self, i: int, j: int) -> float:
        """Euclidean distance between two nodes; ``BASE_STATION`` is allowed."""
        a = self.base_station if i == BASE_STATION else self.positions[i]
        b = self.base_station if j == BASE_STATION else self.positions[j]
        return float(np.hypot(a[0] - b[0], a[1] - b[1]))

    def bs_distances(self) -> np.ndarray:
        bx, by = self.base_station
        return np.hypot(self.positions[:, 0] - bx, self.positions[:, 1] - by)

    def unreachable(self) -> list[int]:
        return [i for i in range(self.n) if i not in self.layer]


def deploy_uniform(n: int, width: float = 100.0, height: float = 100.0, rng_seed: int = 0) -> np.ndarray:
    """Draw ``n`` positions uniformly over a ``width`` x ``height`` field.

    Returns an ``(n, 2)`` array; row ``i`` is the position of node ``i``.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if width <= 0 or height <= 0:
        raise ValueError("field dimensions must be positive")
    rng = np.random.default_rng(rng_seed)
    return rng.uniform((0.0, 0.0), (width, height), size=(n, 2))


def build_adjacency(positions, comm_range: float) -> list[frozenset[int]]:
    if comm_range <= 0:
        raise ValueError("comm_range must be positive")
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    within = dist <= comm_range
    np.fill_diagonal(within, False)
    return [frozenset(np.flatnonzero(row).tolist()) for row in within]


def make_topology(positions, params: TopologyParams) -> NetworkTopology:
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    topo = NetworkTopology(
        positions=positions,
        base_station=params.base_station,
        comm_range=params.comm_range,
        adjacency=build_adjacency(positions, params.comm_range),
    )
    topo.layer = assign_layers(topo)
    return topo


def assign_layers(topology: NetworkTopology, alive=None, warn: bool = True) -> dict[int, int]:
    """Hop count of every node from the base station (layer 1 = in BS range).

    Mirrors a Hello flood: the base station reaches everything within range,
    then each newly reached node rebroadcasts once. Nodes not in ``alive``
    (a set of ids, default all) neither relay nor get a layer. Unreachable
    nodes are left out of the returned map.
    """
    n = topology.n
    if alive is None:
        alive = range(n)
    alive = set(alive)
    bs_d = topology.bs_distances()
    layer: dict[int, int] = {}
    queue: deque[int] = deque()
    for i in sorted(alive):
        if bs_d[i] <= topology.comm_range:
            layer[i] = 1
            queue.append(i)
    while queue:
        i = queue.popleft()
        for j in sorted(topology.adjacency[i]):
            if j in alive and j not in layer:
                layer[j] = layer[i] + 1
                queue.append(j)
    if warn and len(layer) < len(alive):
        missing = len(alive) - len(layer)
        warnings.warn(f"{missing} node(s) cannot reach the base station", DegenerateTopologyWarning, stacklevel=2)
    return dict(sorted(layer.items()))


@dataclass(frozen=True)
class Debit:
    actor: int
    action: str
    joules: float
    peer: int


def hello_energy_accounting(topology: NetworkTopology, radio: RadioParams, layer=None) -> list[Debit]:
    """Energy debits of one Hello flood, returned in flooding order.

    Every layered node rebroadcasts once at full range; every layered node pays
    one reception per layered neighbor. ``layer`` defaults to the topology's own
    layer map (pass the current-round map when nodes have died).
    """
    if layer is None:
        layer = topology.layer
    bits = radio.control_bits
    e_tx = tx_cost(bits, topology.comm_range, radio)
    e_rx = rx_cost(bits, radio)
    debits = []
    for i in sorted(layer, key=lambda k: (layer[k], k)):
        debits.append(Debit(i, "hello_tx", e_tx, BROADCAST))
        for j in sorted(topology.adjacency[i]):
            if j in layer:
                debits.append(Debit(j, "hello_rx", e_rx, i))
    return debits
