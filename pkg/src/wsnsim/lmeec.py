"""LMEEC cluster-head election, cluster formation, relay choice and TDMA slots.

All functions are pure: they take the current per-node view (layers, alive
neighbor sets, residual energies) and return decisions. The simulation engine
owns the energy side effects.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .topology import BASE_STATION

CLUSTER_HEAD = "cluster_head"
MEMBER = "member"
ORPHAN = "orphan"


class SingletonCluster(ValueError):
    """A head with no alive neighbors has nobody to announce to."""


@dataclass(frozen=True)
class LmeecParams:
    alpha: float = 0.5
    beta: float = 0.5
    gamma: float = 0.5
    threshold_base: float = 0.76
    abs_degree_term: bool = False
    alpha_by_layer: Mapping[int, float] = field(default_factory=dict)
    beta_by_layer: Mapping[int, float] = field(default_factory=dict)
    gamma_by_layer: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for a in (self.alpha, *self.alpha_by_layer.values()):
            if not 0 <= a < 1:
                raise ValueError("alpha must lie in [0, 1)")
        for b in (self.beta, *self.beta_by_layer.values()):
            if not 0 <= b <= 1:
                raise ValueError("beta must lie in [0, 1]")
        for g in (self.gamma, *self.gamma_by_layer.values()):
            if not 0 <= g <= 1:
                raise ValueError("gamma must lie in [0, 1]")

    def coefficients(self, layer: int) -> tuple[float, float, float]:
        """(alpha, beta, gamma) in effect for nodes of ``layer``."""
        return (
            self.alpha_by_layer.get(layer, self.alpha),
            self.beta_by_layer.get(layer, self.beta),
            self.gamma_by_layer.get(layer, self.gamma),
        )


@dataclass
class NodeProtocolState:
    node: int
    layer: int
    degree: int
    num_ch: int = 0
    role: str = ORPHAN


@dataclass
class ClusterAssignment:
    head: int
    members: tuple[int, ...] = ()
    relay: int | None = None
    tdma: dict[int, int] = field(default_factory=dict)
    aggregates: bool = True

    @property
    def size(self) -> int:
        return len(self.members)


def compute_election_weight(
    state: NodeProtocolState,
    e_res: float,
    e_total: float,
    n_total: int,
    params: LmeecParams,
) -> float:
    """Self-election weight of a node.

    ``1/(alpha-L) * deg/N + 1/(beta+L) * E_res/E_total - gamma*(1 - 1/(1+num_CH))``

    With alpha < 1 the degree coefficient is negative for every layer; pass
    ``abs_degree_term=True`` in ``params`` to use ``1/|alpha-L|`` instead.
    """
    L = state.layer
    if L < 1:
        raise ValueError(f"node {state.node} has no layer; it cannot self-elect")
    if n_total < 1 or e_total <= 0:
        raise ValueError("n_total must be >= 1 and e_total > 0")
    alpha, beta, gamma = params.coefficients(L)
    degree_coef = 1.0 / (alpha - L)
    if params.abs_degree_term:
        degree_coef = abs(degree_coef)
    return (
        degree_coef * (state.degree / n_total)
        + (1.0 / (beta + L)) * (e_res / e_total)
        - gamma * (1.0 - 1.0 / (1 + state.num_ch))
    )


def election_threshold(layer: int, params: LmeecParams) -> float:
    if layer < 1:
        raise ValueError("layer must be >= 1")
    return params.threshold_base / layer


def elect_cluster_heads(
    states: Mapping[int, NodeProtocolState],
    residual: Mapping[int, float],
    e_total: float,
    n_total: int,
    params: LmeecParams,
    neighbors: Mapping[int, frozenset[int]],
) -> set[int]:
    """Cluster heads for this round.

    A node elects itself when its weight reaches its layer's threshold. Any
    node left without an elected node in its closed neighborhood is then
    promoted, taking candidates by descending weight (ties: smaller id), so
    that every participant hears at least one announcement.

    ``states`` and ``neighbors`` must cover exactly the alive, layered nodes,
    with neighbor sets restricted to that population.
    """
    weights = {
        i: compute_election_weight(s, residual[i], e_total, n_total, params) for i, s in states.items()
    }
    heads = {i for i, w in weights.items() if w >= election_threshold(states[i].layer, params)}
    for i in sorted(states, key=lambda k: (-weights[k], k)):
        if i in heads or heads.intersection(neighbors[i]):
            continue
        heads.add(i)
    return heads


def compute_announcement_weight(e_res: float, degree: int, layer: int) -> float:
    """Weight a head advertises: ``E_res / deg * L``."""
    if degree < 1:
        raise SingletonCluster("head has no alive neighbors")
    return e_res / degree * layer


def form_clusters(
    heads,
    announcements: Mapping[int, tuple[float, int]],
    neighbors: Mapping[int, frozenset[int]],
) -> list[ClusterAssignment]:
    """Attach every non-head participant to the best announced head it hears.

    ``announcements`` maps head -> (announced weight, head layer); heads that
    did not announce (no neighbors) still get a singleton cluster. Preference
    order: larger weight, then higher layer, then smaller head id. Relays are
    left unset.
    """
    heads = set(heads)
    chosen: dict[int, list[int]] = {h: [] for h in heads}
    for i in sorted(neighbors):
        if i in heads:
            continue
        heard = [h for h in neighbors[i] if h in announcements]
        if not heard:
            continue
        best = min(heard, key=lambda h: (-announcements[h][0], -announcements[h][1], h))
        chosen[best].append(i)
    clusters = []
    for h in sorted(heads):
        members = tuple(sorted(chosen[h]))
        clusters.append(ClusterAssignment(head=h, members=members, tdma=build_tdma_schedule(members)))
    return clusters


def select_relay(
    node: int,
    heads,
    layer: Mapping[int, int],
    neighbors: Mapping[int, frozenset[int]],
    residual: Mapping[int, float],
) -> int:
    """Next hop toward the base station for a head (or a forwarder).

    Layer-1 nodes send straight to the base station. Otherwise prefer adjacent
    heads of a lower layer, then any lower-layer neighbor as a plain forwarder;
    both ranked by (lowest layer, most residual energy, smallest id). A node
    with neither falls back to a direct long-haul transmission.
    """
    L = layer[node]
    if L == 1:
        return BASE_STATION
    lower = [j for j in neighbors[node] if j in layer and layer[j] < L]
    rank = lambda j: (layer[j], -residual[j], j)  # noqa: E731
    adjacent_heads = [j for j in lower if j in heads]
    if adjacent_heads:
        return min(adjacent_heads, key=rank)
    if lower:
        return min(lower, key=rank)
    return BASE_STATION


def relay_routes(clusters, heads, layer, neighbors, residual) -> dict[int, int]:
    """Next-hop map covering every head and every forwarder on their paths."""
    nxt: dict[int, int] = {}
    for c in clusters:
        node = c.head
        while node != BASE_STATION and node not in nxt:
            nxt[node] = select_relay(node, heads, layer, neighbors, residual)
            node = nxt[node]
        c.relay = nxt[c.head]
    return nxt


def build_tdma_schedule(members) -> dict[int, int]:
    return {m: slot for slot, m in enumerate(sorted(members))}
