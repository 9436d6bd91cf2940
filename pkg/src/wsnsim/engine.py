"""Round-based simulation loop shared by both protocols.

Each round runs a configuration phase (LMEEC only), head election and cluster
formation with control packets charged to the radios, then a steady state of
sense ticks. Control phases take no simulated time; every tick, each member
sends one packet to its head in TDMA order, the head aggregates its own
reading with what it received and pushes one packet hop by hop to the sink.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import lmeec as lm
from .config import SimConfig
from .energy import EnergyLedger, aggregate_cost, rx_cost, tx_cost
from .events import CODE, DEATH, EventLog
from .leach import LeachRotation, leach_elect, leach_form_clusters
from .metrics import MetricsRecord, RoundMetrics, build_record
from .topology import (
    BASE_STATION,
    BROADCAST,
    NetworkTopology,
    assign_layers,
    build_adjacency,
    deploy_uniform,
    hello_energy_accounting,
)

HELLO_TX, HELLO_RX = CODE["hello_tx"], CODE["hello_rx"]
ANNOUNCE_TX, ANNOUNCE_RX = CODE["announce_tx"], CODE["announce_rx"]
JOIN_TX, JOIN_RX = CODE["join_tx"], CODE["join_rx"]
DATA_TX, DATA_RX = CODE["data_tx"], CODE["data_rx"]
AGGREGATE = CODE["aggregate"]
FORWARD_RX, FORWARD_TX = CODE["forward_rx"], CODE["forward_tx"]


@dataclass
class RoundState:
    round_index: int
    start_time: float
    alive: frozenset[int]
    layer: dict[int, int]
    heads: frozenset[int]
    clusters: list[lm.ClusterAssignment]
    next_hop: dict[int, int]
    tick_times: list[float] = field(default_factory=list)
    tick_generated: list[tuple[int, ...]] = field(default_factory=list)
    tick_delivered: list[tuple[int, ...]] = field(default_factory=list)
    event_span: tuple[int, int] = (0, 0)


class DeliveryReport(NamedTuple):
    fractions: list[float]
    generated: list[tuple[int, ...]]
    delivered: list[tuple[int, ...]]

    @property
    def mean(self) -> float:
        return float(np.mean(self.fractions)) if self.fractions else 1.0


def packet_delivery_check(round_state: RoundState) -> DeliveryReport:
    """Per tick, the share of alive sensors whose reading reached the sink."""
    fractions = [
        len(d) / len(g) if g else 1.0 for g, d in zip(round_state.tick_generated, round_state.tick_delivered)
    ]
    return DeliveryReport(fractions, list(round_state.tick_generated), list(round_state.tick_delivered))


class RunResult(NamedTuple):
    metrics: MetricsRecord
    events: EventLog
    rounds: list[RoundState]


class Simulator:
    """One simulation run. Instances share no state, so several may coexist."""

    def __init__(self, config: SimConfig, positions=None, log_level: str = "all", keep_rounds: bool = True):
        self.config = cfg = config
        tp = cfg.topology
        if positions is None:
            positions = deploy_uniform(cfg.n_nodes, tp.field_width, tp.field_height, cfg.seed)
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        self.n = len(positions)
        self.topology = NetworkTopology(
            positions=positions,
            base_station=tp.base_station,
            comm_range=tp.comm_range,
            adjacency=build_adjacency(positions, tp.comm_range),
        )
        self.topology.layer = assign_layers(self.topology, warn=False)
        self.disconnected = self.n - len(self.topology.layer)
        self.layer = dict(self.topology.layer)
        self.energy = EnergyLedger(self.n, cfg.initial_energy)
        self.events = EventLog(log_level)
        self.num_ch = [0] * self.n
        self.rng = np.random.default_rng([cfg.seed, 1])
        self.rotation = LeachRotation(cfg.leach.p)
        self.keep_rounds = keep_rounds
        self.rounds: list[RoundState] = []
        self.round_metrics: list[RoundMetrics] = []
        self._bs_dist = self.topology.bs_distances().tolist()
        self._pos = positions.tolist()
        radio = cfg.radio
        self._rx_data = rx_cost(radio.data_bits, radio)
        self._rx_ctrl = rx_cost(radio.control_bits, radio)

    # -- energy -----------------------------------------------------------

    def charge(self, node: int, joules: float, t: float, r: int, action: int, peer: int) -> bool:
        """Debit ``node`` and log it; False if the node died before finishing."""
        paid, done = self.energy.charge(node, joules)
        self.events.append(t, r, node, action, paid, peer)
        if self.energy.residual[node] <= 0:
            self.events.append(t, r, node, DEATH, 0.0, peer)
        return done

    def _dist(self, i: int, j: int) -> float:
        a = self._pos[i]
        if j == BASE_STATION:
            return self._bs_dist[i]
        b = self._pos[j]
        return ((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2) ** 0.5

    def _tx_data(self, i: int, j: int) -> float:
        return tx_cost(self.config.radio.data_bits, self._dist(i, j), self.config.radio)

    # -- rounds -----------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.config
        for r in range(cfg.n_rounds):
            if not any(self.energy.alive(i) for i in range(self.n)):
                break
            self.play_round(r)
        metrics = build_record(
            protocol=cfg.protocol,
            n=self.n,
            seed=cfg.seed,
            per_round=self.round_metrics,
            deaths=self.events.deaths(),
            dissipated=self.energy.dissipated,
            disconnected=self.disconnected,
        )
        return RunResult(metrics, self.events, self.rounds)

    def _time(self, tick: int) -> float:
        return round(tick * self.config.sense_interval, 9)

    def play_round(self, r: int) -> RoundState:
        cfg = self.config
        ticks = cfg.ticks_per_round
        t0 = self._time(r * ticks)
        first_event = len(self.events)
        dissipated_before = sum(self.energy.dissipated)
        alive = frozenset(i for i in range(self.n) if self.energy.alive(i))
        if cfg.protocol == "lmeec":
            state = self._lmeec_setup(r, t0, alive)
        else:
            state = self._leach_setup(r, t0, alive)
        self.steady_state(state, [self._time(r * ticks + k) for k in range(ticks)])
        state.event_span = (first_event, len(self.events))

        initial, residual, dissipated = self.energy.totals()
        sizes: dict[int, list[int]] = {}
        if cfg.protocol == "lmeec":
            for c in state.clusters:
                sizes.setdefault(state.layer[c.head], []).append(c.size)
        report = packet_delivery_check(state)
        self.round_metrics.append(
            RoundMetrics(
                round=r,
                time=t0,
                alive_count=sum(1 for i in range(self.n) if self.energy.alive(i)),
                dissipated_j=dissipated - dissipated_before,
                total_dissipated_j=dissipated,
                ch_count=len(state.heads),
                mean_cluster_size_by_layer={k: float(np.mean(v)) for k, v in sorted(sizes.items())},
                delivery=report.mean,
                energy_initial=initial,
                energy_residual=residual,
            )
        )
        if self.keep_rounds:
            self.rounds.append(state)
        return state

    def _lmeec_setup(self, r: int, t0: float, alive: frozenset[int]) -> RoundState:
        cfg, radio, topo = self.config, self.config.radio, self.topology
        res = self.energy.residual

        if cfg.topology.reconfigure_every_round or r == 0:
            self.layer = assign_layers(topo, alive, warn=False)
            failed = set()
            for d in hello_energy_accounting(topo, radio, self.layer):
                if res[d.actor] <= 0 or d.peer in failed:
                    continue
                action = HELLO_TX if d.action == "hello_tx" else HELLO_RX
                if not self.charge(d.actor, d.joules, t0, r, action, d.peer) and action == HELLO_TX:
                    failed.add(d.actor)
        layer = {i: L for i, L in self.layer.items() if res[i] > 0}
        neighbors = {i: frozenset(j for j in topo.adjacency[i] if j in layer) for i in layer}
        states = {
            i: lm.NodeProtocolState(i, layer[i], len(neighbors[i]), self.num_ch[i]) for i in layer
        }
        heads = lm.elect_cluster_heads(states, res, cfg.initial_energy, self.n, cfg.lmeec, neighbors)
        for h in heads:
            self.num_ch[h] += 1

        # announcements: one broadcast per head at full range, heard by alive neighbors
        announcements = {}
        e_tx = tx_cost(radio.control_bits, topo.comm_range, radio)
        for h in sorted(heads):
            if not neighbors[h] or res[h] <= 0:
                continue
            weight = lm.compute_announcement_weight(res[h], len(neighbors[h]), layer[h])
            if not self.charge(h, e_tx, t0, r, ANNOUNCE_TX, BROADCAST):
                continue
            announcements[h] = (weight, layer[h])
            for j in sorted(neighbors[h]):
                if res[j] > 0:
                    self.charge(j, self._rx_ctrl, t0, r, ANNOUNCE_RX, h)

        clusters = lm.form_clusters(heads, announcements, neighbors)
        self._joins(clusters, t0, r)
        next_hop = lm.relay_routes(clusters, heads, layer, neighbors, res)
        return RoundState(r, t0, alive, layer, frozenset(heads), clusters, next_hop)

    def _leach_setup(self, r: int, t0: float, alive: frozenset[int]) -> RoundState:
        radio = self.config.radio
        res = self.energy.residual
        heads = leach_elect(alive, self.rotation, r, self.rng, self.n)
        for h in heads:
            self.num_ch[h] += 1
        for h in sorted(heads):
            if res[h] <= 0:
                continue
            others = [j for j in sorted(alive) if j != h and res[j] > 0]
            reach = max((self._dist(h, j) for j in others), default=0.0)
            if not self.charge(h, tx_cost(radio.control_bits, reach, radio), t0, r, ANNOUNCE_TX, BROADCAST):
                continue
            for j in others:
                if res[j] > 0:
                    self.charge(j, self._rx_ctrl, t0, r, ANNOUNCE_RX, h)
        clusters = leach_form_clusters(heads, [i for i in alive if res[i] > 0], self.topology.positions)
        self._joins(clusters, t0, r)
        next_hop = {c.head: BASE_STATION for c in clusters}
        return RoundState(r, t0, alive, dict(self.layer), frozenset(heads), clusters, next_hop)

    def _joins(self, clusters, t0, r):
        radio = self.config.radio
        res = self.energy.residual
        for c in clusters:
            for m in c.members:
                if res[m] <= 0:
                    continue
                cost = tx_cost(radio.control_bits, self._dist(m, c.head), radio)
                if self.charge(m, cost, t0, r, JOIN_TX, c.head) and res[c.head] > 0:
                    self.charge(c.head, self._rx_ctrl, t0, r, JOIN_RX, m)

    # -- data phase -------------------------------------------------------

    def steady_state(self, state: RoundState, tick_times) -> None:
        """Run the sense ticks of one round, recording generated/delivered readings."""
        radio = self.config.radio
        res = self.energy.residual
        charge = self.charge
        rx = self._rx_data
        bits = radio.data_bits
        r = state.round_index
        next_hop = state.next_hop
        plan = []
        for c in sorted(state.clusters, key=lambda c: c.head):
            members = sorted(c.members, key=c.tdma.__getitem__) if c.tdma else list(c.members)
            plan.append((c.head, [(m, self._tx_data(m, c.head)) for m in members], c.aggregates))
        hop_cost = {}
        for node, nxt in next_hop.items():
            hop_cost[node] = self._tx_data(node, nxt)
        participants = sorted({c.head for c in state.clusters}.union(*(c.members for c in state.clusters)))

        prev_gen: tuple[int, ...] = ()
        prev_del: tuple[int, ...] = ()
        for t in tick_times:
            generated = tuple(i for i in participants if res[i] > 0)
            delivered: list[int] = []
            for head, members, aggregates in plan:
                got = []
                for m, cost in members:
                    if res[m] <= 0:
                        continue
                    if not charge(m, cost, t, r, DATA_TX, head):
                        continue
                    if res[head] > 0 and charge(head, rx, t, r, DATA_RX, m):
                        got.append(m)
                if res[head] <= 0:
                    continue
                got.append(head)
                if aggregates and not charge(head, aggregate_cost(len(got) * bits, radio), t, r, AGGREGATE, head):
                    continue
                node, action = head, DATA_TX
                while True:
                    nxt = next_hop[node]
                    if not charge(node, hop_cost[node], t, r, action, nxt):
                        break
                    if nxt == BASE_STATION:
                        delivered.extend(got)
                        break
                    if res[nxt] <= 0 or not charge(nxt, rx, t, r, FORWARD_RX, node):
                        break
                    node, action = nxt, FORWARD_TX
            delivered_t = tuple(sorted(delivered))
            # identical ticks share one tuple to keep long runs small
            if generated == prev_gen:
                generated = prev_gen
            if delivered_t == prev_del:
                delivered_t = prev_del
            state.tick_times.append(t)
            state.tick_generated.append(generated)
            state.tick_delivered.append(delivered_t)
            prev_gen, prev_del = generated, delivered_t


def run(config: SimConfig, log_level: str = "all", keep_rounds: bool = True) -> RunResult:
    """Simulate one run; returns (metrics, event log, per-round states)."""
    return Simulator(config, log_level=log_level, keep_rounds=keep_rounds).run()
