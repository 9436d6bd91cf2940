import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import layers_by_shortest_path, pairwise_neighbors
from wsnsim.energy import RadioParams, rx_cost, tx_cost
from wsnsim.topology import (
    DegenerateTopologyWarning,
    NetworkTopology,
    TopologyParams,
    assign_layers,
    build_adjacency,
    deploy_uniform,
    hello_energy_accounting,
    make_topology,
)

RADIO = RadioParams()


def topo_of(positions, bs=(0.0, 0.0), comm_range=25.0):
    pos = np.asarray(positions, dtype=float)
    t = NetworkTopology(pos, bs, comm_range, build_adjacency(pos, comm_range))
    t.layer = assign_layers(t, warn=False)
    return t


class TestDeploy:
    def test_single_node_in_bounds(self):
        (x, y), = deploy_uniform(1, 100, 100, rng_seed=7)
        assert 0 <= x <= 100 and 0 <= y <= 100

    def test_deterministic(self):
        assert np.array_equal(deploy_uniform(400, 100, 100, 3), deploy_uniform(400, 100, 100, 3))
        assert not np.array_equal(deploy_uniform(400, 100, 100, 3), deploy_uniform(400, 100, 100, 4))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            deploy_uniform(0, 100, 100, 1)

    def test_mean_x_concentrates(self):
        # Hoeffding: P(|mean - 50| > 10) <= 2 exp(-2*400*0.1**2) ~ 6.7e-4 for n=400
        bound = 2 * math.exp(-2 * 400 * 0.1**2)
        assert bound <= 1e-3
        means = [deploy_uniform(400, 100, 100, s)[:, 0].mean() for s in range(200)]
        assert all(40 <= m <= 60 for m in means)


class TestAdjacency:
    def test_boundary_is_inclusive(self):
        adj = build_adjacency([(0, 0), (25, 0)], 25.0)
        assert adj[0] == {1} and adj[1] == {0}

    def test_just_beyond_range(self):
        adj = build_adjacency([(0, 0), (25 + 1e-9, 0)], 25.0)
        assert adj[0] == set()

    def test_collinear_chain_is_a_path(self):
        adj = build_adjacency([(0, 0), (25, 0), (50, 0)], 25.0)
        assert adj == [{1}, {0, 2}, {1}]

    @settings(max_examples=50)
    @given(st.integers(1, 40), st.integers(0, 10_000), st.floats(5, 60))
    def test_symmetric_irreflexive_and_matches_distance(self, n, seed, r):
        pos = deploy_uniform(n, 100, 100, seed)
        adj = build_adjacency(pos, r)
        ref = pairwise_neighbors(pos.tolist(), r)
        for i in range(n):
            assert i not in adj[i]
            assert set(adj[i]) == ref[i]
            for j in adj[i]:
                assert i in adj[j]


class TestLayers:
    def test_single_node_in_range(self):
        assert topo_of([(10, 0)]).layer == {0: 1}

    def test_chain(self):
        t = topo_of([(20, 0), (40, 0), (60, 0)])
        assert t.layer == {0: 1, 1: 2, 2: 3}

    def test_unreachable_warns_and_is_absent(self):
        t = topo_of([(10, 0), (90, 90)])
        with pytest.warns(DegenerateTopologyWarning):
            layer = assign_layers(t)
        assert layer == {0: 1}
        assert t.unreachable() == [1]

    def test_fully_connected_does_not_warn(self):
        t = topo_of([(10, 0), (20, 0)])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assign_layers(t)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_50_matches_shortest_path_oracle(self, seed):
        params = TopologyParams()
        pos = deploy_uniform(50, 100, 100, seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateTopologyWarning)
            t = make_topology(pos, params)
        assert t.layer == layers_by_shortest_path(pos.tolist(), params.base_station, params.comm_range)

    @settings(max_examples=40)
    @given(st.integers(2, 60), st.integers(0, 10_000))
    def test_layer_properties(self, n, seed):
        t = topo_of(deploy_uniform(n, 100, 100, seed), bs=(50, 50))
        bs_d = t.bs_distances()
        assert {i for i, L in t.layer.items() if L == 1} == {i for i in range(n) if bs_d[i] <= t.comm_range}
        for i, L in t.layer.items():
            if L > 1:
                assert min(t.layer[j] for j in t.adjacency[i] if j in t.layer) == L - 1

    def test_dead_nodes_do_not_relay(self):
        t = topo_of([(20, 0), (40, 0), (60, 0)])
        assert assign_layers(t, alive={0, 2}, warn=False) == {0: 1}


class TestHelloAccounting:
    def test_isolated_node_pays_nothing(self):
        t = topo_of([(10, 0), (90, 90)])
        assert all(d.actor != 1 for d in hello_energy_accounting(t, RADIO))

    def test_receive_count_equals_transmitting_neighbors(self):
        # node 1 hears nodes 0, 2 and 3
        t = topo_of([(20, 0), (40, 0), (60, 0), (40, 20)])
        debits = hello_energy_accounting(t, RADIO)
        assert sum(1 for d in debits if d.actor == 1 and d.action == "hello_rx") == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_ten_node_total_matches_closed_form(self, seed):
        pos = deploy_uniform(10, 60, 60, seed)
        t = topo_of(pos, bs=(30, 30))
        layered = set(t.layer)
        ref = pairwise_neighbors(pos.tolist(), t.comm_range)
        transmitters = len(layered)
        heard = sum(len(ref[i] & layered) for i in layered)
        expected = transmitters * tx_cost(64, 25.0, RADIO) + heard * rx_cost(64, RADIO)
        total = sum(d.joules for d in hello_energy_accounting(t, RADIO))
        assert total == pytest.approx(expected, rel=1e-12)
