"""Round-based simulator for the LMEEC layered clustering protocol and a LEACH baseline."""

from .config import ConfigError, ExperimentSpec, SimConfig, build_spec
from .energy import EnergyState, RadioParams, aggregate_cost, debit, rx_cost, tx_cost
from .engine import RoundState, RunResult, Simulator, packet_delivery_check, run
from .leach import LeachParams, leach_elect, leach_form_clusters, leach_threshold
from .lmeec import (
    ClusterAssignment,
    LmeecParams,
    NodeProtocolState,
    build_tdma_schedule,
    compute_announcement_weight,
    compute_election_weight,
    elect_cluster_heads,
    election_threshold,
    form_clusters,
    select_relay,
)
from .metrics import MetricsRecord, compute_lifetime, summarize
from .topology import (
    BASE_STATION,
    NetworkTopology,
    TopologyParams,
    assign_layers,
    build_adjacency,
    deploy_uniform,
    hello_energy_accounting,
)

__version__ = "0.1.0"
