"""
One LMEEC run, round by round
=============================

Simulate 100 nodes for the default 500 s and look at what each 20 s
round costs.
"""

from wsnsim import SimConfig, packet_delivery_check, run

metrics, events, rounds = run(SimConfig(protocol="lmeec", n_nodes=100, seed=1))

###############################################################################
# Heads per round, energy spent and how many sensor readings made it to the
# base station.

for rm, state in zip(metrics.per_round[:5], rounds):
    print(
        f"round {rm.round:2d}  heads={rm.ch_count:2d}  spent={rm.dissipated_j:.4f} J"
        f"  delivery={packet_delivery_check(state).mean:.3f}"
    )

###############################################################################
# Farther heads should lead larger clusters.

print(metrics.per_round[0].mean_cluster_size_by_layer)

###############################################################################
# Every debit is in the event log, so the log and the ledger agree.

print(f"{len(events)} events, {events.total_joules():.6f} J logged, {metrics.total_dissipated:.6f} J dissipated")
print("first / half / last death:", metrics.lifetime_fnd, metrics.lifetime_hnd, metrics.lifetime_lnd)
