"""
Hop layers and the Hello flood
==============================

Deploy a field of sensors, build the radio graph and count how many hops
each node sits from the base station.
"""

from collections import Counter

from wsnsim import RadioParams, TopologyParams, deploy_uniform
from wsnsim.topology import hello_energy_accounting, make_topology

params = TopologyParams()  # 100 x 100 m, base station in the middle, 25 m range
positions = deploy_uniform(100, params.field_width, params.field_height, rng_seed=1)
topo = make_topology(positions, params)

###############################################################################
# Layer 1 hears the base station directly; every other layer is one hop
# further out than its closest neighbor.

for layer, count in sorted(Counter(topo.layer.values()).items()):
    print(f"layer {layer}: {count} nodes")
print("unreachable:", topo.unreachable())

###############################################################################
# One Hello exchange: each layered node broadcasts once at full range and
# hears every layered neighbor.

debits = hello_energy_accounting(topo, RadioParams())
total = sum(d.joules for d in debits)
print(f"{len(debits)} debits, {total * 1e3:.3f} mJ for the whole network")
