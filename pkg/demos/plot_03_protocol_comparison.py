"""
LMEEC against LEACH
===================

A reduced sweep (two node counts, two seeds) written to ``demo_results/``.
The full sweep is ``wsnsim run``.
"""

from wsnsim import ExperimentSpec
from wsnsim.experiment import run_experiment

spec = ExperimentSpec(node_counts=(50, 200), seeds=(1, 2), output_dir="demo_results")
result = run_experiment(spec)

###############################################################################
# Average energy dissipated per deployed node, per run.

for rec in result.records:
    print(f"{rec.protocol:>6} n={rec.n:<4} seed={rec.seed}  {rec.avg_dissipated_per_node:.4f} J/node  fnd={rec.lifetime_fnd}")

print(open(result.paths["summary"]).read())
