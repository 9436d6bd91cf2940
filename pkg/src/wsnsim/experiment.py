"""Parameter sweeps over protocols, node counts and seeds, plus threshold calibration."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import lmeec as lm
from .config import ExperimentSpec, SimConfig
from .engine import run
from .metrics import MetricsRecord, summarize
from .topology import assign_layers, build_adjacency, deploy_uniform, NetworkTopology

log = logging.getLogger(__name__)

RUN_FIELDS = ("protocol", "n", "seed", "avg_dissipated_j", "fnd_s", "hnd_s", "lnd_s", "delivery", "disconnected_count")


def fmt(value) -> str:
    """CSV cell: 9 significant digits for floats, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _run_one(config: SimConfig, trace_dir=None) -> MetricsRecord:
    if trace_dir is None:
        metrics, _, _ = run(config, log_level="deaths", keep_rounds=False)
        return metrics
    metrics, events, _ = run(config, log_level="all", keep_rounds=False)
    path = Path(trace_dir) / f"{config.protocol}_n{config.n_nodes}_s{config.seed}.jsonl"
    with open(path, "w") as fh:
        events.write_jsonl(fh)
    return metrics


@dataclass
class ExperimentResult:
    records: list[MetricsRecord]
    failures: list[tuple[str, int, int, str]] = field(default_factory=list)
    paths: dict[str, Path] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 2 if self.failures else 0


def run_experiment(
    spec: ExperimentSpec, jobs: int | None = None, write: bool = True, trace: bool = False
) -> ExperimentResult:
    """Run every (protocol, n, seed) combination and write the CSV/JSON reports.

    Runs may execute in worker processes; files are written once everything
    has finished, in sorted (protocol, n, seed) order.
    """
    jobs = spec.jobs if jobs is None else jobs
    configs = list(spec.configs())
    records, failures = [], []
    trace_dir = None
    if trace:
        trace_dir = Path(spec.output_dir) / "traces"
        trace_dir.mkdir(parents=True, exist_ok=True)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_one, c, trace_dir) for c in configs]
            outcomes = []
            for c, fut in zip(configs, futures):
                try:
                    outcomes.append((c, fut.result(), None))
                except Exception as exc:  # noqa: BLE001 - reported per run
                    outcomes.append((c, None, exc))
    else:
        outcomes = []
        for c in configs:
            try:
                outcomes.append((c, _run_one(c, trace_dir), None))
            except Exception as exc:  # noqa: BLE001
                outcomes.append((c, None, exc))
    for c, rec, exc in outcomes:
        if exc is None:
            records.append(rec)
            log.info("%s n=%d seed=%d avg=%.6f J", c.protocol, c.n_nodes, c.seed, rec.avg_dissipated_per_node)
        else:
            failures.append((c.protocol, c.n_nodes, c.seed, repr(exc)))
            log.error("%s n=%d seed=%d failed: %r", c.protocol, c.n_nodes, c.seed, exc)
    records.sort(key=lambda r: (r.protocol, r.n, r.seed))
    result = ExperimentResult(records, failures)
    if write:
        result.paths = write_reports(result, spec.output_dir)
    return result


def write_reports(result: ExperimentResult, output_dir) -> dict[str, Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"runs": out / "runs.csv", "summary": out / "summary.csv", "json": out / "summary.json"}
    with open(paths["runs"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_FIELDS)
        for rec in result.records:
            row = rec.row()
            w.writerow([fmt(row[k]) for k in RUN_FIELDS])
    table = summarize(result.records) if result.records else []
    columns = list(table[0]) if table else ["protocol", "n", "runs"]
    with open(paths["summary"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in table:
            w.writerow([fmt(row[k]) for k in columns])
    with open(paths["json"], "w") as fh:
        json.dump({"summary": table, "failures": [list(f) for f in result.failures]}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if result.failures:
        paths["failures"] = out / "failures.txt"
        with open(paths["failures"], "w") as fh:
            fh.write("partial results: the following runs failed\n")
            for proto, n, seed, err in result.failures:
                fh.write(f"{proto}\t{n}\t{seed}\t{err}\n")
    return paths


# -- threshold calibration ------------------------------------------------


class _FirstRound:
    """Round-0 election inputs for one deployment; re-thresholds cheaply."""

    def __init__(self, config: SimConfig):
        tp = config.topology
        pos = deploy_uniform(config.n_nodes, tp.field_width, tp.field_height, config.seed)
        topo = NetworkTopology(pos, tp.base_station, tp.comm_range, build_adjacency(pos, tp.comm_range))
        layer = assign_layers(topo, warn=False)
        self.neighbors = {i: frozenset(j for j in topo.adjacency[i] if j in layer) for i in layer}
        self.states = {i: lm.NodeProtocolState(i, layer[i], len(self.neighbors[i])) for i in layer}
        self.residual = {i: config.initial_energy for i in layer}
        self.config = config
        # weight * layer is what the threshold base is compared against
        self.scores = [
            lm.compute_election_weight(s, config.initial_energy, config.initial_energy, config.n_nodes, config.lmeec)
            * s.layer
            for s in self.states.values()
        ]

    def fraction(self, tau: float) -> float:
        if not self.states:
            return 0.0
        params = replace(self.config.lmeec, threshold_base=tau)
        heads = lm.elect_cluster_heads(
            self.states, self.residual, self.config.initial_energy, self.config.n_nodes, params, self.neighbors
        )
        return len(heads) / len(self.states)


@dataclass
class CalibrationResult:
    converged: bool
    threshold_base: float | None
    achieved: float | None
    holdout: float | None
    floor: float
    message: str
    sweep: list[tuple[float, float]] = field(default_factory=list)


def calibrate_threshold(
    target_ch_fraction: float,
    n: int = 100,
    trials: int = 10,
    base: SimConfig | None = None,
    max_iter: int = 60,
    rel_tol: float = 0.2,
    trial_seed: int = 1000,
    holdout_seed: int = 2000,
) -> CalibrationResult:
    """Bisect the threshold base so the mean first-round head fraction hits a target.

    The fraction includes heads added by orphan rescue, so it cannot drop
    below the rescue floor; targets outside [floor, 1] are reported as
    non-convergent instead of returning a made-up value.
    """
    if not 0 < target_ch_fraction < 1:
        raise ValueError("target fraction must lie in (0, 1)")
    base = base or SimConfig()
    trial_rounds = [_FirstRound(replace(base, n_nodes=n, seed=trial_seed + k)) for k in range(trials)]

    def mean_fraction(tau):
        return float(np.mean([t.fraction(tau) for t in trial_rounds]))

    scores = [s for t in trial_rounds for s in t.scores]
    lo = min(scores) - 1.0  # everyone passes
    hi = max(scores) + 1.0  # nobody passes; rescue only
    grid = np.linspace(lo, hi, 25)
    sweep = [(float(t), mean_fraction(float(t))) for t in grid]
    floor, top = sweep[-1][1], sweep[0][1]
    tol = rel_tol * target_ch_fraction

    def done(frac):
        return abs(frac - target_ch_fraction) <= tol

    if target_ch_fraction + tol < floor or target_ch_fraction - tol > top:
        return CalibrationResult(
            False, None, None, None, floor,
            f"target {target_ch_fraction:.3f} outside reachable range [{floor:.3f}, {top:.3f}]",
            sweep,
        )
    # the fraction is a step function of tau, so keep the closest point seen
    best = None
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        frac = mean_fraction(mid)
        if best is None or abs(frac - target_ch_fraction) < abs(best[1] - target_ch_fraction):
            best = (mid, frac)
        if frac == target_ch_fraction or hi - lo < 1e-12:
            break
        if frac > target_ch_fraction:
            lo = mid
        else:
            hi = mid
    if best is None or not done(best[1]):
        achieved = None if best is None else best[1]
        return CalibrationResult(
            False, None, achieved, None, floor,
            f"no threshold within {max_iter} bisection steps reached {target_ch_fraction:.3f} +/- {tol:.3f}",
            sweep,
        )
    tau, frac = best
    holdout = [_FirstRound(replace(base, n_nodes=n, seed=holdout_seed + k)) for k in range(trials)]
    held = float(np.mean([h.fraction(tau) for h in holdout]))
    return CalibrationResult(
        True, tau, frac, held, floor, f"threshold_base={tau:.6g} gives {frac:.4f} (hold-out {held:.4f})", sweep
    )

