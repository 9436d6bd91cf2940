"""Run metrics: average dissipated energy, lifetime milestones, sweep summaries."""

from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    time: float
    alive_count: int
    dissipated_j: float
    total_dissipated_j: float
    ch_count: int
    mean_cluster_size_by_layer: dict[int, float]
    delivery: float
    energy_initial: float
    energy_residual: float


@dataclass
class MetricsRecord:
    protocol: str
    n: int
    seed: int
    per_round: list[RoundMetrics] = field(default_factory=list)
    lifetime_fnd: float | None = None
    lifetime_hnd: float | None = None
    lifetime_lnd: float | None = None
    total_dissipated: float = 0.0
    avg_dissipated_per_node: float = 0.0
    delivery_fraction: float = 1.0
    disconnected: int = 0

    def row(self) -> dict:
        return {
            "protocol": self.protocol,
            "n": self.n,
            "seed": self.seed,
            "avg_dissipated_j": self.avg_dissipated_per_node,
            "fnd_s": self.lifetime_fnd,
            "hnd_s": self.lifetime_hnd,
            "lnd_s": self.lifetime_lnd,
            "delivery": self.delivery_fraction,
            "disconnected_count": self.disconnected,
        }


def compute_lifetime(events, n: int) -> tuple[float | None, float | None, float | None]:
    """(first death, half dead, last death) times; None when not reached.

    ``events`` is an EventLog, an iterable of events with ``action``/``time``
    attributes, or a list of ``(time, node)`` death pairs. The half-dead
    milestone is the time of the ceil(n/2)-th death.
    """
    if hasattr(events, "deaths"):
        deaths = events.deaths()
    else:
        deaths = [
            (e.time, e.actor) if hasattr(e, "action") else tuple(e)
            for e in events
            if not hasattr(e, "action") or e.action == "death"
        ]
    times = sorted(t for t, _ in deaths)
    if not times:
        return None, None, None
    half = math.ceil(n / 2)
    hnd = times[half - 1] if len(times) >= half else None
    lnd = times[-1] if len(times) >= n else None
    return times[0], hnd, lnd


def build_record(protocol, n, seed, per_round, deaths, dissipated, disconnected) -> MetricsRecord:
    fnd, hnd, lnd = compute_lifetime(deaths, n)
    total = math.fsum(dissipated)
    deliveries = [r.delivery for r in per_round]
    return MetricsRecord(
        protocol=protocol,
        n=n,
        seed=seed,
        per_round=list(per_round),
        lifetime_fnd=fnd,
        lifetime_hnd=hnd,
        lifetime_lnd=lnd,
        total_dissipated=total,
        avg_dissipated_per_node=total / n,
        delivery_fraction=statistics.fmean(deliveries) if deliveries else 1.0,
        disconnected=disconnected,
    )


SUMMARY_FIELDS = ("avg_dissipated_j", "fnd_s", "hnd_s", "lnd_s")


def summarize(rows, keys=("protocol", "n")) -> list[dict]:
    """Mean and population std of each metric per group.

    ``rows`` are run rows (dicts as produced by :meth:`MetricsRecord.row`, or
    the records themselves). Milestones that were never reached are skipped;
    ``<metric>_count`` says how many runs contributed.
    """
    groups = defaultdict(list)
    for row in rows:
        if isinstance(row, MetricsRecord):
            row = row.row()
        groups[tuple(row[k] for k in keys)].append(row)
    if not groups:
        raise ValueError("nothing to summarize")
    table = []
    for key in sorted(groups):
        members = groups[key]
        out = dict(zip(keys, key))
        out["runs"] = len(members)
        for name in SUMMARY_FIELDS:
            values = [float(r[name]) for r in members if r[name] not in (None, "")]
            out[f"{name}_mean"] = statistics.fmean(values) if values else None
            out[f"{name}_std"] = statistics.pstdev(values) if values else None
            out[f"{name}_count"] = len(values)
        table.append(out)
    return table


def spearman_rho(x, y) -> float:
    from scipy.stats import spearmanr

    return float(spearmanr(x, y).statistic)
