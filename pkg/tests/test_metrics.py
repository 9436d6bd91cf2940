import csv
import statistics

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsnsim.config import SimConfig
from wsnsim.engine import run
from wsnsim.experiment import RUN_FIELDS, write_reports, ExperimentResult
from wsnsim.metrics import MetricsRecord, compute_lifetime, spearman_rho, summarize
from wsnsim.topology import TopologyParams


def test_no_deaths():
    assert compute_lifetime([], 10) == (None, None, None)


def test_three_deaths_direct_reading():
    assert compute_lifetime([(100.0, 0), (200.0, 1), (300.0, 2)], 3) == (100.0, 200.0, 300.0)


def test_partial_deaths_leave_later_milestones_open():
    assert compute_lifetime([(5.0, 3)], 4) == (5.0, None, None)
    assert compute_lifetime([(5.0, 3), (9.0, 1)], 4) == (5.0, 9.0, None)


@given(st.lists(st.floats(0, 500, allow_nan=False), min_size=1, max_size=30), st.integers(1, 30))
def test_milestone_ordering_from_any_death_list(times, n):
    times = times[:n]
    fnd, hnd, lnd = compute_lifetime([(t, i) for i, t in enumerate(times)], n)
    reached = [m for m in (fnd, hnd, lnd) if m is not None]
    assert reached == sorted(reached)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["lmeec", "leach"]))
def test_milestone_ordering_on_runs(seed, protocol):
    tp = TopologyParams(field_width=40, field_height=40, bs_x=20, bs_y=20)
    cfg = SimConfig(protocol=protocol, n_nodes=12, seed=seed, initial_energy=0.02, duration=200.0, topology=tp)
    m = run(cfg, log_level="deaths", keep_rounds=False).metrics
    reached = [x for x in (m.lifetime_fnd, m.lifetime_hnd, m.lifetime_lnd) if x is not None]
    assert reached == sorted(reached)
    assert m.lifetime_fnd is not None


def _rec(avg, protocol="lmeec", n=50, seed=1, fnd=None):
    return MetricsRecord(protocol, n, seed, avg_dissipated_per_node=avg, lifetime_fnd=fnd)


def test_summary_of_one_record():
    (row,) = summarize([_rec(0.7, fnd=12.0)])
    assert row["avg_dissipated_j_mean"] == 0.7 and row["avg_dissipated_j_std"] == 0.0
    assert row["fnd_s_mean"] == 12.0 and row["fnd_s_count"] == 1
    assert row["hnd_s_mean"] is None and row["hnd_s_count"] == 0


def test_summary_of_two_records():
    (row,) = summarize([_rec(1.0, seed=1), _rec(3.0, seed=2)])
    assert row["avg_dissipated_j_mean"] == 2.0
    assert row["runs"] == 2


def test_summary_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])


def test_summary_groups_sorted():
    rows = summarize([_rec(1.0, "lmeec", 100), _rec(2.0, "leach", 50), _rec(3.0, "lmeec", 50)])
    assert [(r["protocol"], r["n"]) for r in rows] == [("leach", 50), ("lmeec", 50), ("lmeec", 100)]


def test_summary_matches_recount_from_csv(tmp_path):
    tp = TopologyParams(field_width=40, field_height=40, bs_x=20, bs_y=20)
    records = [
        run(SimConfig(protocol=p, n_nodes=n, seed=s, initial_energy=0.05, duration=100.0, topology=tp)).metrics
        for p in ("lmeec", "leach")
        for n in (8, 12)
        for s in (1, 2, 3)
    ]
    paths = write_reports(ExperimentResult(records), tmp_path)
    with open(paths["runs"]) as fh:
        raw = list(csv.DictReader(fh))
    assert tuple(raw[0]) == RUN_FIELDS
    with open(paths["summary"]) as fh:
        table = {(r["protocol"], r["n"]): r for r in csv.DictReader(fh)}
    groups = {}
    for r in raw:
        groups.setdefault((r["protocol"], r["n"]), []).append(r)
    assert set(groups) == set(table)
    for key, rows in groups.items():
        for name in ("avg_dissipated_j", "fnd_s", "lnd_s"):
            values = [float(r[name]) for r in rows if r[name]]
            got = table[key][f"{name}_mean"]
            if values:
                assert float(got) == pytest.approx(statistics.mean(values), rel=1e-7)
            else:
                assert got == ""


def test_spearman_perfect_and_reversed():
    assert spearman_rho([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)
    assert spearman_rho([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)
