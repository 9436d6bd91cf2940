"""Command-line experiment runner.

    python -m wsnsim run --out results --set experiment.seeds=[1,2]
    python -m wsnsim calibrate --target 0.15
    python -m wsnsim trace --set sim.protocol=leach --set sim.n_nodes=50

Exit codes: 0 success, 1 configuration error, 2 partial failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, build_spec, dump_config, load_flat, parse_override
from .engine import run
from .experiment import calibrate_threshold, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML file with dotted keys (e.g. radio.e_elec = 5e-8)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    common.add_argument("--out", help="output directory (overrides experiment.output_dir)")
    common.add_argument("--trace", action="store_true", help="write newline-delimited event traces")
    common.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="wsnsim", description="LMEEC vs LEACH sensor network experiments")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="sweep node counts x seeds x protocols")
    r.add_argument("--jobs", type=int, help="worker processes (overrides experiment.jobs)")
    c = sub.add_parser("calibrate", parents=[common], help="search the election threshold base")
    c.add_argument("--target", type=float, default=0.15, help="desired first-round head fraction")
    c.add_argument("--n", type=int, default=100)
    c.add_argument("--trials", type=int, default=10)
    sub.add_parser("trace", parents=[common], help="single run (sim.* keys) with a full event trace")
    return p


def _load_spec(args):
    flat = load_flat(args.config) if args.config else {}
    for text in args.overrides:
        key, value = parse_override(text)
        flat[key] = value
    if args.out:
        flat["experiment.output_dir"] = args.out
    if getattr(args, "jobs", None) is not None:
        flat["experiment.jobs"] = args.jobs
    return build_spec(flat)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        spec = _load_spec(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dump_config:
        sys.stdout.write(dump_config(spec))
        return EXIT_OK

    if args.command == "run":
        result = run_experiment(spec, trace=args.trace)
        for row in json.load(open(result.paths["json"]))["summary"]:
            print(
                f"{row['protocol']:>6} n={row['n']:<4} avg_dissipated={row['avg_dissipated_j_mean']:.6g} J"
                f"  fnd={row['fnd_s_mean']}  ({row['fnd_s_count']}/{row['runs']} runs with a death)"
            )
        if result.failures:
            print(f"{len(result.failures)} run(s) failed; see {result.paths['failures']}", file=sys.stderr)
        print(f"wrote {result.paths['runs']}")
        return result.exit_code

    if args.command == "calibrate":
        try:
            res = calibrate_threshold(args.target, n=args.n, trials=args.trials, base=spec.base)
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(res.message)
        if not res.converged:
            print(f"no recommendation (rescue floor {res.floor:.4f})", file=sys.stderr)
            return EXIT_PARTIAL
        print(f"recommended lmeec.threshold_base = {res.threshold_base:.6g}")
        return EXIT_OK

    # trace
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = spec.base
    metrics, events, _ = run(cfg)
    stem = f"{cfg.protocol}_n{cfg.n_nodes}_s{cfg.seed}"
    trace_path = out / f"{stem}.jsonl"
    with open(trace_path, "w") as fh:
        events.write_jsonl(fh)
    summary = metrics.row() | {"rounds": len(metrics.per_round), "events": len(events)}
    with open(out / f"{stem}.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(json.dumps(summary))
    print(f"wrote {trace_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
