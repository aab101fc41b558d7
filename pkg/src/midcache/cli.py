"""Command-line front end: generate workloads, run or compare policies over a
trace, re-emit plot-ready data, and validate trace files.

Every subcommand is a pure function of its inputs, flags and seed; running
one twice produces byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import simharness, workload
from .simharness import POLICY_NAMES, RunConfig


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get("MIDCACHE_OUT", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args) -> int:
    params = workload.GeneratorParams(
        n_objects=args.objects, n_queries=args.queries, n_updates=args.updates,
        size_min=args.size_min, size_max=args.size_max,
        query_hotspot_weight=args.query_hotspot_weight,
        update_hotspot_weight=args.update_hotspot_weight,
        scan_len=args.scan_len, selectivity=args.selectivity,
        update_fraction=args.update_fraction,
        mean_interarrival_us=args.interarrival_us)
    if args.objects != workload.GeneratorParams.n_objects:
        scaled = workload.GeneratorParams.scaled_hotspots(args.objects)
        params.query_hotspots = scaled.query_hotspots
        params.update_hotspots = scaled.update_hotspots
    catalog, events = workload.generate(params, args.seed)
    out = _out_dir(args)
    workload.write_catalog(catalog, out / "catalog.json")
    workload.write_trace(events, out / "trace.jsonl", catalog_ref="catalog.json",
                         meta=workload.params_meta(params, args.seed))
    print(f"wrote {out / 'catalog.json'} ({len(catalog)} objects)")
    print(f"wrote {out / 'trace.jsonl'} ({len(events)} events)")
    return 0


def _run_config(args, policy: str) -> RunConfig:
    params = {}
    if policy == "benefit":
        params = {"alpha": args.alpha, "delta": args.delta}
    elif policy == "soptimal":
        params = {"mode": args.soptimal_mode}
    return RunConfig(policy=policy, seed=args.seed,
                     cache_bytes=args.cache_bytes, cache_frac=args.cache_frac,
                     warmup_events=args.warmup, sample_stride=args.stride,
                     params=params)


def _write_report(report, out: Path, stem: str, fmt: str) -> None:
    if fmt in ("json", "both"):
        (out / f"{stem}.json").write_text(report.summary_json())
    if fmt in ("csv", "both"):
        (out / f"{stem}.csv").write_text(report.series_csv())


def cmd_run(args) -> int:
    catalog, events = workload.load_trace(args.trace)
    config = _run_config(args, args.policy)
    try:
        report = simharness.run(events, catalog, config)
    except simharness.AuditError as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return 2
    out = _out_dir(args)
    stem = f"run-{args.policy}-seed{args.seed}"
    _write_report(report, out, stem, args.format)
    f = report.ledger
    print(f"{args.policy}: total={f.total} query_ship={f.query_ship} "
          f"update_ship={f.update_ship} load={f.load}")
    return 0


def cmd_compare(args) -> int:
    catalog, events = workload.load_trace(args.trace)
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for p in policies:
        if p not in POLICY_NAMES:
            print(f"unknown policy {p!r} (have: {', '.join(POLICY_NAMES)})",
                  file=sys.stderr)
            return 2
    grains = ([int(g) for g in args.granularity.split(",")]
              if args.granularity else [None])
    out = _out_dir(args)
    rc = 0
    for grain in grains:
        if grain is None:
            cat, evs, tag = catalog, events, "compare"
        else:
            cat, evs = workload.regrain(catalog, events, grain)
            tag = f"compare-g{grain}"
        configs = [_run_config(args, p) for p in policies]
        try:
            cmp_report = simharness.compare(evs, cat, configs, jobs=args.jobs)
        except simharness.AuditError as exc:
            print(f"audit failure: {exc}", file=sys.stderr)
            return 2
        _write_report(cmp_report, out, tag, args.format)
        for row in cmp_report.table():
            label = f"[{grain} objects] " if grain is not None else ""
            print(f"{label}{row['policy']}: total={row['total']} "
                  f"query_ship={row['query_ship']} "
                  f"update_ship={row['update_ship']} load={row['load']}")
    return rc


def cmd_report(args) -> int:
    """Merge run/compare summaries into one plot-ready CSV of final costs."""
    rows = []
    for path in args.inputs:
        doc = json.loads(Path(path).read_text())
        runs = doc["runs"] if "runs" in doc else [doc]
        for r in runs:
            rows.append({"label": args.label or Path(path).stem,
                         "policy": r["config"]["policy"],
                         "seed": r["config"]["seed"],
                         "n_events": r["n_events"],
                         **r["final"]})
    cols = ["label", "policy", "seed", "n_events",
            "query_ship", "update_ship", "load", "total"]
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in cols))
    text = "\n".join(lines) + "\n"
    if args.out_file:
        Path(args.out_file).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    rep = workload.validate(args.trace)
    if rep.ok:
        print(f"ok: {rep.n_queries} queries, {rep.n_updates} updates")
        return 0
    for line, msg in rep.errors[:50]:
        print(f"{args.trace}:{line}: {msg}", file=sys.stderr)
    print(f"invalid: {len(rep.errors)} error(s)", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="midcache",
        description="Trace-driven middleware-cache simulator: decouples query "
                    "shipping, update shipping and object loading to minimize "
                    "network traffic.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic catalog + trace")
    g.add_argument("--objects", type=int, default=68)
    g.add_argument("--queries", type=int, default=10_000)
    g.add_argument("--updates", type=int, default=10_000)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--size-min", type=int, default=50_000_000)
    g.add_argument("--size-max", type=int, default=20_000_000_000)
    g.add_argument("--query-hotspot-weight", type=float, default=0.95)
    g.add_argument("--update-hotspot-weight", type=float, default=0.7)
    g.add_argument("--scan-len", type=int, default=8)
    g.add_argument("--selectivity", type=float, default=0.01)
    g.add_argument("--update-fraction", type=float, default=0.01)
    g.add_argument("--interarrival-us", type=int, default=1_000)
    g.add_argument("--out", default=None, help="output dir (default $MIDCACHE_OUT or .)")
    g.set_defaults(func=cmd_gen)

    def add_run_flags(p):
        p.add_argument("--trace", required=True)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--cache-frac", type=float, default=0.3)
        p.add_argument("--cache-bytes", type=int, default=None)
        p.add_argument("--warmup", type=int, default=0)
        p.add_argument("--stride", type=int, default=100)
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--delta", type=int, default=1000)
        p.add_argument("--soptimal-mode", choices=("eager", "lazy"), default="eager")
        p.add_argument("--format", choices=("json", "csv", "both"), default="both")
        p.add_argument("--out", default=None)

    r = sub.add_parser("run", help="run one policy over a trace")
    r.add_argument("--policy", choices=POLICY_NAMES, required=True)
    add_run_flags(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run several policies over one trace")
    c.add_argument("--policies", default=",".join(POLICY_NAMES))
    c.add_argument("--granularity", default=None,
                   help="comma list of object counts; re-partitions the catalog "
                        "by merging contiguous id ranges")
    c.add_argument("--jobs", type=int, default=1)
    add_run_flags(c)
    c.set_defaults(func=cmd_compare)

    rp = sub.add_parser("report", help="merge summaries into plot-ready CSV")
    rp.add_argument("inputs", nargs="+")
    rp.add_argument("--label", default=None)
    rp.add_argument("--out-file", default=None)
    rp.set_defaults(func=cmd_report)

    v = sub.add_parser("validate", help="validate a trace file")
    v.add_argument("--trace", required=True)
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
