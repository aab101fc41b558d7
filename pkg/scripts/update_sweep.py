#!/usr/bin/env python3
"""Final traffic cost per policy as the number of updates grows, with the
query set held fixed. Emits a long-format CSV: one row per (update count,
policy)."""

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from midcache.simharness import POLICY_NAMES, RunConfig, run
from midcache.workload import GeneratorParams, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--queries", type=int, default=10_000)
    ap.add_argument("--updates", type=int, nargs="+",
                    default=[5_000, 10_000, 20_000, 30_000])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--cache-frac", type=float, default=0.3)
    ap.add_argument("--out", default="update_sweep.csv")
    args = ap.parse_args()

    rows = []
    for n_updates in args.updates:
        params = GeneratorParams(n_queries=args.queries, n_updates=n_updates)
        catalog, events = generate(params, args.seed)
        for policy in POLICY_NAMES:
            rep = run(events, catalog,
                      RunConfig(policy=policy, seed=args.seed,
                                cache_frac=args.cache_frac))
            rows.append({"n_updates": n_updates, "policy": policy,
                         "query_ship": rep.ledger.query_ship,
                         "update_ship": rep.ledger.update_ship,
                         "load": rep.ledger.load, "total": rep.ledger.total})
            print(f"updates={n_updates} {policy}: total={rep.ledger.total}")

    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
