"""Catalog/trace file formats and a synthetic workload generator.

Files: `catalog.json` holds the object set; `trace.jsonl` starts with a
header line referencing its catalog, followed by one JSON event per line.
Both read transparently through gzip when the path ends in `.gz`.

The generator mimics the qualitative shape of scan-driven scientific
workloads: heavy-tailed (log-uniform) object sizes, queries clustered around
hotspot objects whose focus drifts along the trace, and updates emitted in
scan runs over contiguous object-id windows biased toward update hotspots
disjoint from the query hotspots.
"""

from __future__ import annotations

import gzip
import json
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .core import Event, ObjectCatalog, ObjectId, Query, Update

CATALOG_SCHEMA = "catalog/v1"
TRACE_SCHEMA = "trace/v1"


class TraceError(Exception):
    pass


@dataclass
class GeneratorParams:
    n_objects: int = 68
    size_min: int = 50_000_000             # 50 MB
    size_max: int = 20_000_000_000         # 20 GB
    load_cost_factor: float = 1.0
    n_queries: int = 10_000
    n_updates: int = 10_000
    query_hotspots: tuple[int, ...] = (22, 23, 24, 62, 63, 64)
    query_hotspot_weight: float = 0.95
    update_hotspots: tuple[int, ...] = (11, 12, 13, 30, 31, 32)
    update_hotspot_weight: float = 0.7
    scan_len: int = 8
    objects_per_query_weights: tuple[float, ...] = (0.45, 0.3, 0.15, 0.1)
    tolerance_mix: tuple[tuple[int, float], ...] = ((0, 0.5), (5_000, 0.3), (100_000, 0.2))
    selectivity: float = 0.01
    update_fraction: float = 0.01
    mean_interarrival_us: int = 1_000
    drift_cycles: float = 1.0

    def validate(self) -> None:
        if self.n_objects < 1:
            raise ValueError("n_objects must be >= 1")
        if not 0 < self.size_min <= self.size_max:
            raise ValueError("size bounds must satisfy 0 < min <= max")
        for h in self.query_hotspots + self.update_hotspots:
            if not 0 <= h < self.n_objects:
                raise ValueError(f"hotspot id {h} outside catalog [0,{self.n_objects})")
        for w in (self.query_hotspot_weight, self.update_hotspot_weight):
            if not 0.0 <= w <= 1.0:
                raise ValueError("hotspot weights must be in [0,1]")
        if self.scan_len < 1:
            raise ValueError("scan_len must be >= 1")
        if not self.objects_per_query_weights or min(self.objects_per_query_weights) < 0:
            raise ValueError("objects_per_query_weights must be non-negative")
        if any(t < 0 or w < 0 for t, w in self.tolerance_mix):
            raise ValueError("tolerance mix entries must be non-negative")
        if self.selectivity <= 0 or self.update_fraction <= 0:
            raise ValueError("cost scaling factors must be positive")

    @classmethod
    def scaled_hotspots(cls, n_objects: int) -> "GeneratorParams":
        """Defaults re-anchored for a different catalog size: hotspot ids are
        kept at the same fractional positions of the id space."""
        base = cls()
        scale = n_objects / base.n_objects
        qh = tuple(sorted({min(n_objects - 1, int(h * scale)) for h in base.query_hotspots}))
        uh = tuple(sorted({min(n_objects - 1, int(h * scale)) for h in base.update_hotspots}))
        return cls(n_objects=n_objects, query_hotspots=qh, update_hotspots=uh)


def _drifting_choice(rng: random.Random, centers: tuple[int, ...],
                     progress: float, cycles: float) -> int:
    """Pick a hotspot center whose preferred index slides along the list as
    the trace progresses, so the queried region evolves over time."""
    focus = progress * cycles * len(centers)
    idx = int(focus + rng.gauss(0.0, 0.75)) % len(centers)
    return centers[idx]


def generate(params: GeneratorParams, seed: int) -> tuple[ObjectCatalog, list[Event]]:
    params.validate()
    rng = random.Random(seed)
    n = params.n_objects
    sizes = {}
    lo, hi = math.log(params.size_min), math.log(params.size_max)
    for oid in range(n):
        sizes[oid] = max(1, int(math.exp(rng.uniform(lo, hi))))
    load_costs = {oid: max(1, int(params.load_cost_factor * s)) for oid, s in sizes.items()}
    catalog = ObjectCatalog.from_sizes(sizes, load_costs)

    markers = ["q"] * params.n_queries + ["u"] * params.n_updates
    rng.shuffle(markers)
    total = len(markers)

    tol_values = [t for t, _ in params.tolerance_mix]
    tol_weights = [w for _, w in params.tolerance_mix]
    opq_sizes = list(range(1, len(params.objects_per_query_weights) + 1))

    events: list[Event] = []
    t = 0
    scan_pos, scan_left = 0, 0
    for i, kind in enumerate(markers):
        t += max(1, int(rng.expovariate(1.0 / params.mean_interarrival_us)))
        progress = i / total
        eid = i + 1
        if kind == "q":
            if params.query_hotspots and rng.random() < params.query_hotspot_weight:
                center = _drifting_choice(rng, params.query_hotspots, progress,
                                          params.drift_cycles)
            else:
                center = rng.randrange(n)
            nobj = rng.choices(opq_sizes, weights=params.objects_per_query_weights)[0]
            objs = frozenset((center - nobj // 2 + k) % n for k in range(nobj))
            cost = max(1, int(params.selectivity * sum(sizes[o] for o in objs)))
            tol = rng.choices(tol_values, weights=tol_weights)[0]
            events.append(Query(qid=eid, time=t, objects=objs, ship_cost=cost,
                                tolerance=tol, seq=eid))
        else:
            if scan_left == 0:
                if params.update_hotspots and rng.random() < params.update_hotspot_weight:
                    scan_pos = _drifting_choice(rng, params.update_hotspots, progress,
                                                params.drift_cycles)
                else:
                    scan_pos = rng.randrange(n)
                scan_left = params.scan_len
            oid = scan_pos
            scan_pos = (scan_pos + 1) % n
            scan_left -= 1
            cost = max(1, int(params.update_fraction * sizes[oid]))
            events.append(Update(uid=eid, time=t, object=oid, ship_cost=cost, seq=eid))
    return catalog, events


# ---------------------------------------------------------------- file I/O

def _open(path: Path, mode: str):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def write_catalog(catalog: ObjectCatalog, path) -> None:
    doc = {"schema": CATALOG_SCHEMA,
           "objects": [{"id": oid,
                        "size": catalog.size(oid),
                        "load_cost": catalog.load_cost(oid)}
                       for oid in catalog.ids()]}
    with _open(Path(path), "w") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def read_catalog(path) -> ObjectCatalog:
    with _open(Path(path), "r") as fh:
        doc = json.load(fh)
    if doc.get("schema") != CATALOG_SCHEMA:
        raise TraceError(f"{path}: unexpected catalog schema {doc.get('schema')!r}")
    sizes = {o["id"]: o["size"] for o in doc["objects"]}
    costs = {o["id"]: o["load_cost"] for o in doc["objects"]}
    return ObjectCatalog.from_sizes(sizes, costs)


def _event_to_json(ev: Event) -> dict:
    if isinstance(ev, Query):
        return {"kind": "query", "id": ev.qid, "time": ev.time,
                "objects": sorted(ev.objects), "cost": ev.ship_cost,
                "tolerance": ev.tolerance}
    return {"kind": "update", "id": ev.uid, "time": ev.time,
            "object": ev.object, "cost": ev.ship_cost}


def _event_from_json(doc: dict, seq: int) -> Event:
    kind = doc.get("kind")
    if kind == "query":
        return Query(qid=doc["id"], time=doc["time"],
                     objects=frozenset(doc["objects"]), ship_cost=doc["cost"],
                     tolerance=doc.get("tolerance", 0), seq=seq)
    if kind == "update":
        return Update(uid=doc["id"], time=doc["time"], object=doc["object"],
                      ship_cost=doc["cost"], seq=seq)
    raise TraceError(f"unknown event kind {kind!r}")


def write_trace(events: list[Event], path, catalog_ref: str = "catalog.json",
                meta: dict | None = None) -> None:
    header = {"schema": TRACE_SCHEMA, "catalog": catalog_ref,
              "n_events": len(events)}
    if meta:
        header["meta"] = meta
    with _open(Path(path), "w") as fh:
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        for ev in events:
            fh.write(json.dumps(_event_to_json(ev), sort_keys=True,
                                separators=(",", ":")) + "\n")


def read_header(path) -> dict:
    with _open(Path(path), "r") as fh:
        line = fh.readline()
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceError(f"{path}:1: header is not valid JSON: {exc}") from exc
    if header.get("schema") != TRACE_SCHEMA:
        raise TraceError(f"{path}:1: unexpected trace schema {header.get('schema')!r}")
    return header


def load_trace(path) -> tuple[ObjectCatalog, list[Event]]:
    """Load a trace and the catalog its header references (resolved relative
    to the trace file). Events get 1-based sequence numbers in file order."""
    path = Path(path)
    header = read_header(path)
    catalog = read_catalog(path.parent / header["catalog"])
    events: list[Event] = []
    with _open(path, "r") as fh:
        fh.readline()
        for seq, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            events.append(_event_from_json(json.loads(line), seq))
    return catalog, events


@dataclass
class ValidationReport:
    ok: bool
    n_queries: int = 0
    n_updates: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)   # (line, message)


def validate(path) -> ValidationReport:
    """Structural validation: header, per-line schema, non-negative integer
    costs, time ordering, and referential integrity against the catalog."""
    path = Path(path)
    rep = ValidationReport(ok=True)

    def fail(line: int, msg: str) -> None:
        rep.ok = False
        rep.errors.append((line, msg))

    try:
        header = read_header(path)
        catalog = read_catalog(path.parent / header["catalog"])
    except (TraceError, OSError, KeyError) as exc:
        fail(1, str(exc))
        return rep
    last_time = None
    n_seen = 0
    seen_ids: set[tuple[str, int]] = set()
    with _open(path, "r") as fh:
        fh.readline()
        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                fail(line_no, f"malformed JSON: {exc}")
                continue
            try:
                ev = _event_from_json(doc, line_no - 1)
            except (TraceError, KeyError) as exc:
                fail(line_no, f"bad event record: {exc}")
                continue
            n_seen += 1
            if isinstance(ev, Query):
                rep.n_queries += 1
                key = ("query", ev.qid)
                if not ev.objects:
                    fail(line_no, f"query {ev.qid} accesses no objects")
                for oid in sorted(ev.objects):
                    if oid not in catalog:
                        fail(line_no, f"query {ev.qid} references unknown object {oid}")
                if ev.tolerance < 0:
                    fail(line_no, f"query {ev.qid} has negative tolerance")
                if ev.ship_cost < 0 or not isinstance(ev.ship_cost, int):
                    fail(line_no, f"query {ev.qid} has invalid cost {ev.ship_cost!r}")
            else:
                rep.n_updates += 1
                key = ("update", ev.uid)
                if ev.object not in catalog:
                    fail(line_no, f"update {ev.uid} references unknown object {ev.object}")
                if ev.ship_cost < 0 or not isinstance(ev.ship_cost, int):
                    fail(line_no, f"update {ev.uid} has invalid cost {ev.ship_cost!r}")
            if key in seen_ids:
                fail(line_no, f"duplicate {key[0]} id {key[1]}")
            seen_ids.add(key)
            if last_time is not None and ev.time < last_time:
                fail(line_no, f"events out of order: time {ev.time} after {last_time}")
            last_time = ev.time
    declared = header.get("n_events")
    if declared is not None and declared != n_seen:
        fail(1, f"header declares {declared} events, file has {n_seen}")
    return rep


def regrain(catalog: ObjectCatalog, events: list[Event], n_groups: int
            ) -> tuple[ObjectCatalog, list[Event]]:
    """Re-partition the catalog into coarser objects by merging contiguous id
    ranges (group k covers ids [k*n/g, (k+1)*n/g)). Query and update shipping
    costs carry over unchanged; merged sizes and load costs add up."""
    ids = catalog.ids()
    n = len(ids)
    if not 1 <= n_groups <= n:
        raise ValueError(f"n_groups must be in [1,{n}] (merging only)")
    group_of = {}
    for rank, oid in enumerate(ids):
        group_of[oid] = rank * n_groups // n
    sizes: dict[ObjectId, int] = {}
    costs: dict[ObjectId, int] = {}
    for oid in ids:
        g = group_of[oid]
        sizes[g] = sizes.get(g, 0) + catalog.size(oid)
        costs[g] = costs.get(g, 0) + catalog.load_cost(oid)
    merged = ObjectCatalog.from_sizes(sizes, costs)
    out: list[Event] = []
    for ev in events:
        if isinstance(ev, Query):
            out.append(Query(qid=ev.qid, time=ev.time,
                             objects=frozenset(group_of[o] for o in ev.objects),
                             ship_cost=ev.ship_cost, tolerance=ev.tolerance,
                             seq=ev.seq))
        else:
            out.append(Update(uid=ev.uid, time=ev.time, object=group_of[ev.object],
                              ship_cost=ev.ship_cost, seq=ev.seq))
    return merged, out


def params_meta(params: GeneratorParams, seed: int) -> dict:
    doc = asdict(params)
    doc["seed"] = seed
    return doc
