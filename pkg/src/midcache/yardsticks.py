"""Reference policies that bracket what a practical policy can achieve:
ship everything (nocache), replicate everything (replica), and the best
static cache composition chosen with full-trace hindsight (soptimal).
"""

from __future__ import annotations

from dataclasses import dataclass

from .benefit import proportional_shares
from .core import (AnswerFromCache, CacheState, Decision, Event, Load,
                   ObjectCatalog, ObjectId, Query, ShipQuery, ShipUpdates,
                   TrafficLedger, Update, interacting_updates)


class NoCachePolicy:
    """Ship every query to the server; the cache stays empty."""

    name = "nocache"

    def __init__(self, catalog: ObjectCatalog, cache: CacheState):
        self.cache = cache

    def startup(self) -> list[Decision]:
        return []

    def on_query(self, q: Query, now: int) -> list[Decision]:
        return [ShipQuery(q.qid)]

    def on_update(self, u: Update, now: int) -> list[Decision]:
        return []

    def finalize(self) -> list[Decision]:
        return []


class ReplicaPolicy:
    """Cache as large as the server holding all data from the start (no load
    charged, no capacity constraint); every update ships the moment it
    arrives, so every query answers at the cache."""

    name = "replica"

    def __init__(self, catalog: ObjectCatalog, cache: CacheState):
        self.cache = cache
        cache.capacity = max(cache.capacity, catalog.total_size)
        cache.seed_resident(catalog.ids())

    def startup(self) -> list[Decision]:
        return []

    def on_query(self, q: Query, now: int) -> list[Decision]:
        return [AnswerFromCache(q.qid)]

    def on_update(self, u: Update, now: int) -> list[Decision]:
        return [ShipUpdates((u.uid,))]

    def finalize(self) -> list[Decision]:
        return []


@dataclass(frozen=True)
class SOptimalPlan:
    """Static set picked after seeing the whole trace; loaded up front and
    never changed."""

    static_set: frozenset[ObjectId]
    initial_loads: tuple[Load, ...]


def plan_static_set(events: list[Event], catalog: ObjectCatalog,
                    capacity: int) -> SOptimalPlan:
    """One whole-trace benefit window from an empty cache: every object gets
    its size-proportional share of every query touching it, minus its update
    bytes, minus one load; positive scorers fill the capacity greedily."""
    saved: dict[ObjectId, int] = {}
    upd: dict[ObjectId, int] = {}
    for ev in events:
        if isinstance(ev, Query):
            sizes = [(oid, catalog.size(oid)) for oid in sorted(ev.objects)]
            for oid, share in proportional_shares(ev.ship_cost, sizes).items():
                saved[oid] = saved.get(oid, 0) + share
        else:
            upd[ev.object] = upd.get(ev.object, 0) + ev.ship_cost
    benefit = {oid: saved.get(oid, 0) - upd.get(oid, 0) - catalog.load_cost(oid)
               for oid in catalog.ids()}
    ranked = sorted((oid for oid, b in benefit.items() if b > 0),
                    key=lambda o: (-benefit[o], o))
    chosen: list[ObjectId] = []
    space = capacity
    for oid in ranked:
        size = catalog.size(oid)
        if size <= space:
            chosen.append(oid)
            space -= size
    return SOptimalPlan(frozenset(chosen), tuple(Load(o) for o in chosen))


class SOptimalPolicy:
    """Replays the trace against the precomputed static set. In eager mode
    (default) updates for set members ship on arrival; in lazy mode they queue
    until a query needs them."""

    name = "soptimal"

    def __init__(self, catalog: ObjectCatalog, cache: CacheState,
                 events: list[Event], mode: str = "eager"):
        if mode not in ("eager", "lazy"):
            raise ValueError(f"unknown soptimal mode {mode!r}")
        self.cache = cache
        self.mode = mode
        self.plan = plan_static_set(events, catalog, cache.capacity)

    def startup(self) -> list[Decision]:
        return list(self.plan.initial_loads)

    def on_query(self, q: Query, now: int) -> list[Decision]:
        if not q.objects <= self.plan.static_set:
            return [ShipQuery(q.qid)]
        ius = interacting_updates(q, self.cache, now)
        if not ius:
            return [AnswerFromCache(q.qid)]
        return [ShipUpdates(tuple(u.uid for u in ius)), AnswerFromCache(q.qid)]

    def on_update(self, u: Update, now: int) -> list[Decision]:
        if self.mode == "eager" and u.object in self.plan.static_set:
            return [ShipUpdates((u.uid,))]
        return []

    def finalize(self) -> list[Decision]:
        return []


def nocache(events: list[Event], catalog: ObjectCatalog) -> TrafficLedger:
    from .simharness import RunConfig, run
    return run(events, catalog, RunConfig(policy="nocache", seed=0, cache_bytes=0)).ledger


def replica(events: list[Event], catalog: ObjectCatalog) -> TrafficLedger:
    from .simharness import RunConfig, run
    return run(events, catalog, RunConfig(policy="replica", seed=0, cache_bytes=0)).ledger


def soptimal(events: list[Event], catalog: ObjectCatalog, capacity: int,
             mode: str = "eager") -> tuple[SOptimalPlan, TrafficLedger]:
    from .simharness import RunConfig, run
    plan = plan_static_set(events, catalog, capacity)
    report = run(events, catalog,
                 RunConfig(policy="soptimal", seed=0, cache_bytes=capacity,
                           params={"mode": mode}))
    return plan, report.ledger
