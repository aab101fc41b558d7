import random
from itertools import combinations

from midcache.core import ObjectCatalog, Query, Update
from midcache.workload import GeneratorParams, generate
from midcache.yardsticks import nocache, replica, soptimal
from tests.conftest import mk_query, mk_update
from tests.oracles import static_set_replay_cost


def micro_trace():
    return [
        mk_update(1, 1, 0, 4),
        mk_query(2, 2, {0, 1}, 10),
        mk_update(3, 3, 1, 6),
        mk_query(4, 4, {1}, 7),
        mk_query(5, 5, {2}, 3),
    ]


class TestNoCache:
    def test_empty_trace(self, small_catalog):
        assert nocache([], small_catalog).total == 0

    def test_equals_query_cost_fold(self, small_catalog):
        events = micro_trace()
        ledger = nocache(events, small_catalog)
        fold = sum(e.ship_cost for e in events if isinstance(e, Query))
        assert ledger.total == ledger.query_ship == fold == 20

    def test_constant_under_update_sweep(self, small_catalog):
        base = micro_trace()
        costs = []
        for extra in (0, 10, 30):
            events = list(base)
            t = 100
            for k in range(extra):
                t += 1
                events.append(mk_update(100 + k, t, k % 4, 5, seq=len(events) + 1))
            costs.append(nocache(events, small_catalog).total)
        assert costs == [costs[0]] * 3


class TestReplica:
    def test_zero_updates(self, small_catalog):
        events = [mk_query(1, 1, {0}, 9)]
        assert replica(events, small_catalog).total == 0

    def test_equals_update_cost_fold(self, small_catalog):
        events = micro_trace()
        ledger = replica(events, small_catalog)
        fold = sum(e.ship_cost for e in events if isinstance(e, Update))
        assert ledger.total == ledger.update_ship == fold == 10

    def test_tripling_updates_triples_cost(self, small_catalog):
        base = micro_trace()
        tripled = []
        seq = 0
        for ev in base:
            copies = 3 if isinstance(ev, Update) else 1
            for c in range(copies):
                seq += 1
                if isinstance(ev, Update):
                    tripled.append(mk_update(1000 * c + ev.uid, ev.time, ev.object,
                                             ev.ship_cost, seq=seq))
                else:
                    tripled.append(mk_query(ev.qid, ev.time, ev.objects,
                                            ev.ship_cost, ev.tolerance, seq=seq))
        assert replica(tripled, small_catalog).total == \
            3 * replica(base, small_catalog).total


class TestSOptimal:
    def test_zero_capacity_degenerates_to_nocache(self, small_catalog):
        events = micro_trace()
        _, ledger = soptimal(events, small_catalog, capacity=0)
        assert ledger.total == nocache(events, small_catalog).total

    def test_single_absorber_selected(self):
        catalog = ObjectCatalog.from_sizes({0: 10, 1: 10})
        events = [mk_query(i, i, {0}, 8) for i in range(1, 6)]
        plan, ledger = soptimal(events, catalog, capacity=10)
        assert plan.static_set == {0}
        assert ledger.total == 10   # one load, all queries answered free

    def test_eager_mode_ships_every_member_update(self, small_catalog):
        events = micro_trace()
        plan, ledger = soptimal(events, small_catalog, capacity=100, mode="eager")
        fold = static_set_replay_cost(events, small_catalog, plan.static_set,
                                      eager=True)
        assert ledger.total == fold

    def test_lazy_mode_ships_on_demand_only(self):
        catalog = ObjectCatalog.from_sizes({0: 2})
        events = [mk_query(1, 1, {0}, 50),
                  mk_update(2, 2, 0, 5),
                  mk_query(3, 3, {0}, 50, tol=0),
                  mk_update(4, 4, 0, 5)]   # never demanded afterwards
        plan, eager_ledger = soptimal(events, catalog, capacity=2, mode="eager")
        assert plan.static_set == {0}
        _, lazy_ledger = soptimal(events, catalog, capacity=2, mode="lazy")
        assert eager_ledger.update_ship == 10
        assert lazy_ledger.update_ship == 5
        assert lazy_ledger.total == lazy_ledger.update_ship + eager_ledger.load

    def test_greedy_choice_vs_exhaustive_static_sets(self):
        # small instance: greedy static set within 10% of the true best
        params = GeneratorParams(n_objects=4, n_queries=15, n_updates=15,
                                 query_hotspots=(0, 1), update_hotspots=(2, 3),
                                 size_min=10, size_max=100)
        catalog, events = generate(params, seed=21)
        capacity = catalog.total_size // 2
        plan, ledger = soptimal(events, catalog, capacity)
        best = min(
            static_set_replay_cost(events, catalog, frozenset(combo))
            for r in range(len(catalog) + 1)
            for combo in combinations(catalog.ids(), r)
            if sum(catalog.size(o) for o in combo) <= capacity)
        assert ledger.total <= 1.1 * best

    def test_replay_matches_independent_fold(self):
        rng = random.Random(4)
        catalog = ObjectCatalog.from_sizes({i: rng.randint(5, 20) for i in range(5)})
        events = []
        t = 0
        for seq in range(1, 31):
            t += rng.randint(1, 3)
            if rng.random() < 0.5:
                events.append(mk_update(seq, t, rng.randrange(5), rng.randint(1, 6), seq=seq))
            else:
                objs = set(rng.sample(range(5), rng.randint(1, 2)))
                events.append(mk_query(seq, t, objs, rng.randint(1, 15),
                                       tol=rng.choice([0, 2]), seq=seq))
        capacity = 30
        plan, ledger = soptimal(events, catalog, capacity)
        assert ledger.total == static_set_replay_cost(events, catalog,
                                                      plan.static_set, eager=True)
        _, lazy = soptimal(events, catalog, capacity, mode="lazy")
        assert lazy.total == static_set_replay_cost(events, catalog,
                                                    plan.static_set, eager=False)
