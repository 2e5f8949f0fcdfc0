"""Strategy plans: source choice, store mode branches, two-phase eviction."""
import random

import pytest

from datagridsim.catalog import ReplicaCatalog
from datagridsim.errors import SimulationError
from datagridsim.replication import (
    FetchPlan,
    StoreMode,
    StrategyKind,
    bhr_fetch,
    evict_lru,
    evict_two_phase,
    hrs_fetch,
    lru_fetch,
    plan_fetch,
    select_best_replica,
)
from datagridsim.topology import GridTopology

# sites 0,1,2 in region 0; sites 3,4,5 in region 1
TOPO = GridTopology(n_regions=2, sites_per_region=3, wan_mbps=10,
                    lan_mbps=1000, mips=1000)


def make_catalog(capacity, replicas):
    """replicas: (lfn, site, size, pinned, last_access) tuples.

    capacity is one size for every site, or a per-site list.
    """
    caps = capacity if isinstance(capacity, list) else [capacity] * TOPO.n_sites
    catalog = ReplicaCatalog(caps)
    for lfn, site, size, pinned, last_access in replicas:
        catalog.register(lfn, site, size, last_access, pinned=pinned)
    return catalog


def test_best_replica_prefers_fast_link():
    assert select_best_replica(TOPO, [1, 4], dest=0) == 1
    assert select_best_replica(TOPO, [2, 3], dest=5) == 3


def test_best_replica_tie_by_lowest_id():
    assert select_best_replica(TOPO, [2, 1], dest=0) == 1
    assert select_best_replica(TOPO, [5, 4], dest=0) == 4  # both WAN


def test_best_replica_single_candidate():
    assert select_best_replica(TOPO, [3], dest=0) == 3


def test_best_replica_empty_is_fatal():
    with pytest.raises(SimulationError):
        select_best_replica(TOPO, [], dest=0)


# --- hrs ---

def test_hrs_already_local():
    catalog = make_catalog(1000, [("a", 0, 100, True, 0)])
    plan = hrs_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan == FetchPlan("a", 0, 0, StoreMode.ALREADY_LOCAL, ())


def test_hrs_intra_with_space_persists():
    catalog = make_catalog(1000, [("a", 1, 100, True, 0), ("a", 3, 100, False, 0)])
    plan = hrs_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 1
    assert plan.evictions == ()


def test_hrs_intra_on_full_borrows_without_evicting():
    catalog = make_catalog([1000, 2000, 1000, 1000, 1000, 1000], [
        ("a", 1, 100, True, 0),
        ("old", 0, 1000, False, 0),  # dest is full of an evictable file
        ("old", 1, 1000, False, 0),
    ])
    plan = hrs_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.TEMP_BUFFER
    assert plan.source_site == 1
    assert plan.evictions == ()


def test_hrs_inter_with_space_persists():
    catalog = make_catalog(1000, [("a", 3, 100, True, 0), ("a", 4, 100, False, 0)])
    plan = hrs_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 3  # WAN tie broken by id
    assert plan.evictions == ()


def test_hrs_intra_beats_better_nothing_no_inter_pollution():
    # intra-region source wins even though an inter-region holder also exists
    catalog = make_catalog(1000, [("a", 2, 100, True, 0), ("a", 3, 100, False, 0)])
    plan = hrs_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.source_site == 2


def test_hrs_inter_on_full_evicts_two_phase():
    catalog = make_catalog(1000, [
        ("a", 3, 400, True, 0),
        # region-duplicated victim (also at site 1, same region as dest 0)
        ("r", 0, 400, False, 50),
        ("r", 1, 400, False, 50),
        # globally duplicated victim, older than r
        ("g", 0, 600, False, 10),
        ("g", 4, 600, False, 10),
    ])
    plan = hrs_fetch(catalog, TOPO, "a", 400, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 3
    # phase 1 reaches r first despite g being least recently used
    assert plan.evictions == ("r",)


def test_hrs_inter_on_full_phase2_when_phase1_short():
    catalog = make_catalog(1000, [
        ("a", 3, 900, True, 0),
        ("r", 0, 400, False, 50),
        ("r", 1, 400, False, 50),
        ("g", 0, 600, False, 10),
        ("g", 4, 600, False, 10),
    ])
    plan = hrs_fetch(catalog, TOPO, "a", 900, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.evictions == ("r", "g")


def test_hrs_insufficient_falls_back_to_temp():
    catalog = make_catalog(1000, [
        ("a", 3, 500, True, 0),
        ("keep", 0, 1000, True, 0),  # pinned wall
    ])
    plan = hrs_fetch(catalog, TOPO, "a", 500, 0, frozenset())
    assert plan.mode is StoreMode.TEMP_BUFFER
    assert plan.evictions == ()


# --- eviction helpers ---

def test_two_phase_prefers_region_duplicates():
    catalog = make_catalog(1000, [
        ("r", 0, 400, False, 90),
        ("r", 2, 400, False, 90),
        ("g", 0, 600, False, 5),
        ("g", 5, 600, False, 5),
    ])
    evictions, enough = evict_two_phase(catalog, TOPO, 0, 400, frozenset())
    assert enough
    assert evictions == ("r",)


def test_two_phase_lru_order_within_phase():
    catalog = make_catalog(900, [
        ("x", 0, 300, False, 30),
        ("x", 1, 300, False, 30),
        ("y", 0, 300, False, 10),
        ("y", 1, 300, False, 10),
        ("z", 0, 300, False, 20),
        ("z", 2, 300, False, 20),
    ])
    evictions, enough = evict_two_phase(catalog, TOPO, 0, 600, frozenset())
    assert enough
    assert evictions == ("y", "z")


def test_two_phase_tie_broken_by_lfn():
    catalog = make_catalog(600, [
        ("b", 0, 300, False, 10),
        ("b", 1, 300, False, 10),
        ("a", 0, 300, False, 10),
        ("a", 1, 300, False, 10),
    ])
    evictions, _ = evict_two_phase(catalog, TOPO, 0, 300, frozenset())
    assert evictions == ("a",)


def test_two_phase_skips_pinned_protected_and_singletons():
    catalog = make_catalog(1200, [
        ("pin", 0, 300, True, 1),
        ("mine", 0, 300, False, 2),
        ("mine", 1, 300, False, 2),
        ("solo", 0, 300, False, 3),
        ("dup", 0, 300, False, 4),
        ("dup", 1, 300, False, 4),
    ])
    evictions, enough = evict_two_phase(catalog, TOPO, 0, 300, frozenset({"mine"}))
    assert enough
    assert evictions == ("dup",)


def test_two_phase_insufficient_returns_nothing():
    catalog = make_catalog(1000, [
        ("pin", 0, 600, True, 1),
        ("dup", 0, 400, False, 2),
        ("dup", 1, 400, False, 2),
    ])
    evictions, enough = evict_two_phase(catalog, TOPO, 0, 900, frozenset())
    assert not enough
    assert evictions == ()


def test_two_phase_no_need_no_evictions():
    catalog = make_catalog(1000, [
        ("dup", 0, 400, False, 2),
        ("dup", 1, 400, False, 2),
    ])
    evictions, enough = evict_two_phase(catalog, TOPO, 0, 500, frozenset())
    assert enough
    assert evictions == ()


def test_single_phase_ignores_region_structure():
    catalog = make_catalog(1000, [
        ("r", 0, 400, False, 90),
        ("r", 2, 400, False, 90),
        ("g", 0, 600, False, 5),
        ("g", 5, 600, False, 5),
    ])
    evictions, enough = evict_lru(catalog, 0, 400, frozenset())
    assert enough
    assert evictions == ("g",)  # strictly least recently used


# --- bhr ---

def test_bhr_already_local():
    catalog = make_catalog(1000, [("a", 0, 100, True, 0)])
    plan = bhr_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.ALREADY_LOCAL


def test_bhr_space_persists_from_best_source():
    catalog = make_catalog(1000, [("a", 2, 100, True, 0), ("a", 3, 100, False, 0)])
    plan = bhr_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 2


def test_bhr_full_with_intra_holder_borrows():
    catalog = make_catalog(1000, [
        ("a", 1, 100, True, 0),
        ("old", 0, 1000, False, 0),
        ("old", 3, 1000, False, 0),
    ])
    plan = bhr_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.TEMP_BUFFER
    assert plan.evictions == ()


def test_bhr_full_without_intra_holder_evicts_single_phase():
    catalog = make_catalog(1000, [
        ("a", 3, 400, True, 0),
        ("r", 0, 300, False, 50),
        ("r", 1, 300, False, 50),
        ("g", 0, 700, False, 10),
        ("g", 4, 700, False, 10),
    ])
    plan = bhr_fetch(catalog, TOPO, "a", 400, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 3
    # single-phase LRU: g is oldest, no region preference
    assert plan.evictions == ("g",)


def test_bhr_insufficient_falls_back_to_temp():
    catalog = make_catalog(1000, [
        ("a", 3, 500, True, 0),
        ("keep", 0, 1000, True, 0),
    ])
    plan = bhr_fetch(catalog, TOPO, "a", 500, 0, frozenset())
    assert plan.mode is StoreMode.TEMP_BUFFER
    assert plan.evictions == ()


# --- lru ---

def test_lru_always_persists_when_possible():
    catalog = make_catalog([1000, 2000, 1000, 1000, 1000, 1000], [
        ("a", 1, 100, True, 0),
        ("old", 0, 1000, False, 7),
        ("old", 1, 1000, False, 7),
    ])
    plan = lru_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    # where bhr would borrow, lru evicts and keeps the copy
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 1
    assert plan.evictions == ("old",)


def test_lru_space_persists_without_evicting():
    catalog = make_catalog(1000, [("a", 4, 100, True, 0)])
    plan = lru_fetch(catalog, TOPO, "a", 100, 0, frozenset())
    assert plan.mode is StoreMode.PERSIST
    assert plan.source_site == 4
    assert plan.evictions == ()


def test_lru_insufficient_falls_back_to_temp():
    catalog = make_catalog(1000, [
        ("a", 3, 500, True, 0),
        ("keep", 0, 700, True, 0),
        ("solo", 0, 300, False, 0),  # only copy, cannot go
    ])
    plan = lru_fetch(catalog, TOPO, "a", 500, 0, frozenset())
    assert plan.mode is StoreMode.TEMP_BUFFER
    assert plan.evictions == ()


def test_plan_fetch_dispatches_by_kind():
    catalog = make_catalog([1000, 2000, 1000, 1000, 1000, 1000], [
        ("a", 1, 100, True, 0),
        ("old", 0, 1000, False, 7),
        ("old", 1, 1000, False, 7),
    ])
    hrs = plan_fetch(StrategyKind.HRS, catalog, TOPO, "a", 100, 0, frozenset())
    bhr = plan_fetch(StrategyKind.BHR, catalog, TOPO, "a", 100, 0, frozenset())
    lru = plan_fetch(StrategyKind.LRU, catalog, TOPO, "a", 100, 0, frozenset())
    assert hrs.mode is StoreMode.TEMP_BUFFER
    assert bhr.mode is StoreMode.TEMP_BUFFER
    assert lru.mode is StoreMode.PERSIST


# --- randomized properties ---

def random_state(check):
    """A random consistent catalog over TOPO with mixed pins and ages.

    Returns only the lfns that actually found a home somewhere.
    """
    catalog = ReplicaCatalog([check.randrange(500, 3000) for _ in range(TOPO.n_sites)])
    lfns = [f"f{i}" for i in range(check.randint(2, 8))]
    sizes = {lfn: check.randrange(50, 400) for lfn in lfns}
    placed = []
    for lfn in lfns:
        sites = check.sample(range(TOPO.n_sites), check.randint(1, 4))
        landed = False
        for idx, site in enumerate(sites):
            if catalog.free_space(site) >= sizes[lfn]:
                catalog.register(lfn, site, sizes[lfn], check.randrange(100),
                                 pinned=(idx == 0 and check.random() < 0.5))
                landed = True
        if landed:
            placed.append(lfn)
    return catalog, placed, sizes


def test_hrs_region_priority_property():
    check = random.Random(17)
    hits = 0
    for _ in range(500):
        catalog, lfns, sizes = random_state(check)
        if not lfns:
            continue
        lfn = check.choice(lfns)
        dest = check.randrange(TOPO.n_sites)
        plan = hrs_fetch(catalog, TOPO, lfn, sizes[lfn], dest, frozenset())
        if plan.mode is StoreMode.ALREADY_LOCAL:
            continue
        intra = [h for h in catalog.holders(lfn) if TOPO.same_region(h, dest)]
        if intra:
            hits += 1
            assert TOPO.same_region(plan.source_site, dest)
    assert hits > 50  # the property was actually exercised


def test_eviction_safety_and_minimality_property():
    check = random.Random(29)
    exercised = 0
    for _ in range(1500):
        catalog, lfns, sizes = random_state(check)
        dest = check.randrange(TOPO.n_sites)
        size = check.randrange(100, 1500)
        protected = frozenset(check.sample(lfns, check.randint(0, len(lfns) // 2)))
        if check.random() < 0.5:
            evictions, enough = evict_two_phase(catalog, TOPO, dest, size, protected)
        else:
            evictions, enough = evict_lru(catalog, dest, size, protected)
        free = catalog.free_space(dest)
        need = size - free
        if not enough:
            assert evictions == ()
            continue
        freed = 0
        for lfn in evictions:
            rep = catalog.stores[dest].get(lfn)
            assert rep is not None
            assert not rep.pinned
            assert lfn not in protected
            assert len(catalog.holders(lfn)) >= 2
            freed += rep.size_bytes
        assert freed >= need or need <= 0
        if evictions:
            exercised += 1
            last = catalog.stores[dest].get(evictions[-1]).size_bytes
            assert freed - last < need  # dropping the last victim would starve the plan
        assert len(set(evictions)) == len(evictions)
        # applying the plan keeps the catalog sound
        for lfn in evictions:
            catalog.unregister(lfn, dest)
        catalog.consistency_check()
        assert catalog.free_space(dest) >= size or need <= 0
    assert exercised > 100


def test_plans_never_evict_own_lfn():
    check = random.Random(31)
    for _ in range(500):
        catalog, lfns, sizes = random_state(check)
        if not lfns:
            continue
        lfn = check.choice(lfns)
        dest = check.randrange(TOPO.n_sites)
        kind = check.choice(list(StrategyKind))
        plan = plan_fetch(kind, catalog, TOPO, lfn, sizes[lfn], dest, frozenset({lfn}))
        assert lfn not in plan.evictions
        if plan.mode is StoreMode.ALREADY_LOCAL:
            assert plan.source_site == plan.dest_site == dest
            assert plan.evictions == ()


def test_single_region_strategies_agree():
    """With no WAN, plans differ only in the evict-versus-borrow branch."""
    lan = GridTopology(1, 4, 1000, 1000, 100)
    check = random.Random(41)
    for _ in range(400):
        catalog = ReplicaCatalog([check.randrange(300, 1500) for _ in range(4)])
        lfns = [f"f{i}" for i in range(4)]
        sizes = {lfn: check.randrange(50, 400) for lfn in lfns}
        placed = set()
        for lfn in lfns:
            for site in range(4):
                if check.random() < 0.4 and catalog.free_space(site) >= sizes[lfn]:
                    catalog.register(lfn, site, sizes[lfn], check.randrange(50),
                                     pinned=check.random() < 0.3)
                    placed.add(lfn)
        if not placed:
            continue
        lfn = check.choice(sorted(placed))
        dest = check.randrange(4)
        hrs = hrs_fetch(catalog, lan, lfn, sizes[lfn], dest, frozenset())
        bhr = bhr_fetch(catalog, lan, lfn, sizes[lfn], dest, frozenset())
        lru = lru_fetch(catalog, lan, lfn, sizes[lfn], dest, frozenset())
        assert hrs == bhr
        assert lru.lfn == hrs.lfn and lru.source_site == hrs.source_site
        if hrs.mode is not StoreMode.TEMP_BUFFER:
            assert lru == hrs  # divergence is confined to the full-store case
