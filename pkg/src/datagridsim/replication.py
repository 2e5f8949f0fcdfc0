"""Replication strategies: where to fetch a missing file from and how to keep it.

Three policies share one plan shape:

* hierarchical (hrs): sources inside the destination's region take absolute
  priority; eviction to make room for a cross-region fetch runs in two
  phases, first dropping replicas that are duplicated elsewhere in the same
  region, then replicas duplicated anywhere.
* bandwidth (bhr): best source over all holders; a full site borrows the
  file into the temp buffer when an in-region holder exists, and otherwise
  evicts in plain least-recently-used order.
* lru: always tries to persist, evicting in least-recently-used order.

Eviction never touches pinned replicas, the requesting job's own required
files, or the last surviving copy of a file. A plan whose evictions cannot
free enough space degrades to a temp-buffer fetch with no evictions at all
(evicting would waste replicas the fetch can no longer use the space for).

Plans are pure decisions over the current catalog state; the caller applies
them.
"""
from dataclasses import dataclass
from enum import Enum

from .catalog import ReplicaCatalog
from .errors import SimulationError
from .topology import GridTopology


class StoreMode(Enum):
    PERSIST = "persist"
    TEMP_BUFFER = "temp"
    ALREADY_LOCAL = "local"


class StrategyKind(Enum):
    HRS = "hrs"
    BHR = "bhr"
    LRU = "lru"


@dataclass(frozen=True, slots=True)
class FetchPlan:
    lfn: str
    source_site: int
    dest_site: int
    mode: StoreMode
    evictions: tuple[str, ...]


def select_best_replica(topology: GridTopology, candidates, dest: int) -> int:
    """Holder with the fastest link to dest; ties go to the lowest site id."""
    if not candidates:
        raise SimulationError("no candidate replicas to select from")
    return min(candidates, key=lambda c: (-topology.bandwidth_mbps(c, dest), c))


def _evictable(catalog: ReplicaCatalog, dest: int, protected):
    """Unpinned, unprotected, duplicated replicas at dest in LRU order."""
    out = []
    for rep in catalog.stores[dest].replicas():
        if rep.pinned or rep.lfn in protected:
            continue
        if len(catalog.holders(rep.lfn)) < 2:
            continue
        out.append(rep)
    out.sort(key=lambda r: (r.last_access_us, r.lfn))
    return out


def _take_until(phases, need_bytes):
    chosen: list[str] = []
    seen: set[str] = set()
    freed = 0
    for phase in phases:
        for rep in phase:
            if freed >= need_bytes:
                return tuple(chosen), True
            if rep.lfn in seen:
                continue
            seen.add(rep.lfn)
            chosen.append(rep.lfn)
            freed += rep.size_bytes
    if freed >= need_bytes:
        return tuple(chosen), True
    return (), False


def evict_two_phase(catalog: ReplicaCatalog, topology: GridTopology, dest: int,
                    size_bytes: int, protected) -> tuple[tuple[str, ...], bool]:
    """Evictions freeing room for size_bytes at dest, or ((), False).

    Phase one is restricted to replicas that another site in dest's region
    also holds; phase two admits any duplicated replica. Selection stops
    the moment enough space is freed, so a sufficient list is minimal
    under that ordering.
    """
    need = size_bytes - catalog.free_space(dest)
    candidates = _evictable(catalog, dest, protected)
    region_dup = [
        rep for rep in candidates
        if any(h != dest and topology.same_region(h, dest)
               for h in catalog.holders(rep.lfn))
    ]
    return _take_until((region_dup, candidates), need)


def evict_lru(catalog: ReplicaCatalog, dest: int, size_bytes: int,
              protected) -> tuple[tuple[str, ...], bool]:
    """Single-phase variant: any duplicated replica, LRU order."""
    need = size_bytes - catalog.free_space(dest)
    return _take_until((_evictable(catalog, dest, protected),), need)


def hrs_fetch(catalog: ReplicaCatalog, topology: GridTopology, lfn: str,
              size_bytes: int, dest: int, protected) -> FetchPlan:
    if catalog.holds(dest, lfn):
        return FetchPlan(lfn, dest, dest, StoreMode.ALREADY_LOCAL, ())
    holders = catalog.holders(lfn)
    intra = [h for h in holders if topology.same_region(h, dest)]
    if intra:
        src = select_best_replica(topology, intra, dest)
        if catalog.free_space(dest) >= size_bytes:
            return FetchPlan(lfn, src, dest, StoreMode.PERSIST, ())
        return FetchPlan(lfn, src, dest, StoreMode.TEMP_BUFFER, ())
    src = select_best_replica(topology, holders, dest)
    if catalog.free_space(dest) >= size_bytes:
        return FetchPlan(lfn, src, dest, StoreMode.PERSIST, ())
    evictions, enough = evict_two_phase(catalog, topology, dest, size_bytes, protected)
    if enough:
        return FetchPlan(lfn, src, dest, StoreMode.PERSIST, evictions)
    return FetchPlan(lfn, src, dest, StoreMode.TEMP_BUFFER, ())


def bhr_fetch(catalog: ReplicaCatalog, topology: GridTopology, lfn: str,
              size_bytes: int, dest: int, protected) -> FetchPlan:
    if catalog.holds(dest, lfn):
        return FetchPlan(lfn, dest, dest, StoreMode.ALREADY_LOCAL, ())
    holders = catalog.holders(lfn)
    src = select_best_replica(topology, holders, dest)
    if catalog.free_space(dest) >= size_bytes:
        return FetchPlan(lfn, src, dest, StoreMode.PERSIST, ())
    if any(topology.same_region(h, dest) for h in holders):
        return FetchPlan(lfn, src, dest, StoreMode.TEMP_BUFFER, ())
    evictions, enough = evict_lru(catalog, dest, size_bytes, protected)
    if enough:
        return FetchPlan(lfn, src, dest, StoreMode.PERSIST, evictions)
    return FetchPlan(lfn, src, dest, StoreMode.TEMP_BUFFER, ())


def lru_fetch(catalog: ReplicaCatalog, topology: GridTopology, lfn: str,
              size_bytes: int, dest: int, protected) -> FetchPlan:
    if catalog.holds(dest, lfn):
        return FetchPlan(lfn, dest, dest, StoreMode.ALREADY_LOCAL, ())
    src = select_best_replica(topology, catalog.holders(lfn), dest)
    if catalog.free_space(dest) >= size_bytes:
        return FetchPlan(lfn, src, dest, StoreMode.PERSIST, ())
    evictions, enough = evict_lru(catalog, dest, size_bytes, protected)
    if enough:
        return FetchPlan(lfn, src, dest, StoreMode.PERSIST, evictions)
    return FetchPlan(lfn, src, dest, StoreMode.TEMP_BUFFER, ())


_FETCHERS = {
    StrategyKind.HRS: hrs_fetch,
    StrategyKind.BHR: bhr_fetch,
    StrategyKind.LRU: lru_fetch,
}


def plan_fetch(kind: StrategyKind, catalog: ReplicaCatalog, topology: GridTopology,
               lfn: str, size_bytes: int, dest: int, protected) -> FetchPlan:
    return _FETCHERS[kind](catalog, topology, lfn, size_bytes, dest, protected)
