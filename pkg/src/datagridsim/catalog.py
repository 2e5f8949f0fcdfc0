"""Replica catalog: a global file-to-sites index mirrored by per-site stores.

The catalog answers "which sites hold this file" while each store tracks
space accounting and the last-access stamps that drive LRU eviction.
Mutations keep both views consistent; callers that break a precondition
get an exception rather than a silently corrupt index.
"""
from dataclasses import dataclass

from .errors import ConfigurationError, SimulationError


@dataclass(slots=True)
class Replica:
    lfn: str
    size_bytes: int
    pinned: bool
    last_access_us: int


class ReplicaStore:
    """Holdings of one site's storage element.

    reserved_bytes earmarks space for replicas whose transfer is still in
    flight, so planning decisions never promise the same bytes twice.
    """

    __slots__ = ("site_id", "capacity_bytes", "used_bytes", "reserved_bytes", "_replicas")

    def __init__(self, site_id: int, capacity_bytes: int):
        if capacity_bytes < 1:
            raise ConfigurationError(f"storage capacity must be >= 1 byte, got {capacity_bytes}")
        self.site_id = site_id
        self.capacity_bytes = capacity_bytes
        self.used_bytes = 0
        self.reserved_bytes = 0
        self._replicas: dict[str, Replica] = {}

    def holds(self, lfn: str) -> bool:
        return lfn in self._replicas

    def get(self, lfn: str) -> Replica | None:
        return self._replicas.get(lfn)

    def replicas(self):
        return self._replicas.values()

    @property
    def free_bytes(self) -> int:
        return self.capacity_bytes - self.used_bytes - self.reserved_bytes

    def __len__(self) -> int:
        return len(self._replicas)


class ReplicaCatalog:
    """Central index plus the per-site stores it mirrors.

    The holder sets returned by holders() are internal state; callers
    must treat them as read-only.
    """

    __slots__ = ("stores", "_holders")

    def __init__(self, capacities):
        self.stores = [ReplicaStore(i, cap) for i, cap in enumerate(capacities)]
        self._holders: dict[str, set[int]] = {}

    @property
    def n_sites(self) -> int:
        return len(self.stores)

    def register(self, lfn: str, site_id: int, size_bytes: int, time_us: int,
                 pinned: bool = False) -> None:
        store = self.stores[site_id]
        if lfn in store._replicas:
            raise SimulationError(f"{lfn} already registered at site {site_id}")
        if size_bytes > store.free_bytes:
            raise SimulationError(
                f"cannot register {lfn} at site {site_id}: "
                f"{size_bytes} bytes needed, {store.free_bytes} free"
            )
        store._replicas[lfn] = Replica(lfn, size_bytes, pinned, time_us)
        store.used_bytes += size_bytes
        self._holders.setdefault(lfn, set()).add(site_id)

    def unregister(self, lfn: str, site_id: int) -> None:
        store = self.stores[site_id]
        rep = store._replicas.get(lfn)
        if rep is None:
            raise SimulationError(f"{lfn} is not registered at site {site_id}")
        if rep.pinned:
            raise SimulationError(f"refusing to unregister pinned replica {lfn} at site {site_id}")
        holders = self._holders[lfn]
        if len(holders) < 2:
            raise SimulationError(f"refusing to unregister the last copy of {lfn}")
        del store._replicas[lfn]
        store.used_bytes -= rep.size_bytes
        holders.discard(site_id)

    def touch(self, lfn: str, site_id: int, time_us: int) -> None:
        rep = self.stores[site_id]._replicas.get(lfn)
        if rep is None:
            raise SimulationError(f"cannot touch {lfn} at site {site_id}: not held")
        rep.last_access_us = time_us

    def locate(self, lfn: str) -> tuple[int, ...]:
        """All holders of lfn, ascending site id."""
        holders = self._holders.get(lfn)
        if holders is None:
            raise ConfigurationError(f"unknown lfn {lfn!r}")
        return tuple(sorted(holders))

    def holders(self, lfn: str) -> set[int]:
        """Holder set for lfn; empty for a file with no copies anywhere."""
        holders = self._holders.get(lfn)
        if holders is None:
            return set()
        return holders

    def holds(self, site_id: int, lfn: str) -> bool:
        return lfn in self.stores[site_id]._replicas

    def free_space(self, site_id: int) -> int:
        return self.stores[site_id].free_bytes

    def reserve(self, site_id: int, size_bytes: int) -> None:
        store = self.stores[site_id]
        if size_bytes > store.free_bytes:
            raise SimulationError(
                f"cannot reserve {size_bytes} bytes at site {site_id}: "
                f"{store.free_bytes} free"
            )
        store.reserved_bytes += size_bytes

    def release(self, site_id: int, size_bytes: int) -> None:
        store = self.stores[site_id]
        if size_bytes > store.reserved_bytes:
            raise SimulationError(
                f"cannot release {size_bytes} bytes at site {site_id}: "
                f"only {store.reserved_bytes} reserved"
            )
        store.reserved_bytes -= size_bytes

    def consistency_check(self, expected_lfns=None) -> None:
        """Verify both index directions and space soundness; raise on breakage."""
        for store in self.stores:
            total = 0
            for lfn, rep in store._replicas.items():
                total += rep.size_bytes
                if store.site_id not in self._holders.get(lfn, ()):
                    raise SimulationError(
                        f"store {store.site_id} holds {lfn} but the index does not list it"
                    )
            if total != store.used_bytes:
                raise SimulationError(
                    f"site {store.site_id} used_bytes {store.used_bytes} != sum of sizes {total}"
                )
            if store.reserved_bytes < 0:
                raise SimulationError(f"site {store.site_id} has negative reservations")
            if store.used_bytes + store.reserved_bytes > store.capacity_bytes:
                raise SimulationError(f"site {store.site_id} is over capacity")
        for lfn, holders in self._holders.items():
            for site_id in holders:
                if lfn not in self.stores[site_id]._replicas:
                    raise SimulationError(
                        f"index lists {lfn} at site {site_id} but the store lacks it"
                    )
        if expected_lfns is not None:
            for lfn in expected_lfns:
                if not self._holders.get(lfn):
                    raise SimulationError(f"no surviving copy of {lfn}")
