"""Two-level grid topology: regions of sites joined by a wide-area network.

Sites inside one region exchange data over the regional LAN; sites in
different regions go over the WAN. Transfer times are exact integer
microsecond counts derived from decimal units (1 Mbps = 10**6 bits/s).
"""
from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True, slots=True)
class Site:
    site_id: int
    region_id: int
    mips: int


class GridTopology:
    __slots__ = ("n_regions", "sites_per_region", "wan_mbps", "lan_mbps", "sites", "_by_region")

    def __init__(self, n_regions: int, sites_per_region: int, wan_mbps: int,
                 lan_mbps: int, mips: int):
        if n_regions < 1:
            raise ConfigurationError(f"n_regions must be >= 1, got {n_regions}")
        if sites_per_region < 1:
            raise ConfigurationError(f"sites_per_region must be >= 1, got {sites_per_region}")
        if wan_mbps < 1:
            raise ConfigurationError(f"wan_mbps must be >= 1, got {wan_mbps}")
        if lan_mbps < 1:
            raise ConfigurationError(f"lan_mbps must be >= 1, got {lan_mbps}")
        if mips < 1:
            raise ConfigurationError(f"mips must be >= 1, got {mips}")
        self.n_regions = n_regions
        self.sites_per_region = sites_per_region
        self.wan_mbps = wan_mbps
        self.lan_mbps = lan_mbps
        self.sites: list[Site] = []
        self._by_region: list[list[int]] = [[] for _ in range(n_regions)]
        for region_id in range(n_regions):
            for _ in range(sites_per_region):
                site_id = len(self.sites)
                self.sites.append(Site(site_id, region_id, mips))
                self._by_region[region_id].append(site_id)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def _check_site(self, site_id: int) -> None:
        if not 0 <= site_id < len(self.sites):
            raise ConfigurationError(f"unknown site id {site_id}")

    def region_of(self, site_id: int) -> int:
        self._check_site(site_id)
        return self.sites[site_id].region_id

    def same_region(self, a: int, b: int) -> bool:
        self._check_site(a)
        self._check_site(b)
        return self.sites[a].region_id == self.sites[b].region_id

    def is_inter_region(self, a: int, b: int) -> bool:
        return not self.same_region(a, b)

    def sites_in_region(self, region_id: int) -> list[int]:
        return list(self._by_region[region_id])

    def bandwidth_mbps(self, a: int, b: int) -> int:
        """Link speed between two distinct sites; undefined for a == b."""
        return self.lan_mbps if self.same_region(a, b) else self.wan_mbps

    def transfer_time_us(self, size_bytes: int, src: int, dst: int) -> int:
        """Microseconds to move size_bytes from src to dst, rounded up.

        A site copying to itself takes no time. With decimal units the
        per-byte cost in microseconds is 8 / mbps, so the total is
        ceil(size_bytes * 8 / mbps) with exact integer arithmetic.
        """
        if src == dst:
            return 0
        mbps = self.bandwidth_mbps(src, dst)
        bits = size_bytes * 8
        return -(-bits // mbps)
