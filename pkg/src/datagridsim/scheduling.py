"""Broker policy: send each job where the most of its data already sits.

Sites are ranked by the total bytes of the job's required files they hold
(committed replicas only; in-flight transfers and per-job temp buffers do
not count). Ties fall to the smallest relative load, then the lowest site
id. Loads are exact rationals so the comparison never depends on float
rounding.
"""
from fractions import Fraction

from .catalog import ReplicaCatalog


def data_score(catalog: ReplicaCatalog, sizes: dict[str, int],
               required, site_id: int) -> int:
    return sum(sizes[lfn] for lfn in required if catalog.holds(site_id, lfn))


def relative_load(queued_mi: int, mips: int) -> Fraction:
    """Queued work divided by compute capacity, in seconds."""
    return Fraction(queued_mi, mips)


def select_site(catalog: ReplicaCatalog, sizes: dict[str, int], required,
                queued_mi, mips) -> int:
    """Pick the execution site for a job with the given required files.

    queued_mi and mips are per-site sequences indexed by site id. Only
    sites holding at least one required file can score above zero, so the
    scan is restricted to holders unless there are none.
    """
    scores: dict[int, int] = {}
    for lfn in required:
        size = sizes[lfn]
        for site_id in catalog.holders(lfn):
            scores[site_id] = scores.get(site_id, 0) + size
    if not scores:
        return min(range(len(queued_mi)),
                   key=lambda s: (Fraction(queued_mi[s], mips[s]), s))
    return min(scores,
               key=lambda s: (-scores[s], Fraction(queued_mi[s], mips[s]), s))
