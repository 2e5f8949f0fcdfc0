"""Per-job records, run-level aggregates, and the CSV renderings of both.

Aggregation is done in exact rational arithmetic and converted to float
only at the edge, so a mean recomputed from the dumped per-job rows equals
the summary value exactly. CSV output is fully deterministic: fixed header,
fixed sort order, fixed number formatting.
"""
import io
from dataclasses import dataclass
from fractions import Fraction

from .events import US_PER_S

SUMMARY_COLUMNS = (
    "strategy", "seed", "n_jobs", "wan_mbps", "lan_mbps",
    "mean_job_time_s", "mean_inter_per_job", "mean_intra_per_job",
    "total_bytes_wan", "total_bytes_lan", "makespan_s",
)

JOBS_COLUMNS = (
    "job_id", "type", "site", "submit_s", "start_s", "end_s",
    "staging_s", "queue_s", "proc_s", "n_inter", "n_intra",
)

CATALOG_COLUMNS = ("lfn", "site_id", "pinned", "last_access_us")


@dataclass(frozen=True, slots=True)
class JobRecord:
    job_id: int
    type_id: int
    site: int
    submit_us: int
    start_us: int
    end_us: int
    staging_us: int
    queue_us: int
    proc_us: int
    n_inter: int
    n_intra: int
    bytes_inter: int
    bytes_intra: int
    n_evictions: int

    @property
    def total_us(self) -> int:
        return self.end_us - self.submit_us


@dataclass(frozen=True, slots=True)
class RunSummary:
    strategy: str
    seed: int
    n_jobs: int
    wan_mbps: int
    lan_mbps: int
    mean_job_time_s: float | None
    mean_inter_per_job: float | None
    mean_intra_per_job: float | None
    total_bytes_wan: int
    total_bytes_lan: int
    makespan_s: float


def aggregate(records, *, strategy: str, seed: int, wan_mbps: int,
              lan_mbps: int) -> RunSummary:
    """Fold per-job records into one summary row; empty runs report no means."""
    n = len(records)
    total_bytes_wan = sum(r.bytes_inter for r in records)
    total_bytes_lan = sum(r.bytes_intra for r in records)
    if n == 0:
        return RunSummary(strategy, seed, 0, wan_mbps, lan_mbps,
                          None, None, None, 0, 0, 0.0)
    mean_time = Fraction(sum(r.total_us for r in records), n * US_PER_S)
    mean_inter = Fraction(sum(r.n_inter for r in records), n)
    mean_intra = Fraction(sum(r.n_intra for r in records), n)
    makespan = Fraction(max(r.end_us for r in records), US_PER_S)
    return RunSummary(strategy, seed, n, wan_mbps, lan_mbps,
                      float(mean_time), float(mean_inter), float(mean_intra),
                      total_bytes_wan, total_bytes_lan, float(makespan))


def _fmt_float(value) -> str:
    if value is None:
        return ""
    return "%.6g" % value


def _us_to_s(us: int) -> str:
    q, r = divmod(us, US_PER_S)
    return f"{q}.{r:06d}"


def render_summary_csv(summaries) -> str:
    rows = sorted(summaries, key=lambda s: (s.strategy, s.n_jobs, s.wan_mbps, s.seed))
    out = io.StringIO()
    out.write(",".join(SUMMARY_COLUMNS) + "\n")
    for s in rows:
        out.write(",".join((
            s.strategy, str(s.seed), str(s.n_jobs), str(s.wan_mbps), str(s.lan_mbps),
            _fmt_float(s.mean_job_time_s), _fmt_float(s.mean_inter_per_job),
            _fmt_float(s.mean_intra_per_job), str(s.total_bytes_wan),
            str(s.total_bytes_lan), _fmt_float(s.makespan_s),
        )) + "\n")
    return out.getvalue()


def render_jobs_csv(records) -> str:
    rows = sorted(records, key=lambda r: r.job_id)
    out = io.StringIO()
    out.write(",".join(JOBS_COLUMNS) + "\n")
    for r in rows:
        out.write(",".join((
            str(r.job_id), str(r.type_id), str(r.site),
            _us_to_s(r.submit_us), _us_to_s(r.start_us), _us_to_s(r.end_us),
            _us_to_s(r.staging_us), _us_to_s(r.queue_us), _us_to_s(r.proc_us),
            str(r.n_inter), str(r.n_intra),
        )) + "\n")
    return out.getvalue()


def render_catalog_csv(catalog) -> str:
    rows = []
    for store in catalog.stores:
        for rep in store.replicas():
            rows.append((rep.lfn, store.site_id, int(rep.pinned), rep.last_access_us))
    rows.sort()
    out = io.StringIO()
    out.write(",".join(CATALOG_COLUMNS) + "\n")
    for lfn, site_id, pinned, last_access in rows:
        out.write(f"{lfn},{site_id},{pinned},{last_access}\n")
    return out.getvalue()


def render_trace(trace) -> str:
    out = io.StringIO()
    for time_us, seq, kind, payload in trace:
        out.write(f"{time_us}\t{seq}\t{kind}\t{payload}\n")
    return out.getvalue()
