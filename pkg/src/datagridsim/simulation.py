"""Job lifecycle engine: submit, stage, queue, run, complete.

Each submitted job is dispatched to the site the broker picks, then its
missing files are fetched one at a time in the job's read order. Staging
overlaps queueing: transfers start at dispatch, while the job waits for
its turn behind earlier dispatches at the same site (strict FIFO, one
execution slot per site). The job starts once both its staging and the
slot are ready, so its turnaround is max(staging, queue wait) plus
processing.

The per-site replica manager never fetches the same file twice at once:
a job whose next missing file already has a persistent transfer inbound
attaches to that transfer and resumes when it lands. Persistent plans
reserve destination space when issued, so a transfer can always be
registered on arrival and concurrent plans never promise the same bytes
twice. Temp-buffer fetches are private to their job (no sharing, no
reservation) and are discarded when the job completes.

Eviction can remove a replica that a not-yet-finished job at the site
already staged. The bytes are still on site, so the replica is demoted
into that job's temp buffer instead of vanishing: the store obeys the
eviction (the file stops counting as locally available), while every
job keeps its staged inputs readable from dispatch through completion.
"""
from collections import deque
from dataclasses import dataclass, field

from .catalog import ReplicaCatalog
from .errors import ConfigurationError, SimulationError
from .events import US_PER_S, EventKind, EventQueue
from .metrics import JobRecord
from .replication import StoreMode, StrategyKind, plan_fetch
from .rng import Prng
from .scheduling import select_site
from .topology import GridTopology
from .workload import FileRecord, Job, JobType

BROKERS = ("data", "random")


def processing_time_us(length_mi: int, mips: int) -> int:
    """Compute time for length_mi on a mips-rated slot, rounded up to 1 us."""
    return -(-length_mi * US_PER_S // mips)


@dataclass(frozen=True, slots=True)
class FetchDecision:
    """Audit entry for one planned transfer, taken at decision time."""
    job_id: int
    lfn: str
    source_site: int
    dest_site: int
    mode: StoreMode
    had_intra_holder: bool


@dataclass(slots=True)
class _JobRt:
    job: Job
    required: tuple[str, ...]
    length_mi: int
    site: int = -1
    next_idx: int = 0
    ready: bool = False
    staging_done_us: int = -1
    start_us: int = -1
    queue_us: int = 0
    end_us: int = -1
    n_inter: int = 0
    n_intra: int = 0
    bytes_inter: int = 0
    bytes_intra: int = 0
    n_evictions: int = 0
    temp: set = field(default_factory=set)
    # position of each required lfn in read order, for the demotion scan
    pos: dict = field(default_factory=dict)
    in_flight: str | None = None


@dataclass(slots=True)
class _SiteRt:
    fifo: deque = field(default_factory=deque)
    busy: bool = False
    last_end_us: int = 0
    # ids of jobs dispatched here and not yet completed
    active: list = field(default_factory=list)


@dataclass(slots=True)
class SimulationResult:
    records: list
    final_clock_us: int
    n_transfers_inter: int
    n_transfers_intra: int
    total_bytes_wan: int
    total_bytes_lan: int
    n_evictions: int
    n_temp_fallbacks: int
    n_shared_waits: int
    n_demotions: int
    trace: list | None
    fetch_log: list | None


class Simulation:
    def __init__(self, topology: GridTopology, catalog: ReplicaCatalog,
                 files: list[FileRecord], job_types: list[JobType],
                 jobs: list[Job], strategy: StrategyKind, *,
                 broker: str = "data", broker_rng: Prng | None = None,
                 check_invariants: bool = False, keep_trace: bool = False,
                 record_fetches: bool = False):
        if broker not in BROKERS:
            raise ConfigurationError(f"unknown broker {broker!r}")
        if broker == "random" and broker_rng is None:
            raise ConfigurationError("the random broker needs a Prng")
        self.topology = topology
        self.catalog = catalog
        self.sizes = {f.lfn: f.size_bytes for f in files}
        self.job_types = job_types
        self.jobs = jobs
        self.strategy = strategy
        self.broker = broker
        self.broker_rng = broker_rng
        self.check_invariants = check_invariants
        self.queue = EventQueue()
        self.trace: list | None = [] if keep_trace else None
        self.fetch_log: list | None = [] if record_fetches else None
        self._all_lfns = [f.lfn for f in files]
        self._job_rt: dict[int, _JobRt] = {}
        self._site_rt = [_SiteRt() for _ in range(topology.n_sites)]
        self._mips = [s.mips for s in topology.sites]
        self._queued_mi = [0] * topology.n_sites
        # (site, lfn) -> job ids whose staging is blocked on the inbound copy
        self._pending: dict[tuple[int, str], list[int]] = {}
        self._n_complete = 0
        self.n_transfers_inter = 0
        self.n_transfers_intra = 0
        self.total_bytes_wan = 0
        self.total_bytes_lan = 0
        self.n_evictions = 0
        self.n_temp_fallbacks = 0
        self.n_shared_waits = 0
        self.n_demotions = 0

    def run(self) -> SimulationResult:
        for job in self.jobs:
            jtype = self.job_types[job.type_id]
            pos = {lfn: i for i, lfn in enumerate(jtype.required_lfns)}
            self._job_rt[job.job_id] = _JobRt(job, jtype.required_lfns,
                                              jtype.length_mi, pos=pos)
            self.queue.push(job.submit_us, EventKind.JOB_SUBMIT, job.job_id)
        while len(self.queue):
            ev = self.queue.pop()
            if ev.kind is EventKind.JOB_SUBMIT:
                self._on_submit(ev.time_us, ev.payload)
            elif ev.kind is EventKind.TRANSFER_COMPLETE:
                self._on_transfer_complete(ev.time_us, ev.payload)
            elif ev.kind is EventKind.JOB_START:
                self._on_job_start(ev.time_us, ev.payload)
            else:
                self._on_job_complete(ev.time_us, ev.payload)
            if self.trace is not None:
                self.trace.append((ev.time_us, ev.seq, ev.kind.value,
                                   _format_payload(ev.kind, ev.payload)))
            if self.check_invariants:
                self._check_state()
        if self._n_complete != len(self.jobs):
            raise SimulationError(
                f"run ended with {self._n_complete} of {len(self.jobs)} jobs complete"
            )
        if self._pending:
            raise SimulationError(f"{len(self._pending)} transfers still pending at end")
        records = [self._record_of(self._job_rt[job.job_id]) for job in self.jobs]
        return SimulationResult(
            records=records,
            final_clock_us=self.queue.clock_us,
            n_transfers_inter=self.n_transfers_inter,
            n_transfers_intra=self.n_transfers_intra,
            total_bytes_wan=self.total_bytes_wan,
            total_bytes_lan=self.total_bytes_lan,
            n_evictions=self.n_evictions,
            n_temp_fallbacks=self.n_temp_fallbacks,
            n_shared_waits=self.n_shared_waits,
            n_demotions=self.n_demotions,
            trace=self.trace,
            fetch_log=self.fetch_log,
        )

    def _check_state(self) -> None:
        self.catalog.consistency_check(self._all_lfns)
        reserved = [0] * self.topology.n_sites
        for (site, lfn) in self._pending:
            reserved[site] += self.sizes[lfn]
        for site, want in enumerate(reserved):
            got = self.catalog.stores[site].reserved_bytes
            if got != want:
                raise SimulationError(
                    f"site {site} reserves {got} bytes but pending transfers need {want}"
                )
        for rt in self._job_rt.values():
            if rt.site < 0 or rt.end_us >= 0:
                continue
            for lfn in rt.required[:rt.next_idx]:
                if lfn == rt.in_flight:
                    continue
                if not (self.catalog.holds(rt.site, lfn) or lfn in rt.temp):
                    raise SimulationError(
                        f"job {rt.job.job_id} lost staged file {lfn} at site {rt.site}"
                    )

    def _select(self, rt: _JobRt) -> int:
        if self.broker == "random":
            return self.broker_rng.next_below(self.topology.n_sites)
        return select_site(self.catalog, self.sizes, rt.required,
                           self._queued_mi, self._mips)

    def _on_submit(self, now: int, job_id: int) -> None:
        rt = self._job_rt[job_id]
        site = self._select(rt)
        rt.site = site
        self._queued_mi[site] += rt.length_mi
        srt = self._site_rt[site]
        srt.fifo.append(job_id)
        srt.active.append(job_id)
        self._advance_staging(now, rt)

    def _advance_staging(self, now: int, rt: _JobRt) -> None:
        """Resolve required files in read order until one needs time.

        Stops at the first file that starts a transfer or joins a pending
        one; with none left the job is Ready and may start. The job's own
        required files are protected from its eviction plans.
        """
        protected = frozenset(rt.required)
        while rt.next_idx < len(rt.required):
            lfn = rt.required[rt.next_idx]
            rt.next_idx += 1
            if lfn in rt.temp:
                continue
            key = (rt.site, lfn)
            if key in self._pending:
                self._pending[key].append(rt.job.job_id)
                rt.in_flight = lfn
                self.n_shared_waits += 1
                return
            size = self.sizes[lfn]
            plan = plan_fetch(self.strategy, self.catalog, self.topology,
                              lfn, size, rt.site, protected)
            if plan.mode is StoreMode.ALREADY_LOCAL:
                continue
            had_intra = any(
                self.topology.same_region(h, rt.site)
                for h in self.catalog.holders(lfn)
            )
            if self.fetch_log is not None:
                self.fetch_log.append(FetchDecision(
                    rt.job.job_id, lfn, plan.source_site, rt.site,
                    plan.mode, had_intra))
            for victim in plan.evictions:
                self.catalog.unregister(victim, rt.site)
            if plan.evictions:
                self._demote(rt.site, plan.evictions)
            rt.n_evictions += len(plan.evictions)
            self.n_evictions += len(plan.evictions)
            if plan.mode is StoreMode.PERSIST:
                self.catalog.reserve(rt.site, size)
                self._pending[key] = []
            elif not had_intra:
                self.n_temp_fallbacks += 1
            rt.in_flight = lfn
            dur = self.topology.transfer_time_us(size, plan.source_site, rt.site)
            self.queue.push(now + dur, EventKind.TRANSFER_COMPLETE,
                            (rt.job.job_id, lfn, plan.source_site, rt.site,
                             plan.mode, plan.evictions))
            return
        rt.staging_done_us = now
        rt.ready = True
        if self.check_invariants:
            for lfn in rt.required:
                if not (self.catalog.holds(rt.site, lfn) or lfn in rt.temp):
                    raise SimulationError(
                        f"job {rt.job.job_id} staged but {lfn} unreadable at site {rt.site}"
                    )
        self._try_start(now, rt.site)

    def _demote(self, site: int, victims: tuple[str, ...]) -> None:
        """Keep evicted replicas readable for jobs that already staged them.

        The store obeys the eviction, but the bytes were already on site,
        so each victim moves into the temp buffer of every unfinished job
        at the site whose staging previously resolved it from the store.
        Staged inputs thus stay readable through completion while the file
        stops counting as locally available.
        """
        for job_id in self._site_rt[site].active:
            other = self._job_rt[job_id]
            for victim in victims:
                p = other.pos.get(victim)
                if p is None or p >= other.next_idx or victim in other.temp:
                    continue
                other.temp.add(victim)
                self.n_demotions += 1

    def _on_transfer_complete(self, now: int, payload) -> None:
        job_id, lfn, src, dst, mode, _evictions = payload
        rt = self._job_rt[job_id]
        size = self.sizes[lfn]
        waiters: list[int] = []
        if mode is StoreMode.PERSIST:
            self.catalog.release(dst, size)
            self.catalog.register(lfn, dst, size, now)
            waiters = self._pending.pop((dst, lfn))
            for waiter in waiters:
                self._job_rt[waiter].in_flight = None
        else:
            rt.temp.add(lfn)
        rt.in_flight = None
        if self.topology.is_inter_region(src, dst):
            rt.n_inter += 1
            rt.bytes_inter += size
            self.n_transfers_inter += 1
            self.total_bytes_wan += size
        else:
            rt.n_intra += 1
            rt.bytes_intra += size
            self.n_transfers_intra += 1
            self.total_bytes_lan += size
        self._advance_staging(now, rt)
        for waiter in waiters:
            self._advance_staging(now, self._job_rt[waiter])

    def _try_start(self, now: int, site: int) -> None:
        srt = self._site_rt[site]
        if srt.busy or not srt.fifo:
            return
        rt = self._job_rt[srt.fifo[0]]
        if not rt.ready:
            return
        srt.fifo.popleft()
        srt.busy = True
        self.queue.push(now, EventKind.JOB_START, (rt.job.job_id, site))

    def _on_job_start(self, now: int, payload) -> None:
        job_id, site = payload
        rt = self._job_rt[job_id]
        if self.check_invariants:
            for lfn in rt.required:
                if not (self.catalog.holds(site, lfn) or lfn in rt.temp):
                    raise SimulationError(
                        f"job {job_id} started without {lfn} readable at site {site}"
                    )
        rt.start_us = now
        rt.queue_us = max(0, self._site_rt[site].last_end_us - rt.job.submit_us)
        proc = processing_time_us(rt.length_mi, self._mips[site])
        self.queue.push(now + proc, EventKind.JOB_COMPLETE, (job_id, site))

    def _on_job_complete(self, now: int, payload) -> None:
        job_id, site = payload
        rt = self._job_rt[job_id]
        rt.end_us = now
        srt = self._site_rt[site]
        srt.busy = False
        srt.last_end_us = now
        srt.active.remove(job_id)
        self._queued_mi[site] -= rt.length_mi
        for lfn in rt.required:
            if self.catalog.holds(site, lfn):
                self.catalog.touch(lfn, site, now)
        rt.temp.clear()
        self._n_complete += 1
        self._try_start(now, site)

    def _record_of(self, rt: _JobRt) -> JobRecord:
        return JobRecord(
            job_id=rt.job.job_id,
            type_id=rt.job.type_id,
            site=rt.site,
            submit_us=rt.job.submit_us,
            start_us=rt.start_us,
            end_us=rt.end_us,
            staging_us=rt.staging_done_us - rt.job.submit_us,
            queue_us=rt.queue_us,
            proc_us=rt.end_us - rt.start_us,
            n_inter=rt.n_inter,
            n_intra=rt.n_intra,
            bytes_inter=rt.bytes_inter,
            bytes_intra=rt.bytes_intra,
            n_evictions=rt.n_evictions,
        )


def _format_payload(kind: EventKind, payload) -> str:
    if kind is EventKind.JOB_SUBMIT:
        return f"job={payload}"
    if kind is EventKind.TRANSFER_COMPLETE:
        job_id, lfn, src, dst, mode, evictions = payload
        text = f"job={job_id} lfn={lfn} src={src} dst={dst} mode={mode.value}"
        if evictions:
            text += f" evict={','.join(evictions)}"
        return text
    job_id, site = payload
    return f"job={job_id} site={site}"
