"""Assemble one complete experiment from a Config and run it.

Generation order is fixed (job types, then master placement, then the job
stream, then the broker's own stream seed), so a seed pins the whole
scenario regardless of which knobs vary between runs.
"""
from .catalog import ReplicaCatalog
from .config import Config
from .metrics import RunSummary, aggregate
from .replication import StrategyKind
from .rng import Prng
from .simulation import Simulation, SimulationResult
from .topology import GridTopology
from .workload import generate_dataset, generate_job_types, generate_workload, place_masters


def build_simulation(cfg: Config, *, check_invariants: bool = False,
                     keep_trace: bool = False,
                     record_fetches: bool = False) -> Simulation:
    topology = GridTopology(cfg.n_regions, cfg.sites_per_region,
                            cfg.wan_mbps, cfg.lan_mbps, cfg.mips)
    catalog = ReplicaCatalog([cfg.storage_bytes] * topology.n_sites)
    files = generate_dataset(cfg.n_files, cfg.file_size_bytes)
    rng = Prng(cfg.seed)
    job_types = generate_job_types(rng, cfg.n_job_types, cfg.files_per_job,
                                   files, cfg.job_length_mi)
    place_masters(rng, files, topology, catalog)
    jobs = generate_workload(rng, cfg.n_jobs, job_types, cfg.inter_arrival_us)
    broker_rng = Prng(rng.next_u64())
    return Simulation(topology, catalog, files, job_types, jobs,
                      StrategyKind(cfg.strategy),
                      broker=cfg.broker, broker_rng=broker_rng,
                      check_invariants=check_invariants,
                      keep_trace=keep_trace,
                      record_fetches=record_fetches)


def run_once(cfg: Config, *, check_invariants: bool = False,
             keep_trace: bool = False, record_fetches: bool = False,
             ) -> tuple[Simulation, SimulationResult, RunSummary]:
    sim = build_simulation(cfg, check_invariants=check_invariants,
                           keep_trace=keep_trace, record_fetches=record_fetches)
    result = sim.run()
    summary = aggregate(result.records, strategy=cfg.strategy, seed=cfg.seed,
                        wan_mbps=cfg.wan_mbps, lan_mbps=cfg.lan_mbps)
    return sim, result, summary
