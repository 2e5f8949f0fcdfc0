"""Synthetic workload: file population, job types, job stream, master placement.

Everything here is a pure function of the PRNG state and the parameters,
so a seed fully determines the scenario.
"""
from dataclasses import dataclass

from .catalog import ReplicaCatalog
from .errors import ConfigurationError
from .rng import Prng
from .topology import GridTopology

_PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True, slots=True)
class FileRecord:
    lfn: str
    size_bytes: int


@dataclass(frozen=True, slots=True)
class JobType:
    type_id: int
    required_lfns: tuple[str, ...]
    length_mi: int


@dataclass(frozen=True, slots=True)
class Job:
    job_id: int
    type_id: int
    submit_us: int


def generate_dataset(n_files: int, file_size_bytes: int) -> list[FileRecord]:
    if n_files < 1:
        raise ConfigurationError(f"n_files must be >= 1, got {n_files}")
    if file_size_bytes < 1:
        raise ConfigurationError(f"file_size_bytes must be >= 1, got {file_size_bytes}")
    width = max(3, len(str(n_files - 1)))
    return [FileRecord(f"f{i:0{width}d}", file_size_bytes) for i in range(n_files)]


def generate_job_types(rng: Prng, n_types: int, files_per_job: int,
                       dataset: list[FileRecord], length_mi: int) -> list[JobType]:
    """Each type requests files_per_job distinct files, sampled per type.

    The sampled order is kept: it is the order the job reads (and stages)
    its files in.
    """
    if files_per_job > len(dataset):
        raise ConfigurationError(
            f"files_per_job ({files_per_job}) exceeds dataset size ({len(dataset)})"
        )
    types = []
    for type_id in range(n_types):
        picks = rng.sample(len(dataset), files_per_job)
        required = tuple(dataset[i].lfn for i in picks)
        types.append(JobType(type_id, required, length_mi))
    return types


def generate_workload(rng: Prng, n_jobs: int, job_types: list[JobType],
                      inter_arrival_us: int) -> list[Job]:
    """Jobs arrive at a fixed interval, each drawing a type uniformly."""
    return [
        Job(k, rng.next_below(len(job_types)), k * inter_arrival_us)
        for k in range(n_jobs)
    ]


def place_masters(rng: Prng, dataset: list[FileRecord], topology: GridTopology,
                  catalog: ReplicaCatalog) -> None:
    """Pin one master copy of every file on a uniformly chosen site.

    A draw landing on a site without room is redrawn a bounded number of
    times; exhausting the budget means the grid cannot hold the dataset.
    """
    for record in dataset:
        for _ in range(_PLACEMENT_ATTEMPTS):
            site_id = rng.next_below(topology.n_sites)
            if catalog.free_space(site_id) >= record.size_bytes:
                catalog.register(record.lfn, site_id, record.size_bytes, 0, pinned=True)
                break
        else:
            raise ConfigurationError(
                f"could not place a master copy of {record.lfn}: "
                f"no site with {record.size_bytes} bytes free after "
                f"{_PLACEMENT_ATTEMPTS} draws"
            )
