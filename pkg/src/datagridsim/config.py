"""Experiment configuration: defaults, file parsing, and overrides.

The defaults describe the standard scenario (4 regions of 13 sites, 10 GB
stores, 1000/10 Mbps LAN/WAN, 100 files of 500 MB, 500 jobs over 5 types
of 12 files each), so an empty configuration is already a runnable
experiment. A config file holds `key = value` lines with `#` comments;
command-line overrides take precedence over the file, which takes
precedence over defaults, key by key.
"""
import math
from dataclasses import dataclass

from .errors import ConfigurationError
from .events import US_PER_S

DEFAULTS = {
    "topology.n_regions": "4",
    "topology.sites_per_region": "13",
    "topology.mips": "1000",
    "topology.storage_bytes": "10000000000",
    "topology.lan_mbps": "1000",
    "topology.wan_mbps": "10",
    "workload.n_files": "100",
    "workload.file_size_bytes": "500000000",
    "workload.n_job_types": "5",
    "workload.files_per_job": "12",
    "workload.n_jobs": "500",
    "workload.job_length_mi": "60000",
    "workload.inter_arrival_s": "2.5",
    "strategy": "hrs",
    "broker": "data",
    "seed": "0",
    "out": "",
}

STRATEGIES = ("hrs", "bhr", "lru")
BROKERS = ("data", "random")

# key -> (field name, minimum value); counts that may be zero say so.
_INT_KEYS = {
    "topology.n_regions": ("n_regions", 1),
    "topology.sites_per_region": ("sites_per_region", 1),
    "topology.mips": ("mips", 1),
    "topology.storage_bytes": ("storage_bytes", 1),
    "topology.lan_mbps": ("lan_mbps", 1),
    "topology.wan_mbps": ("wan_mbps", 1),
    "workload.n_files": ("n_files", 1),
    "workload.file_size_bytes": ("file_size_bytes", 1),
    "workload.n_job_types": ("n_job_types", 1),
    "workload.files_per_job": ("files_per_job", 1),
    "workload.n_jobs": ("n_jobs", 0),
    "workload.job_length_mi": ("job_length_mi", 0),
    "seed": ("seed", 0),
}


@dataclass(frozen=True, slots=True)
class Config:
    n_regions: int
    sites_per_region: int
    mips: int
    storage_bytes: int
    lan_mbps: int
    wan_mbps: int
    n_files: int
    file_size_bytes: int
    n_job_types: int
    files_per_job: int
    n_jobs: int
    job_length_mi: int
    inter_arrival_us: int
    strategy: str
    broker: str
    seed: int
    out: str


def parse_kv_text(text: str, source: str = "config") -> dict[str, str]:
    """Parse `key = value` lines; later duplicates win."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigurationError(f"{source}:{lineno}: missing key before `=`")
        if key not in DEFAULTS:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        pairs[key] = value
    return pairs


def _parse_override(item: str) -> tuple[str, str]:
    if "=" not in item:
        raise ConfigurationError(f"override {item!r} is not of the form KEY=VALUE")
    key, _, value = item.partition("=")
    key = key.strip()
    if key not in DEFAULTS:
        raise ConfigurationError(f"unknown key {key!r}")
    return key, value.strip()


def _to_int(key: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ConfigurationError(f"{key}: expected an integer, got {raw!r}") from None


def build_config(pairs: dict[str, str]) -> Config:
    """Validate a complete raw-string mapping and produce a typed Config."""
    values: dict[str, object] = {}
    for key, (name, minimum) in _INT_KEYS.items():
        v = _to_int(key, pairs[key])
        if v < minimum:
            raise ConfigurationError(f"{key}: must be >= {minimum}, got {v}")
        values[name] = v
    try:
        inter_arrival_s = float(pairs["workload.inter_arrival_s"])
    except ValueError:
        raise ConfigurationError(
            "workload.inter_arrival_s: expected a number, "
            f"got {pairs['workload.inter_arrival_s']!r}") from None
    if not math.isfinite(inter_arrival_s) or inter_arrival_s < 0:
        raise ConfigurationError(
            f"workload.inter_arrival_s: must be a finite value >= 0, got {inter_arrival_s}")
    values["inter_arrival_us"] = round(inter_arrival_s * US_PER_S)
    strategy = pairs["strategy"]
    if strategy not in STRATEGIES:
        raise ConfigurationError(
            f"strategy: must be one of {', '.join(STRATEGIES)}, got {strategy!r}")
    values["strategy"] = strategy
    broker = pairs["broker"]
    if broker not in BROKERS:
        raise ConfigurationError(f"broker: must be one of {', '.join(BROKERS)}, got {broker!r}")
    values["broker"] = broker
    values["out"] = pairs["out"]
    if values["wan_mbps"] > values["lan_mbps"]:
        raise ConfigurationError(
            f"topology.wan_mbps: must not exceed topology.lan_mbps "
            f"({values['wan_mbps']} > {values['lan_mbps']})")
    if values["files_per_job"] > values["n_files"]:
        raise ConfigurationError(
            f"workload.files_per_job: must not exceed workload.n_files "
            f"({values['files_per_job']} > {values['n_files']})")
    return Config(**values)


def load_config(path: str | None = None, overrides=()) -> Config:
    pairs = dict(DEFAULTS)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
        pairs.update(parse_kv_text(text, source=path))
    for item in overrides:
        key, value = _parse_override(item)
        pairs[key] = value
    return build_config(pairs)


def config_lines(cfg: Config) -> list[str]:
    """Effective configuration as canonical `key = value` lines."""
    rendered = {
        "topology.n_regions": str(cfg.n_regions),
        "topology.sites_per_region": str(cfg.sites_per_region),
        "topology.mips": str(cfg.mips),
        "topology.storage_bytes": str(cfg.storage_bytes),
        "topology.lan_mbps": str(cfg.lan_mbps),
        "topology.wan_mbps": str(cfg.wan_mbps),
        "workload.n_files": str(cfg.n_files),
        "workload.file_size_bytes": str(cfg.file_size_bytes),
        "workload.n_job_types": str(cfg.n_job_types),
        "workload.files_per_job": str(cfg.files_per_job),
        "workload.n_jobs": str(cfg.n_jobs),
        "workload.job_length_mi": str(cfg.job_length_mi),
        "workload.inter_arrival_s": "%g" % (cfg.inter_arrival_us / US_PER_S),
        "strategy": cfg.strategy,
        "broker": cfg.broker,
        "seed": str(cfg.seed),
        "out": cfg.out,
    }
    return [f"{key} = {rendered[key]}" for key in DEFAULTS]
