"""Run and experiment configuration with flat dotted-key (TOML) I/O.

A config file is plain TOML; keys may be written dotted (``radio.e_elec = 5e-8``)
or as tables. Every field of every parameter block is addressable as
``<section>.<field>``; per-layer coefficient tables use one more level
(``lmeec.alpha_by_layer.2 = 0.3``).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from .energy import RadioParams
from .leach import LeachParams
from .lmeec import LmeecParams
from .topology import TopologyParams

PROTOCOLS = ("leach", "lmeec")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


@dataclass(frozen=True)
class SimConfig:
    protocol: str = "lmeec"
    n_nodes: int = 100
    seed: int = 1
    duration: float = 500.0
    round_length: float = 20.0
    sense_interval: float = 0.2
    initial_energy: float = 2.0
    topology: TopologyParams = field(default_factory=TopologyParams)
    radio: RadioParams = field(default_factory=RadioParams)
    lmeec: LmeecParams = field(default_factory=LmeecParams)
    leach: LeachParams = field(default_factory=LeachParams)

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"sim.protocol: must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.n_nodes < 1:
            raise ConfigError("sim.n_nodes: must be >= 1")
        if self.duration < 0:
            raise ConfigError("sim.duration: must be >= 0")
        if self.round_length <= 0 or self.sense_interval <= 0:
            raise ConfigError("sim.round_length/sim.sense_interval: must be positive")
        if self.initial_energy <= 0:
            raise ConfigError("sim.initial_energy: must be positive")
        if not _divides(self.round_length, self.duration):
            raise ConfigError("sim.round_length: must divide sim.duration")
        if not _divides(self.sense_interval, self.round_length):
            raise ConfigError("sim.sense_interval: must divide sim.round_length")

    @property
    def n_rounds(self) -> int:
        return round(self.duration / self.round_length)

    @property
    def ticks_per_round(self) -> int:
        return round(self.round_length / self.sense_interval)


def _divides(step: float, total: float) -> bool:
    q = total / step
    return math.isclose(q, round(q), rel_tol=0, abs_tol=1e-9)


@dataclass(frozen=True)
class ExperimentSpec:
    node_counts: tuple[int, ...] = (50, 100, 200, 400)
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    protocols: tuple[str, ...] = PROTOCOLS
    output_dir: str = "results"
    jobs: int = 1
    base: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        if not self.node_counts or any(n < 1 for n in self.node_counts):
            raise ConfigError("experiment.node_counts: must be a non-empty list of counts >= 1")
        if not self.seeds:
            raise ConfigError("experiment.seeds: must be non-empty")
        bad = [p for p in self.protocols if p not in PROTOCOLS]
        if not self.protocols or bad:
            raise ConfigError(f"experiment.protocols: must be a non-empty subset of {PROTOCOLS}")
        if self.jobs < 1:
            raise ConfigError("experiment.jobs: must be >= 1")

    def configs(self):
        """Every (protocol, n, seed) run config, in output order."""
        for proto in sorted(self.protocols):
            for n in sorted(self.node_counts):
                for seed in sorted(self.seeds):
                    yield replace(self.base, protocol=proto, n_nodes=n, seed=seed)


_SECTIONS = {
    "topology": TopologyParams,
    "radio": RadioParams,
    "lmeec": LmeecParams,
    "leach": LeachParams,
}
_SIM_FIELDS = [f.name for f in fields(SimConfig) if f.name not in _SECTIONS]
_EXPERIMENT_FIELDS = ("node_counts", "seeds", "protocols", "output_dir", "jobs")


def to_flat(spec: ExperimentSpec) -> dict:
    """Flatten a spec into ``{"section.key": value}``."""
    flat = {}
    for name in _EXPERIMENT_FIELDS:
        value = getattr(spec, name)
        flat[f"experiment.{name}"] = list(value) if isinstance(value, tuple) else value
    for name in _SIM_FIELDS:
        flat[f"sim.{name}"] = getattr(spec.base, name)
    for section in _SECTIONS:
        block = getattr(spec.base, section)
        for f in fields(block):
            value = getattr(block, f.name)
            if isinstance(value, dict) or hasattr(value, "items"):
                for layer, v in sorted(value.items()):
                    flat[f"{section}.{f.name}.{layer}"] = v
            else:
                flat[f"{section}.{f.name}"] = value
    return flat


def dump_config(spec: ExperimentSpec) -> str:
    """Render a spec as TOML with one table per section."""
    nested: dict = {}
    for key, value in to_flat(spec).items():
        parts = key.split(".")
        node = nested
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = value
    return tomli_w.dumps(nested)


def _walk(prefix: str, tree: dict, out: dict):
    for k, v in tree.items():
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, dict):
            _walk(key, v, out)
        else:
            out[key] = v


def parse_override(text: str) -> tuple[str, object]:
    """Parse ``key=value`` where value is a TOML literal (bare words become strings)."""
    if "=" not in text:
        raise ConfigError(f"{text}: override must look like key=value")
    key, raw = (s.strip() for s in text.split("=", 1))
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def load_flat(path) -> dict:
    with open(Path(path), "rb") as fh:
        try:
            tree = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    flat: dict = {}
    _walk("", tree, flat)
    return flat


def build_spec(flat: dict | None = None) -> ExperimentSpec:
    """Build an ExperimentSpec from flat overrides on top of the defaults."""
    flat = dict(flat or {})
    sections: dict[str, dict] = {s: {} for s in _SECTIONS}
    sim: dict = {}
    exp: dict = {}
    for key, value in flat.items():
        parts = key.split(".")
        head = parts[0]
        if head == "experiment" and len(parts) == 2 and parts[1] in _EXPERIMENT_FIELDS:
            exp[parts[1]] = value
        elif head == "sim" and len(parts) == 2 and parts[1] in _SIM_FIELDS:
            sim[parts[1]] = value
        elif head in _SECTIONS and len(parts) >= 2:
            cls = _SECTIONS[head]
            names = {f.name: f for f in fields(cls)}
            if parts[1] not in names:
                raise ConfigError(f"{key}: unknown key")
            if len(parts) == 3 and parts[1].endswith("_by_layer"):
                try:
                    layer = int(parts[2])
                except ValueError:
                    raise ConfigError(f"{key}: layer must be an integer") from None
                sections[head].setdefault(parts[1], {})[layer] = value
            elif len(parts) == 2:
                sections[head][parts[1]] = value
            else:
                raise ConfigError(f"{key}: unknown key")
        else:
            raise ConfigError(f"{key}: unknown key")

    built = {}
    for section, cls in _SECTIONS.items():
        kwargs = {k: _coerce(f"{section}.{k}", cls, k, v) for k, v in sections[section].items()}
        try:
            built[section] = cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{section}: {exc}") from None
    sim_kwargs = {k: _coerce(f"sim.{k}", SimConfig, k, v) for k, v in sim.items()}
    try:
        base = SimConfig(**sim_kwargs, **built)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"sim: {exc}") from None
    exp_kwargs = {}
    for k, v in exp.items():
        if k in ("node_counts", "seeds", "protocols"):
            if not isinstance(v, list):
                v = [v]
            conv = str if k == "protocols" else int
            try:
                v = tuple(conv(x) for x in v)
            except (TypeError, ValueError):
                raise ConfigError(f"experiment.{k}: bad list entry") from None
        else:
            v = _coerce(f"experiment.{k}", ExperimentSpec, k, v)
        exp_kwargs[k] = v
    return ExperimentSpec(**exp_kwargs, base=base)


_CASTS = {"float": float, "int": int, "bool": bool, "str": str}


def _coerce(path: str, cls, name: str, value):
    ftype = {f.name: f.type for f in dataclasses.fields(cls)}[name]
    ftype = ftype if isinstance(ftype, str) else getattr(ftype, "__name__", "")
    if ftype.startswith("Mapping") or ftype.startswith("dict"):
        if not isinstance(value, dict):
            raise ConfigError(f"{path}: expected a table of layer -> value")
        try:
            return {int(k): float(v) for k, v in value.items()}
        except (TypeError, ValueError):
            raise ConfigError(f"{path}: expected numeric layer -> value pairs") from None
    cast = _CASTS.get(ftype)
    if cast is None:
        return value
    if cast is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    if cast is int and isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if isinstance(value, bool) and cast is not str:
        raise ConfigError(f"{path}: expected {ftype}, got {value!r}")
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected {ftype}, got {value!r}") from None
