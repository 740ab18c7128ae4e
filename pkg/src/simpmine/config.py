"""Run configuration: one YAML file, overridable from the command line."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import yaml

from .kbc import KbcConfig

WORKFLOWS = ("baseline", "expert_no_labels", "no_expert_but_labels", "expert_with_labels")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # inputs
    corpus: Optional[str] = None
    labels: Optional[str] = None          # gold positive pairs, TSV: a_id <TAB> b_id
    verdicts: Optional[str] = None        # exported verdict NDJSON (expert workflows)
    filter_config: Optional[str] = None   # None -> shipped default lists
    conllu: Optional[str] = None          # convert-conllu input
    mentions: Optional[str] = None        # convert-conllu mention side-file
    # entity roles
    type_a: str = "GENE"
    type_b: str = "DISEASE"
    relation: str = "associated_with"
    # artifact locations
    run_dir: str = "run"
    index_dir: Optional[str] = None       # default: <run_dir>/index
    sessions_dir: Optional[str] = None    # default: <run_dir>/sessions
    # workflow and thresholds
    workflow: str = "no_expert_but_labels"
    precision_threshold: float = 0.6
    recall_threshold: float = 0.0
    min_pair_count: int = 5
    min_words: int = 0
    include_sentence_root: bool = False
    use_lemmas: bool = False
    cluster_radius: int = 2
    expand_clusters: bool = False
    tune_threshold: bool = False          # pick precision threshold on the valid split
    # evaluation
    split: tuple[float, float, float] = (0.4, 0.1, 0.5)
    # annotation sessions
    session_size: int = 200
    examples_per_item: int = 20
    # service
    host: str = "127.0.0.1"
    port: int = 8724
    token: Optional[str] = None
    # model
    kbc: KbcConfig = field(default_factory=KbcConfig)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.workflow not in WORKFLOWS:
            raise ConfigError(f"workflow must be one of {WORKFLOWS}, got {self.workflow!r}")
        if len(self.split) != 3 or any(f < 0 for f in self.split):
            raise ConfigError(f"split must be three non-negative fractions, got {self.split}")
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must sum to 1, got {self.split}")
        if self.cluster_radius < 0:
            raise ConfigError(f"cluster_radius must be >= 0, got {self.cluster_radius}")
        if self.type_a == self.type_b:
            raise ConfigError("type_a and type_b must differ")

    def resolved_index_dir(self) -> Path:
        return Path(self.index_dir) if self.index_dir else Path(self.run_dir) / "index"

    def resolved_sessions_dir(self) -> Path:
        return Path(self.sessions_dir) if self.sessions_dir else Path(self.run_dir) / "sessions"

    def require_seed(self, stage: str) -> int:
        if self.seed is None:
            raise ConfigError(f"stage {stage!r} needs a seed (--seed or config key 'seed')")
        return self.seed


def _build(obj: dict) -> RunConfig:
    obj = dict(obj)
    kbc_obj = obj.pop("kbc", None)
    if kbc_obj is not None:
        if not isinstance(kbc_obj, dict):
            raise ConfigError("kbc section must be a mapping")
        try:
            obj["kbc"] = KbcConfig(**kbc_obj)
        except TypeError as e:
            raise ConfigError(f"bad kbc section: {e}") from e
    if "split" in obj and obj["split"] is not None:
        obj["split"] = tuple(float(f) for f in obj["split"])
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return RunConfig(**obj)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            obj = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid config YAML: {e}") from e
    if obj is None:
        return RunConfig()
    if not isinstance(obj, dict):
        raise ConfigError("config file must hold a mapping")
    return _build(obj)


def _convert(raw: str, current) -> object:
    if raw.lower() in ("none", "null"):
        return None
    if isinstance(current, bool):
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, tuple):
        return tuple(float(f) for f in raw.split(","))
    return raw


def apply_overrides(config: RunConfig, overrides: Sequence[str]) -> RunConfig:
    """Apply ``key=value`` (or ``kbc.key=value``) overrides on top of a config."""
    obj = dataclasses.asdict(config)
    kbc_obj = obj.pop("kbc")
    for override in overrides:
        key, sep, raw = override.partition("=")
        if not sep:
            raise ConfigError(f"override must look like key=value, got {override!r}")
        key = key.strip()
        raw = raw.strip()
        if key.startswith("kbc."):
            sub = key[4:]
            if sub not in kbc_obj:
                raise ConfigError(f"unknown kbc config key {sub!r}")
            kbc_obj[sub] = _convert(raw, kbc_obj[sub])
        elif key in obj:
            current = obj[key]
            if current is None:
                # Fall back on the declared default to learn the type.
                current = getattr(RunConfig(), key, None)
            if current is None:
                # Optional fields with a None default are path strings,
                # except the integer seed.
                value = None if raw.lower() in ("none", "null") else raw
                if key == "seed" and value is not None:
                    value = int(value)
                obj[key] = value
            else:
                obj[key] = _convert(raw, current)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    obj["kbc"] = kbc_obj
    return _build(obj)
