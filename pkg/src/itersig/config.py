"""Experiment configuration: a strict YAML schema with unknown-key rejection."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .processes import ModelError, ProcessModel, model_from_dict, model_to_dict

KINDS = ("as", "l1", "continuous", "er", "identity-suite")

# keys each experiment kind accepts beyond the common ones
_COMMON = {"experiment", "seed", "output"}
_ALLOWED = {
    "as": {"model", "words", "depth", "checkpoints", "kahan"},
    "l1": {"model", "words", "depth", "checkpoints", "replications", "step", "kahan"},
    "continuous": {"model", "words", "depth", "checkpoints", "step"},
    "er": {"model", "words", "checkpoints", "alphas", "decimation"},
    "identity-suite": set(),
}
_REQUIRED = {
    "as": {"model", "words", "checkpoints"},
    "l1": {"model", "words", "checkpoints", "replications"},
    "continuous": {"model", "words", "checkpoints", "step"},
    "er": {"model", "words", "checkpoints", "alphas"},
    "identity-suite": set(),
}


class ConfigError(ValueError):
    pass


def _expand_checkpoints(raw: Any) -> list[int]:
    if isinstance(raw, dict):
        extra = set(raw) - {"start", "count", "ratio"}
        if extra:
            raise ConfigError(f"checkpoints: unknown keys {sorted(extra)}")
        try:
            start, count, ratio = int(raw["start"]), int(raw["count"]), int(raw.get("ratio", 2))
        except KeyError as e:
            raise ConfigError(f"checkpoints: missing {e.args[0]!r}") from None
        if ratio < 2:
            raise ConfigError("checkpoints: ratio must be an integer >= 2")
        return [start * ratio**k for k in range(count)]
    if not isinstance(raw, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in raw):
        raise ConfigError("checkpoints: expected a list of integers or {start, count, ratio}")
    return list(raw)


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    output: str = "results"
    model: dict | None = None
    words: list[list[int]] = field(default_factory=list)
    depth: int | None = None
    checkpoints: list[int] = field(default_factory=list)
    replications: int | None = None
    alphas: list[float] = field(default_factory=list)
    step: float | None = None
    kahan: bool = False
    decimation: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        kind = raw.get("experiment")
        if kind not in KINDS:
            raise ConfigError(f"experiment: expected one of {list(KINDS)}, got {kind!r}")
        unknown = set(raw) - _COMMON - _ALLOWED[kind]
        if unknown:
            raise ConfigError(f"unknown keys for experiment {kind!r}: {sorted(unknown)}")
        missing = ({"seed"} | _REQUIRED[kind]) - set(raw)
        if missing:
            raise ConfigError(f"missing required keys: {sorted(missing)}")
        seed = raw["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError("seed: expected a non-negative integer")
        try:
            cfg = cls(
                experiment=kind,
                seed=seed,
                output=str(raw.get("output", "results")),
                model=copy.deepcopy(raw.get("model")),
                words=[list(map(int, w)) for w in raw.get("words", [])],
                depth=None if raw.get("depth") is None else int(raw["depth"]),
                checkpoints=_expand_checkpoints(raw.get("checkpoints", [])),
                replications=None if raw.get("replications") is None else int(raw["replications"]),
                alphas=[float(a) for a in raw.get("alphas", [])],
                step=None if raw.get("step") is None else float(raw["step"]),
                kahan=bool(raw.get("kahan", False)),
                decimation=int(raw.get("decimation", 0)),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"malformed value: {e}") from e
        if cfg.model is not None:
            try:
                cfg.model = model_to_dict(model_from_dict(cfg.model))
            except (ModelError, KeyError, TypeError, ValueError) as e:
                raise ConfigError(f"model: {e}") from e
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.experiment == "identity-suite":
            return
        try:
            model = self.build_model()
        except (ModelError, KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"model: {e}") from e
        if not self.words:
            raise ConfigError("words: need at least one word")
        for w in self.words:
            if not w:
                raise ConfigError("words: empty word")
            if any(not 1 <= i <= model.d for i in w):
                raise ConfigError(f"words: {w} has letters outside 1..{model.d}")
        top = max(len(w) for w in self.words)
        if self.depth is not None and top > self.depth:
            raise ConfigError(f"depth: word degree {top} exceeds depth {self.depth}")
        cps = self.checkpoints
        if not cps or cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ConfigError("checkpoints: must be positive and strictly increasing")
        if self.experiment == "l1" and (self.replications is None or self.replications < 1):
            raise ConfigError("replications: need at least 1")
        if self.step is not None and not self.step > 0:
            raise ConfigError("step: must be positive")
        if self.experiment == "er":
            if not self.alphas:
                raise ConfigError("alphas: need at least one value")
            if model.kind == "rotation":
                raise ConfigError("model: the scan statistic needs an iid or markov_functional model")
            if cps[0] < 2:
                raise ConfigError("checkpoints: scan statistic needs n >= 2")
        if self.decimation < 0:
            raise ConfigError("decimation: must be >= 0")

    def build_model(self) -> ProcessModel:
        if self.model is None:
            raise ConfigError("model: missing")
        return model_from_dict(self.model)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"experiment": self.experiment, "seed": self.seed, "output": self.output}
        if self.experiment == "identity-suite":
            return out
        out["model"] = model_to_dict(self.build_model())
        out["words"] = [list(w) for w in self.words]
        out["checkpoints"] = list(self.checkpoints)
        if self.experiment != "er" and self.depth is not None:
            out["depth"] = self.depth
        if self.experiment == "l1":
            out["replications"] = self.replications
        if self.experiment in ("l1", "continuous") and self.step is not None:
            out["step"] = self.step
        if self.experiment in ("as", "l1"):
            out["kahan"] = self.kahan
        if self.experiment == "er":
            out["alphas"] = list(self.alphas)
            out["decimation"] = self.decimation
        return out


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not valid YAML: {e}") from e
    try:
        return ExperimentConfig.from_dict(raw)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from e


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None)
