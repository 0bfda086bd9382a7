"""Runtime configuration: defaults, a flat key=value file format, validation.

The config file is plain text, one ``key = value`` per line, ``#`` starts
a comment. Per-parameter aggregation overrides use ``policy.<name>`` keys
and feature groups use ``group.<name> = col1,col2``. Every numeric field
is range-checked at load time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ConfigError

DEFAULT_SEED = 42


@dataclass
class Config:
    window_seconds: int = 1
    aggregation: dict = field(default_factory=lambda: {"*": "sum"})
    label_policy: str = "max"
    feature_groups: dict = field(default_factory=dict)
    variability_threshold: float = 75.0
    cp_min: float = 0.01
    min_split: int = 20
    learners: tuple = ("tree", "rule")
    af_mode: str = "boolean"
    flag_threshold: float = 0.5
    feedback_min_batch: int = 50
    feedback_holdout_fraction: float = 0.2
    window_lag: int = 2
    p_loss: float = 0.0
    fragments: int = 3
    exchange_indicators: str = "on_risk_change"
    seed: int = DEFAULT_SEED

    def validate(self) -> "Config":
        if not isinstance(self.window_seconds, int) or self.window_seconds < 1:
            raise ConfigError(f"window_seconds must be a positive integer, got {self.window_seconds!r}")
        for name, policy in self.aggregation.items():
            if policy not in ("sum", "mean", "count"):
                raise ConfigError(f"aggregation policy for {name!r} must be sum/mean/count, got {policy!r}")
        if self.label_policy not in ("max", "last"):
            raise ConfigError(f"label_policy must be max or last, got {self.label_policy!r}")
        for group, columns in self.feature_groups.items():
            if not columns:
                raise ConfigError(f"feature group {group!r} names no columns")
        if not 0.0 < self.variability_threshold <= 100.0:
            raise ConfigError(f"variability_threshold must lie in (0, 100], got {self.variability_threshold!r}")
        if self.cp_min <= 0.0:
            raise ConfigError(f"cp_min must be positive, got {self.cp_min!r}")
        if not isinstance(self.min_split, int) or self.min_split < 1:
            raise ConfigError(f"min_split must be a positive integer, got {self.min_split!r}")
        if not self.learners or any(l not in ("tree", "rule") for l in self.learners):
            raise ConfigError(f"learners must be a non-empty subset of tree,rule, got {self.learners!r}")
        if self.af_mode not in ("boolean", "graded"):
            raise ConfigError(f"af_mode must be boolean or graded, got {self.af_mode!r}")
        if not 0.0 <= self.flag_threshold <= 1.0:
            raise ConfigError(f"flag_threshold must lie in [0, 1], got {self.flag_threshold!r}")
        if not isinstance(self.feedback_min_batch, int) or self.feedback_min_batch < 1:
            raise ConfigError(f"feedback_min_batch must be a positive integer, got {self.feedback_min_batch!r}")
        if not 0.0 < self.feedback_holdout_fraction < 1.0:
            raise ConfigError(
                f"feedback_holdout_fraction must lie in (0, 1), got {self.feedback_holdout_fraction!r}")
        if not isinstance(self.window_lag, int) or self.window_lag < 1:
            raise ConfigError(f"window_lag must be a positive integer, got {self.window_lag!r}")
        if not 0.0 <= self.p_loss <= 1.0:
            raise ConfigError(f"p_loss must lie in [0, 1], got {self.p_loss!r}")
        if not isinstance(self.fragments, int) or self.fragments < 2:
            raise ConfigError(f"fragments must be an integer >= 2, got {self.fragments!r}")
        if self.exchange_indicators not in ("never", "on_risk_change", "always"):
            raise ConfigError(
                f"exchange_indicators must be never/on_risk_change/always, got {self.exchange_indicators!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        return self


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from None


def parse_config(text: str, base: Config | None = None) -> Config:
    """Parse the flat key=value format on top of ``base`` (or defaults)."""
    cfg = replace(base) if base is not None else Config()
    cfg.aggregation = dict(cfg.aggregation)
    cfg.feature_groups = dict(cfg.feature_groups)
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "window_seconds":
            cfg.window_seconds = _parse_int(key, value)
        elif key == "aggregation":
            cfg.aggregation["*"] = value
        elif key.startswith("policy."):
            cfg.aggregation[key[len("policy."):]] = value
        elif key == "label_policy":
            cfg.label_policy = value
        elif key.startswith("group."):
            columns = [c.strip() for c in value.split(",") if c.strip()]
            cfg.feature_groups[key[len("group."):]] = columns
        elif key == "variability_threshold":
            cfg.variability_threshold = _parse_float(key, value)
        elif key == "cp_min":
            cfg.cp_min = _parse_float(key, value)
        elif key == "min_split":
            cfg.min_split = _parse_int(key, value)
        elif key == "learners":
            cfg.learners = tuple(l.strip() for l in value.split(",") if l.strip())
        elif key == "af_mode":
            cfg.af_mode = value
        elif key == "flag_threshold":
            cfg.flag_threshold = _parse_float(key, value)
        elif key == "feedback_min_batch":
            cfg.feedback_min_batch = _parse_int(key, value)
        elif key == "feedback_holdout_fraction":
            cfg.feedback_holdout_fraction = _parse_float(key, value)
        elif key == "window_lag":
            cfg.window_lag = _parse_int(key, value)
        elif key == "p_loss":
            cfg.p_loss = _parse_float(key, value)
        elif key == "fragments":
            cfg.fragments = _parse_int(key, value)
        elif key == "exchange_indicators":
            cfg.exchange_indicators = value
        elif key == "seed":
            cfg.seed = _parse_int(key, value)
        else:
            raise ConfigError(f"line {line_no}: unknown configuration key {key!r}")
    return cfg.validate()


def load_config(path, base: Config | None = None) -> Config:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read(), base)
