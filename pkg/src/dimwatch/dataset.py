"""Raw record ingestion, per-window aggregation, and column standardization.

Records arrive as pre-extracted numeric parameter readings, one row per
reading. They are grouped into fixed-width time windows; each populated
window yields one observation whose feature vector holds the aggregated
parameter values. Standardization then rescales every retained column to
zero mean and unit sample variance so that correlation structure, not raw
scale, drives the downstream component selection.

All values in this module are immutable after construction and safe to
share across threads; nothing here spawns concurrency of its own.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractError,
    DegenerateDataError,
    InsufficientDataError,
    ParseError,
    SchemaError,
)

logger = logging.getLogger(__name__)

TIMESTAMP_COLUMN = "timestamp"
DEFAULT_LABEL_COLUMN = "label"

AGGREGATION_POLICIES = ("sum", "mean", "count")
LABEL_POLICIES = ("max", "last")

LABEL_BOOLEAN = "boolean"
LABEL_GRADED = "graded"
LABEL_NONE = "none"


@dataclass(frozen=True)
class RawRecord:
    """One reading: a second-resolution timestamp, parameter values, optional label."""

    timestamp: int
    values: dict[str, float]
    label: float | None = None

    def __post_init__(self):
        if self.timestamp < 0:
            raise ContractError(f"timestamp must be non-negative, got {self.timestamp}")
        for name, value in self.values.items():
            if not math.isfinite(value):
                raise ContractError(f"parameter {name!r} has non-finite value {value!r}")
        if self.label is not None and not math.isfinite(self.label):
            raise ContractError(f"label has non-finite value {self.label!r}")


@dataclass(eq=False)
class LabeledObservation:
    """One aggregated window: start second, feature vector, optional label."""

    window_start: int
    features: np.ndarray
    label: float | None = None


@dataclass(eq=False)
class Dataset:
    """An ordered collection of observations over named parameters.

    ``label_kind`` is one of ``boolean`` (labels in {0, 1}), ``graded``
    (labels in [0, 1]) or ``none`` (unlabeled, detection-phase data); a
    dataset uses exactly one kind throughout.
    """

    parameter_names: list[str]
    observations: list[LabeledObservation]
    label_kind: str = LABEL_BOOLEAN

    def __post_init__(self):
        if not self.parameter_names:
            raise ContractError("a dataset needs at least one parameter")
        if len(set(self.parameter_names)) != len(self.parameter_names):
            raise ContractError("parameter names must be unique")
        if any(not name for name in self.parameter_names):
            raise ContractError("parameter names must be non-empty")
        if self.label_kind not in (LABEL_BOOLEAN, LABEL_GRADED, LABEL_NONE):
            raise ContractError(f"unknown label kind {self.label_kind!r}")
        width = len(self.parameter_names)
        previous = None
        for obs in self.observations:
            if len(obs.features) != width:
                raise ContractError(
                    f"observation at window {obs.window_start} has "
                    f"{len(obs.features)} features, expected {width}"
                )
            if previous is not None and obs.window_start < previous:
                raise ContractError("observations must be ordered by window start")
            previous = obs.window_start
            _check_label(obs.label, self.label_kind)

    def __len__(self) -> int:
        return len(self.observations)

    def feature_matrix(self) -> np.ndarray:
        return np.array([obs.features for obs in self.observations], dtype=float)

    def labels(self) -> np.ndarray | None:
        if self.label_kind == LABEL_NONE:
            return None
        return np.array([obs.label for obs in self.observations], dtype=float)

    def window_starts(self) -> list[int]:
        return [obs.window_start for obs in self.observations]


@dataclass(eq=False)
class StandardizationParams:
    """Column means/stddevs of the retained columns plus the dropped names.

    ``stddevs`` are sample standard deviations (divisor N-1) and strictly
    positive; zero-variance columns are dropped before standardization and
    recorded in ``dropped_names``.
    """

    parameter_names: list[str]
    means: np.ndarray
    stddevs: np.ndarray
    dropped_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if np.any(np.asarray(self.stddevs) <= 0):
            raise ContractError("standardization stddevs must be strictly positive")

    def transform(self, data: np.ndarray) -> np.ndarray:
        """Standardize a vector or matrix whose columns are the retained parameters."""
        arr = np.asarray(data, dtype=float)
        width = arr.shape[-1] if arr.ndim else 0
        if arr.ndim not in (1, 2) or width != len(self.parameter_names):
            raise ContractError(
                f"expected {len(self.parameter_names)} columns, got shape {arr.shape}"
            )
        return (arr - self.means) / self.stddevs


def _check_label(label: float | None, kind: str) -> None:
    if kind == LABEL_NONE:
        if label is not None:
            raise ContractError("unlabeled dataset contains a labeled observation")
        return
    if label is None:
        raise ContractError(f"{kind} dataset contains an unlabeled observation")
    if kind == LABEL_BOOLEAN and label not in (0.0, 1.0):
        raise ContractError(f"boolean label must be 0 or 1, got {label!r}")
    if kind == LABEL_GRADED and not 0.0 <= label <= 1.0:
        raise ContractError(f"graded label must lie in [0, 1], got {label!r}")


def infer_label_kind(labels) -> str:
    values = [float(v) for v in labels]
    if not values:
        return LABEL_NONE
    if all(v in (0.0, 1.0) for v in values):
        return LABEL_BOOLEAN
    if all(0.0 <= v <= 1.0 for v in values):
        return LABEL_GRADED
    bad = next(v for v in values if not 0.0 <= v <= 1.0)
    raise ContractError(f"label {bad!r} is outside [0, 1]")


def parse_records(
    stream,
    parameter_names: list[str] | None = None,
    label_column: str = DEFAULT_LABEL_COLUMN,
    require_label: bool = False,
) -> list[RawRecord]:
    """Parse a delimited text table into raw records.

    The stream must be comma-separated with a header row naming
    ``timestamp``, one column per parameter, and optionally the label
    column. When ``parameter_names`` is None every non-timestamp,
    non-label column is taken as a parameter, in header order.

    Raises:
        SchemaError: a required column is missing from the header.
        ParseError: one or more cells could not be parsed; the error
            collects every malformed row as ``line <n>: <reason>`` with
            physical line numbers (header = line 1).
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("input is empty: missing header row") from None
    header = [h.strip() for h in header]

    if TIMESTAMP_COLUMN not in header:
        raise SchemaError(f"missing required column {TIMESTAMP_COLUMN!r}")
    has_label = label_column in header
    if require_label and not has_label:
        raise SchemaError(f"missing required column {label_column!r}")
    if parameter_names is None:
        parameter_names = [h for h in header if h not in (TIMESTAMP_COLUMN, label_column)]
    else:
        for name in parameter_names:
            if name not in header:
                raise SchemaError(f"missing required column {name!r}")
    if not parameter_names:
        raise SchemaError("no parameter columns found")

    index = {name: header.index(name) for name in parameter_names}
    ts_index = header.index(TIMESTAMP_COLUMN)
    label_index = header.index(label_column) if has_label else None

    records: list[RawRecord] = []
    failures: list[tuple[int, str]] = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            failures.append((line_no, f"expected {len(header)} cells, got {len(row)}"))
            continue
        try:
            records.append(
                _parse_row(row, ts_index, index, label_index, parameter_names)
            )
        except (ValueError, ContractError) as exc:
            failures.append((line_no, str(exc)))

    if failures:
        details = "; ".join(f"line {n}: {reason}" for n, reason in failures)
        raise ParseError(f"{len(failures)} malformed row(s): {details}", failures)
    return records


def _parse_row(row, ts_index, index, label_index, parameter_names) -> RawRecord:
    ts_text = row[ts_index].strip()
    try:
        timestamp = int(ts_text)
    except ValueError:
        raise ValueError(f"column {TIMESTAMP_COLUMN!r}: {ts_text!r} is not an integer")
    values = {}
    for name in parameter_names:
        cell = row[index[name]].strip()
        try:
            values[name] = float(cell)
        except ValueError:
            raise ValueError(f"column {name!r}: {cell!r} is not a number")
    label = None
    if label_index is not None:
        cell = row[label_index].strip()
        try:
            label = float(cell)
        except ValueError:
            raise ValueError(f"column label: {cell!r} is not a number")
    return RawRecord(timestamp=timestamp, values=values, label=label)


def resolve_policy(policies, name: str) -> str:
    """Look up the aggregation policy for one parameter.

    ``policies`` is either a single policy name applied to every column or
    a mapping from parameter name to policy with an optional ``"*"``
    default.
    """
    if isinstance(policies, str):
        policy = policies
    else:
        policy = policies.get(name, policies.get("*", "sum"))
    if policy not in AGGREGATION_POLICIES:
        raise ContractError(f"unknown aggregation policy {policy!r} for {name!r}")
    return policy


def combine_window(window_records: list[RawRecord], parameter_names, policies) -> np.ndarray:
    """Aggregate the records of one window into a single feature vector."""
    features = np.empty(len(parameter_names), dtype=float)
    for j, name in enumerate(parameter_names):
        policy = resolve_policy(policies, name)
        values = [r.values[name] for r in window_records]
        if policy == "sum":
            features[j] = math.fsum(values)
        elif policy == "mean":
            features[j] = math.fsum(values) / len(values)
        else:
            features[j] = float(len(values))
    return features


def aggregate_windows(
    records: list[RawRecord],
    window_seconds: int,
    policies="sum",
    label_policy: str = "max",
) -> Dataset:
    """Group records into fixed windows and aggregate each one.

    Every populated window yields one observation; empty windows are
    omitted. ``label_policy`` ``max`` marks a window anomalous when any
    of its records is; ``last`` keeps the label of the latest record.
    Records must be either all labeled (training) or all unlabeled
    (detection).
    """
    if not isinstance(window_seconds, int) or window_seconds < 1:
        raise ContractError(f"window_seconds must be a positive integer, got {window_seconds!r}")
    if label_policy not in LABEL_POLICIES:
        raise ContractError(f"unknown label policy {label_policy!r}")
    if not records:
        raise ContractError("at least one record is required")

    labeled = [r.label is not None for r in records]
    if any(labeled) and not all(labeled):
        raise ContractError("records must be all labeled or all unlabeled")
    has_labels = labeled[0]

    parameter_names = list(records[0].values.keys())
    expected = set(parameter_names)
    for r in records:
        if set(r.values.keys()) != expected:
            raise SchemaError(
                f"record at t={r.timestamp} has parameters {sorted(r.values)}, "
                f"expected {sorted(expected)}"
            )

    buckets: dict[int, list[tuple[int, RawRecord]]] = {}
    for order, record in enumerate(records):
        buckets.setdefault(record.timestamp // window_seconds, []).append((order, record))

    observations = []
    for window_id in sorted(buckets):
        entries = buckets[window_id]
        window_records = [r for _, r in entries]
        features = combine_window(window_records, parameter_names, policies)
        label = None
        if has_labels:
            if label_policy == "max":
                label = max(r.label for r in window_records)
            else:
                _, last = max(entries, key=lambda e: (e[1].timestamp, e[0]))
                label = last.label
        observations.append(
            LabeledObservation(window_start=window_id * window_seconds,
                               features=features, label=label)
        )

    kind = infer_label_kind([o.label for o in observations]) if has_labels else LABEL_NONE
    return Dataset(parameter_names=parameter_names, observations=observations,
                   label_kind=kind)


def standardize(dataset: Dataset) -> tuple[Dataset, StandardizationParams]:
    """Rescale every column to mean 0 and sample standard deviation 1.

    Zero-variance columns carry no variability, break the rescaling, and
    are dropped; their names are recorded on the returned params and
    logged as a warning.

    Raises:
        InsufficientDataError: fewer than 2 observations.
        DegenerateDataError: every column has zero variance.
    """
    if len(dataset) < 2:
        raise InsufficientDataError(
            f"standardization needs at least 2 observations, got {len(dataset)}"
        )
    X = dataset.feature_matrix()
    means = X.mean(axis=0)
    stddevs = X.std(axis=0, ddof=1)
    keep = stddevs > 1e-12 * np.maximum(1.0, np.abs(means))

    dropped = [name for name, k in zip(dataset.parameter_names, keep) if not k]
    retained = [name for name, k in zip(dataset.parameter_names, keep) if k]
    if dropped:
        logger.warning("dropping zero-variance column(s): %s", ", ".join(dropped))
    if not retained:
        raise DegenerateDataError("every column has zero variance")

    params = StandardizationParams(
        parameter_names=retained,
        means=means[keep],
        stddevs=stddevs[keep],
        dropped_names=dropped,
    )
    Z = params.transform(X[:, keep])
    observations = [
        LabeledObservation(window_start=obs.window_start, features=row, label=obs.label)
        for obs, row in zip(dataset.observations, Z)
    ]
    return Dataset(retained, observations, dataset.label_kind), params
