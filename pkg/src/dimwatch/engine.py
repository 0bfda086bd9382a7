"""Training, detection and feedback phases, plus model persistence.

Training runs the full pipeline: window aggregation, standardization,
component selection, per-dimension indicator induction with empirical-risk
selection, and the global fit. Detection replays the stored transform on
live records and emits one report per closed window. Feedback retrains on
the original training windows plus a confirmed batch and keeps the new
model only if it does not degrade on a seeded holdout of the original
data.

A fitted model is immutable; detection never mutates it, so distinct
windows may be scored concurrently against a shared model. The persisted
form is a versioned, checksummed, human-readable document; persisting and
re-loading reproduces predictions and bytes exactly.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import dataset as ds
from . import fusion
from . import pca as pca_mod
from .config import Config
from .errors import (
    AlignmentError,
    ContractError,
    FormatVersionError,
    InsufficientDataError,
    IntegrityError,
    NonSeparableDataError,
    SchemaError,
    TrainingError,
)
from .indicators import (
    ABSOLUTE,
    IndividualAnomalyIndicator,
    TreeIndicator,
    ZERO_ONE,
    empirical_risk,
    fit_tree,
    select_indicator,
    train_system,
    variant_from_payload,
    variant_payload,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
_MAGIC = "dimwatch-model"


@dataclass(eq=False)
class ModelSchema:
    """Everything needed to rebuild the input transform at detection time."""

    parameter_names: list[str]
    window_seconds: int
    aggregation: dict
    label_policy: str
    feature_groups: dict
    label_kind: str


@dataclass(eq=False)
class TrainedDimension:
    """One dimension: where its values come from and its selected indicator.

    ``source`` is a component index for projected dimensions or a list of
    standardized column names for feature groups. ``tree_candidate`` keeps
    the tree learner's output for the training summary; it is transient
    and not persisted.
    """

    dimension_id: str
    kind: str  # "component" | "group"
    source: object
    indicator: IndividualAnomalyIndicator
    candidate_risks: dict = field(default_factory=dict)
    tree_candidate: TreeIndicator | None = None


@dataclass(eq=False)
class ModelMetadata:
    model_version: int
    n_observations: int
    label_counts: dict
    af_mode: str
    variability: list
    trained_with: dict


@dataclass(eq=False)
class DetectorModel:
    schema: ModelSchema
    standardization: ds.StandardizationParams
    pca: pca_mod.PcaModel | None
    dimensions: list[TrainedDimension]
    global_indicator: fusion.GlobalIndicator
    metadata: ModelMetadata
    training_observations: list[ds.LabeledObservation]

    def dimension_ids(self) -> list[str]:
        return [dim.dimension_id for dim in self.dimensions]

    def _retained_indices(self) -> list[int]:
        return [self.schema.parameter_names.index(n)
                for n in self.standardization.parameter_names]

    def dimension_inputs(self, raw_matrix: np.ndarray) -> dict:
        """Per-dimension input values for a matrix of raw full-width rows."""
        X = np.asarray(raw_matrix, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != len(self.schema.parameter_names):
            raise ContractError(
                f"expected {len(self.schema.parameter_names)} raw feature(s), "
                f"got {X.shape[1]}"
            )
        Z = self.standardization.transform(X[:, self._retained_indices()])
        retained = self.standardization.parameter_names
        projected = None
        if self.pca is not None:
            pca_cols = [retained.index(n)
                        for n in self.pca.standardization.parameter_names]
            projected = Z[:, pca_cols] @ self.pca.feature_matrix
        inputs = {}
        for dim in self.dimensions:
            if dim.kind == "component":
                inputs[dim.dimension_id] = projected[:, dim.source]
            else:
                cols = [retained.index(n) for n in dim.source]
                inputs[dim.dimension_id] = Z[:, cols]
        return inputs

    def score_vector(self, raw_features) -> tuple[list[float], float, bool]:
        """Anomaly factors, global factor and flag for one raw feature vector."""
        inputs = self.dimension_inputs(np.asarray(raw_features, dtype=float))
        graded = self.metadata.af_mode == "graded"
        afs = []
        for dim in self.dimensions:
            value = inputs[dim.dimension_id][0]
            afs.append(dim.indicator.predict_factor(value, graded=graded))
        factor, flagged = self.global_indicator.evaluate(afs)
        return afs, factor, flagged


@dataclass(eq=False)
class AnomalyReport:
    window_start: int
    af_values: list[float]
    global_factor: float
    flagged: bool
    model_version: int


@dataclass(eq=False)
class FeedbackBatch:
    """Detection-phase windows with confirmed labels."""

    observations: list[ds.LabeledObservation]
    source: str = "analyst"


@dataclass(eq=False)
class FeedbackResult:
    status: str  # "accepted" | "rejected" | "deferred"
    model: DetectorModel
    old_risk: float | None = None
    new_risk: float | None = None
    message: str = ""


def train(records: list[ds.RawRecord], config: Config | None = None) -> DetectorModel:
    """Run the whole training pipeline on raw labeled records."""
    config = (config or Config()).validate()
    if not records:
        raise ContractError("training needs at least one record")
    if any(r.label is None for r in records):
        raise TrainingError("training records must carry labels")
    aggregated = ds.aggregate_windows(records, config.window_seconds,
                                      config.aggregation, config.label_policy)
    return fit_observations(aggregated, config)


def fit_observations(aggregated: ds.Dataset, config: Config) -> DetectorModel:
    """Fit a detector from already-aggregated labeled observations."""
    if len(aggregated) < 2:
        raise InsufficientDataError(
            f"training needs at least 2 windows, got {len(aggregated)}"
        )
    if aggregated.label_kind == ds.LABEL_NONE:
        raise TrainingError("training data is unlabeled")
    if aggregated.label_kind == ds.LABEL_GRADED:
        raise TrainingError(
            "indicator induction requires boolean labels; graded labels are "
            "only supported for scoring"
        )
    labels = aggregated.labels().astype(int)
    n_ones = int(labels.sum())
    if n_ones == 0 or n_ones == len(labels):
        raise TrainingError(
            "training data contains a single class; no indicator can be validated"
        )

    standardized, std_params = ds.standardize(aggregated)
    retained = std_params.parameter_names

    groups = {}
    for name, columns in config.feature_groups.items():
        unknown = [c for c in columns if c not in aggregated.parameter_names]
        if unknown:
            raise SchemaError(
                f"feature group {name!r} names unknown column(s): {', '.join(unknown)}"
            )
        kept = [c for c in columns if c in retained]
        if not kept:
            logger.warning("feature group %r lost all columns to zero variance", name)
            continue
        groups[name] = kept
    grouped_columns = {c for cols in groups.values() for c in cols}
    ungrouped = [c for c in retained if c not in grouped_columns]

    Z = standardized.feature_matrix()
    pca_model = None
    variability_rows: list = []
    dimensions: list[TrainedDimension] = []

    if ungrouped:
        cols = [retained.index(c) for c in ungrouped]
        sub_params = ds.StandardizationParams(
            parameter_names=list(ungrouped),
            means=std_params.means[cols],
            stddevs=std_params.stddevs[cols],
            dropped_names=list(std_params.dropped_names),
        )
        sub_dataset = ds.Dataset(
            list(ungrouped),
            [ds.LabeledObservation(obs.window_start, Z[i, cols], obs.label)
             for i, obs in enumerate(standardized.observations)],
            standardized.label_kind,
        )
        pca_model, table = pca_mod.fit_pca(sub_dataset, sub_params,
                                           config.variability_threshold)
        variability_rows = [
            [row.eigenvalue, row.percent, row.cumulative] for row in table.rows
        ]
        projected = Z[:, cols] @ pca_model.feature_matrix
        for j in range(pca_model.selected_p):
            dimensions.append(
                _induce_dimension(f"F{j + 1}", "component", j, projected[:, j],
                                  labels, config)
            )
    for name in sorted(groups):
        columns = groups[name]
        idx = [retained.index(c) for c in columns]
        dimensions.append(
            _induce_dimension(name, "group", columns, Z[:, idx], labels, config)
        )
    if not dimensions:
        raise TrainingError("no dimensions left to train on")

    graded = config.af_mode == "graded"
    af_columns = []
    inputs_by_dim = {}
    for dim in dimensions:
        if dim.kind == "component":
            values = projected[:, dim.source]
        else:
            idx = [retained.index(c) for c in dim.source]
            values = Z[:, idx]
        inputs_by_dim[dim.dimension_id] = values
        af_columns.append(
            np.array([dim.indicator.predict_factor(v, graded=graded) for v in values])
        )
    af_matrix = np.column_stack(af_columns)
    global_indicator = fusion.fit_global(
        af_matrix, labels, [d.dimension_id for d in dimensions],
        cp_min=config.cp_min, flag_threshold=config.flag_threshold,
    )

    schema = ModelSchema(
        parameter_names=list(aggregated.parameter_names),
        window_seconds=config.window_seconds,
        aggregation=dict(config.aggregation),
        label_policy=config.label_policy,
        feature_groups={k: list(v) for k, v in groups.items()},
        label_kind=aggregated.label_kind,
    )
    metadata = ModelMetadata(
        model_version=1,
        n_observations=len(aggregated),
        label_counts={"0": int(len(labels) - n_ones), "1": n_ones},
        af_mode=config.af_mode,
        variability=variability_rows,
        trained_with={
            "cp_min": config.cp_min,
            "min_split": config.min_split,
            "variability_threshold": config.variability_threshold,
            "learners": list(config.learners),
        },
    )
    return DetectorModel(
        schema=schema,
        standardization=std_params,
        pca=pca_model,
        dimensions=dimensions,
        global_indicator=global_indicator,
        metadata=metadata,
        training_observations=list(aggregated.observations),
    )


def _induce_dimension(dimension_id: str, kind: str, source, values, labels,
                      config: Config) -> TrainedDimension:
    """Train every applicable learner on one dimension and keep the best."""
    values = np.asarray(values, dtype=float)
    single_column = values.ndim == 1 or values.shape[1] == 1
    names = [dimension_id] if kind == "component" else list(source)

    candidates = []
    risks = {}
    tree_candidate = None
    if "tree" in config.learners:
        tree_candidate = fit_tree(values, labels, cp_min=config.cp_min,
                                  min_split=config.min_split, feature_names=names)
        candidates.append(tree_candidate)
        risks["tree"] = empirical_risk(tree_candidate, values, labels, ZERO_ONE)
    if "rule" in config.learners and single_column:
        flat = values.reshape(-1)
        try:
            rule_candidate = train_system(flat, labels)
        except NonSeparableDataError as exc:
            logger.warning("rule learner gave up on %s: %s", dimension_id, exc)
        else:
            candidates.append(rule_candidate)
            risks["rule"] = empirical_risk(rule_candidate, flat, labels, ZERO_ONE)
    if not candidates:
        raise TrainingError(f"no learner produced a candidate for {dimension_id}")
    selected = select_indicator(candidates, values if not single_column else values.reshape(-1),
                                labels, ZERO_ONE, dimension_id=dimension_id)
    return TrainedDimension(
        dimension_id=dimension_id, kind=kind, source=source,
        indicator=selected, candidate_risks=risks, tree_candidate=tree_candidate,
    )


class DetectionRun:
    """Streaming detection over raw unlabeled records.

    Iterating yields one AnomalyReport per populated window, in window
    order. A window closes once a window at least ``window_lag`` ahead
    begins (or the stream ends); records for already-closed windows are
    rejected and counted in ``rejected``.
    """

    def __init__(self, model: DetectorModel, records, window_lag: int = 2):
        if window_lag < 1:
            raise ContractError(f"window_lag must be positive, got {window_lag}")
        self.model = model
        self.records = records
        self.window_lag = window_lag
        self.rejected = 0
        self.scored = 0
        self.flagged = 0

    def __iter__(self):
        model = self.model
        width = model.schema.window_seconds
        expected = set(model.schema.parameter_names)
        open_windows: dict[int, list[ds.RawRecord]] = {}
        max_window: int | None = None
        for record in self.records:
            seen = set(record.values.keys())
            if seen != expected:
                unknown = sorted(seen - expected)
                missing = sorted(expected - seen)
                raise SchemaError(
                    f"record at t={record.timestamp}: unknown parameter(s) "
                    f"{unknown or '[]'}, missing {missing or '[]'}"
                )
            window = record.timestamp // width
            if max_window is not None and window <= max_window - self.window_lag:
                self.rejected += 1
                continue
            open_windows.setdefault(window, []).append(record)
            if max_window is None or window > max_window:
                max_window = window
                for ready in sorted(w for w in open_windows
                                    if w <= max_window - self.window_lag):
                    yield self._score(ready, open_windows.pop(ready))
        for ready in sorted(open_windows):
            yield self._score(ready, open_windows.pop(ready))

    def _score(self, window: int, records: list[ds.RawRecord]) -> AnomalyReport:
        features = ds.combine_window(records, self.model.schema.parameter_names,
                                     self.model.schema.aggregation)
        afs, factor, flagged = self.model.score_vector(features)
        self.scored += 1
        if flagged:
            self.flagged += 1
        return AnomalyReport(
            window_start=window * self.model.schema.window_seconds,
            af_values=afs,
            global_factor=factor,
            flagged=flagged,
            model_version=self.model.metadata.model_version,
        )


def detect(model: DetectorModel, records, config: Config | None = None) -> DetectionRun:
    """Score a stream of unlabeled records against a fitted model."""
    lag = (config or Config()).window_lag
    return DetectionRun(model, records, window_lag=lag)


def _global_risk(model: DetectorModel, observations) -> float:
    """Zero-one risk of the flag decision over labeled observations."""
    losses = []
    for obs in observations:
        _, _, flagged = model.score_vector(obs.features)
        losses.append(0.0 if int(obs.label) == int(flagged) else 1.0)
    return float(np.mean(losses))


def feedback(model: DetectorModel, batch: FeedbackBatch,
             config: Config | None = None) -> FeedbackResult:
    """Retrain on original data plus a confirmed batch, gated by holdout risk.

    Batches below ``feedback_min_batch`` defer (no-op). Otherwise the
    pipeline re-runs on the union of the model's training windows and the
    batch; the retrained model is accepted only if its flag risk on a
    seeded holdout drawn from the original training windows does not
    exceed the incumbent's on the same holdout. The model version
    increments on acceptance.
    """
    config = (config or Config()).validate()
    width = len(model.schema.parameter_names)
    for obs in batch.observations:
        if len(obs.features) != width:
            raise AlignmentError(
                f"batch window {obs.window_start} has {len(obs.features)} "
                f"feature(s), expected {width}"
            )
        if obs.label is None:
            raise ContractError("feedback batches need confirmed labels")
        ds._check_label(obs.label, model.schema.label_kind)

    if len(batch.observations) < config.feedback_min_batch:
        return FeedbackResult(
            status="deferred", model=model,
            message=(f"batch of {len(batch.observations)} below minimum "
                     f"{config.feedback_min_batch}; retraining deferred"),
        )

    combined = sorted(model.training_observations + list(batch.observations),
                      key=lambda o: o.window_start)
    combined_ds = ds.Dataset(list(model.schema.parameter_names), combined,
                             model.schema.label_kind)
    retrained = fit_observations(combined_ds, config)

    originals = model.training_observations
    rng = np.random.default_rng(config.seed)
    k = max(1, int(round(config.feedback_holdout_fraction * len(originals))))
    holdout = [originals[i] for i in rng.permutation(len(originals))[:k]]

    old_risk = _global_risk(model, holdout)
    new_risk = _global_risk(retrained, holdout)
    if new_risk <= old_risk:
        retrained.metadata.model_version = model.metadata.model_version + 1
        return FeedbackResult(status="accepted", model=retrained,
                              old_risk=old_risk, new_risk=new_risk,
                              message="retrained model accepted")
    return FeedbackResult(status="rejected", model=model,
                          old_risk=old_risk, new_risk=new_risk,
                          message="retrained model rejected: holdout risk increased")


def evaluate(model: DetectorModel, labeled: ds.Dataset) -> dict:
    """Global risk, confusion counts, and per-dimension risks on labeled data."""
    if labeled.label_kind == ds.LABEL_NONE:
        raise ContractError("evaluation needs labeled data")
    labels = labeled.labels()
    X = labeled.feature_matrix()
    if X.shape[1] != len(model.schema.parameter_names):
        raise SchemaError(
            f"evaluation data has {X.shape[1]} parameter(s), model expects "
            f"{len(model.schema.parameter_names)}"
        )
    loss_fn = ZERO_ONE if labeled.label_kind == ds.LABEL_BOOLEAN else ABSOLUTE

    confusion = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    losses = []
    for i in range(X.shape[0]):
        _, factor, flagged = model.score_vector(X[i])
        losses.append(loss_fn(labels[i], float(factor)))
        if labeled.label_kind == ds.LABEL_BOOLEAN:
            actual = int(labels[i])
            if flagged and actual == 1:
                confusion["tp"] += 1
            elif flagged:
                confusion["fp"] += 1
            elif actual == 1:
                confusion["fn"] += 1
            else:
                confusion["tn"] += 1

    inputs = model.dimension_inputs(X)
    per_dimension = {}
    if labeled.label_kind == ds.LABEL_BOOLEAN:
        for dim in model.dimensions:
            per_dimension[dim.dimension_id] = empirical_risk(
                dim.indicator, inputs[dim.dimension_id], labels, ZERO_ONE
            )
    return {
        "risk": float(np.mean(losses)),
        "confusion": confusion,
        "per_dimension": per_dimension,
        "windows": X.shape[0],
    }


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def model_payload(model: DetectorModel) -> dict:
    payload = {
        "format": FORMAT_VERSION,
        "schema": {
            "parameter_names": list(model.schema.parameter_names),
            "window_seconds": model.schema.window_seconds,
            "aggregation": dict(model.schema.aggregation),
            "label_policy": model.schema.label_policy,
            "feature_groups": {k: list(v) for k, v in model.schema.feature_groups.items()},
            "label_kind": model.schema.label_kind,
        },
        "standardization": {
            "parameter_names": list(model.standardization.parameter_names),
            "means": [float(v) for v in model.standardization.means],
            "stddevs": [float(v) for v in model.standardization.stddevs],
            "dropped": list(model.standardization.dropped_names),
        },
        "pca": None,
        "dimensions": [
            {
                "id": dim.dimension_id,
                "kind": dim.kind,
                "source": dim.source if dim.kind == "component" else list(dim.source),
                "indicator": variant_payload(dim.indicator.variant),
                "risk": float(dim.indicator.empirical_risk),
                "candidate_risks": {k: float(v) for k, v in sorted(dim.candidate_risks.items())},
            }
            for dim in model.dimensions
        ],
        "global": fusion.global_payload(model.global_indicator),
        "metadata": {
            "model_version": model.metadata.model_version,
            "n_observations": model.metadata.n_observations,
            "label_counts": dict(model.metadata.label_counts),
            "af_mode": model.metadata.af_mode,
            "variability": [[float(x) for x in row] for row in model.metadata.variability],
            "trained_with": model.metadata.trained_with,
        },
        "training_data": {
            "window_starts": [int(o.window_start) for o in model.training_observations],
            "features": [[float(v) for v in o.features] for o in model.training_observations],
            "labels": [float(o.label) for o in model.training_observations],
        },
    }
    if model.pca is not None:
        payload["pca"] = {
            "parameter_names": list(model.pca.standardization.parameter_names),
            "eigenvalues": [float(p.value) for p in model.pca.eigenpairs],
            "eigenvectors": [[float(v) for v in p.vector] for p in model.pca.eigenpairs],
            "selected_p": model.pca.selected_p,
        }
    return payload


def model_from_payload(payload: dict) -> DetectorModel:
    schema = ModelSchema(
        parameter_names=list(payload["schema"]["parameter_names"]),
        window_seconds=int(payload["schema"]["window_seconds"]),
        aggregation=dict(payload["schema"]["aggregation"]),
        label_policy=payload["schema"]["label_policy"],
        feature_groups={k: list(v) for k, v in payload["schema"]["feature_groups"].items()},
        label_kind=payload["schema"]["label_kind"],
    )
    std = ds.StandardizationParams(
        parameter_names=list(payload["standardization"]["parameter_names"]),
        means=np.array(payload["standardization"]["means"], dtype=float),
        stddevs=np.array(payload["standardization"]["stddevs"], dtype=float),
        dropped_names=list(payload["standardization"]["dropped"]),
    )
    pca_model = None
    if payload["pca"] is not None:
        raw = payload["pca"]
        names = list(raw["parameter_names"])
        cols = [std.parameter_names.index(n) for n in names]
        sub_params = ds.StandardizationParams(
            parameter_names=names,
            means=std.means[cols],
            stddevs=std.stddevs[cols],
            dropped_names=list(std.dropped_names),
        )
        pairs = [
            pca_mod.EigenPair(value=value, vector=np.array(vector, dtype=float))
            for value, vector in zip(raw["eigenvalues"], raw["eigenvectors"])
        ]
        p = int(raw["selected_p"])
        pca_model = pca_mod.PcaModel(
            standardization=sub_params, eigenpairs=pairs, selected_p=p,
            feature_matrix=np.column_stack([pair.vector for pair in pairs[:p]]),
        )
    dimensions = []
    for raw in payload["dimensions"]:
        source = raw["source"] if raw["kind"] == "component" else list(raw["source"])
        dimensions.append(TrainedDimension(
            dimension_id=raw["id"],
            kind=raw["kind"],
            source=source,
            indicator=IndividualAnomalyIndicator(
                dimension_id=raw["id"],
                variant=variant_from_payload(raw["indicator"]),
                empirical_risk=float(raw["risk"]),
            ),
            candidate_risks=dict(raw["candidate_risks"]),
        ))
    metadata = ModelMetadata(
        model_version=int(payload["metadata"]["model_version"]),
        n_observations=int(payload["metadata"]["n_observations"]),
        label_counts=dict(payload["metadata"]["label_counts"]),
        af_mode=payload["metadata"]["af_mode"],
        variability=[list(row) for row in payload["metadata"]["variability"]],
        trained_with=dict(payload["metadata"]["trained_with"]),
    )
    training = [
        ds.LabeledObservation(window_start=w, features=np.array(f, dtype=float), label=l)
        for w, f, l in zip(payload["training_data"]["window_starts"],
                           payload["training_data"]["features"],
                           payload["training_data"]["labels"])
    ]
    return DetectorModel(
        schema=schema, standardization=std, pca=pca_model, dimensions=dimensions,
        global_indicator=fusion.global_from_payload(payload["global"]),
        metadata=metadata, training_observations=training,
    )


def serialize(model: DetectorModel) -> bytes:
    body = json.dumps(model_payload(model), sort_keys=True, indent=1).encode("utf-8")
    digest = hashlib.sha256(body).hexdigest()
    header = f"{_MAGIC} format={FORMAT_VERSION}\nchecksum=sha256:{digest}\n"
    return header.encode("ascii") + body


def persist(model: DetectorModel, destination) -> None:
    """Write the model to a file; ``load`` restores it exactly."""
    data = serialize(model)
    with open(destination, "wb") as handle:
        handle.write(data)


def deserialize(data: bytes) -> DetectorModel:
    try:
        header_line, checksum_line, body = data.split(b"\n", 2)
    except ValueError:
        raise IntegrityError("model file is truncated") from None
    header = header_line.decode("ascii", errors="replace")
    if not header.startswith(_MAGIC + " format="):
        raise IntegrityError(f"not a model file (header {header!r})")
    try:
        found = int(header.split("format=", 1)[1])
    except ValueError:
        raise IntegrityError(f"unreadable format version in header {header!r}") from None
    if found != FORMAT_VERSION:
        raise FormatVersionError(
            f"model format version {found} is not supported (expected {FORMAT_VERSION})",
            found=found, supported=FORMAT_VERSION,
        )
    checksum = checksum_line.decode("ascii", errors="replace")
    if not checksum.startswith("checksum=sha256:"):
        raise IntegrityError("model file is missing its checksum line")
    declared = checksum.split(":", 1)[1]
    actual = hashlib.sha256(body).hexdigest()
    if actual != declared:
        raise IntegrityError(
            f"checksum mismatch: declared {declared[:12]}…, computed {actual[:12]}…"
        )
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"model body is not valid JSON: {exc}") from None
    return model_from_payload(payload)


def load(source) -> DetectorModel:
    """Load a model produced by ``persist``.

    Raises:
        FormatVersionError: the file declares an unsupported version.
        IntegrityError: the file is truncated or fails its checksum.
    """
    with open(source, "rb") as handle:
        return deserialize(handle.read())
