"""Per-dimension anomaly indicator induction and empirical-risk selection.

Two learners produce candidate indicators for a dimension:

* a binary classification tree grown by recursive Gini splitting, with an
  rpart-style complexity stop (a split must cut the training
  misclassification count by at least ``cp_min`` of the root error), and
* a sequential-covering threshold learner that walks the sorted data,
  adjusts a single threshold rule whenever the unsatisfied elements catch
  up with the satisfied ones, and recurses on whatever the pass left
  unsatisfied until at most 20% remain.

Candidates are scored by empirical risk (mean loss over the training
data) and the lowest-risk one becomes the dimension's indicator; ties
prefer the simpler rule form. Fitted indicators are immutable and safe
for concurrent prediction.

Boundary conventions (the two learners print them differently and they
are kept distinct on purpose): tree splits send strictly-below values to
the left child, while threshold rules assign ``label_at_or_below`` to
values less than or equal to the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

import numpy as np

from .errors import (
    ContractError,
    InsufficientDataError,
    NonSeparableDataError,
)

DEFAULT_CP_MIN = 0.01
DEFAULT_MIN_SPLIT = 20
DEFAULT_RECURSION_CAP = 16

LOSS_ZERO_ONE = "zero_one"
LOSS_ABSOLUTE = "absolute"


# ---------------------------------------------------------------------------
# Loss and risk
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LossFunction:
    """Pointwise loss: ``zero_one`` over {0, 1} labels or ``absolute`` over [0, 1]."""

    kind: str

    def __post_init__(self):
        if self.kind not in (LOSS_ZERO_ONE, LOSS_ABSOLUTE):
            raise ContractError(f"unknown loss kind {self.kind!r}")

    def __call__(self, y_actual: float, y_predicted: float) -> float:
        if self.kind == LOSS_ZERO_ONE:
            for value in (y_actual, y_predicted):
                if value not in (0, 1):
                    raise ContractError(f"zero-one loss needs labels in {{0, 1}}, got {value!r}")
            return 0.0 if y_actual == y_predicted else 1.0
        for value in (y_actual, y_predicted):
            if not 0.0 <= value <= 1.0:
                raise ContractError(f"absolute loss needs labels in [0, 1], got {value!r}")
        return abs(float(y_actual) - float(y_predicted))


ZERO_ONE = LossFunction(LOSS_ZERO_ONE)
ABSOLUTE = LossFunction(LOSS_ABSOLUTE)


def loss(loss_function: LossFunction, y_actual, y_predicted) -> float:
    return loss_function(y_actual, y_predicted)


def gini(class_counts) -> float:
    """Gini impurity 1 - sum(p_c^2) of a count vector."""
    counts = np.asarray(class_counts, dtype=float)
    if np.any(counts < 0):
        raise ContractError("class counts must be non-negative")
    total = counts.sum()
    if total == 0:
        raise ContractError("class counts must not be all zero")
    p = counts / total
    return float(1.0 - np.sum(p * p))


# ---------------------------------------------------------------------------
# Decision tree
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Split:
    column: int
    threshold: float
    improvement: float


@dataclass(eq=False)
class TreeNode:
    """One node: class counts, majority prediction, and an optional split.

    Children partition the node's rows (strictly-below goes left), so
    child counts sum to the parent's. ``expected_loss`` is
    1 - max(probabilities).
    """

    node_id: int
    class_counts: tuple[int, int]
    probabilities: tuple[float, float]
    predicted_class: int
    expected_loss: float
    split: Split | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def n_observations(self) -> int:
        return int(sum(self.class_counts))

    def is_leaf(self) -> bool:
        return self.split is None


class CpRow(NamedTuple):
    cp: float
    nsplit: int
    rel_error: float


@dataclass(eq=False)
class TreeIndicator:
    """A fitted classification tree over one dimension's columns."""

    root: TreeNode
    cp_table: list[CpRow]
    cp_min: float
    min_split: int
    feature_names: list[str] | None = None

    @property
    def n_observations(self) -> int:
        return self.root.n_observations

    def leaf_for(self, x) -> TreeNode:
        vector = np.atleast_1d(np.asarray(x, dtype=float))
        node = self.root
        while not node.is_leaf():
            if vector.shape[0] <= node.split.column:
                raise ContractError(
                    f"input has {vector.shape[0]} column(s), split needs column "
                    f"{node.split.column}"
                )
            node = node.left if vector[node.split.column] < node.split.threshold else node.right
        return node

    def predict(self, x) -> int:
        return self.leaf_for(x).predicted_class

    def predict_proba(self, x) -> float:
        """Leaf probability of class 1."""
        return self.leaf_for(x).probabilities[1]


class TreePrediction(NamedTuple):
    label: int
    confidence: float


def predict_tree(tree: TreeIndicator, x) -> TreePrediction:
    """Predicted class plus the leaf's probability of class 1."""
    leaf = tree.leaf_for(x)
    return TreePrediction(label=leaf.predicted_class, confidence=leaf.probabilities[1])


def _as_boolean_labels(y) -> np.ndarray:
    labels = np.asarray(y, dtype=float)
    if labels.ndim != 1:
        raise ContractError(f"labels must be 1-D, got shape {labels.shape}")
    if labels.size and not np.all(np.isin(labels, (0.0, 1.0))):
        raise ContractError("induction requires boolean labels in {0, 1}")
    return labels.astype(int)


def _as_feature_matrix(X) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ContractError(f"features must be 1-D or 2-D, got shape {arr.shape}")
    return arr


def _node_errors(n0: int, n1: int) -> int:
    return min(n0, n1)


def _best_split(X: np.ndarray, y: np.ndarray):
    """Best (improvement, column, threshold, left_mask) by Gini gain.

    Candidate thresholds are midpoints between consecutive distinct
    sorted values; improvement is N * (gini(node) - weighted child gini).
    Ties keep the lowest column, then the lowest threshold.
    """
    n = len(y)
    n1 = int(y.sum())
    n0 = n - n1
    parent = n * gini((n0, n1))
    best = None
    for col in range(X.shape[1]):
        column = X[:, col]
        order = np.argsort(column, kind="stable")
        sv = column[order]
        sy = y[order]
        boundaries = np.nonzero(sv[1:] > sv[:-1])[0]
        if boundaries.size == 0:
            continue
        cum_ones = np.cumsum(sy)
        n_left = boundaries + 1
        ones_left = cum_ones[boundaries]
        zeros_left = n_left - ones_left
        n_right = n - n_left
        ones_right = n1 - ones_left
        zeros_right = n0 - zeros_left
        gini_left = 1.0 - (zeros_left / n_left) ** 2 - (ones_left / n_left) ** 2
        gini_right = 1.0 - (zeros_right / n_right) ** 2 - (ones_right / n_right) ** 2
        improvements = parent - n_left * gini_left - n_right * gini_right
        k = int(np.argmax(improvements))
        if best is None or improvements[k] > best[0]:
            boundary = boundaries[k]
            threshold = (sv[boundary] + sv[boundary + 1]) / 2.0
            best = (float(improvements[k]), col, float(threshold))
    if best is None:
        return None
    improvement, col, threshold = best
    return improvement, col, threshold, X[:, col] < threshold


def fit_tree(
    X,
    y,
    cp_min: float = DEFAULT_CP_MIN,
    min_split: int = DEFAULT_MIN_SPLIT,
    feature_names: list[str] | None = None,
) -> TreeIndicator:
    """Grow a classification tree by recursive binary Gini splitting.

    A node becomes a leaf when it is pure, smaller than ``min_split``, or
    the best split's relative error reduction (misclassifications removed,
    measured against the root majority-rule error count) falls below
    ``cp_min``. The cp table records one row per kept split, ordered by
    decreasing reduction, plus the final state at ``cp_min``.

    Raises:
        InsufficientDataError: the dataset is empty.
        ContractError: labels are not boolean.
    """
    features = _as_feature_matrix(X)
    labels = _as_boolean_labels(y)
    if features.shape[0] == 0:
        raise InsufficientDataError("cannot fit a tree on an empty dataset")
    if features.shape[0] != labels.shape[0]:
        raise ContractError(
            f"{features.shape[0]} rows but {labels.shape[0]} labels"
        )
    if cp_min <= 0:
        raise ContractError(f"cp_min must be positive, got {cp_min!r}")
    if min_split < 1:
        raise ContractError(f"min_split must be at least 1, got {min_split!r}")

    root_n1 = int(labels.sum())
    root_errors = _node_errors(len(labels) - root_n1, root_n1)
    deltas: list[float] = []

    def build(rows: np.ndarray, node_id: int) -> TreeNode:
        sub = labels[rows]
        n = len(sub)
        n1 = int(sub.sum())
        n0 = n - n1
        predicted = 1 if n1 > n0 else 0
        probabilities = (n0 / n, n1 / n)
        node = TreeNode(
            node_id=node_id,
            class_counts=(n0, n1),
            probabilities=probabilities,
            predicted_class=predicted,
            expected_loss=1.0 - max(probabilities),
            )
        if n0 == 0 or n1 == 0 or n < min_split:
            return node
        found = _best_split(features[rows], sub)
        if found is None:
            return node
        improvement, col, threshold, left_mask = found
        left_rows = rows[left_mask]
        right_rows = rows[~left_mask]
        errors_here = _node_errors(n0, n1)
        left_sub = labels[left_rows]
        right_sub = labels[right_rows]
        errors_left = _node_errors(len(left_sub) - int(left_sub.sum()), int(left_sub.sum()))
        errors_right = _node_errors(len(right_sub) - int(right_sub.sum()), int(right_sub.sum()))
        reduction = (errors_here - errors_left - errors_right) / root_errors
        if reduction < cp_min:
            return node
        deltas.append(reduction)
        node.split = Split(column=col, threshold=threshold, improvement=improvement)
        node.left = build(left_rows, 2 * node_id)
        node.right = build(right_rows, 2 * node_id + 1)
        return node

    root = build(np.arange(len(labels)), 1)

    cp_table: list[CpRow] = []
    rel_error = 1.0
    for i, delta in enumerate(sorted(deltas, reverse=True)):
        cp_table.append(CpRow(cp=delta, nsplit=i, rel_error=rel_error))
        rel_error -= delta
    cp_table.append(CpRow(cp=cp_min, nsplit=len(deltas), rel_error=rel_error))

    return TreeIndicator(root=root, cp_table=cp_table, cp_min=cp_min,
                         min_split=min_split, feature_names=list(feature_names) if feature_names else None)


def dump_tree(tree: TreeIndicator) -> str:
    """Line-oriented textual dump of a fitted tree, stable for diffing."""

    def column_name(col: int) -> str:
        if tree.feature_names and col < len(tree.feature_names):
            return tree.feature_names[col]
        return f"F{col + 1}"

    lines = [f"n= {tree.n_observations}", ""]
    lines.append("   CP nsplit rel error")
    for i, row in enumerate(tree.cp_table, start=1):
        lines.append(f"{i} {row.cp:.2f} {row.nsplit} {row.rel_error:g}")
    lines.append("")

    def walk(node: TreeNode):
        header = f"Node number {node.node_id}: {node.n_observations} observations"
        if node.split is not None:
            header += f", complexity param={_fmt(_split_cp(tree, node))}"
        lines.append(header)
        lines.append(
            f"  predicted class={node.predicted_class}"
            f"  expected loss={_fmt(node.expected_loss)}"
        )
        lines.append(f"  class counts: {node.class_counts[0]} {node.class_counts[1]}")
        lines.append(
            f"  probabilities: {node.probabilities[0]:.3f} {node.probabilities[1]:.3f}"
        )
        if node.split is not None:
            lines.append(
                f"  left son={node.left.node_id} ({node.left.n_observations} obs)"
                f" right son={node.right.node_id} ({node.right.n_observations} obs)"
            )
            lines.append("  Primary splits:")
            lines.append(
                f"      {column_name(node.split.column)} < {node.split.threshold:g}"
                f" to the left, improve={node.split.improvement:.4f}, (0 missing)"
            )
            walk(node.left)
            walk(node.right)

    walk(tree.root)
    return "\n".join(lines) + "\n"


def _split_cp(tree: TreeIndicator, node: TreeNode) -> float:
    n0, n1 = node.class_counts
    left0, left1 = node.left.class_counts
    right0, right1 = node.right.class_counts
    root0, root1 = tree.root.class_counts
    root_errors = _node_errors(root0, root1)
    return (_node_errors(n0, n1) - _node_errors(left0, left1)
            - _node_errors(right0, right1)) / root_errors


def _fmt(value: float) -> str:
    return f"{value:.7g}"


# ---------------------------------------------------------------------------
# Sequential covering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdRule:
    """A single threshold over one column: at-or-below one label, above the other."""

    threshold: float
    label_at_or_below: int
    label_above: int
    column: int = 0

    def __post_init__(self):
        if self.label_at_or_below == self.label_above:
            raise ContractError(
                "a threshold rule needs two distinct labels; use a constant indicator"
            )

    def predict(self, value: float) -> int:
        return self.label_at_or_below if value <= self.threshold else self.label_above


@dataclass(frozen=True)
class RuleTrainingMeta:
    satisfied_count: int
    unsatisfied_count: int
    depth: int


@dataclass(eq=False)
class RuleIndicator:
    """A threshold rule (or constant label) produced by sequential covering."""

    rule: ThresholdRule | None
    constant_label: int | None
    meta: RuleTrainingMeta

    def __post_init__(self):
        if (self.rule is None) == (self.constant_label is None):
            raise ContractError("exactly one of rule / constant_label must be set")

    def predict(self, value) -> int:
        scalar = np.asarray(value, dtype=float).reshape(-1)
        if scalar.size != 1:
            raise ContractError("rule indicators take a single scalar input")
        if self.constant_label is not None:
            return self.constant_label
        return self.rule.predict(float(scalar[0]))


def predict_rule(indicator: RuleIndicator, value) -> int:
    return indicator.predict(value)


def _adjust_rule(rule: ThresholdRule, values: np.ndarray, labels: np.ndarray,
                 v: float, lab: int) -> ThresholdRule:
    """Move the threshold so the element (v, lab) becomes satisfied.

    The new threshold is the midpoint of the nearest pair of values that
    straddles the two classes around the required position. When no
    opposite-class value exists on the needed side the threshold
    degenerates to one end of the data.
    """
    below_vals = values[labels == rule.label_at_or_below]
    above_vals = values[labels == rule.label_above]
    if lab == rule.label_at_or_below:
        cands = above_vals[above_vals > v]
        if cands.size == 0:
            return replace(rule, threshold=float(values.max()))
        w = float(cands.min())
        u = float(below_vals[below_vals < w].max())
        return replace(rule, threshold=(u + w) / 2.0)
    cands = below_vals[below_vals < v]
    if cands.size == 0:
        return replace(rule, threshold=float(values.min()) - 1.0)
    u = float(cands.max())
    w = float(above_vals[above_vals > u].min())
    return replace(rule, threshold=(u + w) / 2.0)


def train_system(values, labels, recursion_cap: int = DEFAULT_RECURSION_CAP) -> RuleIndicator:
    """Induce a threshold rule by sequential covering over one column.

    The data is sorted ascending; the first element seeds the rule
    (threshold at its value, its label at-or-below). Each later element
    either satisfies the rule (prediction equals label) or joins the
    unsatisfied list; once the unsatisfied list catches up with the
    satisfied one, the rule's threshold is adjusted so the current
    element is satisfied and any unsatisfied elements the new rule
    covers move over. After the pass the lists are re-evaluated against
    the final rule; if more than 20% of the level remains unsatisfied,
    the procedure recurses on the unsatisfied elements carrying the
    current rule.

    Raises:
        NonSeparableDataError: the recursion cap was exceeded; carries
            the best rule found and its risk over the full input.
        ContractError: labels are not boolean or the input is not a
            single column.
    """
    data = np.asarray(values, dtype=float)
    if data.ndim == 2 and data.shape[1] == 1:
        data = data[:, 0]
    if data.ndim != 1:
        raise ContractError("sequential covering takes exactly one feature column")
    y = _as_boolean_labels(labels)
    if data.size == 0:
        raise InsufficientDataError("cannot induce a rule from an empty dataset")
    if data.shape[0] != y.shape[0]:
        raise ContractError(f"{data.shape[0]} values but {y.shape[0]} labels")

    if np.all(y == y[0]):
        return RuleIndicator(
            rule=None, constant_label=int(y[0]),
            meta=RuleTrainingMeta(satisfied_count=int(y.size), unsatisfied_count=0, depth=0),
        )

    rule: ThresholdRule | None = None
    best_rule: ThresholdRule | None = None
    best_risk = math.inf
    level_values, level_labels = data, y

    for depth in range(recursion_cap + 1):
        order = np.argsort(level_values, kind="stable")
        sv = level_values[order]
        sy = level_labels[order]
        satisfied: list[tuple[float, int]] = []
        unsatisfied: list[tuple[float, int]] = []
        for v, lab in zip(sv, sy):
            v = float(v)
            lab = int(lab)
            if rule is None:
                rule = ThresholdRule(threshold=v, label_at_or_below=lab,
                                     label_above=1 - lab)
                satisfied.append((v, lab))
            elif rule.predict(v) == lab:
                satisfied.append((v, lab))
            else:
                unsatisfied.append((v, lab))
                if len(unsatisfied) >= len(satisfied):
                    rule = _adjust_rule(rule, sv, sy, v, lab)
                    now_ok = [e for e in unsatisfied if rule.predict(e[0]) == e[1]]
                    unsatisfied = [e for e in unsatisfied if rule.predict(e[0]) != e[1]]
                    satisfied.extend(now_ok)

        # Mid-pass adjustments can stale earlier entries; the termination
        # check runs on the true classification of this level's elements.
        hits = np.fromiter((rule.predict(float(v)) == lab for v, lab in zip(sv, sy)),
                           dtype=bool, count=len(sv))
        satisfied_count = int(hits.sum())
        unsatisfied_count = int(len(sv) - satisfied_count)

        risk = float(np.mean([rule.predict(float(v)) != lab for v, lab in zip(data, y)]))
        if risk < best_risk:
            best_risk = risk
            best_rule = rule

        if unsatisfied_count <= 0.2 * satisfied_count:
            return RuleIndicator(
                rule=rule, constant_label=None,
                meta=RuleTrainingMeta(satisfied_count=satisfied_count,
                                      unsatisfied_count=unsatisfied_count,
                                      depth=depth),
            )
        level_values = sv[~hits]
        level_labels = sy[~hits]

    raise NonSeparableDataError(
        f"sequential covering did not terminate within {recursion_cap} recursions "
        f"(best rule risk {best_risk:.4g})",
        best_rule=best_rule,
        best_risk=best_risk,
    )


# ---------------------------------------------------------------------------
# Empirical risk and selection
# ---------------------------------------------------------------------------

IndicatorVariant = Union[TreeIndicator, RuleIndicator]


@dataclass(eq=False)
class IndividualAnomalyIndicator:
    """The selected indicator for one dimension plus its training risk."""

    dimension_id: str
    variant: IndicatorVariant
    empirical_risk: float

    def predict(self, x) -> int:
        return self.variant.predict(x)

    def predict_factor(self, x, graded: bool = False) -> float:
        """The anomaly factor: the class by default, the tree's leaf
        probability of class 1 when graded output is requested."""
        if graded and isinstance(self.variant, TreeIndicator):
            return float(self.variant.predict_proba(x))
        return float(self.variant.predict(x))


def empirical_risk(indicator, features, labels, loss_function: LossFunction = ZERO_ONE) -> float:
    """Mean loss of an indicator over a dataset."""
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if y.size == 0:
        raise InsufficientDataError("empirical risk needs a non-empty dataset")
    rows = X if X.ndim > 1 else X.reshape(-1)
    total = 0.0
    for i in range(y.size):
        predicted = indicator.predict(rows[i])
        total += loss_function(y[i], predicted)
    return total / y.size


def select_indicator(
    candidates,
    features,
    labels,
    loss_function: LossFunction = ZERO_ONE,
    dimension_id: str = "F1",
) -> IndividualAnomalyIndicator:
    """Pick the candidate with minimum empirical risk.

    Ties prefer a RuleIndicator (the simpler model), then declaration
    order.
    """
    variants = list(candidates)
    if not variants:
        raise ContractError("at least one candidate indicator is required")
    scored = []
    for index, variant in enumerate(variants):
        risk = empirical_risk(variant, features, labels, loss_function)
        simplicity = 0 if isinstance(variant, RuleIndicator) else 1
        scored.append((risk, simplicity, index, variant))
    risk, _, _, variant = min(scored, key=lambda item: item[:3])
    return IndividualAnomalyIndicator(dimension_id=dimension_id, variant=variant,
                                      empirical_risk=risk)


# ---------------------------------------------------------------------------
# Serialization payloads (shared by model persistence and the simulator)
# ---------------------------------------------------------------------------

def variant_payload(variant: IndicatorVariant) -> dict:
    if isinstance(variant, RuleIndicator):
        payload = {
            "kind": "rule",
            "meta": {
                "satisfied": variant.meta.satisfied_count,
                "unsatisfied": variant.meta.unsatisfied_count,
                "depth": variant.meta.depth,
            },
        }
        if variant.constant_label is not None:
            payload["constant_label"] = int(variant.constant_label)
        else:
            payload["rule"] = {
                "threshold": float(variant.rule.threshold),
                "label_at_or_below": int(variant.rule.label_at_or_below),
                "label_above": int(variant.rule.label_above),
                "column": int(variant.rule.column),
            }
        return payload
    if isinstance(variant, TreeIndicator):
        return {
            "kind": "tree",
            "cp_min": float(variant.cp_min),
            "min_split": int(variant.min_split),
            "feature_names": variant.feature_names,
            "cp_table": [[float(r.cp), int(r.nsplit), float(r.rel_error)]
                         for r in variant.cp_table],
            "root": _node_payload(variant.root),
        }
    raise ContractError(f"cannot serialize indicator of type {type(variant).__name__}")


def _node_payload(node: TreeNode) -> dict:
    payload = {
        "node_id": node.node_id,
        "class_counts": [int(c) for c in node.class_counts],
    }
    if node.split is not None:
        payload["split"] = {
            "column": int(node.split.column),
            "threshold": float(node.split.threshold),
            "improvement": float(node.split.improvement),
        }
        payload["left"] = _node_payload(node.left)
        payload["right"] = _node_payload(node.right)
    return payload


def variant_from_payload(payload: dict) -> IndicatorVariant:
    kind = payload.get("kind")
    if kind == "rule":
        meta = RuleTrainingMeta(
            satisfied_count=payload["meta"]["satisfied"],
            unsatisfied_count=payload["meta"]["unsatisfied"],
            depth=payload["meta"]["depth"],
        )
        if "constant_label" in payload:
            return RuleIndicator(rule=None, constant_label=int(payload["constant_label"]),
                                 meta=meta)
        raw = payload["rule"]
        rule = ThresholdRule(
            threshold=float(raw["threshold"]),
            label_at_or_below=int(raw["label_at_or_below"]),
            label_above=int(raw["label_above"]),
            column=int(raw["column"]),
        )
        return RuleIndicator(rule=rule, constant_label=None, meta=meta)
    if kind == "tree":
        return TreeIndicator(
            root=_node_from_payload(payload["root"]),
            cp_table=[CpRow(cp=row[0], nsplit=int(row[1]), rel_error=row[2])
                      for row in payload["cp_table"]],
            cp_min=float(payload["cp_min"]),
            min_split=int(payload["min_split"]),
            feature_names=payload.get("feature_names"),
        )
    raise ContractError(f"unknown indicator payload kind {kind!r}")


def _node_from_payload(payload: dict) -> TreeNode:
    n0, n1 = (int(c) for c in payload["class_counts"])
    n = n0 + n1
    probabilities = (n0 / n, n1 / n)
    node = TreeNode(
        node_id=int(payload["node_id"]),
        class_counts=(n0, n1),
        probabilities=probabilities,
        predicted_class=1 if n1 > n0 else 0,
        expected_loss=1.0 - max(probabilities),
    )
    if "split" in payload:
        raw = payload["split"]
        node.split = Split(column=int(raw["column"]), threshold=float(raw["threshold"]),
                           improvement=float(raw["improvement"]))
        node.left = _node_from_payload(payload["left"])
        node.right = _node_from_payload(payload["right"])
    return node
