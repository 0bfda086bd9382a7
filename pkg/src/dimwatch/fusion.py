"""Combine per-dimension anomaly factors into one global anomaly factor.

With a single dimension the global indicator is the identity. With two or
more, a second-level decision tree is fitted over the factor columns: it
subsumes conjunctions and disjunctions of boolean factors and reuses the
audited tree learner. The evaluated output is compared against a flag
threshold to decide whether a window raises an alarm.

Adding a dimension never touches the existing per-dimension indicators;
only the new dimension is trained and the global stage refitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ContractError, InsufficientDataError
from .indicators import (
    LossFunction,
    TreeIndicator,
    ZERO_ONE,
    fit_tree,
    select_indicator,
    train_system,
    IndividualAnomalyIndicator,
)
from .errors import NonSeparableDataError

DEFAULT_GLOBAL_MIN_SPLIT = 5
DEFAULT_FLAG_THRESHOLD = 0.5


@dataclass(eq=False)
class GlobalIndicator:
    """Maps a vector of per-dimension factors to the global anomaly factor.

    ``tree`` is None for the single-dimension identity variant, in which
    case evaluation returns the lone factor unchanged.
    """

    dimension_ids: list[str]
    tree: TreeIndicator | None
    flag_threshold: float = DEFAULT_FLAG_THRESHOLD

    def __post_init__(self):
        if not self.dimension_ids:
            raise ContractError("a global indicator needs at least one dimension")
        if self.tree is None and len(self.dimension_ids) != 1:
            raise ContractError("the identity variant is only valid for one dimension")

    def evaluate(self, af_vector) -> tuple[float, bool]:
        return evaluate_global(self, af_vector)


def fit_global(
    af_matrix,
    labels,
    dimension_ids: list[str],
    min_split: int = DEFAULT_GLOBAL_MIN_SPLIT,
    cp_min: float = 0.01,
    flag_threshold: float = DEFAULT_FLAG_THRESHOLD,
) -> GlobalIndicator:
    """Fit the global stage on training factor vectors and labels.

    One dimension yields the identity; otherwise a decision tree over the
    factor columns (``min_split`` defaults to 5 because factor matrices
    are much coarser than raw data).
    """
    afs = np.asarray(af_matrix, dtype=float)
    if afs.ndim == 1:
        afs = afs.reshape(-1, 1)
    if afs.size == 0:
        raise InsufficientDataError("cannot fit the global indicator on no data")
    if afs.shape[1] != len(dimension_ids):
        raise ContractError(
            f"{afs.shape[1]} factor column(s) but {len(dimension_ids)} dimension ids"
        )
    if len(dimension_ids) == 1:
        return GlobalIndicator(dimension_ids=list(dimension_ids), tree=None,
                               flag_threshold=flag_threshold)
    tree = fit_tree(afs, labels, cp_min=cp_min, min_split=min_split,
                    feature_names=list(dimension_ids))
    return GlobalIndicator(dimension_ids=list(dimension_ids), tree=tree,
                           flag_threshold=flag_threshold)


def evaluate_global(indicator: GlobalIndicator, af_vector) -> tuple[float, bool]:
    """The global anomaly factor and whether it crosses the flag threshold."""
    afs = np.asarray(af_vector, dtype=float).reshape(-1)
    if afs.shape[0] != len(indicator.dimension_ids):
        raise ContractError(
            f"expected {len(indicator.dimension_ids)} factor(s), got {afs.shape[0]}"
        )
    if np.any((afs < 0.0) | (afs > 1.0)):
        raise ContractError("anomaly factors must lie in [0, 1]")
    if indicator.tree is None:
        factor = float(afs[0])
    else:
        factor = float(indicator.tree.predict(afs))
    return factor, factor >= indicator.flag_threshold


def add_dimension(
    indicators: list[IndividualAnomalyIndicator],
    af_matrix,
    labels,
    new_dimension_id: str,
    new_column,
    loss_function: LossFunction = ZERO_ONE,
    learners=("tree", "rule"),
    cp_min: float = 0.01,
    min_split: int = 20,
    graded: bool = False,
    flag_threshold: float = DEFAULT_FLAG_THRESHOLD,
) -> tuple[list[IndividualAnomalyIndicator], GlobalIndicator]:
    """Train an indicator for one new dimension and refit the global stage.

    Existing indicators are reused untouched (their serialized form is
    identical before and after). The new dimension's training column must
    cover the same observations as the existing factor matrix.

    Raises:
        AlignmentError: observation counts do not match.
    """
    afs = np.asarray(af_matrix, dtype=float)
    if afs.ndim == 1:
        afs = afs.reshape(-1, 1)
    column = np.asarray(new_column, dtype=float).reshape(-1)
    y = np.asarray(labels, dtype=float)
    if not (afs.shape[0] == column.shape[0] == y.shape[0]):
        raise AlignmentError(
            f"observation counts differ: {afs.shape[0]} factors, "
            f"{column.shape[0]} new values, {y.shape[0]} labels"
        )
    if afs.shape[1] != len(indicators):
        raise ContractError(
            f"{afs.shape[1]} factor column(s) but {len(indicators)} indicators"
        )

    candidates = []
    if "tree" in learners:
        candidates.append(fit_tree(column, y, cp_min=cp_min, min_split=min_split,
                                   feature_names=[new_dimension_id]))
    if "rule" in learners:
        try:
            candidates.append(train_system(column, y))
        except NonSeparableDataError:
            pass
    new_indicator = select_indicator(candidates, column, y, loss_function,
                                     dimension_id=new_dimension_id)
    new_factors = np.array(
        [new_indicator.predict_factor(v, graded=graded) for v in column]
    ).reshape(-1, 1)

    combined = np.hstack([afs, new_factors])
    dimension_ids = [ind.dimension_id for ind in indicators] + [new_dimension_id]
    global_indicator = fit_global(combined, y, dimension_ids,
                                  flag_threshold=flag_threshold, cp_min=cp_min)
    return [*indicators, new_indicator], global_indicator


def global_payload(indicator: GlobalIndicator) -> dict:
    from .indicators import variant_payload

    return {
        "dimension_ids": list(indicator.dimension_ids),
        "flag_threshold": float(indicator.flag_threshold),
        "tree": None if indicator.tree is None else variant_payload(indicator.tree),
    }


def global_from_payload(payload: dict) -> GlobalIndicator:
    from .indicators import variant_from_payload

    tree = payload.get("tree")
    return GlobalIndicator(
        dimension_ids=list(payload["dimension_ids"]),
        tree=None if tree is None else variant_from_payload(tree),
        flag_threshold=float(payload["flag_threshold"]),
    )
