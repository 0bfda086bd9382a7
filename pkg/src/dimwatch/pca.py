"""Dimension selection: covariance, eigen-decomposition, scree data, projection.

The pipeline runs on standardized data, so the covariance matrix is the
correlation matrix and its eigenvalues sum to the number of retained
columns. Components are ranked by eigenvalue; the smallest prefix whose
cumulative variability reaches the configured threshold is retained, and
observations are projected onto those eigenvectors.

The eigensolver is a cyclic Jacobi iteration: the matrices here are small
and symmetric, and a deterministic in-package solver keeps model files
reproducible bit for bit. Everything in this module is a pure function
over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, LabeledObservation, StandardizationParams
from .errors import ContractError, DegenerateDataError, NumericError

SYMMETRY_TOLERANCE = 1e-10
DEFAULT_JACOBI_TOLERANCE = 1e-10
MAX_JACOBI_SWEEPS = 100
DEFAULT_VARIABILITY_THRESHOLD = 75.0


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One eigenvalue with its unit-length eigenvector."""

    value: float
    vector: np.ndarray


@dataclass(frozen=True)
class VariabilityRow:
    component: int
    eigenvalue: float
    percent: float
    cumulative: float


@dataclass(eq=False)
class VariabilityTable:
    """Per-component eigenvalue, percent and cumulative percent variability.

    This is the plot-ready scree data: percent = 100 * value / sum(values),
    cumulative is the running sum and ends at 100.
    """

    rows: list[VariabilityRow]

    def cumulative(self) -> list[float]:
        return [row.cumulative for row in self.rows]


@dataclass(eq=False)
class PcaModel:
    """A fitted projection: standardization, ranked eigenpairs, feature matrix.

    ``feature_matrix`` is n x p with the top-p eigenvectors as columns;
    projecting standardizes the input and multiplies by this matrix.
    """

    standardization: StandardizationParams
    eigenpairs: list[EigenPair]
    selected_p: int
    feature_matrix: np.ndarray

    def __post_init__(self):
        n = len(self.eigenpairs)
        if not 1 <= self.selected_p <= n:
            raise ContractError(f"selected_p must lie in [1, {n}], got {self.selected_p}")
        values = [pair.value for pair in self.eigenpairs]
        if any(a < b - 1e-12 for a, b in zip(values, values[1:])):
            raise ContractError("eigenpairs must be sorted by non-increasing eigenvalue")

    @property
    def n_features(self) -> int:
        return self.feature_matrix.shape[0]

    def component_names(self) -> list[str]:
        return [f"F{i + 1}" for i in range(self.selected_p)]


def covariance_matrix(standardized: np.ndarray | Dataset) -> np.ndarray:
    """Sample covariance of standardized data: C = X^T X / (N - 1).

    Input columns must already be standardized; any column mean beyond
    1e-6 of zero is a contract violation.
    """
    X = standardized.feature_matrix() if isinstance(standardized, Dataset) else np.asarray(standardized, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ContractError(f"need a 2-D matrix with at least 2 rows, got shape {X.shape}")
    means = X.mean(axis=0)
    if np.any(np.abs(means) > 1e-6):
        worst = int(np.argmax(np.abs(means)))
        raise ContractError(
            f"input is not standardized: column {worst} has mean {means[worst]:.3g}"
        )
    C = X.T @ X / (X.shape[0] - 1)
    return (C + C.T) / 2.0


def eigen_decompose(
    matrix: np.ndarray,
    tolerance: float = DEFAULT_JACOBI_TOLERANCE,
    max_sweeps: int = MAX_JACOBI_SWEEPS,
) -> list[EigenPair]:
    """Full eigensystem of a symmetric matrix via cyclic Jacobi rotations.

    Sweeps annihilate every off-diagonal element in turn until the
    off-diagonal Frobenius norm drops to ``tolerance``. Eigenpairs are
    returned sorted by non-increasing eigenvalue (ties keep diagonal
    order) with each vector's largest-magnitude component made positive,
    so output is deterministic.

    Raises:
        ContractError: the input is not symmetric within 1e-10.
        NumericError: no convergence within ``max_sweeps`` sweeps; the
            error carries the residual off-diagonal norm.
    """
    A = np.array(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError(f"matrix must be square, got shape {A.shape}")
    if A.size and np.max(np.abs(A - A.T)) > SYMMETRY_TOLERANCE:
        raise ContractError("matrix is not symmetric within 1e-10")
    n = A.shape[0]
    A = (A + A.T) / 2.0
    V = np.eye(n)

    def off_norm(M: np.ndarray) -> float:
        return math.sqrt(max(0.0, float(np.sum(M * M) - np.sum(np.diag(M) ** 2))))

    for _ in range(max_sweeps):
        if off_norm(A) <= tolerance:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if diff == 0.0:
                    t = 1.0
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for M in (A,):
                    col_p = M[:, p].copy()
                    col_q = M[:, q].copy()
                    M[:, p] = c * col_p - s * col_q
                    M[:, q] = s * col_p + c * col_q
                    row_p = M[p, :].copy()
                    row_q = M[q, :].copy()
                    M[p, :] = c * row_p - s * row_q
                    M[q, :] = s * row_p + c * row_q
                col_p = V[:, p].copy()
                col_q = V[:, q].copy()
                V[:, p] = c * col_p - s * col_q
                V[:, q] = s * col_p + c * col_q

    residual = off_norm(A)
    if residual > tolerance:
        raise NumericError(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps "
            f"(off-diagonal norm {residual:.3g})",
            residual=residual,
        )

    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    pairs = []
    for idx in order:
        vector = V[:, idx].copy()
        j = int(np.argmax(np.abs(vector)))
        if vector[j] < 0:
            vector = -vector
        pairs.append(EigenPair(value=float(values[idx]), vector=vector))
    return pairs


def variability_table(eigenpairs: list[EigenPair]) -> VariabilityTable:
    """Percent and cumulative-percent variability per component."""
    if not eigenpairs:
        raise ContractError("at least one eigenpair is required")
    total = math.fsum(pair.value for pair in eigenpairs)
    if total <= 0.0:
        raise DegenerateDataError("eigenvalues carry no variability")
    rows = []
    running = 0.0
    for i, pair in enumerate(eigenpairs):
        percent = 100.0 * pair.value / total
        running += percent
        rows.append(
            VariabilityRow(component=i + 1, eigenvalue=pair.value,
                           percent=percent, cumulative=running)
        )
    return VariabilityTable(rows)


def select_components(eigenpairs: list[EigenPair], cumulative_threshold_percent: float) -> int:
    """Smallest p whose top-p cumulative variability reaches the threshold.

    The threshold lies in (0, 100]; the result is always at least 1.
    """
    threshold = float(cumulative_threshold_percent)
    if not 0.0 < threshold <= 100.0:
        raise ContractError(f"threshold must lie in (0, 100], got {threshold!r}")
    table = variability_table(eigenpairs)
    for row in table.rows:
        if row.cumulative >= threshold - 1e-9:
            return row.component
    return len(eigenpairs)


def fit_pca(
    standardized: Dataset,
    params: StandardizationParams,
    cumulative_threshold_percent: float = DEFAULT_VARIABILITY_THRESHOLD,
) -> tuple[PcaModel, VariabilityTable]:
    """Fit the projection model on an already-standardized dataset."""
    C = covariance_matrix(standardized)
    pairs = eigen_decompose(C)
    table = variability_table(pairs)
    p = select_components(pairs, cumulative_threshold_percent)
    feature_matrix = np.column_stack([pair.vector for pair in pairs[:p]])
    model = PcaModel(standardization=params, eigenpairs=pairs,
                     selected_p=p, feature_matrix=feature_matrix)
    return model, table


def project(model: PcaModel, data):
    """Project raw observations onto the retained components.

    Accepts a Dataset carrying the model's retained parameters (columns
    the model dropped are ignored), or a vector/matrix already in
    retained-column order. Values are standardized with the stored
    parameters and multiplied by the feature matrix; labels pass through
    unchanged.

    Raises:
        ContractError: input dimensionality does not match the model.
    """
    if isinstance(data, Dataset):
        missing = [n for n in model.standardization.parameter_names
                   if n not in data.parameter_names]
        if missing:
            raise ContractError(f"dataset is missing model columns: {', '.join(missing)}")
        cols = [data.parameter_names.index(n)
                for n in model.standardization.parameter_names]
        X = data.feature_matrix()[:, cols]
        projected = model.standardization.transform(X) @ model.feature_matrix
        observations = [
            LabeledObservation(window_start=obs.window_start, features=row, label=obs.label)
            for obs, row in zip(data.observations, projected)
        ]
        return Dataset(model.component_names(), observations, data.label_kind)

    arr = np.asarray(data, dtype=float)
    width = arr.shape[-1] if arr.ndim else 0
    if arr.ndim not in (1, 2) or width != model.n_features:
        raise ContractError(
            f"expected {model.n_features} feature(s), got shape {arr.shape}"
        )
    return model.standardization.transform(arr) @ model.feature_matrix
