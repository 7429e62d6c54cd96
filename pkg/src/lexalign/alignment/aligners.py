import logging
from abc import ABC, abstractmethod

import numpy as np
from scipy.linalg import LinAlgError, orthogonal_procrustes, solve

from lexalign.alignment.anchors import AnchorSet
from lexalign.alignment.linear_map import LinearMap
from lexalign.errors import SingularSystemError
from lexalign.utils import setup_logger

RIDGE = 1e-8


class BaseAligner(ABC):
    """Fits a d x d map from anchor pairs so that ``X @ W.T`` approximates ``Y``."""

    method = "base"

    def __init__(self, debug_mode: bool = False) -> None:
        self.logger: logging.Logger = setup_logger(self.__class__.__name__, debug_mode)

    @abstractmethod
    def fit(self, anchors: AnchorSet) -> LinearMap:
        pass

    def residual(self, linear_map: LinearMap, anchors: AnchorSet) -> float:
        """Sum of squared distances between mapped sources and targets."""
        diff = anchors.X @ linear_map.W.T - anchors.Y
        return float(np.sum(diff * diff))


class LeastSquaresAligner(BaseAligner):
    """
    Unconstrained map minimizing the Euclidean distance of mapped anchors.

    Solves the ridge-regularized normal equations
    ``(X^T X + eps I) A = X^T Y`` and returns ``W = A^T``. The ridge keeps
    rank-deficient anchor sets (fewer pairs than dimensions, repeated
    source rows) solvable.
    """

    method = "lstsq"

    def __init__(self, ridge: float = RIDGE, debug_mode: bool = False) -> None:
        super().__init__(debug_mode)
        if ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {ridge}")
        self.ridge = ridge

    def fit(self, anchors: AnchorSet) -> LinearMap:
        X, Y = anchors.X, anchors.Y
        gram = X.T @ X + self.ridge * np.eye(anchors.dim)
        try:
            A = solve(gram, X.T @ Y, assume_a="pos")
        except LinAlgError as e:
            self.logger.error(f"Normal equations are singular: {str(e)}")
            raise SingularSystemError(f"Least-squares system is singular: {e}") from e
        if not np.all(np.isfinite(A)):
            self.logger.error("Least-squares solution has non-finite entries")
            raise SingularSystemError("Least-squares solution has non-finite entries")

        linear_map = LinearMap(
            A.T,
            is_orthogonal=False,
            method=self.method,
            hyperparameters={"ridge": self.ridge, "anchors": anchors.m},
        )
        self.logger.info(
            f"Fitted least-squares map on {anchors.m} anchors, "
            f"residual {self.residual(linear_map, anchors):.4f}"
        )
        return linear_map


class ProcrustesAligner(BaseAligner):
    """
    Orthogonal map from the SVD of ``X^T Y``.

    With ``U S V^T = X^T Y`` the solution is ``W = V U^T``. On l2-normalized
    anchors this also maximizes the summed cosine between mapped sources and
    targets, so no separate cosine-objective solver is needed.
    """

    method = "procrustes"

    def fit(self, anchors: AnchorSet) -> LinearMap:
        if not anchors.is_normalized():
            self.logger.warning(
                "Procrustes anchors are not l2-normalized; the map still minimizes "
                "Euclidean distance but no longer maximizes cosine"
            )
        try:
            # R minimizes ||X R - Y||, so the row-convention map is R^T
            R, _ = orthogonal_procrustes(anchors.X, anchors.Y)
        except (LinAlgError, ValueError) as e:
            self.logger.error(f"SVD failed: {str(e)}")
            raise
        linear_map = LinearMap(
            R.T,
            is_orthogonal=True,
            method=self.method,
            hyperparameters={"anchors": anchors.m},
        )
        self.logger.info(
            f"Fitted Procrustes map on {anchors.m} anchors, "
            f"residual {self.residual(linear_map, anchors):.4f}"
        )
        return linear_map


def align_least_squares(anchors: AnchorSet, ridge: float = RIDGE) -> LinearMap:
    return LeastSquaresAligner(ridge).fit(anchors)


def align_procrustes(anchors: AnchorSet) -> LinearMap:
    return ProcrustesAligner().fit(anchors)
