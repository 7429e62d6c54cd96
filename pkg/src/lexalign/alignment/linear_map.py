from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import DimensionMismatchError, InputMissingError, VecFormatError
from lexalign.utils import setup_logger

logger = setup_logger("LinearMap")

ORTHOGONALITY_TOLERANCE = 1e-5


def orthogonality_error(W: np.ndarray) -> float:
    """max |W^T W - I|."""
    return float(np.max(np.abs(W.T @ W - np.eye(W.shape[0]))))


class LinearMap:
    """
    A d x d alignment matrix in the row-vector convention.

    A stored source row x is mapped to ``x @ W.T``; in the column notation
    common in the literature this is ``W x``. The matrix file stores ``W``
    itself, row-major.

    Attributes:
        W (np.ndarray): d x d matrix
        is_orthogonal (bool): Verified claim that W^T W = I within 1e-5
        method (str): Solver that produced the map
        hyperparameters (Dict[str, Any]): Provenance of the fit
    """

    def __init__(
        self,
        W: np.ndarray,
        is_orthogonal: bool = False,
        method: str = "",
        hyperparameters: Optional[Dict[str, Any]] = None,
    ):
        W = np.array(W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise DimensionMismatchError(f"Alignment matrix must be square, got {W.shape}")
        if is_orthogonal:
            err = orthogonality_error(W)
            if err > ORTHOGONALITY_TOLERANCE:
                raise ValueError(f"Matrix claimed orthogonal but |W^T W - I| = {err:.2e}")
        self.W = W
        self.is_orthogonal = is_orthogonal
        self.method = method
        self.hyperparameters: Dict[str, Any] = dict(hyperparameters or {})

    @property
    def dim(self) -> int:
        return self.W.shape[0]

    @classmethod
    def identity(cls, d: int) -> "LinearMap":
        return cls(np.eye(d), is_orthogonal=True, method="identity")

    def transposed(self) -> "LinearMap":
        """The map read in the other (column) convention."""
        return LinearMap(self.W.T, self.is_orthogonal, self.method, self.hyperparameters)

    def map_rows(self, X: np.ndarray) -> np.ndarray:
        return X @ self.W.T

    def provenance(self) -> Dict[str, str]:
        record = {
            "method": self.method,
            "is_orthogonal": str(self.is_orthogonal).lower(),
            "dim": str(self.dim),
        }
        for key, value in self.hyperparameters.items():
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            record[key] = str(value)
        return record

    def __repr__(self) -> str:
        return f"LinearMap(method={self.method!r}, d={self.dim}, orthogonal={self.is_orthogonal})"


def apply_map(linear_map: LinearMap, space: EmbeddingSpace) -> EmbeddingSpace:
    """
    Map every row x of ``space`` to ``x @ W.T``.

    Normalization flags are cleared; normalize again explicitly if needed.

    Raises:
        DimensionMismatchError: If the space and the map differ in d
    """
    if space.dim != linear_map.dim:
        raise DimensionMismatchError(
            f"Map of dimension {linear_map.dim} cannot act on d={space.dim} vectors"
        )
    return space.with_matrix(
        linear_map.map_rows(space.matrix), is_l2_normalized=False, is_centered=False
    )


def save_matrix(linear_map: LinearMap, path: Union[str, Path]) -> None:
    """Write ``"d d"`` then d rows of W, plus a ``.meta`` key=value sidecar."""
    path = Path(path)
    d = linear_map.dim
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{d} {d}\n")
        for row in linear_map.W:
            f.write(" ".join(repr(x) for x in row.tolist()) + "\n")

    meta_path = provenance_path(path)
    with open(meta_path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in sorted(linear_map.provenance().items()):
            f.write(f"{key}={value}\n")
    logger.info(f"Wrote {d}x{d} {linear_map.method} matrix to {path} ({meta_path.name})")


def provenance_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


def _is_header(lines) -> bool:
    first = lines[0]
    if len(first) != 2 or first[0] != first[1] or not first[0].isdigit():
        return False
    d = int(first[0])
    return len(lines) - 1 == d and all(len(row) == d for row in lines[1:])


def load_matrix(path: Union[str, Path], transpose: bool = False) -> LinearMap:
    """
    Read a matrix file written by :func:`save_matrix`.

    A plain whitespace-separated d x d matrix without header is accepted as
    well. ``transpose`` reads a matrix stored in the column convention.
    """
    path = Path(path)
    if not path.is_file():
        raise InputMissingError(path)
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.split() for line in f if line.strip()]
    if not lines:
        raise VecFormatError(f"Empty matrix file {path}")

    if _is_header(lines):
        lines = lines[1:]
    try:
        W = np.array(lines, dtype=np.float64)
    except ValueError:
        raise VecFormatError(f"{path}: rows of unequal length or non-numeric entries")
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise VecFormatError(f"{path}: expected a square matrix, got {W.shape}")
    if not np.all(np.isfinite(W)):
        raise VecFormatError(f"{path}: non-finite entries")

    meta = {}
    meta_path = provenance_path(path)
    if meta_path.is_file():
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = dict(line.rstrip("\n").split("=", 1) for line in f if "=" in line)
    method = meta.pop("method", "external")
    meta.pop("dim", None)
    meta.pop("is_orthogonal", None)
    is_orthogonal = orthogonality_error(W) <= ORTHOGONALITY_TOLERANCE
    logger.info(f"Loaded {W.shape[0]}x{W.shape[1]} matrix from {path}")
    linear_map = LinearMap(W, is_orthogonal=is_orthogonal, method=method, hyperparameters=meta)
    return linear_map.transposed() if transpose else linear_map
