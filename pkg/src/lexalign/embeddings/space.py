from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from lexalign.errors import DimensionMismatchError, VecFormatError
from lexalign.utils import setup_logger

logger = setup_logger("EmbeddingSpace")

NORM_TOLERANCE = 1e-6


class EmbeddingSpace:
    """
    A vocabulary with one real vector per word.

    Row ``i`` of ``matrix`` is the vector of ``words[i]``. Instances are
    treated as immutable: the matrix is flagged read-only and every
    transformation returns a new space.

    Attributes:
        words (List[str]): Unique tokens, index = row id
        matrix (np.ndarray): n x d float64 matrix
        lang_tag (str): Free-form language label such as "en" or "si"
        is_l2_normalized (bool): Every row has unit Euclidean norm
        is_centered (bool): Column mean was subtracted before normalization
        shortfall (int): Rows missing after a top-n restriction
        duplicates (int): Duplicate rows skipped while loading
    """

    def __init__(
        self,
        words: Sequence[str],
        matrix: np.ndarray,
        lang_tag: str = "",
        is_l2_normalized: bool = False,
        is_centered: bool = False,
        shortfall: int = 0,
        duplicates: int = 0,
    ):
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise VecFormatError(f"Expected a 2-d matrix, got shape {matrix.shape}")
        if matrix.shape[0] != len(words):
            raise VecFormatError(
                f"{len(words)} words but {matrix.shape[0]} matrix rows"
            )

        self.words: List[str] = list(words)
        self._index: Dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if len(self._index) != len(self.words):
            raise VecFormatError("Duplicate words in embedding space")

        if is_l2_normalized and len(self.words):
            norms = np.linalg.norm(matrix, axis=1)
            if np.max(np.abs(norms - 1.0)) > NORM_TOLERANCE:
                raise VecFormatError("Space flagged as normalized has non-unit rows")

        matrix.setflags(write=False)
        self.matrix = matrix
        self.lang_tag = lang_tag
        self.is_l2_normalized = is_l2_normalized
        self.is_centered = is_centered
        self.shortfall = shortfall
        self.duplicates = duplicates

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.n

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __getitem__(self, word: str) -> np.ndarray:
        return self.matrix[self._index[word]]

    def __repr__(self) -> str:
        return (
            f"EmbeddingSpace(lang={self.lang_tag!r}, n={self.n}, d={self.dim}, "
            f"normalized={self.is_l2_normalized}, centered={self.is_centered})"
        )

    def index_of(self, word: str) -> Optional[int]:
        """Row id of ``word`` or None when it is out of vocabulary."""
        return self._index.get(word)

    def subset(self, words: Iterable[str]) -> "EmbeddingSpace":
        """
        Slice the rows of the given in-vocabulary words, in the order given.

        Unknown words are skipped; repeated words are kept once.
        """
        picked: List[str] = []
        seen = set()
        for word in words:
            if word in self._index and word not in seen:
                picked.append(word)
                seen.add(word)
        rows = [self._index[w] for w in picked]
        return self._derive(picked, self.matrix[rows])

    def head(self, n: int) -> "EmbeddingSpace":
        return self._derive(self.words[:n], self.matrix[:n])

    def with_matrix(self, matrix: np.ndarray, **flags) -> "EmbeddingSpace":
        """Same vocabulary, new vectors; flags default to the current ones."""
        if matrix.shape[0] != self.n:
            raise DimensionMismatchError(
                f"Replacement matrix has {matrix.shape[0]} rows, expected {self.n}"
            )
        return self._derive(self.words, matrix, **flags)

    def _derive(self, words, matrix, **flags) -> "EmbeddingSpace":
        params = {
            "lang_tag": self.lang_tag,
            "is_l2_normalized": self.is_l2_normalized,
            "is_centered": self.is_centered,
            "shortfall": self.shortfall,
            "duplicates": self.duplicates,
        }
        params.update(flags)
        return EmbeddingSpace(words, matrix, **params)


def normalize(space: EmbeddingSpace, center: bool = False) -> EmbeddingSpace:
    """
    Center (optionally) then scale every row to unit Euclidean norm.

    The order is fixed: the column mean is removed first, then each row is
    l2-normalized. After this, dot products between rows are cosines.

    Args:
        space (EmbeddingSpace): Space to normalize
        center (bool): Subtract the column mean before scaling

    Returns:
        EmbeddingSpace: New normalized space

    Raises:
        VecFormatError: If a row has zero norm (after centering)
    """
    matrix = np.array(space.matrix, dtype=np.float64)
    if center and space.n:
        matrix = matrix - matrix.mean(axis=0, keepdims=True)

    norms = np.linalg.norm(matrix, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        first = space.words[zero_rows[0]]
        logger.error(f"{zero_rows.size} zero-norm rows, first is {first!r}")
        raise VecFormatError(
            f"Cannot l2-normalize {zero_rows.size} zero-norm rows (first: {first!r})"
        )
    if space.n:
        matrix = matrix / norms[:, np.newaxis]

    return space.with_matrix(
        matrix,
        is_l2_normalized=True,
        is_centered=bool(center or space.is_centered),
    )


def restrict_top_n(space: EmbeddingSpace, n: int) -> EmbeddingSpace:
    """
    Keep the first ``n`` rows (the most frequent words in fastText order).

    A space smaller than ``n`` is returned whole, with the missing row count
    recorded in ``shortfall``.
    """
    if n <= 0:
        raise ValueError(f"restrict_top_n needs a positive n, got {n}")
    if space.n < n:
        shortfall = n - space.n
        logger.warning(
            f"Requested top {n} rows but {space.lang_tag or 'space'} has only "
            f"{space.n}; keeping all ({shortfall} short)"
        )
        return space._derive(space.words, space.matrix, shortfall=shortfall)
    return space._derive(space.words[:n], space.matrix[:n], shortfall=0)

