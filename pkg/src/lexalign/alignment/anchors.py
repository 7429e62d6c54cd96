from typing import List, Tuple

import numpy as np

from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import DimensionMismatchError, EmptyAnchorsError
from lexalign.induction import BilingualDictionary
from lexalign.utils import setup_logger

logger = setup_logger("AnchorSet")


class AnchorSet:
    """
    Paired anchor vectors: row i of ``X`` and ``Y`` come from the same
    dictionary entry.

    Attributes:
        X (np.ndarray): m x d source anchor vectors
        Y (np.ndarray): m x d target anchor vectors
        pair_words (List[Tuple[str, str]]): Entries actually used, in order
        skipped (int): Entries dropped because a word was out of vocabulary
    """

    def __init__(
        self,
        X: np.ndarray,
        Y: np.ndarray,
        pair_words: List[Tuple[str, str]],
        skipped: int = 0,
    ):
        if X.shape != Y.shape:
            raise DimensionMismatchError(f"Anchor blocks differ: {X.shape} vs {Y.shape}")
        if X.shape[0] == 0:
            raise EmptyAnchorsError("Anchor set is empty")
        self.X = X
        self.Y = Y
        self.pair_words = pair_words
        self.skipped = skipped

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.m

    def as_dictionary(self) -> BilingualDictionary:
        return BilingualDictionary(self.pair_words)

    def is_normalized(self, tol: float = 1e-6) -> bool:
        norms = np.concatenate([np.linalg.norm(self.X, axis=1), np.linalg.norm(self.Y, axis=1)])
        return bool(np.all(np.abs(norms - 1.0) <= tol))


def build_anchors(
    dictionary: BilingualDictionary, src: EmbeddingSpace, tgt: EmbeddingSpace
) -> AnchorSet:
    """
    Look up both words of every dictionary entry.

    Entries with an out-of-vocabulary word are skipped and counted. Entries
    sharing a source word are all kept, so that word's row repeats.

    Raises:
        DimensionMismatchError: If the spaces differ in dimensionality
        EmptyAnchorsError: If no entry has both words in vocabulary
    """
    if src.dim != tgt.dim:
        raise DimensionMismatchError(
            f"Source d={src.dim} and target d={tgt.dim} differ"
        )

    src_rows, tgt_rows, used = [], [], []
    for s, t in dictionary:
        i, j = src.index_of(s), tgt.index_of(t)
        if i is None or j is None:
            continue
        src_rows.append(i)
        tgt_rows.append(j)
        used.append((s, t))

    skipped = len(dictionary) - len(used)
    if not used:
        logger.error(f"None of {len(dictionary)} dictionary pairs is in vocabulary")
        raise EmptyAnchorsError(
            f"No usable anchor pairs: all {len(dictionary)} entries are out of vocabulary"
        )
    if skipped:
        logger.warning(f"Skipped {skipped} of {len(dictionary)} pairs with OOV words")
    logger.info(f"Built {len(used)} anchor pairs (d={src.dim})")
    return AnchorSet(src.matrix[src_rows], tgt.matrix[tgt_rows], used, skipped)
