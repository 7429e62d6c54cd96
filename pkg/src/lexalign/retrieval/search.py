from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import NeighborhoodSizeError
from lexalign.utils import setup_logger

logger = setup_logger("Retrieval")

# Block sizes depend on the pool width only, never on the thread count
CHUNK_SIZE = 512
# Upper bound on score entries held by one block (float64, ~128 MB)
MAX_BLOCK_ENTRIES = 1 << 24

NN = "nn"
CSLS = "csls"
CRITERIA = (NN, CSLS)


class RetrievalResult:
    """
    Ranked candidates per query.

    Attributes:
        query_words (List[str]): One entry per query row
        pool_words (List[str]): Vocabulary the indices point into
        indices (np.ndarray): m x k pool row ids, best first
        scores (np.ndarray): m x k scores, non-increasing along each row
        criterion (str): "nn" or "csls"
    """

    def __init__(
        self,
        query_words: Sequence[str],
        pool_words: Sequence[str],
        indices: np.ndarray,
        scores: np.ndarray,
        criterion: str,
    ):
        self.query_words = list(query_words)
        self.pool_words = list(pool_words)
        self.indices = indices
        self.scores = scores
        self.criterion = criterion

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    def __len__(self) -> int:
        return len(self.query_words)

    def ranking(self, i: int) -> List[Tuple[str, float]]:
        """(candidate word, score) pairs of query ``i``, best first."""
        return [
            (self.pool_words[j], float(s))
            for j, s in zip(self.indices[i], self.scores[i])
        ]

    def candidates(self, i: int) -> List[str]:
        return [self.pool_words[j] for j in self.indices[i]]


def block_rows(width: int) -> int:
    """Rows per block of ``width`` score columns, capped by MAX_BLOCK_ENTRIES."""
    return max(1, min(CHUNK_SIZE, MAX_BLOCK_ENTRIES // max(width, 1)))


def row_chunks(n: int, width: int = 0) -> List[slice]:
    size = block_rows(width)
    return [slice(start, min(start + size, n)) for start in range(0, n, size)]


def map_chunks(
    fn: Callable[[slice], object], n: int, threads: int = 1, width: int = 0
) -> list:
    """
    Apply ``fn`` to consecutive row blocks, results in block order.

    ``width`` is the number of score columns ``fn`` materializes per row.
    """
    blocks = row_chunks(n, width)
    if threads <= 1 or len(blocks) <= 1:
        return [fn(block) for block in blocks]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, blocks))


def top_k(scores: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact top-k per row of a score matrix.

    Ties are broken by column index, lower first.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (indices, values), both m x k
    """
    m, n = scores.shape
    if k > n:
        raise NeighborhoodSizeError(f"k={k} exceeds pool size {n}")
    if k == n:
        order = np.argsort(-scores, axis=1, kind="stable")
    else:
        kth = np.partition(scores, n - k, axis=1)[:, n - k]
        order = np.empty((m, k), dtype=np.int64)
        for i in range(m):
            cand = np.flatnonzero(scores[i] >= kth[i])
            order[i] = cand[np.argsort(-scores[i, cand], kind="stable")][:k]
    return order, np.take_along_axis(scores, order, axis=1)


def mean_topk_similarity(
    queries: np.ndarray, pool: np.ndarray, k: int, threads: int = 1
) -> np.ndarray:
    """Mean dot product of every query with its ``k`` nearest pool rows."""
    n = pool.shape[0]
    if k > n:
        raise NeighborhoodSizeError(f"k_neighbors={k} exceeds pool size {n}")

    def block(rows: slice) -> np.ndarray:
        sims = queries[rows] @ pool.T
        return np.partition(sims, n - k, axis=1)[:, n - k:].mean(axis=1)

    parts = map_chunks(block, queries.shape[0], threads, width=n)
    return np.concatenate(parts) if parts else np.empty(0)


def _warn_unnormalized(*spaces: EmbeddingSpace) -> None:
    for space in spaces:
        if not space.is_l2_normalized:
            logger.warning(
                f"Retrieval over un-normalized space {space!r}; scores are not cosines"
            )


def nn_retrieve(
    queries: EmbeddingSpace, pool: EmbeddingSpace, k: int, threads: int = 1
) -> RetrievalResult:
    """
    Exact nearest-neighbour retrieval by dot product.

    Args:
        queries (EmbeddingSpace): Query rows (already in the pool's space)
        pool (EmbeddingSpace): Candidate rows
        k (int): Candidates to keep per query
        threads (int): Worker threads over query blocks

    Returns:
        RetrievalResult: Rankings with cosine scores
    """
    if k > pool.n:
        raise NeighborhoodSizeError(f"k={k} exceeds pool size {pool.n}")
    _warn_unnormalized(queries, pool)

    def block(rows: slice):
        return top_k(queries.matrix[rows] @ pool.matrix.T, k)

    return _collect(queries, pool, map_chunks(block, queries.n, threads, pool.n), k, NN)


def csls_retrieve(
    queries: EmbeddingSpace,
    pool: EmbeddingSpace,
    reverse_pool: EmbeddingSpace,
    k_rank: int,
    k_neighbors: int = 10,
    threads: int = 1,
    r_rev: Optional[np.ndarray] = None,
) -> RetrievalResult:
    """
    Retrieval by cross-domain similarity local scaling.

    score(q, t) = 2 <q, t> - r_pool(q) - r_rev(t), where r_pool(q) is the
    mean similarity of q to its ``k_neighbors`` nearest pool rows and
    r_rev(t) the mean similarity of t to its ``k_neighbors`` nearest
    ``reverse_pool`` rows. Candidates that are close to everything (hubs)
    are penalized.

    Args:
        queries (EmbeddingSpace): Mapped query rows
        pool (EmbeddingSpace): Target candidates
        reverse_pool (EmbeddingSpace): Mapped source pool for target penalties
        k_rank (int): Candidates to keep per query
        k_neighbors (int): Neighbourhood size of the penalties
        threads (int): Worker threads over row blocks
        r_rev (Optional[np.ndarray]): Precomputed target penalties, reused
            across calls against the same pool

    Returns:
        RetrievalResult: Rankings with CSLS scores
    """
    if k_rank > pool.n:
        raise NeighborhoodSizeError(f"k={k_rank} exceeds pool size {pool.n}")
    if k_neighbors > min(pool.n, reverse_pool.n):
        raise NeighborhoodSizeError(
            f"k_neighbors={k_neighbors} exceeds pool sizes ({pool.n}, {reverse_pool.n})"
        )
    _warn_unnormalized(queries, pool, reverse_pool)

    r_pool = mean_topk_similarity(queries.matrix, pool.matrix, k_neighbors, threads)
    if r_rev is None:
        r_rev = csls_penalties(pool, reverse_pool, k_neighbors, threads)

    def block(rows: slice):
        scores = 2.0 * (queries.matrix[rows] @ pool.matrix.T)
        scores -= r_pool[rows, np.newaxis]
        scores -= r_rev[np.newaxis, :]
        return top_k(scores, k_rank)

    parts = map_chunks(block, queries.n, threads, pool.n)
    return _collect(queries, pool, parts, k_rank, CSLS)


def csls_penalties(
    pool: EmbeddingSpace, reverse_pool: EmbeddingSpace, k_neighbors: int, threads: int = 1
) -> np.ndarray:
    """r_rev(t) for every pool row; read-only once computed."""
    logger.info(
        f"Computing CSLS penalties for {pool.n} candidates against {reverse_pool.n} rows"
    )
    return mean_topk_similarity(pool.matrix, reverse_pool.matrix, k_neighbors, threads)


def _collect(queries, pool, parts, k, criterion) -> RetrievalResult:
    if parts:
        indices = np.vstack([p[0] for p in parts])
        scores = np.vstack([p[1] for p in parts])
    else:
        indices = np.empty((0, k), dtype=np.int64)
        scores = np.empty((0, k))
    return RetrievalResult(queries.words, pool.words, indices, scores, criterion)


def retrieve(
    queries: EmbeddingSpace,
    pool: EmbeddingSpace,
    reverse_pool: EmbeddingSpace,
    criterion: str,
    k: int,
    k_neighbors: int = 10,
    threads: int = 1,
) -> RetrievalResult:
    """Dispatch to :func:`nn_retrieve` or :func:`csls_retrieve`."""
    if criterion == NN:
        return nn_retrieve(queries, pool, k, threads)
    if criterion == CSLS:
        return csls_retrieve(queries, pool, reverse_pool, k, k_neighbors, threads)
    raise ValueError(f"Unknown retrieval criterion {criterion!r}; use one of {CRITERIA}")


def mutual_nearest_pairs(
    src: np.ndarray,
    tgt: np.ndarray,
    criterion: str = CSLS,
    k_neighbors: int = 10,
    threads: int = 1,
) -> List[Tuple[int, int]]:
    """
    Row pairs (i, j) that are each other's top-1 under the criterion.

    ``src`` and ``tgt`` must live in the same space (``src`` already mapped).
    The score matrix is walked in row blocks; column maxima are reduced in
    block order, so ties resolve to the lowest index on both sides.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"Unknown retrieval criterion {criterion!r}; use one of {CRITERIA}")
    n_src, n_tgt = src.shape[0], tgt.shape[0]
    if n_src == 0 or n_tgt == 0:
        return []

    if criterion == CSLS:
        r_src = mean_topk_similarity(src, tgt, k_neighbors, threads)
        r_tgt = mean_topk_similarity(tgt, src, k_neighbors, threads)
    else:
        r_src, r_tgt = np.zeros(n_src), np.zeros(n_tgt)
    scale = 2.0 if criterion == CSLS else 1.0

    def block(rows: slice):
        scores = scale * (src[rows] @ tgt.T) - r_src[rows, np.newaxis] - r_tgt[np.newaxis, :]
        return scores.argmax(axis=1), scores.max(axis=0), scores.argmax(axis=0) + rows.start

    forward = np.empty(n_src, dtype=np.int64)
    col_best = np.full(n_tgt, -np.inf)
    backward = np.zeros(n_tgt, dtype=np.int64)
    for rows, (fwd, col_max, col_arg) in zip(
        row_chunks(n_src, n_tgt), map_chunks(block, n_src, threads, n_tgt)
    ):
        forward[rows] = fwd
        better = col_max > col_best
        col_best[better] = col_max[better]
        backward[better] = col_arg[better]

    return [(i, int(j)) for i, j in enumerate(forward) if backward[j] == i]
