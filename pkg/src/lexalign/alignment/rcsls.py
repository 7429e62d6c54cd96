from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, svd

from lexalign.alignment.aligners import BaseAligner, ProcrustesAligner
from lexalign.alignment.anchors import AnchorSet
from lexalign.alignment.config import RcslsConfig
from lexalign.alignment.linear_map import (
    ORTHOGONALITY_TOLERANCE,
    LinearMap,
    apply_map,
    orthogonality_error,
)
from lexalign.embeddings import EmbeddingSpace, normalize
from lexalign.errors import NeighborhoodSizeError, VecFormatError
from lexalign.induction import BilingualDictionary
from lexalign.retrieval import CSLS, evaluate_direction, map_chunks, top_k
from lexalign.utils import setup_logger

logger = setup_logger("Rcsls")

Neighborhoods = Tuple[np.ndarray, np.ndarray]


def _matrix(W: Union[LinearMap, np.ndarray]) -> np.ndarray:
    return W.W if isinstance(W, LinearMap) else np.asarray(W, dtype=np.float64)


def _knn(queries: np.ndarray, pool: np.ndarray, k: int, threads: int) -> np.ndarray:
    """Row ids of the ``k`` pool rows with the largest dot product, per query."""
    if k > pool.shape[0]:
        raise NeighborhoodSizeError(f"k={k} exceeds pool size {pool.shape[0]}")
    parts = map_chunks(
        lambda rows: top_k(queries[rows] @ pool.T, k)[0], queries.shape[0], threads,
        width=pool.shape[0],
    )
    return np.vstack(parts) if parts else np.empty((0, k), dtype=np.int64)


def find_neighborhoods(
    W: Union[LinearMap, np.ndarray],
    X: np.ndarray,
    Y: np.ndarray,
    tgt_pool: np.ndarray,
    src_pool: np.ndarray,
    k: int,
    threads: int = 1,
) -> Neighborhoods:
    """
    Neighbourhoods of the RCSLS loss under the current map.

    Returns:
        Neighborhoods: ``(nbr_y, nbr_x)``; ``nbr_y[i]`` holds the k target-pool
        rows closest to the mapped anchor ``x_i W^T``, ``nbr_x[i]`` the k
        source-pool rows whose mapped vectors are closest to ``y_i``
    """
    W = _matrix(W)
    nbr_y = _knn(X @ W.T, tgt_pool, k, threads)
    # <W s_j, y_i> = <s_j, W^T y_i>: no need to map the whole source pool
    nbr_x = _knn(Y @ W, src_pool, k, threads)
    return nbr_y, nbr_x


def rcsls_objective(
    W: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    tgt_pool: np.ndarray,
    src_pool: np.ndarray,
    nbr_y: np.ndarray,
    nbr_x: np.ndarray,
) -> Tuple[float, np.ndarray]:
    """
    RCSLS value and gradient with the neighbourhoods held fixed.

    For fixed neighbourhoods the objective is linear in W:

        L(W) = (1/m) sum_i [ -2 <W x_i, y_i>
                             + mean_{j in nbr_y[i]} <W x_i, t_j>
                             + mean_{j in nbr_x[i]} <W s_j, y_i> ]

    and its gradient is ``((T_bar - 2 Y)^T X + Y^T S_bar) / m`` with
    ``T_bar``/``S_bar`` the per-anchor neighbourhood means.
    """
    m = X.shape[0]
    t_bar = tgt_pool[nbr_y].mean(axis=1)
    s_bar = src_pool[nbr_x].mean(axis=1)
    mapped = X @ W.T
    value = (
        -2.0 * np.sum(mapped * Y)
        + np.sum(mapped * t_bar)
        + np.sum((s_bar @ W.T) * Y)
    ) / m
    grad = ((t_bar - 2.0 * Y).T @ X + Y.T @ s_bar) / m
    return float(value), grad


def rcsls_loss(
    W: Union[LinearMap, np.ndarray],
    anchors: AnchorSet,
    tgt_pool: EmbeddingSpace,
    src_pool: EmbeddingSpace,
    k: int,
    threads: int = 1,
) -> float:
    """
    Relaxed CSLS loss of ``W`` on the anchors.

    Neighbourhoods are searched exactly, by dot product, in the given pools
    (nothing is excluded, an anchor may be its own neighbour).

    Raises:
        NeighborhoodSizeError: If ``k`` exceeds either pool
    """
    if k < 1 or k > min(tgt_pool.n, src_pool.n):
        raise NeighborhoodSizeError(
            f"k={k} must be in [1, {min(tgt_pool.n, src_pool.n)}] for pools "
            f"of {tgt_pool.n} targets and {src_pool.n} sources"
        )
    W = _matrix(W)
    nbrs = find_neighborhoods(
        W, anchors.X, anchors.Y, tgt_pool.matrix, src_pool.matrix, k, threads
    )
    value, _ = rcsls_objective(
        W, anchors.X, anchors.Y, tgt_pool.matrix, src_pool.matrix, *nbrs
    )
    return value


def spectral_project(W: np.ndarray) -> np.ndarray:
    """Clamp every singular value of ``W`` at 1 (unit spectral-norm ball)."""
    try:
        U, s, Vt = svd(np.asarray(W, dtype=np.float64), full_matrices=False)
    except LinAlgError as e:
        logger.error(f"SVD failed during spectral projection: {str(e)}")
        raise
    return (U * np.minimum(s, 1.0)) @ Vt


class RcslsRun:
    """
    One optimization run at a fixed starting learning rate.

    Attributes:
        lr (float): Starting learning rate
        final_lr (float): Learning rate after halvings
        losses (List[float]): Full loss before training and after every epoch
        snapshots (Dict[int, Tuple[np.ndarray, float]]): Epoch count ->
            (W, loss) at that point of the run
        diverged (bool): The loss became non-finite
    """

    def __init__(self, lr: float):
        self.lr = lr
        self.final_lr = lr
        self.losses: List[float] = []
        self.snapshots: Dict[int, Tuple[np.ndarray, float]] = {}
        self.diverged = False


def run_rcsls(
    anchors: AnchorSet,
    src_pool: EmbeddingSpace,
    tgt_pool: EmbeddingSpace,
    cfg: RcslsConfig,
    init: LinearMap,
    lr: float,
    threads: int = 1,
) -> RcslsRun:
    """
    Mini-batch gradient descent on the RCSLS loss, up to ``max(cfg.epochs)``.

    Neighbourhoods are recomputed every ``cfg.neighbor_refresh`` epochs.
    After an epoch the full loss is evaluated with fresh neighbourhoods; if
    it went up the epoch is undone and the learning rate halved, so
    ``losses`` never increases. The run stops once the rate falls below
    ``cfg.min_lr``; the remaining snapshots then share the last state.
    """
    X, Y = anchors.X, anchors.Y
    T, S = tgt_pool.matrix, src_pool.matrix
    k = cfg.k_neighbors
    rng = np.random.default_rng(cfg.seed)
    run = RcslsRun(lr)

    W = init.W.copy()
    nbrs = find_neighborhoods(W, X, Y, T, S, k, threads)
    loss, _ = rcsls_objective(W, X, Y, T, S, *nbrs)
    run.losses.append(loss)
    fixed = nbrs
    step = lr
    last_epoch = max(cfg.epochs)

    for epoch in range(1, last_epoch + 1):
        if (epoch - 1) % cfg.neighbor_refresh == 0:
            fixed = nbrs
        order = rng.permutation(anchors.m)
        candidate = W.copy()
        for start in range(0, anchors.m, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            _, grad = rcsls_objective(
                candidate, X[batch], Y[batch], T, S, fixed[0][batch], fixed[1][batch]
            )
            candidate -= step * grad
            if cfg.spectral:
                candidate = spectral_project(candidate)

        if not np.all(np.isfinite(candidate)):
            new_loss = float("nan")
        else:
            new_nbrs = find_neighborhoods(candidate, X, Y, T, S, k, threads)
            new_loss, _ = rcsls_objective(candidate, X, Y, T, S, *new_nbrs)
        if not np.isfinite(new_loss):
            run.diverged = True
            logger.error(f"lr={lr}: loss diverged at epoch {epoch}, aborting this run")
            break

        if new_loss > loss:
            step /= 2.0
            logger.warning(
                f"lr={lr}: epoch {epoch} raised the loss "
                f"({loss:.6f} -> {new_loss:.6f}), halving step to {step:g}"
            )
        else:
            W, loss, nbrs = candidate, new_loss, new_nbrs
        run.losses.append(loss)
        logger.debug(f"lr={lr} epoch {epoch}: loss {loss:.6f}")

        if epoch in cfg.epochs:
            run.snapshots[epoch] = (W.copy(), loss)
        if step < cfg.min_lr:
            logger.info(f"lr={lr}: step fell below {cfg.min_lr:g} after epoch {epoch}")
            for remaining in cfg.epochs:
                if remaining > epoch:
                    run.snapshots[remaining] = (W.copy(), loss)
            break

    run.final_lr = step
    return run


def _anchor_sources(anchors: AnchorSet) -> EmbeddingSpace:
    first: Dict[str, int] = {}
    for row, (src, _) in enumerate(anchors.pair_words):
        first.setdefault(src, row)
    return EmbeddingSpace(list(first), anchors.X[list(first.values())])


def _train_precision(
    W: np.ndarray,
    queries: EmbeddingSpace,
    gold: BilingualDictionary,
    src_pool: EmbeddingSpace,
    tgt_pool: EmbeddingSpace,
    k_neighbors: int,
    threads: int,
) -> Optional[float]:
    linear_map = LinearMap(W, method="rcsls")
    try:
        mapped = normalize(apply_map(linear_map, queries))
        reverse_pool = normalize(apply_map(linear_map, src_pool))
    except VecFormatError as e:
        logger.warning(f"Grid point maps a word to zero, skipped: {str(e)}")
        return None
    report = evaluate_direction(
        mapped,
        tgt_pool,
        reverse_pool,
        gold,
        criterion=CSLS,
        direction="train",
        k_neighbors=k_neighbors,
        ks=(1,),
        bucket_edges=(1,),
        threads=threads,
    )
    return report.p(1)


def align_rcsls(
    anchors: AnchorSet,
    src_pool: EmbeddingSpace,
    tgt_pool: EmbeddingSpace,
    cfg: Optional[RcslsConfig] = None,
    init: Optional[LinearMap] = None,
    threads: int = 1,
) -> LinearMap:
    """
    Grid-searched RCSLS alignment.

    Each learning rate gets one run; the state after every grid epoch count
    is scored by CSLS P@1 on the training pairs and the best grid point
    wins (first in grid order on ties). A diverging run only loses the grid
    points it had not reached.

    Args:
        anchors (AnchorSet): Training pairs, l2-normalized
        src_pool (EmbeddingSpace): Source rows searched for N_X
        tgt_pool (EmbeddingSpace): Target rows searched for N_Y
        cfg (Optional[RcslsConfig]): Hyperparameters, defaults if None
        init (Optional[LinearMap]): Starting map, Procrustes if None
        threads (int): Worker threads for neighbourhood search

    Returns:
        LinearMap: Chosen map; ``hyperparameters`` records the winner
    """
    cfg = cfg or RcslsConfig()
    if cfg.k_neighbors > min(src_pool.n, tgt_pool.n):
        raise NeighborhoodSizeError(
            f"k_neighbors={cfg.k_neighbors} exceeds pool sizes "
            f"({src_pool.n}, {tgt_pool.n})"
        )
    for pool in (src_pool, tgt_pool):
        if not pool.is_l2_normalized:
            logger.warning(f"RCSLS pool {pool!r} is not l2-normalized")
    if init is None:
        init = ProcrustesAligner().fit(anchors)

    queries = _anchor_sources(anchors)
    gold = anchors.as_dictionary()
    best: Optional[Tuple[float, float, int, np.ndarray, float]] = None
    for lr in cfg.learning_rates:
        run = run_rcsls(anchors, src_pool, tgt_pool, cfg, init, lr, threads)
        for epochs in cfg.epochs:
            if epochs not in run.snapshots:
                logger.warning(f"Grid point lr={lr}, epochs={epochs} was not reached")
                continue
            W, loss = run.snapshots[epochs]
            p1 = _train_precision(
                W, queries, gold, src_pool, tgt_pool, cfg.k_neighbors, threads
            )
            if p1 is None:
                continue
            logger.info(f"lr={lr}, epochs={epochs}: loss {loss:.6f}, train P@1 {p1:.2f}")
            if best is None or p1 > best[0]:
                best = (p1, lr, epochs, W, loss)

    grid = {
        "init": init.method,
        "k_neighbors": cfg.k_neighbors,
        "lr_grid": cfg.learning_rates,
        "epoch_grid": cfg.epochs,
        "batch_size": cfg.batch_size,
        "spectral": cfg.spectral,
        "neighbor_refresh": cfg.neighbor_refresh,
        "seed": cfg.seed,
    }
    if best is None:
        logger.error("Every RCSLS grid point failed; keeping the initial map")
        return LinearMap(
            init.W,
            is_orthogonal=init.is_orthogonal,
            method="rcsls",
            hyperparameters={**grid, "fallback": "init"},
        )

    p1, lr, epochs, W, loss = best
    logger.info(f"Selected lr={lr}, epochs={epochs} (train CSLS P@1 {p1:.2f})")
    return LinearMap(
        W,
        is_orthogonal=orthogonality_error(W) <= ORTHOGONALITY_TOLERANCE,
        method="rcsls",
        hyperparameters={
            **grid,
            "lr": lr,
            "epochs": epochs,
            "train_csls_p1": round(p1, 2),
            "final_loss": round(loss, 6),
        },
    )


class RcslsAligner(BaseAligner):
    """RCSLS started from the Procrustes solution of the same anchors."""

    method = "rcsls"

    def __init__(
        self,
        src_pool: EmbeddingSpace,
        tgt_pool: EmbeddingSpace,
        cfg: Optional[RcslsConfig] = None,
        threads: int = 1,
        debug_mode: bool = False,
    ) -> None:
        super().__init__(debug_mode)
        self.src_pool = src_pool
        self.tgt_pool = tgt_pool
        self.cfg = cfg or RcslsConfig()
        self.threads = threads

    def fit(self, anchors: AnchorSet) -> LinearMap:
        init = ProcrustesAligner().fit(anchors)
        self.logger.info(
            f"RCSLS grid: lr {self.cfg.learning_rates} x epochs {self.cfg.epochs}, "
            f"k={self.cfg.k_neighbors}, spectral={self.cfg.spectral}"
        )
        return align_rcsls(
            anchors, self.src_pool, self.tgt_pool, self.cfg, init, self.threads
        )
