from typing import List, Optional, Set, Tuple

from lexalign.alignment.aligners import ProcrustesAligner
from lexalign.alignment.anchors import AnchorSet
from lexalign.alignment.config import RefineConfig
from lexalign.alignment.linear_map import LinearMap, apply_map
from lexalign.embeddings import EmbeddingSpace, normalize
from lexalign.retrieval import CSLS, mutual_nearest_pairs
from lexalign.utils import setup_logger

logger = setup_logger("Refine")


def refine(
    init: LinearMap,
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    iterations: int = 5,
    induce_top_n: int = 10000,
    criterion: str = CSLS,
    k_neighbors: int = 10,
    threads: int = 1,
) -> LinearMap:
    """
    Bootstrap a map from its own mutual nearest neighbours.

    Each iteration maps the ``induce_top_n`` most frequent source words,
    keeps the pairs that are each other's top-1 under ``criterion`` among
    the ``induce_top_n`` most frequent target words, and refits Procrustes
    on them. Iteration stops early once the induced dictionary repeats.

    An empty induced dictionary ends the loop with a warning; the last map
    is returned and ``hyperparameters["refine_empty_at"]`` marks the
    iteration.
    """
    cfg = RefineConfig(
        iterations=iterations,
        induce_top_n=induce_top_n,
        criterion=criterion,
        k_neighbors=k_neighbors,
    )
    if not init.is_orthogonal:
        logger.warning(f"Refining a non-orthogonal {init.method} map")
    for space in (src, tgt):
        if not space.is_l2_normalized:
            logger.warning(f"Refinement over un-normalized space {space!r}")

    src_top = src.head(cfg.induce_top_n)
    tgt_top = tgt.head(cfg.induce_top_n)
    aligner = ProcrustesAligner()
    current = init
    previous: Optional[Set[Tuple[int, int]]] = None
    pairs: List[Tuple[int, int]] = []
    notes = {}
    done = 0

    for it in range(1, cfg.iterations + 1):
        mapped = normalize(apply_map(current, src_top))
        pairs = mutual_nearest_pairs(
            mapped.matrix, tgt_top.matrix, cfg.criterion, cfg.k_neighbors, threads
        )
        if not pairs:
            logger.warning(f"Iteration {it}: no mutual nearest pairs, keeping the last map")
            notes["refine_empty_at"] = it
            break
        if previous is not None and set(pairs) == previous:
            logger.info(f"Iteration {it}: induced dictionary unchanged, stopping")
            break
        previous = set(pairs)

        src_rows = [i for i, _ in pairs]
        tgt_rows = [j for _, j in pairs]
        anchors = AnchorSet(
            src_top.matrix[src_rows],
            tgt_top.matrix[tgt_rows],
            [(src_top.words[i], tgt_top.words[j]) for i, j in pairs],
        )
        current = aligner.fit(anchors)
        done = it
        logger.info(f"Iteration {it}: refitted on {len(pairs)} mutual pairs")

    return LinearMap(
        current.W,
        is_orthogonal=current.is_orthogonal,
        method=f"{init.method}+refine",
        hyperparameters={
            **init.hyperparameters,
            "refine_iterations": done,
            "refine_max_iterations": cfg.iterations,
            "refine_top_n": cfg.induce_top_n,
            "refine_criterion": cfg.criterion,
            "refine_pairs": len(pairs),
            **notes,
        },
    )
