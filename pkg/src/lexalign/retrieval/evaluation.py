from typing import Dict, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, model_validator

from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import EvaluationError
from lexalign.induction import BilingualDictionary
from lexalign.retrieval.search import CSLS, RetrievalResult, retrieve
from lexalign.utils import setup_logger

logger = setup_logger("Evaluation")

DEFAULT_KS = (1, 5, 10)
DEFAULT_BUCKET_EDGES = (1, 5, 10)
MISS = "miss"


def bucket_labels(edges: Sequence[int] = DEFAULT_BUCKET_EDGES) -> List[str]:
    """
    Labels for rank buckets: (1, 5, 10) -> ["1", "2-5", "6-10", "miss"].

    Raises:
        ValueError: If the edges are not positive and strictly increasing
    """
    if not edges or edges[0] < 1 or any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError(
            f"Bucket edges must be positive and strictly increasing, got {list(edges)}"
        )
    labels, low = [], 1
    for high in edges:
        labels.append(str(high) if high == low else f"{low}-{high}")
        low = high + 1
    labels.append(MISS)
    return labels


class EvaluationReport(BaseModel):
    """
    Precision at k for one direction and one retrieval criterion.

    ``distribution`` counts queries by the rank of their first correct
    candidate; the last bucket holds queries with no hit within the deepest
    bucket edge.
    """

    direction: str
    criterion: str
    precision: Dict[int, float]
    n_queries: int
    distribution: Dict[str, int]
    n_oov: int = 0

    @model_validator(mode="after")
    def _check_invariants(self):
        ks = sorted(self.precision)
        for lo, hi in zip(ks, ks[1:]):
            if self.precision[lo] > self.precision[hi] + 1e-9:
                raise ValueError(f"P@{lo} exceeds P@{hi}")
        if sum(self.distribution.values()) != self.n_queries:
            raise ValueError("Rank buckets do not sum to the query count")
        return self

    def p(self, k: int) -> float:
        return self.precision[k]

    def to_row(self) -> Dict[str, object]:
        row: Dict[str, object] = {"direction": self.direction, "criterion": self.criterion}
        for k in sorted(self.precision):
            row[f"p{k}"] = round(self.precision[k], 2)
        row["n_queries"] = self.n_queries
        return row


def precision_at_k(
    result: RetrievalResult,
    gold: BilingualDictionary,
    ks: Sequence[int] = DEFAULT_KS,
    bucket_edges: Sequence[int] = DEFAULT_BUCKET_EDGES,
    direction: str = "",
) -> EvaluationReport:
    """
    Score rankings against a gold dictionary.

    A query hits at k when any of its gold translations is among its top k
    candidates. Precision is averaged uniformly over unique query words.

    Raises:
        EvaluationError: If a query has no gold entry, there are no queries,
            or the rankings are shallower than the largest k or bucket edge
    """
    depth = max(max(ks), max(bucket_edges))
    if result.k < depth:
        raise EvaluationError(f"Rankings hold {result.k} candidates, need {depth}")

    gold_map = gold.gold()
    first_hits: List[Optional[int]] = []
    seen = set()
    for i, word in enumerate(result.query_words):
        if word in seen:
            continue
        seen.add(word)
        if word not in gold_map:
            raise EvaluationError(f"Query {word!r} has no gold translation")
        accepted = gold_map[word]
        rank = next(
            (r for r, cand in enumerate(result.candidates(i), start=1) if cand in accepted),
            None,
        )
        first_hits.append(rank)

    if not first_hits:
        raise EvaluationError("No queries to evaluate")

    m = len(first_hits)
    precision = {
        k: 100.0 * sum(1 for r in first_hits if r is not None and r <= k) / m for k in ks
    }

    labels = bucket_labels(bucket_edges)
    distribution = {label: 0 for label in labels}
    for rank in first_hits:
        label = MISS
        if rank is not None:
            for edge, bucket in zip(bucket_edges, labels):
                if rank <= edge:
                    label = bucket
                    break
        distribution[label] += 1

    return EvaluationReport(
        direction=direction,
        criterion=result.criterion,
        precision=precision,
        n_queries=m,
        distribution=distribution,
    )


def evaluate_direction(
    queries: EmbeddingSpace,
    pool: EmbeddingSpace,
    reverse_pool: EmbeddingSpace,
    gold: BilingualDictionary,
    criterion: str = CSLS,
    direction: str = "",
    k_neighbors: int = 10,
    ks: Sequence[int] = DEFAULT_KS,
    bucket_edges: Sequence[int] = DEFAULT_BUCKET_EDGES,
    threads: int = 1,
) -> EvaluationReport:
    """
    Translate the gold source words and score the rankings.

    ``queries`` holds vectors already mapped into the pool's space. Gold
    source words missing from ``queries`` are dropped and counted as
    out-of-vocabulary.

    Raises:
        EvaluationError: If every gold source word is out of vocabulary
    """
    sources = gold.sources()
    present = [w for w in sources if w in queries]
    n_oov = len(sources) - len(present)
    if not present:
        logger.error(f"All {len(sources)} {direction} queries are out of vocabulary")
        raise EvaluationError(
            f"All {len(sources)} {direction or 'evaluation'} queries are out of vocabulary"
        )
    if n_oov:
        logger.warning(f"{direction}: {n_oov} of {len(sources)} queries out of vocabulary")

    depth = max(max(ks), max(bucket_edges))
    result = retrieve(
        queries.subset(present), pool, reverse_pool, criterion, depth, k_neighbors, threads
    )
    report = precision_at_k(result, gold.restrict_sources(present), ks, bucket_edges, direction)
    report = report.model_copy(update={"n_oov": n_oov})
    logger.info(
        f"{direction} {criterion}: "
        + ", ".join(f"P@{k}={report.precision[k]:.1f}" for k in sorted(report.precision))
        + f" over {report.n_queries} queries"
    )
    return report


def reports_frame(reports: Sequence[EvaluationReport]) -> pd.DataFrame:
    """Rows of direction, criterion, p1, p5, p10, n_queries."""
    return pd.DataFrame([r.to_row() for r in reports])


def retrieval_distribution(*reports: EvaluationReport) -> pd.DataFrame:
    """
    Direction x rank-bucket count grid, ready for heatmap rendering.

    Typically called with the forward and backward report of one criterion.
    """
    if not reports:
        return pd.DataFrame()
    labels = list(reports[0].distribution)
    for report in reports[1:]:
        if list(report.distribution) != labels:
            raise EvaluationError("Reports use different rank buckets")
    frame = pd.DataFrame(
        [[r.distribution[label] for label in labels] for r in reports],
        columns=labels,
    )
    frame.insert(0, "criterion", [r.criterion for r in reports])
    frame.insert(0, "direction", [r.direction for r in reports])
    return frame
