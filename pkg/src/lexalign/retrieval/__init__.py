from .evaluation import (
    EvaluationReport,
    bucket_labels,
    evaluate_direction,
    precision_at_k,
    reports_frame,
    retrieval_distribution,
)
from .search import (
    CRITERIA,
    CSLS,
    NN,
    RetrievalResult,
    csls_penalties,
    csls_retrieve,
    map_chunks,
    mean_topk_similarity,
    mutual_nearest_pairs,
    nn_retrieve,
    retrieve,
    row_chunks,
    top_k,
)

__all__ = [
    'CRITERIA',
    'CSLS',
    'EvaluationReport',
    'NN',
    'RetrievalResult',
    'bucket_labels',
    'csls_penalties',
    'csls_retrieve',
    'evaluate_direction',
    'map_chunks',
    'mean_topk_similarity',
    'mutual_nearest_pairs',
    'nn_retrieve',
    'precision_at_k',
    'reports_frame',
    'retrieval_distribution',
    'retrieve',
    'row_chunks',
    'top_k'
]
