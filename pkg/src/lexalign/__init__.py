from .alignment import (
    RCSLS_GRID_CONFIG,
    LinearMap,
    align_least_squares,
    align_procrustes,
    align_rcsls,
    apply_map,
    build_anchors,
    refine,
)
from .embeddings import EmbeddingSpace, load_vec, normalize, restrict_top_n, save_vec
from .induction import BilingualDictionary, count_cooccurrences
from .retrieval import csls_retrieve, nn_retrieve, precision_at_k

__version__ = "0.1.0"

__all__ = [
    'BilingualDictionary',
    'EmbeddingSpace',
    'LinearMap',
    'RCSLS_GRID_CONFIG',
    'align_least_squares',
    'align_procrustes',
    'align_rcsls',
    'apply_map',
    'build_anchors',
    'count_cooccurrences',
    'csls_retrieve',
    'load_vec',
    'nn_retrieve',
    'normalize',
    'precision_at_k',
    'refine',
    'restrict_top_n',
    'save_vec'
]
