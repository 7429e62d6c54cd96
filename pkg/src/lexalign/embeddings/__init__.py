from .space import EmbeddingSpace, normalize, restrict_top_n
from .vecio import (
    load_vec,
    load_vec_file,
    read_vocabulary,
    read_vocabulary_file,
    save_vec,
    save_vec_file,
)

__all__ = [
    'EmbeddingSpace',
    'load_vec',
    'load_vec_file',
    'normalize',
    'read_vocabulary',
    'read_vocabulary_file',
    'restrict_top_n',
    'save_vec',
    'save_vec_file'
]
