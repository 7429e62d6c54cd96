import json
import os

from .aligners import (
    BaseAligner,
    LeastSquaresAligner,
    ProcrustesAligner,
    align_least_squares,
    align_procrustes,
)
from .anchors import AnchorSet, build_anchors
from .config import RcslsConfig, RefineConfig
from .linear_map import (
    LinearMap,
    apply_map,
    load_matrix,
    orthogonality_error,
    provenance_path,
    save_matrix,
)
from .rcsls import (
    RcslsAligner,
    RcslsRun,
    align_rcsls,
    find_neighborhoods,
    rcsls_loss,
    rcsls_objective,
    run_rcsls,
    spectral_project,
)
from .refine import refine


def _load_json(filename):
    """Load a JSON config file from the configs directory."""
    path = os.path.join(os.path.dirname(__file__), 'configs', filename)
    with open(path, 'r') as f:
        return json.load(f)


# Learning-rate x epoch grid used for English-Sinhala RCSLS runs
RCSLS_GRID_CONFIG = RcslsConfig(**_load_json('rcsls.grid.json'))

METHODS = ('lstsq', 'procrustes', 'rcsls')

__all__ = [
    'AnchorSet',
    'BaseAligner',
    'LeastSquaresAligner',
    'LinearMap',
    'METHODS',
    'RCSLS_GRID_CONFIG',
    'ProcrustesAligner',
    'RcslsAligner',
    'RcslsConfig',
    'RcslsRun',
    'RefineConfig',
    'align_least_squares',
    'align_procrustes',
    'align_rcsls',
    'apply_map',
    'build_anchors',
    'find_neighborhoods',
    'load_matrix',
    'orthogonality_error',
    'provenance_path',
    'rcsls_loss',
    'rcsls_objective',
    'refine',
    'run_rcsls',
    'save_matrix',
    'spectral_project'
]
