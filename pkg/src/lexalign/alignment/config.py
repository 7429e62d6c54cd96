from typing import List

from pydantic import BaseModel, Field, field_validator

from lexalign.retrieval import CRITERIA, CSLS


class RcslsConfig(BaseModel):
    """
    Hyperparameters of the RCSLS optimizer.

    ``learning_rates`` x ``epochs`` is the search grid; the winning point is
    picked by CSLS P@1 on the training dictionary.
    """

    k_neighbors: int = Field(default=10, ge=1)
    learning_rates: List[float] = Field(default_factory=lambda: [1.0, 10.0, 25.0, 50.0])
    epochs: List[int] = Field(default_factory=lambda: [10, 20])
    batch_size: int = Field(default=10000, ge=1)
    spectral: bool = False
    neighbor_refresh: int = Field(default=1, ge=1)
    min_lr: float = Field(default=1e-4, gt=0.0)
    seed: int = 42

    @field_validator("learning_rates")
    @classmethod
    def _check_learning_rates(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("learning_rates must not be empty")
        if any(lr <= 0 for lr in value):
            raise ValueError("learning rates must be positive")
        return value

    @field_validator("epochs")
    @classmethod
    def _check_epochs(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("epochs must not be empty")
        if any(e <= 0 for e in value):
            raise ValueError("epoch counts must be positive")
        return sorted(set(value))


class RefineConfig(BaseModel):
    """Iterative refinement: mutual nearest neighbours -> Procrustes, repeated."""

    iterations: int = Field(default=5, ge=1)
    induce_top_n: int = Field(default=10000, ge=1)
    criterion: str = CSLS
    k_neighbors: int = Field(default=10, ge=1)

    @field_validator("criterion")
    @classmethod
    def _check_criterion(cls, value: str) -> str:
        value = value.lower()
        if value not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        return value
