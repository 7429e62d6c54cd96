"""Exceptions raised across lexalign.

Input problems derive from ``ValueError`` as well, so callers that already
guard with ``except ValueError`` keep working.
"""


class LexAlignError(Exception):
    """Base class for every lexalign failure."""


class VecFormatError(LexAlignError, ValueError):
    """A ``.vec`` stream violates the text format."""


class DictionaryFormatError(LexAlignError, ValueError):
    """A dictionary or corpus file cannot be parsed."""


class InputMissingError(LexAlignError, FileNotFoundError):
    """A required input path does not exist or cannot be read."""

    def __init__(self, path, reason: str = "input file not found"):
        self.path = str(path)
        super().__init__(f"{reason}: {self.path}")


class DimensionMismatchError(LexAlignError, ValueError):
    """Two spaces or a space and a map disagree on dimensionality."""


class EmptyAnchorsError(LexAlignError, ValueError):
    """No dictionary pair survived the vocabulary lookup."""


class SingularSystemError(LexAlignError, ValueError):
    """The least-squares normal equations could not be solved."""


class InsufficientWordsError(LexAlignError, ValueError):
    """A dictionary has too few unique source words for the requested split."""


class NeighborhoodSizeError(LexAlignError, ValueError):
    """A neighbourhood or ranking size exceeds the pool it is drawn from."""


class EvaluationError(LexAlignError, ValueError):
    """Evaluation cannot be carried out (e.g. every query is out of vocabulary)."""
