import logging
from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

from lexalign.induction.cooccurrence import CooccurrenceTable, ppmi
from lexalign.induction.dictionary import BilingualDictionary
from lexalign.utils import setup_logger

# (score, joint count, target)
Candidate = Tuple[float, int, str]


class BaseDictionaryInducer(ABC):
    """
    Turns a co-occurrence table into a scored bilingual dictionary.

    Subclasses define the association score; candidate gating, ranking and
    tie-breaking are shared. Source words are visited by descending
    count(x), then lexicographically, so the output starts with the most
    frequent source words.
    """

    name = "base"

    def __init__(
        self, min_joint: int = 2, top_k: Optional[int] = None, debug_mode: bool = False
    ):
        if min_joint < 1:
            raise ValueError(f"min_joint must be >= 1, got {min_joint}")
        if top_k is not None and top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {top_k}")
        self.min_joint = min_joint
        self.top_k = top_k
        self.logger: logging.Logger = setup_logger(self.__class__.__name__, debug_mode)

    @abstractmethod
    def score(self, table: CooccurrenceTable, x: str, y: str, joint: int) -> float:
        pass

    def accept(self, score: float) -> bool:
        return True

    def candidates(self, table: CooccurrenceTable, x: str) -> List[Candidate]:
        """Gated candidates for ``x``, best first."""
        ranked = []
        for y, joint in table.targets_of(x).items():
            if joint < self.min_joint:
                continue
            s = self.score(table, x, y, joint)
            if self.accept(s):
                ranked.append((s, joint, y))
        # score desc, joint count desc, target asc
        ranked.sort(key=lambda c: (-c[0], -c[1], c[2]))
        if self.top_k is not None:
            ranked = ranked[: self.top_k]
        return ranked

    def induce(self, table: CooccurrenceTable) -> BilingualDictionary:
        entries, scores = [], []
        sources = sorted(table.joint, key=lambda x: (-table.src_count[x], x))
        for x in sources:
            for s, _, y in self.candidates(table, x):
                entries.append((x, y))
                scores.append(s)
        dictionary = BilingualDictionary(entries, scores)
        self.logger.info(
            f"Induced {len(dictionary)} pairs for {len(dictionary.sources())} "
            f"source words ({self.name}, min_joint={self.min_joint}, top_k={self.top_k})"
        )
        return dictionary


class PpmiInducer(BaseDictionaryInducer):
    """Keeps every target whose PPMI with the source reaches ``threshold``."""

    name = "ppmi"

    def __init__(
        self,
        threshold: float = 0.0,
        min_joint: int = 2,
        top_k: Optional[int] = None,
        debug_mode: bool = False,
    ):
        if threshold < 0:
            raise ValueError(f"PPMI threshold must be >= 0, got {threshold}")
        super().__init__(min_joint, top_k, debug_mode)
        self.threshold = threshold

    def score(self, table, x, y, joint):
        return ppmi(table, x, y)

    def accept(self, score):
        return score >= self.threshold


class CondProbInducer(BaseDictionaryInducer):
    """
    Ranks targets by P(y|x) P(x|y) = count(x, y)^2 / (count(x) count(y)).

    The score lies in (0, 1] and equals 1 only when x and y always occur
    together.
    """

    name = "condprob"

    def __init__(self, min_joint: int = 2, top_k: int = 1, debug_mode: bool = False):
        super().__init__(min_joint, top_k, debug_mode)

    def score(self, table, x, y, joint):
        return joint * joint / (table.src_count[x] * table.tgt_count[y])


def induce_ppmi_dict(
    table: CooccurrenceTable,
    threshold: float = 0.0,
    min_joint: int = 2,
    top_k: Optional[int] = None,
) -> BilingualDictionary:
    """Thresholded PPMI dictionary; see :class:`PpmiInducer`."""
    return PpmiInducer(threshold, min_joint, top_k).induce(table)


def induce_condprob_dict(
    table: CooccurrenceTable, min_joint: int = 2, top_k: int = 1
) -> BilingualDictionary:
    """Top-k conditional-probability-product dictionary; see :class:`CondProbInducer`."""
    return CondProbInducer(min_joint, top_k).induce(table)


INDUCERS = {
    PpmiInducer.name: PpmiInducer,
    CondProbInducer.name: CondProbInducer,
}
