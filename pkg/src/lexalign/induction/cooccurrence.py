import math
from collections import Counter
from typing import AbstractSet, Dict, Iterator, Tuple

from lexalign.induction.corpus import ParallelCorpus
from lexalign.utils import setup_logger

logger = setup_logger("CooccurrenceTable")


class CooccurrenceTable:
    """
    Presence-based counts over a segment-aligned corpus.

    Attributes:
        n_pairs (int): N, the number of aligned segment pairs
        src_count (Counter): count(x), pairs whose source side contains x
        tgt_count (Counter): count(y), pairs whose target side contains y
        joint (Dict[str, Counter]): joint[x][y] = count(x, y), pairs holding
            x on the source side and y on the target side

    Absent keys mean a count of 0; stored counts are always >= 1.
    """

    def __init__(self):
        self.n_pairs = 0
        self.src_count: Counter = Counter()
        self.tgt_count: Counter = Counter()
        self.joint: Dict[str, Counter] = {}

    def joint_count(self, x: str, y: str) -> int:
        targets = self.joint.get(x)
        return targets.get(y, 0) if targets else 0

    def targets_of(self, x: str) -> Counter:
        return self.joint.get(x, Counter())

    def iter_joint(self) -> Iterator[Tuple[str, str, int]]:
        for x, targets in self.joint.items():
            for y, c in targets.items():
                yield x, y, c

    def add_segment(self, src_words: AbstractSet[str], tgt_words: AbstractSet[str]):
        self.n_pairs += 1
        self.src_count.update(src_words)
        self.tgt_count.update(tgt_words)
        for x in src_words:
            targets = self.joint.get(x)
            if targets is None:
                targets = self.joint[x] = Counter()
            targets.update(tgt_words)

    def merge(self, other: "CooccurrenceTable") -> "CooccurrenceTable":
        """Sum two tables into a new one (counts and N add up)."""
        merged = CooccurrenceTable()
        for table in (self, other):
            merged.n_pairs += table.n_pairs
            merged.src_count.update(table.src_count)
            merged.tgt_count.update(table.tgt_count)
            for x, targets in table.joint.items():
                merged.joint.setdefault(x, Counter()).update(targets)
        return merged

    __add__ = merge

    def transposed(self) -> "CooccurrenceTable":
        """The same counts with source and target roles swapped."""
        flipped = CooccurrenceTable()
        flipped.n_pairs = self.n_pairs
        flipped.src_count = Counter(self.tgt_count)
        flipped.tgt_count = Counter(self.src_count)
        for x, y, c in self.iter_joint():
            flipped.joint.setdefault(y, Counter())[x] = c
        return flipped

    def __repr__(self) -> str:
        return (
            f"CooccurrenceTable(N={self.n_pairs}, src_types={len(self.src_count)}, "
            f"tgt_types={len(self.tgt_count)})"
        )


def count_cooccurrences(
    corpus: ParallelCorpus,
    src_stopwords: AbstractSet[str] = frozenset(),
    tgt_stopwords: AbstractSet[str] = frozenset(),
) -> CooccurrenceTable:
    """
    Count word presence and co-presence per segment pair.

    Every word counts at most once per pair no matter how often it repeats.
    Stop-words are dropped before counting; N is the number of pairs,
    including pairs left empty by the filtering.
    """
    table = CooccurrenceTable()
    for src, tgt in corpus:
        table.add_segment(set(src) - src_stopwords, set(tgt) - tgt_stopwords)
    logger.info(f"Counted {table!r}")
    return table


def ppmi(table: CooccurrenceTable, x: str, y: str) -> float:
    """
    Positive PMI: max(log2(N * count(x, y) / (count(x) * count(y))), 0).

    A pair that never co-occurs has PMI of minus infinity and clips to 0.
    """
    joint = table.joint_count(x, y)
    if joint == 0:
        return 0.0
    ratio = table.n_pairs * joint / (table.src_count[x] * table.tgt_count[y])
    return max(math.log2(ratio), 0.0)
