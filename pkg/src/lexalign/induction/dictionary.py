from pathlib import Path
from typing import IO, Dict, Iterable, List, Mapping, Optional, Set, Tuple, Union

import numpy as np

from lexalign.errors import (
    DictionaryFormatError,
    InputMissingError,
    InsufficientWordsError,
)
from lexalign.utils import setup_logger

logger = setup_logger("BilingualDictionary")

Pair = Tuple[str, str]


class BilingualDictionary:
    """
    Ordered (source, target) anchor pairs with optional scores.

    Exact duplicate pairs are kept once (first occurrence wins). A source
    word may map to several targets.
    """

    def __init__(
        self,
        entries: Iterable[Pair] = (),
        scores: Optional[Iterable[float]] = None,
    ):
        self.entries: List[Pair] = []
        self.scores: Optional[List[float]] = None if scores is None else []
        seen = set()
        score_iter = iter(scores) if scores is not None else None
        for src, tgt in entries:
            score = next(score_iter) if score_iter is not None else None
            if (src, tgt) in seen:
                continue
            seen.add((src, tgt))
            self.entries.append((src, tgt))
            if self.scores is not None:
                self.scores.append(float(score))
        self._pairs = seen

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, pair: Pair) -> bool:
        return pair in self._pairs

    def __repr__(self) -> str:
        return (
            f"BilingualDictionary({len(self.entries)} entries, "
            f"{len(self.sources())} unique sources)"
        )

    def sources(self) -> List[str]:
        """Unique source words in first-appearance order."""
        return list(dict.fromkeys(src for src, _ in self.entries))

    def gold(self) -> Dict[str, Set[str]]:
        """Source word -> set of accepted translations."""
        mapping: Dict[str, Set[str]] = {}
        for src, tgt in self.entries:
            mapping.setdefault(src, set()).add(tgt)
        return mapping

    def restrict_sources(self, words: Iterable[str]) -> "BilingualDictionary":
        """Entries whose source is in ``words``, in the order of ``words``."""
        by_source: Dict[str, List[int]] = {}
        for i, (src, _) in enumerate(self.entries):
            by_source.setdefault(src, []).append(i)
        picked = [i for w in dict.fromkeys(words) for i in by_source.get(w, [])]
        return self._select(picked)

    def inverted(self) -> "BilingualDictionary":
        """The same pairs read target -> source."""
        return BilingualDictionary(
            ((tgt, src) for src, tgt in self.entries), self.scores
        )

    def _select(self, indices: List[int]) -> "BilingualDictionary":
        entries = [self.entries[i] for i in indices]
        scores = [self.scores[i] for i in indices] if self.scores is not None else None
        return BilingualDictionary(entries, scores)


def read_dictionary(stream: IO[str]) -> BilingualDictionary:
    """
    Parse ``source<TAB>target[<TAB>score]`` lines.

    Single-space separated lines (MUSE layout) are accepted too. Scores are
    kept when any line carries one; lines without a score then get NaN.
    """
    rows = []
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) not in (2, 3):
            raise DictionaryFormatError(
                f"Line {lineno}: expected 'source<TAB>target', got {line!r}"
            )
        rows.append((lineno, parts))

    entries = [(parts[0], parts[1]) for _, parts in rows]
    n_scored = sum(1 for _, parts in rows if len(parts) == 3)
    if not n_scored:
        return BilingualDictionary(entries)
    if n_scored < len(rows):
        logger.warning(
            f"{len(rows) - n_scored} of {len(rows)} dictionary lines have no score; "
            f"reading them as NaN"
        )

    scores = []
    for lineno, parts in rows:
        try:
            scores.append(float(parts[2]) if len(parts) == 3 else float("nan"))
        except ValueError:
            raise DictionaryFormatError(f"Line {lineno}: bad score {parts[2]!r}")
    return BilingualDictionary(entries, scores)


def write_dictionary(
    dictionary: BilingualDictionary, stream: IO[str], with_scores: bool = False
) -> None:
    if with_scores and dictionary.scores is not None:
        for (src, tgt), score in zip(dictionary.entries, dictionary.scores):
            stream.write(f"{src}\t{tgt}\t{score:.6f}\n")
    else:
        for src, tgt in dictionary.entries:
            stream.write(f"{src}\t{tgt}\n")


def read_dictionary_file(path: Union[str, Path]) -> BilingualDictionary:
    path = Path(path)
    if not path.is_file():
        raise InputMissingError(path)
    with open(path, "r", encoding="utf-8") as f:
        dictionary = read_dictionary(f)
    logger.info(f"Read {dictionary!r} from {path}")
    return dictionary


def write_dictionary_file(
    dictionary: BilingualDictionary, path: Union[str, Path], with_scores: bool = False
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        write_dictionary(dictionary, f, with_scores)
    logger.info(f"Wrote {len(dictionary)} entries to {path}")


def split_train_test(
    dictionary: BilingualDictionary,
    src_frequency_rank: Mapping[str, int],
    n_train_src: int,
    n_test_src: int,
    seed: int = 42,
) -> Tuple[BilingualDictionary, BilingualDictionary]:
    """
    Split a dictionary by unique source word.

    The train side takes the ``n_train_src`` most frequent source words with
    all of their targets; the test side samples ``n_test_src`` source words
    uniformly (seeded) from the rest. Words without a rank sort after every
    ranked word, in dictionary order.

    Args:
        dictionary (BilingualDictionary): Full dictionary
        src_frequency_rank (Mapping[str, int]): Source word -> frequency rank
            (1 = most frequent)
        n_train_src (int): Unique source words for the train side
        n_test_src (int): Unique source words for the test side
        seed (int): Seed of the test-side sampler

    Returns:
        Tuple[BilingualDictionary, BilingualDictionary]: (train, test) with
            disjoint source words

    Raises:
        InsufficientWordsError: If fewer than n_train_src + n_test_src unique
            source words are available
    """
    if n_train_src <= 0 or n_test_src <= 0:
        raise ValueError("Split sizes must be positive")

    sources = dictionary.sources()
    if len(sources) < n_train_src + n_test_src:
        raise InsufficientWordsError(
            f"Need {n_train_src + n_test_src} unique source words, "
            f"dictionary has {len(sources)}"
        )

    unranked = len(sources) + max(src_frequency_rank.values(), default=0) + 1
    order = sorted(
        range(len(sources)),
        key=lambda i: (src_frequency_rank.get(sources[i], unranked), i),
    )
    ranked = [sources[i] for i in order]
    train_src = ranked[:n_train_src]
    remainder = ranked[n_train_src:]

    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(len(remainder), size=n_test_src, replace=False))
    test_src = [remainder[i] for i in picked]

    train = dictionary.restrict_sources(train_src)
    test = dictionary.restrict_sources(test_src)
    logger.info(
        f"Split {len(sources)} source words into {len(train_src)} train "
        f"({len(train)} pairs) and {len(test_src)} test ({len(test)} pairs)"
    )
    return train, test
