import unicodedata
from pathlib import Path
from typing import Iterable, List, Set, Tuple, Union

from lexalign.errors import DictionaryFormatError, InputMissingError
from lexalign.utils import setup_logger

logger = setup_logger("ParallelCorpus")

Segment = List[str]


def tokenize(text: str, lowercase: bool = False) -> Segment:
    """NFC-normalize, optionally lowercase, and split on whitespace."""
    text = unicodedata.normalize("NFC", text)
    if lowercase:
        text = text.lower()
    return text.split()


class ParallelCorpus:
    """
    Segment-aligned parallel text: pair ``i`` holds the source and target
    tokens of one aligned segment. Either side may be empty.
    """

    def __init__(self, pairs: Iterable[Tuple[Segment, Segment]] = ()):
        self.pairs: List[Tuple[Segment, Segment]] = [
            (list(src), list(tgt)) for src, tgt in pairs
        ]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @classmethod
    def from_lines(
        cls,
        src_lines: Iterable[str],
        tgt_lines: Iterable[str],
        lowercase_src: bool = True,
        lowercase_tgt: bool = False,
    ) -> "ParallelCorpus":
        """
        Build a corpus from two line-aligned text sequences.

        The source side (Latin script in the En-Si setting) is lowercased by
        default; the target side is only NFC-normalized.
        """
        src_lines = list(src_lines)
        tgt_lines = list(tgt_lines)
        if len(src_lines) != len(tgt_lines):
            raise DictionaryFormatError(
                f"Parallel sides differ in length: {len(src_lines)} vs {len(tgt_lines)} lines"
            )
        return cls(
            (tokenize(s, lowercase_src), tokenize(t, lowercase_tgt))
            for s, t in zip(src_lines, tgt_lines)
        )


def _read_lines(path: Union[str, Path]) -> List[str]:
    path = Path(path)
    if not path.is_file():
        raise InputMissingError(path)
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()


def read_parallel_files(
    src_path: Union[str, Path],
    tgt_path: Union[str, Path],
    lowercase_src: bool = True,
    lowercase_tgt: bool = False,
) -> ParallelCorpus:
    """Read an OPUS-style corpus: line ``i`` of both files is one segment pair."""
    corpus = ParallelCorpus.from_lines(
        _read_lines(src_path), _read_lines(tgt_path), lowercase_src, lowercase_tgt
    )
    logger.info(f"Read {len(corpus)} segment pairs from {src_path} / {tgt_path}")
    return corpus


def read_tsv_corpus(
    path: Union[str, Path], lowercase_src: bool = True, lowercase_tgt: bool = False
) -> ParallelCorpus:
    """Read a corpus stored as one ``source<TAB>target`` segment pair per line."""
    src_lines, tgt_lines = [], []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DictionaryFormatError(
                f"{path}:{lineno}: expected 2 tab-separated columns, got {len(parts)}"
            )
        src_lines.append(parts[0])
        tgt_lines.append(parts[1])
    corpus = ParallelCorpus.from_lines(src_lines, tgt_lines, lowercase_src, lowercase_tgt)
    logger.info(f"Read {len(corpus)} segment pairs from {path}")
    return corpus


def read_stopwords(path: Union[str, Path], lowercase: bool = False) -> Set[str]:
    """One stop-word per line; blank lines and ``#`` comments are ignored."""
    words = set()
    for line in _read_lines(path):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(tokenize(line, lowercase)[0])
    return words
