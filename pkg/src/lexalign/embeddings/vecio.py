from pathlib import Path
from typing import IO, List, Optional, Tuple, Union

import numpy as np

from lexalign.embeddings.space import EmbeddingSpace
from lexalign.errors import InputMissingError, VecFormatError
from lexalign.utils import setup_logger

logger = setup_logger("VecIO")


def _parse_header(line: str) -> Tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise VecFormatError(f"Malformed header {line.strip()!r}: expected 'n d'")
    try:
        n, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise VecFormatError(f"Malformed header {line.strip()!r}: expected integers")
    if n < 0 or d <= 0:
        raise VecFormatError(f"Malformed header {line.strip()!r}: bad sizes")
    return n, d


def load_vec(
    stream: IO[str], limit: Optional[int] = None, lang_tag: str = ""
) -> EmbeddingSpace:
    """
    Parse a fastText ``.vec`` text stream.

    The first line is ``"n d"``; every following line is a word and its ``d``
    space-separated components. Duplicate words keep their first occurrence
    and later lines are skipped with a warning. A header row count that does
    not match the file is reported and the actual rows win.

    Args:
        stream (IO[str]): Text stream positioned at the header
        limit (Optional[int]): Keep at most this many words (file order)
        lang_tag (str): Label stored on the returned space

    Returns:
        EmbeddingSpace: The un-normalized space

    Raises:
        VecFormatError: On an empty stream, a malformed header, a row whose
            component count differs from d, or a non-finite component
    """
    if limit is not None and limit <= 0:
        raise ValueError(f"limit must be positive, got {limit}")

    header = stream.readline()
    if not header:
        raise VecFormatError("Empty .vec stream")
    declared_n, d = _parse_header(header)

    words: List[str] = []
    rows: List[np.ndarray] = []
    seen = set()
    duplicates = 0
    lines_read = 0
    truncated = False

    for lineno, line in enumerate(stream, start=2):
        line = line.rstrip("\r\n").rstrip(" ")
        if not line:
            continue
        if limit is not None and len(words) >= limit:
            truncated = True
            break
        lines_read += 1

        parts = line.split(" ")
        word = parts[0]
        if len(parts) - 1 != d:
            raise VecFormatError(
                f"Line {lineno}: {len(parts) - 1} components for {word!r}, expected {d}"
            )
        try:
            vector = np.array(parts[1:], dtype=np.float64)
        except ValueError:
            raise VecFormatError(f"Line {lineno}: non-numeric component for {word!r}")
        if not np.all(np.isfinite(vector)):
            raise VecFormatError(f"Line {lineno}: non-finite component for {word!r}")

        if word in seen:
            duplicates += 1
            logger.warning(f"Line {lineno}: duplicate word {word!r} skipped")
            continue
        seen.add(word)
        words.append(word)
        rows.append(vector)

    if not truncated and lines_read != declared_n:
        logger.warning(
            f"Header declares {declared_n} rows but the stream holds {lines_read}; "
            f"using the actual rows"
        )
    if duplicates:
        logger.warning(f"Skipped {duplicates} duplicate rows")

    matrix = np.vstack(rows) if rows else np.empty((0, d), dtype=np.float64)
    logger.info(f"Loaded {len(words)} vectors of dimension {d}")
    return EmbeddingSpace(words, matrix, lang_tag=lang_tag, duplicates=duplicates)


def read_vocabulary(stream: IO[str], limit: Optional[int] = None) -> List[str]:
    """
    Read only the word column of a ``.vec`` stream, in file order.

    Vectors are not parsed, which keeps vocabulary lookups over
    multi-million-row models cheap. Duplicates are kept once.
    """
    header = stream.readline()
    if not header:
        raise VecFormatError("Empty .vec stream")
    _parse_header(header)

    words: List[str] = []
    seen = set()
    for line in stream:
        if limit is not None and len(words) >= limit:
            break
        word = line.split(" ", 1)[0].rstrip("\r\n")
        if word and word not in seen:
            seen.add(word)
            words.append(word)
    return words


def save_vec(space: EmbeddingSpace, stream: IO[str]) -> None:
    """
    Write ``space`` in the format accepted by :func:`load_vec`.

    Components use Python's shortest round-trip float repr, so a reload
    reproduces the matrix exactly. Lines end with LF.
    """
    stream.write(f"{space.n} {space.dim}\n")
    for word, row in zip(space.words, space.matrix):
        stream.write(word + " " + " ".join(repr(x) for x in row.tolist()) + "\n")


def load_vec_file(
    path: Union[str, Path], limit: Optional[int] = None, lang_tag: str = ""
) -> EmbeddingSpace:
    path = Path(path)
    if not path.is_file():
        raise InputMissingError(path)
    logger.info(f"Reading vectors from {path}")
    with open(path, "r", encoding="utf-8", newline="") as f:
        return load_vec(f, limit=limit, lang_tag=lang_tag)


def read_vocabulary_file(path: Union[str, Path], limit: Optional[int] = None) -> List[str]:
    path = Path(path)
    if not path.is_file():
        raise InputMissingError(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        return read_vocabulary(f, limit=limit)


def save_vec_file(space: EmbeddingSpace, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        save_vec(space, f)
    logger.info(f"Wrote {space.n} vectors to {path}")
