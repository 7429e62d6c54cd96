"""Small builders shared by the test modules."""
import numpy as np

from lexalign.alignment import AnchorSet
from lexalign.embeddings import EmbeddingSpace, normalize


def unit_rows(rng, n, d):
    rows = rng.standard_normal((n, d))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def make_space(matrix, prefix="w", normalized=True):
    space = EmbeddingSpace([f"{prefix}{i}" for i in range(len(matrix))], matrix)
    return normalize(space) if normalized else space


def make_anchors(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return AnchorSet(X, Y, [(f"s{i}", f"t{i}") for i in range(len(X))])


def write_vec(path, words, matrix):
    lines = [f"{len(words)} {matrix.shape[1]}"]
    lines += [w + " " + " ".join(repr(float(x)) for x in row) for w, row in zip(words, matrix)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
