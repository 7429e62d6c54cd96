from pathlib import Path
from typing import Union

import numpy as np
from scipy.linalg import qr

from lexalign.alignment import LinearMap, save_matrix
from lexalign.embeddings import EmbeddingSpace, save_vec_file
from lexalign.errors import InsufficientWordsError
from lexalign.induction import BilingualDictionary, ParallelCorpus, write_dictionary_file
from lexalign.utils import setup_logger

logger = setup_logger("SyntheticFixture")

SRC_VEC = "src.vec"
TGT_VEC = "tgt.vec"
TRAIN_DICT = "train.tsv"
TEST_DICT = "test.tsv"
ROTATION = "Q.txt"


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian with R's signs folded in."""
    Q, R = qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


class RotationFixture:
    """
    A source space, its rotated (and optionally noisy) copy, and the
    identity-pairing dictionaries between them.

    Word ``s{i}`` translates to ``t{i}``; ``tgt = src @ Q.T + noise``.
    """

    def __init__(
        self,
        n: int = 1000,
        d: int = 50,
        noise: float = 0.0,
        seed: int = 42,
        n_train: int = 500,
        n_test: int = 200,
    ):
        if n <= 0 or d <= 0:
            raise ValueError(f"Fixture needs positive n and d, got n={n}, d={d}")
        if noise < 0:
            raise ValueError(f"noise must be >= 0, got {noise}")
        if n_train + n_test > n:
            raise InsufficientWordsError(
                f"{n_train} train + {n_test} test pairs need n >= {n_train + n_test}, got {n}"
            )
        self.n, self.d, self.noise, self.seed = n, d, noise, seed

        rng = np.random.default_rng(seed)
        src = rng.standard_normal((n, d))
        src /= np.linalg.norm(src, axis=1, keepdims=True)
        self.Q = random_rotation(d, rng)
        tgt = src @ self.Q.T
        if noise > 0:
            tgt = tgt + noise * rng.standard_normal((n, d))

        self.src = EmbeddingSpace([f"s{i}" for i in range(n)], src, lang_tag="src")
        self.tgt = EmbeddingSpace([f"t{i}" for i in range(n)], tgt, lang_tag="tgt")
        self.train = BilingualDictionary((f"s{i}", f"t{i}") for i in range(n_train))
        self.test = BilingualDictionary(
            (f"s{i}", f"t{i}") for i in range(n_train, n_train + n_test)
        )

    def write(self, out_dir: Union[str, Path]) -> Path:
        """Write both spaces, both dictionaries and Q (with its ``.meta``)."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_vec_file(self.src, out_dir / SRC_VEC)
        save_vec_file(self.tgt, out_dir / TGT_VEC)
        write_dictionary_file(self.train, out_dir / TRAIN_DICT)
        write_dictionary_file(self.test, out_dir / TEST_DICT)
        save_matrix(
            LinearMap(
                self.Q,
                is_orthogonal=True,
                method="ground_truth",
                hyperparameters={"noise": self.noise, "seed": self.seed},
            ),
            out_dir / ROTATION,
        )
        logger.info(
            f"Wrote n={self.n}, d={self.d}, noise={self.noise} fixture to {out_dir}"
        )
        return out_dir


def bijective_corpus(
    n_types: int = 500, repeats: int = 3, segment_len: int = 5, seed: int = 42
) -> ParallelCorpus:
    """
    Parallel corpus where source word ``w{i}`` always co-occurs with target
    word ``x{i}``.

    Every type occurs ``repeats`` times; tokens are shuffled into segments of
    ``segment_len`` and the target segment is the translated, reshuffled
    source segment.
    """
    rng = np.random.default_rng(seed)
    tokens = np.repeat(np.arange(n_types), repeats)
    rng.shuffle(tokens)
    pairs = []
    for start in range(0, len(tokens), segment_len):
        ids = tokens[start:start + segment_len]
        tgt_ids = rng.permutation(ids)
        pairs.append(([f"w{i}" for i in ids], [f"x{i}" for i in tgt_ids]))
    return ParallelCorpus(pairs)
