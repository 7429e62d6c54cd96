import io

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lexalign.embeddings import (
    EmbeddingSpace,
    load_vec,
    load_vec_file,
    normalize,
    read_vocabulary,
    restrict_top_n,
    save_vec,
)
from lexalign.errors import InputMissingError, VecFormatError

from helpers import make_space, unit_rows


def test_load_minimal_file(cat_dog):
    assert cat_dog.n == 2
    assert cat_dog.dim == 3
    assert cat_dog.words == ["cat", "dog"]
    assert_allclose(cat_dog["dog"], [0, 1, 0])
    assert not cat_dog.is_l2_normalized
    assert not cat_dog.is_centered


def test_load_with_limit(cat_dog_vec):
    space = load_vec(io.StringIO(cat_dog_vec), limit=1)
    assert space.words == ["cat"]


def test_duplicate_word_keeps_first_row():
    space = load_vec(io.StringIO("2 2\na 1 0\na 0 1\n"))
    assert space.n == 1
    assert space.duplicates == 1
    assert_allclose(space["a"], [1, 0])


def test_header_mismatch_trusts_rows():
    space = load_vec(io.StringIO("5 2\na 1 0\nb 0 1\n"))
    assert space.words == ["a", "b"]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2\ncat 1 0\n",
        "two 3\ncat 1 0 0\n",
        "1 3\ncat 1 0\n",
        "1 2\ncat 1 x\n",
        "1 2\ncat 1 nan\n",
        "1 2\ncat inf 0\n",
    ],
)
def test_malformed_input_raises(text):
    with pytest.raises(VecFormatError):
        load_vec(io.StringIO(text))


def test_missing_file_raises(tmp_path):
    with pytest.raises(InputMissingError) as info:
        load_vec_file(tmp_path / "absent.vec")
    assert "absent.vec" in str(info.value)


def test_read_vocabulary_only_words(cat_dog_vec):
    assert read_vocabulary(io.StringIO(cat_dog_vec)) == ["cat", "dog"]
    assert read_vocabulary(io.StringIO(cat_dog_vec), limit=1) == ["cat"]


def test_save_format_and_round_trip(cat_dog, rng):
    out = io.StringIO()
    save_vec(cat_dog, out)
    assert out.getvalue().startswith("2 3\ncat ")

    space = make_space(rng.standard_normal((20, 7)), normalized=False)
    out = io.StringIO()
    save_vec(space, out)
    back = load_vec(io.StringIO(out.getvalue()))
    assert back.words == space.words
    assert np.max(np.abs(back.matrix - space.matrix)) < 1e-6


def test_save_empty_space():
    out = io.StringIO()
    save_vec(EmbeddingSpace([], np.empty((0, 4))), out)
    assert out.getvalue() == "0 4\n"


def test_normalize_scales_rows():
    space = normalize(EmbeddingSpace(["a"], [[3.0, 4.0]]))
    assert_allclose(space["a"], [0.6, 0.8])
    assert space.is_l2_normalized


def test_normalize_symmetric_data_centering_is_identity():
    space = normalize(EmbeddingSpace(["a", "b"], [[1.0, 0.0], [-1.0, 0.0]]), center=True)
    assert_allclose(space.matrix, [[1, 0], [-1, 0]])
    assert space.is_centered


def test_normalize_centers_before_scaling():
    space = normalize(EmbeddingSpace(["a", "b"], [[2.0, 0.0], [0.0, 2.0]]), center=True)
    h = np.sqrt(2) / 2
    assert_allclose(space.matrix, [[h, -h], [-h, h]])


def test_normalize_rejects_zero_rows():
    with pytest.raises(VecFormatError):
        normalize(EmbeddingSpace(["a", "b"], [[1.0, 1.0], [1.0, 1.0]]), center=True)


def test_normalize_idempotent_and_dot_is_cosine(rng):
    raw = rng.standard_normal((15, 6))
    once = normalize(make_space(raw, normalized=False))
    twice = normalize(once)
    assert_allclose(once.matrix, twice.matrix, atol=1e-9)

    cos = (raw @ raw.T) / np.outer(np.linalg.norm(raw, axis=1), np.linalg.norm(raw, axis=1))
    assert_allclose(once.matrix @ once.matrix.T, cos, atol=1e-9)


def test_restrict_top_n(rng):
    space = make_space(unit_rows(rng, 5, 3))
    assert restrict_top_n(space, 3).words == ["w0", "w1", "w2"]

    whole = restrict_top_n(space, 10)
    assert whole.n == 5
    assert whole.shortfall == 5

    with pytest.raises(ValueError):
        restrict_top_n(space, 0)


def test_space_is_read_only(cat_dog):
    assert not cat_dog.matrix.flags.writeable
    with pytest.raises(ValueError):
        cat_dog.matrix[0, 0] = 5.0


def test_space_rejects_duplicates_and_bad_flags():
    with pytest.raises(VecFormatError):
        EmbeddingSpace(["a", "a"], np.eye(2))
    with pytest.raises(VecFormatError):
        EmbeddingSpace(["a"], [[2.0, 0.0]], is_l2_normalized=True)


def test_subset_keeps_requested_order(rng):
    space = make_space(unit_rows(rng, 4, 2))
    picked = space.subset(["w2", "zz", "w0", "w2"])
    assert picked.words == ["w2", "w0"]
    assert_allclose(picked["w0"], space["w0"])
    assert picked.is_l2_normalized
