import numpy as np
import pytest
from numpy.testing import assert_allclose

from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import EvaluationError, NeighborhoodSizeError
from lexalign.induction import BilingualDictionary
from lexalign.retrieval import (
    CSLS,
    NN,
    RetrievalResult,
    bucket_labels,
    csls_retrieve,
    evaluate_direction,
    mutual_nearest_pairs,
    nn_retrieve,
    precision_at_k,
    reports_frame,
    retrieval_distribution,
    retrieve,
    row_chunks,
    top_k,
)
from lexalign.retrieval import search as search_module

from helpers import make_space, unit_rows


def _at(degrees):
    rad = np.deg2rad(degrees)
    return [np.cos(rad), np.sin(rad)]


def _ranked(query, candidates):
    return RetrievalResult(
        [query],
        candidates,
        np.arange(len(candidates))[np.newaxis, :],
        -np.arange(len(candidates), dtype=float)[np.newaxis, :],
        NN,
    )


# nearest neighbours


def test_nn_exact_match_ranks_first():
    pool = EmbeddingSpace(["x", "y"], [[1.0, 0.0], [0.0, 1.0]], is_l2_normalized=True)
    query = EmbeddingSpace(["q"], [[0.0, 1.0]], is_l2_normalized=True)
    result = nn_retrieve(query, pool, k=1)
    assert result.ranking(0) == [("y", 1.0)]


def test_nn_hand_scores():
    pool = EmbeddingSpace(["x", "y"], [[1.0, 0.0], [0.0, 1.0]], is_l2_normalized=True)
    query = EmbeddingSpace(["q"], [[0.8, 0.6]], is_l2_normalized=True)
    result = nn_retrieve(query, pool, k=2)
    assert result.candidates(0) == ["x", "y"]
    assert_allclose(result.scores[0], [0.8, 0.6])


def test_nn_full_depth_is_permutation(rng):
    pool = make_space(unit_rows(rng, 9, 4))
    result = nn_retrieve(make_space(unit_rows(rng, 3, 4), prefix="q"), pool, k=9)
    for row in result.indices:
        assert sorted(row) == list(range(9))
    assert np.all(np.diff(result.scores, axis=1) <= 0)


def test_nn_rejects_deep_rankings(rng):
    pool = make_space(unit_rows(rng, 3, 2))
    with pytest.raises(NeighborhoodSizeError):
        nn_retrieve(pool, pool, k=4)


def test_top_k_matches_full_sort(rng):
    scores = rng.standard_normal((40, 25))
    indices, values = top_k(scores, 6)
    expected = np.argsort(-scores, axis=1, kind="stable")[:, :6]
    assert np.array_equal(indices, expected)
    assert_allclose(values, np.take_along_axis(scores, expected, axis=1))


def test_top_k_ties_prefer_lower_index():
    indices, _ = top_k(np.array([[0.5, 0.9, 0.9, 0.9, 0.1]]), 2)
    assert indices.tolist() == [[1, 2]]


# CSLS


def test_csls_single_pair_scores_zero():
    space = EmbeddingSpace(["a"], [[1.0, 0.0]], is_l2_normalized=True)
    target = EmbeddingSpace(["x"], [[1.0, 0.0]], is_l2_normalized=True)
    result = csls_retrieve(space, target, space, k_rank=1, k_neighbors=1)
    assert result.candidates(0) == ["x"]
    assert result.scores[0, 0] == pytest.approx(0.0, abs=1e-12)


@pytest.fixture
def hub_case():
    queries = EmbeddingSpace(
        ["q1", "q2", "q3"], [_at(0), _at(90), _at(45)], is_l2_normalized=True
    )
    pool = EmbeddingSpace(["h", "a", "b"], [_at(45), _at(-50), _at(140)], is_l2_normalized=True)
    gold = BilingualDictionary([("q1", "a"), ("q2", "b")])
    return queries, pool, gold


def test_csls_demotes_hub(hub_case):
    queries, pool, gold = hub_case
    kwargs = dict(k_neighbors=1, ks=(1,), bucket_edges=(1,))
    nn = evaluate_direction(queries, pool, queries, gold, criterion=NN, **kwargs)
    csls = evaluate_direction(queries, pool, queries, gold, criterion=CSLS, **kwargs)
    assert nn.p(1) == 0.0
    assert csls.p(1) == 100.0


def test_csls_matches_brute_force():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        queries = make_space(unit_rows(rng, 3, 3), prefix="q")
        pool = make_space(unit_rows(rng, 3, 3), prefix="t")
        reverse = make_space(unit_rows(rng, 4, 3), prefix="r")
        k = int(rng.integers(1, 4))
        result = csls_retrieve(queries, pool, reverse, k_rank=3, k_neighbors=k)

        Q, T, R = queries.matrix, pool.matrix, reverse.matrix
        for i, q in enumerate(Q):
            r_q = np.mean(sorted(T @ q, reverse=True)[:k])
            expected = [
                2 * q @ t - r_q - np.mean(sorted(R @ t, reverse=True)[:k]) for t in T
            ]
            assert_allclose(
                result.scores[i], sorted(expected, reverse=True), atol=1e-10
            )


def test_csls_matches_nn_on_symmetric_pool():
    octagon = EmbeddingSpace(
        [f"t{i}" for i in range(8)], [_at(45 * i) for i in range(8)], is_l2_normalized=True
    )
    queries = EmbeddingSpace(
        ["q0", "q1", "q2"], [_at(10), _at(100), _at(200)], is_l2_normalized=True
    )
    nn = nn_retrieve(queries, octagon, k=8)
    csls = csls_retrieve(queries, octagon, octagon, k_rank=8, k_neighbors=3)
    assert np.array_equal(nn.indices, csls.indices)


def test_orthogonal_pool_vector_keeps_nn_order():
    rng = np.random.default_rng(11)
    flat = np.hstack([unit_rows(rng, 20, 5), np.zeros((20, 1))])
    axis = np.eye(6)[[5]]
    pool = make_space(flat, prefix="t")
    extended = make_space(np.vstack([flat, axis]), prefix="t")
    queries = make_space(np.hstack([unit_rows(rng, 15, 5), np.zeros((15, 1))]), prefix="q")

    before = nn_retrieve(queries, pool, k=20)
    after = nn_retrieve(queries, extended, k=21)
    for i in range(len(queries)):
        kept = [w for w in after.candidates(i) if w != "t20"]
        assert kept == before.candidates(i)


def test_csls_rejects_large_neighbourhood(rng):
    space = make_space(unit_rows(rng, 3, 2))
    with pytest.raises(NeighborhoodSizeError):
        csls_retrieve(space, space, space, k_rank=1, k_neighbors=4)


def test_retrieve_rejects_unknown_criterion(rng):
    space = make_space(unit_rows(rng, 3, 2))
    with pytest.raises(ValueError):
        retrieve(space, space, space, "cosine", k=1)


def test_thread_count_does_not_change_rankings():
    rng = np.random.default_rng(3)
    queries = make_space(unit_rows(rng, 1300, 8), prefix="q")
    pool = make_space(unit_rows(rng, 700, 8), prefix="t")
    one = csls_retrieve(queries, pool, queries, k_rank=5, threads=1)
    four = csls_retrieve(queries, pool, queries, k_rank=5, threads=4)
    assert np.array_equal(one.indices, four.indices)
    assert np.array_equal(one.scores, four.scores)


def test_blocks_bounded_by_pool_width():
    rows = search_module.block_rows(200000)
    assert 0 < rows * 200000 <= search_module.MAX_BLOCK_ENTRIES
    assert search_module.block_rows(10) == search_module.CHUNK_SIZE

    chunks = row_chunks(1000, width=200000)
    assert chunks[0].start == 0 and chunks[-1].stop == 1000
    assert all(a.stop == b.start for a, b in zip(chunks, chunks[1:]))
    assert max(c.stop - c.start for c in chunks) == rows


def test_small_blocks_do_not_change_rankings(monkeypatch):
    rng = np.random.default_rng(4)
    queries = make_space(unit_rows(rng, 40, 8), prefix="q")
    pool = make_space(unit_rows(rng, 60, 8), prefix="t")
    expected = csls_retrieve(queries, pool, queries, k_rank=5)
    monkeypatch.setattr(search_module, "MAX_BLOCK_ENTRIES", 7 * pool.n)
    blocked = csls_retrieve(queries, pool, queries, k_rank=5, threads=3)
    assert np.array_equal(expected.indices, blocked.indices)
    assert_allclose(expected.scores, blocked.scores)


# precision


def test_precision_multi_target_hit():
    report = precision_at_k(
        _ranked("q", ["y"]), BilingualDictionary([("q", "x"), ("q", "y")]), ks=(1,), bucket_edges=(1,)
    )
    assert report.p(1) == 100.0


def test_precision_rank_arithmetic():
    report = precision_at_k(
        _ranked("q", ["y", "z", "x", "u", "v", "w", "s", "r", "p", "o"]),
        BilingualDictionary([("q", "x")]),
    )
    assert report.precision == {1: 0.0, 5: 100.0, 10: 100.0}
    assert report.distribution == {"1": 0, "2-5": 1, "6-10": 0, "miss": 0}


def test_precision_errors():
    with pytest.raises(EvaluationError):
        precision_at_k(_ranked("q", ["x"]), BilingualDictionary([("other", "x")]), ks=(1,), bucket_edges=(1,))
    with pytest.raises(EvaluationError):
        precision_at_k(_ranked("q", ["x"]), BilingualDictionary([("q", "x")]))


def test_bucket_labels():
    assert bucket_labels() == ["1", "2-5", "6-10", "miss"]
    assert bucket_labels((1, 3)) == ["1", "2-3", "miss"]
    for edges in [(10, 5, 1), (1, 1), (0, 5), ()]:
        with pytest.raises(ValueError):
            bucket_labels(edges)


def test_evaluation_invariants_and_frames():
    rng = np.random.default_rng(5)
    src = make_space(unit_rows(rng, 60, 6), prefix="s")
    noisy = src.matrix + 0.3 * rng.standard_normal(src.matrix.shape)
    tgt = make_space(noisy, prefix="t")
    gold = BilingualDictionary((f"s{i}", f"t{i}") for i in range(60))
    back = gold.inverted()

    forward = evaluate_direction(src, tgt, src, gold, criterion=CSLS, direction="forward")
    backward = evaluate_direction(tgt, src, tgt, back, criterion=CSLS, direction="backward")
    for report in (forward, backward):
        assert report.p(1) <= report.p(5) <= report.p(10)
        assert sum(report.distribution.values()) == report.n_queries == 60

    frame = reports_frame([forward, backward])
    assert list(frame.columns) == ["direction", "criterion", "p1", "p5", "p10", "n_queries"]

    grid = retrieval_distribution(forward, backward)
    assert list(grid["direction"]) == ["forward", "backward"]
    assert grid[["1", "2-5", "6-10", "miss"]].sum(axis=1).tolist() == [60, 60]


def test_distribution_recount_from_rankings():
    rng = np.random.default_rng(11)
    src = make_space(unit_rows(rng, 80, 5), prefix="s")
    tgt = make_space(src.matrix + 0.4 * rng.standard_normal(src.matrix.shape), prefix="t")
    gold = BilingualDictionary((f"s{i}", f"t{i}") for i in range(80))
    report = evaluate_direction(src, tgt, src, gold, criterion=NN)

    ranks = []
    for i in range(80):
        order = np.argsort(-(tgt.matrix @ src.matrix[i]), kind="stable")
        ranks.append(int(np.flatnonzero(order == i)[0]) + 1)
    expected = {
        "1": sum(r == 1 for r in ranks),
        "2-5": sum(2 <= r <= 5 for r in ranks),
        "6-10": sum(6 <= r <= 10 for r in ranks),
        "miss": sum(r > 10 for r in ranks),
    }
    assert report.distribution == expected


def test_perfect_retrieval_fills_first_bucket(noiseless_fixture):
    from lexalign.alignment import LinearMap, apply_map
    from lexalign.embeddings import normalize

    linear_map = LinearMap(noiseless_fixture.Q, is_orthogonal=True)
    mapped = normalize(apply_map(linear_map, noiseless_fixture.src))
    tgt = normalize(noiseless_fixture.tgt)
    report = evaluate_direction(mapped, tgt, mapped, noiseless_fixture.test, criterion=CSLS)
    assert report.precision == {1: 100.0, 5: 100.0, 10: 100.0}
    assert report.distribution["1"] == report.n_queries == 200


def test_oov_queries_dropped_and_counted(rng):
    space = make_space(unit_rows(rng, 4, 3))
    gold = BilingualDictionary([("w0", "w0"), ("zz", "w1")])
    report = evaluate_direction(space, space, space, gold, criterion=NN, ks=(1,), bucket_edges=(1,))
    assert report.n_oov == 1
    assert report.n_queries == 1

    with pytest.raises(EvaluationError):
        evaluate_direction(space, space, space, BilingualDictionary([("zz", "w0")]), ks=(1,))


# mutual nearest neighbours


def test_mutual_pairs_identity(rng):
    rows = unit_rows(rng, 30, 6)
    for criterion in (NN, CSLS):
        pairs = mutual_nearest_pairs(rows, rows, criterion=criterion, k_neighbors=1)
        assert pairs == [(i, i) for i in range(30)]


def test_mutual_pairs_hand_case():
    src = np.array([[1.0, 0.0], [0.9, np.sqrt(1 - 0.81)]])
    tgt = np.array([[1.0, 0.0]])
    assert mutual_nearest_pairs(src, tgt, criterion=NN) == [(0, 0)]
    assert mutual_nearest_pairs(src, np.empty((0, 2)), criterion=NN) == []
