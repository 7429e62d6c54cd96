import io
import math
from collections import Counter

import pytest

from lexalign.data import bijective_corpus
from lexalign.errors import DictionaryFormatError, InsufficientWordsError
from lexalign.induction import (
    BilingualDictionary,
    CooccurrenceTable,
    ParallelCorpus,
    compute_stats,
    count_cooccurrences,
    induce_condprob_dict,
    induce_ppmi_dict,
    ppmi,
    read_dictionary,
    split_train_test,
    stats_table,
    tokenize,
    write_dictionary,
)


def corpus(*pairs):
    return ParallelCorpus.from_lines([s for s, _ in pairs], [t for _, t in pairs])


def test_tokenize_nfc_and_case():
    assert tokenize("Café  Bar", lowercase=True) == ["café", "bar"]


def test_from_lines_lowercases_source_only():
    pc = ParallelCorpus.from_lines(["The Cat"], ["Die Katze"])
    assert pc.pairs == [(["the", "cat"], ["Die", "Katze"])]
    with pytest.raises(DictionaryFormatError):
        ParallelCorpus.from_lines(["a", "b"], ["x"])


def test_presence_based_counts():
    table = count_cooccurrences(corpus(("a b", "x"), ("a", "x y")))
    assert table.n_pairs == 2
    assert table.src_count["a"] == 2
    assert table.src_count["b"] == 1
    assert table.tgt_count["x"] == 2
    assert table.joint_count("a", "x") == 2
    assert table.joint_count("b", "y") == 0

    repeated = count_cooccurrences(corpus(("a a a", "x")))
    assert repeated.src_count["a"] == 1
    assert repeated.joint_count("a", "x") == 1


def test_stopwords_removed_before_counting():
    table = count_cooccurrences(corpus(("a b", "x"), ("a", "x")), src_stopwords={"a"})
    assert table.src_count["a"] == 0
    assert table.joint_count("a", "x") == 0
    assert table.n_pairs == 2


def test_joint_never_exceeds_marginals():
    table = count_cooccurrences(bijective_corpus(n_types=50, seed=3))
    for x, y, c in table.iter_joint():
        assert 1 <= c <= min(table.src_count[x], table.tgt_count[y]) <= table.n_pairs


def test_merge_adds_counts():
    one = count_cooccurrences(corpus(("a", "x")))
    two = count_cooccurrences(corpus(("a b", "x"), ("b", "y")))
    merged = one + two
    assert merged.n_pairs == 3
    assert merged.joint_count("a", "x") == 2
    assert merged.src_count == (two + one).src_count
    assert merged.joint_count("b", "y") == 1


def test_ppmi_symmetric_under_transpose():
    table = count_cooccurrences(bijective_corpus(n_types=50, repeats=3, seed=1))
    flipped = table.transposed()
    assert flipped.n_pairs == table.n_pairs
    assert flipped.src_count == table.tgt_count
    for x, y, c in table.iter_joint():
        assert flipped.joint_count(y, x) == c
        assert ppmi(flipped, y, x) == pytest.approx(ppmi(table, x, y))


def _pair_table():
    return count_cooccurrences(corpus(("x", "y"), ("x", "y"), ("p", "q"), ("p", "q")))


def test_ppmi_hand_values():
    assert ppmi(_pair_table(), "x", "y") == pytest.approx(1.0)
    assert ppmi(_pair_table(), "x", "q") == 0.0

    table = CooccurrenceTable()
    table.n_pairs = 4
    table.src_count["x"] = 4
    table.tgt_count["y"] = 4
    table.joint["x"] = Counter({"y": 1})
    assert ppmi(table, "x", "y") == 0.0


def test_induce_ppmi_threshold_and_gate():
    dictionary = induce_ppmi_dict(_pair_table(), threshold=0.5, min_joint=2)
    assert ("x", "y") in dictionary
    assert dictionary.scores[dictionary.entries.index(("x", "y"))] == pytest.approx(1.0)

    assert len(induce_ppmi_dict(_pair_table(), threshold=5.0)) == 0

    once = count_cooccurrences(corpus(("x", "y"), ("p", "q"), ("p", "q")))
    assert ("x", "y") not in induce_ppmi_dict(once, min_joint=2)


def test_condprob_hand_value():
    table = count_cooccurrences(corpus(("x", "y"), ("x", "y"), ("z", "y"), ("z", "y")))
    dictionary = induce_condprob_dict(table, min_joint=2, top_k=1)
    scores = dict(zip(dictionary.entries, dictionary.scores))
    assert scores[("x", "y")] == pytest.approx(0.5)
    assert len(induce_condprob_dict(table, min_joint=3)) == 0


def test_condprob_ranks_perfect_partner_first():
    table = count_cooccurrences(corpus(("a b", "x y"), ("a b", "x y"), ("b", "y")))
    dictionary = induce_condprob_dict(table, min_joint=2, top_k=1)
    assert dictionary.gold() == {"b": {"y"}, "a": {"x"}}


def test_bijective_corpus_recovery():
    table = count_cooccurrences(bijective_corpus(n_types=500, repeats=3, seed=42))
    truth = [(f"w{i}", f"x{i}") for i in range(500)]

    condprob = induce_condprob_dict(table, min_joint=2, top_k=1)
    assert sum(1 for pair in truth if pair in condprob) / 500 >= 0.99

    ppmi_dict = induce_ppmi_dict(table, threshold=0.0, min_joint=2)
    assert sum(1 for pair in truth if pair in ppmi_dict) / 500 >= 0.95


def test_read_dictionary_formats():
    text = "cat\tබළලා\ncat\tපූසා\ndog hound\n\ncat\tබළලා\n"
    dictionary = read_dictionary(io.StringIO(text))
    assert dictionary.entries == [("cat", "බළලා"), ("cat", "පූසා"), ("dog", "hound")]
    assert dictionary.gold()["cat"] == {"බළලා", "පූසා"}
    assert dictionary.sources() == ["cat", "dog"]

    scored = read_dictionary(io.StringIO("a\tx\t0.5\nb\ty\t0.25\n"))
    assert scored.scores == [0.5, 0.25]
    out = io.StringIO()
    write_dictionary(scored, out, with_scores=True)
    assert out.getvalue() == "a\tx\t0.500000\nb\ty\t0.250000\n"

    with pytest.raises(DictionaryFormatError):
        read_dictionary(io.StringIO("only-one-column\n"))


def test_read_dictionary_scores_decided_per_file():
    dictionary = read_dictionary(io.StringIO("a\tx\nb\ty\t0.25\nc\tz\n"))
    assert dictionary.entries == [("a", "x"), ("b", "y"), ("c", "z")]
    assert math.isnan(dictionary.scores[0])
    assert dictionary.scores[1] == 0.25
    assert math.isnan(dictionary.scores[2])

    assert read_dictionary(io.StringIO("a\tx\nb\ty\n")).scores is None
    with pytest.raises(DictionaryFormatError):
        read_dictionary(io.StringIO("a\tx\nb\ty\tnot-a-number\n"))


def test_inverted_dictionary():
    dictionary = BilingualDictionary([("a", "x"), ("b", "x")])
    assert dictionary.inverted().gold() == {"x": {"a", "b"}}


def test_stats_unique_ratio_from_table_one():
    entries = [(f"s{i % 36713}", f"t{i}") for i in range(67404)]
    stats = compute_stats(BilingualDictionary(entries), set(), set())
    assert stats.source.unique == 36713
    assert stats.source.total == 67404
    assert round(stats.source.unique_pct, 2) == 54.47


def test_stats_lookup_precision():
    single = compute_stats(BilingualDictionary([("a", "x")]), {"a"}, set())
    assert single.source.lookup_precision == 100.0

    pair = compute_stats(BilingualDictionary([("a", "x"), ("b", "y")]), {"a", "b"}, {"x"})
    assert pair.joint_lookup_precision == 50.0
    assert pair.target.in_vocab == 1


def test_stats_without_stopwords():
    dictionary = BilingualDictionary([("the", "x"), ("cat", "y"), ("cat", "z")])
    stats = compute_stats(dictionary, set(), set(), src_stopwords={"the"})
    assert stats.source.unique_pct == pytest.approx(200 / 3)
    assert stats.source.unique_pct_no_stopwords == pytest.approx(50.0)


def test_stats_empty_dictionary():
    stats = compute_stats(BilingualDictionary(), {"a"}, {"x"})
    assert stats.is_empty
    assert stats.source.unique_pct == 0.0
    assert stats.joint_lookup_precision == 0.0


def test_stats_table_layout():
    stats = compute_stats(BilingualDictionary([("a", "x")]), {"a"}, {"x"})
    table = stats_table({"tiny": stats}, "en", "si")
    assert list(table["language"]) == ["en", "si"]
    assert list(table["dataset"]) == ["tiny", "tiny"]
    assert table["lookup_precision_pct"].tolist() == [100.0, 100.0]


def test_split_by_frequency():
    words = [f"w{i}" for i in range(1, 11)]
    dictionary = BilingualDictionary((w, w.upper()) for w in reversed(words))
    ranks = {w: i for i, w in enumerate(words, start=1)}
    train, test = split_train_test(dictionary, ranks, n_train_src=5, n_test_src=2, seed=42)

    assert set(train.sources()) == set(words[:5])
    assert len(test.sources()) == 2
    assert set(test.sources()) <= set(words[5:])
    assert not set(train.sources()) & set(test.sources())

    again = split_train_test(dictionary, ranks, 5, 2, seed=42)[1]
    assert again.entries == test.entries


def test_split_needs_enough_words():
    dictionary = BilingualDictionary([("a", "x"), ("b", "y")])
    with pytest.raises(InsufficientWordsError):
        split_train_test(dictionary, {"a": 1, "b": 2}, 2, 1)
