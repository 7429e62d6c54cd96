from typing import AbstractSet, Dict, List

import pandas as pd
from pydantic import BaseModel, Field, model_validator

from lexalign.induction.dictionary import BilingualDictionary
from lexalign.utils import setup_logger

logger = setup_logger("DictionaryStats")


class LanguageStats(BaseModel):
    """One side of a dictionary, as reported per language in the statistics table."""

    unique: int = Field(ge=0)
    total: int = Field(ge=0)
    unique_pct: float = Field(ge=0.0, le=100.0)
    unique_pct_no_stopwords: float = Field(ge=0.0, le=100.0)
    in_vocab: int = Field(ge=0)
    lookup_precision: float = Field(ge=0.0, le=100.0)

    @model_validator(mode="after")
    def _check_counts(self):
        if self.unique > self.total:
            raise ValueError(f"unique ({self.unique}) exceeds total ({self.total})")
        if self.in_vocab > self.unique:
            raise ValueError(f"in_vocab ({self.in_vocab}) exceeds unique ({self.unique})")
        return self


class DictionaryStats(BaseModel):
    """
    Coverage and redundancy figures of a bilingual dictionary.

    Percentages are in [0, 100]. ``joint_lookup_precision`` counts an entry
    only when both of its words are in their vocabularies. An empty
    dictionary yields zeros with ``is_empty`` set.
    """

    source: LanguageStats
    target: LanguageStats
    joint_lookup_precision: float = Field(ge=0.0, le=100.0)
    is_empty: bool = False

    def to_frame(
        self, dataset: str = "", src_lang: str = "src", tgt_lang: str = "tgt"
    ) -> pd.DataFrame:
        """One row per language, in the column order of the statistics table."""
        rows = []
        for lang, side in ((src_lang, self.source), (tgt_lang, self.target)):
            rows.append({
                "dataset": dataset,
                "language": lang,
                "unique": side.unique,
                "total": side.total,
                "unique_pct_with_stopwords": round(side.unique_pct, 2),
                "unique_pct_without_stopwords": round(side.unique_pct_no_stopwords, 2),
                "in_vocab": side.in_vocab,
                "lookup_precision_pct": round(side.lookup_precision, 2),
                "joint_lookup_precision_pct": round(self.joint_lookup_precision, 2),
            })
        return pd.DataFrame(rows)


def _pct(numerator: int, denominator: int) -> float:
    return 100.0 * numerator / denominator if denominator else 0.0


def _side_stats(
    words: List[str], vocab: AbstractSet[str], stopwords: AbstractSet[str]
) -> LanguageStats:
    unique = set(words)
    content = [w for w in words if w not in stopwords]
    in_vocab = sum(1 for w in unique if w in vocab)
    return LanguageStats(
        unique=len(unique),
        total=len(words),
        unique_pct=_pct(len(unique), len(words)),
        unique_pct_no_stopwords=_pct(len(set(content)), len(content)),
        in_vocab=in_vocab,
        lookup_precision=_pct(in_vocab, len(unique)),
    )


def compute_stats(
    dictionary: BilingualDictionary,
    src_vocab: AbstractSet[str],
    tgt_vocab: AbstractSet[str],
    src_stopwords: AbstractSet[str] = frozenset(),
    tgt_stopwords: AbstractSet[str] = frozenset(),
) -> DictionaryStats:
    """
    Compute unique-word ratios and lookup precision against two vocabularies.

    Per side, ``total`` is the number of entries and ``unique`` the number of
    distinct words on that side; the stop-word-free ratio drops the entries
    whose side word is a stop-word. Lookup precision is the share of a side's
    unique words found in its vocabulary (N_available / N_vocab).

    Args:
        dictionary (BilingualDictionary): Dictionary to describe
        src_vocab (AbstractSet[str]): Source embedding vocabulary
        tgt_vocab (AbstractSet[str]): Target embedding vocabulary
        src_stopwords (AbstractSet[str]): Source stop-words
        tgt_stopwords (AbstractSet[str]): Target stop-words

    Returns:
        DictionaryStats: Statistics for both sides and the joint coverage
    """
    src_words = [src for src, _ in dictionary.entries]
    tgt_words = [tgt for _, tgt in dictionary.entries]
    if not dictionary.entries:
        logger.warning("Statistics requested for an empty dictionary")

    both = sum(1 for s, t in dictionary.entries if s in src_vocab and t in tgt_vocab)
    stats = DictionaryStats(
        source=_side_stats(src_words, src_vocab, src_stopwords),
        target=_side_stats(tgt_words, tgt_vocab, tgt_stopwords),
        joint_lookup_precision=_pct(both, len(dictionary.entries)),
        is_empty=not dictionary.entries,
    )
    logger.info(
        f"P_L source {stats.source.lookup_precision:.2f}%, target "
        f"{stats.target.lookup_precision:.2f}%, joint {stats.joint_lookup_precision:.2f}%"
    )
    return stats


def stats_table(
    rows: Dict[str, DictionaryStats], src_lang: str = "src", tgt_lang: str = "tgt"
) -> pd.DataFrame:
    """Stack several datasets' statistics into one table, in insertion order."""
    frames = [rows[name].to_frame(name, src_lang, tgt_lang) for name in rows]
    return pd.concat(frames, ignore_index=True)
