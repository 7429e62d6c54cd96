from .cooccurrence import CooccurrenceTable, count_cooccurrences, ppmi
from .corpus import (
    ParallelCorpus,
    read_parallel_files,
    read_stopwords,
    read_tsv_corpus,
    tokenize,
)
from .dictionary import (
    BilingualDictionary,
    read_dictionary,
    read_dictionary_file,
    split_train_test,
    write_dictionary,
    write_dictionary_file,
)
from .inducers import (
    INDUCERS,
    BaseDictionaryInducer,
    CondProbInducer,
    PpmiInducer,
    induce_condprob_dict,
    induce_ppmi_dict,
)
from .stats import DictionaryStats, LanguageStats, compute_stats, stats_table

__all__ = [
    'BaseDictionaryInducer',
    'BilingualDictionary',
    'CondProbInducer',
    'CooccurrenceTable',
    'DictionaryStats',
    'INDUCERS',
    'LanguageStats',
    'ParallelCorpus',
    'PpmiInducer',
    'compute_stats',
    'count_cooccurrences',
    'induce_condprob_dict',
    'induce_ppmi_dict',
    'ppmi',
    'read_dictionary',
    'read_dictionary_file',
    'read_parallel_files',
    'read_stopwords',
    'read_tsv_corpus',
    'split_train_test',
    'stats_table',
    'tokenize',
    'write_dictionary',
    'write_dictionary_file'
]
