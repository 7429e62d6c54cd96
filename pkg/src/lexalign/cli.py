import argparse
import logging
import sys
from functools import reduce
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from lexalign.alignment import (
    METHODS,
    RCSLS_GRID_CONFIG,
    AnchorSet,
    LeastSquaresAligner,
    LinearMap,
    ProcrustesAligner,
    RcslsAligner,
    apply_map,
    build_anchors,
    load_matrix,
    refine,
    save_matrix,
)
from lexalign.data import RotationFixture
from lexalign.embeddings import (
    EmbeddingSpace,
    load_vec_file,
    normalize,
    read_vocabulary_file,
    restrict_top_n,
    save_vec_file,
)
from lexalign.errors import (
    EmptyAnchorsError,
    EvaluationError,
    InputMissingError,
    LexAlignError,
)
from lexalign.induction import (
    INDUCERS,
    BilingualDictionary,
    compute_stats,
    count_cooccurrences,
    read_dictionary_file,
    read_parallel_files,
    read_stopwords,
    read_tsv_corpus,
    split_train_test,
    stats_table,
    write_dictionary_file,
)
from lexalign.retrieval import (
    CRITERIA,
    CSLS,
    bucket_labels,
    evaluate_direction,
    reports_frame,
    retrieval_distribution,
    retrieve,
)
from lexalign.utils import LOG_FORMAT, set_debug_mode, setup_logger

logger = setup_logger("lexalign")

DEFAULT_SEED = 42
DEFAULT_TOP_N = 200000

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_MISSING = 2
EXIT_EMPTY_ANCHORS = 3
EXIT_EVALUATION = 4

FORWARD = "forward"
BACKWARD = "backward"
BOTH = "both"


class RunConfig(BaseModel):
    """Flags of one subcommand run that every stage depends on."""

    command: str
    inputs: List[Path] = Field(default_factory=list)
    outputs: List[Path] = Field(default_factory=list)
    seed: int = DEFAULT_SEED
    threads: int = Field(default=1, ge=1)
    center: bool = False
    top_n: int = Field(default=DEFAULT_TOP_N, ge=1)

    def check_paths(self) -> None:
        """Fail on the first missing input before any work starts."""
        for path in self.inputs:
            if not path.is_file():
                raise InputMissingError(path)
        for path in self.outputs:
            path.parent.mkdir(parents=True, exist_ok=True)


def _run_config(
    args: argparse.Namespace, inputs: Sequence[Optional[Path]], outputs: Sequence[Optional[Path]]
) -> RunConfig:
    config = RunConfig(
        command=args.command,
        inputs=[p for p in inputs if p is not None],
        outputs=[p for p in outputs if p is not None],
        seed=args.seed,
        threads=args.threads,
        center=getattr(args, "center", False),
        top_n=getattr(args, "top_n", DEFAULT_TOP_N),
    )
    config.check_paths()
    logger.debug(f"Run config: {config.model_dump_json()}")
    return config


def _float_list(value: str) -> List[float]:
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def _int_list(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _load_space(
    path: Path, center: bool, lang_tag: str, limit: Optional[int] = None
) -> EmbeddingSpace:
    return normalize(load_vec_file(path, limit=limit, lang_tag=lang_tag), center=center)


def _mapped(linear_map: LinearMap, space: EmbeddingSpace) -> EmbeddingSpace:
    return normalize(apply_map(linear_map, space))


# induce


def cmd_induce(args: argparse.Namespace) -> int:
    src_corpora = args.src_corpus or []
    tgt_corpora = args.tgt_corpus or []
    tsv_corpora = args.tsv_corpus or []
    if len(src_corpora) != len(tgt_corpora):
        raise ValueError("--src-corpus and --tgt-corpus must be given the same number of times")
    if not src_corpora and not tsv_corpora:
        raise ValueError("No corpus given: use --src-corpus/--tgt-corpus or --tsv-corpus")

    stats_out = args.stats or args.out.with_name("stats.csv")
    _run_config(
        args,
        [*src_corpora, *tgt_corpora, *tsv_corpora, args.src_stopwords,
         args.tgt_stopwords, args.src_vec, args.tgt_vec],
        [args.out, stats_out],
    )

    lowercase_src = not args.keep_case
    src_stop = read_stopwords(args.src_stopwords, lowercase_src) if args.src_stopwords else set()
    tgt_stop = read_stopwords(args.tgt_stopwords) if args.tgt_stopwords else set()

    corpora = [read_parallel_files(s, t, lowercase_src) for s, t in zip(src_corpora, tgt_corpora)]
    corpora += [read_tsv_corpus(p, lowercase_src) for p in tsv_corpora]
    table = reduce(
        lambda acc, t: acc + t,
        (count_cooccurrences(c, src_stop, tgt_stop) for c in corpora),
    )

    if args.method == "ppmi":
        inducer = INDUCERS["ppmi"](args.threshold, args.min_joint, args.top_k, args.debug)
    else:
        inducer = INDUCERS["condprob"](args.min_joint, args.top_k or 1, args.debug)
    dictionary = inducer.induce(table)
    write_dictionary_file(dictionary, args.out, with_scores=args.with_scores)

    src_vocab = set(read_vocabulary_file(args.src_vec, args.vocab_limit)) if args.src_vec else set()
    tgt_vocab = set(read_vocabulary_file(args.tgt_vec, args.vocab_limit)) if args.tgt_vec else set()
    if not (args.src_vec and args.tgt_vec):
        logger.info("No vocabulary given for one side; its lookup precision is reported as 0")
    stats = compute_stats(dictionary, src_vocab, tgt_vocab, src_stop, tgt_stop)
    stats.to_frame(args.name or args.out.stem, args.src_lang, args.tgt_lang).to_csv(
        stats_out, index=False
    )
    logger.info(f"Wrote {args.out} and {stats_out}")
    return EXIT_OK


# align


def _rcsls_config(args: argparse.Namespace):
    updates = {"seed": args.seed, "spectral": args.spectral}
    for field, value in (
        ("learning_rates", args.lr),
        ("epochs", args.epochs),
        ("k_neighbors", args.k_neighbors),
        ("batch_size", args.batch_size),
        ("neighbor_refresh", args.neighbor_refresh),
    ):
        if value is not None:
            updates[field] = value
    return RCSLS_GRID_CONFIG.model_validate({**RCSLS_GRID_CONFIG.model_dump(), **updates})


def cmd_align(args: argparse.Namespace) -> int:
    config = _run_config(
        args, [args.src, args.tgt, args.dict], [args.out, args.export_aligned]
    )
    src = _load_space(args.src, config.center, args.src_lang, args.max_vectors)
    tgt = _load_space(args.tgt, config.center, args.tgt_lang, args.max_vectors)
    dictionary = read_dictionary_file(args.dict)
    if args.reverse:
        src, tgt = tgt, src
        dictionary = dictionary.inverted()
        logger.info(f"Reversed: aligning {src.lang_tag} onto {tgt.lang_tag}")

    anchors: AnchorSet = build_anchors(dictionary, src, tgt)
    src_pool = restrict_top_n(src, config.top_n)
    tgt_pool = restrict_top_n(tgt, config.top_n)

    if args.method == "lstsq":
        aligner = LeastSquaresAligner(debug_mode=args.debug)
    elif args.method == "procrustes":
        aligner = ProcrustesAligner(debug_mode=args.debug)
    else:
        aligner = RcslsAligner(
            src_pool, tgt_pool, _rcsls_config(args), config.threads, args.debug
        )
    linear_map = aligner.fit(anchors)

    if args.refine:
        linear_map = refine(
            linear_map,
            src,
            tgt,
            iterations=args.refine_iterations,
            induce_top_n=args.refine_top_n,
            criterion=args.refine_criterion,
            k_neighbors=args.k_neighbors or RCSLS_GRID_CONFIG.k_neighbors,
            threads=config.threads,
        )

    linear_map.hyperparameters.update({
        "centered": config.center,
        "top_n": config.top_n,
        "anchors_used": anchors.m,
        "anchors_skipped": anchors.skipped,
        "reversed": args.reverse,
        "src_lang": src.lang_tag,
        "tgt_lang": tgt.lang_tag,
    })
    save_matrix(linear_map, args.out)
    if args.export_aligned:
        save_vec_file(apply_map(linear_map, src), args.export_aligned)
    return EXIT_OK


# evaluate


def _directions(
    args: argparse.Namespace,
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    linear_map: LinearMap,
    test: BilingualDictionary,
    top_n: int,
) -> List[Tuple[str, EmbeddingSpace, EmbeddingSpace, EmbeddingSpace, BilingualDictionary]]:
    """(label, queries, pool, reverse pool, gold) per requested direction."""
    mapped_src = _mapped(linear_map, src)
    mapped_pool = restrict_top_n(mapped_src, top_n)
    tgt_pool = restrict_top_n(tgt, top_n)
    runs = []
    if args.direction in (FORWARD, BOTH):
        runs.append((f"{args.src_lang}->{args.tgt_lang}", mapped_src, tgt_pool, mapped_pool, test))
    if args.direction in (BACKWARD, BOTH):
        runs.append(
            (f"{args.tgt_lang}->{args.src_lang}", tgt, mapped_pool, tgt_pool, test.inverted())
        )
    return runs


def cmd_evaluate(args: argparse.Namespace) -> int:
    report_out = args.report or args.matrix.with_name("report.csv")
    distribution_out = args.distribution or report_out.with_name("distribution.csv")
    config = _run_config(
        args, [args.src, args.tgt, args.matrix, args.dict], [report_out, distribution_out]
    )
    buckets = tuple(args.buckets)
    bucket_labels(buckets)
    linear_map = load_matrix(args.matrix, transpose=args.transpose_matrix)
    src = _load_space(args.src, config.center, args.src_lang, args.max_vectors)
    tgt = _load_space(args.tgt, config.center, args.tgt_lang, args.max_vectors)
    test = read_dictionary_file(args.dict)
    if not len(test):
        raise EvaluationError(f"Test dictionary {args.dict} is empty")

    criteria = CRITERIA if args.criterion == BOTH else (args.criterion,)
    reports, grids = [], []
    for criterion in criteria:
        per_direction = [
            evaluate_direction(
                queries, pool, reverse_pool, gold,
                criterion=criterion,
                direction=label,
                k_neighbors=args.k_neighbors,
                bucket_edges=buckets,
                threads=config.threads,
            )
            for label, queries, pool, reverse_pool, gold in _directions(
                args, src, tgt, linear_map, test, config.top_n
            )
        ]
        reports.extend(per_direction)
        grids.append(retrieval_distribution(*per_direction))

    frame = reports_frame(reports)
    frame.to_csv(report_out, index=False)
    pd.concat(grids, ignore_index=True).to_csv(distribution_out, index=False)
    logger.info(f"Wrote {report_out} and {distribution_out}")
    print(frame.to_string(index=False))
    return EXIT_OK


# synth


def cmd_synth(args: argparse.Namespace) -> int:
    _run_config(args, [], [args.out_dir / "src.vec"])
    fixture = RotationFixture(
        n=args.n,
        d=args.d,
        noise=args.noise,
        seed=args.seed,
        n_train=args.n_train,
        n_test=args.n_test,
    )
    fixture.write(args.out_dir)
    return EXIT_OK


# split


def cmd_split(args: argparse.Namespace) -> int:
    _run_config(args, [args.dict, args.src], [args.train_out, args.test_out])
    dictionary = read_dictionary_file(args.dict)
    vocabulary = read_vocabulary_file(args.src, args.vocab_limit)
    ranks = {w: i + 1 for i, w in enumerate(vocabulary)}
    train, test = split_train_test(dictionary, ranks, args.n_train, args.n_test, args.seed)
    write_dictionary_file(train, args.train_out)
    write_dictionary_file(test, args.test_out)
    return EXIT_OK


# stats


def cmd_stats(args: argparse.Namespace) -> int:
    _run_config(
        args,
        [*args.dict, args.src_vec, args.tgt_vec, args.src_stopwords, args.tgt_stopwords],
        [args.out],
    )
    src_vocab = set(read_vocabulary_file(args.src_vec, args.vocab_limit)) if args.src_vec else set()
    tgt_vocab = set(read_vocabulary_file(args.tgt_vec, args.vocab_limit)) if args.tgt_vec else set()
    src_stop = read_stopwords(args.src_stopwords, lowercase=True) if args.src_stopwords else set()
    tgt_stop = read_stopwords(args.tgt_stopwords) if args.tgt_stopwords else set()

    rows = {}
    for path in args.dict:
        rows[path.stem] = compute_stats(
            read_dictionary_file(path), src_vocab, tgt_vocab, src_stop, tgt_stop
        )
    table = stats_table(rows, args.src_lang, args.tgt_lang)
    table.to_csv(args.out, index=False)
    print(table.to_string(index=False))
    return EXIT_OK


# translate


def cmd_translate(args: argparse.Namespace) -> int:
    config = _run_config(args, [args.src, args.tgt, args.matrix, args.words_file], [args.out])
    words = list(args.words or [])
    if args.words_file:
        with open(args.words_file, "r", encoding="utf-8") as f:
            words += [line.strip() for line in f if line.strip()]
    if not words:
        raise ValueError("No words to translate: use --words or --words-file")

    linear_map = load_matrix(args.matrix, transpose=args.transpose_matrix)
    src = _load_space(args.src, config.center, args.src_lang, args.max_vectors)
    tgt = _load_space(args.tgt, config.center, args.tgt_lang, args.max_vectors)
    mapped = _mapped(linear_map, src)
    queries = mapped.subset(words)
    missing = [w for w in words if w not in mapped]
    if missing:
        logger.warning(f"{len(missing)} words out of vocabulary: {', '.join(missing[:10])}")
    if not queries.n:
        raise EvaluationError("None of the words to translate is in the source vocabulary")

    tgt_pool = restrict_top_n(tgt, config.top_n)
    result = retrieve(
        queries,
        tgt_pool,
        restrict_top_n(mapped, config.top_n),
        args.criterion,
        args.k,
        args.k_neighbors,
        config.threads,
    )
    rows = [
        {"source": word, "rank": rank, "target": cand, "score": round(score, 6)}
        for i, word in enumerate(result.query_words)
        for rank, (cand, score) in enumerate(result.ranking(i), start=1)
    ]
    frame = pd.DataFrame(rows, columns=["source", "rank", "target", "score"])
    if args.out:
        frame.to_csv(args.out, sep="\t", index=False)
    else:
        frame.to_csv(sys.stdout, sep="\t", index=False)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="Seed for every random choice (default: 42)")
    parser.add_argument("--threads", type=int, default=1,
                        help="Worker threads for retrieval and neighbourhood search")
    parser.add_argument("--debug", action="store_true", help="Log at DEBUG level")


def _add_spaces(parser: argparse.ArgumentParser, with_top_n: bool = True) -> None:
    parser.add_argument("--src", type=Path, required=True, help="Source .vec file")
    parser.add_argument("--tgt", type=Path, required=True, help="Target .vec file")
    parser.add_argument("--src-lang", default="src", help="Source language label")
    parser.add_argument("--tgt-lang", default="tgt", help="Target language label")
    parser.add_argument("--max-vectors", type=int, default=None,
                        help="Read at most this many rows of each .vec file")
    parser.add_argument("--center", action="store_true",
                        help="Mean-center vectors before l2-normalization")
    if with_top_n:
        parser.add_argument("--top-n", type=int, default=DEFAULT_TOP_N,
                            help="Most frequent words used as retrieval pools")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexalign",
        description="Bilingual dictionary induction, embedding alignment and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("induce", help="Build a bilingual dictionary from parallel text")
    _add_common(p)
    p.add_argument("--method", choices=sorted(INDUCERS), default="condprob")
    p.add_argument("--src-corpus", type=Path, action="append",
                   help="Source side of a line-aligned corpus (repeatable)")
    p.add_argument("--tgt-corpus", type=Path, action="append",
                   help="Target side of a line-aligned corpus (repeatable)")
    p.add_argument("--tsv-corpus", type=Path, action="append",
                   help="Two-column source<TAB>target corpus (repeatable)")
    p.add_argument("--src-stopwords", type=Path)
    p.add_argument("--tgt-stopwords", type=Path)
    p.add_argument("--threshold", type=float, default=0.0, help="PPMI threshold")
    p.add_argument("--min-joint", type=int, default=2,
                   help="Minimum number of segment pairs a candidate must share")
    p.add_argument("--top-k", type=int, default=None,
                   help="Targets kept per source word (condprob default 1, ppmi all)")
    p.add_argument("--keep-case", action="store_true", help="Do not lowercase the source side")
    p.add_argument("--with-scores", action="store_true", help="Write a third score column")
    p.add_argument("--src-vec", type=Path, help="Source vocabulary for lookup precision")
    p.add_argument("--tgt-vec", type=Path, help="Target vocabulary for lookup precision")
    p.add_argument("--vocab-limit", type=int, default=None)
    p.add_argument("--name", default=None, help="Dataset label in the statistics table")
    p.add_argument("--src-lang", default="src")
    p.add_argument("--tgt-lang", default="tgt")
    p.add_argument("--out", type=Path, required=True, help="Dictionary TSV to write")
    p.add_argument("--stats", type=Path, help="Statistics CSV (default: stats.csv next to --out)")
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("align", help="Learn an alignment matrix from a seed dictionary")
    _add_common(p)
    _add_spaces(p)
    p.add_argument("--dict", type=Path, required=True, help="Training dictionary")
    p.add_argument("--method", choices=METHODS, default="procrustes")
    p.add_argument("--out", type=Path, required=True, help="Matrix file to write")
    p.add_argument("--refine", action="store_true", help="Refine with mutual nearest neighbours")
    p.add_argument("--refine-iterations", type=int, default=5)
    p.add_argument("--refine-top-n", type=int, default=10000)
    p.add_argument("--refine-criterion", choices=CRITERIA, default=CSLS)
    p.add_argument("--spectral", action="store_true",
                   help="RCSLS: project onto the unit spectral-norm ball after each step")
    p.add_argument("--lr", type=_float_list, default=None, help="RCSLS learning-rate grid")
    p.add_argument("--epochs", type=_int_list, default=None, help="RCSLS epoch grid")
    p.add_argument("--k-neighbors", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--neighbor-refresh", type=int, default=None)
    p.add_argument("--reverse", action="store_true",
                   help="Swap the roles of --src and --tgt and invert the dictionary")
    p.add_argument("--export-aligned", type=Path, help="Also write the mapped source .vec")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("evaluate", help="Word translation precision of an alignment")
    _add_common(p)
    _add_spaces(p)
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--dict", type=Path, required=True, help="Test dictionary")
    p.add_argument("--transpose-matrix", action="store_true",
                   help="The matrix file is stored in the column convention")
    p.add_argument("--criterion", choices=(*CRITERIA, BOTH), default=BOTH)
    p.add_argument("--direction", choices=(FORWARD, BACKWARD, BOTH), default=BOTH)
    p.add_argument("--k-neighbors", type=int, default=10)
    p.add_argument("--buckets", type=_int_list, default=[1, 5, 10],
                   help="Rank bucket edges of the distribution grid")
    p.add_argument("--report", type=Path)
    p.add_argument("--distribution", type=Path)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="Generate a rotated synthetic benchmark")
    _add_common(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--n-train", type=int, default=500)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="Split a dictionary into train and test by source frequency")
    _add_common(p)
    p.add_argument("--dict", type=Path, required=True)
    p.add_argument("--src", type=Path, required=True, help="Source .vec giving frequency order")
    p.add_argument("--vocab-limit", type=int, default=None)
    p.add_argument("--n-train", type=int, default=5000)
    p.add_argument("--n-test", type=int, default=1500)
    p.add_argument("--train-out", type=Path, required=True)
    p.add_argument("--test-out", type=Path, required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="Statistics table of one or more dictionaries")
    _add_common(p)
    p.add_argument("--dict", type=Path, action="append", required=True)
    p.add_argument("--src-vec", type=Path)
    p.add_argument("--tgt-vec", type=Path)
    p.add_argument("--vocab-limit", type=int, default=None)
    p.add_argument("--src-stopwords", type=Path)
    p.add_argument("--tgt-stopwords", type=Path)
    p.add_argument("--src-lang", default="src")
    p.add_argument("--tgt-lang", default="tgt")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("translate", help="Top-k translations of words through a matrix")
    _add_common(p)
    _add_spaces(p)
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--transpose-matrix", action="store_true")
    p.add_argument("--words", nargs="+")
    p.add_argument("--words-file", type=Path)
    p.add_argument("--criterion", choices=CRITERIA, default=CSLS)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--k-neighbors", type=int, default=10)
    p.add_argument("--out", type=Path, help="TSV to write instead of stdout")
    p.set_defaults(func=cmd_translate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO, format=LOG_FORMAT
    )
    set_debug_mode(args.debug)

    try:
        return args.func(args)
    except InputMissingError as e:
        code, message = EXIT_INPUT_MISSING, str(e)
    except EmptyAnchorsError as e:
        code, message = EXIT_EMPTY_ANCHORS, str(e)
    except EvaluationError as e:
        code, message = EXIT_EVALUATION, str(e)
    except (LexAlignError, ValueError, OSError) as e:
        code, message = EXIT_FAILURE, str(e)
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_FAILURE

    logger.error(f"{args.command} failed: {message}")
    print(f"lexalign {args.command}: error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
