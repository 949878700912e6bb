"""Command line interface.

Subcommands cover the whole pipeline: ``build-subwords`` turns a word
frequency list into a subword probability file, ``train`` fits subword
vectors to target embeddings, ``predict`` composes vectors for arbitrary
query words, ``segment`` prints top segmentations and subword weights,
``eval-ws``/``eval-affix`` run the evaluations, and ``bench`` measures
composition latency and the quadratic scaling of the lattice.

Exit codes: 0 success, 1 usage error, 2 data error.  Diagnostics go to
stderr; data goes to stdout or the requested output file.
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import io_formats, lattice
from .embedding_model import (
    PbosModel,
    SubwordEmbeddings,
    TrainConfig,
    Variant,
    train,
)
from .evaluation import evaluate_affix_dataset, filter_affix_dataset, word_similarity
from .subword_stats import build_table

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; this toolkit reserves
    2 for data errors and uses 1 for usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="pbos",
        description="Generalize pre-trained word embeddings to out-of-vocabulary "
        "words using only spellings.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser(
        "build-subwords",
        help="build a subword probability file from a word frequency list",
        formatter_class=fmt,
    )
    p.add_argument("--freqs", required=True, help="frequency list (word,count or word<TAB>count per line)")
    p.add_argument("--max-len", type=int, default=None, help="cap on counted subword length (default: unbounded)")
    p.add_argument("--prob-eps", type=float, default=0.01, help="fallback probability for unknown single characters")
    p.add_argument("--lowercase", action="store_true", help="lowercase words before counting")
    p.add_argument("--out", required=True, help="output subwords.tsv path")
    p.set_defaults(run=_cmd_build_subwords)

    p = sub.add_parser(
        "train",
        help="fit subword vectors to target embeddings",
        formatter_class=fmt,
    )
    p.add_argument("--target", required=True, help="target embeddings (word2vec text format)")
    p.add_argument("--subwords", required=True, help="subword probability file")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="pbos", help="composition variant")
    p.add_argument("--epochs", type=int, default=50, help="training epochs")
    p.add_argument("--lr", type=float, default=1.0, help="initial learning rate")
    p.add_argument("--lr-decay", action=argparse.BooleanOptionalAction, default=True,
                   help="decay the learning rate with the inverse square root of the epoch")
    p.add_argument("--bos-min-len", type=int, default=3, help="minimum n-gram length (bos variant)")
    p.add_argument("--bos-max-len", type=int, default=6, help="maximum n-gram length (bos variant)")
    p.add_argument("--bos-word-boundary", choices=["auto", "on", "off"], default="auto",
                   help="wrap words in boundary markers before n-gram extraction "
                        "(auto: on for bos, off otherwise)")
    p.add_argument("--prob-eps", type=float, default=None,
                   help="override the fallback probability stored in the subwords file")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for epoch shuffling")
    p.add_argument("--out", required=True, help="output model directory")
    p.set_defaults(run=_cmd_train)

    p = sub.add_parser(
        "predict",
        help="compose embedding vectors for query words",
        formatter_class=fmt,
    )
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--words", default=None, help="query words, one per line (default: stdin)")
    p.add_argument("--out", default=None, help="output embedding file (default: stdout)")
    p.set_defaults(run=_cmd_predict)

    p = sub.add_parser(
        "segment",
        help="print top segmentations and subword weights per word",
        formatter_class=fmt,
    )
    p.add_argument("--subwords", required=True, help="subword probability file")
    p.add_argument("--k", type=int, default=5, help="number of segmentations to print")
    p.add_argument("--m", type=int, default=5, help="number of weighted subwords to print")
    p.add_argument("words", nargs="+", help="words to segment")
    p.set_defaults(run=_cmd_segment)

    p = sub.add_parser(
        "eval-ws",
        help="word-similarity evaluation (Spearman correlation)",
        formatter_class=fmt,
    )
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--pairs", required=True, help="benchmark file (word1<TAB>word2<TAB>score)")
    p.add_argument("--norm-floor", type=float, default=1e-8,
                   help="pairs with a composed vector below this norm score 0")
    p.set_defaults(run=_cmd_eval_ws)

    p = sub.add_parser(
        "eval-affix",
        help="affix prediction evaluation (macro precision/recall/F1)",
        formatter_class=fmt,
    )
    p.add_argument("--subwords", required=True, help="subword probability file")
    p.add_argument("--data", required=True, help="instances file (word<TAB>label)")
    p.add_argument("--inventory", required=True, help="affix inventory file (label<TAB>prefix|suffix)")
    p.add_argument("--predictor", choices=["pbos", "random"], default="pbos", help="predictor to evaluate")
    p.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
    p.set_defaults(run=_cmd_eval_affix)

    p = sub.add_parser(
        "bench",
        help="measure composition latency and lattice scaling",
        formatter_class=fmt,
    )
    p.add_argument("--subwords", required=True, help="subword probability file")
    p.add_argument("--dim", type=int, default=300, help="embedding dimension for the compose benchmark")
    p.add_argument("--repeats", type=int, default=200, help="measurements per median")
    p.add_argument("--seed", type=int, default=0, help="seed for benchmark word generation")
    p.set_defaults(run=_cmd_bench)

    return parser


def _read_subwords(path: str):
    with open(path, encoding="utf-8") as fh:
        return io_formats.read_subwords(fh)


def _cmd_build_subwords(args) -> int:
    with open(args.freqs, encoding="utf-8") as fh:
        entries, skipped = io_formats.read_freqs(fh)
    if skipped:
        _info(f"skipped {skipped} malformed frequency lines")
    if args.lowercase:
        entries = [(word.lower(), count) for word, count in entries]
    table = build_table(entries, max_len=args.max_len, prob_eps=args.prob_eps)
    with open(args.out, "w", encoding="utf-8") as fh:
        io_formats.write_subwords(table, fh)
    _info(f"wrote {len(table)} subwords to {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    table = _read_subwords(args.subwords)
    if args.prob_eps is not None and args.prob_eps != table.prob_eps:
        from dataclasses import replace

        table = replace(table, prob_eps=args.prob_eps)
    with open(args.target, encoding="utf-8") as fh:
        targets = io_formats.read_embeddings(fh)
    if targets.duplicates_skipped:
        _info(f"skipped {targets.duplicates_skipped} duplicate target tokens")
    boundary = {"auto": None, "on": True, "off": False}[args.bos_word_boundary]
    config = TrainConfig(
        epochs=args.epochs,
        lr0=args.lr,
        lr_decay=args.lr_decay,
        variant=Variant(args.variant),
        bos_min_len=args.bos_min_len,
        bos_max_len=args.bos_max_len,
        bos_word_boundary=boundary,
        prob_eps=table.prob_eps,
        seed=args.seed,
    )
    model = train(
        targets, table, config,
        on_epoch=lambda epoch, value: print(f"{epoch}\t{value:.9g}"),
    )
    model.save(args.out)
    _info(f"saved model to {args.out}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = PbosModel.load(args.model)
    if args.words is None:
        lines = sys.stdin.read().splitlines()
    else:
        with open(args.words, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    words = list(dict.fromkeys(w.strip() for w in lines if w.strip()))
    if not words:
        raise ValueError("empty query word list")
    composed = {word: model.compose(word) for word in words}
    if args.out is None:
        io_formats.write_embeddings(composed, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            io_formats.write_embeddings(composed, fh)
    _info(f"composed {len(composed)} vectors")
    return EXIT_OK


def _cmd_segment(args) -> int:
    table = _read_subwords(args.subwords)
    for word in args.words:
        segmentations = lattice.top_k_segmentations(word, table, args.k)
        weights = lattice.subword_weights(word, table).weights
        top_subwords = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))[: args.m]
        seg_text = ", ".join(
            f"{'/'.join(seg)} ({prob:.3f})" for seg, prob in segmentations
        )
        sub_text = ", ".join(f"{sub} ({weight:.3f})" for sub, weight in top_subwords)
        print(f"{word}\t{seg_text}\t{sub_text}")
    return EXIT_OK


def _cmd_eval_ws(args) -> int:
    model = PbosModel.load(args.model)
    with open(args.pairs, encoding="utf-8") as fh:
        pairs, skipped = io_formats.read_similarity_pairs(fh)
    if not pairs:
        raise ValueError(f"no usable pairs in {args.pairs}")
    rho = word_similarity(model, pairs, norm_floor=args.norm_floor)
    _info(f"Spearman rho {rho:.4f} over {len(pairs)} pairs ({skipped} lines skipped)")
    print(f"pairs\t{len(pairs)}")
    print(f"skipped_lines\t{skipped}")
    print(f"spearman\t{rho:.6f}")
    return EXIT_OK


def _cmd_eval_affix(args) -> int:
    table = _read_subwords(args.subwords)
    with open(args.inventory, encoding="utf-8") as fh:
        inventory, bad_inventory = io_formats.read_affix_inventory(fh)
    if not inventory:
        raise ValueError(f"no usable affixes in {args.inventory}")
    with open(args.data, encoding="utf-8") as fh:
        instances, bad_instances = io_formats.read_affix_instances(fh, inventory)
    kept = filter_affix_dataset(instances, inventory)
    if not kept:
        raise ValueError("no instances remain after filtering")
    precision, recall, f1 = evaluate_affix_dataset(
        kept, inventory, predictor=args.predictor, table=table, seed=args.seed
    )
    _info(
        f"{args.predictor}: P {precision:.3f} R {recall:.3f} F1 {f1:.3f} on "
        f"{len(kept)} instances ({len(instances) - len(kept)} filtered, "
        f"{bad_instances + bad_inventory} lines skipped)"
    )
    print(f"instances\t{len(kept)}")
    print(f"filtered_out\t{len(instances) - len(kept)}")
    print(f"precision\t{precision:.6f}")
    print(f"recall\t{recall:.6f}")
    print(f"f1\t{f1:.6f}")
    return EXIT_OK


def _median_seconds(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def _cmd_bench(args) -> int:
    table = _read_subwords(args.subwords)
    rng = random.Random(args.seed)
    alphabet = sorted(sub for sub in table.probs if len(sub) == 1) or list(
        "abcdefghij"
    )

    def make_word(length: int) -> str:
        return "".join(rng.choice(alphabet) for _ in range(length))

    word_short, word_long, word_compose = make_word(10), make_word(40), make_word(20)
    short = _median_seconds(lambda: lattice.subword_weights(word_short, table), args.repeats)
    long = _median_seconds(lambda: lattice.subword_weights(word_long, table), args.repeats)

    vec_rng = np.random.default_rng(args.seed)
    embeddings = SubwordEmbeddings(dim=args.dim)
    for i in range(len(word_compose)):
        for j in range(i + 1, len(word_compose) + 1):
            embeddings.vectors.setdefault(
                word_compose[i:j], vec_rng.standard_normal(args.dim)
            )
    model = PbosModel(
        table=table,
        embeddings=embeddings,
        config=TrainConfig(variant=Variant.PBOS, prob_eps=table.prob_eps),
    )
    compose = _median_seconds(lambda: model.compose(word_compose), args.repeats)

    _info(
        f"benchmark words: len 10 {word_short!r}, len 40 (truncated) "
        f"{word_long[:12]!r}..., compose {word_compose!r} at dim {args.dim}"
    )
    print(f"weights_l10_us\t{short * 1e6:.1f}")
    print(f"weights_l40_us\t{long * 1e6:.1f}")
    print(f"weights_scaling_ratio\t{long / short:.2f}")
    print(f"compose_us\t{compose * 1e6:.1f}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except (ValueError, OSError) as exc:
        print(f"pbos: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
