"""Command-line interface.

Subcommands cover the full workflow: build tagger training data from a
parallel corpus, oversample, train and threshold the tagger, mine a
corruption inventory, generate a synthetic corpus, and score the results.
Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from . import metrics, pipeline, report, tagger
from .core import DEFAULT_INVENTORY, TagSet, pair_record_to_json
from .corruptor import EditInventory, ExternalBackend, corrupt, encode_prefix, mine_inventory
from .errors import BackendError, DataError, GecSynthError
from .pipeline import GenerationSummary, PipelineConfig
from .tokenizer import Annotator

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BACKEND = 0, 1, 2, 3


class Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file with defaults for this run")
    sub.add_argument("--seed", type=int, default=None, help="base random seed")
    sub.add_argument("--workers", type=int, default=None, help="parallel workers")
    sub.add_argument("--output", "-o", default=None, help="output path")
    sub.add_argument("--lexicon", default=None, help="override the bundled lexicon")


def _effective_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    for name in ("seed", "workers", "output", "lexicon"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    for name in ("input", "model", "inventory", "top_k", "threshold",
                 "growth_budget", "backend_command"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    return cfg


def _annotator(cfg: PipelineConfig) -> Annotator:
    if cfg.lexicon:
        return Annotator(cfg.lexicon)
    from .tokenizer import default_annotator

    return default_annotator()


def _require(cfg: PipelineConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) in (None, "")]
    if missing:
        raise DataError(f"missing required settings: {', '.join(missing)}")


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    print(text)


def _default_figure(args, output: str | None) -> str | None:
    if getattr(args, "no_figure", False):
        return None
    if getattr(args, "figure", None):
        return args.figure
    if output:
        return str(Path(output).with_suffix(".png"))
    return None


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------


def cmd_build_data(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "input", "output")
    annotator = _annotator(cfg)
    dataset, build_report, kept = pipeline.build_training_data(
        pipeline.iter_raw_pairs(cfg.input), annotator=annotator
    )
    with open(cfg.output, "w", encoding="utf-8") as handle:
        for pair in kept:
            handle.write(
                pair_record_to_json(
                    src=pair.source.text(),
                    tgt=pair.target.text(),
                    tags=pipeline.tagset_from_edits(pair.edits).names(),
                    edits=pair.edits,
                )
            )
            handle.write("\n")
    if build_report.items == 0:
        print("warning: every pair was a noop; dataset is empty", file=sys.stderr)
    _emit(build_report.as_dict(), None)
    return EXIT_OK


def cmd_oversample(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "input", "output")
    dataset = pipeline.load_tagged_dataset(cfg.input, _annotator(cfg))
    grown = tagger.oversample(dataset, cfg.growth_budget, cfg.seed)
    pipeline.write_tagged_dataset(grown, cfg.output)
    before = tagger.imbalance_report(dataset)
    after = tagger.imbalance_report(grown)
    _emit(
        {
            "items_before": len(dataset),
            "items_after": len(grown),
            "mean_ir_before": round(before.mean_ir, 4),
            "mean_ir_after": round(after.mean_ir, 4),
        },
        None,
    )
    return EXIT_OK


def cmd_train_tagger(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "input", "output")
    dataset = pipeline.load_tagged_dataset(cfg.input, _annotator(cfg))
    if args.holdout > 0:
        train_split, dev_split = tagger.split_dev(dataset, args.holdout, cfg.seed)
        if args.dev_output:
            pipeline.write_tagged_dataset(dev_split, args.dev_output)
    else:
        train_split, dev_split = dataset, None
    config = tagger.TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        seed=cfg.seed,
        hash_space=args.hash_space,
    )
    model = tagger.train(train_split, config)
    tagger.save_model(model, cfg.output)
    _emit(
        {
            "items_trained": len(train_split),
            "items_held_out": len(dev_split) if dev_split else 0,
            "epoch_mean_loss": [round(x, 6) for x in model.history],
            "model": cfg.output,
        },
        None,
    )
    return EXIT_OK


def cmd_tune_threshold(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "model")
    if not args.dev:
        raise DataError("missing required settings: dev")
    model = tagger.load_model(cfg.model)
    dev = pipeline.load_tagged_dataset(args.dev, _annotator(cfg))
    grid = tagger.threshold_search(model, dev)
    chosen = tagger.tune_threshold(model, dev)
    if args.update_model:
        tagger.save_model(model.with_threshold(chosen), cfg.model)
    figure = _default_figure(args, cfg.output)
    if figure:
        report.save_threshold_curve(
            [t for t, _ in grid], [f for _, f in grid], chosen, figure
        )
    _emit(
        {
            "threshold": chosen,
            "grid": [{"threshold": t, "f05": round(f, 4)} for t, f in grid],
            "model_updated": bool(args.update_model),
            "figure": figure,
        },
        cfg.output,
    )
    return EXIT_OK


def cmd_mine_inventory(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "input", "output")
    annotator = _annotator(cfg)
    _, _, kept = pipeline.build_training_data(
        pipeline.iter_raw_pairs(cfg.input), annotator=annotator
    )
    inventory, mining_report = mine_inventory(kept)
    inventory.save(cfg.output)
    _emit(mining_report.as_dict(), None)
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "input", "model", "output")
    annotator = _annotator(cfg)
    model = tagger.load_model(cfg.model)
    summary = GenerationSummary()
    with open(cfg.input, encoding="utf-8") as handle:
        lines = (line.rstrip("\n") for line in handle)
        if cfg.backend_command:
            command = (
                shlex.split(cfg.backend_command)
                if isinstance(cfg.backend_command, str)
                else cfg.backend_command
            )
            with ExternalBackend(command) as backend:
                records = pipeline.generate_with_backend(
                    lines,
                    model,
                    backend,
                    threshold=cfg.threshold,
                    annotator=annotator,
                    summary=summary,
                )
                pipeline.write_records(records, cfg.output)
        else:
            _require(cfg, "inventory")
            inventory = EditInventory.load(cfg.inventory)
            records = pipeline.generate(
                lines,
                model,
                inventory,
                top_k=cfg.top_k,
                seed=cfg.seed,
                workers=cfg.workers,
                threshold=cfg.threshold,
                annotator=annotator,
                summary=summary,
            )
            pipeline.write_records(records, cfg.output)
    _emit(summary.as_dict(), args.summary)
    return EXIT_OK


def cmd_corrupt_one(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "inventory")
    annotator = _annotator(cfg)
    sentence = annotator.tokenize(args.sentence)
    names = [t.strip() for t in args.tags.split(",") if t.strip()] if args.tags else []
    tags = TagSet.from_names(names)
    inventory = EditInventory.load(cfg.inventory)
    result = corrupt(
        sentence, tags, inventory, top_k=cfg.top_k, seed=cfg.seed, annotator=annotator
    )
    _emit(
        {
            "prefix": encode_prefix(tags, sentence),
            "output": result.output.text(),
            "requested": list(tags.names()),
            "realized": list(result.realized.names()),
            "edits": [
                {"start": e.start, "end": e.end, "replacement": list(e.replacement),
                 "tag": e.tag.name}
                for e in result.applied_edits
            ],
        },
        cfg.output,
    )
    return EXIT_OK


def cmd_tag_one(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "model")
    annotator = _annotator(cfg)
    model = tagger.load_model(cfg.model)
    if cfg.threshold is not None:
        model = model.with_threshold(cfg.threshold)
    sentence = annotator.tokenize(args.sentence)
    scores = model.scores(sentence)
    predicted = tagger.predict(model, sentence)
    _emit(
        {
            "sentence": sentence.text(),
            "prefix": encode_prefix(predicted, sentence),
            "tags": list(predicted.names()),
            "threshold": model.threshold,
            "scores": {
                tag.name: round(float(s), 4)
                for tag, s in zip(model.inventory, scores)
                if s >= 0.01
            },
        },
        cfg.output,
    )
    return EXIT_OK


def cmd_score_tagger(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "model")
    if not args.data:
        raise DataError("missing required settings: data")
    annotator = _annotator(cfg)
    model = tagger.load_model(cfg.model)
    if cfg.threshold is not None:
        model = model.with_threshold(cfg.threshold)
    dataset = pipeline.load_tagged_dataset(args.data, annotator)
    gold = [tags for _, tags in dataset]
    pred = [tagger.predict(model, sentence) for sentence, _ in dataset]
    score = metrics.multilabel_score(gold, pred)
    _emit(score.as_dict(), cfg.output)
    return EXIT_OK


def _read_sentences(path: str, annotator: Annotator):
    with open(path, encoding="utf-8") as handle:
        return [annotator.tokenize(line.rstrip("\n")) for line in handle if line.strip()]


def cmd_score_gec(args) -> int:
    cfg = _effective_config(args)
    annotator = _annotator(cfg)
    sources = _read_sentences(args.sources, annotator)
    hypotheses = _read_sentences(args.hypotheses, annotator)
    references = _read_sentences(args.references, annotator)
    score = metrics.gec_score(hypotheses, sources, references)
    _emit(score.as_dict(), cfg.output)
    return EXIT_OK


def cmd_bleu(args) -> int:
    cfg = _effective_config(args)
    annotator = _annotator(cfg)
    hypotheses = _read_sentences(args.hypotheses, annotator)
    references = _read_sentences(args.references, annotator)
    _emit({"bleu": round(metrics.bleu(hypotheses, references), 2)}, cfg.output)
    return EXIT_OK


def cmd_stats(args) -> int:
    cfg = _effective_config(args)
    _require(cfg, "input")
    stats = pipeline.stats_from_records(pipeline.load_tagged_records(cfg.input))
    print(stats.text_table())
    if cfg.output:
        Path(cfg.output).write_text(
            json.dumps(stats.as_dict(), indent=2) + "\n", encoding="utf-8"
        )
    figure = _default_figure(args, cfg.output)
    if figure:
        report.save_label_distribution(
            stats.counts,
            figure,
            title="Label distribution",
            realized_counts=stats.realized_counts if stats.has_realized else None,
        )
        print(f"figure written to {figure}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser assembly.
# ---------------------------------------------------------------------------


def build_parser() -> Parser:
    parser = Parser(prog="gecsynth", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name, func, help_text):
        p = subs.add_parser(name, help=help_text)
        _common_flags(p)
        p.set_defaults(func=func)
        return p

    p = sub("build-data", cmd_build_data, "annotate a parallel corpus into tagged records")
    p.add_argument("--input", "-i", help="parallel TSV (incorrect<TAB>correct) or JSONL")

    p = sub("oversample", cmd_oversample, "clone minority-label instances")
    p.add_argument("--input", "-i", help="tagged JSONL records")
    p.add_argument("--growth-budget", dest="growth_budget", type=float, default=None)

    p = sub("train-tagger", cmd_train_tagger, "train the multi-label error tagger")
    p.add_argument("--input", "-i", help="tagged JSONL records")
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--hash-space", type=int, default=2**18)
    p.add_argument("--holdout", type=float, default=0.0,
                   help="fraction held out as a dev split before training")
    p.add_argument("--dev-output", help="where to write the held-out records")

    p = sub("tune-threshold", cmd_tune_threshold, "pick the F0.5-optimal threshold")
    p.add_argument("--model", help="trained model file")
    p.add_argument("--dev", help="tagged JSONL dev records")
    p.add_argument("--update-model", action="store_true",
                   help="write the tuned threshold back into the model file")
    p.add_argument("--figure", help="threshold-curve PNG path")
    p.add_argument("--no-figure", action="store_true")

    p = sub("mine-inventory", cmd_mine_inventory, "mine corruption patterns from a corpus")
    p.add_argument("--input", "-i", help="parallel TSV or JSONL")

    p = sub("generate", cmd_generate, "tag and corrupt a file of correct sentences")
    p.add_argument("--input", "-i", help="text file, one tokenized sentence per line")
    p.add_argument("--model", help="trained tagger model")
    p.add_argument("--inventory", help="corruption inventory JSON")
    p.add_argument("--top-k", dest="top_k", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--backend-command", dest="backend_command",
                   help="external corruption backend command line")
    p.add_argument("--summary", help="write the run summary JSON here")

    p = sub("corrupt-one", cmd_corrupt_one, "corrupt a single sentence")
    p.add_argument("--sentence", "-s", required=True)
    p.add_argument("--tags", "-t", default="", help="comma-separated tag names")
    p.add_argument("--inventory", help="corruption inventory JSON")
    p.add_argument("--top-k", dest="top_k", type=int, default=None)

    p = sub("tag-one", cmd_tag_one, "predict error tags for a single sentence")
    p.add_argument("--sentence", "-s", required=True)
    p.add_argument("--model", help="trained tagger model")
    p.add_argument("--threshold", type=float, default=None)

    p = sub("score-tagger", cmd_score_tagger, "multi-label P/R/F0.5 on tagged records")
    p.add_argument("--model", help="trained tagger model")
    p.add_argument("--data", help="tagged JSONL records with gold tags")
    p.add_argument("--threshold", type=float, default=None)

    p = sub("score-gec", cmd_score_gec, "edit-level P/R/F0.5 of corrections")
    p.add_argument("--sources", required=True, help="original (incorrect) sentences")
    p.add_argument("--hypotheses", required=True, help="system corrections")
    p.add_argument("--references", required=True, help="gold corrections")

    p = sub("bleu", cmd_bleu, "corpus BLEU of hypotheses against references")
    p.add_argument("--hypotheses", required=True)
    p.add_argument("--references", required=True)

    p = sub("stats", cmd_stats, "tag distribution report over JSONL records")
    p.add_argument("--input", "-i", help="tagged or generation JSONL records")
    p.add_argument("--figure", help="label-distribution PNG path")
    p.add_argument("--no-figure", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except GecSynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
