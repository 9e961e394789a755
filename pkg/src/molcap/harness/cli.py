"""Command-line interface: train, eval, generate, ablate, metrics, synth.

Settings resolve in three layers: RunConfig defaults, then a `key = value`
config file (--config), then explicit flags. Errors exit nonzero with a
category code: 2 configuration, 3 data/parsing, 4 checkpoint/version,
5 numeric divergence.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import fields

from .. import chem
from ..config import AblationConfig, ConfigError, RunConfig, parse_config_file, split_overrides
from ..metrics import format_scores, score_corpus
from ..model import MoleculeCaptioner
from ..numerics import CheckpointError, NonFiniteError
from ..text_model import Vocabulary, VocabularyError
from .data import DataFormatError, generate_synthetic_dataset, load_dataset, write_dataset
from .evaluation import ablate, evaluate, format_report, report_lines
from .training import DivergenceError, train

log = logging.getLogger("molcap.cli")

_EXIT_CATEGORIES = (
    (2, "config", (ConfigError, VocabularyError)),
    (3, "data", (DataFormatError, chem.SmilesError, chem.UnsupportedElementError)),
    (4, "checkpoint", (CheckpointError,)),
    (5, "numeric", (DivergenceError, NonFiniteError)),
)


def _flag_name(field_name: str) -> str:
    return "--" + field_name.replace("_", "-")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run configuration (overrides --config file)")
    for f in fields(RunConfig):
        if f.type == "bool" or isinstance(f.default, bool):
            group.add_argument(_flag_name(f.name), dest=f.name, default=None,
                               action=argparse.BooleanOptionalAction)
        elif isinstance(f.default, float):
            group.add_argument(_flag_name(f.name), dest=f.name, type=float, default=None)
        elif isinstance(f.default, str):
            group.add_argument(_flag_name(f.name), dest=f.name, type=str, default=None)
        else:
            group.add_argument(_flag_name(f.name), dest=f.name, type=int, default=None)
    ab = parser.add_argument_group("input configuration")
    for f in fields(AblationConfig):
        ab.add_argument(_flag_name(f.name), dest=f.name, default=None,
                        action=argparse.BooleanOptionalAction)
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--desk-scale", action="store_true",
                        help="start from the small single-CPU preset instead of full scale")


def _resolve_configs(args) -> tuple[RunConfig, AblationConfig]:
    overrides = parse_config_file(args.config) if args.config else {}
    for f in list(fields(RunConfig)) + list(fields(AblationConfig)):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    run_kwargs, ablation_kwargs = split_overrides(overrides)
    config = RunConfig.desk_scale(**run_kwargs) if args.desk_scale else RunConfig(**run_kwargs)
    return config, AblationConfig(**ablation_kwargs)


def _read_lines(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="molcap",
                                     description="Molecule captioning from SMILES and graphs")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model on a TSV dataset")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--task", default="caption")
    p_train.add_argument("--out", required=True, help="directory for checkpoint + vocab")
    _add_config_flags(p_train)

    p_eval = sub.add_parser("eval", help="score a checkpoint on a TSV dataset")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--vocab", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--task", default="caption")
    p_eval.add_argument("--buckets", action="store_true", help="also score length buckets")
    p_eval.add_argument("--out", help="report path prefix (.txt human, .kv machine)")

    p_gen = sub.add_parser("generate", help="caption one molecule")
    p_gen.add_argument("--checkpoint", required=True)
    p_gen.add_argument("--vocab", required=True)
    p_gen.add_argument("--smiles", required=True)
    p_gen.add_argument("--task", default="caption")
    p_gen.add_argument("--strategy", choices=("greedy", "beam"))
    p_gen.add_argument("--beam-width", type=int)

    p_abl = sub.add_parser("ablate", help="train + score the five input configurations")
    p_abl.add_argument("--data", required=True)
    p_abl.add_argument("--eval-data", help="defaults to the training data")
    p_abl.add_argument("--task", default="caption")
    p_abl.add_argument("--out", help="report path prefix (.txt human, .kv machine)")
    _add_config_flags(p_abl)

    p_met = sub.add_parser("metrics", help="score aligned prediction/reference files")
    p_met.add_argument("--predictions", required=True)
    p_met.add_argument("--references", required=True)
    p_met.add_argument("--out", help="report path")

    p_syn = sub.add_parser("synth", help="write a synthetic SMILES/caption dataset")
    p_syn.add_argument("--n", type=int, default=16)
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.add_argument("--task", default="caption")
    p_syn.add_argument("--out", required=True)
    return parser


def _cmd_train(args) -> int:
    config, ablation = _resolve_configs(args)
    loaded = load_dataset(args.data, args.task)
    log.info("loaded %d records (%d skipped)", len(loaded.records), loaded.skipped)
    result = train(config, ablation, loaded.records, out_dir=args.out)
    print(f"final loss {result.loss_history[-1]:.6f} over {config.epochs} epochs")
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"vocab: {result.vocab_path}")
    return 0


def _cmd_eval(args) -> int:
    loaded = load_dataset(args.data, args.task)
    report = evaluate(args.checkpoint, args.vocab, loaded.records, buckets=args.buckets)
    text = format_report(report)
    print(text)
    if args.out:
        _write_text(args.out + ".txt", text)
        _write_text(args.out + ".kv", "\n".join(report_lines(report)))
    return 0


def _cmd_generate(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    model, ablation = MoleculeCaptioner.load(args.checkpoint, vocab)
    if ablation is None:
        ablation = AblationConfig()
    caption = model.generate_caption(args.smiles, args.task, ablation,
                                     strategy=args.strategy, beam_width=args.beam_width)
    print(caption)
    return 0


def _cmd_ablate(args) -> int:
    config, _ = _resolve_configs(args)
    train_loaded = load_dataset(args.data, args.task)
    eval_records = None
    if args.eval_data:
        eval_records = load_dataset(args.eval_data, args.task).records
    report = ablate(config, train_loaded.records, eval_records)
    text = report.format_table()
    print(text)
    if args.out:
        _write_text(args.out + ".txt", text)
        _write_text(args.out + ".kv", "\n".join(report.to_lines()))
    return 0


def _cmd_metrics(args) -> int:
    predictions = _read_lines(args.predictions)
    references = _read_lines(args.references)
    if len(predictions) != len(references):
        raise DataFormatError(
            f"predictions ({len(predictions)}) and references ({len(references)}) differ in length",
            min(len(predictions), len(references)) + 1)
    text = format_scores(score_corpus(predictions, references))
    print(text)
    if args.out:
        _write_text(args.out, text)
    return 0


def _cmd_synth(args) -> int:
    records = generate_synthetic_dataset(args.n, seed=args.seed, task=args.task)
    write_dataset(args.out, records)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "generate": _cmd_generate,
    "ablate": _cmd_ablate,
    "metrics": _cmd_metrics,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - boundary: map to category exit codes
        for code, category, types in _EXIT_CATEGORIES:
            if isinstance(exc, types):
                print(f"error[{category}]: {exc}", file=sys.stderr)
                return code
        if isinstance(exc, (ValueError, RuntimeError, OSError)):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
