"""Evaluation reports, length-bucketed scoring, and the input-configuration
ablation grid.

Report footers show the reference full-scale numbers for context only;
nothing in this harness asserts against them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..config import AblationConfig, RunConfig
from ..metrics import METRIC_NAMES, score_corpus
from ..model import MoleculeCaptioner
from ..text_model import Vocabulary
from .data import LENGTH_BOUNDARIES, split_by_length
from .training import train

log = logging.getLogger("molcap.eval")

# Full-scale training from pretrained initializations (not reproducible at
# this scale); shown in report footers for context, never asserted.
REFERENCE_ROW = {"bleu2": 63.8, "bleu4": 56.6, "meteor": 64.1,
                 "rouge1": 67.7, "rouge2": 53.7, "rougeL": 61.7}
FOOTER_LINES = (
    "reference full-scale run (ChEBI-20, pretrained init, 120 epochs): "
    + " ".join(f"{k} {v:.1f}" for k, v in REFERENCE_ROW.items()),
    "scores come from this package's own metric implementations; absolute "
    "values are not comparable across metric toolkits",
)

COLUMN_SCHEMA = ("Graph", "SMILES", "CTA", "BLEU-2", "BLEU-4", "METEOR",
                 "ROUGE-1", "ROUGE-2", "ROUGE-L")

# The five input configurations: SMILES only; graph only; graph with
# cross-token attention; graph + SMILES; graph + SMILES + cross-token attention.
ABLATION_GRID = (
    AblationConfig(use_graph=False, use_smiles=True, use_cross_token_attention=False),
    AblationConfig(use_graph=True, use_smiles=False, use_cross_token_attention=False),
    AblationConfig(use_graph=True, use_smiles=False, use_cross_token_attention=True),
    AblationConfig(use_graph=True, use_smiles=True, use_cross_token_attention=False),
    AblationConfig(use_graph=True, use_smiles=True, use_cross_token_attention=True),
)


@dataclass
class EvalReport:
    scores: dict
    n_records: int
    ablation: AblationConfig
    bucket_scores: dict | None = None       # name -> (size, scores)
    predictions: list | None = None


def _flags(ablation: AblationConfig) -> tuple:
    mark = {True: "yes", False: "no"}
    return (mark[ablation.use_graph], mark[ablation.use_smiles],
            mark[ablation.use_cross_token_attention])


def _score_row(scores: dict) -> tuple:
    return tuple(f"{scores[name] * 100.0:.1f}" for name in METRIC_NAMES)


def evaluate_model(model: MoleculeCaptioner, ablation: AblationConfig, records,
                   buckets: bool = False, keep_predictions: bool = False) -> EvalReport:
    if not records:
        raise ValueError("evaluation needs a non-empty dataset")
    model.eval()
    predictions = []
    for r in records:
        predictions.append(model.generate_caption(r.smiles, r.task, ablation))
    references = [r.description for r in records]
    scores = score_corpus(predictions, references)

    bucket_scores = None
    if buckets:
        by_record = dict(zip((id(r) for r in records), predictions))
        bucket_scores = {}
        grouped = split_by_length(records, LENGTH_BOUNDARIES)
        for name in ("short", "medium", "long"):
            group = getattr(grouped, name)
            if group:
                bucket_scores[name] = (len(group), score_corpus(
                    [by_record[id(r)] for r in group], [r.description for r in group]))
            else:
                bucket_scores[name] = (0, None)
    return EvalReport(scores=scores, n_records=len(records), ablation=ablation,
                      bucket_scores=bucket_scores,
                      predictions=predictions if keep_predictions else None)


def evaluate(checkpoint_path, vocab_path, records, buckets: bool = False) -> EvalReport:
    """Load a checkpoint + vocabulary file and score a dataset."""
    vocab = Vocabulary.load(vocab_path)
    model, ablation = MoleculeCaptioner.load(checkpoint_path, vocab)
    if ablation is None:
        ablation = AblationConfig()
    return evaluate_model(model, ablation, records, buckets=buckets)


def report_lines(report: EvalReport) -> list:
    """Machine-readable key=value lines."""
    lines = [f"n_records = {report.n_records}",
             f"graph = {report.ablation.use_graph}",
             f"smiles = {report.ablation.use_smiles}",
             f"cta = {report.ablation.use_cross_token_attention}"]
    lines += [f"{name} = {report.scores[name] * 100.0:.1f}" for name in METRIC_NAMES]
    if report.bucket_scores:
        for bucket, (size, scores) in report.bucket_scores.items():
            lines.append(f"bucket_{bucket}_size = {size}")
            if scores is not None:
                lines += [f"bucket_{bucket}_{name} = {scores[name] * 100.0:.1f}"
                          for name in METRIC_NAMES]
    return lines


def format_report(report: EvalReport) -> str:
    header = "  ".join(f"{c:>8s}" for c in COLUMN_SCHEMA)
    row = "  ".join(f"{v:>8s}" for v in _flags(report.ablation) + _score_row(report.scores))
    lines = [header, row]
    if report.bucket_scores:
        boundaries = LENGTH_BOUNDARIES
        lines.append(f"length buckets (word-count boundaries {boundaries[0]}/{boundaries[1]}):")
        for bucket, (size, scores) in report.bucket_scores.items():
            if scores is None:
                lines.append(f"  {bucket:>6s} (n={size}): empty")
            else:
                score_text = " ".join(f"{name} {scores[name] * 100.0:.1f}" for name in METRIC_NAMES)
                lines.append(f"  {bucket:>6s} (n={size}): {score_text}")
    lines.extend(FOOTER_LINES)
    return "\n".join(lines)


@dataclass
class AblationRow:
    ablation: AblationConfig
    scores: dict
    counters: dict
    loss_history: list


@dataclass
class AblationReport:
    rows: list
    n_train: int
    n_eval: int

    def format_table(self) -> str:
        lines = ["  ".join(f"{c:>8s}" for c in COLUMN_SCHEMA)]
        for row in self.rows:
            lines.append("  ".join(f"{v:>8s}" for v in _flags(row.ablation) + _score_row(row.scores)))
        lines.extend(FOOTER_LINES)
        return "\n".join(lines)

    def to_lines(self) -> list:
        lines = [f"n_train = {self.n_train}", f"n_eval = {self.n_eval}"]
        for row in self.rows:
            key = row.ablation.label() or "none"
            lines += [f"{key}.{name} = {row.scores[name] * 100.0:.1f}" for name in METRIC_NAMES]
            lines += [f"{key}.calls.{counter} = {count}"
                      for counter, count in sorted(row.counters.items())]
        return lines


def ablate(config: RunConfig, train_records, eval_records=None) -> AblationReport:
    """Train and evaluate the five input configurations with shared settings."""
    if eval_records is None:
        eval_records = train_records
    rows = []
    for ablation in ABLATION_GRID:
        log.info("ablation %s", ablation.label())
        result = train(config, ablation, train_records)
        result.model.reset_counters()
        report = evaluate_model(result.model, ablation, eval_records)
        rows.append(AblationRow(ablation=ablation, scores=report.scores,
                                counters=dict(result.model.counters),
                                loss_history=result.loss_history))
    return AblationReport(rows=rows, n_train=len(train_records), n_eval=len(eval_records))
