"""Training loop: vocabulary construction, teacher forcing, optimizer steps.

Fully deterministic under a fixed seed and a single thread: model init,
epoch shuffling, and dropout all draw from generators derived from the
configured seed.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from ..config import AblationConfig, RunConfig
from ..model import MoleculeCaptioner
from ..numerics import NonFiniteError, Tape, add, backward, scale
from ..prompts import TASKS, build_prompt
from ..text_model import Vocabulary, build_vocab, encode_text
from .optim import AdamW

log = logging.getLogger("molcap.train")


class DivergenceError(RuntimeError):
    pass


@dataclass
class TrainResult:
    model: MoleculeCaptioner
    vocab: Vocabulary
    loss_history: list          # mean loss per epoch
    step_losses: list           # loss per optimizer step
    checkpoint_path: str | None = None
    vocab_path: str | None = None


def build_corpus(records) -> list:
    """Everything the tokenizer must cover: SMILES, descriptions, prompts."""
    corpus = [r.smiles for r in records] + [r.description for r in records]
    corpus += [build_prompt(task) for task in TASKS]
    return corpus


def build_model(config: RunConfig, vocab: Vocabulary) -> MoleculeCaptioner:
    return MoleculeCaptioner(config, vocab, np.random.default_rng([config.seed, 0]))


def train(config: RunConfig, ablation: AblationConfig, records, out_dir=None) -> TrainResult:
    if not records:
        raise ValueError("training needs a non-empty dataset")
    vocab = build_vocab(build_corpus(records), config.vocab_size)
    model = build_model(config, vocab)
    model.train()
    shuffle_rng = np.random.default_rng([config.seed, 1])
    optimizer = AdamW(model.parameters(), lr=config.learning_rate)
    targets = [encode_text(vocab, r.description, config.target_budget) for r in records]

    loss_history = []
    step_losses = []
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(len(records))
        epoch_losses = []
        for b_start in range(0, len(order), config.batch_size):
            batch = order[b_start:b_start + config.batch_size]
            model.zero_grad()
            try:
                with Tape():
                    loss = None
                    for i in batch:
                        r = records[i]
                        part = model.caption_loss(
                            model.build_context(r.smiles, r.task, ablation), targets[i])
                        loss = part if loss is None else add(loss, part)
                    loss = scale(loss, 1.0 / len(batch))
                value = loss.item()
                backward(loss)
            except NonFiniteError as exc:
                raise DivergenceError(
                    f"non-finite loss at epoch {epoch} batch {b_start // config.batch_size}: {exc}"
                ) from exc
            optimizer.step()
            epoch_losses.append(value)
            step_losses.append(value)
        loss_history.append(float(np.mean(epoch_losses)))
        log.info("epoch %d/%d loss %.6f", epoch + 1, config.epochs, loss_history[-1])

    result = TrainResult(model=model, vocab=vocab, loss_history=loss_history,
                         step_losses=step_losses)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        result.checkpoint_path = os.path.join(out_dir, "checkpoint.npz")
        result.vocab_path = os.path.join(out_dir, "vocab.txt")
        model.save(result.checkpoint_path, ablation)
        vocab.save(result.vocab_path)
        with open(os.path.join(out_dir, "loss_history.txt"), "w", encoding="utf-8") as fh:
            for epoch, value in enumerate(loss_history):
                fh.write(f"epoch {epoch} loss {value:.17g}\n")
    return result
