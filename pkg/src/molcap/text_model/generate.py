"""Greedy and beam-search decoding.

Both strategies re-run the decoder on the growing prefix each step (no
state caching; sequences are short at this scale). Ties in argmax and in
beam ranking resolve to the lowest token index, so decoding is fully
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vocab import EOS_ID, PAD_ID

START_ID = PAD_ID  # decoder start token, T5-style


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())


def greedy_token_ids(step_fn, max_len: int) -> list[int]:
    """step_fn(prefix ids) -> last-position logits (V,). Stops on EOS."""
    prefix = [START_ID]
    generated: list[int] = []
    for _ in range(max_len):
        logits = step_fn(prefix)
        token = int(np.argmax(logits))  # argmax takes the lowest index on ties
        if token == EOS_ID:
            break
        generated.append(token)
        prefix.append(token)
    return generated


@dataclass
class _Beam:
    ids: list
    log_prob: float
    finished: bool

    def score(self) -> float:
        return self.log_prob / max(len(self.ids) - 1, 1)  # length-normalized


def beam_token_ids(step_fn, max_len: int, width: int) -> list[int]:
    """Width-k beam search ranked by length-normalized log-probability."""
    if width < 1:
        raise ValueError("beam width must be at least 1")
    beams = [_Beam([START_ID], 0.0, False)]
    for _ in range(max_len):
        live = [b for b in beams if not b.finished]
        if not live:
            break
        candidates = [b for b in beams if b.finished]
        for beam in live:
            log_probs = _log_softmax(step_fn(beam.ids))
            top = np.argsort(-log_probs, kind="stable")[:width]
            for token in top:
                token = int(token)
                extended = _Beam(beam.ids + [token], beam.log_prob + float(log_probs[token]),
                                 token == EOS_ID)
                candidates.append(extended)
        candidates.sort(key=lambda b: -b.score())
        beams = candidates[:width]
    best = max(beams, key=lambda b: b.score())
    ids = best.ids[1:]  # drop the start token
    if ids and ids[-1] == EOS_ID:
        ids = ids[:-1]
    return ids


def generate(model, context, strategy: str = "greedy", max_len: int | None = None,
             beam_width: int = 4) -> str:
    """Decode a caption for an assembled decoder context and detokenize it."""
    if max_len is None:
        max_len = model.config.target_budget
    if max_len < 1:
        raise ValueError("max_len must be at least 1")

    def step_fn(prefix_ids):
        logits = model.decoder_logits(context, np.asarray(prefix_ids, dtype=np.int64))
        return logits.data[-1]

    if strategy == "greedy":
        ids = greedy_token_ids(step_fn, max_len)
    elif strategy == "beam":
        ids = beam_token_ids(step_fn, max_len, beam_width)
    else:
        raise ValueError(f"unknown decode strategy {strategy!r}")
    return model.vocab.decode(ids)
