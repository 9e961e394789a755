"""Byte-pair vocabulary with greedy longest-match encoding.

Reserved ids: pad = 0, end-of-sequence = 1, unknown = 2. Training starts
from the corpus character set and greedily merges the most frequent
adjacent pair (ties broken lexicographically) until the target size is
reached or no pairs remain.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass

import numpy as np

PAD_ID = 0
EOS_ID = 1
UNK_ID = 2
RESERVED_TOKENS = ("<pad>", "</s>", "<unk>")


class VocabularyError(ValueError):
    pass


@dataclass
class TokenSequence:
    ids: np.ndarray          # int64 (budget,)
    mask: np.ndarray         # bool (budget,), False exactly where id == pad
    raw_text: str | None = None

    def __len__(self):
        return len(self.ids)


class Vocabulary:
    def __init__(self, tokens: list[str]):
        if list(tokens[:3]) != list(RESERVED_TOKENS):
            raise VocabularyError("first three tokens must be the reserved pad/eos/unk tokens")
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise VocabularyError("token strings must be unique")
        self._max_token_len = max(len(t) for t in self.tokens[3:]) if len(self.tokens) > 3 else 1

    @property
    def size(self) -> int:
        return len(self.tokens)

    def content_hash(self) -> str:
        return hashlib.sha256("\n".join(self.tokens).encode("utf-8")).hexdigest()

    def segment(self, s: str) -> list[int]:
        """Greedy longest-match segmentation; unknown characters map to <unk>."""
        ids = []
        i = 0
        while i < len(s):
            match = None
            for length in range(min(self._max_token_len, len(s) - i), 0, -1):
                token_id = self.index.get(s[i:i + length])
                if token_id is not None and token_id >= 3:
                    match = (token_id, length)
                    break
            if match is None:
                ids.append(UNK_ID)
                i += 1
            else:
                ids.append(match[0])
                i += match[1]
        return ids

    def decode(self, ids) -> str:
        parts = []
        for token_id in ids:
            token_id = int(token_id)
            if token_id == EOS_ID:
                break
            if token_id in (PAD_ID, UNK_ID):
                continue
            parts.append(self.tokens[token_id])
        return "".join(parts)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for token in self.tokens:
                fh.write(token + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh]
        while tokens and tokens[-1] == "":
            tokens.pop()
        return cls(tokens)


def _merge_sequence(seq: list[str], pair: tuple[str, str], merged: str) -> list[str]:
    out = []
    i = 0
    while i < len(seq):
        if i + 1 < len(seq) and seq[i] == pair[0] and seq[i + 1] == pair[1]:
            out.append(merged)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def build_vocab(corpus, target_size: int) -> Vocabulary:
    """Train a byte-pair vocabulary of at most target_size tokens.

    Deterministic given corpus order: each round merges the globally most
    frequent adjacent pair, lexicographically smallest on ties. Stops early
    if no adjacent pairs remain.
    """
    corpus = [s for s in corpus if s]
    if not corpus:
        raise VocabularyError("cannot build a vocabulary from an empty corpus")
    chars = sorted(set("".join(corpus)))
    base = list(RESERVED_TOKENS) + chars
    if target_size < len(base):
        raise VocabularyError(
            f"target size {target_size} is smaller than the base character set ({len(base)})")
    tokens = list(base)
    known = set(tokens)
    sequences = [list(s) for s in corpus]
    while len(tokens) < target_size:
        counts = Counter()
        for seq in sequences:
            for a, b in zip(seq, seq[1:]):
                counts[(a, b)] += 1
        if not counts:
            break
        best_count = max(counts.values())
        pair = min(p for p, c in counts.items() if c == best_count)
        merged = pair[0] + pair[1]
        sequences = [_merge_sequence(seq, pair, merged) for seq in sequences]
        if merged not in known:
            known.add(merged)
            tokens.append(merged)
    return Vocabulary(tokens)


def encode_text(vocab: Vocabulary, s: str, budget: int, add_eos: bool = True) -> TokenSequence:
    """Segment, truncate to the budget, optionally append EOS, and pad.

    An empty input yields an all-pad sequence with an all-false mask.
    """
    if budget < 1:
        raise VocabularyError("token budget must be at least 1")
    ids = vocab.segment(s)
    if ids and add_eos:
        ids = ids[:budget - 1] + [EOS_ID]
    else:
        ids = ids[:budget]
    out = np.full(budget, PAD_ID, dtype=np.int64)
    out[:len(ids)] = ids
    return TokenSequence(ids=out, mask=out != PAD_ID, raw_text=s)
