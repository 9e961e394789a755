"""Text-generation metrics: corpus BLEU-n, ROUGE-n, ROUGE-L, and an
exact-match METEOR variant (no stemming or synonym tables).

Tokenization lowercases and splits punctuation into separate tokens.
Absolute values are comparable within this project; no parity with other
metric toolkits is claimed.
"""

from __future__ import annotations

import math
import re
from collections import Counter

from ..numerics import ContractError

BLEU_EPSILON = 1e-9
METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5

_TOKEN_RE = re.compile(r"[a-z0-9]+|[^a-z0-9\s]")

METRIC_NAMES = ("bleu2", "bleu4", "meteor", "rouge1", "rouge2", "rougeL")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def ngram_counts(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(candidates, references, n_max: int) -> float:
    """Corpus-level BLEU with uniform 1..n_max weights and a brevity penalty.

    candidates/references are aligned lists of token lists, one reference
    per candidate. Zero clipped counts fall back to an epsilon numerator.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    candidates = list(candidates)
    references = list(references)
    if not candidates or len(candidates) != len(references):
        raise ContractError("bleu needs equal, non-empty candidate and reference lists")

    log_precision_sum = 0.0
    for n in range(1, n_max + 1):
        matched = 0
        total = 0
        for cand, ref in zip(candidates, references):
            cand_counts = ngram_counts(cand, n)
            ref_counts = ngram_counts(ref, n)
            matched += sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
            total += max(len(cand) - n + 1, 0)
        if total == 0:
            precision = BLEU_EPSILON
        elif matched == 0:
            precision = BLEU_EPSILON / total
        else:
            precision = matched / total
        log_precision_sum += math.log(precision) / n_max

    cand_len = sum(len(c) for c in candidates)
    ref_len = sum(len(r) for r in references)
    if cand_len == 0:
        return 0.0
    brevity = math.exp(1.0 - ref_len / cand_len) if cand_len < ref_len else 1.0
    return brevity * math.exp(log_precision_sum)


def _f1(matched: int, cand_total: int, ref_total: int) -> float:
    if matched == 0 or cand_total == 0 or ref_total == 0:
        return 0.0
    precision = matched / cand_total
    recall = matched / ref_total
    return 2.0 * precision * recall / (precision + recall)


def rouge_n(candidate, reference, n: int) -> float:
    """F1 of clipped n-gram overlap; a candidate shorter than n scores 0."""
    if not reference:
        raise ContractError("rouge needs a non-empty reference")
    cand_counts = ngram_counts(candidate, n)
    ref_counts = ngram_counts(reference, n)
    matched = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
    return _f1(matched, sum(cand_counts.values()), sum(ref_counts.values()))


def lcs_length(a, b) -> int:
    """Longest common subsequence length via the standard DP table."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference) -> float:
    if not reference:
        raise ContractError("rouge needs a non-empty reference")
    return _f1(lcs_length(candidate, reference), len(candidate), len(reference))


def _meteor_alignment(candidate, reference):
    """Greedy leftmost exact-match alignment, each reference token used once.

    Returns (candidate position, reference position) pairs in candidate order.
    """
    used = [False] * len(reference)
    pairs = []
    for ci, token in enumerate(candidate):
        for ri, ref_token in enumerate(reference):
            if not used[ri] and ref_token == token:
                used[ri] = True
                pairs.append((ci, ri))
                break
    return pairs


def _chunk_count(pairs) -> int:
    """Chunks are runs of matches adjacent in both candidate and reference."""
    chunks = 0
    prev = None
    for ci, ri in pairs:
        if prev is None or ci != prev[0] + 1 or ri != prev[1] + 1:
            chunks += 1
        prev = (ci, ri)
    return chunks


def meteor(candidate, reference) -> float:
    """F-mean of unigram precision/recall with a fragmentation penalty.

    score = F * (1 - gamma * (chunks / matches) ** beta), with
    F = P*R / (alpha*P + (1-alpha)*R). Zero matches score 0.
    """
    if not reference:
        raise ContractError("meteor needs a non-empty reference")
    pairs = _meteor_alignment(candidate, reference)
    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    f_mean = precision * recall / (METEOR_ALPHA * precision + (1.0 - METEOR_ALPHA) * recall)
    penalty = METEOR_GAMMA * (_chunk_count(pairs) / matches) ** METEOR_BETA
    return f_mean * (1.0 - penalty)


def score_corpus(candidate_texts, reference_texts) -> dict:
    """All six scores for aligned lists of raw strings.

    BLEU is corpus-level; ROUGE and METEOR are averaged over pairs.
    """
    candidate_texts = list(candidate_texts)
    reference_texts = list(reference_texts)
    if not candidate_texts or len(candidate_texts) != len(reference_texts):
        raise ContractError("scoring needs equal, non-empty candidate and reference lists")
    cands = [tokenize(t) for t in candidate_texts]
    refs = [tokenize(t) for t in reference_texts]
    n = len(cands)
    return {
        "bleu2": bleu_n(cands, refs, 2),
        "bleu4": bleu_n(cands, refs, 4),
        "meteor": sum(meteor(c, r) for c, r in zip(cands, refs)) / n,
        "rouge1": sum(rouge_n(c, r, 1) for c, r in zip(cands, refs)) / n,
        "rouge2": sum(rouge_n(c, r, 2) for c, r in zip(cands, refs)) / n,
        "rougeL": sum(rouge_l(c, r) for c, r in zip(cands, refs)) / n,
    }


def format_scores(scores: dict) -> str:
    """Key/value report with scores as percentages to one decimal."""
    return "\n".join(f"{name} = {scores[name] * 100.0:.1f}" for name in METRIC_NAMES)
