from .text_metrics import (
    METRIC_NAMES,
    bleu_n,
    format_scores,
    lcs_length,
    meteor,
    ngram_counts,
    rouge_l,
    rouge_n,
    score_corpus,
    tokenize,
)

__all__ = [
    "METRIC_NAMES", "bleu_n", "format_scores", "lcs_length", "meteor",
    "ngram_counts", "rouge_l", "rouge_n", "score_corpus", "tokenize",
]
