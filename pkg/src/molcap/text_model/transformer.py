"""Compact pre-norm transformer encoder and decoder stacks.

The stacks operate on already-embedded inputs (the shared token table and
position embeddings live in the model that owns both stacks). Attention
over padded key positions is excluded exactly: masked scores are filled
with -inf before the softmax, so masked keys carry zero weight.
"""

from __future__ import annotations

import numpy as np

from ..numerics import (
    Dropout,
    LayerNorm,
    Linear,
    Mlp,
    Module,
    ShapeError,
    Tensor,
    add,
    matmul,
    merge_heads,
    scale,
    softmax,
    split_heads,
    transpose,
)


class MultiHeadAttention(Module):
    """Scaled dot-product attention with h heads of width d/h."""

    def __init__(self, d: int, heads: int, rng, dtype=np.float64):
        super().__init__()
        if d % heads != 0:
            raise ShapeError(f"model width {d} is not divisible by {heads} heads")
        self.d = d
        self.heads = heads
        self.head_dim = d // heads
        self.w_q = Linear(d, d, rng, bias=False, dtype=dtype)
        self.w_k = Linear(d, d, rng, bias=False, dtype=dtype)
        self.w_v = Linear(d, d, rng, bias=False, dtype=dtype)
        self.w_o = Linear(d, d, rng, bias=False, dtype=dtype)
        self.last_probs = None  # (heads, Tq, Tk) from the latest forward

    def forward(self, query_in: Tensor, key_in: Tensor, mask=None) -> Tensor:
        """query_in (Tq, d), key_in (Tk, d); mask bool (Tk,) or (Tq, Tk)."""
        q = self.w_q(query_in)
        k = self.w_k(key_in)
        v = self.w_v(key_in)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)
        if self.heads == 1:
            scores = scale(matmul(q, transpose(k)), 1.0 / np.sqrt(self.head_dim))
            probs = softmax(scores, mask if (mask is None or mask.ndim == 2) else mask[None, :])
            self.last_probs = probs.data[None]
            return self.w_o(matmul(probs, v))
        q = split_heads(q, self.heads)
        k = split_heads(k, self.heads)
        v = split_heads(v, self.heads)
        scores = scale(matmul(q, transpose(k, (0, 2, 1))), 1.0 / np.sqrt(self.head_dim))
        if mask is not None:
            mask = mask[None, None, :] if mask.ndim == 1 else mask[None, :, :]
        probs = softmax(scores, mask)
        self.last_probs = probs.data
        return self.w_o(merge_heads(matmul(probs, v)))

    __call__ = forward


class EncoderBlock(Module):
    def __init__(self, d: int, heads: int, ff_dim: int, dropout_p: float, rng, dtype=np.float64):
        super().__init__()
        self.ln1 = LayerNorm(d, dtype=dtype)
        self.attn = MultiHeadAttention(d, heads, rng, dtype=dtype)
        self.ln2 = LayerNorm(d, dtype=dtype)
        self.ff = Mlp(d, ff_dim, d, rng, dtype=dtype)
        self.drop = Dropout(dropout_p, rng)

    def forward(self, x: Tensor, key_mask) -> Tensor:
        h = self.ln1(x)
        x = add(x, self.drop(self.attn(h, h, key_mask)))
        x = add(x, self.drop(self.ff(self.ln2(x))))
        return x

    __call__ = forward


class Encoder(Module):
    """Self-attention stack: embedded tokens (T, d) -> contextual states (T, d)."""

    def __init__(self, d: int, heads: int, n_layers: int, ff_dim: int, dropout_p: float,
                 rng, dtype=np.float64):
        super().__init__()
        self.block = [EncoderBlock(d, heads, ff_dim, dropout_p, rng, dtype=dtype)
                      for _ in range(n_layers)]
        self.ln_final = LayerNorm(d, dtype=dtype)

    def forward(self, x: Tensor, key_mask) -> Tensor:
        key_mask = np.asarray(key_mask, dtype=bool)
        if key_mask.shape != (x.shape[0],):
            raise ShapeError(f"key mask shape {key_mask.shape} does not match {x.shape[0]} positions")
        for block in self.block:
            x = block(x, key_mask)
        return self.ln_final(x)

    __call__ = forward


class DecoderBlock(Module):
    def __init__(self, d: int, heads: int, ff_dim: int, dropout_p: float, rng, dtype=np.float64):
        super().__init__()
        self.ln1 = LayerNorm(d, dtype=dtype)
        self.self_attn = MultiHeadAttention(d, heads, rng, dtype=dtype)
        self.ln2 = LayerNorm(d, dtype=dtype)
        self.cross_attn = MultiHeadAttention(d, heads, rng, dtype=dtype)
        self.ln3 = LayerNorm(d, dtype=dtype)
        self.ff = Mlp(d, ff_dim, d, rng, dtype=dtype)
        self.drop = Dropout(dropout_p, rng)

    def forward(self, x: Tensor, context: Tensor, causal_mask, context_mask) -> Tensor:
        h = self.ln1(x)
        x = add(x, self.drop(self.self_attn(h, h, causal_mask)))
        x = add(x, self.drop(self.cross_attn(self.ln2(x), context, context_mask)))
        x = add(x, self.drop(self.ff(self.ln3(x))))
        return x

    __call__ = forward


class Decoder(Module):
    """Causal self-attention plus cross-attention over a fused context."""

    def __init__(self, d: int, heads: int, n_layers: int, ff_dim: int, dropout_p: float,
                 rng, dtype=np.float64):
        super().__init__()
        self.block = [DecoderBlock(d, heads, ff_dim, dropout_p, rng, dtype=dtype)
                      for _ in range(n_layers)]
        self.ln_final = LayerNorm(d, dtype=dtype)

    def forward(self, x: Tensor, context: Tensor, context_mask) -> Tensor:
        t = x.shape[0]
        causal_mask = np.tril(np.ones((t, t), dtype=bool))
        context_mask = np.asarray(context_mask, dtype=bool)
        if context_mask.shape != (context.shape[0],):
            raise ShapeError(
                f"context mask shape {context_mask.shape} does not match {context.shape[0]} rows")
        for block in self.block:
            x = block(x, context, causal_mask, context_mask)
        return self.ln_final(x)

    __call__ = forward
