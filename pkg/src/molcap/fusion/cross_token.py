"""Cross-token attention fusion.

Graph node embeddings query SMILES token embeddings:

    Q = Z Wq,  K = S* Wk,  V = S* Wv
    H = softmax(Q K^T / sqrt(d_k)) V        (padded SMILES keys excluded)
    H' = LayerNorm(H + Z)
    O  = MLP(H')

The block preserves graph length: output is (l, d) with pad rows re-zeroed.
Mean pooling summarizes the valid rows into one vector, and the decoder
context is assembled as [prompt, pooled graph, graph, SMILES] with segments
dropped according to the active input configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..graph_encoder import GraphEmbedding
from ..numerics import (
    ContractError,
    LayerNorm,
    Linear,
    Mlp,
    Module,
    Parameter,
    ShapeError,
    Tensor,
    add,
    concat,
    matmul,
    mean_rows,
    merge_heads,
    mul,
    scale,
    softmax,
    split_heads,
    transpose,
    uniform_init,
)

SEGMENT_ORDER = ("prompt", "graph_pool", "graph", "smiles")


@dataclass
class FusedDecoderInput:
    values: Tensor                 # (L, d)
    mask: np.ndarray               # bool (L,)
    segments: list                 # [(name, offset, length)] in SEGMENT_ORDER

    @property
    def length(self) -> int:
        return self.values.shape[0]

    def offset_of(self, name: str) -> int:
        for seg_name, offset, _ in self.segments:
            if seg_name == name:
                return offset
        raise KeyError(f"no segment named {name!r}")


class CrossTokenAttention(Module):
    """Single-head by default (d_k = d_v = d); optional multi-head split and
    optional post-block self-attention over the fused graph rows."""

    def __init__(self, d: int, d_k: int | None = None, heads: int = 1,
                 post_self_attention: bool = False, rng=None, dtype=np.float64):
        super().__init__()
        d_k = d if d_k is None else d_k
        if heads < 1 or d_k % heads != 0 or d % heads != 0:
            raise ShapeError(f"head count {heads} must divide d_k={d_k} and d={d}")
        self.d = d
        self.d_k = d_k
        self.heads = heads
        self.w_q = Parameter(uniform_init(rng, (d, d_k), d, dtype))
        self.w_k = Parameter(uniform_init(rng, (d, d_k), d, dtype))
        self.w_v = Parameter(uniform_init(rng, (d, d), d, dtype))
        self.ln = LayerNorm(d, dtype=dtype)
        self.mlp = Mlp(d, d, d, rng, dtype=dtype)
        self.post_self_attention = post_self_attention
        if post_self_attention:
            self.self_w_q = Linear(d, d, rng, bias=False, dtype=dtype)
            self.self_w_k = Linear(d, d, rng, bias=False, dtype=dtype)
            self.self_w_v = Linear(d, d, rng, bias=False, dtype=dtype)
            self.ln_post = LayerNorm(d, dtype=dtype)
        self.last_probs = None

    def _heads_split(self, x: Tensor, t: int, width: int) -> Tensor:
        return transpose(reshape(x, (t, self.heads, width)), (1, 0, 2))

    def forward(self, graph_emb: GraphEmbedding, smiles_emb: Tensor, smiles_mask) -> Tensor:
        smiles_mask = np.asarray(smiles_mask, dtype=bool)
        if not smiles_mask.any():
            raise ContractError("cross-token attention needs at least one unmasked SMILES key")
        z = graph_emb.values
        if z.shape[1] != self.d or smiles_emb.shape[1] != self.d:
            raise ShapeError(
                f"width mismatch: block d={self.d}, graph {z.shape}, smiles {smiles_emb.shape}")
        l, n = z.shape[0], smiles_emb.shape[0]

        q = matmul(z, self.w_q)
        k = matmul(smiles_emb, self.w_k)
        v = matmul(smiles_emb, self.w_v)
        if self.heads == 1:
            scores = scale(matmul(q, transpose(k)), 1.0 / np.sqrt(self.d_k))
            probs = softmax(scores, smiles_mask[None, :])
            h = matmul(probs, v)
        else:
            head_k = self.d_k // self.heads
            q = self._heads_split(q, l, head_k)
            k = self._heads_split(k, n, head_k)
            v = self._heads_split(v, n, self.d // self.heads)
            scores = scale(matmul(q, transpose(k, (0, 2, 1))), 1.0 / np.sqrt(head_k))
            probs = softmax(scores, smiles_mask[None, None, :])
            h = reshape(transpose(matmul(probs, v), (1, 0, 2)), (l, self.d))
        self.last_probs = probs.data

        refined = self.ln(add(h, z))
        out = self.mlp(refined)
        if self.post_self_attention:
            sq = self.self_w_q(out)
            sk = self.self_w_k(out)
            sv = self.self_w_v(out)
            self_scores = scale(matmul(sq, transpose(sk)), 1.0 / np.sqrt(self.d))
            self_probs = softmax(self_scores, graph_emb.mask[None, :])
            out = self.ln_post(add(out, matmul(self_probs, sv)))
        # pad rows were recomputed above; re-zero them before assembly
        pad_zero = Tensor(graph_emb.mask.astype(out.dtype)[:, None])
        return mul(out, pad_zero)

    __call__ = forward


def cross_token_attention(block: CrossTokenAttention, graph_emb: GraphEmbedding,
                          smiles_emb: Tensor, smiles_mask) -> Tensor:
    return block(graph_emb, smiles_emb, smiles_mask)


def mean_pool(o_g: Tensor, mask) -> Tensor:
    """Arithmetic mean over the mask-true rows only: (l, d) -> (1, d)."""
    return mean_rows(o_g, mask)


def assemble_decoder_input(prompt_emb: Tensor, prompt_mask,
                           pooled: Tensor | None = None,
                           graph_emb: Tensor | None = None, graph_mask=None,
                           smiles_emb: Tensor | None = None, smiles_mask=None) -> FusedDecoderInput:
    """Concatenate [prompt, pooled graph, graph, SMILES] rows and masks.

    Graph and SMILES parts are optional; omitted parts leave no rows, so an
    input configuration without graphs yields [prompt, SMILES].
    """
    d = prompt_emb.shape[1]
    parts = [("prompt", prompt_emb, np.asarray(prompt_mask, dtype=bool))]
    if pooled is not None:
        parts.append(("graph_pool", pooled, np.ones(pooled.shape[0], dtype=bool)))
    if graph_emb is not None:
        parts.append(("graph", graph_emb, np.asarray(graph_mask, dtype=bool)))
    if smiles_emb is not None:
        parts.append(("smiles", smiles_emb, np.asarray(smiles_mask, dtype=bool)))

    segments = []
    offset = 0
    for name, values, mask in parts:
        if values.shape[1] != d:
            raise ShapeError(f"segment {name!r} width {values.shape[1]} != prompt width {d}")
        if mask.shape != (values.shape[0],):
            raise ShapeError(f"segment {name!r} mask shape {mask.shape} != {values.shape[0]} rows")
        segments.append((name, offset, values.shape[0]))
        offset += values.shape[0]

    values = concat([p[1] for p in parts], axis=0)
    mask = np.concatenate([p[2] for p in parts])
    return FusedDecoderInput(values=values, mask=mask, segments=segments)
