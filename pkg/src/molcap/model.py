"""Full captioning model: shared token embedding, SMILES/prompt encoder,
GIN graph encoder, cross-token attention fusion, and the caption decoder.

The decoder consumes a fused context of [prompt, pooled graph, graph,
SMILES] segments; an AblationConfig switches individual segments off.
Component invocations are counted so input configurations can be shown to
leave disabled components untouched.
"""

from __future__ import annotations

from dataclasses import asdict

import numpy as np

from . import chem
from .config import AblationConfig, RunConfig
from .fusion import CrossTokenAttention, FusedDecoderInput, assemble_decoder_input, mean_pool
from .graph_encoder import GraphEncoder, GraphEncoderConfig
from .prompts import build_prompt
from .numerics import (
    CheckpointError,
    Dropout,
    Embedding,
    Module,
    Parameter,
    Tensor,
    add,
    cross_entropy,
    load_checkpoint,
    matmul,
    narrow,
    save_checkpoint,
    transpose,
    uniform_init,
)
from .text_model import (
    Decoder,
    Encoder,
    PAD_ID,
    START_ID,
    TokenSequence,
    Vocabulary,
    encode_text,
    generate,
)


class VersionError(CheckpointError):
    """Checkpoint does not match the loaded vocabulary or model layout."""


class MoleculeCaptioner(Module):
    def __init__(self, config: RunConfig, vocab: Vocabulary, rng: np.random.Generator | None = None):
        super().__init__()
        self.config = config
        self.vocab = vocab
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        dtype = np.float64 if config.precision == "float64" else np.float32
        self.dtype = dtype
        d = config.d
        ff_dim = d * config.ff_mult

        self.embedding = Embedding(vocab.size, d, self.rng, dtype=dtype)
        self.enc_pos = Parameter(uniform_init(self.rng, (config.smiles_budget, d), d, dtype))
        self.dec_pos = Parameter(uniform_init(self.rng, (config.target_budget, d), d, dtype))
        self.ctx_pos = Parameter(uniform_init(self.rng, (config.context_budget, d), d, dtype))
        self.encoder = Encoder(d, config.heads, config.layers, ff_dim, config.dropout,
                               self.rng, dtype=dtype)
        self.decoder = Decoder(d, config.heads, config.layers, ff_dim, config.dropout,
                               self.rng, dtype=dtype)
        self.graph_encoder = GraphEncoder(
            GraphEncoderConfig(d_g=config.d_g, l=config.graph_len, d=d), self.rng, dtype=dtype)
        self.fusion = CrossTokenAttention(
            d, heads=config.cta_heads, post_self_attention=config.post_self_attention,
            rng=self.rng, dtype=dtype)
        self.drop = Dropout(config.dropout, self.rng)

        self.assign_names()
        self.counters = {"smiles_to_graph": 0, "encode_graph": 0,
                         "encode_text": 0, "cross_token_attention": 0}
        self._graph_cache: dict[str, chem.MolGraph] = {}
        self._prompt_cache: dict[str, TokenSequence] = {}

    def reset_counters(self) -> None:
        for key in self.counters:
            self.counters[key] = 0

    # ------------------------------------------------------------------
    # component forwards
    # ------------------------------------------------------------------

    def encode_sequence(self, seq: TokenSequence) -> Tensor:
        """Token ids -> contextual embeddings (T, d) via the text encoder."""
        self.counters["encode_text"] += 1
        t = len(seq.ids)
        emb = add(self.embedding(seq.ids), narrow(self.enc_pos, 0, t))
        return self.encoder(self.drop(emb), seq.mask)

    def mol_graph(self, smiles: str) -> chem.MolGraph:
        graph = self._graph_cache.get(smiles)
        if graph is None:
            self.counters["smiles_to_graph"] += 1
            graph = chem.smiles_to_graph(smiles)
            self._graph_cache[smiles] = graph
        return graph

    def _prompt_sequence(self, task: str) -> TokenSequence:
        seq = self._prompt_cache.get(task)
        if seq is None:
            seq = encode_text(self.vocab, build_prompt(task), self.config.prompt_budget)
            self._prompt_cache[task] = seq
        return seq

    def build_context(self, smiles: str, task: str, ablation: AblationConfig) -> FusedDecoderInput:
        """Assemble the decoder context for one molecule under an input config."""
        prompt_seq = self._prompt_sequence(task)
        prompt_enc = self.encode_sequence(prompt_seq)

        smiles_enc = None
        smiles_seq = None
        if ablation.use_smiles or ablation.use_cross_token_attention:
            smiles_seq = encode_text(self.vocab, smiles, self.config.smiles_budget)
            smiles_enc = self.encode_sequence(smiles_seq)

        pooled = graph_values = graph_mask = None
        if ablation.use_graph:
            self.counters["encode_graph"] += 1
            graph_emb = self.graph_encoder.encode(self.mol_graph(smiles))
            if ablation.use_cross_token_attention:
                self.counters["cross_token_attention"] += 1
                graph_values = self.fusion(graph_emb, smiles_enc, smiles_seq.mask)
            else:
                graph_values = graph_emb.values
            graph_mask = graph_emb.mask
            pooled = mean_pool(graph_values, graph_emb.mask)

        return assemble_decoder_input(
            prompt_enc, prompt_seq.mask,
            pooled=pooled,
            graph_emb=graph_values, graph_mask=graph_mask,
            smiles_emb=smiles_enc if ablation.use_smiles else None,
            smiles_mask=smiles_seq.mask if ablation.use_smiles else None,
        )

    def decoder_logits(self, context: FusedDecoderInput, prefix_ids) -> Tensor:
        """Causal decoding over a target prefix: -> logits (T, vocab)."""
        prefix_ids = np.asarray(prefix_ids, dtype=np.int64)
        t = prefix_ids.shape[0]
        emb = self.drop(add(self.embedding(prefix_ids), narrow(self.dec_pos, 0, t)))
        ctx = add(context.values, narrow(self.ctx_pos, 0, context.length))
        hidden = self.decoder(emb, ctx, context.mask)
        return matmul(hidden, transpose(self.embedding.table))  # tied output projection

    def caption_loss(self, context: FusedDecoderInput, target: TokenSequence) -> Tensor:
        """Teacher-forced cross-entropy over the target caption."""
        ids = target.ids
        prefix = np.concatenate(([START_ID], ids[:-1]))
        logits = self.decoder_logits(context, prefix)
        return cross_entropy(logits, ids, ignore_id=PAD_ID)

    def loss_for(self, smiles: str, description: str, task: str, ablation: AblationConfig) -> Tensor:
        context = self.build_context(smiles, task, ablation)
        target = encode_text(self.vocab, description, self.config.target_budget)
        return self.caption_loss(context, target)

    def generate_caption(self, smiles: str, task: str, ablation: AblationConfig,
                         strategy: str | None = None, beam_width: int | None = None) -> str:
        context = self.build_context(smiles, task, ablation)
        return generate(self, context,
                        strategy=strategy or self.config.decode_strategy,
                        beam_width=beam_width or self.config.beam_width)

    # ------------------------------------------------------------------
    # checkpointing
    # ------------------------------------------------------------------

    def save(self, path, ablation: AblationConfig | None = None) -> None:
        header = {
            "config": asdict(self.config),
            "ablation": asdict(ablation) if ablation is not None else None,
            "vocab_size": self.vocab.size,
            "vocab_hash": self.vocab.content_hash(),
        }
        save_checkpoint(path, {name: p.data for name, p in self.named_parameters()}, header)

    def load_state(self, arrays: dict) -> None:
        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(arrays))
        unexpected = sorted(set(arrays) - set(own))
        if missing or unexpected:
            raise VersionError(f"checkpoint/model mismatch: missing {missing}, unexpected {unexpected}")
        for name, p in own.items():
            arr = arrays[name]
            if arr.shape != p.data.shape:
                raise VersionError(f"parameter {name!r} shape {arr.shape} != model {p.data.shape}")
            p.data = arr.astype(self.dtype, copy=True)

    @classmethod
    def load(cls, checkpoint_path, vocab: Vocabulary):
        """Returns (model, ablation config stored at save time)."""
        header, arrays = load_checkpoint(checkpoint_path)
        if header.get("vocab_hash") != vocab.content_hash():
            raise VersionError("checkpoint was trained with a different vocabulary")
        config = RunConfig(**header["config"])
        model = cls(config, vocab)
        model.load_state(arrays)
        model.eval()
        ablation = header.get("ablation")
        return model, (AblationConfig(**ablation) if ablation else None)
