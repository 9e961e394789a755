"""Run and ablation configuration.

Defaults are the full-scale training setup (120 epochs, lr 1e-4, batch 14,
dropout 0.1, 12 layers / 12 heads). desk_scale() and tiny() shrink the
model to sizes that train and grad-check on one CPU core.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


class ConfigError(ValueError):
    pass


@dataclass
class AblationConfig:
    use_graph: bool = True
    use_smiles: bool = True
    use_cross_token_attention: bool = True

    def __post_init__(self):
        if not (self.use_graph or self.use_smiles):
            raise ConfigError("at least one of graph/SMILES inputs must be enabled")
        if self.use_cross_token_attention and not self.use_graph:
            raise ConfigError("cross-token attention requires the graph input")

    def label(self) -> str:
        parts = []
        if self.use_graph:
            parts.append("graph")
        if self.use_smiles:
            parts.append("smiles")
        if self.use_cross_token_attention:
            parts.append("cta")
        return "+".join(parts)


@dataclass
class RunConfig:
    # training
    epochs: int = 120
    learning_rate: float = 1e-4
    batch_size: int = 14
    dropout: float = 0.1
    seed: int = 0
    # architecture
    layers: int = 12
    heads: int = 12
    d: int = 256               # token embedding width
    d_g: int = 128             # GIN hidden width
    smiles_budget: int = 128   # fixed SMILES token length |n|
    target_budget: int = 128   # caption token budget |m|
    prompt_budget: int = 16    # prompt token budget |P|
    graph_len: int = 64        # fixed graph embedding length l
    vocab_size: int = 2048     # tokenizer target size V
    ff_mult: int = 4           # feed-forward width multiplier
    cta_heads: int = 1         # cross-token attention heads (1 = the single-head form)
    post_self_attention: bool = False
    # decoding / numerics
    decode_strategy: str = "greedy"
    beam_width: int = 4
    precision: str = "float32"  # float32 for training throughput, float64 for checks

    def __post_init__(self):
        positive = ("epochs", "batch_size", "layers", "heads", "d", "d_g", "smiles_budget",
                    "target_budget", "prompt_budget", "graph_len", "vocab_size", "ff_mult",
                    "cta_heads", "beam_width")
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be non-negative")
        if not (0.0 <= self.dropout < 1.0):
            raise ConfigError("dropout must be in [0, 1)")
        if self.d % self.heads != 0:
            raise ConfigError(f"d={self.d} must be divisible by heads={self.heads}")
        if self.prompt_budget > self.smiles_budget:
            raise ConfigError("prompt budget cannot exceed the SMILES budget "
                              "(the encoder position table covers both)")
        if self.decode_strategy not in ("greedy", "beam"):
            raise ConfigError(f"unknown decode strategy {self.decode_strategy!r}")
        if self.precision not in ("float32", "float64"):
            raise ConfigError(f"unknown precision {self.precision!r}")

    @property
    def context_budget(self) -> int:
        """Maximum fused decoder context length: |P| + 1 + l + |n|."""
        return self.prompt_budget + 1 + self.graph_len + self.smiles_budget

    @classmethod
    def desk_scale(cls, **overrides) -> "RunConfig":
        base = dict(layers=2, heads=4, d=256, d_g=128, smiles_budget=128, target_budget=128,
                    graph_len=64, vocab_size=2048, epochs=30, learning_rate=3e-4, batch_size=8)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def tiny(cls, **overrides) -> "RunConfig":
        base = dict(layers=2, heads=2, d=32, d_g=16, smiles_budget=24, target_budget=24,
                    prompt_budget=12, graph_len=8, vocab_size=192, ff_mult=2, epochs=4,
                    learning_rate=1e-3, batch_size=4, dropout=0.0, precision="float64")
        base.update(overrides)
        return cls(**base)


_CONFIG_FIELDS = {f.name: f.type for f in fields(RunConfig)}
_ABLATION_FIELDS = {f.name: f.type for f in fields(AblationConfig)}


def _coerce(name: str, text: str):
    text = text.strip()
    if name in ("learning_rate", "dropout"):
        return float(text)
    if name in ("decode_strategy", "precision"):
        return text
    if name in _ABLATION_FIELDS or name == "post_self_attention":
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name} expects a boolean, got {text!r}")
    return int(text)


def parse_config_file(path) -> dict:
    """Parse `key = value` lines; '#' starts a comment. Returns raw overrides."""
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_FIELDS and key not in _ABLATION_FIELDS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            overrides[key] = _coerce(key, value)
    return overrides


def split_overrides(overrides: dict) -> tuple[dict, dict]:
    """Split raw overrides into (RunConfig kwargs, AblationConfig kwargs)."""
    run = {k: v for k, v in overrides.items() if k in _CONFIG_FIELDS}
    ablation = {k: v for k, v in overrides.items() if k in _ABLATION_FIELDS}
    return run, ablation
