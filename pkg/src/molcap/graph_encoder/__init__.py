from .gin import (
    GinLayer,
    GraphEmbedding,
    GraphEncoder,
    GraphEncoderConfig,
    N_GIN_LAYERS,
    gin_layer_forward,
)

__all__ = [
    "GinLayer", "GraphEmbedding", "GraphEncoder", "GraphEncoderConfig",
    "N_GIN_LAYERS", "gin_layer_forward",
]
