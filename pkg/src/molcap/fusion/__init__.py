from .cross_token import (
    CrossTokenAttention,
    FusedDecoderInput,
    SEGMENT_ORDER,
    assemble_decoder_input,
    cross_token_attention,
    mean_pool,
)

__all__ = [
    "CrossTokenAttention", "FusedDecoderInput", "SEGMENT_ORDER",
    "assemble_decoder_input", "cross_token_attention", "mean_pool",
]
