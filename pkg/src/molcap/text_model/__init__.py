from .generate import START_ID, beam_token_ids, generate, greedy_token_ids
from .transformer import Decoder, DecoderBlock, Encoder, EncoderBlock, MultiHeadAttention
from .vocab import (
    EOS_ID,
    PAD_ID,
    RESERVED_TOKENS,
    TokenSequence,
    UNK_ID,
    Vocabulary,
    VocabularyError,
    build_vocab,
    encode_text,
)

__all__ = [
    "START_ID", "beam_token_ids", "generate", "greedy_token_ids",
    "Decoder", "DecoderBlock", "Encoder", "EncoderBlock", "MultiHeadAttention",
    "EOS_ID", "PAD_ID", "RESERVED_TOKENS", "TokenSequence", "UNK_ID",
    "Vocabulary", "VocabularyError", "build_vocab", "encode_text",
]
