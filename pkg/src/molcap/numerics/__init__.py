from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .gradcheck import GradCheckReport, grad_check
from .modules import Dropout, Embedding, LayerNorm, Linear, Mlp, Module, uniform_init
from .tensor import (
    ContractError,
    NonFiniteError,
    Parameter,
    ShapeError,
    Tape,
    Tensor,
    add,
    backward,
    concat,
    cross_entropy,
    dropout,
    embedding,
    layer_norm,
    matmul,
    mean_rows,
    mul,
    narrow,
    neg,
    relu,
    reshape,
    scale,
    softmax,
    sub,
    sum_all,
    transpose,
)

__all__ = [
    "CheckpointError", "load_checkpoint", "save_checkpoint",
    "GradCheckReport", "grad_check",
    "Dropout", "Embedding", "LayerNorm", "Linear", "Mlp", "Module", "uniform_init",
    "ContractError", "NonFiniteError", "Parameter", "ShapeError", "Tape", "Tensor",
    "add", "backward", "concat", "cross_entropy", "dropout", "embedding", "layer_norm",
    "matmul", "mean_rows", "mul", "narrow", "neg", "relu", "reshape", "scale",
    "softmax", "sub", "sum_all", "transpose",
]
