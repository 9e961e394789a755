"""Small parameter-container layer on top of the tensor ops.

Modules hold Parameters (directly, in child modules, or in lists of
children) and expose deterministic iteration for init, naming, and
checkpointing. Linear weights initialize uniform in
[-1/sqrt(fan_in), +1/sqrt(fan_in)], biases at zero, LayerNorm at
gamma=1/beta=0, all drawn from a caller-supplied seeded generator.
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Parameter, Tensor


class Module:
    def __init__(self):
        self.training = True

    def _children(self):
        """Yield (name, Parameter | Module) in attribute insertion order.

        List/tuple attributes of modules or parameters are flattened as
        name0, name1, ... so checkpoint names stay stable.
        """
        for key, value in vars(self).items():
            if isinstance(value, Parameter):
                yield key, value
            elif isinstance(value, Module):
                yield key, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, (Parameter, Module)):
                        yield f"{key}{i}", item

    def named_parameters(self, prefix: str = ""):
        for name, child in self._children():
            path = f"{prefix}.{name}" if prefix else name
            if isinstance(child, Parameter):
                yield path, child
            else:
                yield from child.named_parameters(path)

    def parameters(self) -> list[Parameter]:
        seen = set()
        out = []
        for _, p in self.named_parameters():
            if id(p) not in seen:
                seen.add(id(p))
                out.append(p)
        return out

    def assign_names(self, prefix: str = "") -> None:
        """Stamp dotted-path names onto every parameter; names must be unique."""
        names = set()
        for path, p in self.named_parameters(prefix):
            if path in names:
                raise ValueError(f"duplicate parameter name {path!r}")
            names.add(path)
            p.name = path

    def modules(self):
        yield self
        for _, child in self._children():
            if isinstance(child, Module):
                yield from child.modules()

    def train(self, mode: bool = True) -> None:
        for m in self.modules():
            m.training = mode

    def eval(self) -> None:
        self.train(False)

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None


def uniform_init(rng: np.random.Generator, shape, fan_in: int, dtype) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Linear(Module):
    """y = x @ w + b with w (d_in, d_out)."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, bias: bool = True, dtype=np.float64):
        super().__init__()
        self.w = Parameter(uniform_init(rng, (d_in, d_out), d_in, dtype))
        self.b = Parameter(np.zeros(d_out, dtype=dtype)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        out = T.matmul(x, self.w)
        if self.b is not None:
            out = T.add(out, self.b)
        return out

    __call__ = forward


class Mlp(Module):
    """Two-layer MLP with a ReLU between the layers."""

    def __init__(self, d_in: int, d_hidden: int, d_out: int, rng, dtype=np.float64):
        super().__init__()
        self.fc1 = Linear(d_in, d_hidden, rng, dtype=dtype)
        self.fc2 = Linear(d_hidden, d_out, rng, dtype=dtype)

    def forward(self, x: Tensor) -> Tensor:
        return self.fc2(T.relu(self.fc1(x)))

    __call__ = forward


class LayerNorm(Module):
    def __init__(self, d: int, eps: float = 1e-5, dtype=np.float64):
        super().__init__()
        self.gamma = Parameter(np.ones(d, dtype=dtype))
        self.beta = Parameter(np.zeros(d, dtype=dtype))
        self.eps = eps

    def forward(self, x: Tensor) -> Tensor:
        return T.layer_norm(x, self.gamma, self.beta, self.eps)

    __call__ = forward


class Embedding(Module):
    def __init__(self, n_rows: int, d: int, rng, dtype=np.float64):
        super().__init__()
        self.table = Parameter(uniform_init(rng, (n_rows, d), d, dtype))

    def forward(self, ids) -> Tensor:
        return T.embedding(self.table, ids)

    __call__ = forward


class Dropout(Module):
    def __init__(self, p: float, rng: np.random.Generator):
        super().__init__()
        self.p = p
        self.rng = rng

    def forward(self, x: Tensor) -> Tensor:
        return T.dropout(x, self.p, self.rng, self.training)

    __call__ = forward
