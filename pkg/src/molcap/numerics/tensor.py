"""Dense tensors with reverse-mode automatic differentiation.

Everything is numpy-backed. Each differentiable op computes its forward
result eagerly and, when a gradient tape is active, records a backward
closure on it. ``backward(loss)`` replays the tape in exact reverse
execution order, summing gradients across fan-out.

Ops raise ``NonFiniteError`` if a forward result contains NaN/Inf, so
divergence is caught at the op that produced it.
"""

from __future__ import annotations

import threading

import numpy as np

DEFAULT_DTYPE = np.float64


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested op."""


class ContractError(ValueError):
    """An op was called outside its contract (empty mask, non-scalar loss, ...)."""


class NonFiniteError(ArithmeticError):
    """A forward op produced NaN or Inf."""


_tls = threading.local()


def _tape_stack() -> list:
    stack = getattr(_tls, "tapes", None)
    if stack is None:
        stack = []
        _tls.tapes = stack
    return stack


def active_tape():
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape:
    """Ordered record of executed differentiable ops for one forward pass."""

    def __init__(self):
        self._records = []  # (output Tensor, backward closure)

    def __enter__(self):
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tape_stack().pop()
        return False

    def __len__(self):
        return len(self._records)


def _check_finite(data: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"non-finite values produced by {where}")


class Tensor:
    """Dense array with optional gradient tracking.

    data is always a float ndarray; grad, once populated, has the same
    shape and dtype as data.
    """

    __slots__ = ("data", "requires_grad", "grad", "_tape")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype.kind != "f":
            arr = arr.astype(DEFAULT_DTYPE)
        _check_finite(arr, "tensor construction")
        self.data = arr
        self.requires_grad = requires_grad
        self.grad = None
        self._tape = None

    @classmethod
    def _wrap(cls, data: np.ndarray, requires_grad: bool) -> "Tensor":
        # fast path for op results: data is already a checked float ndarray
        out = object.__new__(cls)
        out.data = data
        out.requires_grad = requires_grad
        out.grad = None
        out._tape = None
        return out

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # operator sugar; all routed through the module-level ops
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)


class Parameter(Tensor):
    """Trainable tensor with a stable dotted-path name for checkpointing."""

    __slots__ = ("name",)

    def __init__(self, data, name: str = "", dtype=None):
        super().__init__(data, requires_grad=True, dtype=dtype)
        self.name = name

    def __repr__(self):
        return f"Parameter(name={self.name!r}, shape={self.data.shape})"


def _as_tensor(x, like: Tensor) -> Tensor:
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=like.dtype))


def _record(data: np.ndarray, inputs, backward_fn, op: str) -> Tensor:
    """Wrap a forward result; register backward_fn on the active tape."""
    _check_finite(data, op)
    requires = any(t.requires_grad for t in inputs)
    out = Tensor._wrap(np.asarray(data), requires)
    tape = active_tape()
    if tape is not None and requires:
        tape._records.append((out, backward_fn))
        out._tape = tape
    return out


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        t.grad = np.array(g, dtype=t.dtype, copy=True)
    else:
        t.grad += g


def backward(loss: Tensor) -> None:
    """Populate .grad on every tensor reachable from loss.

    Seeds d(loss)/d(loss) = 1 and replays the tape in reverse execution
    order; fan-out gradients are summed.
    """
    if loss.shape != ():
        raise ContractError(f"backward requires a scalar loss, got shape {loss.shape}")
    tape = loss._tape
    if tape is None:
        raise ContractError("loss was not recorded on an active tape")
    if loss.grad is None:
        loss.grad = np.ones((), dtype=loss.dtype)
    for out, backward_fn in reversed(tape._records):
        if out.grad is None:
            continue  # this output does not influence the loss
        for t, g in backward_fn(out.grad):
            if t.requires_grad:
                _accumulate(t, g)


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to the original operand shape."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# elementwise / arithmetic ops
# ---------------------------------------------------------------------------


def add(a: Tensor, b) -> Tensor:
    b = _as_tensor(b, a)

    def bwd(g):
        return [(a, _unbroadcast(g, a.shape)), (b, _unbroadcast(g, b.shape))]

    return _record(a.data + b.data, (a, b), bwd, "add")


def sub(a: Tensor, b) -> Tensor:
    b = _as_tensor(b, a)

    def bwd(g):
        return [(a, _unbroadcast(g, a.shape)), (b, _unbroadcast(-g, b.shape))]

    return _record(a.data - b.data, (a, b), bwd, "sub")


def mul(a: Tensor, b) -> Tensor:
    b = _as_tensor(b, a)

    def bwd(g):
        return [
            (a, _unbroadcast(g * b.data, a.shape)),
            (b, _unbroadcast(g * a.data, b.shape)),
        ]

    return _record(a.data * b.data, (a, b), bwd, "mul")


def neg(a: Tensor) -> Tensor:
    def bwd(g):
        return [(a, -g)]

    return _record(-a.data, (a,), bwd, "neg")


def scale(a: Tensor, s: float) -> Tensor:
    s = float(s)

    def bwd(g):
        return [(a, g * s)]

    return _record(a.data * s, (a,), bwd, "scale")


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def bwd(g):
        return [(a, g * mask)]

    return _record(np.where(mask, a.data, 0.0), (a,), bwd, "relu")


def sum_all(a: Tensor) -> Tensor:
    def bwd(g):
        return [(a, np.full(a.shape, g, dtype=a.dtype))]

    return _record(a.data.sum(), (a,), bwd, "sum_all")


# ---------------------------------------------------------------------------
# shape ops
# ---------------------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product. 2-D operands, or equal-rank 3-D stacks (batched)."""
    if a.data.ndim != b.data.ndim or a.data.ndim not in (2, 3):
        raise ShapeError(f"matmul supports 2-D or batched 3-D operands, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2] or (a.data.ndim == 3 and a.shape[0] != b.shape[0]):
        raise ShapeError(f"matmul shape mismatch: {a.shape} x {b.shape}")

    def bwd(g):
        return [
            (a, g @ np.swapaxes(b.data, -1, -2)),
            (b, np.swapaxes(a.data, -1, -2) @ g),
        ]

    return _record(a.data @ b.data, (a, b), bwd, "matmul")


def transpose(a: Tensor, axes=None) -> Tensor:
    if axes is None:
        axes = tuple(reversed(range(a.data.ndim)))
    inverse = tuple(np.argsort(axes))

    def bwd(g):
        return [(a, np.transpose(g, inverse))]

    return _record(np.transpose(a.data, axes), (a,), bwd, "transpose")


def reshape(a: Tensor, shape) -> Tensor:
    old = a.shape

    def bwd(g):
        return [(a, g.reshape(old))]

    return _record(a.data.reshape(shape), (a,), bwd, "reshape")


def concat(parts, axis: int = 0) -> Tensor:
    parts = list(parts)
    sizes = [p.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def bwd(g):
        return list(zip(parts, np.split(g, splits, axis=axis)))

    return _record(np.concatenate([p.data for p in parts], axis=axis), tuple(parts), bwd, "concat")


def narrow(a: Tensor, start: int, stop: int) -> Tensor:
    """Slice rows [start:stop) along the first axis."""
    if not (0 <= start <= stop <= a.shape[0]):
        raise ShapeError(f"narrow range [{start}:{stop}) out of bounds for shape {a.shape}")

    def bwd(g):
        full = np.zeros(a.shape, dtype=a.dtype)
        full[start:stop] = g
        return [(a, full)]

    return _record(a.data[start:stop].copy(), (a,), bwd, "narrow")


def split_heads(a: Tensor, heads: int) -> Tensor:
    """(T, d) -> (heads, T, d/heads) in one recorded op."""
    t, d = a.shape
    if d % heads != 0:
        raise ShapeError(f"width {d} is not divisible by {heads} heads")
    hd = d // heads

    def bwd(g):
        return [(a, np.ascontiguousarray(g.transpose(1, 0, 2)).reshape(t, d))]

    return _record(np.ascontiguousarray(a.data.reshape(t, heads, hd).transpose(1, 0, 2)),
                   (a,), bwd, "split_heads")


def merge_heads(a: Tensor) -> Tensor:
    """(heads, T, hd) -> (T, heads*hd), inverse of split_heads."""
    heads, t, hd = a.shape

    def bwd(g):
        return [(a, np.ascontiguousarray(g.reshape(t, heads, hd).transpose(1, 0, 2)))]

    return _record(np.ascontiguousarray(a.data.transpose(1, 0, 2)).reshape(t, heads * hd),
                   (a,), bwd, "merge_heads")


def embedding(table: Tensor, ids) -> Tensor:
    """Row lookup: table (V, d), ids int (T,) -> (T, d)."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1:
        raise ShapeError(f"embedding ids must be 1-D, got {ids.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeError(f"embedding id out of range for table with {table.shape[0]} rows")

    def bwd(g):
        dtable = np.zeros(table.shape, dtype=table.dtype)
        np.add.at(dtable, ids, g)
        return [(table, dtable)]

    return _record(table.data[ids], (table,), bwd, "embedding")


# ---------------------------------------------------------------------------
# normalization / attention / loss ops
# ---------------------------------------------------------------------------


def softmax(a: Tensor, mask=None) -> Tensor:
    """Softmax over the last axis, numerically stabilized by max-subtraction.

    mask, when given, is a boolean array broadcastable to a.shape; False
    entries are excluded (their output probability is exactly zero). Every
    row must keep at least one unmasked entry.
    """
    if a.data.ndim == 0 or a.shape[-1] == 0:
        raise ShapeError(f"softmax needs a non-empty last axis, got shape {a.shape}")
    scores = a.data
    if mask is not None:
        m = np.broadcast_to(np.asarray(mask, dtype=bool), scores.shape)
        if not np.all(m.any(axis=-1)):
            raise ContractError("softmax row with every entry masked")
        scores = np.where(m, scores, -np.inf)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    if mask is not None:
        e = np.where(m, e, 0.0)
    p = e / e.sum(axis=-1, keepdims=True)

    def bwd(g):
        dot = (g * p).sum(axis=-1, keepdims=True)
        return [(a, p * (g - dot))]

    return _record(p, (a,), bwd, "softmax")


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize each row over the last axis to zero mean / unit variance,
    then apply the elementwise affine gamma/beta."""
    d = x.shape[-1]
    if gamma.shape != (d,) or beta.shape != (d,):
        raise ShapeError(f"layer_norm affine shape {gamma.shape}/{beta.shape} does not match width {d}")
    if eps <= 0:
        raise ContractError("layer_norm eps must be positive")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    y = xc * inv

    def bwd(g):
        lead = tuple(range(g.ndim - 1))
        dgamma = (g * y).sum(axis=lead) if lead else g * y
        dbeta = g.sum(axis=lead) if lead else g
        dy = g * gamma.data
        dx = inv * (dy - dy.mean(axis=-1, keepdims=True) - y * (dy * y).mean(axis=-1, keepdims=True))
        return [(x, dx), (gamma, dgamma), (beta, dbeta)]

    return _record(y * gamma.data + beta.data, (x, gamma, beta), bwd, "layer_norm")


def cross_entropy(logits: Tensor, targets, ignore_id: int | None = None) -> Tensor:
    """Mean negative log-softmax probability of targets over non-ignored rows.

    logits (T, V), targets int (T,). Rows whose target equals ignore_id
    contribute nothing.
    """
    if logits.data.ndim != 2:
        raise ShapeError(f"cross_entropy expects 2-D logits, got shape {logits.shape}")
    targets = np.asarray(targets, dtype=np.int64)
    if targets.shape != (logits.shape[0],):
        raise ShapeError(f"targets shape {targets.shape} does not match logits rows {logits.shape[0]}")
    valid = np.ones(targets.shape, dtype=bool) if ignore_id is None else targets != ignore_id
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise ContractError("cross_entropy with every position ignored has no defined mean")
    if targets[valid].min() < 0 or targets[valid].max() >= logits.shape[1]:
        raise ShapeError(f"target id out of range for vocabulary of {logits.shape[1]}")

    shifted = logits.data - logits.data.max(axis=-1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_probs = shifted - log_z
    idx = np.arange(targets.shape[0])
    nll = -log_probs[idx, np.where(valid, targets, 0)]
    loss = (nll * valid).sum() / n_valid

    def bwd(g):
        p = np.exp(log_probs)
        p[idx, np.where(valid, targets, 0)] -= 1.0
        p *= (valid[:, None] * float(g)) / n_valid
        return [(logits, p)]

    return _record(np.asarray(loss), (logits,), bwd, "cross_entropy")


def mean_rows(x: Tensor, row_mask) -> Tensor:
    """Mean over the rows selected by a boolean mask: (N, d) -> (1, d)."""
    row_mask = np.asarray(row_mask, dtype=bool)
    if row_mask.shape != (x.shape[0],):
        raise ShapeError(f"row mask shape {row_mask.shape} does not match {x.shape[0]} rows")
    k = int(row_mask.sum())
    if k == 0:
        raise ContractError("mean over an empty row mask")

    def bwd(g):
        dx = np.zeros(x.shape, dtype=x.dtype)
        dx[row_mask] = g / k
        return [(x, dx)]

    return _record(x.data[row_mask].mean(axis=0, keepdims=True), (x,), bwd, "mean_rows")


def dropout(x: Tensor, p: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout; identity when not training or p == 0."""
    if not training or p <= 0.0:
        return x
    if p >= 1.0:
        raise ContractError("dropout rate must be < 1")
    keep = rng.random(x.shape) >= p
    factor = keep / (1.0 - p)

    def bwd(g):
        return [(x, g * factor)]

    return _record(x.data * factor, (x,), bwd, "dropout")
