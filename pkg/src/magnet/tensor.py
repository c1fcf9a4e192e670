"""Dense tensors with a reverse-mode gradient tape.

Forward ops record parent links and a backward closure; ``backward(loss)``
replays the tape in reverse topological order, accumulating into ``.grad``.
Everything is float64. Rank <= 3; rank-3 arrays act as batched matrices
(leading axis is the batch/head dimension).
"""
from __future__ import annotations

import numpy as np

from contextlib import contextmanager

from .errors import NotScalar, ShapeMismatch
from .rng import Rng

LAYER_NORM_EPS = 1e-5

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable tape recording (pure inference); nested use is fine."""
    global _grad_enabled
    saved = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = saved


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward_fn = None

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        if self.data.size != 1:
            raise NotScalar(f"tensor of shape {self.data.shape} is not a scalar")
        return float(self.data.reshape(()))

    def _acc(self, g: np.ndarray):
        # accumulation always rebinds (never mutates in place), so storing a
        # reference on first touch is safe even when g is shared or read-only
        if self.grad is None:
            self.grad = np.asarray(g, dtype=np.float64)
        else:
            self.grad = self.grad + g

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _record(data: np.ndarray, parents: tuple[Tensor, ...], backward_fn) -> Tensor:
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward_fn = backward_fn
    return out


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum gradient over axes that were broadcast in the forward op."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _check_broadcast(op: str, a: Tensor, b: Tensor):
    try:
        np.broadcast_shapes(a.data.shape, b.data.shape)
    except ValueError:
        raise ShapeMismatch(op, a.data.shape, b.data.shape)


def backward(loss: Tensor):
    """Populate .grad on every requires_grad tensor reachable from loss."""
    if loss.data.size != 1:
        raise NotScalar(f"backward needs a scalar loss, got shape {loss.data.shape}")
    topo: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in visited or not node.requires_grad:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in visited and p.requires_grad:
                stack.append((p, False))
    loss._acc(np.ones_like(loss.data))
    for node in reversed(topo):
        if node._backward_fn is not None:
            node._backward_fn(node.grad)


# ---------------------------------------------------------------------------
# forward ops

def matmul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.data.ndim == 2 and b.data.ndim == 2:
        if a.data.shape[1] != b.data.shape[0]:
            raise ShapeMismatch("matmul", a.data.shape, b.data.shape)
    elif a.data.ndim == 3 and b.data.ndim == 3:
        if a.data.shape[0] != b.data.shape[0] or a.data.shape[2] != b.data.shape[1]:
            raise ShapeMismatch("matmul", a.data.shape, b.data.shape)
    else:
        raise ShapeMismatch("matmul", a.data.shape, b.data.shape)
    out_data = a.data @ b.data

    def bw(g):
        if a.requires_grad:
            a._acc(g @ np.swapaxes(b.data, -1, -2))
        if b.requires_grad:
            b._acc(np.swapaxes(a.data, -1, -2) @ g)
    return _record(out_data, (a, b), bw)


def add(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("add", a, b)

    def bw(g):
        if a.requires_grad:
            a._acc(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._acc(_unbroadcast(g, b.data.shape))
    return _record(a.data + b.data, (a, b), bw)


def sub(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("sub", a, b)

    def bw(g):
        if a.requires_grad:
            a._acc(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b._acc(_unbroadcast(-g, b.data.shape))
    return _record(a.data - b.data, (a, b), bw)


def scale(x: Tensor, c: float) -> Tensor:
    x = _as_tensor(x)

    def bw(g):
        if x.requires_grad:
            x._acc(g * c)
    return _record(x.data * c, (x,), bw)


def elementwise_mul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("elementwise_mul", a, b)

    def bw(g):
        if a.requires_grad:
            a._acc(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b._acc(_unbroadcast(g * a.data, b.data.shape))
    return _record(a.data * b.data, (a, b), bw)


def divide(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _check_broadcast("divide", a, b)

    def bw(g):
        if a.requires_grad:
            a._acc(_unbroadcast(g / b.data, a.data.shape))
        if b.requires_grad:
            b._acc(_unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))
    return _record(a.data / b.data, (a, b), bw)


def relu(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    out_data = np.maximum(x.data, 0.0)

    def bw(g):
        if x.requires_grad:
            x._acc(g * (x.data > 0.0))
    return _record(out_data, (x,), bw)


def sigmoid(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    out_data = np.where(x.data >= 0, 1.0 / (1.0 + np.exp(-np.abs(x.data))),
                        np.exp(-np.abs(x.data)) / (1.0 + np.exp(-np.abs(x.data))))

    def bw(g):
        if x.requires_grad:
            x._acc(g * out_data * (1.0 - out_data))
    return _record(out_data, (x,), bw)


def tanh(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    out_data = np.tanh(x.data)

    def bw(g):
        if x.requires_grad:
            x._acc(g * (1.0 - out_data * out_data))
    return _record(out_data, (x,), bw)


def sqrt(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    out_data = np.sqrt(x.data)

    def bw(g):
        if x.requires_grad:
            x._acc(g * 0.5 / out_data)
    return _record(out_data, (x,), bw)


def row_softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis, max-subtracted for stability."""
    x = _as_tensor(x)
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=-1, keepdims=True)

    def bw(g):
        if x.requires_grad:
            inner = (g * out_data).sum(axis=-1, keepdims=True)
            x._acc((g - inner) * out_data)
    return _record(out_data, (x,), bw)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    """Normalize each row to zero mean / unit variance, then apply gain and bias."""
    x, gain, bias = _as_tensor(x), _as_tensor(gain), _as_tensor(bias)
    d = x.data.shape[-1]
    if gain.data.shape != (d,) or bias.data.shape != (d,):
        raise ShapeMismatch("layer_norm", x.data.shape, gain.data.shape, bias.data.shape)
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv

    def bw(g):
        if gain.requires_grad:
            gain._acc((g * xhat).reshape(-1, d).sum(axis=0))
        if bias.requires_grad:
            bias._acc(g.reshape(-1, d).sum(axis=0))
        if x.requires_grad:
            dxhat = g * gain.data
            x._acc(inv * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                          - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)))
    return _record(xhat * gain.data + bias.data, (x, gain, bias), bw)


def dropout(x: Tensor, p: float, mode: str, rng: Rng | None = None) -> Tensor:
    """In train mode zero entries with probability p and rescale survivors."""
    if mode == "eval" or p == 0.0:
        return x
    if mode != "train":
        raise ValueError(f"dropout mode must be 'train' or 'eval', got {mode!r}")
    if rng is None:
        raise ValueError("dropout in train mode needs an rng")
    x = _as_tensor(x)
    keep = (rng.uniform(x.data.shape) >= p).astype(np.float64) / (1.0 - p)

    def bw(g):
        if x.requires_grad:
            x._acc(g * keep)
    return _record(x.data * keep, (x,), bw)


def concat_rows(parts: list[Tensor]) -> Tensor:
    parts = [_as_tensor(p) for p in parts]
    widths = {p.data.shape[1] for p in parts}
    if len(widths) != 1:
        raise ShapeMismatch("concat_rows", *[p.data.shape for p in parts])
    counts = [p.data.shape[0] for p in parts]
    offsets = np.cumsum([0] + counts)

    def bw(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p._acc(g[lo:hi])
    return _record(np.concatenate([p.data for p in parts], axis=0), tuple(parts), bw)


def concat_cols(parts: list[Tensor]) -> Tensor:
    parts = [_as_tensor(p) for p in parts]
    heights = {p.data.shape[0] for p in parts}
    if len(heights) != 1:
        raise ShapeMismatch("concat_cols", *[p.data.shape for p in parts])
    widths = [p.data.shape[1] for p in parts]
    offsets = np.cumsum([0] + widths)

    def bw(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            if p.requires_grad:
                p._acc(g[:, lo:hi])
    return _record(np.concatenate([p.data for p in parts], axis=1), tuple(parts), bw)


def sum_rows(x: Tensor) -> Tensor:
    """Sum the rows together: (n, d) -> (1, d)."""
    x = _as_tensor(x)

    def bw(g):
        if x.requires_grad:
            x._acc(np.broadcast_to(g, x.data.shape))
    return _record(x.data.sum(axis=0, keepdims=True), (x,), bw)


def mean_rows(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    n = x.data.shape[0]

    def bw(g):
        if x.requires_grad:
            x._acc(np.broadcast_to(g / n, x.data.shape))
    return _record(x.data.mean(axis=0, keepdims=True), (x,), bw)


def sum_all(x: Tensor) -> Tensor:
    x = _as_tensor(x)

    def bw(g):
        if x.requires_grad:
            x._acc(np.full(x.data.shape, float(g)))
    return _record(np.array(x.data.sum()), (x,), bw)


def transpose(x: Tensor, axes: tuple[int, ...] | None = None) -> Tensor:
    x = _as_tensor(x)
    if axes is None:
        axes = tuple(reversed(range(x.data.ndim)))
    inverse = tuple(np.argsort(axes))

    def bw(g):
        if x.requires_grad:
            x._acc(g.transpose(inverse))
    return _record(x.data.transpose(axes), (x,), bw)


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    x = _as_tensor(x)

    def bw(g):
        if x.requires_grad:
            x._acc(g.reshape(x.data.shape))
    return _record(x.data.reshape(shape), (x,), bw)


def gather_rows(table: Tensor, indices: np.ndarray) -> Tensor:
    """Row lookup (embedding gather); backward scatter-adds."""
    table = _as_tensor(table)
    idx = np.asarray(indices, dtype=np.int64)

    def bw(g):
        if table.requires_grad:
            acc = np.zeros_like(table.data)
            np.add.at(acc, idx, g)
            table._acc(acc)
    return _record(table.data[idx], (table,), bw)
