"""Reverse-mode automatic differentiation over float64 numpy arrays.

Every differentiable operation records a node on the active Graph. A node
keeps its input tensors and a closure mapping the output gradient to one
gradient per input. ``backward`` replays the reachable nodes in exact
reverse recording order, so the result does not depend on hash ordering.
"""

import contextlib
import itertools
import threading
import typing

import numpy as np

ArrayLike = typing.Union[np.ndarray, float, int, typing.Sequence]


class Node:
    """One recorded operation."""

    __slots__ = ("index", "inputs", "backward_fn", "name")

    def __init__(self, index: int, inputs: typing.Tuple["Tensor", ...], backward_fn: typing.Callable, name: str):
        self.index = index
        self.inputs = inputs
        self.backward_fn = backward_fn
        self.name = name


class Graph:
    """Ordered record of the operations issued while it is active.

    Used as a context manager, a Graph scopes one forward/backward pass and
    keeps its nodes in ``self.nodes``. Outside any ``with Graph()`` block
    operations are numbered by a process-wide default graph that does not
    retain them.
    """

    _local = threading.local()
    _counter = itertools.count()

    def __init__(self, keep_nodes: bool = True):
        self.keep_nodes = keep_nodes
        self.nodes: typing.List[Node] = []

    def record(self, inputs, backward_fn, name) -> Node:
        node = Node(next(Graph._counter), tuple(inputs), backward_fn, name)
        if self.keep_nodes:
            self.nodes.append(node)
        return node

    def __len__(self):
        return len(self.nodes)

    def __enter__(self):
        Graph._stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        Graph._stack().pop()
        return False

    @classmethod
    def _stack(cls) -> list:
        if not hasattr(cls._local, "stack"):
            cls._local.stack = []
        return cls._local.stack

    @classmethod
    def current(cls) -> "Graph":
        stack = cls._stack()
        if stack:
            return stack[-1]
        if not hasattr(cls._local, "default"):
            cls._local.default = Graph(keep_nodes=False)
        return cls._local.default


def _grad_enabled() -> bool:
    return getattr(Graph._local, "grad_enabled", True)


@contextlib.contextmanager
def no_grad():
    """Disables recording inside the block (evaluation and benchmarks)."""
    previous = _grad_enabled()
    Graph._local.grad_enabled = False
    try:
        yield
    finally:
        Graph._local.grad_enabled = previous


def unbroadcast(grad: np.ndarray, shape: typing.Tuple[int, ...]) -> np.ndarray:
    """Sums ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _as_array(value) -> np.ndarray:
    if isinstance(value, Tensor):
        return value.data
    return np.asarray(value, dtype=np.float64)


class Tensor:
    """A float64 n-d array that can take part in reverse-mode differentiation.

    Args:
        data (ArrayLike): Values, copied to float64.
        requires_grad (bool, optional): Learnable leaf or input whose gradient
            should be accumulated by ``backward``. Defaults to False.
        name (str, optional): Label used in error messages and checkpoints.
    """

    __array_ufunc__ = None

    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: typing.Optional[str] = None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: typing.Optional[np.ndarray] = None
        self.node: typing.Optional[Node] = None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    def __len__(self):
        return self.shape[0]

    # arithmetic, all broadcasting like numpy

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __pow__(self, exponent):
        if exponent != 2:
            raise ValueError(f"only squaring is supported, not power {exponent}")
        return square(self)

    def abs(self):
        return absolute(self)

    def square(self):
        return square(self)

    def sum(self, axis=None, keepdims=False):
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return reduce_mean(self, axis=axis, keepdims=keepdims)

    def max(self, mask=None, per_sample=False):
        return masked_extreme(self, mask=mask, largest=True, per_sample=per_sample)

    def min(self, mask=None, per_sample=False):
        return masked_extreme(self, mask=mask, largest=False, per_sample=per_sample)

    def reshape(self, *shape):
        return reshape(self, shape[0] if len(shape) == 1 and isinstance(shape[0], tuple) else shape)

    def __getitem__(self, index):
        return take(self, index)


def make_output(data: np.ndarray, inputs: typing.Sequence, backward_fn: typing.Callable, name: str) -> Tensor:
    """Wraps ``data`` in a Tensor and records the operation when needed.

    ``backward_fn`` receives the output gradient and returns one gradient
    (or None) per entry of ``inputs``.
    """
    out = Tensor.__new__(Tensor)
    out.data = data if data.dtype == np.float64 else data.astype(np.float64)
    out.grad = None
    out.name = None
    out.node = None
    out.requires_grad = False
    tensors = tuple(x for x in inputs)
    if _grad_enabled() and any(isinstance(x, Tensor) and x.requires_grad for x in tensors):
        out.requires_grad = True
        out.node = Graph.current().record(tensors, backward_fn, name)
    return out


def backward(loss: Tensor, seed: typing.Optional[np.ndarray] = None):
    """Accumulates d(loss)/d(leaf) into ``leaf.grad`` for every reachable leaf.

    Intermediate gradients are kept locally, so calling backward twice on the
    same graph adds the leaf gradients twice.
    """
    if loss.size != 1 and seed is None:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    seed = np.ones_like(loss.data) if seed is None else np.asarray(seed, dtype=np.float64).reshape(loss.shape)

    if loss.node is None:
        if loss.requires_grad:
            loss.grad = seed.copy() if loss.grad is None else loss.grad + seed
        return

    reached = []
    seen = set()
    stack = [loss]
    while stack:
        tensor = stack.pop()
        node = tensor.node
        if node is None or id(node) in seen:
            continue
        seen.add(id(node))
        reached.append((node, tensor))
        stack.extend(x for x in node.inputs if isinstance(x, Tensor) and x.requires_grad)
    reached.sort(key=lambda pair: pair[0].index, reverse=True)

    grads = {id(loss): seed}
    for node, tensor in reached:
        grad = grads.pop(id(tensor), None)
        if grad is None:
            continue
        input_grads = node.backward_fn(grad)
        for x, g in zip(node.inputs, input_grads):
            if g is None or not isinstance(x, Tensor) or not x.requires_grad:
                continue
            if g.shape != x.shape:
                raise RuntimeError(f"operation {node.name} produced a gradient of shape {g.shape} for an input {x.shape}")
            if x.node is None:
                x.grad = g.copy() if x.grad is None else x.grad + g
            elif id(x) in grads:
                grads[id(x)] = grads[id(x)] + g
            else:
                grads[id(x)] = g


def add(a, b) -> Tensor:
    a_data, b_data = _as_array(a), _as_array(b)

    def backward_fn(g):
        return unbroadcast(g, a_data.shape), unbroadcast(g, b_data.shape)

    return make_output(a_data + b_data, (a, b), backward_fn, "add")


def sub(a, b) -> Tensor:
    a_data, b_data = _as_array(a), _as_array(b)

    def backward_fn(g):
        return unbroadcast(g, a_data.shape), unbroadcast(-g, b_data.shape)

    return make_output(a_data - b_data, (a, b), backward_fn, "sub")


def mul(a, b) -> Tensor:
    a_data, b_data = _as_array(a), _as_array(b)

    def backward_fn(g):
        return unbroadcast(g * b_data, a_data.shape), unbroadcast(g * a_data, b_data.shape)

    return make_output(a_data * b_data, (a, b), backward_fn, "mul")


def div(a, b) -> Tensor:
    a_data, b_data = _as_array(a), _as_array(b)
    if np.any(b_data == 0):
        raise ZeroDivisionError("division by a tensor holding zeros")

    def backward_fn(g):
        return unbroadcast(g / b_data, a_data.shape), unbroadcast(-g * a_data / (b_data * b_data), b_data.shape)

    return make_output(a_data / b_data, (a, b), backward_fn, "div")


def absolute(x: Tensor) -> Tensor:
    sign = np.sign(x.data)
    return make_output(np.abs(x.data), (x,), lambda g: (g * sign,), "abs")


def square(x: Tensor) -> Tensor:
    data = x.data
    return make_output(data * data, (x,), lambda g: (2.0 * g * data,), "square")


def reduce_sum(x: Tensor, axis=None, keepdims=False) -> Tensor:
    shape = x.shape

    def backward_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)

    return make_output(np.asarray(x.data.sum(axis=axis, keepdims=keepdims)), (x,), backward_fn, "sum")


def reduce_mean(x: Tensor, axis=None, keepdims=False) -> Tensor:
    count = x.size if axis is None else int(np.prod([x.shape[a] for a in np.atleast_1d(axis)]))
    return reduce_sum(x, axis=axis, keepdims=keepdims) * (1.0 / count)


def reshape(x: Tensor, shape) -> Tensor:
    original = x.shape
    return make_output(x.data.reshape(shape), (x,), lambda g: (g.reshape(original),), "reshape")


def take(x: Tensor, index) -> Tensor:
    """Basic (non-fancy) indexing."""
    shape = x.shape

    def backward_fn(g):
        full = np.zeros(shape)
        full[index] += g
        return (full,)

    return make_output(np.array(x.data[index]), (x,), backward_fn, "take")


def masked_extreme(x: Tensor, mask=None, largest: bool = True, per_sample: bool = False) -> Tensor:
    """Maximum (or minimum) of ``x`` over the entries where ``mask`` holds.

    With ``per_sample`` the reduction runs over every axis but the first and
    returns one value per sample. The gradient flows to the first extremal
    entry only.
    """
    data = x.data
    mask = np.ones(data.shape, dtype=bool) if mask is None else np.broadcast_to(np.asarray(mask, dtype=bool), data.shape)
    fill = -np.inf if largest else np.inf
    masked = np.where(mask, data, fill)
    pick = np.argmax if largest else np.argmin

    if per_sample:
        rows = masked.reshape(data.shape[0], -1)
        if not mask.reshape(data.shape[0], -1).any(axis=1).all():
            raise ValueError("masked extreme over an empty mask")
        flat_index = pick(rows, axis=1)
        values = rows[np.arange(rows.shape[0]), flat_index]

        def backward_fn(g):
            full = np.zeros(rows.shape)
            full[np.arange(rows.shape[0]), flat_index] = g
            return (full.reshape(data.shape),)

        return make_output(values, (x,), backward_fn, "max" if largest else "min")

    if not mask.any():
        raise ValueError("masked extreme over an empty mask")
    flat_index = int(pick(masked.reshape(-1)))
    value = np.asarray(data.reshape(-1)[flat_index])

    def backward_fn(g):
        full = np.zeros(data.size)
        full[flat_index] = g
        return (full.reshape(data.shape),)

    return make_output(value, (x,), backward_fn, "max" if largest else "min")


def concat(tensors: typing.Sequence[Tensor], axis: int = 1) -> Tensor:
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def backward_fn(g):
        return tuple(
            np.take(g, np.arange(bounds[i], bounds[i + 1]), axis=axis) for i in range(len(tensors))
        )

    return make_output(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward_fn, "concat")


def split(x: Tensor, sizes: typing.Sequence[int], axis: int = 1) -> typing.List[Tensor]:
    if sum(sizes) != x.shape[axis]:
        raise ValueError(f"split sizes {list(sizes)} do not add up to {x.shape[axis]}")
    bounds = np.cumsum([0] + list(sizes))
    parts = []
    for i in range(len(sizes)):
        index = [slice(None)] * x.ndim
        index[axis] = slice(int(bounds[i]), int(bounds[i + 1]))
        parts.append(take(x, tuple(index)))
    return parts
