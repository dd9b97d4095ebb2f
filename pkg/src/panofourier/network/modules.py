"""Layer containers holding learnable parameters and running buffers."""

import typing
from collections import OrderedDict

import numpy as np

from ..autodiff import functional as F
from ..autodiff.tensor import Tensor


class Parameter(Tensor):
    """A learnable leaf tensor."""

    def __init__(self, data, name: typing.Optional[str] = None):
        super().__init__(data, requires_grad=True, name=name)


class Module:
    """Base class of every layer.

    Parameters, buffers and sub-modules are discovered from the instance
    attributes in assignment order, which fixes the parameter names
    (e.g. ``encoder.1.fourier.spectral.conv_in.weight``).
    """

    def __init__(self):
        self.training = True
        self._buffers: typing.Dict[str, np.ndarray] = OrderedDict()

    def register_buffer(self, name: str, value: np.ndarray):
        self._buffers[name] = np.asarray(value, dtype=np.float64)

    def buffer(self, name: str) -> np.ndarray:
        return self._buffers[name]

    def children(self) -> typing.Iterator[typing.Tuple[str, "Module"]]:
        for name, value in vars(self).items():
            if isinstance(value, Module):
                yield name, value

    def named_parameters(self, prefix: str = "") -> typing.Iterator[typing.Tuple[str, Parameter]]:
        for name, value in vars(self).items():
            if isinstance(value, Parameter):
                yield prefix + name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(prefix + name + ".")

    def parameters(self) -> typing.List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def named_buffers(self, prefix: str = "") -> typing.Iterator[typing.Tuple[str, np.ndarray]]:
        for name, value in self._buffers.items():
            yield prefix + name, value
        for name, child in self.children():
            yield from child.named_buffers(prefix + name + ".")

    def state_dict(self) -> "OrderedDict[str, np.ndarray]":
        state = OrderedDict()
        for name, parameter in self.named_parameters():
            state[name] = parameter.data.copy()
        for name, value in self.named_buffers():
            state[name] = value.copy()
        return state

    def load_state_dict(self, state: typing.Mapping[str, np.ndarray]):
        """Copies values into the existing parameters and buffers.

        Raises:
            KeyError: If an entry is missing or unexpected.
            ValueError: If an entry has the wrong extents.
        """
        targets = {name: p.data for name, p in self.named_parameters()}
        targets.update(dict(self.named_buffers()))
        missing = [name for name in targets if name not in state]
        unexpected = [name for name in state if name not in targets]
        if missing or unexpected:
            raise KeyError(f"state does not match the model: missing {missing[:5]}, unexpected {unexpected[:5]}")
        for name, target in targets.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != target.shape:
                raise ValueError(f"{name} has shape {value.shape}, the model expects {target.shape}")
            target[...] = value

    def train(self, mode: bool = True) -> "Module":
        self.training = mode
        for _, child in self.children():
            child.train(mode)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def zero_grad(self):
        for parameter in self.parameters():
            parameter.zero_grad()

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError


class ModuleList(Module):
    def __init__(self, modules: typing.Iterable[Module] = ()):
        super().__init__()
        self._items: typing.List[Module] = []
        for module in modules:
            self.append(module)

    def append(self, module: Module):
        setattr(self, str(len(self._items)), module)
        self._items.append(module)

    def __getitem__(self, index) -> Module:
        return self._items[index]

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items)


def he_normal(rng: np.random.Generator, shape: typing.Tuple[int, ...]) -> np.ndarray:
    fan_in = int(np.prod(shape[1:]))
    return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape)


class Conv2d(Module):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        stride: int = 1,
        bias: bool = True,
        padding_mode: str = "circular_h_replicate_v",
    ):
        super().__init__()
        self.stride = stride
        self.padding_mode = padding_mode
        self.weight = Parameter(he_normal(rng, (out_channels, in_channels, kernel_size, kernel_size)))
        self.bias = Parameter(np.zeros(out_channels)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        return F.conv2d(x, self.weight, self.bias, stride=self.stride, padding_mode=self.padding_mode)


class BatchNorm2d(Module):
    """Batch normalization; with ``bypass`` set it is the identity."""

    def __init__(self, channels: int, momentum: float = 0.1, eps: float = 1e-5):
        super().__init__()
        self.momentum = momentum
        self.eps = eps
        self.bypass = False
        self.gamma = Parameter(np.ones(channels))
        self.beta = Parameter(np.zeros(channels))
        self.register_buffer("running_mean", np.zeros(channels))
        self.register_buffer("running_var", np.ones(channels))

    def forward(self, x: Tensor) -> Tensor:
        if self.bypass:
            return x
        return F.batch_norm(
            x,
            self.gamma,
            self.beta,
            self.buffer("running_mean"),
            self.buffer("running_var"),
            training=self.training,
            momentum=self.momentum,
            eps=self.eps,
        )


class PReLU(Module):
    def __init__(self, channels: int, init: float = 0.25):
        super().__init__()
        self.slope = Parameter(np.full(channels, init))

    def forward(self, x: Tensor) -> Tensor:
        return F.prelu(x, self.slope)


class ConvBNAct(Module):
    """Convolution, batch normalization and PReLU."""

    def __init__(self, in_channels, out_channels, kernel_size, rng, config, stride=1):
        super().__init__()
        self.conv = Conv2d(
            in_channels, out_channels, kernel_size, rng, stride=stride, bias=False, padding_mode=config.padding_mode
        )
        self.bn = BatchNorm2d(out_channels, config.bn_momentum, config.bn_eps)
        self.act = PReLU(out_channels, config.prelu_init)

    def forward(self, x: Tensor) -> Tensor:
        return self.act(self.bn(self.conv(x)))
