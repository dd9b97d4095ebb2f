"""Central finite-difference checks of the autodiff gradients."""

import logging
import typing

import numpy as np

from ..autodiff.tensor import Graph, Tensor

logger = logging.getLogger("general_logger")


def numerical_gradient(func: typing.Callable[[], Tensor], tensor: Tensor, step: float = 1e-5) -> np.ndarray:
    """d func() / d tensor by central differences, perturbing ``tensor.data`` in place."""
    grad = np.zeros_like(tensor.data)
    flat = tensor.data.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        plus = func().item()
        flat[i] = original - step
        minus = func().item()
        flat[i] = original
        out[i] = (plus - minus) / (2 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a||, ||n||, 1e-12)."""
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(
    func: typing.Callable[[], Tensor],
    tensors: typing.Sequence[Tensor],
    step: float = 1e-5,
) -> typing.Dict[int, float]:
    """Compares backward gradients of a scalar ``func`` with central differences.

    Args:
        func (typing.Callable[[], Tensor]): Builds the scalar output from the
            current values of ``tensors``.
        tensors (typing.Sequence[Tensor]): Leaves to check; they must have
            requires_grad set.
        step (float, optional): Finite-difference step. Defaults to 1e-5.

    Returns:
        dict: Relative error per tensor position.
    """
    for tensor in tensors:
        if not tensor.requires_grad:
            raise ValueError(f"gradient check input of shape {tensor.shape} does not require gradients")
        tensor.zero_grad()
    with Graph():
        output = func()
        output.backward()

    errors = {}
    for position, tensor in enumerate(tensors):
        analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        numeric = numerical_gradient(func, tensor, step)
        errors[position] = relative_error(analytic, numeric)
        logger.debug(f"gradient check of input {position} {tensor.shape}: relative error {errors[position]:.3e}")
    return errors
