"""Radix-2 fast Fourier transforms and the differentiable real 2-D transform pair."""

import functools
import typing

import numpy as np

from .tensor import Tensor, make_output


def _check_power_of_two(n: int):
    if n < 1 or n & (n - 1):
        raise ValueError(f"FFT length must be a power of two, not {n}")


@functools.lru_cache(maxsize=32)
def bit_reversed_indices(n: int) -> np.ndarray:
    _check_power_of_two(n)
    bits = n.bit_length() - 1
    index = np.arange(n)
    reversed_index = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        reversed_index |= ((index >> b) & 1) << (bits - 1 - b)
    reversed_index.flags.writeable = False
    return reversed_index


def fft(a: np.ndarray, axis: int = -1, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 FFT along ``axis``.

    The inverse carries the 1/N normalization, so ``fft(fft(a), inverse=True)``
    returns ``a``.
    """
    a = np.moveaxis(np.asarray(a, dtype=np.complex128), axis, -1)
    n = a.shape[-1]
    _check_power_of_two(n)
    x = a[..., bit_reversed_indices(n)]
    sign = 1.0 if inverse else -1.0
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = x.reshape(x.shape[:-1] + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        x = np.concatenate([even + odd, even - odd], axis=-1).reshape(a.shape)
        size *= 2
    if inverse:
        x = x / n
    return np.moveaxis(x, -1, axis)


def fft2(a: np.ndarray, inverse: bool = False) -> np.ndarray:
    """2-D FFT over the last two axes."""
    return fft(fft(a, axis=-2, inverse=inverse), axis=-1, inverse=inverse)


def _half_spectrum_weights(width: int) -> np.ndarray:
    # multiplicity of each kept column in the Hermitian full spectrum
    weights = np.full(width // 2 + 1, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    return weights


def _rfft2_array(x: np.ndarray) -> np.ndarray:
    width = x.shape[-1]
    return fft2(x)[..., : width // 2 + 1]


def _irfft2_array(spectrum: np.ndarray, width: int) -> np.ndarray:
    full = np.zeros(spectrum.shape[:-1] + (width,), dtype=np.complex128)
    full[..., : width // 2 + 1] = spectrum * _half_spectrum_weights(width)
    return fft2(full, inverse=True).real


def rfft2(x: Tensor) -> typing.Tuple[Tensor, Tensor]:
    """Real-input 2-D FFT over the last two axes keeping W/2 + 1 columns.

    Returns the real and imaginary parts as two tensors.
    """
    height, width = x.shape[-2:]
    _check_power_of_two(height)
    _check_power_of_two(width)
    if width < 2:
        raise ValueError(f"rfft2 needs a width of at least 2, got {width}")
    spectrum = _rfft2_array(x.data)
    stacked = np.stack([spectrum.real, spectrum.imag])

    def backward_fn(g):
        kept = g[0] + 1j * g[1]
        full = np.zeros(kept.shape[:-1] + (width,), dtype=np.complex128)
        full[..., : width // 2 + 1] = kept
        return (fft2(full, inverse=True).real * (height * width),)

    out = make_output(stacked, (x,), backward_fn, "rfft2")
    return out[0], out[1]


def irfft2(real: Tensor, imag: Tensor, width: typing.Optional[int] = None) -> Tensor:
    """Inverse of ``rfft2``: real output of extent (H, W) from the half spectrum."""
    if real.shape != imag.shape:
        raise ValueError(f"real part {real.shape} and imaginary part {imag.shape} differ in shape")
    height, kept = real.shape[-2:]
    width = 2 * (kept - 1) if width is None else width
    if width // 2 + 1 != kept:
        raise ValueError(f"a half spectrum with {kept} columns cannot produce width {width}")
    _check_power_of_two(height)
    _check_power_of_two(width)
    out = _irfft2_array(real.data + 1j * imag.data, width)
    scale = _half_spectrum_weights(width) / (height * width)

    def backward_fn(g):
        spectrum = _rfft2_array(g) * scale
        return spectrum.real.copy(), spectrum.imag.copy()

    return make_output(out, (real, imag), backward_fn, "irfft2")
