import numpy as np
import pytest

from panofourier.autodiff import Tensor, fft, fft2, irfft2, rfft2
from panofourier.autodiff.fft import bit_reversed_indices
from panofourier.utils.gradcheck import check_gradients


def test_bit_reversal():
    assert bit_reversed_indices(8).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


@pytest.mark.parametrize("n", [1, 2, 4, 16, 64])
def test_fft_matches_direct_dft(n):
    rng = np.random.default_rng(n)
    signal = rng.normal(size=n) + 1j * rng.normal(size=n)
    k = np.arange(n)
    direct = np.exp(-2j * np.pi * np.outer(k, k) / n) @ signal
    np.testing.assert_allclose(fft(signal), direct, atol=1e-9)


def test_fft_inverse_roundtrip_along_axis():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 8, 3))
    np.testing.assert_allclose(fft(fft(a, axis=1), axis=1, inverse=True).real, a, atol=1e-12)


def test_fft_rejects_non_power_of_two():
    with pytest.raises(ValueError, match="power of two"):
        fft(np.zeros(6))
    with pytest.raises(ValueError):
        rfft2(Tensor(np.zeros((1, 1, 6, 8))))


def test_constant_image_has_dc_only_spectrum():
    real, imag = rfft2(Tensor(np.full((1, 1, 4, 8), 2.0)))
    expected = np.zeros((4, 5))
    expected[0, 0] = 2.0 * 4 * 8
    np.testing.assert_allclose(real.data[0, 0], expected, atol=1e-12)
    np.testing.assert_allclose(imag.data, 0.0, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_rfft2_roundtrip(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(1, 1, 8, 8))
    real, imag = rfft2(Tensor(x))
    assert real.shape == (1, 1, 8, 5)
    np.testing.assert_allclose(irfft2(real, imag).data, x, atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_parseval(seed):
    rng = np.random.default_rng(seed)
    height, width = 8, 16
    x = rng.normal(size=(height, width))
    real, imag = rfft2(Tensor(x.reshape(1, 1, height, width)))
    power = real.data[0, 0] ** 2 + imag.data[0, 0] ** 2
    multiplicity = np.full(width // 2 + 1, 2.0)
    multiplicity[[0, -1]] = 1.0
    assert np.sum(x**2) == pytest.approx(np.sum(power * multiplicity) / (height * width), abs=1e-6)


def test_rfft2_keeps_first_half_of_full_spectrum():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(4, 8))
    real, imag = rfft2(Tensor(x.reshape(1, 1, 4, 8)))
    full = fft2(x)
    np.testing.assert_allclose(real.data[0, 0] + 1j * imag.data[0, 0], full[:, :5], atol=1e-12)


def test_irfft2_rejects_mismatched_parts():
    with pytest.raises(ValueError):
        irfft2(Tensor(np.zeros((1, 1, 4, 5))), Tensor(np.zeros((1, 1, 4, 4))))
    with pytest.raises(ValueError):
        irfft2(Tensor(np.zeros((1, 1, 4, 5))), Tensor(np.zeros((1, 1, 4, 5))), width=16)


@pytest.mark.parametrize("seed", range(20))
def test_rfft2_gradients(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.normal(size=(1, 2, 4, 8)), requires_grad=True)
    weights_real = rng.normal(size=(1, 2, 4, 5))
    weights_imag = rng.normal(size=(1, 2, 4, 5))

    def func():
        real, imag = rfft2(x)
        return (real * weights_real).sum() + (imag * weights_imag).sum()

    assert max(check_gradients(func, [x]).values()) < 1e-4


@pytest.mark.parametrize("seed", range(20))
def test_irfft2_gradients(seed):
    rng = np.random.default_rng(seed)
    real = Tensor(rng.normal(size=(1, 2, 4, 5)), requires_grad=True)
    imag = Tensor(rng.normal(size=(1, 2, 4, 5)), requires_grad=True)
    weights = rng.normal(size=(1, 2, 4, 8))
    func = lambda: (irfft2(real, imag, width=8) * weights).sum()  # noqa: E731
    assert max(check_gradients(func, [real, imag]).values()) < 1e-4
