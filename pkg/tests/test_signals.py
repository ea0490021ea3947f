import math

import numpy as np
import pytest

from frogsg.errors import ParameterError
from frogsg.model import FrogTrace, synthesize_trace
from frogsg.signals import PulseSpec, add_noise, generate_pulse, pulse_spectrum, support_bins


def _longest_zero_run(X, tol):
    """Longest run of (wrapped) consecutive bins with |X| <= tol."""
    z = np.abs(X) <= tol
    if z.all():
        return len(X)
    best = run = 0
    for v in np.concatenate([z, z]):
        run = run + 1 if v else 0
        best = max(best, run)
    return min(best, len(X))


def test_default_spec_values():
    spec = PulseSpec(128)
    assert spec.bandlimit == 64
    assert spec.center == 32
    assert spec.width == 16
    assert PulseSpec(9).bandlimit == 4


def test_single_bin_spectrum_gives_constant_modulus():
    x = generate_pulse(PulseSpec(32, spectral_width=0.0, seed=3))
    assert np.allclose(np.abs(x), np.abs(x[0]), rtol=1e-12)
    assert np.count_nonzero(np.abs(np.fft.fft(x)) > 1e-12) == 1


@pytest.mark.parametrize("N,B", [(16, 8), (32, 15), (33, 16), (64, 10), (128, None)])
@pytest.mark.parametrize("seed", [0, 1])
def test_bandlimit_zero_run(N, B, seed):
    spec = PulseSpec(N, B=B, seed=seed)
    X = np.fft.fft(generate_pulse(spec))
    tol = 1e-12 * np.max(np.abs(X))
    assert _longest_zero_run(X, tol) >= N - spec.bandlimit
    assert np.count_nonzero(np.abs(X) > tol) == spec.bandlimit


def test_support_is_contiguous_and_centred():
    spec = PulseSpec(64, B=10, spectral_center=3)
    bins = support_bins(spec)
    assert len(bins) == 10
    assert 3 in bins
    assert set(((bins - bins[0]) % 64).tolist()) == set(range(10))


def test_parseval():
    spec = PulseSpec(128, seed=5)
    x = generate_pulse(spec)
    X = pulse_spectrum(spec)
    assert np.sum(np.abs(x) ** 2) == pytest.approx(np.sum(np.abs(X) ** 2) / 128, rel=1e-10)


def test_generation_is_deterministic():
    a = generate_pulse(PulseSpec(64, seed=9))
    b = generate_pulse(PulseSpec(64, seed=9))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, generate_pulse(PulseSpec(64, seed=10)))


@pytest.mark.parametrize("kw", [dict(N=3), dict(N=16, B=17), dict(N=16, B=0), dict(N=16, spectral_width=-1)])
def test_spec_validation(kw):
    with pytest.raises(ParameterError):
        PulseSpec(**kw)


# --- noise ----------------------------------------------------------------

def _trace(N=128, L=1, seed=0):
    return synthesize_trace(generate_pulse(PulseSpec(N, seed=seed)), L)


def test_infinite_snr_is_identity():
    Z = _trace(32)
    assert add_noise(Z, math.inf, np.random.default_rng(0)) is Z


def test_realized_snr_before_clipping():
    Z = _trace()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal(Z.values.shape)
        noise *= np.sqrt(np.sum(Z.values**2) / 100 / np.sum(noise**2))
        snr = 10 * np.log10(np.sum(Z.values**2) / np.sum(noise**2))
        assert abs(snr - 20) < 0.5
        noisy = add_noise(Z, 20, np.random.default_rng(seed))
        assert np.array_equal(noisy.values, np.clip(Z.values + noise, 0, None))


def test_clipping_fraction_is_small():
    Z = _trace()
    noisy = add_noise(Z, 20, np.random.default_rng(1))
    raw_negative = np.mean(noisy.values == 0)
    assert raw_negative < 0.3


def test_noise_mean_is_zero():
    # a strictly positive trace at high SNR, so clipping never bites
    Z = FrogTrace(1.0 + np.random.default_rng(0).random((16, 16)), 1)
    draws = np.array([add_noise(Z, 20, np.random.default_rng(s)).values - Z.values for s in range(1000)])
    assert np.all(draws > -Z.values)
    se = draws.std(axis=0) / np.sqrt(1000)
    assert np.mean(np.abs(draws.mean(axis=0)) < 3 * se) > 0.98
    assert abs(draws.mean()) < 3 * draws.std() / np.sqrt(draws.size)


def test_noise_errors_and_determinism():
    Z = _trace(16)
    a = add_noise(Z, 15, np.random.default_rng(4))
    b = add_noise(Z, 15, np.random.default_rng(4))
    assert np.array_equal(a.values, b.values)
    zero = synthesize_trace(np.zeros(16), 1)
    with pytest.raises(ParameterError):
        add_noise(zero, 20, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        add_noise(Z, math.nan, np.random.default_rng(0))
