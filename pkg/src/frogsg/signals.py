"""Test-pulse ensemble and measurement noise."""

from dataclasses import dataclass
from math import ceil, inf, isinf

import numpy as np

from .errors import ParameterError
from .model import FrogTrace, MIN_LENGTH


def default_bandlimit(N: int) -> int:
    return ceil((N - 1) / 2)


@dataclass(frozen=True)
class PulseSpec:
    """Parameters of a random bandlimited pulse.

    Attributes
    ----------
    N : int
        Number of samples.
    B : int or None
        Width of the spectral support in bins; ``None`` means
        ``ceil((N - 1) / 2)``.
    spectral_center : float or None
        Bin index of the Gaussian peak; ``None`` means ``N / 4``.
    spectral_width : float or None
        Standard deviation, in bins, of the Gaussian power spectrum;
        ``None`` means ``N / 8``.  Zero gives a single-bin spectrum.
    seed : int
        Seed for the random spectral phase.
    """

    N: int
    B: int | None = None
    spectral_center: float | None = None
    spectral_width: float | None = None
    seed: int = 0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < MIN_LENGTH:
            raise ParameterError(f"N must be an integer >= {MIN_LENGTH}, got {self.N}")
        if self.B is not None and (int(self.B) != self.B or not 1 <= self.B <= self.N):
            raise ParameterError(f"bandlimit must satisfy 1 <= B <= N, got {self.B}")
        if self.spectral_width is not None and not self.spectral_width >= 0:
            raise ParameterError(f"spectral width must be nonnegative, got {self.spectral_width}")

    @property
    def bandlimit(self) -> int:
        return default_bandlimit(self.N) if self.B is None else int(self.B)

    @property
    def center(self) -> float:
        return self.N / 4 if self.spectral_center is None else float(self.spectral_center)

    @property
    def width(self) -> float:
        return self.N / 8 if self.spectral_width is None else float(self.spectral_width)


def support_bins(spec: PulseSpec) -> np.ndarray:
    """Bins of the ``B``-wide contiguous support, centred on the peak."""
    B = spec.bandlimit
    start = int(np.floor(spec.center + 0.5)) - (B - 1) // 2
    return (start + np.arange(B)) % spec.N


def pulse_spectrum(spec: PulseSpec) -> np.ndarray:
    """Random-phase spectrum of the pulse described by ``spec``.

    Magnitude is ``exp(-d^2 / (4 w^2))`` (a Gaussian power spectrum with
    standard deviation ``w``), peaking at one, where ``d`` is the wrapped
    bin distance to the centre.  Bins outside the support are zero.
    """
    N = spec.N
    bins = support_bins(spec)
    rng = np.random.default_rng(spec.seed)
    theta = rng.uniform(0.0, 2 * np.pi, size=N)
    d = (bins - spec.center + N / 2) % N - N / 2
    if spec.width == 0.0:
        mag = np.zeros(bins.shape[0])
        mag[np.argmin(np.abs(d))] = 1.0
    else:
        mag = np.exp(-(d**2) / (4 * spec.width**2))
    X = np.zeros(N, dtype=np.complex128)
    X[bins] = mag * np.exp(1j * theta[bins])
    return X


def generate_pulse(spec: PulseSpec) -> np.ndarray:
    """Inverse DFT (``numpy.fft.ifft``, 1/N normalized) of :func:`pulse_spectrum`."""
    return np.fft.ifft(pulse_spectrum(spec))


def add_noise(Z: FrogTrace, snr_db: float, rng: np.random.Generator) -> FrogTrace:
    """Add white Gaussian noise at a prescribed SNR and clip at zero.

    The noise draw is rescaled so that ``10 log10(||Z||_F^2 / ||noise||_F^2)``
    equals ``snr_db`` exactly.  ``snr_db = inf`` returns ``Z`` unchanged.
    """
    if isinf(snr_db) and snr_db > 0:
        return Z
    if not np.isfinite(snr_db):
        raise ParameterError(f"snr_db must be finite or +inf, got {snr_db}")
    energy = float(np.sum(Z.values**2))
    if energy == 0.0:
        raise ParameterError("cannot set an SNR relative to an all-zero trace")
    noise = rng.standard_normal(Z.values.shape)
    noise *= np.sqrt(energy / 10 ** (snr_db / 10) / np.sum(noise**2))
    return FrogTrace.from_measurements(Z.values + noise, Z.L)


NO_NOISE = inf
