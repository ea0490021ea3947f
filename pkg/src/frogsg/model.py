"""Pulses, SHG FROG traces and the ambiguity-invariant trace distance.

Conventions
-----------
A pulse is a 1-D complex numpy array of length ``N`` with periodic
indexing.  The forward DFT is ``sum_n a[n] exp(-2 pi i n k / N)`` without
normalization (``numpy.fft.fft``).  The trace is

    Z[p, k] = |sum_n x[n] x[n + pL] exp(-2 pi i n k / N)|^2,

for delays ``p = 0..R-1`` with ``R = ceil(N / L)``; rows are indexed by
delay.  The transformed trace ``Y = fft(Z, axis=1) / N`` holds, in row
``p``, the autocorrelation of ``x * x[. + pL]``.
"""

from dataclasses import dataclass
from math import ceil

import numpy as np

from .errors import ParameterError

MIN_LENGTH = 4


def as_pulse(x, *, min_length: int = MIN_LENGTH) -> np.ndarray:
    """Validate and convert ``x`` to a 1-D complex128 array."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ParameterError(f"pulse must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise ParameterError(f"pulse length must be >= {min_length}, got {arr.shape[0]}")
    return arr


def num_delays(N: int, L: int) -> int:
    """Number of recorded delays ``R = ceil(N / L)``."""
    return ceil(N / L)


def _check_stride(N: int, L) -> int:
    if int(L) != L or L <= 0 or L >= N:
        raise ParameterError(f"delay stride must satisfy 1 <= L < N (N={N}), got L={L}")
    return int(L)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FrogTrace:
    """Nonnegative ``R x N`` trace recorded at delay stride ``L``."""

    values: np.ndarray
    L: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ParameterError(f"trace must be two-dimensional, got shape {vals.shape}")
        R, N = vals.shape
        L = _check_stride(N, self.L)
        if R != num_delays(N, L):
            raise ParameterError(f"trace has {R} rows; expected ceil({N}/{L}) = {num_delays(N, L)}")
        if not np.all(np.isfinite(vals)):
            raise ParameterError("trace contains non-finite values")
        if np.any(vals < 0):
            raise ParameterError("trace contains negative values; clip before constructing")
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "L", L)

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @property
    def R(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_measurements(cls, values, L: int) -> "FrogTrace":
        """Build a trace from raw data, clipping negative entries to zero."""
        vals = np.asarray(values, dtype=np.float64)
        return cls(np.clip(vals, 0.0, None), L)

    def sqrt(self) -> np.ndarray:
        return np.sqrt(self.values)


@dataclass(frozen=True, eq=False)
class TransformedTrace:
    """Per-delay autocorrelations ``Y[p, l]`` of a trace."""

    values: np.ndarray
    L: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim != 2:
            raise ParameterError(f"transformed trace must be two-dimensional, got {vals.shape}")
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def N(self) -> int:
        return self.values.shape[1]

    @property
    def R(self) -> int:
        return self.values.shape[0]

    def lag(self, ell: int) -> np.ndarray:
        """Column ``y_l[p] = Y[p, l]``."""
        return self.values[:, ell]


def delay_index(N: int, L: int, R: int) -> np.ndarray:
    """Index array ``(n + pL) mod N`` of shape ``(R, N)``."""
    n = np.arange(N)
    return (n[None, :] + L * np.arange(R)[:, None]) % N


def delay_spectra(x, L: int, R: int | None = None) -> np.ndarray:
    """Complex spectra ``u[p, k]`` of the gated products ``x * x[. + pL]``."""
    x = np.asarray(x, dtype=np.complex128)
    N = x.shape[0]
    if R is None:
        R = num_delays(N, L)
    prods = x[None, :] * x[delay_index(N, L, R)]
    return np.fft.fft(prods, axis=1)


def synthesize_trace(x, L: int) -> FrogTrace:
    """FROG trace of pulse ``x`` at delay stride ``L``."""
    x = as_pulse(x)
    L = _check_stride(x.shape[0], L)
    u = delay_spectra(x, L)
    return FrogTrace(u.real**2 + u.imag**2, L)


def distance_to_sqrt_trace(sqrt_ref: np.ndarray, w, L: int) -> float:
    """Relative error of ``w`` against a precomputed ``sqrt`` reference trace."""
    denom = np.linalg.norm(sqrt_ref)
    if denom == 0.0:
        raise ZeroDivisionError("reference trace is identically zero")
    u = delay_spectra(w, L, sqrt_ref.shape[0])
    return float(np.linalg.norm(sqrt_ref - np.sqrt(u.real**2 + u.imag**2)) / denom)


def trace_distance(x, w, L: int) -> float:
    """Relative error ``||sqrt(Z) - sqrt(W)||_F / ||sqrt(Z)||_F``.

    ``Z`` and ``W`` are the traces of ``x`` and ``w`` at stride ``L``.  The
    value is invariant to every trivial ambiguity of ``w``.

    Raises
    ------
    ZeroDivisionError
        If ``x`` is identically zero.
    """
    x = as_pulse(x)
    w = as_pulse(w)
    if w.shape != x.shape:
        raise ParameterError(f"pulse lengths differ: {x.shape[0]} vs {w.shape[0]}")
    if not np.any(x):
        raise ZeroDivisionError("reference pulse is identically zero")
    return distance_to_sqrt_trace(synthesize_trace(x, L).sqrt(), w, L)


def rotate(x, phi: float) -> np.ndarray:
    return as_pulse(x) * np.exp(1j * phi)


def shift(x, ell: int) -> np.ndarray:
    """Circular translation ``x'[n] = x[n - ell]``."""
    return np.roll(as_pulse(x), int(ell))


def reflect(x) -> np.ndarray:
    """Conjugate reflection ``x'[n] = conj(x[-n])``."""
    x = as_pulse(x)
    return np.conj(np.roll(x[::-1], 1))


def apply_ambiguity(x, kind: str, value=None) -> np.ndarray:
    """Apply a trivial ambiguity.

    ``kind`` is ``"rotation"`` (``value`` = angle), ``"shift"`` (``value`` =
    integer lag) or ``"reflection"`` (no value).
    """
    if kind == "rotation":
        return rotate(x, 0.0 if value is None else float(value))
    if kind == "shift":
        return shift(x, 0 if value is None else value)
    if kind == "reflection":
        return reflect(x)
    raise ParameterError(f"unknown ambiguity kind {kind!r}")


def transform_trace(Z: FrogTrace) -> TransformedTrace:
    """Normalized DFT over frequency: ``Y[p, l] = (1/N) sum_k Z[p, k] e^{-2 pi i k l / N}``."""
    return TransformedTrace(np.fft.fft(Z.values, axis=1) / Z.N, Z.L)


def inverse_transform(Y: np.ndarray) -> np.ndarray:
    """Invert :func:`transform_trace` on raw arrays; returns the real part."""
    Y = np.asarray(Y, dtype=np.complex128)
    return np.real(np.fft.ifft(Y, axis=1)) * Y.shape[1]
