"""Smoothed amplitude least-squares loss and its Wirtinger gradients.

The loss at smoothing level ``mu`` is

    h(z, mu) = 1/(N R) sum_{p,k} (phi_mu(|u[p, k]|) - sqrt(Z[p, k]))^2,
    u[p, k]  = sum_n z[n] z[n + pL] exp(-2 pi i n k / N),

with ``phi_mu(w) = sqrt(w^2 + mu^2)``.  Differentiating with respect to
``conj(z)`` and writing ``r = u - sqrt(Z) u / phi_mu(|u|)`` gives, per pair
``(k, p)`` and shift ``s = pL``,

    d[j] = r exp(2 pi i j k / N) conj(z[j + s])
         + r exp(2 pi i (j - s) k / N) conj(z[j - s]).

``full_gradient`` returns ``1/(N R)`` times the sum over all pairs and
``block_gradient`` the raw sum over a sampled block.  With these the real
differential is ``dh = 2 Re(dz^H grad)``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericError, ParameterError
from .model import FrogTrace, as_pulse, delay_spectra


def phi_mu(w, mu):
    """Smooth surrogate ``sqrt(w^2 + mu^2)`` of ``|w|``."""
    return np.hypot(w, mu)


def _check(z, Z: FrogTrace, mu) -> np.ndarray:
    z = as_pulse(z)
    if z.shape[0] != Z.N:
        raise ParameterError(f"pulse length {z.shape[0]} does not match trace width {Z.N}")
    if mu < 0 or not np.isfinite(mu):
        raise ParameterError(f"mu must be finite and nonnegative, got {mu}")
    return z


def loss(z, Z: FrogTrace, mu: float) -> float:
    """Mean squared amplitude misfit ``h(z, mu)``."""
    z = _check(z, Z, mu)
    u = delay_spectra(z, Z.L, Z.R)
    res = phi_mu(np.abs(u), mu) - Z.sqrt()
    return float(np.mean(res**2))


def _residual_factor(u, sqrt_vals, mu, allow_zero_mu):
    phi = phi_mu(np.abs(u), mu)
    if mu == 0.0:
        if not allow_zero_mu:
            raise ParameterError("gradient at mu = 0 is undefined; pass allow_zero_mu=True")
        zero = phi == 0.0
        if np.any(zero & (sqrt_vals > 0)):
            raise NumericError("gradient is singular: vanishing spectrum where the trace is positive")
        phi = np.where(zero, 1.0, phi)
    return u - sqrt_vals * u / phi


def full_gradient(z, Z: FrogTrace, mu: float, *, allow_zero_mu: bool = False) -> np.ndarray:
    """Wirtinger gradient ``dh/d conj(z)`` of the smoothed loss.

    Parameters
    ----------
    z : array_like, complex, shape (N,)
    Z : FrogTrace
    mu : float
        Smoothing level.  ``mu == 0`` is refused unless ``allow_zero_mu``;
        then terms with a vanishing spectrum and a vanishing trace entry
        contribute zero, and any other vanishing term raises
        :class:`NumericError`.

    Returns
    -------
    ndarray, complex, shape (N,)
    """
    z = _check(z, Z, mu)
    N, R, L = Z.N, Z.R, Z.L
    u = delay_spectra(z, L, R)
    r = _residual_factor(u, Z.sqrt(), float(mu), allow_zero_mu)
    # a[p, j] = sum_k r[p, k] exp(2 pi i j k / N)
    a = np.fft.ifft(r, axis=1) * N
    g = np.zeros(N, dtype=np.complex128)
    for p in range(R):
        s = (p * L) % N
        g += a[p] * np.conj(np.roll(z, -s)) + np.roll(a[p], s) * np.conj(np.roll(z, s))
    return g / (N * R)


@dataclass(frozen=True, eq=False)
class BlockIndexSet:
    """Distinct ``(k, p)`` pairs stored as two parallel index arrays."""

    k: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=np.int64).ravel()
        p = np.asarray(self.p, dtype=np.int64).ravel()
        if k.shape != p.shape:
            raise ParameterError("k and p index arrays differ in length")
        k.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "p", p)

    @property
    def Q(self) -> int:
        return int(self.k.shape[0])

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.k.tolist(), self.p.tolist()))

    @classmethod
    def full(cls, N: int, R: int) -> "BlockIndexSet":
        flat = np.arange(N * R)
        return cls(flat % N, flat // N)


def sample_block(N: int, R: int, Q: int, rng: np.random.Generator) -> BlockIndexSet:
    """Draw ``Q`` distinct pairs uniformly from the ``N R`` grid.

    ``Q == N R`` returns the full set without consuming randomness.
    """
    total = N * R
    if int(Q) != Q or not 1 <= Q <= total:
        raise ParameterError(f"block size must satisfy 1 <= Q <= N*R = {total}, got {Q}")
    Q = int(Q)
    if Q == total:
        return BlockIndexSet.full(N, R)
    flat = np.sort(rng.choice(total, size=Q, replace=False))
    return BlockIndexSet(flat % N, flat // N)


def block_gradient(z, Z: FrogTrace, mu: float, gamma_set: BlockIndexSet, *, backend=None) -> np.ndarray:
    """Unnormalized block gradient ``d_Gamma``.

    The sum of the per-pair contributions over ``gamma_set``; its mean over
    uniform blocks of size ``Q`` is ``Q * full_gradient``.
    """
    z = _check(z, Z, mu)
    if mu <= 0:
        raise ParameterError("block gradient requires mu > 0")
    if gamma_set.Q == 0:
        raise ParameterError("block index set is empty")
    if np.any((gamma_set.k < 0) | (gamma_set.k >= Z.N) | (gamma_set.p < 0) | (gamma_set.p >= Z.R)):
        raise ParameterError("block indices out of range for this trace")
    return kernels.block_gradient_terms(z, Z.sqrt(), Z.L, mu, gamma_set.k, gamma_set.p, backend=backend)
