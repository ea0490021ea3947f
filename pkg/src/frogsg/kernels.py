"""Hot inner loops: per-term evaluation of the block gradient.

Each sampled pair ``(k, p)`` contributes

    r = u - sqrt(Z[p, k]) * u / sqrt(|u|^2 + mu^2),
    u = sum_n z[n] z[n + pL] exp(-2 pi i n k / N),

    d[j] += r * conj(z[j + pL]) * exp(+2 pi i j k / N)
          + r * conj(z[j - pL]) * exp(+2 pi i (j - pL) k / N).

Two implementations are kept in lockstep: a numba ``@njit`` kernel and a
vectorized numpy one.  :func:`block_gradient_terms` dispatches on the
backend chosen in :mod:`frogsg._backend`.  Both cost ``O(Q N)``.
"""

import numpy as np

from . import _backend


def twiddles(N: int) -> np.ndarray:
    """Return ``exp(-2 pi i m / N)`` for ``m = 0..N-1``."""
    return np.exp(-2j * np.pi * np.arange(N) / N)


def _block_gradient_numpy(z, sqrt_vals, L, mu, ks, ps, tw, zero_mu_ok):
    N = z.shape[0]
    n = np.arange(N)
    shifts = (ps * L) % N
    plus = (n[None, :] + shifts[:, None]) % N
    minus = (n[None, :] - shifts[:, None]) % N
    w = tw[(ks[:, None] * n[None, :]) % N]
    u = np.sum(z[None, :] * z[plus] * w, axis=1)
    phi = np.sqrt(u.real**2 + u.imag**2 + mu * mu)
    s = sqrt_vals[ps, ks]
    if zero_mu_ok:
        safe = np.where(phi > 0.0, phi, 1.0)
        r = np.where(phi > 0.0, u - s * u / safe, 0.0)
    else:
        r = u - s * u / phi
    w_minus = tw[(ks[:, None] * minus) % N]
    terms = r[:, None] * (np.conj(w) * np.conj(z[plus]) + np.conj(w_minus) * np.conj(z[minus]))
    return terms.sum(axis=0)


if _backend.HAVE_NUMBA:
    import numba

    @numba.njit(cache=True, error_model="numpy")
    def _block_gradient_numba(z, sqrt_vals, L, mu, ks, ps, tw, zero_mu_ok):
        N = z.shape[0]
        Q = ks.shape[0]
        out = np.zeros(N, dtype=np.complex128)
        for q in range(Q):
            k = ks[q]
            p = ps[q]
            s = (p * L) % N
            u = 0j
            for n in range(N):
                u += z[n] * z[(n + s) % N] * tw[(n * k) % N]
            phi = np.sqrt(u.real * u.real + u.imag * u.imag + mu * mu)
            if phi > 0.0:
                r = u - sqrt_vals[p, k] * u / phi
            elif zero_mu_ok:
                r = 0j
            else:
                r = u / phi
            for j in range(N):
                jp = (j + s) % N
                jm = (j - s) % N
                out[j] += r * (
                    np.conj(tw[(j * k) % N]) * np.conj(z[jp])
                    + np.conj(tw[(jm * k) % N]) * np.conj(z[jm])
                )
        return out

else:
    _block_gradient_numba = None


def block_gradient_terms(z, sqrt_vals, L, mu, ks, ps, *, zero_mu_ok=False, backend=None):
    """Unnormalized sum of per-term gradient contributions over ``(ks, ps)``.

    Parameters
    ----------
    z : ndarray, complex, shape (N,)
    sqrt_vals : ndarray, float, shape (R, N)
        Entrywise square root of the trace.
    L : int
        Delay stride.
    mu : float
        Smoothing parameter.
    ks, ps : ndarray of int
        Frequency and delay indices of the sampled pairs.
    zero_mu_ok : bool
        With ``mu == 0``, treat terms where ``u`` vanishes as contributing
        zero instead of producing NaN.
    backend : {"numba", "numpy", None}
        Override the process-wide backend.
    """
    z = np.ascontiguousarray(z, dtype=np.complex128)
    sqrt_vals = np.ascontiguousarray(sqrt_vals, dtype=np.float64)
    ks = np.ascontiguousarray(ks, dtype=np.int64)
    ps = np.ascontiguousarray(ps, dtype=np.int64)
    tw = twiddles(z.shape[0])
    name = backend or _backend.backend_name()
    if name == "numba":
        if _block_gradient_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _block_gradient_numba(z, sqrt_vals, int(L), float(mu), ks, ps, tw, bool(zero_mu_ok))
    return _block_gradient_numpy(z, sqrt_vals, int(L), float(mu), ks, ps, tw, bool(zero_mu_ok))
