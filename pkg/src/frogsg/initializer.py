"""Spectral alternating initialization.

Working in the transformed domain, row ``p`` of ``Y`` obeys, for every lag
``l``, the linear model ``y_l = G_l x_l`` where ``x_l[n] = x[n] conj(x[n+l])``
is the ``l``-th wrapped diagonal of ``X = x x^H`` and

    G_l[p, n] = w[n + pL] conj(w[n + pL + l])

is built from the (unknown) pulse ``w``.  Starting from a ptychographic
guess, the initializer alternates regularized per-lag solves for ``x_l``
with a rank-one projection (leading eigenvector of the reassembled ``X``),
rebuilding every ``G_l`` from the new eigenvector.  The final eigenvector is
scaled by the square root of the positive mass of the lag-0 estimate.

For ``L = 1`` each ``G_l`` is ``C J`` with ``C`` circulant and ``J`` the index
reversal ``n -> -n``, so the regularized solves diagonalize under the DFT.
For ``L > 1`` the lag sequences are first interpolated onto every delay.

Scaling.  Eigenvectors are unit norm, while ``G_l`` must be built from a
vector of the signal's norm for ``y_l = G_l x_l`` to balance.  The norm is
read off the data: for ``L = 1``, ``sum_p Y[p, 0] = ||x||^4``.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NumericError, ParameterError
from .model import FrogTrace, as_pulse, inverse_transform, transform_trace


@dataclass(frozen=True)
class InitConfig:
    """Tunables of the spectral initializer."""

    T: int = 2
    lam: float = 0.5
    seed: int = 0
    interpolation: str = "cubic"
    power_iters: int = 500
    power_tol: float = 1e-10

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ParameterError(f"T must be a positive integer, got {self.T}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if self.interpolation not in ("cubic", "lowpass"):
            raise ParameterError(f"interpolation must be 'cubic' or 'lowpass', got {self.interpolation!r}")
        if int(self.power_iters) != self.power_iters or self.power_iters < 1:
            raise ParameterError(f"power_iters must be a positive integer, got {self.power_iters}")
        if not self.power_tol > 0:
            raise ParameterError(f"power_tol must be positive, got {self.power_tol}")


# --------------------------------------------------------------------------
# interpolation along the delay axis


def interpolate_delays(samples, L: int, N: int, method: str = "cubic") -> np.ndarray:
    """Resample a periodic sequence known at delays ``0, L, ..., (R-1)L``.

    ``samples`` has shape ``(R, ...)``; the result has shape ``(N, ...)``
    and agrees with ``samples`` at the measured delays.

    ``"cubic"`` fits a periodic cubic spline through the knots (plus the
    wrap-around knot at ``N``).  ``"lowpass"`` inserts zeros between the
    samples and applies an ideal low-pass filter of ``R`` bins with gain
    ``L``.
    """
    samples = np.asarray(samples)
    R = samples.shape[0]
    if L == 1:
        return samples.copy()
    knots = L * np.arange(R)
    grid = np.arange(N)
    if method == "cubic":
        if R < 2:
            return np.broadcast_to(samples[0], (N,) + samples.shape[1:]).copy()
        ext = np.concatenate([samples, samples[:1]], axis=0)
        kx = np.append(knots, N).astype(float)
        if np.iscomplexobj(ext):
            re = CubicSpline(kx, ext.real, axis=0, bc_type="periodic")(grid)
            im = CubicSpline(kx, ext.imag, axis=0, bc_type="periodic")(grid)
            return re + 1j * im
        return CubicSpline(kx, ext, axis=0, bc_type="periodic")(grid)
    if method == "lowpass":
        expanded = np.zeros((N,) + samples.shape[1:], dtype=np.result_type(samples, np.float64))
        expanded[knots] = samples
        spec = np.fft.fft(expanded, axis=0) * L
        f = np.fft.fftfreq(N, d=1.0 / N)
        half = R / 2
        gain = np.where(np.abs(f) < half, 1.0, np.where(np.abs(f) == half, 0.5, 0.0))
        out = np.fft.ifft(spec * gain.reshape((N,) + (1,) * (samples.ndim - 1)), axis=0)
        return out if np.iscomplexobj(samples) else out.real
    raise ParameterError(f"unknown interpolation {method!r}")


# --------------------------------------------------------------------------
# building blocks


def ptych_start(Z: FrogTrace, rng: np.random.Generator, *, interpolation: str = "cubic") -> np.ndarray:
    """Ptychographic starting vector ``v[r] exp(i theta[r])``.

    ``v[r] = (1/N) sum_k Z[r, k]``; when ``R < N`` the sequence ``v`` is
    interpolated onto every delay first.  Phases are uniform on ``[0, 2 pi)``.
    """
    N = Z.N
    v = Z.values.sum(axis=1) / N
    if Z.R < N:
        v = interpolate_delays(v, Z.L, N, interpolation)
    theta = rng.uniform(0.0, 2 * np.pi, size=N)
    return v * np.exp(1j * theta)


def build_G(w, ell: int, L: int, R: int | None = None) -> np.ndarray:
    """Dense ``R x N`` matrix ``G[p, n] = w[n + pL] conj(w[n + pL + ell])``."""
    w = np.asarray(w, dtype=np.complex128)
    N = w.shape[0]
    if R is None:
        R = -(-N // L)
    idx = (np.arange(N)[None, :] + L * np.arange(R)[:, None]) % N
    return w[idx] * np.conj(w[(idx + ell) % N])


def proximal_solve(G, y_ell, x_prev, lam: float) -> np.ndarray:
    """Minimizer of ``||y - G p||^2 + ||p - x_prev||^2 / (2 lam)`` by a dense solve."""
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    G = np.asarray(G, dtype=np.complex128)
    tau = 1.0 / (2.0 * lam)
    A = G.conj().T @ G + tau * np.eye(G.shape[1])
    b = G.conj().T @ np.asarray(y_ell) + tau * np.asarray(x_prev)
    try:
        return np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"proximal system is singular: {exc}") from exc


def _reverse(a: np.ndarray) -> np.ndarray:
    """Index reversal ``a[-n]`` along the last axis."""
    return np.roll(a[..., ::-1], 1, axis=-1)


def proximal_solve_all_lags(w, Y: np.ndarray, x_prev: np.ndarray, lam: float) -> np.ndarray:
    """Regularized solves for every lag at once, ``L = 1``, via the DFT.

    Parameters
    ----------
    w : ndarray, shape (N,)
        Vector the ``G_l`` are built from.
    Y : ndarray, shape (N, N)
        Transformed trace; column ``l`` is ``y_l``.
    x_prev : ndarray, shape (N, N)
        Row ``l`` is the proximal anchor for lag ``l``.

    Returns
    -------
    ndarray, shape (N, N)
        Row ``l`` is the solution for lag ``l``.
    """
    w = np.asarray(w, dtype=np.complex128)
    N = w.shape[0]
    tau = 1.0 / (2.0 * lam)
    ells = np.arange(N)
    # c_l[m] = w[m] conj(w[m + l]);  G_l = conv(c_l) J
    c = w[None, :] * np.conj(w[(np.arange(N)[None, :] + ells[:, None]) % N])
    ch = np.fft.fft(c, axis=1)
    yh = np.fft.fft(np.asarray(Y).T, axis=1)
    ph = np.fft.fft(_reverse(np.asarray(x_prev)), axis=1)
    q = np.fft.ifft((np.conj(ch) * yh + tau * ph) / (np.abs(ch) ** 2 + tau), axis=1)
    return _reverse(q)


def extract_diagonals(X) -> np.ndarray:
    """Row ``l`` holds the wrapped diagonal ``X[j, (j + l) mod N]``."""
    X = np.asarray(X)
    N = X.shape[0]
    j = np.arange(N)
    return X[j[None, :], (j[None, :] + j[:, None]) % N]


def assemble_X0(diags) -> np.ndarray:
    """Inverse of :func:`extract_diagonals`: ``X[j, (j + l) mod N] = diags[l, j]``."""
    diags = np.asarray(diags)
    N = diags.shape[0]
    if diags.shape != (N, N):
        raise ParameterError(f"expected an N x N stack of lag vectors, got {diags.shape}")
    j = np.arange(N)
    X = np.empty_like(diags)
    X[j[None, :], (j[None, :] + j[:, None]) % N] = diags
    return X


@dataclass(frozen=True, eq=False)
class EigResult:
    vector: np.ndarray
    value: complex
    iterations: int
    converged: bool
    residual: float


def _fix_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    if v[i] == 0:
        return v
    return v * (np.abs(v[i]) / v[i])


def leading_eigvec(X, power_iters: int = 500, power_tol: float = 1e-10) -> EigResult:
    """Unit eigenvector of the largest-magnitude eigenvalue of ``(X + X^H)/2``.

    Power iteration from the normalized all-ones vector.  Stops when the
    eigen-residual ``||H v - rho v||`` falls below ``power_tol * |rho|``;
    otherwise returns the last iterate with ``converged = False``.  The
    phase is fixed so the largest-magnitude entry is real and positive.
    """
    X = np.asarray(X, dtype=np.complex128)
    if not np.all(np.isfinite(X)):
        raise NumericError("matrix has non-finite entries")
    H = 0.5 * (X + X.conj().T)
    N = H.shape[0]
    v = np.full(N, 1.0 / np.sqrt(N), dtype=np.complex128)
    rho = 0.0
    res = np.inf
    for it in range(1, power_iters + 1):
        Hv = H @ v
        rho = float(np.real(np.vdot(v, Hv)))
        res = float(np.linalg.norm(Hv - rho * v))
        if res <= power_tol * max(abs(rho), np.finfo(float).tiny):
            return EigResult(_fix_phase(v), rho, it - 1, True, res)
        nrm = np.linalg.norm(Hv)
        if nrm == 0.0:
            return EigResult(_fix_phase(v), 0.0, it - 1, True, 0.0)
        v = Hv / nrm
    Hv = H @ v
    rho = float(np.real(np.vdot(v, Hv)))
    res = float(np.linalg.norm(Hv - rho * v))
    return EigResult(_fix_phase(v), rho, power_iters, res <= power_tol * abs(rho), res)


def energy_estimate(Y: np.ndarray) -> float:
    """``||x||`` from a complete (``L = 1``) transformed trace: ``(sum_p Y[p, 0])^(1/4)``."""
    return float(max(np.real(np.sum(Y[:, 0])), 0.0) ** 0.25)


def _scaled(v: np.ndarray, norm: float) -> np.ndarray:
    n = np.linalg.norm(v)
    return v * (norm / n) if n > 0 else v


# --------------------------------------------------------------------------
# drivers


def init_L1(Z: FrogTrace, cfg: InitConfig = InitConfig(), *, log=None) -> np.ndarray:
    """Spectral initializer for complete traces (``L = 1``).

    Parameters
    ----------
    Z : FrogTrace
        Trace with ``L == 1``.
    cfg : InitConfig
    log : text stream, optional
        Receives one JSON line per outer iteration with the mean lag
        residual and the eigen-residual.
    """
    if Z.L != 1:
        raise ParameterError(f"init_L1 needs a complete trace (L = 1), got L = {Z.L}")
    N = Z.N
    Y = transform_trace(Z).values
    rng = np.random.default_rng(cfg.seed)
    s = energy_estimate(Y)
    w = _scaled(ptych_start(Z, rng, interpolation=cfg.interpolation), s)
    x_prev = extract_diagonals(np.outer(w, np.conj(w)))
    for t in range(1, cfg.T + 1):
        sol = proximal_solve_all_lags(w, Y, x_prev, cfg.lam)
        eig = leading_eigvec(assemble_X0(sol), cfg.power_iters, cfg.power_tol)
        if log is not None:
            fit = _lag_residual(w, Y, sol)
            log.write(json.dumps({"t": t, "lag_residual": fit, "eig_residual": eig.residual,
                                  "eig_converged": eig.converged}) + "\n")
        x_prev = sol
        w = s * eig.vector
    beta = np.sqrt(np.sum(np.clip(np.real(x_prev[0]), 0.0, None)))
    return beta * (w / s if s > 0 else w)


def _lag_residual(w, Y, sol) -> float:
    N = w.shape[0]
    total = 0.0
    for ell in range(N):
        total += float(np.linalg.norm(Y[:, ell] - build_G(w, ell, 1) @ sol[ell]))
    return total / N


def upsample_trace(Z: FrogTrace, method: str = "cubic") -> FrogTrace:
    """Interpolate an undersampled trace onto every delay (``L = 1``).

    Each lag sequence of the transformed trace is interpolated along the
    delay axis; the dense trace is then recovered by inverting the
    transform, keeping the real part and clipping at zero.
    """
    N = Z.N
    Y = transform_trace(Z).values
    Yi = interpolate_delays(Y, Z.L, N, method)
    Zi = np.clip(inverse_transform(Yi), 0.0, None)
    return FrogTrace(Zi, 1)


def init_Lgt1(Z: FrogTrace, cfg: InitConfig = InitConfig(), *, log=None) -> np.ndarray:
    """Spectral initializer for undersampled traces (``L > 1``)."""
    if Z.L <= 1:
        raise ParameterError(f"init_Lgt1 needs L > 1, got L = {Z.L}")
    return init_L1(upsample_trace(Z, cfg.interpolation), cfg, log=log)


def spectral_init(Z: FrogTrace, cfg: InitConfig = InitConfig(), *, log=None) -> np.ndarray:
    """Dispatch to :func:`init_L1` or :func:`init_Lgt1` on the trace stride."""
    if Z.L == 1:
        return init_L1(Z, cfg, log=log)
    return init_Lgt1(Z, cfg, log=log)


def validate_start(x, N: int) -> np.ndarray:
    x = as_pulse(x)
    if x.shape[0] != N:
        raise ParameterError(f"start has length {x.shape[0]}, expected {N}")
    return x
