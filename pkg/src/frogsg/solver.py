"""Block stochastic gradient recovery with geometric smoothing descent.

Each iteration samples a block of ``Q`` distinct ``(k, p)`` pairs, forms the
unnormalized block gradient ``d`` and steps ``z <- z - alpha d``.  The
smoothing level shrinks, ``mu <- gamma1 mu``, whenever the gradient
statistic falls below ``gamma mu``; the run stops once the statistic falls
below ``epsilon``.

The statistic is ``||d|| / Q`` by default (``gradient_norm="mean"``), an
unbiased estimate of the full gradient norm scale.  ``"sum"`` uses the raw
``||d||``.  With the raw norm the smoothing rule only fires for pulses of
one particular energy, since ``||d||`` grows like ``||x||^3`` while a fixed
``mu`` schedule is energy independent; the mean keeps the schedule usable
across pulse scales.  The step itself always uses the unnormalized ``d``.

With a fixed step the iterates keep jittering once the residual is
nonzero (noisy data).  ``estimate="best_loss"`` therefore returns, among
checkpoints taken every ``checkpoint_every`` updates and the last iterate,
the one with the smallest unsmoothed data misfit ``h(z, 0)``.  This uses
only the trace, never the ground truth.  ``estimate="final"`` returns the
last iterate.
"""

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceError, ParameterError
from .model import FrogTrace, as_pulse, delay_spectra, distance_to_sqrt_trace, synthesize_trace
from .objective import full_gradient, sample_block

TOLERANCE_MET = "tolerance_met"
ITER_CAP = "iter_cap"


@dataclass(frozen=True)
class SolverConfig:
    """Tunables of the block stochastic gradient solver.

    ``Q = None`` means one block per frequency row, ``Q = N``.
    """

    gamma1: float = 0.1
    gamma: float = 0.1
    alpha: float = 0.6
    mu0: float = 65.0
    Q: int | None = None
    epsilon: float = 1e-10
    max_iters: int = 5000
    seed: int = 0
    gradient_norm: str = "mean"
    full_gradient_stop: bool = False
    estimate: str = "best_loss"
    checkpoint_every: int = 10

    def __post_init__(self):
        for name in ("gamma1", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not self.mu0 >= 0:
            raise ParameterError(f"mu0 must be nonnegative, got {self.mu0}")
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ParameterError(f"max_iters must be a positive integer, got {self.max_iters}")
        if self.Q is not None and (int(self.Q) != self.Q or self.Q < 1):
            raise ParameterError(f"Q must be a positive integer, got {self.Q}")
        if self.gradient_norm not in ("mean", "sum"):
            raise ParameterError(f"gradient_norm must be 'mean' or 'sum', got {self.gradient_norm!r}")
        if self.estimate not in ("final", "best_loss"):
            raise ParameterError(f"estimate must be 'final' or 'best_loss', got {self.estimate!r}")
        if int(self.checkpoint_every) != self.checkpoint_every or self.checkpoint_every < 1:
            raise ParameterError(f"checkpoint_every must be a positive integer, got {self.checkpoint_every}")

    def block_size(self, N: int, R: int) -> int:
        Q = N if self.Q is None else int(self.Q)
        if Q > N * R:
            raise ParameterError(f"Q = {Q} exceeds the number of trace entries {N * R}")
        return Q


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of one solve.

    ``mu_trajectory[t]`` and ``grad_norm_trajectory[t]`` belong to iteration
    ``t``; ``dist_trajectory[0]`` is the starting distance and
    ``dist_trajectory[t]`` the distance after ``t`` updates.
    ``selected_iteration`` is the update count at which ``estimate`` was
    taken and ``dist_final`` its distance to the truth, when known.
    """

    estimate: np.ndarray
    iterations: int
    mu_trajectory: list = field(default_factory=list)
    grad_norm_trajectory: list = field(default_factory=list)
    dist_trajectory: list | None = None
    termination: str = ITER_CAP
    wall_time: float = 0.0
    selected_iteration: int = 0
    dist_final: float | None = None

    def iterations_to(self, threshold: float) -> int | None:
        """First update count after which the distance is below ``threshold``."""
        if not self.dist_trajectory:
            return None
        for t, d in enumerate(self.dist_trajectory):
            if d < threshold:
                return t
        return None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["estimate"] = [[float(v.real), float(v.imag)] for v in self.estimate]
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def perturbed_start(x, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Return ``x + delta * zeta`` with real Rademacher entries ``zeta``."""
    if not delta >= 0:
        raise ParameterError(f"delta must be nonnegative, got {delta}")
    x = as_pulse(x)
    zeta = rng.choice(np.array([-1.0, 1.0]), size=x.shape[0])
    return x + delta * zeta


def bsga_solve(
    Z: FrogTrace,
    x0,
    cfg: SolverConfig = SolverConfig(),
    truth=None,
    *,
    stop_dist: float | None = None,
    backend: str | None = None,
) -> SolveReport:
    """Recover a pulse from its trace by block stochastic gradient descent.

    Parameters
    ----------
    Z : FrogTrace
    x0 : array_like, complex, shape (N,)
        Starting point.
    cfg : SolverConfig
    truth : array_like, optional
        Ground truth; when given the relative trace distance is recorded
        after every update.
    stop_dist : float, optional
        Additionally stop (as ``tolerance_met``) once the recorded distance
        drops below this value.  Requires ``truth``.
    backend : {"numba", "numpy"}, optional
        Kernel override.

    Raises
    ------
    DivergenceError
        If an iterate becomes non-finite.
    """
    z = as_pulse(x0).copy()
    N, R, L = Z.N, Z.R, Z.L
    if z.shape[0] != N:
        raise ParameterError(f"start has length {z.shape[0]}, trace has width {N}")
    if stop_dist is not None and truth is None:
        raise ParameterError("stop_dist requires a ground truth")
    Q = cfg.block_size(N, R)
    scale = 1.0 / Q if cfg.gradient_norm == "mean" else 1.0
    sqrt_vals = np.ascontiguousarray(Z.sqrt())
    rng = np.random.default_rng(cfg.seed)
    sqrt_truth = synthesize_trace(truth, L).sqrt() if truth is not None else None

    mu = float(cfg.mu0)
    mus, norms = [], []
    dists = [distance_to_sqrt_trace(sqrt_truth, z, L)] if sqrt_truth is not None else None
    termination = ITER_CAP
    keep_best = cfg.estimate == "best_loss"
    best_loss, best_z, best_it = np.inf, z, 0
    t0 = time.perf_counter()
    it = 0
    if stop_dist is not None and dists[0] < stop_dist:
        termination = TOLERANCE_MET
    while termination != TOLERANCE_MET and it < cfg.max_iters:
        block = sample_block(N, R, Q, rng)
        # overflow is reported below as divergence, not as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            d = kernels.block_gradient_terms(z, sqrt_vals, L, mu, block.k, block.p, zero_mu_ok=True, backend=backend)
            stat = float(np.linalg.norm(d)) * scale
        if not np.isfinite(stat):
            raise DivergenceError(it + 1)
        mus.append(mu)
        norms.append(stat)
        if cfg.full_gradient_stop:
            stop = np.linalg.norm(full_gradient(z, Z, max(mu, 0.0), allow_zero_mu=True)) < cfg.epsilon
        else:
            stop = stat < cfg.epsilon
        if stop:
            termination = TOLERANCE_MET
            break
        z = z - cfg.alpha * d
        it += 1
        if not np.all(np.isfinite(z)):
            raise DivergenceError(it)
        if stat < cfg.gamma * mu:
            mu *= cfg.gamma1
        if keep_best and it % cfg.checkpoint_every == 0:
            h = _misfit(z, sqrt_vals, L)
            if h < best_loss:
                best_loss, best_z, best_it = h, z, it
        if dists is not None:
            dists.append(distance_to_sqrt_trace(sqrt_truth, z, L))
            if stop_dist is not None and dists[-1] < stop_dist:
                termination = TOLERANCE_MET
                break
    estimate, selected = z, it
    if keep_best and best_it != it and best_loss < _misfit(z, sqrt_vals, L):
        estimate, selected = best_z, best_it
    dist_final = None
    if sqrt_truth is not None:
        dist_final = dists[-1] if selected == it else distance_to_sqrt_trace(sqrt_truth, estimate, L)
    return SolveReport(
        estimate=estimate,
        iterations=it,
        mu_trajectory=mus,
        grad_norm_trajectory=norms,
        dist_trajectory=dists,
        termination=termination,
        wall_time=time.perf_counter() - t0,
        selected_iteration=selected,
        dist_final=dist_final,
    )


def _misfit(z, sqrt_vals, L) -> float:
    u = delay_spectra(z, L, sqrt_vals.shape[0])
    return float(np.mean((np.abs(u) - sqrt_vals) ** 2))
