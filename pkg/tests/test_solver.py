import json

import numpy as np
import pytest

from frogsg import _backend
from frogsg.errors import DivergenceError, ParameterError
from frogsg.model import synthesize_trace, trace_distance
from frogsg.objective import loss
from frogsg.signals import PulseSpec, generate_pulse
from frogsg.solver import ITER_CAP, TOLERANCE_MET, SolverConfig, bsga_solve, perturbed_start


def _problem(N=32, L=1, seed=0):
    x = generate_pulse(PulseSpec(N, seed=seed))
    return x, synthesize_trace(x, L)


@pytest.mark.parametrize("kw", [
    dict(gamma1=0.0), dict(gamma1=1.0), dict(gamma=1.2), dict(alpha=0.0), dict(mu0=-1.0),
    dict(epsilon=0.0), dict(max_iters=0), dict(Q=0), dict(gradient_norm="max"), dict(estimate="best"),
    dict(checkpoint_every=0),
])
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        SolverConfig(**kw)


def test_block_size_limits():
    assert SolverConfig().block_size(16, 4) == 16
    with pytest.raises(ParameterError):
        SolverConfig(Q=65).block_size(16, 4)


def test_perturbed_start():
    x = generate_pulse(PulseSpec(16, seed=1))
    assert np.array_equal(perturbed_start(x, 0.0, np.random.default_rng(0)), x)
    x4 = generate_pulse(PulseSpec(4, seed=1))
    diff = perturbed_start(x4, 1.0, np.random.default_rng(3)) - x4
    assert np.allclose(np.abs(diff.real), 1.0) and np.allclose(diff.imag, 0.0)
    with pytest.raises(ParameterError):
        perturbed_start(x, -0.1, np.random.default_rng(0))


def test_perturbed_start_is_unbiased():
    x = generate_pulse(PulseSpec(8, seed=2))
    draws = np.array([perturbed_start(x, 0.5, np.random.default_rng(s)) for s in range(4000)])
    se = 0.5 / np.sqrt(4000)
    assert np.all(np.abs(draws.mean(axis=0).real - x.real) < 3.5 * se)


def test_start_at_truth_stays_close():
    x, Z = _problem(32, 1)
    rep = bsga_solve(Z, x, SolverConfig(max_iters=3000), truth=x)
    assert rep.termination == TOLERANCE_MET
    assert rep.dist_final < 1e-6


def test_start_at_truth_with_stop_distance_is_immediate():
    x, Z = _problem(32, 2)
    rep = bsga_solve(Z, x, SolverConfig(), truth=x, stop_dist=1e-6)
    assert rep.iterations == 0 and rep.termination == TOLERANCE_MET


@pytest.mark.parametrize("L", [1, 2])
def test_recovers_from_perturbed_start(L):
    x, Z = _problem(32, L, seed=3)
    x0 = perturbed_start(x, 0.05 * np.mean(np.abs(x)), np.random.default_rng(0))
    rep = bsga_solve(Z, x0, SolverConfig(seed=1), truth=x)
    assert rep.termination == TOLERANCE_MET
    assert rep.dist_final < 1e-6
    assert rep.iterations_to(1e-6) is not None


def test_mu_trajectory_rule():
    x, Z = _problem(32, 1, seed=4)
    x0 = perturbed_start(x, 0.05 * np.mean(np.abs(x)), np.random.default_rng(1))
    cfg = SolverConfig(seed=2)
    rep = bsga_solve(Z, x0, cfg)
    mus = rep.mu_trajectory
    assert mus[0] == cfg.mu0
    for a, b, g in zip(mus, mus[1:], rep.grad_norm_trajectory):
        assert b == a or b == a * cfg.gamma1
        assert (b < a) == (g < cfg.gamma * a)
    assert rep.termination == TOLERANCE_MET
    assert rep.grad_norm_trajectory[-1] < cfg.epsilon
    assert mus[-1] <= rep.grad_norm_trajectory[-2] / cfg.gamma or mus[-1] < mus[-2]
    assert mus[-1] <= 1e-4 * cfg.mu0


def test_loss_checkpoints_near_truth_mostly_decrease():
    good = 0
    for seed in range(10):
        x, Z = _problem(32, 1, seed=seed)
        x0 = perturbed_start(x, 0.02 * np.mean(np.abs(x)), np.random.default_rng(seed))
        assert trace_distance(x, x0, 1) <= 0.1
        rep = bsga_solve(Z, x0, SolverConfig(seed=seed, max_iters=100, estimate="final"))
        # replay to evaluate checkpoints
        vals = []
        for m in (10, 20, 40, 60, 80, 100):
            r = bsga_solve(Z, x0, SolverConfig(seed=seed, max_iters=m, estimate="final"))
            vals.append(loss(r.estimate, Z, 0.0))
        assert np.all(np.isfinite(vals))
        good += all(b <= a for a, b in zip(vals, vals[1:]))
        assert np.allclose(r.estimate, rep.estimate)
    assert good >= 9


def test_determinism():
    x, Z = _problem(32, 2, seed=5)
    x0 = perturbed_start(x, 0.1 * np.mean(np.abs(x)), np.random.default_rng(0))
    a = bsga_solve(Z, x0, SolverConfig(seed=7), truth=x)
    b = bsga_solve(Z, x0, SolverConfig(seed=7), truth=x)
    assert a.iterations == b.iterations
    assert a.mu_trajectory == b.mu_trajectory
    assert a.grad_norm_trajectory == b.grad_norm_trajectory
    assert np.array_equal(a.estimate, b.estimate)


@pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba unavailable or disabled")
def test_backends_give_same_run():
    x, Z = _problem(16, 1, seed=6)
    x0 = perturbed_start(x, 0.05 * np.mean(np.abs(x)), np.random.default_rng(0))
    a = bsga_solve(Z, x0, SolverConfig(seed=1, max_iters=50), backend="numpy")
    b = bsga_solve(Z, x0, SolverConfig(seed=1, max_iters=50), backend="numba")
    assert np.allclose(a.estimate, b.estimate, rtol=1e-10, atol=1e-14)


def test_iteration_cap():
    x, Z = _problem(16, 1)
    rep = bsga_solve(Z, 0.1 * np.random.default_rng(0).standard_normal(16), SolverConfig(max_iters=5))
    assert rep.termination == ITER_CAP
    assert rep.iterations == 5
    assert rep.dist_trajectory is None and rep.dist_final is None


def test_divergence_reports_iteration():
    x, Z = _problem(16, 1)
    with pytest.raises(DivergenceError) as exc:
        bsga_solve(Z, 10 * np.random.default_rng(0).standard_normal(16), SolverConfig(alpha=1e6, max_iters=100))
    assert exc.value.iteration >= 1


def test_length_mismatch_and_stop_without_truth():
    x, Z = _problem(16, 1)
    with pytest.raises(ParameterError):
        bsga_solve(Z, np.ones(8), SolverConfig())
    with pytest.raises(ParameterError):
        bsga_solve(Z, x, SolverConfig(), stop_dist=1e-6)


def test_best_loss_estimate_never_worse_than_final():
    from frogsg.signals import add_noise
    x, Z = _problem(32, 1, seed=8)
    Zn = add_noise(Z, 20, np.random.default_rng(0))
    x0 = perturbed_start(x, 0.05 * np.mean(np.abs(x)), np.random.default_rng(0))
    best = bsga_solve(Zn, x0, SolverConfig(max_iters=400, estimate="best_loss"))
    last = bsga_solve(Zn, x0, SolverConfig(max_iters=400, estimate="final"))
    assert loss(best.estimate, Zn, 0.0) <= loss(last.estimate, Zn, 0.0)
    assert best.selected_iteration % 10 == 0 or best.selected_iteration == best.iterations
    assert last.selected_iteration == last.iterations


def test_report_json_roundtrip():
    x, Z = _problem(16, 1)
    rep = bsga_solve(Z, x, SolverConfig(max_iters=3), truth=x)
    doc = json.loads(rep.to_json())
    for key in ("estimate", "iterations", "mu_trajectory", "grad_norm_trajectory",
                "dist_trajectory", "termination", "wall_time"):
        assert key in doc
    est = np.array([complex(a, b) for a, b in doc["estimate"]])
    assert np.array_equal(est, rep.estimate)


def test_raw_norm_variant_runs():
    x, Z = _problem(16, 1)
    rep = bsga_solve(Z, x, SolverConfig(gradient_norm="sum", max_iters=20))
    assert rep.iterations <= 20
