"""Compare the numba and numpy block-gradient kernels.

Usage::

    python benchmarks/bench_kernels.py [--sizes 64,128,256] [--repeat 50]

For each size the script times one block gradient with ``Q = N`` on both
backends, checks that they agree, and times a short solve with each.
"""

import argparse
import time

import numpy as np

from frogsg import _backend, kernels
from frogsg.model import synthesize_trace
from frogsg.objective import sample_block
from frogsg.signals import PulseSpec, generate_pulse
from frogsg.solver import SolverConfig, bsga_solve


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--repeat", type=int, default=50)
    ap.add_argument("--solve-iters", type=int, default=200)
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else [])
    print(f"backends: {', '.join(backends)}")
    header = f"{'N':>5} {'backend':>7} {'kernel_us':>10} {'solve_s':>8} {'speedup':>8} {'max_rel_diff':>12}"
    print(header)
    for N in (int(s) for s in args.sizes.split(",")):
        x = generate_pulse(PulseSpec(N, seed=1))
        Z = synthesize_trace(x, 1)
        sq = Z.sqrt()
        rng = np.random.default_rng(0)
        z = x + 0.05 * rng.standard_normal(N)
        block = sample_block(N, Z.R, N, rng)
        ref = kernels.block_gradient_terms(z, sq, 1, 0.1, block.k, block.p, backend="numpy")
        cfg = SolverConfig(max_iters=args.solve_iters, seed=0)
        times = {}
        for name in backends:
            call = lambda: kernels.block_gradient_terms(z, sq, 1, 0.1, block.k, block.p, backend=name)
            out = call()  # warm-up and compile
            diff = float(np.max(np.abs(out - ref)) / np.max(np.abs(ref)))
            t_kernel = _best_of(call, args.repeat)
            bsga_solve(Z, z, SolverConfig(max_iters=2), backend=name)
            t0 = time.perf_counter()
            bsga_solve(Z, z, cfg, backend=name)
            t_solve = time.perf_counter() - t0
            times[name] = t_kernel
            speed = times["numpy"] / t_kernel
            print(f"{N:>5} {name:>7} {t_kernel * 1e6:>10.1f} {t_solve:>8.3f} {speed:>8.2f} {diff:>12.2e}")


if __name__ == "__main__":
    main()
