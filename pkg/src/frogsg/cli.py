"""Command line interface.

Exit codes: 0 success, 1 usage or parse error, 2 a solve hit its iteration
cap, 3 I/O error.
"""

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, io
from .errors import FrogError
from .experiments import ExperimentConfig, aggregate, run_experiment, write_results
from .initializer import InitConfig, ptych_start, spectral_init
from .model import synthesize_trace
from .signals import PulseSpec, add_noise, generate_pulse
from .solver import ITER_CAP, SolverConfig, bsga_solve

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_IO = 0, 1, 2, 3

_EXPERIMENTS = {
    "success-rate": "success_rate",
    "init-compare": "init_compare",
    "noise-sweep": "noise_sweep",
    "bench": "bench",
}

# defaults applied before the config file and the flags
_EXPERIMENT_DEFAULTS = {
    "success_rate": {"N": 64, "L": [1, 2, 4], "delta": [0.0, 0.05, 0.1, 0.2], "trials": 20},
    "init_compare": {"N": 64, "L": [1, 2, 3, 4], "snr": ["inf"], "trials": 20},
    "noise_sweep": {"N": 64, "L": [1], "snr": [8, 12, 16, 20], "trials": 10},
    "bench": {"N": 128, "L": [1, 2, 4], "trials": 10},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _add_solver_args(p):
    g = p.add_argument_group("solver")
    g.add_argument("--alpha", type=float)
    g.add_argument("--mu0", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--gamma1", type=float)
    g.add_argument("--q", dest="Q", type=int, help="block size (default N)")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--max-iters", type=int)
    g.add_argument("--estimate", choices=("final", "best_loss"))
    g = p.add_argument_group("initializer")
    g.add_argument("--T", dest="T", type=int)
    g.add_argument("--lam", type=float)
    g.add_argument("--interpolation", choices=("cubic", "lowpass"))


def _solver_overrides(args) -> dict:
    keys = ("alpha", "mu0", "gamma", "gamma1", "Q", "epsilon", "max_iters", "estimate")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _init_overrides(args) -> dict:
    keys = ("T", "lam", "interpolation")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frogsg", description="FROG pulse recovery by block stochastic gradient descent.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a pulse and its trace")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--bandlimit", type=int)
    p.add_argument("--center", type=float)
    p.add_argument("--width", type=float)
    p.add_argument("--snr", type=float, default=math.inf, help="dB; default noiseless")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")

    p = sub.add_parser("solve", help="recover a pulse from a trace file")
    p.add_argument("trace")
    p.add_argument("--init", choices=("spectral", "ptych", "random", "file"), default="spectral")
    p.add_argument("--init-file")
    p.add_argument("--truth", help="pulse file used to report distances")
    p.add_argument("--stop-dist", type=float, help="stop once the distance to --truth is below this")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.add_argument("--config", help="JSON file with 'solver' and 'init' sections")
    _add_solver_args(p)

    for name, kind in _EXPERIMENTS.items():
        p = sub.add_parser(name, help=f"run the {kind} experiment")
        p.add_argument("--config")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out")
        p.add_argument("--n", type=int)
        p.add_argument("--l", type=_ints)
        p.add_argument("--trials", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--threshold", type=float)
        if kind == "success_rate":
            p.add_argument("--delta", type=_floats)
        if kind in ("init_compare", "noise_sweep"):
            p.add_argument("--snr", type=_floats)
        _add_solver_args(p)
    return parser


def _cmd_synth(args) -> int:
    spec = PulseSpec(args.n, B=args.bandlimit, spectral_center=args.center, spectral_width=args.width, seed=args.seed)
    x = generate_pulse(spec)
    Z = synthesize_trace(x, args.l)
    if not math.isinf(args.snr):
        Z = add_noise(Z, args.snr, np.random.default_rng([args.seed, 1]))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_pulse(out / "pulse.csv", x)
    io.write_trace(out / "trace.csv", Z)
    print(f"N={Z.N} L={Z.L} R={Z.R}")
    return EXIT_OK


def _load_solve_config(args):
    solver, init = {}, {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        unknown = set(doc) - {"solver", "init"}
        if unknown:
            raise FrogError(f"unknown config keys: {sorted(unknown)}")
        solver, init = doc.get("solver", {}), doc.get("init", {})
    solver = {**solver, **_solver_overrides(args), "seed": args.seed}
    init = {**init, **_init_overrides(args), "seed": args.seed}
    return SolverConfig(**solver), InitConfig(**init)


def _cmd_solve(args) -> int:
    Z = io.read_trace(args.trace)
    truth = io.read_pulse(args.truth) if args.truth else None
    solver_cfg, init_cfg = _load_solve_config(args)
    if args.init == "spectral":
        x0 = spectral_init(Z, init_cfg)
    elif args.init == "ptych":
        x0 = ptych_start(Z, np.random.default_rng(args.seed), interpolation=init_cfg.interpolation)
    elif args.init == "random":
        rng = np.random.default_rng(args.seed)
        x0 = (rng.standard_normal(Z.N) + 1j * rng.standard_normal(Z.N)) / np.sqrt(2 * Z.N)
    else:
        if not args.init_file:
            raise FrogError("--init file requires --init-file")
        x0 = io.read_pulse(args.init_file)
    rep = bsga_solve(Z, x0, solver_cfg, truth=truth, stop_dist=args.stop_dist)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(rep.to_json(indent=1) + "\n")
    io.write_pulse(out / "estimate.csv", rep.estimate)
    msg = f"termination={rep.termination} iterations={rep.iterations} wall_time={rep.wall_time:.3f}s"
    if rep.dist_final is not None:
        msg += f" dist={rep.dist_final:.3e}"
    print(msg)
    return EXIT_CAP if rep.termination == ITER_CAP else EXIT_OK


def _cmd_experiment(args, kind: str) -> int:
    d = {"experiment": kind, **_EXPERIMENT_DEFAULTS[kind]}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        if doc.get("experiment", kind) != kind:
            raise FrogError(f"config describes experiment {doc['experiment']!r}, not {kind!r}")
        d.update(doc)
    for flag, key in (("seed", "master_seed"), ("out", "output_dir"), ("n", "N"), ("l", "L"),
                      ("trials", "trials"), ("workers", "workers"), ("threshold", "success_threshold"),
                      ("delta", "delta"), ("snr", "snr")):
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    cfg = ExperimentConfig.from_dict(d)
    solver_over, init_over = _solver_overrides(args), _init_overrides(args)
    if solver_over or init_over:
        cfg = replace(cfg, solver=replace(cfg.solver, **solver_over), init=replace(cfg.init, **init_over))
    rows = run_experiment(cfg)
    out = write_results(cfg, rows)
    for a in aggregate(rows):
        print(
            f"L={a['L']} delta={a['delta']:g} snr={a['snr']:g} {a['method']:<8} "
            f"success={a['success_rate']:.2f} mean_dist={a['mean_dist']:.3e} "
            f"median_iters={a['median_iterations']:g} median_time={a['median_wall_time']:.3f}s"
        )
    print(f"results written to {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_experiment(args, _EXPERIMENTS[args.command])
    except OSError as exc:
        print(f"frogsg: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FrogError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"frogsg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
