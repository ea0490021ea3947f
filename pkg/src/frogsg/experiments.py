"""Seeded experiment runner behind the command line.

Every experiment is a pure function of its :class:`ExperimentConfig`.
Trial ``i`` uses seed ``master_seed + i`` for the pulse, the initializer and
the solver; noise, perturbations and other draws use independent streams
derived from the same seed.  A run directory holds

``config.json``
    Echo of the configuration.
``results.csv``
    One row per (L, delta, snr, trial, method).
``aggregates.csv``
    Success rates and summary statistics per (L, delta, snr, method).
``timing.csv``
    Wall-clock times.  Kept apart so the other files are byte-reproducible.
"""

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .initializer import InitConfig, ptych_start, spectral_init
from .model import synthesize_trace, trace_distance
from .signals import PulseSpec, add_noise, generate_pulse
from .solver import SolverConfig, bsga_solve, perturbed_start

KINDS = ("success_rate", "init_compare", "noise_sweep", "bench", "single_solve")
RESULT_FIELDS = ("experiment", "L", "delta", "snr", "trial", "method", "dist_final", "iterations", "success")
TIMING_FIELDS = ("experiment", "L", "delta", "snr", "trial", "method", "wall_time")
AGGREGATE_FIELDS = (
    "experiment", "L", "delta", "snr", "method", "trials", "successes", "success_rate",
    "mean_dist", "median_dist", "median_iterations", "median_wall_time",
)

# independent random streams per trial
_NOISE, _PERTURB = 1, 2


def _inf_from_json(v):
    if v is None or (isinstance(v, str) and v.lower() in ("inf", "+inf", "infinity")):
        return math.inf
    return float(v)


def _inf_to_json(v):
    return "inf" if math.isinf(v) else v


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one experiment run.

    ``delta`` values are multiples of the mean sample magnitude of each
    pulse when ``delta_relative`` is true, absolute otherwise.  ``snr``
    values are in dB; ``inf`` means noiseless.
    """

    experiment: str = "single_solve"
    N: int = 64
    L: tuple = (1,)
    delta: tuple = (0.0,)
    snr: tuple = (math.inf,)
    trials: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)
    init: InitConfig = field(default_factory=InitConfig)
    output_dir: str = "results"
    master_seed: int = 0
    success_threshold: float = 1e-6
    delta_relative: bool = True
    stop_at_threshold: bool = True
    pulse: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in KINDS:
            raise ParameterError(f"unknown experiment {self.experiment!r}; expected one of {', '.join(KINDS)}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer, got {self.trials}")
        object.__setattr__(self, "L", tuple(int(v) for v in self.L))
        object.__setattr__(self, "delta", tuple(float(v) for v in self.delta))
        object.__setattr__(self, "snr", tuple(_inf_from_json(v) for v in self.snr))
        for L in self.L:
            if not 1 <= L < self.N:
                raise ParameterError(f"stride L={L} out of range for N={self.N}")
        if any(d < 0 for d in self.delta):
            raise ParameterError("delta values must be nonnegative")
        if not self.success_threshold > 0:
            raise ParameterError("success_threshold must be positive")
        unknown = set(self.pulse) - {"B", "spectral_center", "spectral_width"}
        if unknown:
            raise ParameterError(f"unknown pulse keys: {sorted(unknown)}")
        self.pulse_spec(0)

    def pulse_spec(self, seed: int) -> PulseSpec:
        return PulseSpec(self.N, seed=seed, **self.pulse)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        """Build from a plain mapping; unknown keys raise :class:`ParameterError`."""
        d = dict(d)
        allowed = {f.name for f in fields(cls)}
        unknown = set(d) - allowed
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        for key, sub in (("solver", SolverConfig), ("init", InitConfig)):
            if key in d and not isinstance(d[key], sub):
                val = d[key] or {}
                if not isinstance(val, dict):
                    raise ParameterError(f"{key} must be a mapping")
                bad = set(val) - {f.name for f in fields(sub)}
                if bad:
                    raise ParameterError(f"unknown {key} keys: {sorted(bad)}")
                d[key] = sub(**val)
        for key in ("L", "delta", "snr"):
            if key in d and not isinstance(d[key], (list, tuple)):
                d[key] = [d[key]]
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["L"] = list(self.L)
        d["delta"] = list(self.delta)
        d["snr"] = [_inf_to_json(v) for v in self.snr]
        return d


@dataclass(frozen=True)
class _Task:
    experiment: str
    L: int
    delta: float
    snr: float
    trial: int


def _tasks(cfg: ExperimentConfig) -> list[_Task]:
    kind = cfg.experiment
    deltas = cfg.delta if kind == "success_rate" else (0.0,)
    snrs = cfg.snr if kind in ("init_compare", "noise_sweep", "single_solve") else (math.inf,)
    return [
        _Task(kind, L, d, s, t)
        for L in cfg.L
        for d in deltas
        for s in snrs
        for t in range(cfg.trials)
    ]


def _row(task: _Task, method: str, dist: float, iterations: int, wall: float, threshold: float) -> dict:
    return {
        "experiment": task.experiment,
        "L": task.L,
        "delta": task.delta,
        "snr": task.snr,
        "trial": task.trial,
        "method": method,
        "dist_final": float(dist),
        "iterations": int(iterations),
        "success": bool(dist < threshold),
        "wall_time": float(wall),
    }


def run_trial(cfg: ExperimentConfig, task: _Task) -> list[dict]:
    """Execute one trial and return its result rows."""
    seed = cfg.master_seed + task.trial
    x = generate_pulse(cfg.pulse_spec(seed))
    Z = synthesize_trace(x, task.L)
    if not math.isinf(task.snr):
        Z = add_noise(Z, task.snr, np.random.default_rng([seed, _NOISE]))
    init_cfg = replace(cfg.init, seed=seed)
    solver_cfg = replace(cfg.solver, seed=seed)
    thr = cfg.success_threshold
    stop = thr if cfg.stop_at_threshold and math.isinf(task.snr) else None

    if task.experiment == "init_compare":
        rows = []
        t0 = time.perf_counter()
        x_spec = spectral_init(Z, init_cfg)
        t1 = time.perf_counter()
        x_pty = ptych_start(Z, np.random.default_rng(seed), interpolation=cfg.init.interpolation)
        t2 = time.perf_counter()
        rows.append(_row(task, "spectral", trace_distance(x, x_spec, task.L), 0, t1 - t0, thr))
        rows.append(_row(task, "ptych", trace_distance(x, x_pty, task.L), 0, t2 - t1, thr))
        return rows

    t0 = time.perf_counter()
    if task.experiment == "success_rate":
        scale = float(np.mean(np.abs(x))) if cfg.delta_relative else 1.0
        x0 = perturbed_start(x, task.delta * scale, np.random.default_rng([seed, _PERTURB]))
    else:
        x0 = spectral_init(Z, init_cfg)
    rep = bsga_solve(Z, x0, solver_cfg, truth=x, stop_dist=stop)
    wall = time.perf_counter() - t0
    return [_row(task, "bsga", rep.dist_final, rep.iterations, wall, thr)]


def _run_one(args):
    cfg, task = args
    return run_trial(cfg, task)


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Run every trial; rows come back sorted by (L, delta, snr, trial, method)."""
    tasks = _tasks(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_one, [(cfg, t) for t in tasks]))
    else:
        chunks = [run_trial(cfg, t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r["L"], r["delta"], r["snr"], r["trial"], r["method"]))
    return rows


def aggregate(rows: list[dict]) -> list[dict]:
    """Per-group success rate and summaries.

    ``median_iterations`` and ``median_wall_time`` are taken over
    successful trials only (empty groups give NaN).
    """
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        key = (r["experiment"], r["L"], r["delta"], r["snr"], r["method"])
        groups.setdefault(key, []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: (k[1], k[2], k[3], k[4])):
        g = groups[key]
        dists = np.array([r["dist_final"] for r in g])
        ok = [r for r in g if r["success"]]
        out.append({
            "experiment": key[0],
            "L": key[1],
            "delta": key[2],
            "snr": key[3],
            "method": key[4],
            "trials": len(g),
            "successes": len(ok),
            "success_rate": len(ok) / len(g),
            "mean_dist": float(np.mean(dists)),
            "median_dist": float(np.median(dists)),
            "median_iterations": float(np.median([r["iterations"] for r in ok])) if ok else math.nan,
            "median_wall_time": float(np.median([r["wall_time"] for r in ok])) if ok else math.nan,
        })
    return out


def _cell(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def _write_csv(path: Path, rows: list[dict], columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])


def write_results(cfg: ExperimentConfig, rows: list[dict], out_dir=None) -> Path:
    """Persist a run; returns the run directory."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    _write_csv(out / "results.csv", rows, RESULT_FIELDS)
    aggs = aggregate(rows)
    det_cols = tuple(c for c in AGGREGATE_FIELDS if c != "median_wall_time")
    _write_csv(out / "aggregates.csv", aggs, det_cols)
    _write_csv(out / "timing.csv", rows, TIMING_FIELDS)
    _write_csv(out / "timing_aggregates.csv", aggs, ("experiment", "L", "delta", "snr", "method", "median_wall_time"))
    return out
