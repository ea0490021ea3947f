"""Recovery of ultrashort pulses from SHG FROG traces.

A block stochastic gradient solver on a smoothed amplitude loss, a spectral
alternating initializer, a test-pulse generator and an experiment harness.
"""

__version__ = "0.1.0"

from .errors import DivergenceError, FrogError, NumericError, ParameterError, ParseError
from .initializer import InitConfig, init_L1, init_Lgt1, ptych_start, spectral_init
from .model import (
    FrogTrace,
    TransformedTrace,
    apply_ambiguity,
    synthesize_trace,
    trace_distance,
    transform_trace,
)
from .objective import BlockIndexSet, block_gradient, full_gradient, loss, phi_mu, sample_block
from .signals import PulseSpec, add_noise, generate_pulse
from .solver import SolveReport, SolverConfig, bsga_solve, perturbed_start

__all__ = [
    "BlockIndexSet",
    "DivergenceError",
    "FrogError",
    "FrogTrace",
    "InitConfig",
    "NumericError",
    "ParameterError",
    "ParseError",
    "PulseSpec",
    "SolveReport",
    "SolverConfig",
    "TransformedTrace",
    "add_noise",
    "apply_ambiguity",
    "block_gradient",
    "bsga_solve",
    "full_gradient",
    "generate_pulse",
    "init_L1",
    "init_Lgt1",
    "loss",
    "perturbed_start",
    "phi_mu",
    "ptych_start",
    "sample_block",
    "spectral_init",
    "synthesize_trace",
    "trace_distance",
    "transform_trace",
]
