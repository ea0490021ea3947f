"""CSV readers and writers for pulses and traces.

Trace files start with ``# frog-trace N=<N> L=<L> R=<R>`` followed by ``R``
comma-separated rows of ``N`` values, one row per delay.  Pulse files start
with ``# pulse N=<N>`` followed by ``N`` rows of ``re,im``.
"""

import re
from pathlib import Path

import numpy as np

from .errors import ParseError, ParameterError
from .model import FrogTrace, as_pulse, num_delays

_TRACE_HEADER = re.compile(r"^#\s*frog-trace\s+N=(\d+)\s+L=(\d+)\s+R=(\d+)\s*$")
_PULSE_HEADER = re.compile(r"^#\s*pulse\s+N=(\d+)\s*$")


def _fmt(v: float) -> str:
    return repr(float(v))


def write_trace(path, Z: FrogTrace) -> None:
    lines = [f"# frog-trace N={Z.N} L={Z.L} R={Z.R}"]
    lines += [",".join(_fmt(v) for v in row) for row in Z.values]
    Path(path).write_text("\n".join(lines) + "\n")


def write_pulse(path, x) -> None:
    x = as_pulse(x)
    lines = [f"# pulse N={x.shape[0]}"]
    lines += [f"{_fmt(v.real)},{_fmt(v.imag)}" for v in x]
    Path(path).write_text("\n".join(lines) + "\n")


def _read_lines(path) -> list[str]:
    text = Path(path).read_text()
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("file is empty", line=1, path=path)
    return lines


def _parse_floats(line: str, lineno: int, path, count: int) -> list[float]:
    fields = line.split(",")
    if len(fields) != count:
        raise ParseError(f"expected {count} values, found {len(fields)}", line=lineno, path=path)
    try:
        vals = [float(f) for f in fields]
    except ValueError as exc:
        raise ParseError(f"not a number: {exc}", line=lineno, path=path) from None
    if not all(np.isfinite(vals)):
        raise ParseError("non-finite value", line=lineno, path=path)
    return vals


def read_trace(path) -> FrogTrace:
    """Load a trace; negative entries are clipped to zero."""
    lines = _read_lines(path)
    m = _TRACE_HEADER.match(lines[0].strip())
    if not m:
        raise ParseError("expected header '# frog-trace N=<N> L=<L> R=<R>'", line=1, path=path)
    N, L, R = (int(g) for g in m.groups())
    if not 1 <= L < N or R != num_delays(N, L):
        raise ParseError(f"inconsistent header: N={N} L={L} R={R}", line=1, path=path)
    body = lines[1:]
    rows = [_parse_floats(line, i + 2, path, N) for i, line in enumerate(body[:R])]
    if len(body) != R:
        raise ParseError(f"expected {R} data rows, found {len(body)}", line=min(len(body), R) + 2, path=path)
    try:
        return FrogTrace.from_measurements(np.array(rows), L)
    except ParameterError as exc:
        raise ParseError(str(exc), line=1, path=path) from None


def read_pulse(path) -> np.ndarray:
    lines = _read_lines(path)
    m = _PULSE_HEADER.match(lines[0].strip())
    if not m:
        raise ParseError("expected header '# pulse N=<N>'", line=1, path=path)
    N = int(m.group(1))
    body = lines[1:]
    vals = [_parse_floats(line, i + 2, path, 2) for i, line in enumerate(body[:N])]
    if len(body) != N:
        raise ParseError(f"expected {N} data rows, found {len(body)}", line=min(len(body), N) + 2, path=path)
    arr = np.array([complex(a, b) for a, b in vals])
    try:
        return as_pulse(arr)
    except ParameterError as exc:
        raise ParseError(str(exc), line=1, path=path) from None
