import numpy as np
import pytest

from frogsg.errors import ParseError
from frogsg.io import read_pulse, read_trace, write_pulse, write_trace
from frogsg.model import synthesize_trace
from frogsg.signals import PulseSpec, generate_pulse


@pytest.mark.parametrize("N,L", [(16, 1), (17, 3), (32, 4)])
def test_trace_roundtrip_is_exact(tmp_path, N, L):
    Z = synthesize_trace(generate_pulse(PulseSpec(N, seed=N)), L)
    write_trace(tmp_path / "t.csv", Z)
    back = read_trace(tmp_path / "t.csv")
    assert (back.N, back.L, back.R) == (Z.N, Z.L, Z.R)
    assert np.array_equal(back.values, Z.values)


def test_pulse_roundtrip_is_exact(tmp_path):
    x = generate_pulse(PulseSpec(20, seed=1))
    write_pulse(tmp_path / "p.csv", x)
    assert np.array_equal(read_pulse(tmp_path / "p.csv"), x)


def test_header_format(tmp_path):
    write_trace(tmp_path / "t.csv", synthesize_trace(np.ones(8), 2))
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "# frog-trace N=8 L=2 R=4"
    write_pulse(tmp_path / "p.csv", np.ones(5))
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "# pulse N=5"


def test_negative_entries_are_clipped(tmp_path):
    (tmp_path / "t.csv").write_text("# frog-trace N=4 L=2 R=2\n1,2,-0.5,3\n0,1,1,1\n")
    Z = read_trace(tmp_path / "t.csv")
    assert Z.values[0, 2] == 0.0 and Z.values[0, 3] == 3.0


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("1,2,3,4\n", 1),
    ("# frog-trace N=4 L=2 R=3\n1,1,1,1\n1,1,1,1\n", 1),
    ("# frog-trace N=4 L=2 R=2\n1,1,1,1\n1,x,1,1\n", 3),
    ("# frog-trace N=4 L=2 R=2\n1,1,1\n1,1,1,1\n", 2),
    ("# frog-trace N=4 L=2 R=2\n1,1,1,1\n", 3),
    ("# frog-trace N=4 L=2 R=2\n1,1,1,1\n1,1,1,1\n1,1,1,1\n", 4),
    ("# frog-trace N=4 L=2 R=2\n1,1,1,1\n1,nan,1,1\n", 3),
])
def test_trace_parse_errors_report_line(tmp_path, text, line):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as exc:
        read_trace(path)
    assert exc.value.line == line
    assert str(path) in str(exc.value)


@pytest.mark.parametrize("text,line", [
    ("# pulse N=4\n1,0\n1,0\n1,0\n", 5),
    ("# pulse N=2\n1,0\n1,0\n", 1),
    ("# pulse N=4\n1,0\n1\n1,0\n1,0\n", 3),
])
def test_pulse_parse_errors(tmp_path, text, line):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as exc:
        read_pulse(path)
    assert exc.value.line == line
