import os
import subprocess
import sys

import pytest

from frogsg import _backend

SNIPPET = "from frogsg._backend import backend_name; print(backend_name())"


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("FROGSG_DISABLE_NUMBA", None)
    if flag is not None:
        env["FROGSG_DISABLE_NUMBA"] = flag
    proc = subprocess.run([sys.executable, "-c", SNIPPET], capture_output=True, text=True, env=env, check=True)
    return proc.stdout.strip()


def test_flag_selects_numpy():
    assert _backend_in_subprocess("1") == "numpy"


@pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")
def test_default_is_numba():
    assert _backend_in_subprocess(None) == "numba"
    assert _backend_in_subprocess("0") == "numba"
