import os
import subprocess
import sys

import numpy as np
import pytest

from cp_dynamics import _backend, _purepy

_core = pytest.importorskip("cp_dynamics._core")


@pytest.mark.parametrize("x", np.geomspace(1e-4, 1e4, 41))
def test_aux_fg_backends_agree(x):
    (fa, ga, ea), (fb, gb, eb) = _purepy.aux_fg(float(x)), _core.aux_fg(float(x))
    # differing summation order: agreement within the reported error bounds
    assert abs(fa - fb) <= ea + eb + 4e-16 * abs(fa)
    assert abs(ga - gb) <= ea + eb + 4e-16 * abs(ga)


@pytest.mark.parametrize("x", [1e-3, 0.5, 3.9, 4.1, 30.0])
def test_si_ci_backends_agree(x):
    (sa, ca, ea), (sb, cb, eb) = _purepy.si_ci(x), _core.si_ci(x)
    assert abs(sa - sb) <= ea + eb + 4e-16 * abs(sa)
    assert abs(ca - cb) <= ea + eb + 4e-16 * abs(ca)


@pytest.mark.parametrize("trapezoid", [True, False])
def test_cavity_block_backends_agree(trapezoid):
    args = (0, 9, 24, 4.0, 1.0, 0.3, 1.0, 0.8, trapezoid)
    a, b = _purepy.cavity_block(*args), _core.cavity_block(*args)
    assert np.allclose(a, b, rtol=1e-13, atol=0)


def test_compiled_core_selected_by_default():
    assert _backend.NAME == "cython"


def test_environment_forces_fallback():
    env = dict(os.environ, CP_DYNAMICS_PUREPY="1")
    out = subprocess.run(
        [sys.executable, "-c", "import cp_dynamics; print(cp_dynamics.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "purepy"
