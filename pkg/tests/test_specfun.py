import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cp_dynamics import _backend
from cp_dynamics.params import DomainError
from cp_dynamics.specfun import (
    EULER_GAMMA,
    aux_f,
    aux_fg,
    aux_fg_derivatives,
    aux_g,
    cosine_integral,
    sine_integral,
    window_F,
)

mpmath.mp.dps = 30


def series_si(x):
    """Independent Maclaurin oracle: sum (-1)^n x^(2n+1) / ((2n+1)(2n+1)!)."""
    terms = [(-1) ** n * x ** (2 * n + 1) / ((2 * n + 1) * math.factorial(2 * n + 1)) for n in range(40)]
    return math.fsum(terms)


def series_ci(x):
    terms = [(-1) ** n * x ** (2 * n) / (2 * n * math.factorial(2 * n)) for n in range(1, 40)]
    return 0.57721566490153286061 + math.log(x) + math.fsum(terms)


def mp_fg(x):
    x = mpmath.mpf(x)
    si, ci = mpmath.si(x), mpmath.ci(x)
    f = ci * mpmath.sin(x) + (mpmath.pi / 2 - si) * mpmath.cos(x)
    g = -ci * mpmath.cos(x) + (mpmath.pi / 2 - si) * mpmath.sin(x)
    return float(f), float(g)


LOG_GRID = np.geomspace(1e-2, 1e3, 50)


def test_frozen_values():
    assert sine_integral(1.0) == pytest.approx(0.9460830704, abs=1e-10)
    assert cosine_integral(1.0) == pytest.approx(0.3374039229, abs=1e-10)


def test_against_series_oracle():
    assert abs(sine_integral(1.0) - series_si(1.0)) <= 1e-10
    assert abs(cosine_integral(1.0) - series_ci(1.0)) <= 1e-10


def test_gamma_digits():
    assert EULER_GAMMA == 0.57721566490153286061


@pytest.mark.parametrize("x", [1e-8, 1e-3, 0.5, 3.9, 4.0, 4.1, 10.0, 77.0, 1e3, 1e6])
def test_against_mpmath(x):
    si, ci = sine_integral(x), cosine_integral(x)
    assert si == pytest.approx(float(mpmath.si(x)), rel=1e-13, abs=1e-300)
    assert ci == pytest.approx(float(mpmath.ci(x)), rel=1e-12, abs=1e-14)
    f, g, _ = aux_fg(x)
    fr, gr = mp_fg(x)
    assert f == pytest.approx(fr, rel=1e-12)
    assert g == pytest.approx(gr, rel=1e-12)


def test_si_edges():
    assert sine_integral(0.0) == 0.0
    assert sine_integral(math.inf) == math.pi / 2
    assert sine_integral(-math.inf) == -math.pi / 2
    assert abs(sine_integral(50.0) - math.pi / 2) <= 0.021
    assert math.isnan(sine_integral(math.nan))


def test_ci_edges():
    assert abs(cosine_integral(50.0)) <= 1 / 50
    x = 1e-6
    assert cosine_integral(x) == pytest.approx(EULER_GAMMA + math.log(x), abs=1e-11)
    with pytest.raises(DomainError):
        cosine_integral(0.0)
    with pytest.raises(DomainError):
        cosine_integral(-1.0)


@given(st.floats(min_value=1e-10, max_value=1e8))
def test_si_odd(x):
    assert sine_integral(-x) == -sine_integral(x)


def test_aux_limits():
    assert aux_f(1e-8).value == pytest.approx(math.pi / 2, abs=1e-6)
    assert aux_f(2.0).value == pytest.approx(0.3990, abs=5e-5)
    assert aux_f(1e3).value * 1e3 == pytest.approx(1.0, rel=1e-2)
    assert aux_g(1e3).value > 0


def test_aux_error_estimate_bounds_truth():
    for x in [1e-3, 0.7, 3.99, 4.01, 25.0, 400.0]:
        v = aux_f(x)
        assert abs(v.value - mp_fg(x)[0]) <= v.abs_err_estimate + 1e-300
        assert v.abs_err_estimate < 1e-12


def test_branch_seam():
    s_si, s_ci, _ = _backend.si_ci_series(4.0)
    f, g, _ = _backend.fg_continued_fraction(4.0)
    # rebuild f, g from the series branch
    fs = s_ci * math.sin(4.0) + (math.pi / 2 - s_si) * math.cos(4.0)
    gs = -s_ci * math.cos(4.0) + (math.pi / 2 - s_si) * math.sin(4.0)
    assert abs(f - fs) <= 1e-12
    assert abs(g - gs) <= 1e-12


@pytest.mark.parametrize("x", LOG_GRID)
def test_derivative_identities(x):
    h = 1e-4 * x
    fp = (aux_fg(x + h)[0] - aux_fg(x - h)[0]) / (2 * h)
    gp = (aux_fg(x + h)[1] - aux_fg(x - h)[1]) / (2 * h)
    (f, _, _), (g, _, _) = aux_fg_derivatives(x)
    assert fp == pytest.approx(-g, rel=1e-6)
    assert gp == pytest.approx(f - 1 / x, rel=1e-6, abs=1e-6 * (1 / x))


@pytest.mark.parametrize("x", LOG_GRID)
def test_bounds(x):
    f, g, _ = aux_fg(x)
    assert 0 < f < math.pi / 2
    assert g > 0


def test_second_derivatives_match_fd():
    for x in [0.05, 1.3, 9.0, 120.0]:
        h = 1e-3 * x
        (f, f1, f2), (g, g1, g2) = aux_fg_derivatives(x)
        fd_f2 = (aux_fg(x + h)[0] - 2 * f + aux_fg(x - h)[0]) / h**2
        fd_g2 = (aux_fg(x + h)[1] - 2 * g + aux_fg(x - h)[1]) / h**2
        assert fd_f2 == pytest.approx(f2, rel=1e-4)
        assert fd_g2 == pytest.approx(g2, rel=1e-4)


def test_window_examples():
    assert complex(window_F(3.7, 0.0)) == 0
    assert complex(window_F(0.0, 5.0)) == 5
    w = window_F(math.pi, 1.0)
    assert w.re == pytest.approx(0.0, abs=1e-15)
    assert w.im == pytest.approx(2 / math.pi, rel=1e-15)


def test_window_continuous_at_zero():
    t = 2.0
    for om in [1e-9, 1e-7, 1e-6, 1.1e-6]:
        exact = (np.exp(1j * om * t) - 1) / (1j * om)
        assert abs(complex(window_F(om, t)) - exact) <= 1e-8 * t


@given(st.floats(min_value=-1e4, max_value=1e4), st.floats(min_value=0, max_value=1e3))
def test_window_bounded(omega, t):
    assert abs(window_F(omega, t)) <= t * (1 + 1e-12)


def test_window_rejects_negative_time():
    with pytest.raises(DomainError):
        window_F(1.0, -1.0)
