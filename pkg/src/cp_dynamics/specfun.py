"""Sine/cosine integrals, the auxiliary functions f and g, and the window F.

The auxiliary functions are

    f(x) = Ci(x) sin(x) + (pi/2 - Si(x)) cos(x) = int_0^inf sin(t) / (t + x) dt
    g(x) = -Ci(x) cos(x) + (pi/2 - Si(x)) sin(x) = int_0^inf cos(t) / (t + x) dt

For ``x <= 4`` everything comes from the Maclaurin series of Si and Ci; above
that ``g - i f = exp(ix) E1(ix)`` is evaluated as a continued fraction, which
gives f and g without the cancellation of ``pi/2 - Si``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import _backend
from ._purepy import EULER_GAMMA, SERIES_LIMIT
from .params import DomainError

__all__ = [
    "EULER_GAMMA",
    "SERIES_LIMIT",
    "AuxValue",
    "WindowValue",
    "sine_integral",
    "cosine_integral",
    "aux_f",
    "aux_g",
    "aux_fg",
    "aux_fg_derivatives",
    "window_F",
]


@dataclass(frozen=True)
class AuxValue:
    value: float
    abs_err_estimate: float


@dataclass(frozen=True)
class WindowValue:
    re: float
    im: float

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)


def _check_positive(x: float) -> None:
    if not (x > 0) or math.isnan(x):
        raise DomainError(f"argument must be > 0, got {x!r}")


def sine_integral(x: float) -> float:
    """Si(x); odd, with Si(+inf) = pi/2."""
    if math.isnan(x):
        return math.nan
    if x == 0:
        return 0.0
    if math.isinf(x):
        return math.copysign(0.5 * math.pi, x)
    si = _backend.si_ci(abs(x))[0]
    return si if x > 0 else -si


def cosine_integral(x: float) -> float:
    """Ci(x) = gamma + ln x + int_0^x (cos u - 1)/u du, for x > 0."""
    _check_positive(x)
    if math.isinf(x):
        return 0.0
    return _backend.si_ci(x)[1]


def aux_fg(x: float) -> tuple[float, float, float]:
    """Return ``(f(x), g(x), abs_err)``; the cheap entry point used by kernels."""
    _check_positive(x)
    if math.isinf(x):
        return 0.0, 0.0, 0.0
    return _backend.aux_fg(x)


def aux_f(x: float) -> AuxValue:
    f, _, err = aux_fg(x)
    return AuxValue(f, err)


def aux_g(x: float) -> AuxValue:
    _, g, err = aux_fg(x)
    return AuxValue(g, err)


def aux_fg_derivatives(x: float) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    """Values and first two derivatives of f and g.

    Uses f' = -g, g' = f - 1/x, hence f'' = 1/x - f and g'' = 1/x**2 - g.
    Returns ``((f, f', f''), (g, g', g''))``.
    """
    f, g, _ = aux_fg(x)
    inv = 1.0 / x
    return (f, -g, inv - f), (g, f - inv, inv * inv - g)


def window_F(omega: float, t: float) -> WindowValue:
    """F(omega, t) = (exp(i omega t) - 1) / (i omega), continuous at omega = 0."""
    if not (t >= 0) or math.isinf(t):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")
    wt = omega * t
    if abs(wt) < 1e-6:
        # t (1 + i wt/2 - (wt)^2/6)
        return WindowValue(t * (1.0 - wt * wt / 6.0), t * 0.5 * wt)
    val = (cmath.exp(1j * wt) - 1.0) / (1j * omega)
    return WindowValue(val.real, val.imag)
