"""Oscillatory kernel integrals and their regulated-quadrature oracle.

Static kernel::

    S(a, beta) = int_0^inf sin(a k) / (k + beta) dk = f(a beta)

Dynamic kernel::

    C(a, beta, q, tau) = int_0^inf sin(a k) cos((k + q) tau) / (k + beta) dk
                       = [T(a + tau, q tau, beta) + T(a - tau, -q tau, beta)] / 2

with ``T(alpha, phi, beta) = int_0^inf sin(alpha k + phi) / (k + beta) dk``.
For alpha > 0, ``T = f(alpha beta) cos(phi) + g(alpha beta) sin(phi)``, which
is the same thing as ``cos(phi - alpha beta) [pi/2 - Si] - sin(phi - alpha beta) Ci``
at ``alpha beta``; alpha < 0 follows from ``T(alpha, phi) = -T(-alpha, -phi)``.
At alpha = 0 (``tau = a``, the atom-mirror round trip) T diverges
logarithmically unless sin(phi) = 0; results there are flagged, not computed.

The oracle integrates the untouched integrand with an ``exp(-eps k)`` damping
factor for a decreasing sequence of eps and extrapolates eps -> 0 by Neville
polynomial extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .params import DomainError
from .specfun import aux_fg

__all__ = [
    "LIGHT_CONE_WIDTH",
    "DEFAULT_EPS_RATIOS",
    "KernelQuery",
    "KernelResult",
    "NonConvergenceError",
    "light_cone_distance",
    "in_light_cone",
    "static_kernel",
    "dynamic_kernel",
    "t_kernel_derivatives",
    "static_kernel_derivatives",
    "dynamic_kernel_derivatives",
    "regulated_integral",
    "regulated_quadrature",
    "damped_integral",
    "neville_zero",
]

LIGHT_CONE_WIDTH = 1e-3
"""Relative exclusion half-width: ``|a - tau| < LIGHT_CONE_WIDTH * a`` is flagged."""

DEFAULT_EPS_RATIOS = (0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125)
"""Regulator sequence in units of the smallest conjugate frequency."""


class NonConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class KernelQuery:
    a: float
    beta: float
    q: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("a", "beta", "q"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise DomainError(f"tau must be finite and >= 0, got {self.tau!r}")


@dataclass(frozen=True)
class KernelResult:
    value: float
    err_estimate: float
    light_cone_distance: float
    diverged: bool


def light_cone_distance(a: float, tau: float) -> float:
    return abs(a - tau)


def in_light_cone(a: float, tau: float, width: float = LIGHT_CONE_WIDTH) -> bool:
    return tau > 0 and abs(a - tau) < width * a


def _positive(**kw: float) -> None:
    for name, v in kw.items():
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be finite and > 0, got {v!r}")


# -- closed forms -------------------------------------------------------------


def t_kernel_derivatives(alpha: float, phi: float, beta: float) -> tuple[float, float, float, float]:
    """``(T, dT/dalpha, d2T/dalpha2, abs_err)``; alpha must be nonzero."""
    if alpha == 0:
        raise DomainError("T(alpha=0) is logarithmically divergent")
    sigma = 1.0 if alpha > 0 else -1.0
    x = abs(alpha) * beta
    f, g, err = aux_fg(x)
    inv = 1.0 / x
    f1, g1 = -g, f - inv
    f2, g2 = inv - f, inv * inv - g
    c, s = math.cos(phi), math.sin(phi)
    value = sigma * f * c + g * s
    d1 = beta * (f1 * c + sigma * g1 * s)
    d2 = beta * beta * (sigma * f2 * c + g2 * s)
    return value, d1, d2, err * (abs(c) + abs(s))


def static_kernel_derivatives(a: float, beta: float) -> tuple[float, float, float, float]:
    """``(S, dS/da, d2S/da2, abs_err)`` from f' = -g, f'' = 1/x - f."""
    x = a * beta
    f, g, err = aux_fg(x)
    return f, -beta * g, beta * beta * (1.0 / x - f), err


def dynamic_kernel_derivatives(
    a: float, beta: float, q: float, tau: float
) -> tuple[float, float, float, float]:
    """``(C, dC/da, d2C/da2, abs_err)``; ``tau = 0`` takes the static path."""
    if tau == 0:
        return static_kernel_derivatives(a, beta)
    phi = q * tau
    p = t_kernel_derivatives(a + tau, phi, beta)
    m = t_kernel_derivatives(a - tau, -phi, beta)
    return (
        0.5 * (p[0] + m[0]),
        0.5 * (p[1] + m[1]),
        0.5 * (p[2] + m[2]),
        0.5 * (p[3] + m[3]),
    )


def static_kernel(a: float, beta: float) -> KernelResult:
    _positive(a=a, beta=beta)
    value, _, _, err = static_kernel_derivatives(a, beta)
    return KernelResult(value, err, a, False)


def dynamic_kernel(query: KernelQuery, width: float = LIGHT_CONE_WIDTH) -> KernelResult:
    a, beta, q, tau = query.a, query.beta, query.q, query.tau
    dist = light_cone_distance(a, tau)
    if in_light_cone(a, tau, width):
        return KernelResult(math.nan, math.inf, dist, True)
    value, _, _, err = dynamic_kernel_derivatives(a, beta, q, tau)
    return KernelResult(value, err, dist, False)


# -- regulated quadrature oracle ----------------------------------------------

_GL_HI = np.polynomial.legendre.leggauss(20)
_GL_LO = np.polynomial.legendre.leggauss(10)


_ULP = 2.220446049250313e-16
_MAX_PANELS = 2_000_000  # per adaptive pass
_MAX_START_PANELS = 20_000_000  # before refinement; bounds runtime, memory is chunked
_CHUNK = 100_000
_ACCEPT = 1e-7


def _integrate_panels(
    func: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    abs_tol: float,
    max_depth: int = 40,
) -> tuple[float, float]:
    """Adaptive Gauss-Legendre over the given panels.

    A panel is accepted once the 10-point rule is within ``_ACCEPT`` of the
    20-point rule relative to the panel's absolute integral (the 20-point
    error is then roughly the square of that), or within its width share of
    ``abs_tol``; otherwise it is bisected. Accepted panels are summed
    pairwise in left-to-right order so the result does not depend on the
    refinement history.
    """
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    span = float(edges[-1] - edges[0])
    done_lo: list[np.ndarray] = []
    done_val: list[np.ndarray] = []
    err_total = 0.0
    nodes_hi, w_hi = _GL_HI
    nodes_lo, w_lo = _GL_LO
    for depth in range(max_depth + 1):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals = func(mid[:, None] + half[:, None] * nodes_hi[None, :])
        hi_val = half * (vals @ w_hi)
        absint = half * (np.abs(vals) @ w_hi)
        lo_val = half * (func(mid[:, None] + half[:, None] * nodes_lo[None, :]) @ w_lo)
        diff = np.abs(hi_val - lo_val)
        ok = (diff <= _ACCEPT * absint) | (diff <= abs_tol * (hi - lo) / span)
        if depth == max_depth:
            ok[:] = True
        done_lo.append(lo[ok])
        done_val.append(hi_val[ok])
        err_total += float(np.sum(np.minimum(diff[ok], diff[ok] ** 2 / np.maximum(absint[ok], 1e-300))))
        if ok.all():
            break
        if 2 * np.count_nonzero(~ok) > _MAX_PANELS:
            raise NonConvergenceError("adaptive quadrature exceeded the panel budget")
        split = 0.5 * (lo[~ok] + hi[~ok])
        lo, hi = np.concatenate([lo[~ok], split]), np.concatenate([split, hi[~ok]])
    all_lo = np.concatenate(done_lo)
    all_val = np.concatenate(done_val)
    order = np.argsort(all_lo, kind="stable")
    return float(np.sum(all_val[order])), err_total


def _tail_cutoff(eps: float, tol: float, growth: float, amplitude: float) -> float:
    """Smallest K with ``amplitude * K**growth * exp(-eps K) / eps < tol`` (fixed point)."""
    k = math.log(max(amplitude / (eps * tol), 2.0)) / eps
    for _ in range(50):
        k_new = (math.log(max(amplitude / (eps * tol), 2.0)) + growth * math.log(max(k, 1.0))) / eps
        if abs(k_new - k) <= 1e-6 * k:
            break
        k = k_new
    return k_new


def damped_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    eps: float,
    omega_max: float,
    *,
    tol: float = 1e-13,
    growth: float = 0.0,
    amplitude: float = 1.0,
    k_scale: float | None = None,
) -> float:
    """``int_0^K integrand(k) exp(-eps k) dk`` with the tail beyond K below ``tol``."""
    _positive(eps=eps, omega_max=omega_max)
    width = math.pi / omega_max
    if k_scale is not None:
        width = min(width, k_scale)
    kmax = _tail_cutoff(eps, tol, growth, amplitude)
    n_panels = max(int(math.ceil(kmax / width)), 4)
    if n_panels > _MAX_START_PANELS:
        # typically a regulator far below the slowest frequency, i.e. a point hugging the light cone
        raise NonConvergenceError(
            f"eps={eps:.3e} needs {n_panels} panels (budget {_MAX_START_PANELS}); "
            "the point is too close to a light-cone divergence for the oracle"
        )

    def damped(k: np.ndarray) -> np.ndarray:
        return integrand(k) * np.exp(-eps * k)

    # fixed chunks keep memory flat; each gets its width share of the tolerance
    parts = []
    for lo in range(0, n_panels, _CHUNK):
        hi = min(lo + _CHUNK, n_panels)
        edges = width * np.arange(lo, hi + 1, dtype=float)
        parts.append(_integrate_panels(damped, edges, tol * (hi - lo) / n_panels)[0])
    return math.fsum(parts)


def neville_zero(xs: Sequence[float], ys: Sequence[float]) -> list[float]:
    """Polynomial extrapolants to x = 0 of increasing order.

    Entry ``j`` uses the ``j + 1`` smallest-x points, so the last entry is
    the full-order extrapolant.
    """
    xs = list(xs)[::-1]
    ys = list(ys)[::-1]
    n = len(xs)
    table = list(ys)
    out = [table[0]]
    for j in range(1, n):
        for i in range(n - j):
            table[i] = (xs[i + j] * table[i] - xs[i] * table[i + 1]) / (xs[i + j] - xs[i])
        out.append(table[0])
    return out


@dataclass(frozen=True)
class RegulatedResult:
    value: float
    err_estimate: float
    regulated: tuple[float, ...]
    eps: tuple[float, ...]
    extrapolants: tuple[float, ...]


def regulated_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    omega_min: float,
    omega_max: float,
    *,
    eps_sequence: Sequence[float] | None = None,
    tol: float = 1e-13,
    growth: float = 0.0,
    amplitude: float = 1.0,
    k_scale: float | None = None,
) -> RegulatedResult:
    """Abel-regulated ``int_0^inf integrand(k) dk`` extrapolated to eps -> 0.

    ``omega_min``/``omega_max`` are the smallest and largest conjugate
    frequencies in ``integrand``; the former sets the default regulator scale
    (the regulated integral is analytic in eps within that radius), the
    latter sets the panel width (half a period). ``growth``/``amplitude``
    bound the integrand envelope as ``amplitude * k**growth``.
    """
    _positive(omega_min=omega_min, omega_max=omega_max)
    if eps_sequence is None:
        eps_sequence = [r * omega_min for r in DEFAULT_EPS_RATIOS]
    eps_sequence = [float(e) for e in eps_sequence]
    if len(eps_sequence) < 3:
        raise ValueError("eps_sequence needs at least 3 entries")
    if any(e <= 0 for e in eps_sequence) or any(
        b >= a for a, b in zip(eps_sequence, eps_sequence[1:])
    ):
        raise ValueError("eps_sequence must be positive and strictly decreasing")
    values = [
        damped_integral(
            integrand, eps, omega_max, tol=tol, growth=growth, amplitude=amplitude, k_scale=k_scale
        )
        for eps in eps_sequence
    ]
    ex = neville_zero(eps_sequence, values)
    err = abs(ex[-1] - ex[-2])
    return RegulatedResult(ex[-1], err, tuple(values), tuple(eps_sequence), tuple(ex))


def regulated_quadrature(
    a: float,
    beta: float,
    q: float,
    tau: float,
    include_time_part: bool = True,
    eps_sequence: Sequence[float] | None = None,
    *,
    rtol: float = 1e-8,
    width: float = LIGHT_CONE_WIDTH,
) -> KernelResult:
    """Oracle value of S (time part off) or C (time part on)."""
    _positive(a=a, beta=beta, q=q)
    if not (math.isfinite(tau) and tau >= 0):
        raise DomainError(f"tau must be finite and >= 0, got {tau!r}")
    timed = include_time_part and tau > 0
    if timed:
        freqs = [a + tau, abs(a - tau)]

        def integrand(k: np.ndarray) -> np.ndarray:
            return np.sin(a * k) * np.cos((k + q) * tau) / (k + beta)

    else:
        freqs = [a]

        def integrand(k: np.ndarray) -> np.ndarray:
            return np.sin(a * k) / (k + beta)

    dist = light_cone_distance(a, tau) if timed else a
    near = timed and in_light_cone(a, tau, width)
    nonzero = [w for w in freqs if w > width * a]
    omega_min = min(nonzero)
    res = regulated_integral(
        integrand, omega_min, max(freqs), eps_sequence=eps_sequence, amplitude=1.0 / beta
    )
    scale = max(abs(res.value), 1e-300)
    if near:
        return KernelResult(res.value, res.err_estimate, dist, True)
    if not res.err_estimate <= max(rtol * scale, 1e-14):
        raise NonConvergenceError(
            f"extrapolants disagree by {res.err_estimate:.3e} (value {res.value:.6e})"
        )
    return KernelResult(res.value, res.err_estimate, dist, False)
