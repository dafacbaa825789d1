"""Time-dependent atom-wall energies, forces and their qualitative analysis.

With ``eps0(L) = mu**2 / (12 pi L**3)`` and ``Dm`` the operator of
:mod:`cp_dynamics.dm` acting on kernel families ``a = 2 m L``:

* bare:      E = -eps0(d) Dm[S(2md, k0) - C(2md, k0, k0, ct)]
* dressed1:  E = bare - eps0(d) Dm C(2md, k0', k0, ct)
* dressed2:  E = bare - eps0(zbar) Dm C(2m zbar, k0', k0, ct)
                      - eps0(|z|) Dm C(2m |z|, k0', k0, ct)

where ``zbar = (d + d')/2`` and ``z = (d - d')/2``. The cosine shift of every
dynamic kernel is the new wavenumber k0 while the denominator shift is k0 or
k0'; ``bare_phase=False`` switches the k0'-terms to cosine shift k0'
for comparison studies only.

The d-independent ``z = 0`` contribution of dressed2 is defined as zero so
that d = d' reproduces dressed1 exactly. Its ``|z| -> 0`` limit is not zero
(the m**3 term survives D^m), so ``0 < |z| < 1e-3 d`` is computed but marked
low-confidence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dm import dm_static_xform
from .kernels import (
    LIGHT_CONE_WIDTH,
    NonConvergenceError,
    dynamic_kernel_derivatives,
    in_light_cone,
    regulated_integral,
    static_kernel_derivatives,
)
from .params import DomainError, PhysicalParams, derived_geometry, energy_unit

__all__ = [
    "ScenarioKind",
    "EnergySample",
    "ForceSample",
    "ForceSign",
    "AsymptoteReport",
    "StepCollisionError",
    "SMALL_Z",
    "FORCE_STEP",
    "energy",
    "bare_energy",
    "dressed1_energy",
    "dressed2_energy",
    "static_energy",
    "echo_times",
    "force",
    "sign_changes",
    "asymptote_check",
    "energy_quadrature",
]

SMALL_Z = 1e-3
FORCE_STEP = 1e-4


class ScenarioKind(str, enum.Enum):
    BARE = "bare"
    DRESSED_FREQUENCY_QUENCH = "dressed1"
    DRESSED_POSITION_FREQUENCY_QUENCH = "dressed2"

    @classmethod
    def parse(cls, value: "ScenarioKind | str") -> "ScenarioKind":
        if isinstance(value, cls):
            return value
        aliases = {
            "bare": cls.BARE,
            "dressed1": cls.DRESSED_FREQUENCY_QUENCH,
            "dressedfrequencyquench": cls.DRESSED_FREQUENCY_QUENCH,
            "dressed2": cls.DRESSED_POSITION_FREQUENCY_QUENCH,
            "dressedpositionfrequencyquench": cls.DRESSED_POSITION_FREQUENCY_QUENCH,
        }
        key = str(value).replace("_", "").replace("-", "").lower()
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown scenario {value!r}") from None


class ForceSign(str, enum.Enum):
    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"
    INDETERMINATE = "indeterminate"


class StepCollisionError(ArithmeticError):
    """The force stencil d +/- h reaches into a light-cone window."""


@dataclass(frozen=True)
class EnergySample:
    t: float
    energy: float
    diverged: bool
    terms: tuple[float, ...]
    term_diverged: tuple[bool, ...] = ()
    low_confidence: bool = False
    err_estimate: float = 0.0


@dataclass(frozen=True)
class ForceSample:
    t: float
    force: float
    sign: ForceSign
    diverged: bool = False


@dataclass(frozen=True)
class AsymptoteReport:
    kind: ScenarioKind
    horizon: float
    static_energy: float
    sup_deviation: float
    tolerance: float
    converged: bool
    pre_light_cone: bool
    bare_vs_dressed1: float | None = None
    note: str = ""
    tail_times: tuple[float, ...] = field(default=(), repr=False)


def _check_time(t: float) -> None:
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")


def _dm_static(a0: float, beta: float) -> float:
    v, d1, d2, _ = static_kernel_derivatives(a0, beta)
    return 2 * v - 2 * a0 * d1 + a0 * a0 * d2


def _dm_dynamic(a0: float, beta: float, q: float, tau: float) -> float:
    v, d1, d2, _ = dynamic_kernel_derivatives(a0, beta, q, tau)
    return 2 * v - 2 * a0 * d1 + a0 * a0 * d2


def _bare_term(params: PhysicalParams, tau: float) -> tuple[float, bool]:
    a0 = 2 * params.d
    if in_light_cone(a0, tau):
        return math.nan, True
    eps0 = energy_unit(params.mu, params.d)
    k0 = params.k0
    if tau == 0:
        return 0.0, False
    return -eps0 * (_dm_static(a0, k0) - _dm_dynamic(a0, k0, k0, tau)), False


def _dressed_term(
    mu: float, length: float, beta: float, q: float, tau: float
) -> tuple[float, bool]:
    a0 = 2 * length
    if in_light_cone(a0, tau):
        return math.nan, True
    return -energy_unit(mu, length) * _dm_dynamic(a0, beta, q, tau), False


def _sample(t: float, parts: Sequence[tuple[float, bool]], low_conf: bool = False) -> EnergySample:
    values = tuple(p[0] for p in parts)
    flags = tuple(p[1] for p in parts)
    diverged = any(flags)
    total = math.nan if diverged else math.fsum(values)
    return EnergySample(t, total, diverged, values, flags, low_conf)


def bare_energy(params: PhysicalParams, t: float, c: float = 1.0) -> EnergySample:
    _check_time(t)
    return _sample(t, [_bare_term(params, c * t)])


def dressed1_energy(
    params: PhysicalParams, t: float, c: float = 1.0, bare_phase: bool = True
) -> EnergySample:
    _check_time(t)
    tau = c * t
    q = params.k0 if bare_phase else params.k0_prime
    return _sample(
        t,
        [
            _bare_term(params, tau),
            _dressed_term(params.mu, params.d, params.k0_prime, q, tau),
        ],
    )


def dressed2_energy(
    params: PhysicalParams, t: float, c: float = 1.0, bare_phase: bool = True
) -> EnergySample:
    _check_time(t)
    tau = c * t
    geo = derived_geometry(params)
    q = params.k0 if bare_phase else params.k0_prime
    parts = [
        _bare_term(params, tau),
        _dressed_term(params.mu, geo.zbar, params.k0_prime, q, tau),
    ]
    az = abs(geo.z)
    if az == 0:
        parts.append((0.0, False))
    else:
        parts.append(_dressed_term(params.mu, az, params.k0_prime, q, tau))
    low_conf = 0 < az < SMALL_Z * params.d
    return _sample(t, parts, low_conf)


_ENERGY = {
    ScenarioKind.BARE: bare_energy,
    ScenarioKind.DRESSED_FREQUENCY_QUENCH: dressed1_energy,
    ScenarioKind.DRESSED_POSITION_FREQUENCY_QUENCH: dressed2_energy,
}


def energy(kind: ScenarioKind | str, params: PhysicalParams, t: float, c: float = 1.0) -> EnergySample:
    return _ENERGY[ScenarioKind.parse(kind)](params, t, c)


def static_energy(params: PhysicalParams) -> float:
    """Stationary potential at the new frequency and distance."""
    return -energy_unit(params.mu, params.d) * dm_static_xform(2 * params.k0 * params.d)


def echo_times(kind: ScenarioKind | str, params: PhysicalParams, c: float = 1.0) -> list[float]:
    """Times at which a term of ``kind`` diverges: 2d/c, and 2 zbar/c, 2|z|/c for dressed2."""
    kind = ScenarioKind.parse(kind)
    times = [2 * params.d / c]
    if kind is ScenarioKind.DRESSED_POSITION_FREQUENCY_QUENCH:
        geo = derived_geometry(params)
        times.append(2 * geo.zbar / c)
        if geo.z != 0:
            times.append(2 * abs(geo.z) / c)
    return sorted(set(times))


# -- force --------------------------------------------------------------------


def _classify(force_value: float, zero_tol: float = 0.0) -> ForceSign:
    if not math.isfinite(force_value) or abs(force_value) <= zero_tol:
        return ForceSign.INDETERMINATE
    return ForceSign.ATTRACTIVE if force_value < 0 else ForceSign.REPULSIVE


def force(
    kind: ScenarioKind | str,
    params: PhysicalParams,
    t: float,
    c: float = 1.0,
    *,
    rel_step: float = FORCE_STEP,
    zero_tol: float = 0.0,
) -> ForceSample:
    """``-dE/dd`` by central differences (h, h/2) with one Richardson step.

    ``d'`` stays fixed, so for dressed2 both ``zbar`` and ``z`` move with d.
    Raises :class:`StepCollisionError` if ``t`` is clear of every light-cone
    window but a stencil point is not.
    """
    kind = ScenarioKind.parse(kind)
    fn = _ENERGY[kind]
    center = fn(params, t, c)
    if center.diverged:
        return ForceSample(t, math.nan, ForceSign.INDETERMINATE, True)
    h = rel_step * params.d
    vals = {}
    for step in (h, -h, 0.5 * h, -0.5 * h):
        s = fn(params.replace(d=params.d + step), t, c)
        if s.diverged:
            raise StepCollisionError(
                f"force stencil at d{step:+.3e} enters a light-cone window at t={t!r}"
            )
        vals[step] = s.energy
    coarse = -(vals[h] - vals[-h]) / (2 * h)
    fine = -(vals[0.5 * h] - vals[-0.5 * h]) / h
    value = (4 * fine - coarse) / 3
    return ForceSample(t, value, _classify(value, zero_tol))


def _force_or_nan(kind, params, t, c) -> float:
    try:
        s = force(kind, params, t, c)
    except StepCollisionError:
        return math.nan
    return s.force


def sign_changes(
    kind: ScenarioKind | str,
    params: PhysicalParams,
    t_grid: Sequence[float],
    c: float = 1.0,
    *,
    rtol: float = 1e-8,
) -> list[float]:
    """Roots of the force bracketed by sign flips on ``t_grid``, bisected to ``rtol``.

    Grid intervals containing an echo time are never treated as brackets:
    the force changes sign there through the divergence, not through zero.
    """
    kind = ScenarioKind.parse(kind)
    ts = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_grid must be strictly increasing")
    if len(ts) < 2:
        return []
    echoes = echo_times(kind, params, c)
    fvals = [_force_or_nan(kind, params, t, c) for t in ts]
    roots = []
    for (ta, fa), (tb, fb) in zip(zip(ts, fvals), zip(ts[1:], fvals[1:])):
        if not (math.isfinite(fa) and math.isfinite(fb)) or fa == 0 or fb == 0:
            if fa == 0 and math.isfinite(fb) and ta > 0:
                roots.append(ta)
            continue
        if (fa < 0) == (fb < 0):
            continue
        if any(ta <= e * (1 + LIGHT_CONE_WIDTH) and tb >= e * (1 - LIGHT_CONE_WIDTH) for e in echoes):
            continue
        lo, hi, flo = ta, tb, fa
        while hi - lo > rtol * hi:
            mid = 0.5 * (lo + hi)
            fm = _force_or_nan(kind, params, mid, c)
            if not math.isfinite(fm):
                break
            if fm == 0:
                lo = hi = mid
                break
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return roots


# -- asymptotics --------------------------------------------------------------


def asymptote_check(
    kind: ScenarioKind | str,
    params: PhysicalParams,
    horizon: float,
    c: float = 1.0,
    *,
    rtol: float = 0.01,
    tail_fraction: float = 0.1,
    n_tail: int = 21,
) -> AsymptoteReport:
    """Sup of ``|E(t) - E_static|`` over ``[(1 - tail_fraction) horizon, horizon]``.

    The tolerance is ``rtol * |E_static|``. For bare and dressed1 the report
    also carries ``|E_bare(horizon) - E_dressed1(horizon)|``.
    """
    kind = ScenarioKind.parse(kind)
    fn = _ENERGY[kind]
    e_static = static_energy(params)
    tol = rtol * abs(e_static)
    last_echo = max(echo_times(kind, params, c))
    if horizon <= last_echo:
        return AsymptoteReport(
            kind, horizon, e_static, math.inf, tol, False, True,
            note="pre-light-cone, not asymptotic",
        )
    start = max((1 - tail_fraction) * horizon, last_echo * (1 + 10 * LIGHT_CONE_WIDTH))
    tail = np.linspace(start, horizon, n_tail)
    devs = []
    for t in tail:
        s = fn(params, float(t), c)
        if not s.diverged:
            devs.append(abs(s.energy - e_static))
    sup = max(devs) if devs else math.inf
    cross = None
    if kind in (ScenarioKind.BARE, ScenarioKind.DRESSED_FREQUENCY_QUENCH):
        cross = abs(bare_energy(params, horizon, c).energy - dressed1_energy(params, horizon, c).energy)
    return AsymptoteReport(
        kind, horizon, e_static, sup, tol, sup <= tol, False, cross,
        tail_times=tuple(float(t) for t in tail),
    )


# -- end-to-end oracle -----------------------------------------------------------


def _dm_sin(a: float, k: np.ndarray) -> np.ndarray:
    """D^m applied to sin(m a k) at m = 1, differentiated under the integral."""
    ak = a * k
    s, co = np.sin(ak), np.cos(ak)
    return 2 * s - 2 * ak * co - ak * ak * s


def _oracle_term(
    a: float, beta: float, q: float, tau: float, prefactor: float, with_static: bool
) -> tuple[float, float]:
    if with_static:

        def integrand(k: np.ndarray) -> np.ndarray:
            return _dm_sin(a, k) * (1.0 - np.cos((k + q) * tau)) / (k + beta)

        freqs = [a, a + tau, abs(a - tau)] if tau > 0 else [a]
    else:

        def integrand(k: np.ndarray) -> np.ndarray:
            return _dm_sin(a, k) * np.cos((k + q) * tau) / (k + beta)

        freqs = [a + tau, abs(a - tau)] if tau > 0 else [a]
    freqs = [w for w in freqs if w > 0]
    res = regulated_integral(
        integrand,
        min(freqs),
        max(freqs),
        growth=1.0,
        amplitude=2.0 * (1.0 + a) ** 2,
        k_scale=1.0 / beta,
    )
    return prefactor * res.value, abs(prefactor) * res.err_estimate


def energy_quadrature(
    kind: ScenarioKind | str,
    params: PhysicalParams,
    t: float,
    c: float = 1.0,
    *,
    rtol: float = 1e-6,
) -> EnergySample:
    """Independent evaluation by regulated quadrature of the full integrands.

    D^m is applied to ``sin(2 m k L)`` inside the integral, so neither the
    Si/Ci closed forms nor the product-to-sum split are used.
    """
    kind = ScenarioKind.parse(kind)
    _check_time(t)
    tau = c * t
    mu, d, k0, k0p = params.mu, params.d, params.k0, params.k0_prime
    specs = [(2 * d, k0, k0, -energy_unit(mu, d), True)]
    if kind is ScenarioKind.DRESSED_FREQUENCY_QUENCH:
        specs.append((2 * d, k0p, k0, -energy_unit(mu, d), False))
    elif kind is ScenarioKind.DRESSED_POSITION_FREQUENCY_QUENCH:
        geo = derived_geometry(params)
        specs.append((2 * geo.zbar, k0p, k0, -energy_unit(mu, geo.zbar), False))
        if geo.z != 0:
            az = abs(geo.z)
            specs.append((2 * az, k0p, k0, -energy_unit(mu, az), False))
    parts = []
    flags = []
    err = 0.0
    for a, beta, q, pref, with_static in specs:
        if in_light_cone(a, tau):
            parts.append(math.nan)
            flags.append(True)
            continue
        if with_static and tau == 0:
            parts.append(0.0)
            flags.append(False)
            continue
        val, e = _oracle_term(a, beta, q, tau, pref, with_static)
        if e > max(rtol * abs(val), 1e-14 * abs(pref)):
            raise NonConvergenceError(f"oracle term a={a!r} did not converge (err {e:.2e})")
        parts.append(val)
        flags.append(False)
        err += e
    if kind is ScenarioKind.DRESSED_POSITION_FREQUENCY_QUENCH and len(parts) == 2:
        parts.append(0.0)
        flags.append(False)
    diverged = any(flags)
    total = math.nan if diverged else math.fsum(parts)
    return EnergySample(t, total, diverged, tuple(parts), tuple(flags), False, err)
