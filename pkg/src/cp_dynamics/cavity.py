"""Discrete cavity-mode oracle for the bare-state energy.

The atom sits at ``(0, 0, z)`` inside a perfectly conducting cube of side L
spanning ``-L/2 < x, y < L/2`` and ``0 < z < L``. Modes have wavevectors
``(l, m, n) * pi / L`` and two transverse polarizations each.

Contraction bookkeeping
-----------------------
The second-order Hamiltonian pairs one emission and one absorption vertex.
On ``|0, down>`` only the products ordered ``S_- S_+`` survive the spin
algebra, and the photonic factor reduces to ``<0| a_kj a_kj^+ |0> = 1`` per
mode (the ``a a`` and ``a^+ a^+`` pieces vanish). Three orderings remain, each
carrying one window factor ``F(w, t) = (exp(iwt) - 1) / (iw)``:

    coefficient   window
    -2i           F(-(w_k + w_0), t)
    +i            F(+(w_k - w_0), t)
    +i            F(-(w_k - w_0), t)

with common weight ``(1/2) (2 pi c / V) k (mu . f)**2``. The real part is
``-2 (1 - cos((w_k + w_0) t)) / (w_k + w_0)``, so the resonant ``w_k - w_0``
terms drop out and every mode contributes

    -(2 pi / V) k (mu . f)**2 (1 - cos((k + k0) c t)) / (k + k0).

The imaginary part, ``-2 sin(W+ t)/W+ + 2 sin(W- t)/W-``, does not cancel;
it belongs to the anti-Hermitian piece of the time-ordered operator and is
discarded. :func:`reference_mode_sum` reports it for inspection.

The wall contribution is the full sum minus the same sum with
``sin^2(k_z z), cos^2(k_z z)`` replaced by 1/2, which removes the
z-independent (free-space) piece.
"""

from __future__ import annotations

import enum
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from . import _backend
from .kernels import damped_integral, neville_zero
from .params import DomainError, PhysicalParams, energy_unit
from .scenarios import bare_energy
from .specfun import window_F

__all__ = [
    "CavityConfig",
    "Mode",
    "ContractionTerm",
    "TimeFactor",
    "CONTRACTIONS",
    "CavityResourceError",
    "CavityAccuracyWarning",
    "ZeroVectorError",
    "CavitySum",
    "StudyRow",
    "ConvergenceReport",
    "polarization_basis",
    "mode_function",
    "iter_modes",
    "contraction_weight",
    "bare_expectation_sum",
    "mode_sum",
    "reference_mode_sum",
    "regulated_bare_energy",
    "reference_ladder",
    "convergence_study",
    "default_threads",
    "DEFAULT_MODE_BUDGET",
    "BLOCK_SIZE",
]

DEFAULT_MODE_BUDGET = 200_000_000
BLOCK_SIZE = 8
_ROOT8 = math.sqrt(8.0)


class CavityResourceError(RuntimeError):
    pass


class CavityAccuracyWarning(RuntimeWarning):
    pass


class ZeroVectorError(DomainError):
    pass


def default_threads() -> int:
    raw = os.environ.get("CP_DYNAMICS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


@dataclass(frozen=True)
class CavityConfig:
    """Cubic cavity of side ``L`` truncated at ``n_max`` per axis.

    ``zero_index_rule`` controls modes with one vanishing index. With
    ``"trapezoid"`` they get weight 1/2, which is the correct normalisation
    of a mode whose surviving component has a ``cos(0)`` factor;
    ``"as-printed"`` keeps the uniform ``sqrt(8)`` for every mode.
    """

    L: float
    n_max: int
    epsilon: float
    atom_position: Optional[tuple[float, float, float]] = None
    zero_index_rule: str = "trapezoid"
    mode_budget: int = DEFAULT_MODE_BUDGET

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0):
            raise DomainError(f"L must be > 0, got {self.L!r}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise DomainError(f"epsilon must be > 0, got {self.epsilon!r}")
        if self.zero_index_rule not in ("trapezoid", "as-printed"):
            raise DomainError(f"unknown zero_index_rule {self.zero_index_rule!r}")
        if self.atom_position is not None:
            x, y, z = (float(v) for v in self.atom_position)
            if not (0 < z < self.L and abs(x) < 0.5 * self.L and abs(y) < 0.5 * self.L):
                raise DomainError("atom_position must lie strictly inside the cavity")

    @property
    def volume(self) -> float:
        return self.L**3

    @property
    def k_max(self) -> float:
        return math.pi * self.n_max / self.L

    @property
    def mode_count(self) -> int:
        return 2 * (self.n_max + 1) ** 3


@dataclass(frozen=True)
class Mode:
    indices: tuple[int, int, int]
    polarization: int
    k_vec: tuple[float, float, float]
    omega: float
    e_hat: tuple[float, float, float]


class TimeFactor(str, enum.Enum):
    SUM_NEGATIVE = "F(-(wk+w0))"
    DIFF_POSITIVE = "F(+(wk-w0))"
    DIFF_NEGATIVE = "F(-(wk-w0))"


@dataclass(frozen=True)
class ContractionTerm:
    coefficient: complex
    time_factor: TimeFactor


CONTRACTIONS: tuple[ContractionTerm, ...] = (
    ContractionTerm(-2j, TimeFactor.SUM_NEGATIVE),
    ContractionTerm(1j, TimeFactor.DIFF_POSITIVE),
    ContractionTerm(1j, TimeFactor.DIFF_NEGATIVE),
)


def contraction_weight(omega_k: float, omega_0: float, t: float) -> complex:
    """``sum_i c_i F(w_i, t)`` over :data:`CONTRACTIONS` (units of time)."""
    freq = {
        TimeFactor.SUM_NEGATIVE: -(omega_k + omega_0),
        TimeFactor.DIFF_POSITIVE: omega_k - omega_0,
        TimeFactor.DIFF_NEGATIVE: -(omega_k - omega_0),
    }
    return sum(
        (term.coefficient * complex(window_F(freq[term.time_factor], t)) for term in CONTRACTIONS),
        0j,
    )


def polarization_basis(k_vec: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal vectors transverse to ``k_vec``.

    First vector is ``khat x zhat`` normalised, or ``khat x xhat`` when k is
    along z; the second is ``khat x e1``.
    """
    k = np.asarray(k_vec, dtype=float)
    norm = float(np.linalg.norm(k))
    if not norm > 0:
        raise ZeroVectorError("polarization basis needs a nonzero wavevector")
    khat = k / norm
    e1 = np.cross(khat, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-12:
        e1 = np.cross(khat, [1.0, 0.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return e1, e2


def mode_function(mode: Mode, r: Sequence[float], config: CavityConfig) -> np.ndarray:
    """Vector mode function at ``r``; closed cavity including the walls."""
    x, y, z = (float(v) for v in r)
    half = 0.5 * config.L
    if not (0 <= z <= config.L and abs(x) <= half and abs(y) <= half):
        raise DomainError(f"point {tuple(r)!r} is outside the cavity")
    kx, ky, kz = mode.k_vec
    ex, ey, ez = mode.e_hat
    sx, cx = math.sin(kx * (x + half)), math.cos(kx * (x + half))
    sy, cy = math.sin(ky * (y + half)), math.cos(ky * (y + half))
    sz, cz = math.sin(kz * z), math.cos(kz * z)
    return _ROOT8 * np.array([ex * cx * sy * sz, ey * sx * cy * sz, ez * sx * sy * cz])


def iter_modes(config: CavityConfig, c: float = 1.0) -> Iterator[Mode]:
    """Every mode with ``0 <= l, m, n <= n_max`` except k = 0."""
    dk = math.pi / config.L
    for l in range(config.n_max + 1):
        for m in range(config.n_max + 1):
            for n in range(config.n_max + 1):
                if l == m == n == 0:
                    continue
                k_vec = (l * dk, m * dk, n * dk)
                knorm = math.sqrt(sum(v * v for v in k_vec))
                for j, e in enumerate(polarization_basis(k_vec), start=1):
                    yield Mode((l, m, n), j, k_vec, c * knorm, tuple(float(v) for v in e))


def _mode_weight(mode: Mode, config: CavityConfig) -> float:
    if config.zero_index_rule == "as-printed":
        return 1.0
    return 0.5 ** sum(1 for i in mode.indices if i == 0)


def _atom_z(config: CavityConfig, params: PhysicalParams) -> float:
    if config.atom_position is not None:
        x, y, z = config.atom_position
        if x != 0 or y != 0 or not math.isclose(z, params.d, rel_tol=1e-12):
            raise DomainError("the mode sum needs the atom at (0, 0, d)")
    if not params.d < config.L:
        raise DomainError("atom-wall distance must be smaller than L")
    return params.d


@dataclass(frozen=True)
class CavitySum:
    value: float
    total: float
    free: float
    tail_estimate: float
    n_modes: int
    imag_residual: float = 0.0


def _tail_bound(config: CavityConfig, params: PhysicalParams, tau: float) -> float:
    """Envelope of the wall contribution from modes beyond ``k_max``.

    Uses ``|D^m sin(b)| <= 2 + 2b + b**2`` with ``b = 2kd`` and
    ``|1 - cos| <= 2``; Gauss-Laguerre handles the exponential weight.
    """
    if tau == 0:
        return 0.0
    d, k0, eps = params.d, params.k0, config.epsilon
    kmax = config.k_max
    u, w = np.polynomial.laguerre.laggauss(40)
    k = kmax + u / eps
    b = 2 * k * d
    env = (2 + 2 * b + b * b) * 2 / (k + k0)
    return energy_unit(params.mu, d) * math.exp(-eps * kmax) / eps * float(np.dot(w, env))


def mode_sum(
    config: CavityConfig,
    params: PhysicalParams,
    t: float,
    c: float = 1.0,
    *,
    threads: Optional[int] = None,
    tail_rtol: float = 5e-3,
) -> CavitySum:
    """Wall part of the second-order bare-state shift as a discrete mode sum.

    The sum is split into fixed blocks of ``BLOCK_SIZE`` values of l; blocks
    run on a thread pool and partial sums are combined with ``math.fsum``, so
    the result does not depend on the thread count.
    """
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")
    if config.mode_count > config.mode_budget:
        raise CavityResourceError(
            f"{config.mode_count} modes exceed the budget of {config.mode_budget}"
        )
    z = _atom_z(config, params)
    tau = c * t
    n = config.n_max
    trapezoid = config.zero_index_rule == "trapezoid"
    blocks = [(lo, min(lo + BLOCK_SIZE, n + 1)) for lo in range(0, n + 1, BLOCK_SIZE)]

    def run(block: tuple[int, int]) -> tuple[float, float]:
        return _backend.cavity_block(
            block[0], block[1], n, config.L, z, config.epsilon, params.k0, tau, trapezoid
        )

    threads = default_threads() if threads is None else max(int(threads), 1)
    if threads == 1:
        parts = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    pref = -(2 * math.pi / config.volume) * params.mu**2 / 3
    total = pref * math.fsum(p[0] for p in parts)
    free = pref * math.fsum(p[1] for p in parts)
    value = total - free
    tail = _tail_bound(config, params, tau)
    if tail > tail_rtol * energy_unit(params.mu, params.d):
        warnings.warn(
            f"mode-sum tail estimate {tail:.3e} exceeds tolerance; raise n_max or epsilon",
            CavityAccuracyWarning,
            stacklevel=2,
        )
    return CavitySum(value, total, free, tail, config.mode_count)


def bare_expectation_sum(
    config: CavityConfig,
    params: PhysicalParams,
    t: float,
    c: float = 1.0,
    *,
    threads: Optional[int] = None,
) -> float:
    """Regulated discrete bare-state energy; tends to the continuum result."""
    return mode_sum(config, params, t, c, threads=threads).value


def reference_mode_sum(
    config: CavityConfig, params: PhysicalParams, t: float, c: float = 1.0
) -> CavitySum:
    """Slow mode-by-mode sum through :func:`mode_function` and the contraction table.

    Meant for small ``n_max``; also reports the discarded imaginary part.
    """
    z = _atom_z(config, params)
    half = 0.5 * config.L
    omega0 = c * params.k0
    total = 0j
    free = 0.0
    for mode in iter_modes(config, c):
        k = mode.omega / c
        f = mode_function(mode, (0.0, 0.0, z), config)
        # z-independent amplitudes; the free part replaces sin^2, cos^2 by 1/2
        kx, ky, _ = mode.k_vec
        sx, cx = math.sin(kx * half), math.cos(kx * half)
        sy, cy = math.sin(ky * half), math.cos(ky * half)
        amp = _ROOT8 * np.asarray(mode.e_hat) * np.array([cx * sy, sx * cy, sx * sy])
        weight = (
            _mode_weight(mode, config)
            * math.exp(-config.epsilon * k)
            * 0.5
            * (2 * math.pi * c / config.volume)
            * k
            * params.mu**2
            / 3
        )
        phase = contraction_weight(mode.omega, omega0, t)
        total += weight * float(np.dot(f, f)) * phase
        free += weight * 0.5 * float(np.dot(amp, amp)) * phase.real
    value = total.real - free
    tail = _tail_bound(config, params, c * t)
    return CavitySum(value, total.real, free, tail, config.mode_count, total.imag)


# -- continuum comparison and convergence study ----------------------------------


def regulated_bare_energy(params: PhysicalParams, t: float, epsilon: float, c: float = 1.0) -> float:
    """Continuum bare energy with the same ``exp(-epsilon k)`` regulator.

    This is what the mode sum tends to as ``L -> inf`` at fixed epsilon; the
    gap to :func:`scenarios.bare_energy` is the regulator bias.
    """
    tau = c * t
    if tau == 0:
        return 0.0
    a, k0 = 2 * params.d, params.k0

    def integrand(k: np.ndarray) -> np.ndarray:
        ak = a * k
        dm = 2 * np.sin(ak) - 2 * ak * np.cos(ak) - ak * ak * np.sin(ak)
        return dm * (1.0 - np.cos((k + k0) * tau)) / (k + k0)

    val = damped_integral(
        integrand, epsilon, a + tau, growth=2.0, amplitude=4.0 * (1.0 + a) ** 2, k_scale=1.0 / k0
    )
    return -energy_unit(params.mu, params.d) * val


def reference_ladder(d: float = 1.0) -> list[CavityConfig]:
    """Default ladder: L/d in {3, 4, 5} times epsilon/d in {0.3, 0.2, 0.15}.

    ``n_max = 32 L/d`` keeps ``k_max = 32 pi / d`` on every rung, so
    ``epsilon k_max >= 15`` and the hard truncation stays below the
    finite-size error.
    """
    return [
        CavityConfig(L * d, 32 * L, eps * d)
        for eps in (0.3, 0.2, 0.15)
        for L in (3, 4, 5)
    ]


@dataclass(frozen=True)
class StudyRow:
    L: float
    n_max: int
    epsilon: float
    value: float
    deviation: float
    regulated_deviation: float
    tail_estimate: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[StudyRow, ...]
    trend: str
    extrapolated: float
    continuum: float
    relative_deviation: float
    finite_size_limits: tuple[tuple[float, float], ...]
    note: str


def _finite_size_limit(points: list[tuple[float, float]], d: float) -> float:
    """Fit ``E + sum_p A_p (L/d)**-p`` with p = 4, 5, ...; return E."""
    if len(points) == 1:
        return points[0][1]
    x = np.array([L / d for L, _ in points])
    cols = [np.ones_like(x)] + [x ** -(4.0 + j) for j in range(len(points) - 1)]
    sol = np.linalg.solve(np.stack(cols, axis=1), np.array([v for _, v in points]))
    return float(sol[0])


def _trend(values: list[float]) -> str:
    scale = max((abs(v) for v in values), default=0.0)
    steps = [b - a for a, b in zip(values, values[1:])]
    if all(abs(s) <= 1e-14 * scale for s in steps):
        return "zero-trend"
    signs = {math.copysign(1.0, s) for s in steps if abs(s) > 1e-14 * scale}
    return "monotone" if len(signs) == 1 else "non-monotone"


def convergence_study(
    ladder: Sequence[CavityConfig],
    params: PhysicalParams,
    t: float,
    c: float = 1.0,
    *,
    threads: Optional[int] = None,
) -> ConvergenceReport:
    """Evaluate a ladder of cavities and extrapolate to the continuum.

    Rungs sharing an epsilon are extrapolated in L (powers L^-4, L^-5, ...,
    from the images in the far walls); the per-epsilon limits are then
    extrapolated to epsilon -> 0 by Neville. A single epsilon leaves the
    regulator bias in place and the note says so.
    """
    if len(ladder) < 1:
        raise ValueError("ladder must contain at least one configuration")
    continuum = bare_energy(params, t, c).energy
    rows = []
    groups: dict[float, dict[float, float]] = {}
    regulated: dict[float, float] = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CavityAccuracyWarning)
        for cfg in ladder:
            res = mode_sum(cfg, params, t, c, threads=threads)
            if cfg.epsilon not in regulated:
                regulated[cfg.epsilon] = regulated_bare_energy(params, t, cfg.epsilon, c)
            groups.setdefault(cfg.epsilon, {})[cfg.L] = res.value
            rows.append(
                StudyRow(
                    cfg.L,
                    cfg.n_max,
                    cfg.epsilon,
                    res.value,
                    res.value - continuum,
                    res.value - regulated[cfg.epsilon],
                    res.tail_estimate,
                )
            )
    limits = []
    for eps in sorted(groups, reverse=True):
        pts = sorted(groups[eps].items())
        limits.append((eps, _finite_size_limit(pts, params.d)))
    if len(limits) >= 2:
        extrapolated = neville_zero([e for e, _ in limits], [v for _, v in limits])[-1]
        note = f"{len(limits)}-point epsilon extrapolation"
    else:
        extrapolated = limits[0][1]
        note = (
            f"single epsilon {limits[0][0]:g}: regulator bias "
            f"{extrapolated - continuum:+.3e} not removed"
        )
    rel = abs(extrapolated - continuum) / abs(continuum) if continuum else abs(extrapolated)
    return ConvergenceReport(
        tuple(rows),
        _trend([r.value for r in rows]),
        float(extrapolated),
        continuum,
        rel,
        tuple(limits),
        note,
    )
