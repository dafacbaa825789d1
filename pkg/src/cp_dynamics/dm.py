"""The operator D^m = 2 - 2 d/dm + d^2/dm^2 taken at m = 1.

Kernel families depend on m only through the length argument ``a = m a0``,
so analytic m-derivatives follow from the a-derivatives by the chain rule.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Callable, Optional

from .kernels import (
    KernelQuery,
    dynamic_kernel_derivatives,
    in_light_cone,
    static_kernel_derivatives,
)
from .params import DomainError
from .specfun import aux_fg_derivatives

__all__ = [
    "DmMode",
    "MFamily",
    "DmResult",
    "CrossCheckError",
    "MissingDerivativeError",
    "apply_dm",
    "kernel_family_static",
    "kernel_family_dynamic",
    "dm_static_xform",
    "DEFAULT_STEP",
    "CROSS_CHECK_TOL",
]

DEFAULT_STEP = 4e-3
CROSS_CHECK_TOL = 1e-6


class DmMode(str, enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"
    BOTH = "both"


class MissingDerivativeError(ValueError):
    pass


class CrossCheckError(ArithmeticError):
    pass


@dataclass(frozen=True)
class MFamily:
    """A scalar function of m with optional analytic derivative channels.

    ``scale_hint`` is the typical magnitude of the D^m terms and normalises
    the analytic/finite-difference discrepancy; ``m_scale`` is the distance
    in m to the nearest singularity and sets the difference step.
    """

    eval: Callable[[float], float]
    eval_d1: Optional[Callable[[float], float]] = None
    eval_d2: Optional[Callable[[float], float]] = None
    scale_hint: float = 1.0
    m_scale: float = 1.0

    def scaled(self, c: float) -> "MFamily":
        d1, d2 = self.eval_d1, self.eval_d2
        return MFamily(
            lambda m: c * self.eval(m),
            None if d1 is None else (lambda m: c * d1(m)),
            None if d2 is None else (lambda m: c * d2(m)),
            abs(c) * self.scale_hint,
            self.m_scale,
        )

    def __add__(self, other: "MFamily") -> "MFamily":
        both1 = self.eval_d1 is not None and other.eval_d1 is not None
        both2 = self.eval_d2 is not None and other.eval_d2 is not None
        return MFamily(
            lambda m: self.eval(m) + other.eval(m),
            (lambda m: self.eval_d1(m) + other.eval_d1(m)) if both1 else None,
            (lambda m: self.eval_d2(m) + other.eval_d2(m)) if both2 else None,
            max(self.scale_hint, other.scale_hint),
            min(self.m_scale, other.m_scale),
        )

    def __sub__(self, other: "MFamily") -> "MFamily":
        return self + other.scaled(-1.0)

    def __rmul__(self, c: float) -> "MFamily":
        return self.scaled(c)


@dataclass(frozen=True)
class DmResult:
    value: float
    method: DmMode
    discrepancy: float = 0.0


def _fd_derivatives(fam: MFamily, h: float) -> tuple[float, float, float]:
    """Central differences at m = 1 with one Richardson step (h, h/2)."""
    e0 = fam.eval(1.0)

    def stencil(step: float) -> tuple[float, float]:
        ep, em = fam.eval(1.0 + step), fam.eval(1.0 - step)
        return (ep - em) / (2 * step), (ep - 2 * e0 + em) / (step * step)

    d1h, d2h = stencil(h)
    d1q, d2q = stencil(0.5 * h)
    return e0, (4 * d1q - d1h) / 3, (4 * d2q - d2h) / 3


def apply_dm(
    family: MFamily,
    mode: DmMode | str = DmMode.ANALYTIC,
    *,
    step: float = DEFAULT_STEP,
    tol: float = CROSS_CHECK_TOL,
) -> DmResult:
    mode = DmMode(mode)
    analytic = fd = None
    if mode in (DmMode.ANALYTIC, DmMode.BOTH):
        if family.eval_d1 is None or family.eval_d2 is None:
            raise MissingDerivativeError("analytic D^m needs both derivative channels")
        analytic = 2 * family.eval(1.0) - 2 * family.eval_d1(1.0) + family.eval_d2(1.0)
    if mode in (DmMode.FINITE_DIFFERENCE, DmMode.BOTH):
        e0, d1, d2 = _fd_derivatives(family, step * min(1.0, family.m_scale))
        fd = 2 * e0 - 2 * d1 + d2
    if mode is DmMode.ANALYTIC:
        return DmResult(analytic, mode)
    if mode is DmMode.FINITE_DIFFERENCE:
        return DmResult(fd, mode)
    disc = abs(analytic - fd)
    if disc > tol * max(abs(analytic), family.scale_hint):
        raise CrossCheckError(
            f"D^m analytic {analytic!r} vs finite difference {fd!r} (discrepancy {disc:.3e})"
        )
    return DmResult(analytic, mode, disc)


def _family_from_channels(channels: Callable[[float], tuple], m_scale: float) -> MFamily:
    cached = functools.lru_cache(maxsize=8)(channels)
    e, d1, d2 = cached(1.0)[:3]
    return MFamily(
        lambda m: cached(m)[0],
        lambda m: cached(m)[1],
        lambda m: cached(m)[2],
        scale_hint=max(abs(2 * e), abs(2 * d1), abs(d2)),
        m_scale=min(1.0, m_scale),
    )


def kernel_family_static(a0: float, beta: float) -> MFamily:
    """``m -> S(m a0, beta)`` with chain-rule derivatives."""
    if not (a0 > 0 and beta > 0):
        raise DomainError("a0 and beta must be > 0")

    def channels(m: float) -> tuple:
        v, d1, d2, _ = static_kernel_derivatives(m * a0, beta)
        return v, a0 * d1, a0 * a0 * d2

    return _family_from_channels(channels, 1.0)


def kernel_family_dynamic(query: KernelQuery) -> MFamily:
    """``m -> C(m a, beta, q, tau)``; refuses to build across the light cone."""
    a0, beta, q, tau = query.a, query.beta, query.q, query.tau
    if in_light_cone(a0, tau):
        raise DomainError("kernel family crosses the light-cone divergence; check diverged first")

    def channels(m: float) -> tuple:
        v, d1, d2, _ = dynamic_kernel_derivatives(m * a0, beta, q, tau)
        return v, a0 * d1, a0 * a0 * d2

    return _family_from_channels(channels, abs(a0 - tau) / a0 if tau > 0 else 1.0)


def dm_static_xform(x: float) -> float:
    """``2 f(x) - 2 x f'(x) + x**2 f''(x)``: D^m of ``f(m x)`` at m = 1."""
    (f, f1, f2), _ = aux_fg_derivatives(x)
    return 2 * f - 2 * x * f1 + x * x * f2
