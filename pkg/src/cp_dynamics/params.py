"""Physical parameters, reduced variables and presets.

Internally every formula is written with ``c = 1``; the public helpers take
an explicit speed of light so that SI-style inputs can be used as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "PhysicalParams",
    "DimensionlessPoint",
    "DerivedGeometry",
    "nondimensionalize",
    "restore",
    "derived_geometry",
    "energy_unit",
    "PRESETS",
]


class DomainError(ValueError):
    """Argument outside the mathematical or physical domain."""


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Atom/mirror configuration.

    ``k0``/``d`` are the transition wavenumber and atom-wall distance that
    hold for ``t > 0``; ``k0_prime``/``d_prime`` are the values before the
    sudden change at ``t = 0``. The dipole is isotropic: each Cartesian
    projection squared averages to ``mu**2 / 3``.
    """

    mu: float = 1.0
    k0: float = 1.0
    k0_prime: float = 1.0
    d: float = 1.0
    d_prime: float = 1.0

    def __post_init__(self) -> None:
        _require_positive(
            mu=self.mu, k0=self.k0, k0_prime=self.k0_prime, d=self.d, d_prime=self.d_prime
        )

    def replace(self, **changes: float) -> "PhysicalParams":
        fields = dict(
            mu=self.mu, k0=self.k0, k0_prime=self.k0_prime, d=self.d, d_prime=self.d_prime
        )
        fields.update(changes)
        return PhysicalParams(**fields)


@dataclass(frozen=True)
class DimensionlessPoint:
    x0: float
    x0p: float
    s: float
    rho: float
    eps0: float

    def __post_init__(self) -> None:
        _require_positive(x0=self.x0, x0p=self.x0p, rho=self.rho, eps0=self.eps0)
        if not (math.isfinite(self.s) and self.s >= 0):
            raise DomainError(f"s must be finite and >= 0, got {self.s!r}")


@dataclass(frozen=True)
class DerivedGeometry:
    zbar: float
    z: float


def energy_unit(mu: float, d: float) -> float:
    """``mu**2 / (12 pi d**3)``, the natural energy scale at distance ``d``."""
    return mu * mu / (12.0 * math.pi * d**3)


def nondimensionalize(params: PhysicalParams, t: float, c: float = 1.0) -> DimensionlessPoint:
    _require_positive(c=c)
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")
    d = params.d
    return DimensionlessPoint(
        x0=params.k0 * d,
        x0p=params.k0_prime * d,
        s=c * t / d,
        rho=params.d_prime / d,
        eps0=energy_unit(params.mu, d),
    )


def restore(point: DimensionlessPoint, d: float, c: float = 1.0) -> tuple[PhysicalParams, float]:
    """Inverse of :func:`nondimensionalize` for a known distance ``d``.

    ``mu`` is recovered from ``eps0``; returns ``(params, t)``.
    """
    _require_positive(d=d, c=c)
    mu = math.sqrt(point.eps0 * 12.0 * math.pi * d**3)
    params = PhysicalParams(
        mu=mu, k0=point.x0 / d, k0_prime=point.x0p / d, d=d, d_prime=point.rho * d
    )
    return params, point.s * d / c


def derived_geometry(params: PhysicalParams) -> DerivedGeometry:
    """Mean and half-difference of the new and old atom-wall distances."""
    return DerivedGeometry(
        zbar=0.5 * (params.d + params.d_prime), z=0.5 * (params.d - params.d_prime)
    )


# Documented defaults only; the values carry no physics beyond typical ranges.
# "rydberg-like" spans k0*d from 1e-3 (near zone) to 1e2 (far zone).
PRESETS: dict[str, dict] = {
    "rydberg-like": {
        "description": "GHz-scale transition; x0 = k0*d between 1e-3 and 1e2",
        "x0_range": (1e-3, 1e2),
        "x0": 1.0,
        "x0p": 1.2,
        "rho": 1.0,
    },
    "near-zone": {
        "description": "electrostatic regime, k0*d << 1",
        "x0_range": (1e-3, 1e-1),
        "x0": 1e-2,
        "x0p": 1e-2,
        "rho": 1.0,
    },
    "far-zone": {
        "description": "retarded regime, k0*d >> 1",
        "x0_range": (10.0, 1e2),
        "x0": 50.0,
        "x0p": 50.0,
        "rho": 1.0,
    },
    "position-quench": {
        "description": "atom moved from d' = 0.5 d to d with a small frequency jump",
        "x0_range": (1e-1, 10.0),
        "x0": 1.0,
        "x0p": 1.1,
        "rho": 0.5,
    },
}
