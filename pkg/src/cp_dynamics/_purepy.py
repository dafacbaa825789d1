"""Pure-Python implementations of the hot kernels.

Mirrors ``_core.pyx`` function for function; ``_backend`` picks one at import.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
HALF_PI = 0.5 * math.pi
SERIES_LIMIT = 4.0
_EPS = 2.220446049250313e-16
_CF_TOL = 1e-16
_CF_MAXITER = 500
_TINY = 1e-300


def si_ci_series(x: float) -> tuple[float, float, float]:
    """Maclaurin series for Si and Ci, 0 < x <= SERIES_LIMIT."""
    x2 = x * x
    # Si: sum (-1)^n x^(2n+1) / ((2n+1) (2n+1)!)
    p = x
    si = x
    abs_si = abs(x)
    n = 0
    while True:
        p *= -x2 / ((2 * n + 2) * (2 * n + 3))
        n += 1
        term = p / (2 * n + 1)
        si += term
        abs_si += abs(term)
        if abs(term) < 1e-17 * abs(si):
            break
    # Ci - gamma - ln x: sum_{n>=1} (-1)^n x^(2n) / (2n (2n)!)
    q = 1.0
    s = 0.0
    abs_s = 0.0
    n = 1
    while True:
        q *= -x2 / ((2 * n - 1) * (2 * n))
        term = q / (2 * n)
        s += term
        abs_s += abs(term)
        if abs(term) < 1e-17 * max(abs(s), 1e-300) or abs(term) < 1e-300:
            break
        n += 1
    lnx = math.log(x)
    ci = EULER_GAMMA + lnx + s
    err = 4 * _EPS * (abs_si + abs_s + abs(lnx) + EULER_GAMMA)
    return si, ci, err


def fg_continued_fraction(x: float) -> tuple[float, float, float]:
    """``g - i f = exp(ix) E1(ix)`` by the modified Lentz algorithm, x > 0.

    Converges for all x > 0 but is only used above SERIES_LIMIT where a few
    dozen iterations suffice.
    """
    b = complex(1.0, x)
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    i = 1
    while True:
        i += 1
        a = -float((i - 1) * (i - 1))
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            break
        if i > _CF_MAXITER:
            raise ArithmeticError(f"continued fraction did not converge at x={x!r}")
    err = (8 * _EPS + i * _EPS) * abs(h)
    return -h.imag, h.real, err


def si_ci(x: float) -> tuple[float, float, float]:
    """(Si(x), Ci(x), abs error) for x > 0."""
    if x <= SERIES_LIMIT:
        return si_ci_series(x)
    f, g, err = fg_continued_fraction(x)
    s, c = math.sin(x), math.cos(x)
    # pi/2 - Si = f cos + g sin ; Ci = f sin - g cos
    si = HALF_PI - (f * c + g * s)
    ci = f * s - g * c
    return si, ci, err + 2 * _EPS


def aux_fg(x: float) -> tuple[float, float, float]:
    """(f(x), g(x), abs error) for x > 0."""
    if x > SERIES_LIMIT:
        return fg_continued_fraction(x)
    si, ci, err = si_ci_series(x)
    s, c = math.sin(x), math.cos(x)
    p = HALF_PI - si
    f = ci * s + p * c
    g = -ci * c + p * s
    return f, g, 2 * err + 4 * _EPS * (abs(ci) + abs(p))


def cavity_block(
    l_lo: int,
    l_hi: int,
    n_max: int,
    side: float,
    z: float,
    eps: float,
    k0: float,
    ct: float,
    trapezoid: bool,
) -> tuple[float, float]:
    """Mode sum over indices ``l_lo <= l < l_hi``, ``0 <= m, n <= n_max``.

    Atom at ``(0, 0, z)``. Returns ``(total, free)`` where both are
    ``sum_modes w * exp(-eps k) * k * sum_j |f_kj|^2 * (1 - cos((k + k0) ct)) / (k + k0)``
    with ``free`` using the z-averaged mode functions (``sin^2, cos^2 -> 1/2``).
    The caller applies the ``-(2 pi / V) mu^2 / 3`` prefactor.
    """
    dk = math.pi / side
    idx = np.arange(n_max + 1, dtype=np.float64)
    m, n = np.meshgrid(idx, idx, indexing="ij")
    ky = m * dk
    kz = n * dk
    wm = np.where(m == 0, 0.5, 1.0) if trapezoid else np.ones_like(m)
    wn = np.where(n == 0, 0.5, 1.0) if trapezoid else np.ones_like(n)
    # half-side phases for the atom at x = y = 0
    sy = np.sin(ky * (0.5 * side))
    cy = np.cos(ky * (0.5 * side))
    szz = np.sin(kz * z)
    czz = np.cos(kz * z)
    total = 0.0
    free = 0.0
    for l in range(l_lo, l_hi):
        kx = l * dk
        k = np.sqrt(kx * kx + ky * ky + kz * kz)
        nonzero = k > 0
        ks = np.where(nonzero, k, 1.0)
        khat = np.stack([np.full_like(k, kx), ky, kz]) / ks
        e1, e2 = polarization_basis_array(khat)
        sx = math.sin(kx * 0.5 * side)
        cx = math.cos(kx * 0.5 * side)
        ax = cx * sy  # x-component transverse factors
        ay = sx * cy
        az = sx * sy
        f2 = 0.0
        f2_free = 0.0
        for e in (e1, e2):
            fx = math.sqrt(8.0) * e[0] * ax * szz
            fy = math.sqrt(8.0) * e[1] * ay * szz
            fz = math.sqrt(8.0) * e[2] * az * czz
            f2 = f2 + fx * fx + fy * fy + fz * fz
            f2_free = f2_free + 8.0 * 0.5 * (
                (e[0] * ax) ** 2 + (e[1] * ay) ** 2 + (e[2] * az) ** 2
            )
        wl = 0.5 if (trapezoid and l == 0) else 1.0
        weight = wl * wm * wn * np.exp(-eps * ks) * ks * (1.0 - np.cos((ks + k0) * ct)) / (ks + k0)
        weight = np.where(nonzero, weight, 0.0)
        total += float(np.sum(weight * f2))
        free += float(np.sum(weight * f2_free))
    return total, free


def polarization_basis_array(khat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised polarization rule: e1 = khat x z (or khat x x if parallel), e2 = khat x e1."""
    kx, ky, kz = khat
    # khat x zhat = (ky, -kx, 0)
    ax, ay, az = ky, -kx, np.zeros_like(kx)
    norm = np.sqrt(ax * ax + ay * ay)
    par = norm < 1e-12
    # khat x xhat = (0, kz, -ky)
    ax = np.where(par, 0.0, ax)
    ay = np.where(par, kz, ay)
    az = np.where(par, -ky, az)
    norm = np.sqrt(ax * ax + ay * ay + az * az)
    norm = np.where(norm > 0, norm, 1.0)
    e1 = np.stack([ax, ay, az]) / norm
    e2 = np.stack(
        [ky * e1[2] - kz * e1[1], kz * e1[0] - kx * e1[2], kx * e1[1] - ky * e1[0]]
    )
    return e1, e2
