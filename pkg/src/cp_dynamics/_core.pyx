# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same algorithms and signatures as ``_purepy``."""

from libc.math cimport sin, cos, log, sqrt, exp, fabs
from libc.stdlib cimport malloc, free as free_mem

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double HALF_PI = 1.57079632679489661923
cdef double SERIES_LIMIT = 4.0
cdef double _EPS = 2.220446049250313e-16
cdef double _CF_TOL = 1e-16
cdef int _CF_MAXITER = 500
cdef double _TINY = 1e-300


cdef int _series(double x, double* si_out, double* ci_out, double* err_out) nogil:
    cdef double x2 = x * x
    cdef double p = x, si = x, abs_si = fabs(x), term
    cdef double q = 1.0, s = 0.0, abs_s = 0.0, lnx, cutoff
    cdef int n = 0
    while True:
        p *= -x2 / ((2 * n + 2) * (2 * n + 3))
        n += 1
        term = p / (2 * n + 1)
        si += term
        abs_si += fabs(term)
        if fabs(term) < 1e-17 * fabs(si):
            break
    n = 1
    while True:
        q *= -x2 / ((2 * n - 1) * (2 * n))
        term = q / (2 * n)
        s += term
        abs_s += fabs(term)
        cutoff = fabs(s)
        if cutoff < 1e-300:
            cutoff = 1e-300
        if fabs(term) < 1e-17 * cutoff or fabs(term) < 1e-300:
            break
        n += 1
    lnx = log(x)
    si_out[0] = si
    ci_out[0] = EULER_GAMMA + lnx + s
    err_out[0] = 4 * _EPS * (abs_si + abs_s + fabs(lnx) + EULER_GAMMA)
    return 0


cdef int _cf(double x, double* f_out, double* g_out, double* err_out) nogil:
    # complex arithmetic spelled out: b, c, d, h, delta
    cdef double br = 1.0, bi = x
    cdef double cr = 1.0 / _TINY, ci = 0.0
    cdef double den, dr, di, hr, hi, tr, ti, a, delr, deli, ur, ui
    cdef int i = 1
    den = br * br + bi * bi
    dr = br / den
    di = -bi / den
    hr = dr
    hi = di
    while True:
        i += 1
        a = -<double>((i - 1) * (i - 1))
        br += 2.0
        # d = 1 / (a d + b)
        tr = a * dr + br
        ti = a * di + bi
        den = tr * tr + ti * ti
        dr = tr / den
        di = -ti / den
        # c = b + a / c
        den = cr * cr + ci * ci
        ur = br + a * cr / den
        ui = bi - a * ci / den
        cr = ur
        ci = ui
        delr = cr * dr - ci * di
        deli = cr * di + ci * dr
        tr = hr * delr - hi * deli
        hi = hr * deli + hi * delr
        hr = tr
        if sqrt((delr - 1.0) * (delr - 1.0) + deli * deli) < _CF_TOL:
            break
        if i > _CF_MAXITER:
            return -1
    f_out[0] = -hi
    g_out[0] = hr
    err_out[0] = (8 * _EPS + i * _EPS) * sqrt(hr * hr + hi * hi)
    return 0


def si_ci_series(double x):
    cdef double si, ci, err
    _series(x, &si, &ci, &err)
    return si, ci, err


def fg_continued_fraction(double x):
    cdef double f, g, err
    if _cf(x, &f, &g, &err) != 0:
        raise ArithmeticError(f"continued fraction did not converge at x={x!r}")
    return f, g, err


def si_ci(double x):
    cdef double si, ci, err, f, g, s, c
    if x <= SERIES_LIMIT:
        _series(x, &si, &ci, &err)
        return si, ci, err
    if _cf(x, &f, &g, &err) != 0:
        raise ArithmeticError(f"continued fraction did not converge at x={x!r}")
    s = sin(x)
    c = cos(x)
    return HALF_PI - (f * c + g * s), f * s - g * c, err + 2 * _EPS


def aux_fg(double x):
    cdef double si, ci, err, f, g, s, c, p
    if x > SERIES_LIMIT:
        if _cf(x, &f, &g, &err) != 0:
            raise ArithmeticError(f"continued fraction did not converge at x={x!r}")
        return f, g, err
    _series(x, &si, &ci, &err)
    s = sin(x)
    c = cos(x)
    p = HALF_PI - si
    f = ci * s + p * c
    g = -ci * c + p * s
    return f, g, 2 * err + 4 * _EPS * (fabs(ci) + fabs(p))


def cavity_block(int l_lo, int l_hi, int n_max, double side, double z, double eps,
                 double k0, double ct, bint trapezoid):
    # Polarization sums use completeness: sum_j (e_j)_a^2 = 1 - khat_a^2.
    cdef double dk = 3.14159265358979323846 / side
    cdef double half = 0.5 * side
    cdef double total = 0.0, free = 0.0, comp_t = 0.0, comp_f = 0.0
    cdef double row_t, row_f, kx, ky, kz, kx2, kxy2, k, k2, w, wl, wm, wn, tmp
    cdef double sx, cx, sy, cy, ax2, ay2, az2, px, py, pz, s2, c2
    cdef int l, m, n
    cdef double* sz2 = <double*> malloc((n_max + 1) * sizeof(double))
    cdef double* cz2 = <double*> malloc((n_max + 1) * sizeof(double))
    if sz2 == NULL or cz2 == NULL:
        free_mem(sz2)
        free_mem(cz2)
        raise MemoryError()
    with nogil:
        for n in range(n_max + 1):
            tmp = sin(n * dk * z)
            sz2[n] = tmp * tmp
            tmp = cos(n * dk * z)
            cz2[n] = tmp * tmp
        for l in range(l_lo, l_hi):
            kx = l * dk
            kx2 = kx * kx
            sx = sin(kx * half)
            cx = cos(kx * half)
            wl = 0.5 if (trapezoid and l == 0) else 1.0
            for m in range(n_max + 1):
                ky = m * dk
                kxy2 = kx2 + ky * ky
                sy = sin(ky * half)
                cy = cos(ky * half)
                wm = 0.5 if (trapezoid and m == 0) else 1.0
                ax2 = 8.0 * (cx * sy) * (cx * sy)
                ay2 = 8.0 * (sx * cy) * (sx * cy)
                az2 = 8.0 * (sx * sy) * (sx * sy)
                row_t = 0.0
                row_f = 0.0
                for n in range(n_max + 1):
                    kz = n * dk
                    k2 = kxy2 + kz * kz
                    if k2 == 0.0:
                        continue
                    k = sqrt(k2)
                    px = ax2 * (1.0 - kx2 / k2)
                    py = ay2 * (1.0 - ky * ky / k2)
                    pz = az2 * (1.0 - kz * kz / k2)
                    wn = 0.5 if (trapezoid and n == 0) else 1.0
                    w = wl * wm * wn * exp(-eps * k) * k * (1.0 - cos((k + k0) * ct)) / (k + k0)
                    row_t += w * ((px + py) * sz2[n] + pz * cz2[n])
                    row_f += w * 0.5 * (px + py + pz)
                # Neumaier accumulation of row sums
                tmp = total + row_t
                if fabs(total) >= fabs(row_t):
                    comp_t += (total - tmp) + row_t
                else:
                    comp_t += (row_t - tmp) + total
                total = tmp
                tmp = free + row_f
                if fabs(free) >= fabs(row_f):
                    comp_f += (free - tmp) + row_f
                else:
                    comp_f += (row_f - tmp) + free
                free = tmp
    free_mem(sz2)
    free_mem(cz2)
    return total + comp_t, free + comp_f
