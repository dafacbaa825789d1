import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cp_dynamics.cavity import (
    CONTRACTIONS,
    CavityAccuracyWarning,
    CavityConfig,
    CavityResourceError,
    Mode,
    ZeroVectorError,
    contraction_weight,
    convergence_study,
    iter_modes,
    mode_function,
    mode_sum,
    polarization_basis,
    reference_ladder,
    reference_mode_sum,
    regulated_bare_energy,
)
from cp_dynamics.params import DomainError, PhysicalParams, energy_unit

P = PhysicalParams(mu=1.0, k0=1.0, k0_prime=1.0, d=1.0, d_prime=1.0)
SMALL = CavityConfig(L=4.0, n_max=6, epsilon=0.4)


def _mode(idx, pol, L):
    dk = math.pi / L
    k = tuple(i * dk for i in idx)
    e = polarization_basis(k)[pol - 1]
    return Mode(idx, pol, k, float(np.linalg.norm(k)), tuple(e))


def test_tangential_field_vanishes_on_mirror():
    for mode in iter_modes(SMALL):
        f = mode_function(mode, (0.3, -0.7, 0.0), SMALL)
        assert f[0] == 0.0 and f[1] == 0.0


def test_mode_function_example():
    L = 2.0
    m = _mode((1, 1, 1), 1, L)
    # at the cavity centre every sine is 1 and every cosine vanishes except cos(kz z) with z = L/2
    f = mode_function(m, (0.0, 0.0, 0.5 * L), CavityConfig(L, 2, 0.1))
    expected = math.sqrt(8) * np.array([0.0, 0.0, m.e_hat[2] * 1.0 * 1.0 * math.cos(math.pi / 2)])
    assert np.allclose(f, expected, atol=1e-15)
    g = mode_function(m, (0.25, -0.1, 0.3), CavityConfig(L, 2, 0.1))
    x, y, z = 0.25 + 1.0, -0.1 + 1.0, 0.3
    k = math.pi / L
    ex, ey, ez = m.e_hat
    ref = math.sqrt(8) * np.array(
        [
            ex * math.cos(k * x) * math.sin(k * y) * math.sin(k * z),
            ey * math.sin(k * x) * math.cos(k * y) * math.sin(k * z),
            ez * math.sin(k * x) * math.sin(k * y) * math.cos(k * z),
        ]
    )
    assert np.allclose(g, ref, rtol=1e-14, atol=1e-16)


def test_mode_function_outside_cavity():
    m = _mode((1, 0, 1), 1, SMALL.L)
    with pytest.raises(DomainError):
        mode_function(m, (0.0, 0.0, -0.1), SMALL)


@pytest.mark.parametrize("idx", [(1, 2, 3), (2, 0, 1), (3, 3, 1), (0, 0, 2)])
def test_mode_functions_are_divergence_free(idx):
    h = 1e-5
    for pol in (1, 2):
        m = _mode(idx, pol, SMALL.L)
        r = np.array([0.31, -0.52, 1.37])
        div = 0.0
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            div += (mode_function(m, r + e, SMALL)[axis] - mode_function(m, r - e, SMALL)[axis]) / (2 * h)
        assert abs(div) < 1e-8


@settings(max_examples=200, deadline=None)
@given(st.tuples(*(st.floats(min_value=-10, max_value=10) for _ in range(3))))
def test_polarization_basis_orthonormal(k):
    k = np.asarray(k)
    if np.linalg.norm(k) < 1e-6:
        return
    e1, e2 = polarization_basis(k)
    khat = k / np.linalg.norm(k)
    basis = np.stack([e1, e2, khat])
    assert np.allclose(basis @ basis.T, np.eye(3), atol=1e-12)
    # completeness of the transverse projector
    proj = np.outer(e1, e1) + np.outer(e2, e2)
    assert np.allclose(proj, np.eye(3) - np.outer(khat, khat), atol=1e-12)


def test_polarization_basis_along_z():
    e1, e2 = polarization_basis((0.0, 0.0, 2.0))
    assert np.allclose(np.cross(e1, e2), [0, 0, 1])


def test_zero_vector():
    with pytest.raises(ZeroVectorError):
        polarization_basis((0.0, 0.0, 0.0))


def test_contraction_table_shape():
    assert [t.coefficient for t in CONTRACTIONS] == [-2j, 1j, 1j]


@pytest.mark.parametrize("wk,w0,t", [(1.0, 1.0, 0.7), (3.2, 0.4, 2.5), (0.5, 2.0, 11.0)])
def test_contraction_real_part(wk, w0, t):
    w = wk + w0
    expected = -2 * (1 - math.cos(w * t)) / w
    assert contraction_weight(wk, w0, t).real == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert contraction_weight(wk, w0, 0.0) == 0


@pytest.mark.parametrize("rule", ["trapezoid", "as-printed"])
@pytest.mark.parametrize("t", [0.3, 0.8, 2.6])
def test_reference_sum_matches_block_sum(rule, t):
    cfg = CavityConfig(3.0, 5, 0.5, zero_index_rule=rule)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CavityAccuracyWarning)
        fast = mode_sum(cfg, P, t)
    slow = reference_mode_sum(cfg, P, t)
    assert slow.value == pytest.approx(fast.value, rel=1e-12, abs=1e-16)
    assert slow.free == pytest.approx(fast.free, rel=1e-12)


def test_thread_count_does_not_change_result():
    cfg = CavityConfig(4.0, 64, 0.3)
    vals = {mode_sum(cfg, P, 0.8, threads=n).value for n in (1, 2, 3, 8)}
    assert len(vals) == 1


def test_zero_time_is_exactly_zero():
    assert mode_sum(CavityConfig(4.0, 40, 0.3), P, 0.0).value == 0.0


def test_truncation_within_tail_bound():
    a = mode_sum(CavityConfig(4.0, 64, 0.3), P, 0.8)
    b = mode_sum(CavityConfig(4.0, 128, 0.3), P, 0.8)
    assert abs(a.value - b.value) <= a.tail_estimate


def test_tail_warning():
    with pytest.warns(CavityAccuracyWarning):
        mode_sum(CavityConfig(4.0, 4, 0.05), P, 0.8)


def test_resource_limit():
    with pytest.raises(CavityResourceError):
        mode_sum(CavityConfig(4.0, 200, 0.3, mode_budget=1000), P, 0.8)


def test_config_validation():
    with pytest.raises(DomainError):
        CavityConfig(0.0, 4, 0.1)
    with pytest.raises(DomainError):
        CavityConfig(1.0, 0, 0.1)
    with pytest.raises(DomainError):
        CavityConfig(1.0, 4, 0.1, zero_index_rule="other")
    with pytest.raises(DomainError):
        mode_sum(CavityConfig(1.0, 4, 0.1), P, 0.5)


def test_identical_rungs_give_zero_trend():
    cfg = CavityConfig(4.0, 32, 0.3)
    rep = convergence_study([cfg, cfg, cfg], P, 0.8)
    assert rep.trend == "zero-trend"
    assert "single epsilon" in rep.note


def test_fixed_epsilon_limit_matches_regulated_continuum():
    eps = 0.3
    ladder = [CavityConfig(L, 32 * L, eps) for L in (3, 4, 5)]
    rep = convergence_study(ladder, P, 0.8)
    (_, limit), = rep.finite_size_limits
    reg = regulated_bare_energy(P, 0.8, eps)
    assert limit == pytest.approx(reg, rel=2e-3)


def test_reference_ladder_reaches_continuum():
    rep = convergence_study(reference_ladder(), P, 0.8)
    assert rep.relative_deviation <= 0.02
    assert rep.continuum != 0
    assert len(rep.rows) == 9
    assert abs(rep.continuum) < 10 * energy_unit(1.0, 1.0)
