import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cp_dynamics.params import (
    PRESETS,
    DomainError,
    PhysicalParams,
    derived_geometry,
    energy_unit,
    nondimensionalize,
    restore,
)

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_unit_inputs():
    p = nondimensionalize(PhysicalParams(1, 1, 1, 1, 1), 0.0)
    assert (p.x0, p.x0p, p.s, p.rho) == (1, 1, 0, 1)
    assert p.eps0 == pytest.approx(1 / (12 * math.pi), rel=1e-15)


def test_eps0_quadratic_in_mu():
    p = nondimensionalize(PhysicalParams(2, 1, 1, 1, 1), 0.0)
    assert p.eps0 == pytest.approx(4 / (12 * math.pi), rel=1e-15)


def test_direct_substitution():
    p = nondimensionalize(PhysicalParams(mu=1, k0=3, k0_prime=2, d=0.5, d_prime=0.25), 1.0, c=1.0)
    assert (p.x0, p.x0p, p.s, p.rho) == (1.5, 1.0, 2.0, 0.5)


@pytest.mark.parametrize(
    "d, dp, zbar, z", [(1, 1, 1, 0), (3, 1, 2, 1), (1, 3, 2, -1)]
)
def test_derived_geometry_examples(d, dp, zbar, z):
    g = derived_geometry(PhysicalParams(d=d, d_prime=dp))
    assert (g.zbar, g.z) == (zbar, z)


@pytest.mark.parametrize("field", ["mu", "k0", "k0_prime", "d", "d_prime"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_rejects_nonpositive(field, bad):
    with pytest.raises(DomainError):
        PhysicalParams(**{field: bad})


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        nondimensionalize(PhysicalParams(), -1.0)


@given(pos, pos, pos, pos, pos, st.floats(min_value=0, max_value=1e3), pos)
def test_round_trip(mu, k0, k0p, d, dp, t, c):
    params = PhysicalParams(mu, k0, k0p, d, dp)
    back, t2 = restore(nondimensionalize(params, t, c), d, c)
    for name in ("mu", "k0", "k0_prime", "d", "d_prime"):
        assert getattr(back, name) == pytest.approx(getattr(params, name), rel=1e-14)
    assert t2 == pytest.approx(t, rel=1e-14, abs=1e-300)


@given(pos, pos, pos)
def test_eps0_scaling(mu, d, lam):
    assert energy_unit(mu, lam * d) == pytest.approx(energy_unit(mu, d) / lam**3, rel=1e-13)


@given(pos, pos)
def test_geometry_symmetry(d, dp):
    a = derived_geometry(PhysicalParams(d=d, d_prime=dp))
    b = derived_geometry(PhysicalParams(d=dp, d_prime=d))
    assert a.zbar == b.zbar
    assert a.z == -b.z
    assert a.zbar > abs(a.z) >= 0


def test_presets_documented():
    assert PRESETS["rydberg-like"]["x0_range"] == (1e-3, 1e2)
    for spec in PRESETS.values():
        lo, hi = spec["x0_range"]
        assert lo <= spec["x0"] <= hi
        assert spec["description"]
