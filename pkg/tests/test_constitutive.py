import numpy as np
import pytest

from symns.constitutive import (GasModel, check_admissible, conductivity,
                                heat_capacity, ideal_gas, internal_energy,
                                power_gas, pressure,
                                thermo_consistency_residual)


def test_pressure_ideal():
    assert pressure(ideal_gas(), 2.0, 3.0) == 6.0


def test_pressure_vacuum_is_zero():
    m = power_gas(mu=1, lam=0, r=1, q=2, A=1, gamma=2)
    for theta in (0.0, 1.0, 17.3):
        assert pressure(m, 0.0, theta) == 0.0


def test_pressure_power_barotropic():
    m = power_gas(mu=1, lam=0, r=1, q=2, A=1, gamma=2)
    # rho*(theta + theta^2/2) + rho^2 at rho = theta = 1
    assert pressure(m, 1.0, 1.0) == pytest.approx(2.5, rel=1e-15)


def test_pressure_rejects_negative_inputs():
    with pytest.raises(ValueError):
        pressure(ideal_gas(), -1.0, 1.0)
    with pytest.raises(ValueError):
        pressure(ideal_gas(), 1.0, -1.0)


def test_internal_energy_examples():
    assert internal_energy(ideal_gas(), 1.0, 5.0) == 5.0
    m = power_gas(mu=1, lam=0, r=0.5, q=1, A=1, gamma=2)
    assert internal_energy(m, 3.0, 0.0) == pytest.approx(3.0)  # e_c only
    assert internal_energy(m, 0.0, 2.0) == pytest.approx(
        2.0 + 2.0 ** 1.5 / 1.5)  # Q only at vacuum


def test_conductivity_examples():
    assert conductivity(ideal_gas(kappa0=1, q=2), 2.0) == 5.0
    assert conductivity(ideal_gas(kappa0=3.5, q=2), 0.0) == 3.5
    assert conductivity(ideal_gas(kappa0=2, q=0.5), 4.0) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        conductivity(ideal_gas(), -0.1)


def test_heat_capacity_examples():
    assert heat_capacity(ideal_gas(), 123.0) == 1.0
    assert heat_capacity(power_gas(mu=1, lam=0, r=2, q=3), 3.0) == 10.0
    assert heat_capacity(power_gas(mu=1, lam=0, r=0, q=1), 7.0) == 2.0


def test_model_validation():
    with pytest.raises(ValueError):
        GasModel(mu=0.0, lam=0.0, kappa0=1.0, q=2.0)
    with pytest.raises(ValueError):
        GasModel(mu=1.0, lam=0.0, kappa0=1.0, q=1.0, q_family="power", r=1.0)
    with pytest.raises(ValueError):
        GasModel(mu=1.0, lam=0.0, kappa0=1.0, q=2.0, pc_family="barotropic",
                 A=0.0)
    with pytest.raises(ValueError):
        GasModel(mu=1.0, lam=0.0, kappa0=-1.0, q=2.0)


def test_thermo_residual_ideal_gas():
    m = ideal_gas()
    res = thermo_consistency_residual(m, 1.0, 1.0)
    assert abs(res) <= 1e-7


def test_thermo_residual_barotropic_cancellation():
    # rho^2 e_c' = P_c holds analytically, so only FD noise remains
    m = GasModel(mu=1.0, lam=0.0, kappa0=1.0, q=2.0, pc_family="barotropic",
                 A=1.0, gamma=2.0)
    P = pressure(m, 2.0, 1.0)
    res = thermo_consistency_residual(m, 2.0, 1.0)
    assert abs(res) <= 1e-7 * (1.0 + abs(P))


def test_thermo_residual_power_family_is_nonzero():
    # documented behavior: the power family with r > 0 does not satisfy the
    # consistency identity; the residual is -rho*r*theta^(1+r)/(1+r)
    m = power_gas(mu=1, lam=0, r=1.0, q=3.0, A=1.0, gamma=2.0)
    res = thermo_consistency_residual(m, 1.0, 2.0)
    analytic = -1.0 * 1.0 * 2.0 ** 2 / 2.0
    assert res == pytest.approx(analytic, rel=1e-5)


def test_thermo_residual_rejects_boundary_points():
    with pytest.raises(ValueError):
        thermo_consistency_residual(ideal_gas(), 0.0, 1.0)
    with pytest.raises(ValueError):
        thermo_consistency_residual(ideal_gas(), 1.0, 0.0)


def test_thermo_residual_ideal_gas_grid():
    m = ideal_gas()
    for rho in np.linspace(0.05, 10, 20):
        for theta in np.linspace(0.05, 10, 20):
            P = pressure(m, rho, theta)
            assert abs(thermo_consistency_residual(m, rho, theta)) \
                <= 1e-7 * (1.0 + abs(P))


def test_check_admissible_lame_combination():
    ok = check_admissible(GasModel(mu=1.0, lam=-0.6, kappa0=1, q=2), m=2)
    assert ok.ok  # 2 - 1.8 = 0.2 > 0
    bad = check_admissible(GasModel(mu=1.0, lam=-0.7, kappa0=1, q=2), m=2)
    assert not bad.ok
    assert any("2*mu" in name for name, _ in bad.failures())


def test_q_equal_r_rejected_at_construction():
    with pytest.raises(ValueError, match="q > r"):
        GasModel(mu=1.0, lam=0.0, kappa0=1.0, q=1.0, q_family="power", r=1.0)


def test_check_admissible_ideal_passes():
    rep = check_admissible(ideal_gas(mu=1.0, lam=0.0, q=2.0), m=2)
    assert rep.ok
    assert "pass" in str(rep)


def test_monotonicity_in_theta():
    thetas = np.linspace(0.0, 5.0, 30)
    for m in (ideal_gas(), power_gas(mu=1, lam=0, r=1.5, q=2, A=0.3, gamma=1.4)):
        p = pressure(m, 2.0, thetas)
        e = internal_energy(m, 2.0, thetas)
        assert np.all(np.diff(p) >= 0)
        assert np.all(np.diff(e) >= 0)


def test_vacuum_compatibility():
    for m in (ideal_gas(), power_gas(mu=1, lam=0, r=1, q=2, A=2, gamma=3)):
        assert pressure(m, 0.0, 4.0) == 0.0
        assert internal_energy(m, 0.0, 0.0) == 0.0


def test_conductivity_ratio_is_constant():
    m = ideal_gas(kappa0=2.5, q=1.5)
    thetas = np.linspace(0.0, 50.0, 40)
    ratio = conductivity(m, thetas) / (1.0 + thetas ** m.q)
    assert np.allclose(ratio, 2.5, rtol=1e-14)
