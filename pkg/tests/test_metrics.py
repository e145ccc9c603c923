"""Unit conversions, noise budget, SE and EE."""

import numpy as np
import pytest

from arisim.metrics import (
    LinkBudget,
    dbm_to_watt,
    energy_efficiency,
    noise_power_w,
    spectral_efficiency,
    watt_to_dbm,
)


def test_noise_power_unit_bandwidth():
    budget = LinkBudget(bandwidth_hz=1.0, noise_figure_db=0.0)
    assert budget.noise_power_dbm == pytest.approx(-174.0, abs=1e-12)


def test_noise_power_defaults():
    budget = LinkBudget()
    assert budget.bandwidth_hz == 2.4e9
    assert budget.noise_figure_db == 12.0
    # -174 + 10 log10(2.4e9) + 12
    assert budget.noise_power_dbm == pytest.approx(-68.198, abs=1e-3)
    assert budget.noise_power_dbm == pytest.approx(-68.19788758288394, abs=1e-9)
    assert noise_power_w(budget) == pytest.approx(
        10 ** ((budget.noise_power_dbm - 30) / 10), rel=1e-12
    )


def test_noise_power_rejects_bad_bandwidth():
    with pytest.raises(ValueError):
        LinkBudget(bandwidth_hz=0.0)


def test_dbm_watt_roundtrip():
    p_dbm = np.linspace(-100.0, 40.0, 141)
    back = watt_to_dbm(dbm_to_watt(p_dbm))
    np.testing.assert_allclose(back, p_dbm, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("sinr,se", [(0.0, 0.0), (1.0, 1.0), (3.0, 2.0), (15.0, 4.0)])
def test_spectral_efficiency_values(sinr, se):
    assert spectral_efficiency(sinr) == pytest.approx(se, abs=1e-12)


def test_spectral_efficiency_rejects_negative():
    with pytest.raises(ValueError):
        spectral_efficiency(-0.5)


def test_energy_efficiency_values():
    assert energy_efficiency(1.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert energy_efficiency(1.0, 2.0, 1.0) == pytest.approx(2.0, abs=1e-12)  # linear in B


def test_energy_efficiency_rejects_zero_power():
    with pytest.raises(ValueError):
        energy_efficiency(1.0, 1.0, 0.0)


def test_se_ee_consistency_identity():
    rng = np.random.default_rng(0)
    sinr = rng.uniform(0.0, 100.0, 1000)
    p = rng.uniform(1e-8, 10.0, 1000)
    b = 2.4e9
    ee = energy_efficiency(sinr, b, p)
    se = spectral_efficiency(sinr)
    np.testing.assert_allclose(ee * p / b, se, rtol=1e-12)


def test_ee_decreasing_once_sinr_linear_in_power():
    # with SINR = c P, EE = B log2(1 + c P) / P falls for P above 1/c
    c = 50.0
    p = np.linspace(1.5 / c, 100 / c, 200)
    ee = energy_efficiency(c * p, 1e6, p)
    assert np.all(np.diff(ee) < 0)
