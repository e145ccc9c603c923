"""Power-unit conversions, noise power, and spectral/energy efficiency."""

from dataclasses import dataclass

import numpy as np


def dbm_to_watt(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(p_w):
    return 10.0 * np.log10(np.asarray(p_w, dtype=float)) + 30.0


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass
class LinkBudget:
    """Thermal-noise budget: sigma^2 = -174 + 10*log10(B) + NF dBm."""

    bandwidth_hz: float = 2.4e9
    noise_figure_db: float = 12.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")

    @property
    def noise_power_dbm(self) -> float:
        return -174.0 + 10.0 * np.log10(self.bandwidth_hz) + self.noise_figure_db


def noise_power_w(budget: LinkBudget) -> float:
    """AWGN power in watts for the given budget."""
    return float(dbm_to_watt(budget.noise_power_dbm))


def spectral_efficiency(sinr_linear):
    """SE = log2(1 + SINR) in bit/s/Hz."""
    sinr = np.asarray(sinr_linear, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("SINR must be non-negative")
    return np.log2(1.0 + sinr)


def energy_efficiency(sinr_linear, bandwidth_hz, p_tx_w):
    """EE = B * log2(1 + SINR) / P in bit/Joule.

    Undefined at zero transmit power; callers sweep from finite power up.
    """
    p = np.asarray(p_tx_w, dtype=float)
    if np.any(p <= 0):
        raise ValueError("transmit power must be positive")
    return bandwidth_hz * spectral_efficiency(sinr_linear) / p
