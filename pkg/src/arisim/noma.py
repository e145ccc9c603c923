"""Combined channels, SINRs, and rates for the coordinated NOMA cluster.

Two near users (one per cell) and one shared far user. Near users run SIC:
they first decode the far user's message, subtract it, then decode their
own. The far user is served by both BSs; in CoMP mode the received powers
add (non-coherent joint transmission), in non-CoMP mode one BS serves it
and the other is pure interference.

All formulas evaluate in linear watts; dBm appears only at configuration
boundaries. Everything broadcasts over leading trial axes.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import FAR, ChannelRealization
from .metrics import dbm_to_watt
from .ris import RisConfig


@dataclass
class PowerAllocation:
    """Per-cell NOMA coefficients and transmit powers.

    gamma_near + gamma_far <= 1 per cell, with gamma_near < 0.5 and
    0.5 < gamma_far < 1 so the near user can decode and cancel the far
    user's higher-power message.
    """

    gamma_near: np.ndarray = field(default_factory=lambda: np.array([0.2, 0.2]))
    gamma_far: np.ndarray = field(default_factory=lambda: np.array([0.8, 0.8]))
    p_tx_dbm: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0]))

    def __post_init__(self):
        self.gamma_near = np.broadcast_to(np.asarray(self.gamma_near, float), (2,)).copy()
        self.gamma_far = np.broadcast_to(np.asarray(self.gamma_far, float), (2,)).copy()
        self.p_tx_dbm = np.broadcast_to(np.asarray(self.p_tx_dbm, float), (2,)).copy()
        if np.any(self.gamma_near + self.gamma_far > 1.0 + 1e-12):
            raise ValueError("gamma_near + gamma_far must not exceed 1 per cell")
        if np.any(self.gamma_near >= 0.5):
            raise ValueError("gamma_near must be < 0.5")
        if np.any(self.gamma_far <= 0.5) or np.any(self.gamma_far >= 1.0):
            raise ValueError("gamma_far must lie in (0.5, 1)")

    @property
    def p_tx_w(self) -> np.ndarray:
        return dbm_to_watt(self.p_tx_dbm)

    def with_power(self, p_dbm: float) -> "PowerAllocation":
        return PowerAllocation(self.gamma_near, self.gamma_far, np.array([p_dbm, p_dbm]))


@dataclass
class CombinedChannels:
    """Direct-plus-cascade gains seen by each user.

    h_near[c] and h_far[c] are the combined gains from BS c using the
    elements assigned to that cell (dequantized phases). ici[c] is the
    direct interfering gain from BS c to the foreign near user.
    """

    h_near: np.ndarray  # (..., 2)
    h_far: np.ndarray  # (..., 2)
    ici: np.ndarray  # (..., 2)


@dataclass
class RateReport:
    sinr_near: np.ndarray  # (..., 2) post-SIC own-message SINR
    sinr_near_decoding_far: np.ndarray  # (..., 2)
    sinr_far: np.ndarray  # (...,)
    rate_near: np.ndarray
    rate_near_decoding_far: np.ndarray
    rate_far: np.ndarray
    sum: np.ndarray


def combine_channels(realization: ChannelRealization, ris: RisConfig) -> CombinedChannels:
    """H = direct + sum over assigned elements of e^{j theta} * cascade."""
    if ris.m_elements != realization.m_elements:
        raise ValueError(
            f"RIS config has {ris.m_elements} elements, realization has "
            f"{realization.m_elements}"
        )
    shift = np.exp(1j * ris.phases)
    h_near = realization.direct_near.astype(complex).copy()
    h_far = realization.direct_far.astype(complex).copy()
    for c in (0, 1):
        sel = ris.elements_of(c)
        if sel.size == 0:
            continue
        casc_far = realization.bs_to_ris[..., c, sel] * realization.ris_to_user[..., FAR, sel]
        casc_near = realization.bs_to_ris[..., c, sel] * realization.ris_to_user[..., c, sel]
        h_far[..., c] += np.sum(shift[..., sel] * casc_far, axis=-1)
        h_near[..., c] += np.sum(shift[..., sel] * casc_near, axis=-1)
    return CombinedChannels(h_near=h_near, h_far=h_far, ici=realization.interference.astype(complex))


def _powers(channels: CombinedChannels, pa: PowerAllocation):
    p = pa.p_tx_w
    s_near = p * np.abs(channels.h_near) ** 2  # (..., 2)
    s_far = p * np.abs(channels.h_far) ** 2
    s_ici = p * np.abs(channels.ici) ** 2
    return s_near, s_far, s_ici


def sinr_near_decoding_far(
    channels: CombinedChannels, pa: PowerAllocation, noise_w: float, cell: int
):
    """SIC first stage: near user of `cell` decoding the far user's message."""
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    s_near, _, s_ici = _powers(channels, pa)
    other = 1 - cell
    num = pa.gamma_far[cell] * s_near[..., cell]
    den = pa.gamma_near[cell] * s_near[..., cell] + s_ici[..., other] + noise_w
    return num / den


def sinr_near_own(channels: CombinedChannels, pa: PowerAllocation, noise_w: float, cell: int):
    """Near user's own-message SINR after subtracting the far user's signal."""
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    s_near, _, s_ici = _powers(channels, pa)
    other = 1 - cell
    return pa.gamma_near[cell] * s_near[..., cell] / (s_ici[..., other] + noise_w)


def sinr_far_comp(channels: CombinedChannels, pa: PowerAllocation, noise_w: float):
    """Non-coherent JT-CoMP: received far-user powers from both BSs add."""
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    _, s_far, _ = _powers(channels, pa)
    num = pa.gamma_far[0] * s_far[..., 0] + pa.gamma_far[1] * s_far[..., 1]
    den = pa.gamma_near[0] * s_far[..., 0] + pa.gamma_near[1] * s_far[..., 1] + noise_w
    return num / den


def sinr_far_noncomp(
    channels: CombinedChannels, pa: PowerAllocation, noise_w: float, serving_cell: int
):
    """Single-cell baseline: the foreign BS's full power is interference."""
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    _, s_far, _ = _powers(channels, pa)
    other = 1 - serving_cell
    num = pa.gamma_far[serving_cell] * s_far[..., serving_cell]
    den = pa.gamma_near[serving_cell] * s_far[..., serving_cell] + s_far[..., other] + noise_w
    return num / den


def rates(
    channels: CombinedChannels,
    pa: PowerAllocation,
    noise_w: float,
    mode: str = "comp",
    serving_cell: int = 0,
) -> RateReport:
    """Achievable rates log2(1 + SINR) for every user plus the network sum."""
    if mode not in ("comp", "noncomp"):
        raise ValueError(f"mode must be 'comp' or 'noncomp', got {mode!r}")
    z_own = np.stack(
        [sinr_near_own(channels, pa, noise_w, c) for c in (0, 1)], axis=-1
    )
    z_dec = np.stack(
        [sinr_near_decoding_far(channels, pa, noise_w, c) for c in (0, 1)], axis=-1
    )
    if mode == "comp":
        z_far = sinr_far_comp(channels, pa, noise_w)
    else:
        z_far = sinr_far_noncomp(channels, pa, noise_w, serving_cell)
    rate_near = np.log2(1.0 + z_own)
    rate_dec = np.log2(1.0 + z_dec)
    rate_far = np.log2(1.0 + z_far)
    total = rate_near[..., 0] + rate_near[..., 1] + rate_far
    return RateReport(
        sinr_near=z_own,
        sinr_near_decoding_far=z_dec,
        sinr_far=z_far,
        rate_near=rate_near,
        rate_near_decoding_far=rate_dec,
        rate_far=rate_far,
        sum=total,
    )
