"""Channel layers between encoder and decoder.

Training uses the constant-coefficient AWGN path q * z + n. Evaluation
passes the latent code through the full feedback model: per-symbol Rician
fading with LoS weight b = sqrt(K/(K+1)), AWGN at sigma_n^2 =
E_avg / SNR_linear split across quadratures, and envelope detection
|Z| = sqrt(Z_re^2 + Z_im^2). The envelope layer mirrors the reference
feedback-channel oracle in the simulator package and is moment-checked
against it in the tests.
"""

from dataclasses import dataclass

import torch

ENERGY_FLOOR = 1e-8


@dataclass
class ChannelParams:
    snr_db: float = 40.0
    k_factor: float = 3.0  # linear Rician K, evaluation path only
    q: float = 1.0  # constant training-path coefficient
    snr_range_db: tuple | None = None  # optional per-batch uniform SNR draw

    def __post_init__(self):
        if self.k_factor < 0:
            raise ValueError("Rician K must be non-negative")

    @property
    def los_weight(self) -> float:
        return float(torch.sqrt(torch.tensor(self.k_factor / (self.k_factor + 1.0))))


def _noise_sigma2(z: torch.Tensor, snr_db: torch.Tensor | float) -> torch.Tensor:
    e_avg = z.pow(2).mean(dim=-1, keepdim=True).clamp_min(ENERGY_FLOOR)
    snr_lin = 10.0 ** (torch.as_tensor(snr_db, dtype=z.dtype) / 10.0)
    return e_avg / snr_lin


def awgn_train(z: torch.Tensor, params: ChannelParams, generator=None) -> torch.Tensor:
    """q * z + AWGN at the training SNR (optionally drawn per batch)."""
    snr = params.snr_db
    if params.snr_range_db is not None:
        lo, hi = params.snr_range_db
        snr = lo + (hi - lo) * float(torch.rand((), generator=generator))
    sigma2 = _noise_sigma2(z, snr)
    noise = torch.randn(z.shape, generator=generator, dtype=z.dtype)
    return params.q * z + sigma2.sqrt() * noise


def envelope(z: torch.Tensor, snr_db: float, params: ChannelParams, generator=None) -> torch.Tensor:
    """Received envelope |h z + n| per symbol, h Rician with weight b.

    E_avg is taken per row: each row is one feedback transmission.
    """
    sigma2 = _noise_sigma2(z, snr_db)
    b = params.los_weight
    scatter = ((1.0 - b * b) / 2.0) ** 0.5
    h_re = b + scatter * torch.randn(z.shape, generator=generator, dtype=z.dtype)
    h_im = scatter * torch.randn(z.shape, generator=generator, dtype=z.dtype)
    noise_scale = (sigma2 / 2.0).sqrt()
    z_re = h_re * z + noise_scale * torch.randn(z.shape, generator=generator, dtype=z.dtype)
    z_im = h_im * z + noise_scale * torch.randn(z.shape, generator=generator, dtype=z.dtype)
    return torch.sqrt(z_re.pow(2) + z_im.pow(2))
