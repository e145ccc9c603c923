"""Quantized-phase-shift bit datasets and the noisy feedback channel.

The exported dataset is the training corpus for the learned feedback
compressors: per trial and per RIS element, the optimal phase each user
would ask for is quantized to `quant_bits` and serialized MSB-first, one
row per (user, element). A JSON sidecar pins the bit width, seed, and a
hash of the generating configuration so downstream consumers can detect
config drift.

`feedback_channel` is the reference uplink model those compressors face:
per-symbol Rician fading with LoS weight b = sqrt(K/(K+1)) plus AWGN whose
variance tracks the signal's average energy, reported as the received
envelope |Z|.
"""

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .channel import FAR, USER_TAGS, realize_channels
from .montecarlo import Scenario, trial_rng
from .ris import index_to_bits, optimal_phase, quantize_index

DATASET_VERSION = 1


@dataclass
class FeedbackChannelParams:
    snr_db: float = 10.0
    k_factor: float = 3.0  # linear Rician K
    block_fading: bool = False  # one fading draw per call instead of per symbol

    def __post_init__(self):
        if self.k_factor < 0:
            raise ValueError(f"Rician K must be non-negative, got {self.k_factor}")

    @property
    def los_weight(self) -> float:
        return float(np.sqrt(self.k_factor / (self.k_factor + 1.0)))


@dataclass
class QpsRecord:
    user_tag: str
    element_index: int
    bits: np.ndarray


def feedback_channel(x, params: FeedbackChannelParams, rng: np.random.Generator) -> np.ndarray:
    """Received envelope |Z| = |h * x + n| per component.

    E_avg = max(mean(|x|^2), 1e-8) sets the noise floor, sigma_n^2 =
    E_avg / SNR_linear, with each noise quadrature drawn at variance
    sigma_n^2 / 2. The fading draw order (scatter quadratures, then noise
    quadratures) is fixed for reproducibility.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise ValueError("input symbols must be finite")
    e_avg = max(float(np.mean(x**2)) if x.size else 0.0, 1e-8)
    snr_lin = 10.0 ** (params.snr_db / 10.0)
    sigma_n2 = e_avg / snr_lin

    b = params.los_weight
    scatter_scale = np.sqrt((1.0 - b**2) / 2.0)
    n_fades = 1 if params.block_fading else x.shape[0]
    h_re = b + scatter_scale * rng.standard_normal(n_fades)  # (1,) broadcasts per block
    h_im = scatter_scale * rng.standard_normal(n_fades)

    noise_scale = np.sqrt(sigma_n2 / 2.0)
    z_re = h_re * x + noise_scale * rng.standard_normal(x.shape)
    z_im = h_im * x + noise_scale * rng.standard_normal(x.shape)
    return np.sqrt(z_re**2 + z_im**2)


def _phases_for_user(realization, assignment, user: int) -> np.ndarray:
    """Per-element optimal phase the given user would request.

    Near users align their own direct link through their serving BS for
    every element; the far user aligns per the element-to-BS assignment.
    """
    if user == FAR:
        direct = realization.direct_far[assignment]
        bs = realization.bs_to_ris[assignment, np.arange(assignment.size)]
        return optimal_phase(direct, bs, realization.ris_to_user[FAR])
    return optimal_phase(
        realization.direct_near[user],
        realization.bs_to_ris[user],
        realization.ris_to_user[user],
    )


def scenario_hash(scenario: Scenario) -> str:
    blob = json.dumps(
        {
            "geometry": {
                "bs": scenario.geometry.bs_positions.tolist(),
                "ris": scenario.geometry.ris_position.tolist(),
                "near": scenario.geometry.near_user_positions.tolist(),
                "far": scenario.geometry.far_user_position.tolist(),
            },
            "path_loss": {
                "reference_loss_db": scenario.path_loss.reference_loss_db,
                "exponents": scenario.path_loss.exponents,
            },
            "rician": scenario.rician.k_factor_db,
            "m_elements": scenario.m_elements,
            "quant_bits": scenario.quant_bits,
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def export_dataset(scenario: Scenario, trials: int, seed: int, path) -> int:
    """Write the QPS bit dataset as CSV plus a `<path>.meta.json` sidecar.

    Returns the number of data rows written (trials * elements * 3 users).
    Byte-identical for identical (scenario, trials, seed).
    """
    bits = scenario.quant_bits
    m = scenario.m_elements
    header = "user,element," + ",".join(f"b{k}" for k in range(bits))
    rows = 0
    counts = dict.fromkeys(USER_TAGS, 0)
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(header + "\n")
            for t in range(trials):
                rng = trial_rng(seed, t)
                real = realize_channels(
                    scenario.geometry, scenario.path_loss, scenario.rician, m, rng
                )
                for user, tag in enumerate(USER_TAGS):
                    theta = _phases_for_user(real, scenario.assignment, user)
                    indices = quantize_index(theta, bits)
                    for el, idx in enumerate(indices):
                        bit_str = ",".join(str(b) for b in index_to_bits(int(idx), bits))
                        fh.write(f"{tag},{el},{bit_str}\n")
                        rows += 1
                        counts[tag] += 1
        sidecar = {
            "dataset_version": DATASET_VERSION,
            "quant_bits": bits,
            "seed": seed,
            "trials": trials,
            "m_elements": m,
            "records_per_tag": counts,
            "config_hash": scenario_hash(scenario),
        }
        with open(str(path) + ".meta.json", "w", encoding="ascii") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed writing QPS dataset to {path}: {exc}") from exc
    return rows
