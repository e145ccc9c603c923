"""RIS phase-shift state: optimal per-element phases, quantization, BS split.

Every element applies a unit-amplitude shift e^{j*theta}. Elements are
partitioned among the two BSs; an element assigned to cell c is phased so
its cascade through that BS aligns with the cell's direct link to the far
user, then quantized to the configured bit width.
"""

from dataclasses import dataclass, field

import numpy as np

from .channel import FAR, ChannelRealization

TWO_PI = 2.0 * np.pi


@dataclass
class RisConfig:
    """Per-element phases (radians, [0, 2pi)), BS assignment, bit width."""

    phases: np.ndarray
    assignment: np.ndarray  # per element, cell index 0 or 1
    quant_bits: int = 9

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        self.assignment = np.asarray(self.assignment, dtype=int)
        if self.quant_bits < 1:
            raise ValueError(f"quant_bits must be >= 1, got {self.quant_bits}")
        if self.assignment.shape[-1] != self.phases.shape[-1]:
            raise ValueError("assignment and phases disagree on element count")
        if self.assignment.size and not np.all(np.isin(self.assignment, (0, 1))):
            raise ValueError("assignment entries must be cell indices 0 or 1")
        if self.phases.size and (np.any(self.phases < 0) or np.any(self.phases >= TWO_PI)):
            raise ValueError("phases must lie in [0, 2pi)")

    @property
    def m_elements(self) -> int:
        return self.phases.shape[-1]

    def elements_of(self, cell: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cell)


@dataclass
class QuantizedPhase:
    index: int
    bits: np.ndarray  # MSB first, length = bit width


def balanced_assignment(m: int) -> np.ndarray:
    """Alternating element-to-BS split; prefixes stay balanced as m grows."""
    return np.arange(m) % 2


def optimal_phase(direct, bs_to_ris_m, ris_to_user_m):
    """Phase aligning one element's cascade with the direct link.

    theta = mod(arg(direct) - arg(bs_to_ris) - arg(ris_to_user), 2pi), so the
    rotated cascade contribution is in phase with the direct gain and the
    two magnitudes add coherently. arg(0) is taken as 0. Broadcasts.
    """
    theta = (
        np.angle(np.asarray(direct))
        - np.angle(np.asarray(bs_to_ris_m))
        - np.angle(np.asarray(ris_to_user_m))
    )
    return np.mod(theta, TWO_PI)


def quantize_index(theta, bits: int):
    """Nearest of the 2^bits uniform levels; returns integer index array."""
    if bits < 1:
        raise ValueError(f"bit width must be >= 1, got {bits}")
    levels = 1 << bits
    theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.round(theta * levels / TWO_PI).astype(np.int64) % levels


def dequantize_index(index, bits: int):
    """Level index -> phase 2pi * index / 2^bits."""
    levels = 1 << bits
    index = np.asarray(index)
    if np.any(index < 0) or np.any(index >= levels):
        raise ValueError(f"index out of range for {bits} bits")
    return index * TWO_PI / levels


def index_to_bits(index: int, bits: int) -> np.ndarray:
    if not 0 <= index < (1 << bits):
        raise ValueError(f"index {index} out of range for {bits} bits")
    return np.array([(index >> (bits - 1 - k)) & 1 for k in range(bits)], dtype=np.uint8)


def bits_to_index(bit_vector) -> int:
    index = 0
    for b in np.asarray(bit_vector).astype(int):
        if b not in (0, 1):
            raise ValueError("bit vector entries must be 0 or 1")
        index = (index << 1) | b
    return index


def quantize(theta: float, bits: int) -> QuantizedPhase:
    idx = int(quantize_index(theta, bits))
    return QuantizedPhase(index=idx, bits=index_to_bits(idx, bits))


def dequantize(q, bits: int) -> float:
    index = q.index if isinstance(q, QuantizedPhase) else q
    return float(dequantize_index(index, bits))


def configure_for_cluster(
    realization: ChannelRealization, assignment, quant_bits: int = 9
) -> RisConfig:
    """Phase every element for the far user through its assigned BS.

    The far user is the alignment target for all elements; near users see
    the resulting reflections unoptimized. Phases are stored dequantized on
    the 2^quant_bits grid.
    """
    assignment = np.asarray(assignment, dtype=int)
    m = assignment.shape[-1]
    if m != realization.m_elements:
        raise ValueError(
            f"assignment covers {m} elements, realization has {realization.m_elements}"
        )
    if m == 0:
        return RisConfig(np.empty(realization.direct_far.shape[:-1] + (0,)), assignment, quant_bits)
    direct = realization.direct_far[..., assignment]  # (..., m) serving-BS far link
    cascade_bs = _gather_bs(realization.bs_to_ris, assignment)
    theta = optimal_phase(direct, cascade_bs, realization.ris_to_user[..., FAR, :])
    phases = dequantize_index(quantize_index(theta, quant_bits), quant_bits)
    return RisConfig(phases, assignment, quant_bits)


def _gather_bs(bs_to_ris: np.ndarray, assignment: np.ndarray) -> np.ndarray:
    """Select bs_to_ris[..., assignment[m], m] for each element m."""
    m = assignment.shape[-1]
    idx = np.broadcast_to(assignment, bs_to_ris.shape[:-2] + (m,))
    return np.take_along_axis(bs_to_ris, idx[..., None, :], axis=-2)[..., 0, :]
