"""Link-level Monte Carlo simulator for a two-cell aerial-RIS CoMP-NOMA downlink."""

__version__ = "0.1.0"

from .channel import (
    ChannelRealization,
    Geometry,
    PathLossParams,
    RicianParams,
    draw_rayleigh,
    draw_rician,
    path_loss_linear,
    realize_channels,
)
from .feedback import FeedbackChannelParams, export_dataset, feedback_channel
from .metrics import LinkBudget, energy_efficiency, noise_power_w, spectral_efficiency
from .montecarlo import EnsembleResult, Scenario, TrialPlan
from .noma import CombinedChannels, PowerAllocation, RateReport, combine_channels, rates
from .optimizer import SearchResult, SearchSpace, optimize_pa, optimize_split
from .ris import QuantizedPhase, RisConfig, configure_for_cluster, dequantize, optimal_phase, quantize

__all__ = [
    "ChannelRealization",
    "CombinedChannels",
    "EnsembleResult",
    "FeedbackChannelParams",
    "Geometry",
    "LinkBudget",
    "PathLossParams",
    "PowerAllocation",
    "QuantizedPhase",
    "RateReport",
    "RicianParams",
    "RisConfig",
    "Scenario",
    "SearchResult",
    "SearchSpace",
    "TrialPlan",
    "combine_channels",
    "configure_for_cluster",
    "dequantize",
    "draw_rayleigh",
    "draw_rician",
    "energy_efficiency",
    "export_dataset",
    "feedback_channel",
    "noise_power_w",
    "optimal_phase",
    "optimize_pa",
    "optimize_split",
    "path_loss_linear",
    "quantize",
    "rates",
    "realize_channels",
    "spectral_efficiency",
]
