"""Seeded trial ensembles: average rates, outage, and element sweeps.

Determinism contract: trial t draws from an rng stream derived as
SeedSequence(entropy=master_seed, spawn_key=(t,)), so every output number
is fixed by (seed, config) and independent of worker count or scheduling.
Reductions run in trial-index order on stacked arrays.

Comparative claims (CoMP vs non-CoMP, RIS vs no RIS, element counts) are
evaluated on identical channel draws: calls with the same plan regenerate
the same ensemble, and element sweeps slice prefixes of one draw, so the
comparisons are paired at the trial level.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelRealization,
    Geometry,
    PathLossParams,
    RicianParams,
    realize_channels,
)
from .metrics import LinkBudget, dbm_to_watt, noise_power_w
from .noma import CombinedChannels, PowerAllocation, RateReport, combine_channels, rates
from .ris import balanced_assignment, configure_for_cluster


@dataclass
class TrialPlan:
    trials: int = 10_000
    master_seed: int = 1234
    power_sweep_dbm: list = field(default_factory=lambda: list(range(-45, 1, 5)))
    element_counts: list = field(default_factory=lambda: list(range(0, 71, 10)))
    threshold_far: float = 1.0  # linear SINR outage threshold for the far user
    threshold_near: float = 1.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.power_sweep_dbm or not self.element_counts:
            raise ValueError("sweep lists must be non-empty")
        if self.threshold_far < 0 or self.threshold_near < 0:
            raise ValueError("outage thresholds must be non-negative")


@dataclass
class Scenario:
    """Everything but the trial plan: topology, fading, power, RIS, noise."""

    geometry: Geometry = field(default_factory=Geometry)
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    rician: RicianParams = field(default_factory=RicianParams)
    pa: PowerAllocation = field(default_factory=lambda: PowerAllocation(p_tx_dbm=-10.0))
    budget: LinkBudget = field(default_factory=LinkBudget)
    m_elements: int = 70
    quant_bits: int = 9
    assignment: np.ndarray | None = None  # per-element cell index, default balanced
    serving_cell: int = 0  # far-user association in non-CoMP mode

    def __post_init__(self):
        if self.m_elements < 0:
            raise ValueError("m_elements must be non-negative")
        if self.assignment is None:
            self.assignment = balanced_assignment(self.m_elements)
        self.assignment = np.asarray(self.assignment, dtype=int)
        if self.assignment.shape != (self.m_elements,):
            raise ValueError("assignment must list one cell index per element")

    @property
    def noise_w(self) -> float:
        return noise_power_w(self.budget)


@dataclass
class EnsembleResult:
    """Per-sweep-point estimates. Keys: near_1, near_2, far, sum, and for
    outage also far_noncomp / far_noris style variants."""

    sweep_name: str
    sweep: np.ndarray
    rate_mean: dict = field(default_factory=dict)
    rate_stderr: dict = field(default_factory=dict)
    outage: dict = field(default_factory=dict)
    outage_lo: dict = field(default_factory=dict)
    outage_hi: dict = field(default_factory=dict)
    se: np.ndarray | None = None
    ee: np.ndarray | None = None


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,)))


def _realize_chunk(args) -> ChannelRealization:
    scenario, master_seed, start, stop = args
    draws = [
        realize_channels(
            scenario.geometry,
            scenario.path_loss,
            scenario.rician,
            scenario.m_elements,
            trial_rng(master_seed, t),
        )
        for t in range(start, stop)
    ]
    return ChannelRealization(
        direct_near=np.stack([d.direct_near for d in draws]),
        direct_far=np.stack([d.direct_far for d in draws]),
        interference=np.stack([d.interference for d in draws]),
        bs_to_ris=np.stack([d.bs_to_ris for d in draws]),
        ris_to_user=np.stack([d.ris_to_user for d in draws]),
    )


def generate_ensemble(
    scenario: Scenario, trials: int, master_seed: int, workers: int = 1
) -> ChannelRealization:
    """Stack `trials` independent realizations (trial axis first).

    The result is bit-identical for any worker count: chunks cover
    contiguous trial ranges and are concatenated in order, and each trial
    owns its own counter-derived rng stream.
    """
    if workers <= 1 or trials < 2 * workers:
        return _realize_chunk((scenario, master_seed, 0, trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    jobs = [
        (scenario, master_seed, int(a), int(b))
        for a, b in zip(bounds[:-1], bounds[1:])
        if b > a
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_realize_chunk, jobs))
    return ChannelRealization(
        direct_near=np.concatenate([c.direct_near for c in chunks]),
        direct_far=np.concatenate([c.direct_far for c in chunks]),
        interference=np.concatenate([c.interference for c in chunks]),
        bs_to_ris=np.concatenate([c.bs_to_ris for c in chunks]),
        ris_to_user=np.concatenate([c.ris_to_user for c in chunks]),
    )


def combined_for_elements(
    ensemble: ChannelRealization, scenario: Scenario, m: int | None = None
) -> CombinedChannels:
    """Configure the first m elements for the far user and combine.

    m = 0 is the no-RIS baseline on the same draws. The default balanced
    assignment alternates cells, so prefixes stay balanced and element
    sweeps are paired trial by trial.
    """
    if m is None:
        m = scenario.m_elements
    if m > ensemble.m_elements:
        raise ValueError(f"requested {m} elements, ensemble holds {ensemble.m_elements}")
    sliced = ChannelRealization(
        direct_near=ensemble.direct_near,
        direct_far=ensemble.direct_far,
        interference=ensemble.interference,
        bs_to_ris=ensemble.bs_to_ris[..., :m],
        ris_to_user=ensemble.ris_to_user[..., :m],
    )
    ris = configure_for_cluster(sliced, scenario.assignment[:m], scenario.quant_bits)
    return combine_channels(sliced, ris)


def _mean_stderr(x: np.ndarray):
    n = x.shape[0]
    mean = float(np.mean(x))
    stderr = float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


def wilson_interval(successes: int, n: int, z: float = 1.96):
    """95% Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = successes / n
    denom = 1.0 + z**2 / n
    centre = (p + z**2 / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def near_outage_events(report: RateReport, plan: TrialPlan, cell: int) -> np.ndarray:
    """Outage indicator: SIC stage fails, or SIC succeeds but own rate fails."""
    z_dec = report.sinr_near_decoding_far[..., cell]
    z_own = report.sinr_near[..., cell]
    return (z_dec < plan.threshold_far) | (
        (z_dec > plan.threshold_far) & (z_own < plan.threshold_near)
    )


def far_outage_events(report: RateReport, plan: TrialPlan) -> np.ndarray:
    return report.sinr_far < plan.threshold_far


def _report_at(combined, scenario, plan, p_dbm, mode="comp") -> RateReport:
    pa = scenario.pa.with_power(p_dbm)
    return rates(combined, pa, scenario.noise_w, mode=mode, serving_cell=scenario.serving_cell)


def estimate_rates(plan: TrialPlan, scenario: Scenario, workers: int = 1) -> EnsembleResult:
    """Mean rates with standard errors over the power sweep (CoMP mode)."""
    ens = generate_ensemble(scenario, plan.trials, plan.master_seed, workers)
    combined = combined_for_elements(ens, scenario)
    result = EnsembleResult("p_dbm", np.asarray(plan.power_sweep_dbm, float))
    series = {"near_1": [], "near_2": [], "far": [], "sum": []}
    errs = {k: [] for k in series}
    for p in plan.power_sweep_dbm:
        report = _report_at(combined, scenario, plan, p)
        for key, values in (
            ("near_1", report.rate_near[..., 0]),
            ("near_2", report.rate_near[..., 1]),
            ("far", report.rate_far),
            ("sum", report.sum),
        ):
            m, s = _mean_stderr(values)
            series[key].append(m)
            errs[key].append(s)
    result.rate_mean = {k: np.array(v) for k, v in series.items()}
    result.rate_stderr = {k: np.array(v) for k, v in errs.items()}
    return result


def _outage_curve(events_per_power) -> tuple:
    prob, lo, hi = [], [], []
    for ev in events_per_power:
        n = ev.shape[0]
        k = int(np.sum(ev))
        prob.append(k / n)
        wl, wh = wilson_interval(k, n)
        lo.append(wl)
        hi.append(wh)
    return np.array(prob), np.array(lo), np.array(hi)


def estimate_outage_near(
    plan: TrialPlan, scenario: Scenario, cell: int, workers: int = 1
) -> EnsembleResult:
    ens = generate_ensemble(scenario, plan.trials, plan.master_seed, workers)
    combined = combined_for_elements(ens, scenario)
    events = [
        near_outage_events(_report_at(combined, scenario, plan, p), plan, cell)
        for p in plan.power_sweep_dbm
    ]
    key = f"near_{cell + 1}"
    result = EnsembleResult("p_dbm", np.asarray(plan.power_sweep_dbm, float))
    result.outage[key], result.outage_lo[key], result.outage_hi[key] = _outage_curve(events)
    return result


def estimate_outage_far(
    plan: TrialPlan,
    scenario: Scenario,
    mode: str = "comp",
    with_ris: bool = True,
    workers: int = 1,
) -> EnsembleResult:
    ens = generate_ensemble(scenario, plan.trials, plan.master_seed, workers)
    combined = combined_for_elements(ens, scenario, m=scenario.m_elements if with_ris else 0)
    events = [
        far_outage_events(_report_at(combined, scenario, plan, p, mode=mode), plan)
        for p in plan.power_sweep_dbm
    ]
    key = "far" if mode == "comp" else "far_noncomp"
    if not with_ris:
        key += "_noris"
    result = EnsembleResult("p_dbm", np.asarray(plan.power_sweep_dbm, float))
    result.outage[key], result.outage_lo[key], result.outage_hi[key] = _outage_curve(events)
    return result


def outage_vs_power(plan: TrialPlan, scenario: Scenario, workers: int = 1) -> EnsembleResult:
    """All outage curves for the default figure set, on one shared ensemble."""
    ens = generate_ensemble(scenario, plan.trials, plan.master_seed, workers)
    combined = combined_for_elements(ens, scenario)
    baseline = combined_for_elements(ens, scenario, m=0)
    result = EnsembleResult("p_dbm", np.asarray(plan.power_sweep_dbm, float))
    curves = {
        "near_1": [near_outage_events(_report_at(combined, scenario, plan, p), plan, 0)
                   for p in plan.power_sweep_dbm],
        "near_2": [near_outage_events(_report_at(combined, scenario, plan, p), plan, 1)
                   for p in plan.power_sweep_dbm],
        "far": [far_outage_events(_report_at(combined, scenario, plan, p), plan)
                for p in plan.power_sweep_dbm],
        "far_noncomp": [
            far_outage_events(_report_at(combined, scenario, plan, p, mode="noncomp"), plan)
            for p in plan.power_sweep_dbm
        ],
        "far_noris": [far_outage_events(_report_at(baseline, scenario, plan, p), plan)
                      for p in plan.power_sweep_dbm],
    }
    for key, events in curves.items():
        result.outage[key], result.outage_lo[key], result.outage_hi[key] = _outage_curve(events)
    return result


def sweep_elements(plan: TrialPlan, scenario: Scenario, workers: int = 1) -> EnsembleResult:
    """Mean network sum rate vs element count at the scenario's fixed power."""
    counts = sorted(plan.element_counts)
    top = Scenario(
        geometry=scenario.geometry,
        path_loss=scenario.path_loss,
        rician=scenario.rician,
        pa=scenario.pa,
        budget=scenario.budget,
        m_elements=max(counts),
        quant_bits=scenario.quant_bits,
        serving_cell=scenario.serving_cell,
    )
    ens = generate_ensemble(top, plan.trials, plan.master_seed, workers)
    p_dbm = float(scenario.pa.p_tx_dbm[0])
    result = EnsembleResult("m_elements", np.asarray(counts, float))
    means, errs = [], []
    for m in counts:
        combined = combined_for_elements(ens, top, m=m)
        report = _report_at(combined, top, plan, p_dbm)
        mu, se = _mean_stderr(report.sum)
        means.append(mu)
        errs.append(se)
    result.rate_mean["sum"] = np.array(means)
    result.rate_stderr["sum"] = np.array(errs)
    return result


def se_ee_curve(plan: TrialPlan, scenario: Scenario, workers: int = 1) -> EnsembleResult:
    """Network SE (mean sum rate) and EE = B * SE / (total transmit power)."""
    result = estimate_rates(plan, scenario, workers)
    p_total_w = 2.0 * dbm_to_watt(result.sweep)
    result.se = result.rate_mean["sum"]
    result.ee = scenario.budget.bandwidth_hz * result.se / p_total_w
    return result
