"""Exhaustive searches for power-allocation factors and RIS element splits.

Both searches score candidates by the expected network sum rate on one
shared trial ensemble (common random numbers), so candidate comparisons
are paired and deterministic given the seed.
"""

from dataclasses import dataclass, field

import numpy as np

from .montecarlo import Scenario, TrialPlan, combined_for_elements, generate_ensemble
from .noma import PowerAllocation, rates


def default_gamma_far_grid() -> list:
    """0.51 .. 0.95 in 0.05 steps, plus the 0.8 operating point."""
    grid = {round(0.51 + 0.05 * k, 2) for k in range(9)}
    grid |= {0.8, 0.95}
    return sorted(grid)


@dataclass
class SearchSpace:
    gamma_far_grid: list = field(default_factory=default_gamma_far_grid)
    split_candidates: list | None = None  # (m1, m2) pairs; default all partitions
    min_rate_far: float = 0.0
    min_rate_near: float = 0.0

    def __post_init__(self):
        for g in self.gamma_far_grid:
            if not 0.5 < g < 1.0:
                raise ValueError(f"gamma_far candidates must lie in (0.5, 1), got {g}")

    def splits_for(self, m: int) -> list:
        if self.split_candidates is not None:
            for m1, m2 in self.split_candidates:
                if m1 < 0 or m2 < 0 or m1 + m2 > m:
                    raise ValueError(f"split ({m1}, {m2}) exceeds the {m}-element budget")
            return list(self.split_candidates)
        return [(m1, m - m1) for m1 in range(m + 1)]


@dataclass
class SearchResult:
    best_pa: PowerAllocation
    best_split: tuple
    objective: float
    feasible: bool
    trace: list  # one dict per candidate, in evaluation order


def _objective(combined, scenario, plan, pa) -> dict:
    report = rates(combined, pa, scenario.noise_w, mode="comp")
    return {
        "sum_rate": float(np.mean(report.sum)),
        "rate_far": float(np.mean(report.rate_far)),
        "rate_near_1": float(np.mean(report.rate_near[..., 0])),
        "rate_near_2": float(np.mean(report.rate_near[..., 1])),
    }


def _is_feasible(stats: dict, space: SearchSpace) -> bool:
    return (
        stats["rate_far"] >= space.min_rate_far
        and stats["rate_near_1"] >= space.min_rate_near
        and stats["rate_near_2"] >= space.min_rate_near
    )


def optimize_pa(space: SearchSpace, plan: TrialPlan, scenario: Scenario) -> SearchResult:
    """Grid search over gamma_far with gamma_near = 1 - gamma_far.

    Returns the feasible candidate with the largest expected sum rate,
    ties broken toward larger gamma_far. If nothing is feasible the
    unconstrained argmax is returned with feasible=False.
    """
    if not space.gamma_far_grid:
        raise ValueError("gamma_far_grid must be non-empty")
    ens = generate_ensemble(scenario, plan.trials, plan.master_seed)
    combined = combined_for_elements(ens, scenario)
    trace = []
    for g_far in sorted(space.gamma_far_grid):
        pa = PowerAllocation(
            gamma_near=1.0 - g_far, gamma_far=g_far, p_tx_dbm=scenario.pa.p_tx_dbm
        )
        stats = _objective(combined, scenario, plan, pa)
        stats["gamma_far"] = g_far
        stats["feasible"] = _is_feasible(stats, space)
        trace.append(stats)

    def pick(entries):
        best = None
        for e in entries:  # grid iterated in ascending gamma_far order
            if best is None or e["sum_rate"] >= best["sum_rate"]:
                best = e
        return best

    feasible_entries = [e for e in trace if e["feasible"]]
    winner = pick(feasible_entries) if feasible_entries else pick(trace)
    best_pa = PowerAllocation(
        gamma_near=1.0 - winner["gamma_far"],
        gamma_far=winner["gamma_far"],
        p_tx_dbm=scenario.pa.p_tx_dbm,
    )
    return SearchResult(
        best_pa=best_pa,
        best_split=(int(np.sum(scenario.assignment == 0)), int(np.sum(scenario.assignment == 1))),
        objective=winner["sum_rate"],
        feasible=bool(feasible_entries),
        trace=trace,
    )


def optimize_split(space: SearchSpace, plan: TrialPlan, scenario: Scenario) -> SearchResult:
    """Exhaustive search over element splits (m1 to cell 1, m2 to cell 2).

    Elements are taken contiguously from one shared draw so every split is
    scored on the same fading: the first m1 go to cell 1, the next m2 to
    cell 2. Ties break toward the balanced split.
    """
    splits = space.splits_for(scenario.m_elements)
    if not splits:
        raise ValueError("no split candidates")
    ens = generate_ensemble(scenario, plan.trials, plan.master_seed)
    trace = []
    for m1, m2 in splits:
        assignment = np.concatenate([np.zeros(m1, dtype=int), np.ones(m2, dtype=int)])
        sub = Scenario(
            geometry=scenario.geometry,
            path_loss=scenario.path_loss,
            rician=scenario.rician,
            pa=scenario.pa,
            budget=scenario.budget,
            m_elements=m1 + m2,
            quant_bits=scenario.quant_bits,
            assignment=assignment,
            serving_cell=scenario.serving_cell,
        )
        combined = combined_for_elements(ens, sub, m=m1 + m2)
        stats = _objective(combined, sub, plan, scenario.pa)
        stats["split"] = (m1, m2)
        stats["feasible"] = _is_feasible(stats, space)
        trace.append(stats)

    def better(e, best):
        if best is None or e["sum_rate"] > best["sum_rate"]:
            return True
        if e["sum_rate"] == best["sum_rate"]:
            return abs(e["split"][0] - e["split"][1]) < abs(best["split"][0] - best["split"][1])
        return False

    feasible_entries = [e for e in trace if e["feasible"]]
    pool = feasible_entries if feasible_entries else trace
    winner = None
    for e in pool:
        if better(e, winner):
            winner = e
    return SearchResult(
        best_pa=scenario.pa,
        best_split=winner["split"],
        objective=winner["sum_rate"],
        feasible=bool(feasible_entries),
        trace=trace,
    )
