"""Experiment orchestration: config loading, runs, and plot-ready output.

One JSON config document mirrors the module parameter types section by
section; command-line flags override file values. Every run writes a CSV
with a stable header plus a `<out>.manifest.json` recording the seed, the
fully resolved config, its hash, and library versions, so a run can be
reproduced exactly from its manifest.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure.
"""

import argparse
import hashlib
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .channel import Geometry, PathLossParams, RicianParams
from .feedback import export_dataset
from .metrics import LinkBudget
from .montecarlo import (
    Scenario,
    TrialPlan,
    estimate_rates,
    outage_vs_power,
    se_ee_curve,
    sweep_elements,
)
from .noma import PowerAllocation
from .optimizer import SearchSpace, optimize_pa, optimize_split

EXPERIMENTS = (
    "sumrate-vs-elements",
    "rate-vs-power",
    "outage-vs-power",
    "se-ee",
    "pa-sweep",
    "split-search",
    "export-qps",
)


class ConfigError(Exception):
    pass


def default_config() -> dict:
    geometry = Geometry()
    return {
        "geometry": {
            "bs_positions": geometry.bs_positions.tolist(),
            "ris_position": geometry.ris_position.tolist(),
            "near_user_positions": geometry.near_user_positions.tolist(),
            "far_user_position": geometry.far_user_position.tolist(),
        },
        "path_loss": {
            "reference_loss_db": PathLossParams().reference_loss_db,
            "exponents": dict(PathLossParams().exponents),
        },
        "rician": {"k_factor_db": dict(RicianParams().k_factor_db)},
        "power": {"gamma_near": 0.2, "gamma_far": 0.8, "p_tx_dbm": -10.0},
        "budget": {"bandwidth_hz": 2.4e9, "noise_figure_db": 12.0},
        "ris": {
            "m_elements": 70,
            "quant_bits": 9,
            "assignment": None,
            "serving_cell": 0,
            "distinct_profiles": False,
        },
        "plan": {
            "trials": 10_000,
            "master_seed": 1234,
            "power_sweep_dbm": list(range(-45, 1, 5)),
            "element_counts": list(range(0, 71, 10)),
            "threshold_far": 1.0,
            "threshold_near": 1.0,
        },
        "search": {
            "gamma_far_grid": SearchSpace().gamma_far_grid,
            "split_candidates": None,
            "min_rate_far": 0.0,
            "min_rate_near": 0.0,
        },
        "feedback": {"records_per_tag": 100_000},
    }


def _merge(base: dict, override: dict, path: str = "") -> dict:
    merged = dict(base)
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(base[key], dict) and key != "exponents" and key != "k_factor_db":
            if not isinstance(value, dict):
                raise ConfigError(f"{here} must be a section, got {type(value).__name__}")
            merged[key] = _merge(base[key], value, here)
        else:
            merged[key] = value
    return merged


def load_config(path: str | None, overrides: dict | None = None) -> dict:
    cfg = default_config()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config document must be a JSON object")
        cfg = _merge(cfg, file_cfg)
    for dotted, value in (overrides or {}).items():
        section, key = dotted.split(".")
        cfg = _merge(cfg, {section: {key: value}})
    return cfg


def build_scenario(cfg: dict) -> Scenario:
    if cfg["ris"]["distinct_profiles"]:
        raise ConfigError(
            "ris.distinct_profiles=true is not supported; one phase profile "
            "serves both users (see package docs)"
        )
    try:
        return Scenario(
            geometry=Geometry(
                bs_positions=np.array(cfg["geometry"]["bs_positions"]),
                ris_position=np.array(cfg["geometry"]["ris_position"]),
                near_user_positions=np.array(cfg["geometry"]["near_user_positions"]),
                far_user_position=np.array(cfg["geometry"]["far_user_position"]),
            ),
            path_loss=PathLossParams(
                reference_loss_db=cfg["path_loss"]["reference_loss_db"],
                exponents=dict(cfg["path_loss"]["exponents"]),
            ),
            rician=RicianParams(k_factor_db=dict(cfg["rician"]["k_factor_db"])),
            pa=PowerAllocation(
                gamma_near=cfg["power"]["gamma_near"],
                gamma_far=cfg["power"]["gamma_far"],
                p_tx_dbm=cfg["power"]["p_tx_dbm"],
            ),
            budget=LinkBudget(
                bandwidth_hz=cfg["budget"]["bandwidth_hz"],
                noise_figure_db=cfg["budget"]["noise_figure_db"],
            ),
            m_elements=cfg["ris"]["m_elements"],
            quant_bits=cfg["ris"]["quant_bits"],
            assignment=cfg["ris"]["assignment"],
            serving_cell=cfg["ris"]["serving_cell"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_plan(cfg: dict) -> TrialPlan:
    p = cfg["plan"]
    try:
        return TrialPlan(
            trials=p["trials"],
            master_seed=p["master_seed"],
            power_sweep_dbm=list(p["power_sweep_dbm"]),
            element_counts=list(p["element_counts"]),
            threshold_far=p["threshold_far"],
            threshold_near=p["threshold_near"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_search(cfg: dict) -> SearchSpace:
    s = cfg["search"]
    try:
        return SearchSpace(
            gamma_far_grid=list(s["gamma_far_grid"]),
            split_candidates=s["split_candidates"],
            min_rate_far=s["min_rate_far"],
            min_rate_near=s["min_rate_near"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def write_csv(path, header: list, rows) -> int:
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            count = 0
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
                count += 1
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return count


def write_manifest(out_path, command: str, cfg: dict, extra: dict | None = None):
    manifest = {
        "command": command,
        "seed": cfg["plan"]["master_seed"],
        "config": cfg,
        "config_hash": config_hash(cfg),
        "versions": {
            "arisim": __version__,
            "numpy": np.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
    }
    if extra:
        manifest.update(extra)
    path = str(out_path) + ".manifest.json"
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _run_sumrate_vs_elements(cfg, out, workers):
    plan, scenario = build_plan(cfg), build_scenario(cfg)
    res = sweep_elements(plan, scenario, workers)
    rows = zip(res.sweep.astype(int), res.rate_mean["sum"], res.rate_stderr["sum"])
    n = write_csv(out, ["M", "sum_rate_mean", "sum_rate_stderr"], rows)
    write_manifest(out, "sumrate-vs-elements", cfg, {"rows": n})


def _run_rate_vs_power(cfg, out, workers):
    plan, scenario = build_plan(cfg), build_scenario(cfg)
    res = estimate_rates(plan, scenario, workers)
    header = ["p_dbm"]
    for key in ("near_1", "near_2", "far", "sum"):
        header += [f"rate_{key}_mean", f"rate_{key}_stderr"]
    rows = (
        [p]
        + [v for key in ("near_1", "near_2", "far", "sum")
           for v in (res.rate_mean[key][i], res.rate_stderr[key][i])]
        for i, p in enumerate(res.sweep)
    )
    n = write_csv(out, header, rows)
    write_manifest(out, "rate-vs-power", cfg, {"rows": n})


def _run_outage_vs_power(cfg, out, workers):
    plan, scenario = build_plan(cfg), build_scenario(cfg)
    res = outage_vs_power(plan, scenario, workers)
    keys = ("near_1", "near_2", "far", "far_noncomp", "far_noris")
    header = ["p_dbm"]
    for key in keys:
        header += [f"outage_{key}", f"outage_{key}_lo", f"outage_{key}_hi"]
    rows = (
        [p]
        + [v for key in keys
           for v in (res.outage[key][i], res.outage_lo[key][i], res.outage_hi[key][i])]
        for i, p in enumerate(res.sweep)
    )
    n = write_csv(out, header, rows)
    write_manifest(out, "outage-vs-power", cfg, {"rows": n})


def _run_se_ee(cfg, out, workers, per_user=False):
    plan, scenario = build_plan(cfg), build_scenario(cfg)
    res = se_ee_curve(plan, scenario, workers)
    header = ["p_dbm", "se_bit_s_hz", "ee_bit_per_joule"]
    if per_user:
        header += ["se_near_1", "se_near_2", "se_far"]
    rows = []
    for i, p in enumerate(res.sweep):
        row = [p, res.se[i], res.ee[i]]
        if per_user:
            row += [res.rate_mean[k][i] for k in ("near_1", "near_2", "far")]
        rows.append(row)
    n = write_csv(out, header, rows)
    write_manifest(out, "se-ee", cfg, {"rows": n})


def _run_pa_sweep(cfg, out, workers):
    plan, scenario, space = build_plan(cfg), build_scenario(cfg), build_search(cfg)
    res = optimize_pa(space, plan, scenario)
    header = ["gamma_far", "gamma_near", "sum_rate", "rate_near_1", "rate_near_2",
              "rate_far", "feasible"]
    rows = (
        [e["gamma_far"], 1.0 - e["gamma_far"], e["sum_rate"], e["rate_near_1"],
         e["rate_near_2"], e["rate_far"], e["feasible"]]
        for e in res.trace
    )
    n = write_csv(out, header, rows)
    write_manifest(out, "pa-sweep", cfg, {
        "rows": n,
        "winner": {
            "gamma_far": float(res.best_pa.gamma_far[0]),
            "objective": res.objective,
            "feasible": res.feasible,
        },
    })


def _run_split_search(cfg, out, workers):
    plan, scenario, space = build_plan(cfg), build_scenario(cfg), build_search(cfg)
    res = optimize_split(space, plan, scenario)
    header = ["m1", "m2", "sum_rate", "rate_near_1", "rate_near_2", "rate_far", "feasible"]
    rows = (
        [e["split"][0], e["split"][1], e["sum_rate"], e["rate_near_1"],
         e["rate_near_2"], e["rate_far"], e["feasible"]]
        for e in res.trace
    )
    n = write_csv(out, header, rows)
    write_manifest(out, "split-search", cfg, {
        "rows": n,
        "winner": {"split": list(res.best_split), "objective": res.objective,
                   "feasible": res.feasible},
    })


def _run_export_qps(cfg, out, workers):
    scenario = build_scenario(cfg)
    records_per_tag = int(cfg["feedback"]["records_per_tag"])
    m = scenario.m_elements
    if m == 0:
        raise ConfigError("export-qps needs at least one RIS element")
    trials = -(-records_per_tag // m)  # ceil division
    seed = cfg["plan"]["master_seed"]
    rows = export_dataset(scenario, trials, seed, out)
    write_manifest(out, "export-qps", cfg, {"rows": rows, "trials": trials})
    print(f"wrote {rows} records to {out}")


def run(argv) -> int:
    parser = argparse.ArgumentParser(
        prog="arisim",
        description="Two-cell aerial-RIS CoMP-NOMA link-level Monte Carlo experiments",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON config file (defaults mirror the built-ins)")
    parser.add_argument("--seed", type=int, help="override plan.master_seed")
    parser.add_argument("--trials", type=int, help="override plan.trials")
    parser.add_argument("--power-dbm", type=float, help="override power.p_tx_dbm")
    parser.add_argument("--elements", type=int, help="override ris.m_elements")
    parser.add_argument("--records-per-tag", type=int,
                        help="override feedback.records_per_tag (export-qps)")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel trial generation; output is worker-count invariant")
    parser.add_argument("--per-user", action="store_true",
                        help="add per-user SE columns (se-ee)")
    parser.add_argument("--out", help="output CSV path (default <experiment>.csv)")
    args = parser.parse_args(argv)

    overrides = {}
    if args.seed is not None:
        overrides["plan.master_seed"] = args.seed
    if args.trials is not None:
        overrides["plan.trials"] = args.trials
    if args.power_dbm is not None:
        overrides["power.p_tx_dbm"] = args.power_dbm
    if args.elements is not None:
        overrides["ris.m_elements"] = args.elements
    if args.records_per_tag is not None:
        overrides["feedback.records_per_tag"] = args.records_per_tag

    out = args.out or f"{args.experiment}.csv"
    runners = {
        "sumrate-vs-elements": _run_sumrate_vs_elements,
        "rate-vs-power": _run_rate_vs_power,
        "outage-vs-power": _run_outage_vs_power,
        "se-ee": _run_se_ee,
        "pa-sweep": _run_pa_sweep,
        "split-search": _run_split_search,
        "export-qps": _run_export_qps,
    }
    try:
        cfg = load_config(args.config, overrides)
        if args.experiment == "se-ee":
            _run_se_ee(cfg, out, args.workers, per_user=args.per_user)
        else:
            runners[args.experiment](cfg, out, args.workers)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
