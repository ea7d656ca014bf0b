"""Seeded batch experiments, scenario sweeps, and CSV/JSON export.

Every run is seeded base+i and independent; aggregation is the
arithmetic mean over runs.  Output formatting is fixed-precision so a
re-run with the same spec is byte-identical.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import GreedyShortest, HeuristicSplit
from .config import RngStreams, SimConfig
from .episode import run_episode
from .forwarding import EpisodeMetrics

DEV_BIN_WIDTH = 0.1
DEV_RANGE = (-3.0, 3.0)

LOAD_PRESETS = {
    "low": {"traffic_mb_min": 1.0, "traffic_mb_max": 1.5},
    "high": {"traffic_mb_min": 1.5, "traffic_mb_max": 2.0},
}


@dataclass
class ExperimentSpec:
    name: str
    cfg: SimConfig
    policy: str                      # "ippo-dm" | "heuristic" | "greedy"
    num_runs: int = 50
    seed_base: int = 0
    checkpoint: str | None = None


@dataclass
class RunRecord:
    scenario: str
    run: int
    seed: int
    policy: str
    metrics: EpisodeMetrics


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    runs: list = field(default_factory=list)

    def mean(self, attr: str) -> float:
        vals = [getattr(r.metrics, attr) for r in self.runs]
        return float(np.mean(vals)) if vals else 0.0


def make_policy(spec: ExperimentSpec):
    if spec.policy == "heuristic":
        return HeuristicSplit(spec.cfg)
    if spec.policy == "greedy":
        return GreedyShortest(spec.cfg)
    if spec.policy == "ippo-dm":
        if spec.checkpoint is None:
            raise ValueError("policy 'ippo-dm' requires a checkpoint")
        if not os.path.exists(spec.checkpoint):
            raise FileNotFoundError(f"checkpoint not found: {spec.checkpoint}")
        from .trainer import policy_from_checkpoint

        return policy_from_checkpoint(spec.checkpoint, spec.cfg)
    raise ValueError(f"unknown policy {spec.policy!r}")


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    result = ExperimentResult(spec=spec)
    policy = make_policy(spec)
    for i in range(spec.num_runs):
        seed = spec.seed_base + i
        streams = RngStreams(seed)
        episode = run_episode(spec.cfg, policy, streams)
        result.runs.append(
            RunRecord(scenario=spec.name, run=i, seed=seed, policy=spec.policy,
                      metrics=episode.metrics)
        )
    return result


def deviation_curve(deviations: list, total: int) -> np.ndarray:
    """Cumulative arrival fraction at each bin edge of the deviation axis."""
    edges = np.round(
        np.arange(DEV_RANGE[0], DEV_RANGE[1] + DEV_BIN_WIDTH / 2, DEV_BIN_WIDTH), 10
    )
    if total == 0:
        return np.zeros(edges.shape[0])
    devs = np.sort(np.asarray(deviations, dtype=float))
    return np.searchsorted(devs, edges, side="right") / total


def curve_edges() -> np.ndarray:
    return np.round(
        np.arange(DEV_RANGE[0], DEV_RANGE[1] + DEV_BIN_WIDTH / 2, DEV_BIN_WIDTH), 10
    )


SUMMARY_COLUMNS = [
    "scenario", "policy", "run", "seed", "aggregate",
    "eta_pack", "phi_loss", "total_packets", "delivered", "on_time",
    "forward_loss", "overflow_loss", "expired", "still_queued",
    "flows_total", "flows_on_time", "loss_cap_ok",
]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def summary_rows(result: ExperimentResult) -> list[list]:
    rows = []
    for r in result.runs:
        m = r.metrics
        rows.append([
            r.scenario, r.policy, r.run, r.seed, 0,
            m.delivery_ratio, m.loss_ratio, m.total_packets, m.delivered, m.on_time,
            m.forward_loss, m.overflow_loss, m.expired, m.still_queued,
            m.flows_total, m.flows_on_time, m.loss_cap_ok,
        ])
    if result.runs:
        n = len(result.runs)

        def col_mean(idx):
            return float(np.mean([rows[i][idx] for i in range(n)]))

        agg = [result.spec.name, result.spec.policy, "", "", 1]
        for idx in range(5, len(SUMMARY_COLUMNS)):
            agg.append(col_mean(idx))
        rows.append(agg)
    return rows


def export_summary(results: list, out_dir: str, fmt: str = "csv") -> str:
    """Write the per-run + aggregate summary table; returns the file path."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for res in results:
        rows.extend(summary_rows(res))
    if fmt == "csv":
        path = os.path.join(out_dir, "summary.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_COLUMNS)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    elif fmt == "json":
        path = os.path.join(out_dir, "summary.json")
        payload = [dict(zip(SUMMARY_COLUMNS, [_fmt(v) for v in row])) for row in rows]
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return path


def export_curves(results: list, out_dir: str) -> str:
    """Mean cumulative packet- and task-level arrival curves per scenario.

    Deviation axis: seconds relative to the deadline, 0.1 s bins.
    """
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "curves.csv")
    edges = curve_edges()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "policy", "deviation_s", "packet_cum", "task_cum"])
        for res in results:
            pk = np.mean(
                [
                    deviation_curve(r.metrics.deviations, r.metrics.total_packets)
                    for r in res.runs
                ],
                axis=0,
            )
            tk = np.mean(
                [
                    deviation_curve(r.metrics.task_deviations, r.metrics.flows_total)
                    for r in res.runs
                ],
                axis=0,
            )
            for e, p, t in zip(edges, pk, tk):
                writer.writerow(
                    [res.spec.name, res.spec.policy, _fmt(float(e)), _fmt(float(p)),
                     _fmt(float(t))]
                )
    return path


def parse_sweep(sweep: str) -> tuple[str, list[int]]:
    """Parse 'uavs=8,16,24' or 'n=2..8' into (key, values)."""
    key, _, raw = sweep.partition("=")
    key = key.strip().lower()
    if key not in ("uavs", "n"):
        raise ValueError(f"unknown sweep key {key!r} (expected 'uavs' or 'n')")
    raw = raw.strip()
    if ".." in raw:
        lo, hi = raw.split("..")
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(v) for v in raw.split(",") if v.strip()]
    if not values:
        raise ValueError(f"empty sweep {sweep!r}")
    return key, values


def expand_scenarios(
    base_cfg: SimConfig, load: str | None, sweeps: list
) -> list[tuple[str, SimConfig]]:
    """Expand load preset and sweeps into named scenario configs."""
    cfg = base_cfg
    name = "base"
    if load is not None:
        cfg = replace(cfg, **LOAD_PRESETS[load]).validate()
        name = f"load-{load}"
    scenarios = [(name, cfg)]
    for sweep in sweeps:
        key, values = parse_sweep(sweep)
        new = []
        for sc_name, sc_cfg in scenarios:
            for v in values:
                if key == "uavs":
                    c = replace(sc_cfg, num_uavs=v).validate()
                else:
                    c = replace(sc_cfg, max_neighbors=v).validate()
                new.append((f"{sc_name}-{key}{v}", c))
        scenarios = new
    return scenarios
