"""Benchmark campaigns: sweep, single learning run, model comparison, transfer.

Each campaign is a pure function of its arguments and the master seed. The
compare and transfer campaigns run paired: every (target, seed) cell reuses
the same support data and the same derived noise streams across models, so
reported differences come from the models, not from luck. Runs that never
reach a threshold are censored at max_iterations + 1 when averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .learner import LearnerConfig, LearningResult, PHASE_SOURCE, build_support, learn
from .models import TargetSpec, normalized_error
from .plant import Command, Dataset, PlantParams, derive_seed, grid_sweep, plant_config_hash
from .transfer import learn_transfer
from .reporting import trial_row

# Support simplex spanning the command box widely enough that the cone
# search has informative directions from the first iteration.
DEFAULT_SUPPORT_SIMPLEX = (
    Command(-0.2, 0.8, 0.1),
    Command(0.2, 0.8, 0.1),
    Command(0.0, 1.2, 0.1),
    Command(0.0, 1.0, 0.9),
)

# Four unseen-but-reachable comparison targets (meters, radians): chosen
# outside the support cluster so the learners must extrapolate.
DEFAULT_COMPARE_TARGETS = (
    TargetSpec(1.10, math.radians(310.0)),
    TargetSpec(1.20, math.radians(340.0)),
    TargetSpec(1.90, math.radians(400.0)),
    TargetSpec(1.30, math.radians(370.0)),
)

# Transfer study: pose solved by the recorded source data but far from what a
# fresh support simplex covers on the shifted-CoM plant.
DEFAULT_TRANSFER_TARGET = TargetSpec(1.15, math.radians(350.0))
DEFAULT_DH = 0.06
TRANSFER_MAX_ITERS = 9

DEFAULT_GRID = ((-0.3, 0.0, 0.3), (0.7, 1.0, 1.3), (0.0, 0.5, 1.0))
DEFAULT_REPS = 5
DEFAULT_NUM_SEEDS = 20


def censored(iters: int | None, config: LearnerConfig) -> int:
    """Iterations-to-threshold with never-reached runs pinned at T + 1."""
    return iters if iters is not None else config.max_iterations + 1


# --- sweep -------------------------------------------------------------------


@dataclass
class SweepResult:
    dataset: Dataset
    params: PlantParams
    seed: int
    grid: tuple
    reps: int

    @property
    def command_stats(self):
        """Per-command landing mean and standard deviation."""
        rows = []
        for e in self.dataset:
            xs = [t.landing.x for t in e.trials if t.valid]
            ths = [t.landing.theta for t in e.trials if t.valid]
            rows.append(
                (
                    e.command.pitch,
                    e.command.speed,
                    e.command.damping,
                    len(xs),
                    float(np.mean(xs)),
                    float(np.std(xs)),
                    float(np.mean(ths)),
                    float(np.std(ths)),
                )
            )
        return rows

    def trial_rows(self):
        rows = []
        for e in self.dataset:
            for k, t in enumerate(e.trials):
                rows.append(
                    trial_row("sweep", t, seed=self.seed, stage="sweep", iteration=0, trial=k)
                )
        return rows

    def summary(self) -> dict:
        xs = [t.landing.x for t in self.dataset.trials if t.valid]
        ths = [t.landing.theta for t in self.dataset.trials if t.valid]
        return {
            "campaign": "sweep",
            "plant_hash": plant_config_hash(self.params),
            "master_seed": self.seed,
            "n_commands": len(self.dataset),
            "n_trials": len(self.dataset.trials),
            "reps": self.reps,
            "landing_x_range": [min(xs), max(xs)],
            "landing_theta_range": [min(ths), max(ths)],
        }


def run_sweep(
    params: PlantParams,
    seed: int = 0,
    grid=DEFAULT_GRID,
    reps: int = DEFAULT_REPS,
) -> SweepResult:
    dataset = grid_sweep(grid[0], grid[1], grid[2], reps, params, seed)
    return SweepResult(dataset=dataset, params=params, seed=seed, grid=grid, reps=reps)


# --- single learning run ------------------------------------------------------


@dataclass
class LearnRun:
    target: TargetSpec
    config: LearnerConfig
    seed: int
    support: Dataset
    result: LearningResult
    model: str

    def trial_rows(self, campaign="learn"):
        rows = []
        for j, e in enumerate(self.support):
            for k, t in enumerate(e.trials):
                rows.append(
                    trial_row(
                        campaign, t, model=self.model, seed=self.seed, target=self.target,
                        stage="support", iteration=0, trial=k,
                        error=None if t.landing is None else normalized_error(t.landing, self.target),
                        within=self.target.within(t.landing),
                    )
                )
        for log in self.result.iterations:
            for k, t in enumerate(log.entry.trials):
                rows.append(
                    trial_row(
                        campaign, t, model=self.model, seed=self.seed, target=self.target,
                        stage="learn", iteration=log.iteration, trial=k,
                        error=None if t.landing is None else normalized_error(t.landing, self.target),
                        within=self.target.within(t.landing),
                    )
                )
        return rows

    def iteration_summary(self):
        return [
            {
                "iteration": log.iteration,
                "alpha": [log.alpha.alpha1, log.alpha.alpha2],
                "command": [log.command.pitch, log.command.speed, log.command.damping],
                "predicted_error": log.predicted_error,
                "error": log.error,
                "two_of_n": log.two_of_n,
                "all_n": log.all_within,
                "stagnated": log.stagnated,
                "escaped": log.escaped,
            }
            for log in self.result.iterations
        ]

    def summary(self) -> dict:
        r = self.result
        return {
            "model": self.model,
            "seed": self.seed,
            "target": {"x": self.target.x, "theta_rad": self.target.theta},
            "tolerance": {"eps_x": self.target.eps_x, "eps_theta_rad": self.target.eps_theta},
            "status": r.status,
            "support_best_error": r.support_best_error,
            "first_iteration_error": r.first_iteration_error,
            "min_error": r.best_error,
            "best_command": [r.best_command.pitch, r.best_command.speed, r.best_command.damping],
            "iters_to_2_of_n": r.iters_to_two_of_n,
            "iters_to_all_n": r.iters_to_all_n,
            "iterations": self.iteration_summary(),
        }


def run_learn(
    params: PlantParams,
    target: TargetSpec,
    config: LearnerConfig = LearnerConfig(),
    seed: int = 0,
    support_commands=DEFAULT_SUPPORT_SIMPLEX,
) -> LearnRun:
    support = build_support(params, support_commands, config.trials_per_command, seed)
    result = learn(params, support, target, config, master_seed=seed)
    return LearnRun(target=target, config=config, seed=seed, support=support,
                    result=result, model=config.model)


# --- model comparison ----------------------------------------------------------


@dataclass
class CompareReport:
    params: PlantParams
    targets: tuple
    seeds: tuple
    config: LearnerConfig
    runs: list = field(default_factory=list)  # LearnRun, one per (target, seed, model)

    def trial_rows(self):
        rows = []
        for run in self.runs:
            rows.extend(run.trial_rows(campaign="compare"))
        return rows

    def _aggregate(self, runs) -> dict:
        by_model = {}
        for model in ("m1", "m2"):
            sel = [r for r in runs if r.model == model]
            by_model[model] = {
                "mean_first_iteration_error": float(np.mean([r.result.first_iteration_error for r in sel])),
                "mean_min_error": float(np.mean([r.result.best_error for r in sel])),
                "mean_iters_to_2_of_n": float(np.mean([censored(r.result.iters_to_two_of_n, r.config) for r in sel])),
                "mean_iters_to_all_n": float(np.mean([censored(r.result.iters_to_all_n, r.config) for r in sel])),
                "n_runs": len(sel),
            }
        m1 = by_model["m1"]["mean_iters_to_2_of_n"]
        m2 = by_model["m2"]["mean_iters_to_2_of_n"]
        by_model["reduction_pct_2_of_n"] = float(100.0 * (m1 - m2) / m1) if m1 > 0 else 0.0
        return by_model

    def summary(self) -> dict:
        per_target = []
        for t in self.targets:
            sel = [r for r in self.runs if r.target == t]
            agg = self._aggregate(sel)
            agg["target"] = {"x": t.x, "theta_rad": t.theta}
            per_target.append(agg)
        return {
            "campaign": "compare",
            "plant_hash": plant_config_hash(self.params),
            "seeds": list(self.seeds),
            "max_iterations": self.config.max_iterations,
            "trials_per_command": self.config.trials_per_command,
            "censored_at": self.config.max_iterations + 1,
            "per_target": per_target,
            "pooled": self._aggregate(self.runs),
        }


def run_compare(
    params: PlantParams,
    targets=DEFAULT_COMPARE_TARGETS,
    config: LearnerConfig = LearnerConfig(),
    seeds=tuple(range(DEFAULT_NUM_SEEDS)),
    support_commands=DEFAULT_SUPPORT_SIMPLEX,
) -> CompareReport:
    """Paired end-to-end vs projectile-assimilated learning study."""
    report = CompareReport(params=params, targets=tuple(targets), seeds=tuple(seeds), config=config)
    for seed in seeds:
        support = build_support(params, support_commands, config.trials_per_command, seed)
        for target in targets:
            for model in ("m1", "m2"):
                cfg = replace(config, model=model)
                result = learn(params, support, target, cfg, master_seed=seed)
                report.runs.append(
                    LearnRun(target=target, config=cfg, seed=seed, support=support,
                             result=result, model=model)
                )
    return report


# --- transfer study -------------------------------------------------------------


@dataclass
class TransferPair:
    seed: int
    source: Dataset
    transfer_run: LearnRun      # model tag "m3"
    scratch_run: LearnRun       # model tag "m2-scratch"


@dataclass
class TransferReport:
    params: PlantParams
    dh: float
    target: TargetSpec
    seeds: tuple
    config: LearnerConfig
    pairs: list = field(default_factory=list)

    def trial_rows(self):
        rows = []
        for p in self.pairs:
            for e in p.source:
                for k, t in enumerate(e.trials):
                    rows.append(
                        trial_row("transfer", t, model="source", seed=p.seed,
                                  stage="source", iteration=0, trial=k)
                    )
            for log in p.transfer_run.result.iterations:
                for k, t in enumerate(log.entry.trials):
                    rows.append(
                        trial_row("transfer", t, model="m3", seed=p.seed, target=self.target,
                                  stage="learn", iteration=log.iteration, trial=k,
                                  error=None if t.landing is None else normalized_error(t.landing, self.target),
                                  within=self.target.within(t.landing))
                    )
            rows.extend(p.scratch_run.trial_rows(campaign="transfer"))
        return rows

    def summary(self) -> dict:
        m3 = [censored(p.transfer_run.result.iters_to_all_n, self.config) for p in self.pairs]
        m2 = [censored(p.scratch_run.result.iters_to_all_n, self.config) for p in self.pairs]
        wins = sum(1 for a, b in zip(m3, m2) if a < b)
        mean_m3, mean_m2 = float(np.mean(m3)), float(np.mean(m2))
        return {
            "campaign": "transfer",
            "plant_hash": plant_config_hash(self.params),
            "dh": self.dh,
            "target": {"x": self.target.x, "theta_rad": self.target.theta},
            "seeds": [p.seed for p in self.pairs],
            "max_iterations": self.config.max_iterations,
            "censored_at": self.config.max_iterations + 1,
            "iters_to_all_n": {"m3": m3, "m2_scratch": m2},
            "mean_iters_to_all_n": {"m3": mean_m3, "m2_scratch": mean_m2},
            "reduction_pct": float(100.0 * (mean_m2 - mean_m3) / mean_m2) if mean_m2 > 0 else 0.0,
            "m3_strictly_fewer_fraction": float(wins / len(self.pairs)) if self.pairs else 0.0,
        }


def run_transfer(
    params: PlantParams,
    dh: float = DEFAULT_DH,
    target: TargetSpec = DEFAULT_TRANSFER_TARGET,
    config: LearnerConfig = LearnerConfig(max_iterations=TRANSFER_MAX_ITERS),
    seeds=tuple(range(DEFAULT_NUM_SEEDS)),
    grid=DEFAULT_GRID,
    reps: int = DEFAULT_REPS,
    support_commands=DEFAULT_SUPPORT_SIMPLEX,
) -> TransferReport:
    """Transfer bootstrap vs from-scratch learning on the shifted-CoM plant.

    Per seed: record a grid sweep on the original plant, transfer it by
    ``dh`` and learn on the shifted plant; the baseline gathers a fresh
    support simplex on the shifted plant and learns from scratch.
    """
    report = TransferReport(params=params, dh=dh, target=target, seeds=tuple(seeds), config=config)
    shifted = params.shifted_com(dh)
    for seed in seeds:
        source = grid_sweep(grid[0], grid[1], grid[2], reps, params, derive_seed(seed, PHASE_SOURCE))
        t_result = learn_transfer(shifted, source, dh, target, config, master_seed=seed)
        t_run = LearnRun(target=target, config=config, seed=seed, support=Dataset(),
                         result=t_result, model="m3")
        support = build_support(shifted, support_commands, config.trials_per_command, seed)
        s_result = learn(shifted, support, target, replace(config, model="m2"), master_seed=seed)
        s_run = LearnRun(target=target, config=replace(config, model="m2"), seed=seed,
                         support=support, result=s_result, model="m2-scratch")
        report.pairs.append(TransferPair(seed=seed, source=source, transfer_run=t_run,
                                         scratch_run=s_run))
    return report
