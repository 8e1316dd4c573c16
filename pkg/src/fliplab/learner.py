"""Iterative command learning with cone search and stagnation escape.

Each iteration: rank the dataset by normalized landing error, cone-search
the local model spanned by the three best entries, execute the winning
command N times, append the mean-summarized outcome, and test success
(all N trials inside the tolerance box). If the mean error failed to improve
by more than a noise-sized margin, the next iteration swaps the weakest
neighbor for a fresh one (1st, 2nd, 4th nearest; consecutive stagnations
advance the swapped slot) to escape a misleading local model.

Seeds derive from (master seed, phase, iteration, trial), so runs with
different models but the same master seed draw identical noise where their
commands coincide: paired comparisons see model differences, not luck.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ballistics import LandingPose
from .models import (
    ConeCoordinate,
    ConeSearchResult,
    InsufficientData,
    MeshSpec,
    NeighborTriple,
    NoFeasibleCandidate,
    TargetSpec,
    cone_search,
    nearest_neighbors,
    neighbor_triple,
    normalized_error,
)
from .plant import Command, Dataset, DatasetEntry, PlantParams, derive_seed, execute_command

# seed-path phase tags
PHASE_SUPPORT = 0
PHASE_LEARN = 1
PHASE_SOURCE = 2


@dataclass(frozen=True)
class LearnerConfig:
    max_iterations: int = 5
    trials_per_command: int = 3
    model: str = "m2"
    mesh: MeshSpec = field(default_factory=MeshSpec)
    stagnation_margin: float = 0.05

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.trials_per_command < 1:
            raise ValueError("trials_per_command must be >= 1")
        if self.model not in ("m1", "m2"):
            raise ValueError(f"unknown model {self.model!r}")


@dataclass(frozen=True)
class IterationLog:
    """Audit record of one loop body."""

    iteration: int
    alpha: ConeCoordinate
    command: Command
    trial_landings: tuple[LandingPose | None, ...]
    mean_landing: LandingPose
    error: float
    predicted_error: float
    trial_within: tuple[bool, ...]
    all_within: bool
    two_of_n: bool
    stagnated: bool
    escaped: bool
    entry: DatasetEntry


@dataclass
class LearningResult:
    iterations: list[IterationLog]
    status: str                     # "success" | "exhausted"
    best_command: Command
    best_error: float
    support_best_error: float
    iters_to_two_of_n: int | None
    iters_to_all_n: int | None

    @property
    def first_iteration_error(self) -> float:
        return self.iterations[0].error


def stagnation_escape(dataset: Dataset, target: TargetSpec, level: int = 1) -> NeighborTriple:
    """Escape triple for the ``level``-th consecutive stagnation.

    Level 1 keeps the two best entries and swaps the third for the 4th
    nearest; each further level advances the swapped slot by one.
    """
    if level < 1:
        raise ValueError("escape level starts at 1")
    ranked = nearest_neighbors(dataset, target, 3 + level)
    return NeighborTriple.from_entries([ranked[0], ranked[1], ranked[2 + level]])


def _distinct_commands(dataset: Dataset) -> int:
    seen: list = []
    for e in dataset:
        cmd = e.command.as_array()
        if not any(abs(cmd - c).max() <= 1e-12 for c in seen):
            seen.append(cmd)
    return len(seen)


def _select_and_search(
    dataset: Dataset,
    target: TargetSpec,
    config: LearnerConfig,
    escape_level: int,
    anchor_release=None,
    anchor_command=None,
    model: str | None = None,
) -> tuple[NeighborTriple, ConeSearchResult, int, bool]:
    """Pick neighbors (escaping if asked) and cone-search them.

    The escape level is capped at the deepest triple the dataset can furnish
    (a dataset of only 3 distinct commands falls back to the normal triple);
    a cone with no feasible candidate escalates through the remaining levels.
    """
    deepest = _distinct_commands(dataset) - 3
    start = min(escape_level, max(deepest, 0))
    last_exc: NoFeasibleCandidate | None = None
    for level in range(start, deepest + 1):
        if level == 0:
            neighbors = neighbor_triple(dataset, target)
        else:
            neighbors = stagnation_escape(dataset, target, level)
        try:
            result = cone_search(
                neighbors,
                target,
                mesh=config.mesh,
                model=model or config.model,
                anchor_release=anchor_release,
                anchor_command=anchor_command,
            )
            return neighbors, result, level, level > 0
        except NoFeasibleCandidate as exc:
            last_exc = exc
    raise last_exc if last_exc is not None else InsufficientData(
        "dataset cannot furnish a neighbor triple"
    )


def run_iteration(
    plant: PlantParams,
    dataset: Dataset,
    target: TargetSpec,
    config: LearnerConfig,
    master_seed: int,
    iteration: int = 1,
    escape_level: int = 0,
    prev_error: float | None = None,
) -> IterationLog:
    """One loop body: select, search, execute N trials, append, evaluate.

    Appends the mean-summarized outcome to ``dataset``. ``prev_error`` is the
    error the stagnation test compares against (None disables the test).
    """
    _, search, _, escaped = _select_and_search(dataset, target, config, escape_level)
    seeds = [
        derive_seed(master_seed, PHASE_LEARN, iteration, trial)
        for trial in range(config.trials_per_command)
    ]
    entry = execute_command(search.command, plant, seeds)
    dataset.add(entry)
    return _log_iteration(
        iteration, search, entry, target, escaped, prev_error, config.stagnation_margin
    )


def _log_iteration(iteration, search, entry, target, escaped, prev_error, margin) -> IterationLog:
    landings = tuple(t.landing for t in entry.trials)
    within = tuple(target.within(l) for l in landings)
    error = normalized_error(entry.landing, target)
    stagnated = prev_error is not None and error >= prev_error - margin
    return IterationLog(
        iteration=iteration,
        alpha=search.alpha,
        command=entry.command,
        trial_landings=landings,
        mean_landing=entry.landing,
        error=error,
        predicted_error=search.predicted_error,
        trial_within=within,
        all_within=all(within) and len(within) > 0,
        two_of_n=sum(within) >= 2,
        stagnated=stagnated,
        escaped=escaped,
        entry=entry,
    )


def _finish(logs, support_best, success: bool) -> LearningResult:
    best = min(logs, key=lambda l: l.error)
    return LearningResult(
        iterations=logs,
        status="success" if success else "exhausted",
        best_command=best.command,
        best_error=best.error,
        support_best_error=support_best,
        iters_to_two_of_n=next((l.iteration for l in logs if l.two_of_n), None),
        iters_to_all_n=next((l.iteration for l in logs if l.all_within), None),
    )


def run_loop(
    plant: PlantParams,
    dataset: Dataset,
    target: TargetSpec,
    config: LearnerConfig,
    master_seed: int,
    logs: list[IterationLog],
    prev_error: float,
    start_iteration: int = 1,
) -> bool:
    """Standard iterations ``start_iteration..max_iterations`` on ``dataset``.

    Appends to ``logs`` in place and returns True on all-N success. Shared by
    plain learning and the post-bootstrap phase of transfer learning.
    """
    escape_level = 0
    for iteration in range(start_iteration, config.max_iterations + 1):
        log = run_iteration(
            plant, dataset, target, config, master_seed,
            iteration=iteration, escape_level=escape_level, prev_error=prev_error,
        )
        logs.append(log)
        if log.all_within:
            return True
        escape_level = escape_level + 1 if log.stagnated else 0
        prev_error = log.error
    return False


def learn(
    plant: PlantParams,
    support: Dataset,
    target: TargetSpec,
    config: LearnerConfig = LearnerConfig(),
    master_seed: int = 0,
) -> LearningResult:
    """Run up to ``config.max_iterations`` iterations from a support set.

    The support set is not mutated; the learner works on a copy that grows by
    one mean-summarized entry per iteration. Terminates early when all N
    trials of an iteration land inside the tolerance box.
    """
    if len(support) < 3:
        raise InsufficientData("support set needs at least 3 commands")
    dataset = support.copy()
    logs: list[IterationLog] = []
    support_best = min(normalized_error(e.landing, target) for e in dataset)
    success = run_loop(plant, dataset, target, config, master_seed, logs, support_best)
    return _finish(logs, support_best, success)


def build_support(
    plant: PlantParams,
    commands,
    trials_per_command: int,
    master_seed: int,
) -> Dataset:
    """Execute the support commands, mean-summarizing each over N trials."""
    dataset = Dataset()
    for j, cmd in enumerate(commands):
        seeds = [
            derive_seed(master_seed, PHASE_SUPPORT, j, trial)
            for trial in range(trials_per_command)
        ]
        dataset.add(execute_command(cmd, plant, seeds))
    return dataset
