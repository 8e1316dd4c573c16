"""Reusing throw data for a new object whose CoM sits elsewhere on the bar.

When only the CoM moves along the bar by ``dh`` and the in-hand pivoting
motion at the grasp stays the same, the new object's release state follows
from the old one in closed form: the pose shifts along the bar direction and
the twist picks up the extra lever arm,

    q_new = q + dh * (sin theta, -cos theta, 0)
    v_new = v + omega * dh * (cos theta, sin theta, 0)

and the contact-point twist is invariant under this map (the grasp point
never moved). Flying the shifted states yields a predicted support set for
the new object, which bootstraps learning instead of gathering data from
scratch:

    iteration 1   execute the transferred set's closest command, observe
    iteration 2   cone-search the 3 closest predicted entries, anchored at
                  the iteration-1 observation
    iteration 3   same with the 1st, 2nd and 4th closest predicted entries,
                  anchored at the iteration-2 observation
    iteration 4+  standard iterative learning on the observed records only

Predicted entries never enter post-bootstrap neighbor selection; after three
iterations the learner runs on real data alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .ballistics import NoLandingSolution, ReleaseState, landing_pose
from .models import (
    ConeCoordinate,
    ConeSearchResult,
    InsufficientData,
    NeighborTriple,
    TargetSpec,
    cone_search,
    nearest_neighbors,
    normalized_error,
)
from .learner import (
    IterationLog,
    LearnerConfig,
    LearningResult,
    PHASE_LEARN,
    _distinct_commands,
    _finish,
    _log_iteration,
    run_loop,
)
from .plant import Dataset, DatasetEntry, PlantParams, derive_seed, execute_command
from .planar import PlanarPose, PlanarTwist

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoMShift:
    """Signed displacement of the CoM along the bar axis, meters."""

    dh: float

    def __post_init__(self):
        if not math.isfinite(self.dh):
            raise ValueError("CoM shift must be finite")


def _as_dh(dh) -> float:
    return dh.dh if isinstance(dh, CoMShift) else float(dh)


def shift_release_state(release: ReleaseState, dh) -> ReleaseState:
    """Release state of the CoM-shifted object for the same in-hand motion.

    Leaves theta and omega untouched; only the linear pose and velocity move.
    Applying ``-dh`` afterwards restores the original state.
    """
    d = _as_dh(dh)
    p, t = release.pose, release.twist
    sin_t, cos_t = math.sin(p.theta), math.cos(p.theta)
    return ReleaseState(
        PlanarPose(p.x + d * sin_t, p.z - d * cos_t, p.theta),
        PlanarTwist(t.vx + t.omega * d * cos_t, t.vz + t.omega * d * sin_t, t.omega),
    )


def transfer_support(dataset: Dataset, dh) -> Dataset:
    """Predict a support set for the shifted object from recorded throws.

    Each entry's mean release state is shifted and re-flown; commands are
    kept, raw trials are not (the predictions never happened). Entries whose
    shifted state cannot reach the landing plane are dropped with a warning.
    """
    out = Dataset()
    dropped = 0
    for e in dataset:
        shifted = shift_release_state(e.release, dh)
        try:
            landing = landing_pose(shifted)
        except NoLandingSolution:
            dropped += 1
            continue
        out.add(DatasetEntry(command=e.command, release=shifted, landing=landing, predicted=True))
    if dropped:
        log.warning("transfer_support dropped %d entr%s with no landing solution",
                    dropped, "y" if dropped == 1 else "ies")
    return out


def learn_transfer(
    plant: PlantParams,
    source_support: Dataset,
    dh,
    target: TargetSpec,
    config: LearnerConfig = LearnerConfig(),
    master_seed: int = 0,
) -> LearningResult:
    """Three-iteration bootstrap from transferred data, then standard learning.

    ``plant`` is the NEW object's plant; the learner sees only the recorded
    source data and ``dh``, never the plant constants. Success and iteration
    budget semantics match `learner.learn`: up to ``config.max_iterations``
    iterations total, early exit when all N trials land inside the box.
    """
    if len(source_support) < 4:
        raise InsufficientData("transfer needs a source support set with >= 4 entries")
    transferred = transfer_support(source_support, dh)
    if len(transferred) < 4:
        raise InsufficientData("fewer than 4 transferred entries can land")

    predicted_best = min(normalized_error(e.landing, target) for e in transferred)
    observed = Dataset()
    logs: list[IterationLog] = []
    prev_error = predicted_best

    def execute(search, iteration) -> IterationLog:
        seeds = [
            derive_seed(master_seed, PHASE_LEARN, iteration, trial)
            for trial in range(config.trials_per_command)
        ]
        entry = execute_command(search.command, plant, seeds)
        observed.add(entry)
        return _log_iteration(
            iteration, search, entry, target, False, prev_error, config.stagnation_margin
        )

    # iteration 1: replay the most promising transferred command
    best = nearest_neighbors(transferred, target, 1)[0]
    replay = ConeSearchResult(
        alpha=ConeCoordinate(0.0, 0.0),
        command=best.command,
        predicted=best.landing,
        predicted_error=normalized_error(best.landing, target),
    )
    log1 = execute(replay, 1)
    logs.append(log1)
    if log1.all_within or config.max_iterations == 1:
        return _finish(logs, predicted_best, log1.all_within)
    prev_error = log1.error

    # iterations 2 and 3: predicted triples anchored at fresh observations
    for iteration, picks in ((2, (0, 1, 2)), (3, (0, 1, 3))):
        if iteration > config.max_iterations:
            return _finish(logs, predicted_best, False)
        ranked = nearest_neighbors(transferred, target, max(picks) + 1)
        triple = NeighborTriple.from_entries([ranked[i] for i in picks])
        anchor = observed[-1]
        search = cone_search(
            triple, target, mesh=config.mesh, model="m2",
            anchor_release=anchor.release, anchor_command=anchor.command,
        )
        log_n = execute(search, iteration)
        logs.append(log_n)
        if log_n.all_within:
            return _finish(logs, predicted_best, True)
        prev_error = log_n.error

    # iteration 4 onward: plain iterative learning on observed data only
    if _distinct_commands(observed) < 3:
        # bootstrap converged onto repeated commands: the observed records
        # cannot span a search cone, so the run ends here
        return _finish(logs, predicted_best, False)
    success = run_loop(
        plant, observed, target, config, master_seed, logs, prev_error, start_iteration=4
    )
    return _finish(logs, predicted_best, success)
