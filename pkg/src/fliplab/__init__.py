"""Planar throw-flip laboratory.

A seeded surrogate plant throws a bar with a 3-parameter command; local
linear forward models, a cone-search iterative learner, and CoM-shift
transfer learn commands that land the bar at a target position and
(unwrapped) orientation. The CLI runs reproducible benchmark campaigns.
"""

__version__ = "0.1.0"

from .planar import PlanarPose, PlanarTwist, RelativeCoords, contact_twist, relative_coords, unwrap_angle
from .ballistics import (
    GRAVITY,
    LandingPose,
    NoLandingSolution,
    ReleaseState,
    fly_time,
    integrate_flight_oracle,
    landing_pose,
)
from .plant import Command, Dataset, DatasetEntry, PlantParams, TrialRecord, grid_sweep, release_state, throw
from .models import (
    ConeCoordinate,
    InsufficientData,
    MeshSpec,
    NeighborTriple,
    NoFeasibleCandidate,
    TargetSpec,
    cone_search,
    delta_command,
    nearest_neighbors,
    normalized_error,
    predict_m1,
    predict_m2,
)
from .learner import IterationLog, LearnerConfig, LearningResult, build_support, learn, run_iteration, stagnation_escape
from .transfer import CoMShift, learn_transfer, shift_release_state, transfer_support
