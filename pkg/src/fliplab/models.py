"""Local forward models and the cone search that inverts them.

Both predictors are built on the three dataset entries nearest to the target
(in normalized landing error). The end-to-end model ("m1") interpolates the
stored landing poses linearly in the cone coordinate. The projectile model
("m2") interpolates the stored release states instead and pushes the result
through the exact flight map, so the only thing it approximates linearly is
the command-to-release map. Inversion is an exhaustive sweep of a dense
coordinate mesh: cheap, derivative-free, and immune to local-model quirks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ballistics import LandingPose, ReleaseState, landing_from_arrays, landing_pose
from .plant import (
    DAMPING_RANGE,
    Command,
    Dataset,
    DatasetEntry,
    PITCH_RANGE,
    SPEED_RANGE,
)

MODELS = ("m1", "m2")


class InsufficientData(ValueError):
    """The dataset cannot furnish the requested neighbors."""


class NoFeasibleCandidate(RuntimeError):
    """Every mesh point was skipped (clamping or unreachable flight)."""


@dataclass(frozen=True)
class TargetSpec:
    """Desired landing pose with its tolerance box.

    ``theta`` is unwrapped radians; the tolerances also set the error
    normalization, so an error of sqrt(2) means "one tolerance off on both
    axes at once".
    """

    x: float
    theta: float
    eps_x: float = 0.05
    eps_theta: float = math.radians(45.0)

    def __post_init__(self):
        if not (self.eps_x > 0.0 and self.eps_theta > 0.0):
            raise ValueError("target tolerances must be positive")

    def within(self, landing: LandingPose | None) -> bool:
        """Per-trial success: inside the tolerance box on both axes."""
        if landing is None:
            return False
        return (
            abs(landing.x - self.x) <= self.eps_x
            and abs(landing.theta - self.theta) <= self.eps_theta
        )


def normalized_error(landing: LandingPose, target: TargetSpec) -> float:
    """Euclidean norm of the tolerance-scaled landing offsets."""
    return math.hypot(
        (landing.x - target.x) / target.eps_x,
        (landing.theta - target.theta) / target.eps_theta,
    )


def nearest_neighbors(dataset: Dataset, target: TargetSpec, k: int = 3) -> list[DatasetEntry]:
    """The k distinct-command entries whose mean landings sit closest to the target.

    Ties break toward earlier insertion (sorted() is stable on the index).
    Re-executions of a command the learner already tried would otherwise
    collapse the neighbor simplex to zero span, so only the best-ranked entry
    per command participates.
    """
    ranked = sorted(
        range(len(dataset)), key=lambda i: (normalized_error(dataset[i].landing, target), i)
    )
    out: list[DatasetEntry] = []
    seen: list[np.ndarray] = []
    for i in ranked:
        cmd = dataset[i].command.as_array()
        if any(np.max(np.abs(cmd - c)) <= 1e-12 for c in seen):
            continue
        out.append(dataset[i])
        seen.append(cmd)
        if len(out) == k:
            return out
    raise InsufficientData(f"need {k} distinct commands, dataset has {len(out)}")


@dataclass(frozen=True)
class ConeCoordinate:
    """Coordinates along the two command-difference directions."""

    alpha1: float
    alpha2: float

    def norm(self) -> float:
        return math.hypot(self.alpha1, self.alpha2)


@dataclass(frozen=True)
class NeighborTriple:
    """Three ranked entries spanning the local search cone.

    ``degenerate`` is set when the two command deltas do not span a plane
    (collinear or coincident commands); the search then effectively works in
    a line or a point, which the stagnation escape is there to fix.
    """

    first: DatasetEntry
    second: DatasetEntry
    third: DatasetEntry
    degenerate: bool = False

    @staticmethod
    def from_entries(entries) -> "NeighborTriple":
        e1, e2, e3 = entries
        deltas = np.stack([
            e2.command.as_array() - e1.command.as_array(),
            e3.command.as_array() - e1.command.as_array(),
        ])
        degenerate = np.linalg.matrix_rank(deltas, tol=1e-9) < 2
        return NeighborTriple(e1, e2, e3, bool(degenerate))

    def command_deltas(self) -> np.ndarray:
        u1 = self.first.command.as_array()
        return np.stack([
            self.second.command.as_array() - u1,
            self.third.command.as_array() - u1,
        ])

    def release_deltas(self) -> np.ndarray:
        r1 = self.first.release.as_array()
        return np.stack([
            self.second.release.as_array() - r1,
            self.third.release.as_array() - r1,
        ])


def neighbor_triple(dataset: Dataset, target: TargetSpec) -> NeighborTriple:
    """The standard triple: three nearest entries."""
    return NeighborTriple.from_entries(nearest_neighbors(dataset, target, 3))


def delta_command(neighbors: NeighborTriple, alpha: ConeCoordinate) -> Command:
    """u1 + alpha1*(u2 - u1) + alpha2*(u3 - u1), componentwise, unclamped."""
    d = neighbors.command_deltas()
    u = neighbors.first.command.as_array() + alpha.alpha1 * d[0] + alpha.alpha2 * d[1]
    return Command.from_array(u)


def predict_m1(neighbors: NeighborTriple, alpha: ConeCoordinate) -> LandingPose:
    """End-to-end prediction: interpolate the stored landing poses."""
    l1, l2, l3 = neighbors.first.landing, neighbors.second.landing, neighbors.third.landing
    a1, a2 = alpha.alpha1, alpha.alpha2
    return LandingPose(
        l1.x + a1 * (l2.x - l1.x) + a2 * (l3.x - l1.x),
        l1.theta + a1 * (l2.theta - l1.theta) + a2 * (l3.theta - l1.theta),
    )


def predict_m2(
    neighbors: NeighborTriple,
    alpha: ConeCoordinate,
    anchor: ReleaseState | None = None,
) -> LandingPose:
    """Projectile prediction: interpolate release states, then fly them.

    ``anchor`` replaces the first entry's release state as the interpolation
    origin (the deltas still come from the triple); transfer learning uses
    this to anchor predictions at freshly observed data. Raises
    NoLandingSolution when the interpolated state cannot reach the plane.
    """
    base = (anchor or neighbors.first.release).as_array()
    d = neighbors.release_deltas()
    state = base + alpha.alpha1 * d[0] + alpha.alpha2 * d[1]
    return landing_pose(ReleaseState.from_array(state))


@dataclass(frozen=True)
class MeshSpec:
    """Search grid over the cone coordinates.

    ``clamp_tol`` is how far (per command component) a candidate may sit
    outside the executable box and still count, after clamping, as feasible.
    """

    alpha_min: float = -1.0
    alpha_max: float = 2.0
    step: float = 0.05
    nonneg: bool = False
    clamp_tol: float = 1e-9

    def __post_init__(self):
        if self.step <= 0.0 or self.alpha_max < self.alpha_min:
            raise ValueError("bad mesh spec")

    def axis(self) -> np.ndarray:
        lo = max(0.0, self.alpha_min) if self.nonneg else self.alpha_min
        n = int(round((self.alpha_max - lo) / self.step)) + 1
        return lo + self.step * np.arange(n)


@dataclass(frozen=True)
class ConeSearchResult:
    alpha: ConeCoordinate
    command: Command
    predicted: LandingPose
    predicted_error: float


_BOX_LO = np.array([PITCH_RANGE[0], SPEED_RANGE[0], DAMPING_RANGE[0]])
_BOX_HI = np.array([PITCH_RANGE[1], SPEED_RANGE[1], DAMPING_RANGE[1]])


def cone_search(
    neighbors: NeighborTriple,
    target: TargetSpec,
    mesh: MeshSpec = MeshSpec(),
    model: str = "m2",
    anchor_release: ReleaseState | None = None,
    anchor_command: Command | None = None,
) -> ConeSearchResult:
    """Pick the mesh point minimizing the predicted normalized error.

    Candidates needing more than ``mesh.clamp_tol`` of clamping, or whose
    interpolated release state cannot land (m2), are skipped. Exact error
    ties break toward smaller |alpha|, then lexicographically on
    (alpha1, alpha2), so the result is independent of evaluation order.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    ax = mesh.axis()
    a1g, a2g = np.meshgrid(ax, ax, indexing="ij")
    a1 = a1g.ravel()
    a2 = a2g.ravel()

    base_cmd = (anchor_command or neighbors.first.command).as_array()
    d = neighbors.command_deltas()
    cmds = base_cmd[None, :] + a1[:, None] * d[0][None, :] + a2[:, None] * d[1][None, :]
    clipped = np.clip(cmds, _BOX_LO, _BOX_HI)
    feasible = np.abs(clipped - cmds).max(axis=1) <= mesh.clamp_tol

    if model == "m1":
        if anchor_release is not None:
            raise ValueError("anchored prediction is a release-space (m2) concept")
        l1 = neighbors.first.landing
        lx = np.array([l1.x, neighbors.second.landing.x - l1.x, neighbors.third.landing.x - l1.x])
        lt = np.array([
            l1.theta,
            neighbors.second.landing.theta - l1.theta,
            neighbors.third.landing.theta - l1.theta,
        ])
        land_x = lx[0] + a1 * lx[1] + a2 * lx[2]
        land_th = lt[0] + a1 * lt[1] + a2 * lt[2]
    else:
        base_rel = (anchor_release or neighbors.first.release).as_array()
        rd = neighbors.release_deltas()
        states = base_rel[None, :] + a1[:, None] * rd[0][None, :] + a2[:, None] * rd[1][None, :]
        land_x, land_th, ok = landing_from_arrays(states)
        feasible &= ok

    if not feasible.any():
        raise NoFeasibleCandidate("every cone candidate was clamped or cannot land")

    err = np.hypot((land_x - target.x) / target.eps_x, (land_th - target.theta) / target.eps_theta)
    key_err = np.where(feasible, err, np.inf)
    best = np.lexsort((a2, a1, a1 * a1 + a2 * a2, key_err))[0]

    alpha = ConeCoordinate(float(a1[best]), float(a2[best]))
    return ConeSearchResult(
        alpha=alpha,
        command=Command.from_array(clipped[best]),
        predicted=LandingPose(float(land_x[best]), float(land_th[best])),
        predicted_error=float(err[best]),
    )
