"""Seeded surrogate for the robot + gripper throw-flip plant.

The real arm's command-to-release map lives in hardware (joint trajectories,
impedance braking, finger friction) and is not reproducible at a desk, so the
benchmark replaces it with a smooth parametric stand-in. A throw command has
three scalars: ``pitch`` steers the launch direction, ``speed`` scales the
launch velocity, ``damping`` sets how hard the arm brakes while the gripper
opens. The surrogate realizes them as:

    launch speed      V     = v0 * speed * (1 - c_loss * damping)
    launch angle      phi   = phi0 + k_gamma * pitch
    hand twist        v_h   = (V cos phi, V sin phi, V / r_arm)
    brake spin gain   dw    = c_d * damping * V
    object spin       omega = V / r_arm + dw
    pivot rotation    theta_pivot = 0.5 * dw * tau_release
    bar orientation   theta = BAR_TILT + k_gamma * pitch + theta_pivot
    CoM offset        (h_com sin theta, -h_com cos theta)   # CoM below-forward of grasp

The object twist is obtained by requiring the grasp point to move with the
hand (rigid-body velocity transport inverted at the CoM offset), so the
plant is exactly consistent with `planar.contact_twist`. V / r_arm is the
parasitic spin a revolute arm cannot avoid; the brake term adds the extra,
independently steerable rotation.

Command-to-release is smooth and nearly linear over the command box while
release-to-landing keeps the full projectile nonlinearity. Learners that
assimilate the flight map therefore face an easier local regression problem
than end-to-end ones, which is the effect the campaigns measure. Gaussian
noise on the release state models grasp/friction variation at detach.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .ballistics import LandingPose, NoLandingSolution, ReleaseState, landing_pose
from .planar import PlanarPose, PlanarTwist

# Executable command box. Cone-search candidates outside it are skipped;
# anything else out of range is clamped here and flagged on the record.
PITCH_RANGE = (-0.3, 0.3)
SPEED_RANGE = (0.7, 1.3)
DAMPING_RANGE = (0.0, 1.0)

# Bar orientation at zero pitch. The bar trails the hand tilted forward, so
# the pivot swing of the CoM has an upward component roughly along the launch
# direction; hanging it straight down would let strong braking drag the
# effective launch angle below the range-optimal angle and break the
# pitch/damping distance trends.
BAR_TILT = math.radians(60.0)


class ConfigError(ValueError):
    """Bad plant or campaign configuration."""


@dataclass(frozen=True)
class Command:
    """One throw action: pitch offset (rad), speed scale, braking magnitude."""

    pitch: float
    speed: float
    damping: float

    def as_array(self) -> np.ndarray:
        return np.array([self.pitch, self.speed, self.damping], dtype=float)

    @staticmethod
    def from_array(a) -> "Command":
        return Command(float(a[0]), float(a[1]), float(a[2]))


def clamp_command(cmd: Command) -> tuple[Command, bool]:
    """Clamp a command into the executable box; report whether it moved."""
    pitch = min(max(cmd.pitch, PITCH_RANGE[0]), PITCH_RANGE[1])
    speed = min(max(cmd.speed, SPEED_RANGE[0]), SPEED_RANGE[1])
    damping = min(max(cmd.damping, DAMPING_RANGE[0]), DAMPING_RANGE[1])
    clamped = Command(pitch, speed, damping)
    return clamped, clamped != cmd


@dataclass(frozen=True)
class PlantParams:
    """Surrogate plant constants. All angles radians, lengths meters.

    Defaults are tuned so the plant reproduces the qualitative command
    trends (pitch down-range/up-angle, speed up/up, damping up-angle/
    down-range), admits a full 360-degree flip inside the command box, and
    keeps landing scatter within the repeatability bands.
    """

    v0: float = 2.9
    phi0: float = math.radians(60.0)
    k_gamma: float = 1.0
    r_arm: float = 0.6
    c_d: float = 1.5
    c_loss: float = 0.22
    tau_release: float = 0.05
    h_com: float = 0.12
    release_x0: float = 0.5
    release_z0: float = 0.6
    noise_sigma: tuple[float, float, float, float, float, float] = (
        0.005,
        0.005,
        0.01,
        0.05,
        0.05,
        0.3,
    )

    def __post_init__(self):
        for name in ("v0", "phi0", "k_gamma", "r_arm", "c_d", "c_loss",
                     "tau_release", "h_com", "release_x0", "release_z0"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"plant parameter {name!r} must be finite")
        if self.tau_release <= 0.0:
            raise ConfigError("tau_release must be > 0")
        if self.h_com <= 0.0:
            raise ConfigError("h_com must be > 0")
        if self.r_arm <= 0.0:
            raise ConfigError("r_arm must be > 0")
        sigma = tuple(float(s) for s in self.noise_sigma)
        if len(sigma) != 6:
            raise ConfigError("noise_sigma must have 6 components (x z theta vx vz omega)")
        if any(not math.isfinite(s) or s < 0.0 for s in sigma):
            raise ConfigError("noise_sigma components must be finite and >= 0")
        object.__setattr__(self, "noise_sigma", sigma)

    @property
    def noiseless(self) -> "PlantParams":
        return replace(self, noise_sigma=(0.0,) * 6)

    def shifted_com(self, dh: float) -> "PlantParams":
        """The same plant holding an object whose CoM sits ``dh`` further out."""
        return replace(self, h_com=self.h_com + dh)


def load_plant_config(path) -> PlantParams:
    """Load PlantParams from a flat JSON document.

    Missing keys take the defaults; unknown keys are an error so typos do not
    silently fall back to defaults.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: plant config must be a JSON object")
    known = {f.name for f in fields(PlantParams)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown plant parameter(s): {', '.join(unknown)}")
    if "noise_sigma" in raw:
        raw["noise_sigma"] = tuple(raw["noise_sigma"])
    try:
        return PlantParams(**raw)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def plant_config_hash(params: PlantParams) -> str:
    """Stable short hash of the plant constants, stamped into output files."""
    doc = {f.name: getattr(params, f.name) for f in fields(PlantParams)}
    doc["noise_sigma"] = list(doc["noise_sigma"])
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def derive_seed(*keys: int) -> int:
    """Deterministic child seed from an integer key path."""
    seq = np.random.SeedSequence([int(k) for k in keys])
    return int(seq.generate_state(1, np.uint64)[0])


def release_state(
    cmd: Command, params: PlantParams, rng: np.random.Generator | None = None
) -> ReleaseState:
    """Release state for a (clamped) command; noisy iff an RNG is supplied.

    With ``rng=None`` this is the deterministic mean map. With an RNG, one
    standard normal per state component (order: x, z, theta, vx, vz, omega)
    is scaled by ``params.noise_sigma`` and added.
    """
    cmd, _ = clamp_command(cmd)
    v = params.v0 * cmd.speed * (1.0 - params.c_loss * cmd.damping)
    phi = params.phi0 + params.k_gamma * cmd.pitch
    hand = PlanarTwist(v * math.cos(phi), v * math.sin(phi), v / params.r_arm)
    d_omega = params.c_d * cmd.damping * v
    omega = hand.omega + d_omega
    theta = BAR_TILT + params.k_gamma * cmd.pitch + 0.5 * d_omega * params.tau_release
    x_r = params.h_com * math.sin(theta)
    z_r = -params.h_com * math.cos(theta)
    pose = PlanarPose(params.release_x0 + x_r, params.release_z0 + z_r, theta)
    # grasp point moves with the hand: invert the rigid transport at (x_r, z_r)
    twist = PlanarTwist(hand.vx - omega * z_r, hand.vz + omega * x_r, omega)
    if rng is not None:
        sigma = params.noise_sigma
        if any(s > 0.0 for s in sigma):
            eps = rng.normal(0.0, 1.0, size=6)
            pose = PlanarPose(
                float(pose.x + eps[0] * sigma[0]),
                float(pose.z + eps[1] * sigma[1]),
                float(pose.theta + eps[2] * sigma[2]),
            )
            twist = PlanarTwist(
                float(twist.vx + eps[3] * sigma[3]),
                float(twist.vz + eps[4] * sigma[4]),
                float(twist.omega + eps[5] * sigma[5]),
            )
    return ReleaseState(pose, twist)


@dataclass(frozen=True)
class TrialRecord:
    """One executed throw. ``landing`` is None when the flight query failed."""

    command: Command
    release: ReleaseState
    landing: LandingPose | None
    trial_id: int
    seed: int
    clamped: bool = False
    valid: bool = True


def throw(cmd: Command, params: PlantParams, rng_seed: int, trial_id: int = 0) -> TrialRecord:
    """Execute one seeded throw: noisy release, then exact projectile flight."""
    clamped_cmd, was_clamped = clamp_command(cmd)
    rng = np.random.default_rng(rng_seed)
    release = release_state(clamped_cmd, params, rng)
    try:
        landing = landing_pose(release)
        valid = True
    except NoLandingSolution:
        landing = None
        valid = False
    return TrialRecord(clamped_cmd, release, landing, trial_id, int(rng_seed), was_clamped, valid)


@dataclass(frozen=True)
class DatasetEntry:
    """Per-command summary the learners consume.

    ``release`` and ``landing`` are the means over the command's valid trials,
    or model predictions for transferred entries (``predicted=True``).
    """

    command: Command
    release: ReleaseState
    landing: LandingPose
    trials: tuple[TrialRecord, ...] = ()
    predicted: bool = False


class Dataset:
    """Ordered collection of per-command entries; order is insertion order."""

    def __init__(self, entries=()):
        self.entries: list[DatasetEntry] = list(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> DatasetEntry:
        return self.entries[i]

    def add(self, entry: DatasetEntry) -> None:
        self.entries.append(entry)

    def copy(self) -> "Dataset":
        return Dataset(self.entries)

    @property
    def trials(self) -> list[TrialRecord]:
        """All individual trials, flattened in insertion order."""
        out: list[TrialRecord] = []
        for e in self.entries:
            out.extend(e.trials)
        return out


def summarize_trials(command: Command, trials) -> DatasetEntry:
    """Mean-summarize a command's trials into a dataset entry.

    Invalid trials (no landing) are excluded from the means; at least one
    valid trial is required.
    """
    trials = tuple(trials)
    valid = [t for t in trials if t.valid and t.landing is not None]
    if not valid:
        raise NoLandingSolution(f"no valid trials for command {command}")
    rel = np.mean([t.release.as_array() for t in valid], axis=0)
    land_x = float(np.mean([t.landing.x for t in valid]))
    land_th = float(np.mean([t.landing.theta for t in valid]))
    return DatasetEntry(
        command=command,
        release=ReleaseState.from_array(rel),
        landing=LandingPose(land_x, land_th),
        trials=trials,
    )


def execute_command(cmd: Command, params: PlantParams, seeds, first_trial_id: int = 0) -> DatasetEntry:
    """Run one command once per seed and mean-summarize the outcomes."""
    trials = [
        throw(cmd, params, seed, trial_id=first_trial_id + i)
        for i, seed in enumerate(seeds)
    ]
    return summarize_trials(clamp_command(cmd)[0], trials)


def grid_sweep(
    pitch_values,
    speed_values,
    damping_values,
    reps: int,
    params: PlantParams,
    seed: int,
) -> Dataset:
    """Execute the Cartesian product of command values, ``reps`` times each.

    Per-trial seeds derive from ``(seed, running trial index)``, so the same
    arguments always reproduce the same dataset, trial for trial.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if not (len(pitch_values) and len(speed_values) and len(damping_values)):
        raise ValueError("grid axes must be nonempty")
    dataset = Dataset()
    trial_index = 0
    for gamma, s, d in itertools.product(pitch_values, speed_values, damping_values):
        cmd = Command(float(gamma), float(s), float(d))
        trials = []
        for _ in range(reps):
            trials.append(throw(cmd, params, derive_seed(seed, trial_index), trial_id=trial_index))
            trial_index += 1
        dataset.add(summarize_trials(clamp_command(cmd)[0], trials))
    return dataset
