"""Delimited output for campaign results.

Every campaign writes one trials CSV (one row per executed throw) and one
JSON summary. Files are pure functions of the campaign spec and master seed:
no timestamps, sorted JSON keys, repr float formatting, LF line endings, so
reruns are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__

TRIAL_COLUMNS = (
    "campaign",
    "model",
    "seed",
    "target_x",
    "target_theta_rad",
    "stage",
    "iteration",
    "trial",
    "trial_id",
    "pitch",
    "speed",
    "damping",
    "rel_x",
    "rel_z",
    "rel_theta",
    "rel_vx",
    "rel_vz",
    "rel_omega",
    "land_x",
    "land_theta_rad",
    "error",
    "within_tol",
    "clamped",
    "valid",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trial_row(
    campaign: str,
    record,
    *,
    model: str = "",
    seed="",
    target=None,
    stage: str = "",
    iteration="",
    trial="",
    error=None,
    within=None,
):
    """Flatten one TrialRecord plus its context into a CSV row."""
    rel = record.release
    land = record.landing
    return (
        campaign,
        model,
        seed,
        None if target is None else target.x,
        None if target is None else target.theta,
        stage,
        iteration,
        trial,
        record.trial_id,
        record.command.pitch,
        record.command.speed,
        record.command.damping,
        rel.pose.x,
        rel.pose.z,
        rel.pose.theta,
        rel.twist.vx,
        rel.twist.vz,
        rel.twist.omega,
        None if land is None else land.x,
        None if land is None else land.theta,
        error,
        within,
        record.clamped,
        record.valid,
    )


def write_trials_csv(path, rows, meta: dict) -> None:
    """Write the trial log: '#' metadata lines, a header row, data rows."""
    path = Path(path)
    lines = [f"# fliplab {__version__}"]
    for key in sorted(meta):
        lines.append(f"# {key}={meta[key]}")
    lines.append(",".join(TRIAL_COLUMNS))
    for row in rows:
        if len(row) != len(TRIAL_COLUMNS):
            raise ValueError(f"row has {len(row)} cells, expected {len(TRIAL_COLUMNS)}")
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_csv(path, columns, rows, meta: dict) -> None:
    """Same format as the trial log for auxiliary tables."""
    path = Path(path)
    lines = [f"# fliplab {__version__}"]
    for key in sorted(meta):
        lines.append(f"# {key}={meta[key]}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json_summary(path, summary: dict) -> None:
    Path(path).write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8", newline="\n"
    )
