"""
Output artifacts: map snapshots, unit traces and the scanpath log

Every file is written to a temporary sibling first and moved into place,
so an interrupted run never leaves a truncated artifact.
"""

import csv
import io
import json
import logging
import os
import tempfile
from typing import Dict, Iterable, List

import numpy as np

logger = logging.getLogger(__name__)

TRACE_FIELDS = ["step", "move", "switch"]


def atomic_write_bytes(path: str, data: bytes) -> None:
    """
    Write `data` to `path` through a temporary file in the same directory

    Readers never see a partially written file. Missing parent directories
    are created.

    Args:
        path: Destination file
        data: Bytes to write
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def atomic_write_text(path: str, text: str) -> None:
    """UTF-8 text variant of atomic_write_bytes"""
    atomic_write_bytes(path, text.encode("utf-8"))


def pgm_bytes(activity: np.ndarray) -> bytes:
    """Binary greymap (P5, maxval 255) with grey = round(255 * u)"""
    u = np.clip(np.asarray(activity, dtype=np.float64), 0.0, 1.0)
    height, width = u.shape
    grey = np.rint(255.0 * u).astype(np.uint8)
    return f"P5\n{width} {height}\n255\n".encode("ascii") + grey.tobytes()


def write_pgm(path: str, activity: np.ndarray) -> None:
    """Write an activity array as a binary greymap"""
    atomic_write_bytes(path, pgm_bytes(activity))


def _csv_text(fieldnames: List[str], rows: Iterable[Dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write_activity_csv(path: str, activity: np.ndarray) -> None:
    """Raw activities, one row per cell, x varying fastest"""
    u = np.asarray(activity, dtype=np.float64)
    rows = (
        {"x": x, "y": y, "u": repr(float(u[y, x]))}
        for y in range(u.shape[0])
        for x in range(u.shape[1])
    )
    atomic_write_text(path, _csv_text(["x", "y", "u"], rows))


def write_trace(path: str, rows: Iterable[Dict]) -> None:
    """Per-step move/switch trace"""
    atomic_write_text(path, _csv_text(TRACE_FIELDS, rows))


def write_units(path: str, activities: Dict[str, float]) -> None:
    """
    Write scalar unit activities as CSV with columns unit, activity

    Args:
        path: Destination file
        activities: Activity by unit name, written in iteration order
    """
    rows = ({"unit": name, "activity": repr(float(value))} for name, value in activities.items())
    atomic_write_text(path, _csv_text(["unit", "activity"], rows))


def write_log(path: str, log) -> None:
    """Write a TrialLog as indented JSON"""
    atomic_write_text(path, json.dumps(log.to_dict(), indent=2) + "\n")


def read_log(path: str):
    """
    Read a scanpath log written by write_log

    Args:
        path: JSON file

    Returns:
        TrialLog: The parsed log
    """
    from src.attention.trial import TrialLog

    with open(path, "r") as f:
        return TrialLog.from_dict(json.load(f))


def snapshot_paths(directory: str, name: str, step: int) -> Dict[str, str]:
    """Greymap and CSV paths of map `name` at `step`"""
    stem = os.path.join(directory, f"{name}_step{step:06d}")
    return {"pgm": f"{stem}.pgm", "csv": f"{stem}.csv"}


def write_snapshot(directory: str, model, map_names: Iterable[str], step: int) -> List[str]:
    """Dump the named maps and all unit activities of `model` as of `step`"""
    written = []
    by_name = model.maps_by_name()
    for name in map_names:
        paths = snapshot_paths(directory, name, step)
        activity = model.field(by_name[name]).u
        write_pgm(paths["pgm"], activity)
        write_activity_csv(paths["csv"], activity)
        written.extend([paths["pgm"], paths["csv"]])

    units_path = os.path.join(directory, f"units_step{step:06d}.csv")
    network = model.network
    write_units(units_path, {u.name: network.activity(u) for u in network.unit_ids})
    written.append(units_path)
    logger.debug(f"Snapshot at step {step}: {len(written)} files in {directory}")
    return written


class TraceRecorder:
    """Model observer collecting one (step, move, switch) row per step"""

    def __init__(self):
        self.rows: List[Dict] = []

    def __call__(self, model) -> None:
        self.rows.append({
            "step": model.step_count,
            "move": repr(float(model.move_activity)),
            "switch": repr(float(model.switch_activity)),
        })


class SnapshotRecorder:
    """Model observer dumping the configured maps every `every` steps"""

    def __init__(self, directory: str, map_names: Iterable[str], every: int):
        self.directory = directory
        self.map_names = tuple(map_names)
        self.every = every
        self.count = 0

    def __call__(self, model) -> None:
        if model.step_count % self.every == 0:
            write_snapshot(self.directory, model, self.map_names, model.step_count)
            self.count += 1
