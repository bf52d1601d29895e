"""
Tests for artifact writers and the command line
"""

import csv
import filecmp
import json
import os
import tempfile
import unittest
from unittest import mock

import numpy as np
from numpy.testing import assert_array_equal

from main import main
from src.artifacts import pgm_bytes, read_log, write_activity_csv, write_pgm, write_trace
from src.attention import EventKind
from src.config import EXIT_BUDGET, EXIT_DONE, EXIT_ERROR, OUTPUT_DIR_ENV
from src.fields import FieldMap, Grid, count_bubbles

TARGET_ONLY = {
    "target": ["blue", "deg45"],
    "scene": {"stimuli": [{"position": [8, 3], "color": "blue", "orientation": "deg45"}]},
    "output": {"snapshot_every": 25, "maps": ["saliency", "focus", "wm"]},
}

TWO_DISTRACTORS = {
    "target": ["blue", "deg45"],
    "scene": {"stimuli": [
        {"position": [-9, 6], "color": "green", "orientation": "deg135"},
        {"position": [10, -7], "color": "blue", "orientation": "deg135"},
    ]},
    "limits": {"max_attends": 8, "max_steps": 300},
    "output": {"snapshot_every": 100, "maps": ["saliency", "focus", "wm", "anticipation"]},
}


def read_activity_csv(path, shape=(40, 40)):
    u = np.zeros(shape)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            u[int(row["y"]), int(row["x"])] = float(row["u"])
    return u


class TestWriters(unittest.TestCase):
    def setUp(self):
        """Scratch directory"""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_pgm_encoding(self):
        """P5 header then round(255 u) per cell, row by row"""
        u = np.array([[0.0, 0.5, 1.0], [0.2, 0.999, 0.001]])
        data = pgm_bytes(u)
        header = b"P5\n3 2\n255\n"
        self.assertTrue(data.startswith(header))
        self.assertEqual(list(data[len(header):]), [0, 128, 255, 51, 255, 0])

    def test_pgm_zero_field(self):
        """A zero field is an all-black image"""
        path = os.path.join(self.tmp.name, "zero.pgm")
        write_pgm(path, np.zeros((40, 40)))
        with open(path, "rb") as f:
            data = f.read()
        self.assertEqual(data, b"P5\n40 40\n255\n" + bytes(1600))

    def test_activity_csv_is_exact(self):
        """Raw activities survive the CSV sidecar bit for bit"""
        u = np.random.default_rng(3).random((5, 7))
        path = os.path.join(self.tmp.name, "u.csv")
        write_activity_csv(path, u)
        assert_array_equal(read_activity_csv(path, (5, 7)), u)

    def test_trace_header(self):
        """The trace has columns step, move, switch"""
        path = os.path.join(self.tmp.name, "nested", "trace.csv")
        write_trace(path, [{"step": 1, "move": "0.1", "switch": "0.0"}])
        with open(path) as f:
            self.assertEqual(f.readline().strip(), "step,move,switch")
        self.assertEqual(os.listdir(os.path.dirname(path)), ["trace.csv"])


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        """Scratch directory with two configs"""
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.target_only = self.write("target_only.json", TARGET_ONLY)
        self.distractors = self.write("distractors.json", TWO_DISTRACTORS)

    def write(self, name, data):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            json.dump(data, f)
        return path

    def out(self, name):
        return os.path.join(self.tmp.name, name)

    def test_validate(self):
        """validate accepts a good config and rejects a bad one"""
        self.assertEqual(main(["validate", self.target_only]), EXIT_DONE)
        bad = self.write("bad.json", {"target": ["blue"], "scene": {}})
        self.assertEqual(main(["validate", bad]), EXIT_ERROR)

    def test_run_target_only(self):
        """A lone target ends Done and writes every artifact"""
        out = self.out("run")
        self.assertEqual(main(["--output", out, "run", self.target_only]), EXIT_DONE)
        log = read_log(os.path.join(out, "scanpath.json"))
        self.assertEqual(log.kinds()[-2:], [EventKind.SACCADE, EventKind.DONE])
        with open(os.path.join(out, "trace.csv"), newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(list(rows[0].keys()), ["step", "move", "switch"])
        self.assertEqual([int(r["step"]) for r in rows], list(range(1, len(rows) + 1)))
        self.assertTrue(os.path.exists(os.path.join(out, "focus_step000025.pgm")))
        self.assertTrue(os.path.exists(os.path.join(out, "units_step000000.csv")))

    def test_run_empty_scene_is_budget(self):
        """No stimuli exits with the budget status"""
        empty = self.write("empty.json", {"target": ["blue", "deg45"], "scene": {"stimuli": []},
                                          "limits": {"max_steps": 100}})
        self.assertEqual(main(["--output", self.out("empty"), "run", empty]), EXIT_BUDGET)

    def test_run_is_byte_identical(self):
        """Two runs of one config produce identical files"""
        a, b = self.out("a"), self.out("b")
        main(["--output", a, "run", self.distractors])
        main(["--output", b, "run", self.distractors])
        names = sorted(os.listdir(a))
        self.assertEqual(names, sorted(os.listdir(b)))
        match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        self.assertEqual(mismatch + errors, [])

    def test_output_env_override(self):
        """The environment variable redirects output when no flag is given"""
        out = self.out("from_env")
        with mock.patch.dict(os.environ, {OUTPUT_DIR_ENV: out}):
            self.assertEqual(main(["snapshot", self.target_only, "--step", "0"]), EXIT_DONE)
        self.assertTrue(os.path.exists(os.path.join(out, "saliency_step000000.pgm")))

    def test_snapshot_step_zero(self):
        """At step 0 every dynamic map is black"""
        out = self.out("snap0")
        self.assertEqual(main(["--output", out, "snapshot", self.distractors, "--step", "0"]), EXIT_DONE)
        for name in ("saliency", "focus", "wm", "anticipation"):
            with open(os.path.join(out, f"{name}_step000000.pgm"), "rb") as f:
                self.assertEqual(f.read(), b"P5\n40 40\n255\n" + bytes(1600))

    def test_snapshot_mid_trial(self):
        """Mid-trial saliency shows both stimuli and focus at most one bubble"""
        out = self.out("snap40")
        self.assertEqual(main(["--output", out, "snapshot", self.distractors, "--step", "40"]), EXIT_DONE)
        grid = Grid()
        saliency = read_activity_csv(os.path.join(out, "saliency_step000040.csv"))
        focus = read_activity_csv(os.path.join(out, "focus_step000040.csv"))
        self.assertEqual(len(count_bubbles(FieldMap(grid, saliency), 0.2)), 2)
        self.assertLessEqual(len(count_bubbles(FieldMap(grid, focus), 0.5)), 1)
        with open(os.path.join(out, "units_step000040.csv"), newline="") as f:
            units = [row["unit"] for row in csv.DictReader(f)]
        self.assertIn("switch", units)
        self.assertEqual(len(units), 10)

    def test_snapshot_past_the_trial(self):
        """Steps beyond the end of the trial keep relaxing the network"""
        out = self.out("late")
        self.assertEqual(main(["--output", out, "snapshot", self.distractors, "--step", "350"]), EXIT_DONE)
        self.assertTrue(os.path.exists(os.path.join(out, "wm_step000350.pgm")))

    def test_missing_config(self):
        """A missing config exits with the error status"""
        self.assertEqual(main(["run", self.out("nope.json")]), EXIT_ERROR)


if __name__ == '__main__':
    unittest.main()
