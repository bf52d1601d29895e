"""
Main entry point for the attention field simulator
Subcommands:
1. run <config>: full trial, writes the scanpath log, trace and snapshots
2. snapshot <config> --step N: dumps every configured map at step N
3. validate <config>: checks a config without simulating
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from src.artifacts import SnapshotRecorder, TraceRecorder, write_log, write_snapshot, write_trace
from src.attention import EventKind, build_model, run_trial
from src.config import EXIT_BUDGET, EXIT_DONE, EXIT_ERROR, OUTPUT_DIR_ENV, get_env_var
from src.errors import ConfigError, SimulationError
from src.run_config import RunConfig, load_config

logger = logging.getLogger(__name__)


class _SnapshotReached(Exception):
    pass


class AttentionSimulator:
    def __init__(self, config: RunConfig, output_dir: Optional[str] = None):
        """Build the model for one run configuration"""
        self.config = config
        self.output_dir = output_dir or get_env_var(OUTPUT_DIR_ENV, config.output.directory)
        self.model = build_model(config.model, config.target)

    def run(self) -> int:
        """Run one trial and write its artifacts; returns the exit code"""
        os.makedirs(self.output_dir, exist_ok=True)
        output = self.config.output
        trace = TraceRecorder()
        snapshots = SnapshotRecorder(self.output_dir, output.maps, output.snapshot_every)
        self.model.observers.extend([trace, snapshots])

        self.model.render(self.config.world, self.config.gaze)
        write_snapshot(self.output_dir, self.model, output.maps, 0)
        log = run_trial(self.model, self.config.world, self.config.gaze, self.config.limits)

        write_log(os.path.join(self.output_dir, "scanpath.json"), log)
        write_trace(os.path.join(self.output_dir, "trace.csv"), trace.rows)

        print(f"Outcome: {log.outcome.value} after {self.model.step_count} steps")
        print(f"- Covert attends: {len(log.of_kind(EventKind.COVERT_ATTEND))}")
        print(f"- Switches: {len(log.of_kind(EventKind.SWITCH))}")
        print(f"- Snapshots: {snapshots.count + 1} in {os.path.abspath(self.output_dir)}")
        return EXIT_DONE if log.outcome == EventKind.DONE else EXIT_BUDGET

    def snapshot(self, step: int) -> List[str]:
        """Advance the trial to `step` and dump every configured map"""
        if step < 0:
            raise ConfigError("step must be >= 0", "--step")
        maps = self.config.output.maps
        written: List[str] = []

        def dump_at_step(model) -> None:
            if model.step_count == step:
                written.extend(write_snapshot(self.output_dir, model, maps, step))
                raise _SnapshotReached()

        self.model.render(self.config.world, self.config.gaze)
        if step == 0:
            return write_snapshot(self.output_dir, self.model, maps, 0)

        self.model.observers.append(dump_at_step)
        try:
            run_trial(self.model, self.config.world, self.config.gaze, self.config.limits)
            # the trial ended early: keep relaxing with the final input
            self.model.run(step - self.model.step_count)
        except _SnapshotReached:
            pass
        logger.info(f"Wrote {len(written)} snapshot files for step {step}")
        return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Covert/overt spatial attention field simulator")
    parser.add_argument("--output", help=f"output directory (overrides ${OUTPUT_DIR_ENV} and the config)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one trial")
    run.add_argument("config")

    snap = sub.add_parser("snapshot", help="dump all configured maps at one step")
    snap.add_argument("config")
    snap.add_argument("--step", type=int, required=True)

    validate = sub.add_parser("validate", help="check a config file")
    validate.add_argument("config")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: OK ({len(config.world.stimuli)} stimuli, target {config.target.to_dict()})")
            return EXIT_DONE

        simulator = AttentionSimulator(config, args.output)
        if args.command == "run":
            return simulator.run()
        written = simulator.snapshot(args.step)
        print(f"Wrote {len(written)} files to {os.path.abspath(simulator.output_dir)}")
        return EXIT_DONE
    except (SimulationError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
