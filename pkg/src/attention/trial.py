"""
Trial loop and scanpath log
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from src.attention.model import (
    AttentionModel,
    attend_until_decision,
    perform_saccade,
    perform_switch,
)
from src.config import DEFAULT_MAX_ATTENDS, DEFAULT_MAX_STEPS
from src.errors import ConfigError
from src.scenario import Gaze, Point, World, world_position

logger = logging.getLogger(__name__)

# Steps held back from each decision for the switch or saccade that follows
SETTLE_RESERVE = 2


class EventKind(str, Enum):
    COVERT_ATTEND = "CovertAttend"
    SWITCH = "Switch"
    SACCADE = "Saccade"
    DONE = "Done"
    BUDGET = "Budget"


@dataclass(frozen=True)
class ScanEvent:
    step_index: int
    kind: EventKind
    retinal_location: Optional[Point]
    world_location: Optional[Point]
    move_activity: float
    switch_activity: float

    def to_dict(self) -> dict:
        return {
            'step': self.step_index,
            'kind': self.kind.value,
            'retinal': list(self.retinal_location) if self.retinal_location is not None else None,
            'world': list(self.world_location) if self.world_location is not None else None,
            'move': self.move_activity,
            'switch': self.switch_activity,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScanEvent":
        def point(value):
            return None if value is None else (float(value[0]), float(value[1]))

        return cls(
            step_index=int(data['step']),
            kind=EventKind(data['kind']),
            retinal_location=point(data.get('retinal')),
            world_location=point(data.get('world')),
            move_activity=float(data['move']),
            switch_activity=float(data['switch']),
        )


@dataclass(frozen=True)
class TrialLimits:
    max_attends: int = DEFAULT_MAX_ATTENDS
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.max_attends < 1:
            raise ConfigError("max_attends must be >= 1", "limits.max_attends")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1", "limits.max_steps")


@dataclass
class TrialLog:
    events: List[ScanEvent] = field(default_factory=list)
    initial_gaze: Optional[Point] = None
    final_gaze: Optional[Point] = None

    def append(self, event: ScanEvent) -> None:
        """Append an event, rejecting steps that do not strictly increase"""
        if self.events and event.step_index <= self.events[-1].step_index:
            raise ValueError(
                f"event {event.kind.value} at step {event.step_index} does not follow "
                f"step {self.events[-1].step_index}"
            )
        self.events.append(event)

    @property
    def outcome(self) -> Optional[EventKind]:
        if self.events and self.events[-1].kind in (EventKind.DONE, EventKind.BUDGET):
            return self.events[-1].kind
        return None

    def of_kind(self, kind: EventKind) -> List[ScanEvent]:
        return [e for e in self.events if e.kind == kind]

    def kinds(self) -> List[EventKind]:
        return [e.kind for e in self.events]

    def to_dict(self) -> dict:
        return {
            'initial_gaze': list(self.initial_gaze) if self.initial_gaze is not None else None,
            'final_gaze': list(self.final_gaze) if self.final_gaze is not None else None,
            'outcome': self.outcome.value if self.outcome else None,
            'events': [e.to_dict() for e in self.events],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrialLog":
        def point(value):
            return None if value is None else (float(value[0]), float(value[1]))

        log = cls(initial_gaze=point(data.get('initial_gaze')), final_gaze=point(data.get('final_gaze')))
        for item in data.get('events', []):
            log.append(ScanEvent.from_dict(item))
        return log


def _event(model: AttentionModel, kind: EventKind, step: int, location: Optional[Point],
           gaze: Gaze) -> ScanEvent:
    world = world_position(location, gaze, model.grid) if location is not None else None
    return ScanEvent(step, kind, location, world, model.move_activity, model.switch_activity)


def _target_foveated(model: AttentionModel, world: World, gaze: Gaze) -> bool:
    targets = [s for s in world.stimuli if model.target.matches(s.color, s.orientation)]
    if not targets:
        return False
    nearest = world.nearest(gaze.center)
    if nearest is None or nearest not in targets:
        return False
    return math.dist(nearest.world_pos, gaze.center) <= model.config.target_tolerance


def run_trial(model: AttentionModel, world: World, gaze: Gaze,
              limits: TrialLimits = TrialLimits()) -> TrialLog:
    """
    Scan covertly until the target is attended, then saccade to it

    Every decision is logged: CovertAttend for the attended location, then
    Switch (rejected) or Saccade (accepted) followed by Done or Budget.

    The network never runs past limits.max_steps. Decisions are sought with
    SETTLE_RESERVE steps held back, and a switch or saccade settles for
    refractory_steps or whatever is left of the limit, whichever is fewer.

    Args:
        model: The attention model, stepped in place
        world: Scene to search
        gaze: Initial gaze
        limits: Attend and step limits of the trial

    Returns:
        TrialLog: Events with strictly increasing step indices
    """
    log = TrialLog(initial_gaze=gaze.center)
    start = model.step_count
    fovea = (float(model.grid.center[0]), float(model.grid.center[1]))
    model.render(world, gaze)
    logger.info(f"Trial started with {len(world.stimuli)} stimuli, gaze {gaze.center}")

    def steps_left() -> int:
        return limits.max_steps - (model.step_count - start)

    attends = 0
    while attends < limits.max_attends:
        remaining = steps_left()
        if remaining <= SETTLE_RESERVE:
            model.run(max(0, remaining))
            break
        decision = attend_until_decision(model, world, gaze, remaining - SETTLE_RESERVE)
        if decision.kind == 'budget':
            continue
        attends += 1
        log.append(_event(model, EventKind.COVERT_ATTEND, decision.step, decision.location, gaze))
        settle = min(model.config.refractory_steps, steps_left())

        if decision.kind == 'switch':
            perform_switch(model, settle)
            log.append(_event(model, EventKind.SWITCH, model.step_count, decision.location, gaze))
            continue

        saccade_step = model.step_count + 1
        new_gaze = perform_saccade(model, world, gaze, settle)
        log.append(_event(model, EventKind.SACCADE, saccade_step, decision.location, gaze))
        outcome = EventKind.DONE if _target_foveated(model, world, new_gaze) else EventKind.BUDGET
        log.append(_event(model, outcome, model.step_count, fovea, new_gaze))
        log.final_gaze = new_gaze.center
        logger.info(f"Trial finished with {outcome.value} after {attends} attend(s)")
        return log

    last = log.events[-1].step_index if log.events else start
    log.append(_event(model, EventKind.BUDGET, max(model.step_count, last + 1), None, gaze))
    log.final_gaze = gaze.center
    logger.info(f"Trial exhausted its budget after {attends} attend(s)")
    return log
