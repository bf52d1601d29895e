"""
Synthetic stimulus world, retinal rendering and gaze kinematics

World and retina share one metric: one world cell is one retinal cell. A
stimulus at world position p seen with gaze g lands on retinal cell
p - g + fovea.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ConfigError, InvalidParameterError
from src.features import CHANNELS, COLORS, ORIENTATIONS, FeatureChannel
from src.fields.core import Grid, gaussian_bubble

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

MIN_SEPARATION = 3.0


@dataclass(frozen=True)
class Stimulus:
    world_pos: Point
    color: FeatureChannel
    orientation: FeatureChannel

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.world_pos):
            raise InvalidParameterError(f"stimulus position must be finite, got {self.world_pos}")
        if self.color not in COLORS:
            raise InvalidParameterError(f"{self.color} is not a color channel")
        if self.orientation not in ORIENTATIONS:
            raise InvalidParameterError(f"{self.orientation} is not an orientation channel")

    @property
    def channels(self) -> Tuple[FeatureChannel, FeatureChannel]:
        """(color, orientation)"""
        return (self.color, self.orientation)

    def to_dict(self) -> dict:
        return {
            'position': [self.world_pos[0], self.world_pos[1]],
            'color': self.color.value,
            'orientation': self.orientation.value,
        }


@dataclass(frozen=True)
class World:
    stimuli: Tuple[Stimulus, ...] = ()
    extent: Optional[Tuple[float, float, float, float]] = None

    def __post_init__(self):
        stimuli = tuple(self.stimuli)
        object.__setattr__(self, 'stimuli', stimuli)
        for i, a in enumerate(stimuli):
            for b in stimuli[i + 1:]:
                if _distance(a.world_pos, b.world_pos) < MIN_SEPARATION:
                    raise ConfigError(
                        f"stimuli at {a.world_pos} and {b.world_pos} are closer than "
                        f"{MIN_SEPARATION} world cells",
                        "scene.stimuli",
                    )
        if self.extent is None and stimuli:
            xs = [s.world_pos[0] for s in stimuli]
            ys = [s.world_pos[1] for s in stimuli]
            object.__setattr__(self, 'extent', (min(xs), min(ys), max(xs), max(ys)))

    def nearest(self, point: Point) -> Optional[Stimulus]:
        """Stimulus closest to `point` in world coordinates, None for an empty scene"""
        if not self.stimuli:
            return None
        return min(self.stimuli, key=lambda s: _distance(s.world_pos, point))


@dataclass(frozen=True)
class Gaze:
    center: Point = (0.0, 0.0)

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.center):
            raise InvalidParameterError(f"gaze must be finite, got {self.center}")


def _distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def retinal_position(point: Point, gaze: Gaze, grid: Grid) -> Point:
    """World point -> retinal cell coordinates"""
    fx, fy = grid.center
    return (point[0] - gaze.center[0] + fx, point[1] - gaze.center[1] + fy)


def world_position(location: Point, gaze: Gaze, grid: Grid) -> Point:
    """Retinal cell coordinates -> world point"""
    fx, fy = grid.center
    return (location[0] - fx + gaze.center[0], location[1] - fy + gaze.center[1])


def visible_stimuli(world: World, gaze: Gaze, grid: Grid) -> List[Tuple[Stimulus, Point]]:
    """Stimuli whose retinal position lies on the grid, with that position"""
    visible = []
    for stimulus in world.stimuli:
        r = retinal_position(stimulus.world_pos, gaze, grid)
        if grid.contains(*r):
            visible.append((stimulus, r))
    return visible


def render_channels(world: World, gaze: Gaze, sigma_stim: float = 1.5,
                    grid: Grid = Grid()) -> Dict[FeatureChannel, np.ndarray]:
    """
    Four feature channels of the retinal image

    Each visible stimulus adds a unit-amplitude gaussian at its retinal
    position to its color channel and its orientation channel. Overlaps sum;
    channels are clamped to [0, 1].
    """
    if not sigma_stim > 0:
        raise InvalidParameterError(f"sigma_stim must be positive, got {sigma_stim}")
    channels = {c: np.zeros(grid.shape, dtype=np.float64) for c in CHANNELS}
    for stimulus, r in visible_stimuli(world, gaze, grid):
        blob = gaussian_bubble(grid, r, sigma_stim)
        for channel in stimulus.channels:
            channels[channel] += blob
    return {c: np.clip(u, 0.0, 1.0) for c, u in channels.items()}


def apply_saccade(gaze: Gaze, v: Point) -> Gaze:
    """
    Shift the gaze by a saccade vector

    Args:
        gaze: Gaze before the saccade
        v: Saccade vector in cells, from the fovea to the saccade target

    Returns:
        Gaze: The new gaze, g + v

    Raises:
        InvalidParameterError: If a component of `v` is not finite
    """
    if not all(math.isfinite(c) for c in v):
        raise InvalidParameterError(f"saccade vector must be finite, got {v}")
    return Gaze((gaze.center[0] + v[0], gaze.center[1] + v[1]))
