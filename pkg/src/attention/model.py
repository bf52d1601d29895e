"""
Attention model: wiring of the feature and spatial pathways, decisions,
switches and saccades

Feature pathway: input[f] -> v4[f] -> it[f], with pf[f] holding the task
relevance of each feature. Spatial pathway: v4 -> saliency -> focus -> wm,
with the switch unit gating an inhibitory wm -> focus projection and the
anticipation map predicting the post-saccadic position of memorized
locations.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import DEFAULT_MODEL_CONFIG, ModelConfig, validate_config
from src.errors import InvalidParameterError, NoFocusError
from src.features import CHANNELS, FeatureChannel, TargetSpec
from src.fields.core import FieldMap, Grid, Peak, StepParams, count_bubbles, decode_peak, make_dog_kernel
from src.fields.network import (
    Afferent,
    FeatureMatch,
    Gated,
    MapId,
    Network,
    Readout,
    Remap,
    UnitId,
    match_drive,
)
from src.scenario import Gaze, Point, World, apply_saccade, render_channels

logger = logging.getLogger(__name__)

# A focus bubble whose centroid moves less than this stays the same episode
EPISODE_RADIUS = 2.0


@dataclass
class Episode:
    """
    One deployment of attention: a focus bubble tracked from its emergence

    move_run and switch_run count the consecutive steps the decision units
    have spent at or above threshold during this episode.
    """

    location: Point
    start_step: int
    consumed: bool = False
    move_run: int = 0
    switch_run: int = 0


@dataclass(frozen=True)
class Decision:
    kind: str  # 'move', 'switch' or 'budget'
    location: Optional[Point]
    step: int
    move_activity: float
    switch_activity: float


def move_switch_drive(it: Sequence[float], target: TargetSpec,
                      inhibition: float = DEFAULT_MODEL_CONFIG.lambda_inhibit) -> Tuple[float, float]:
    """(move_input, switch_input) for IT activities ordered (blue, green, deg45, deg135)"""
    return match_drive(list(it), [c in target.relevant for c in CHANNELS], inhibition)


class AttentionModel:
    def __init__(self, network: Network, target: TargetSpec, config: ModelConfig):
        self.network = network
        self.target = target
        self.config = config
        self.grid = Grid(config.grid_width, config.grid_height)

        lookup = network.lookup
        self.input: Dict[FeatureChannel, MapId] = {c: lookup(f"input_{c.value}") for c in CHANNELS}
        self.v4: Dict[FeatureChannel, MapId] = {c: lookup(f"v4_{c.value}") for c in CHANNELS}
        self.pf: Dict[FeatureChannel, UnitId] = {c: lookup(f"pf_{c.value}") for c in CHANNELS}
        self.it: Dict[FeatureChannel, UnitId] = {c: lookup(f"it_{c.value}") for c in CHANNELS}
        self.saliency: MapId = lookup("saliency")
        self.focus: MapId = lookup("focus")
        self.wm: MapId = lookup("wm")
        self.anticipation: MapId = lookup("anticipation")
        self.move: UnitId = lookup("move")
        self.switch: UnitId = lookup("switch")

        self.step_count = 0
        self.episode: Optional[Episode] = None
        self.focus_present = False
        self.world = World()
        self.gaze = Gaze()
        self.observers: List[Callable[["AttentionModel"], None]] = []

    # ------------------------------------------------------------------ state

    @property
    def move_activity(self) -> float:
        return self.network.activity(self.move)

    @property
    def switch_activity(self) -> float:
        return self.network.activity(self.switch)

    def field(self, map_id: MapId) -> FieldMap:
        return self.network.field(map_id)

    def focus_peak(self) -> Optional[Peak]:
        """Strongest focus bubble above theta_bubble, if any"""
        return decode_peak(self.field(self.focus), self.config.theta_bubble)

    def bubbles(self, map_id: MapId) -> List[Peak]:
        return count_bubbles(self.field(map_id), self.config.theta_bubble)

    def maps_by_name(self) -> Dict[str, MapId]:
        return {m.name: m for m in self.network.map_ids}

    def render(self, world: World, gaze: Gaze) -> None:
        """Set the input channels to the retinal image of `world` seen from `gaze`"""
        self.world = world
        self.gaze = gaze
        channels = render_channels(world, gaze, self.config.sigma_stim, self.grid)
        for channel, activity in channels.items():
            self.network.set_activity(self.input[channel], activity)

    def reset(self) -> None:
        """Zero every map and unit except the task relevance, and restart the clock"""
        network = self.network
        network.clear(*network.map_ids)
        network.clear(*(u for u in network.unit_ids if u not in self.pf.values()))
        self.step_count = 0
        self.episode = None
        self.focus_present = False
        self.world = World()
        self.gaze = Gaze()

    def set_target(self, target: TargetSpec) -> None:
        """Switch the task: PF units take the relevance pattern of `target`"""
        self.target = target
        for channel, value in zip(CHANNELS, target.pf_pattern()):
            self.network.set_activity(self.pf[channel], value)

    # ------------------------------------------------------------------ dynamics

    def step(self, overrides=None) -> None:
        """
        Advance the network one step, then track the focus and notify observers

        Args:
            overrides: Optional input replacing the projections into a map, by map id
        """
        self.network.step(overrides=overrides)
        self.step_count += 1
        self._track_focus()
        logger.debug(f"step {self.step_count}: move={self.move_activity:.3f} switch={self.switch_activity:.3f}")
        for observer in self.observers:
            observer(self)

    def _track_focus(self) -> None:
        peak = self.focus_peak()
        self.focus_present = peak is not None
        if peak is not None:
            episode = self.episode
            if episode is None or math.dist(peak.location, episode.location) > EPISODE_RADIUS:
                self.episode = Episode(peak.location, self.step_count)
            else:
                episode.location = peak.location

        # Evidence keeps accumulating between decisions, refractory steps included
        episode = self.episode
        if episode is None or episode.consumed:
            return
        config = self.config
        switch_on = self.switch_activity >= config.theta_switch
        move_on = self.move_activity >= config.theta_move and self.focus_present
        episode.switch_run = episode.switch_run + 1 if switch_on else 0
        episode.move_run = episode.move_run + 1 if move_on else 0

    def run(self, steps: int) -> None:
        """Take `steps` steps"""
        for _ in range(steps):
            self.step()


def eccentricity_resting_level(grid: Grid, bias: float) -> np.ndarray:
    """
    Resting level falling linearly with distance from the fovea

    0 at the foveal cell and -bias at the farthest cell, so that of two equally
    salient stimuli the one nearer the fovea wins the focus.
    """
    cx, cy = grid.center
    ys, xs = np.indices(grid.shape, dtype=np.float64)
    distance = np.hypot(xs - cx, ys - cy)
    farthest = float(distance.max())
    if farthest == 0.0:
        return np.zeros(grid.shape)
    return -bias * distance / farthest


def build_model(config: ModelConfig = DEFAULT_MODEL_CONFIG,
                target: TargetSpec = TargetSpec.of(("blue", "deg45"))) -> AttentionModel:
    """Wire the feature and spatial pathways"""
    validate_config(config)
    grid = Grid(config.grid_width, config.grid_height)
    network = Network(StepParams(config.dt))

    fk, wk = config.focus_kernel, config.wm_kernel
    focus_kernel = make_dog_kernel(fk.a_exc, fk.sigma_exc, fk.a_inh, fk.sigma_inh, fk.effective_radius,
                                   fk.global_inhibition)
    wm_kernel = make_dog_kernel(wk.a_exc, wk.sigma_exc, wk.a_inh, wk.sigma_inh, wk.effective_radius,
                                wk.global_inhibition)

    inputs, v4, pf, it = {}, {}, {}, {}
    for c in CHANNELS:
        inputs[c] = network.add_map(f"input_{c.value}", grid, config.tau_v4, passive=True)
    for c in CHANNELS:
        v4[c] = network.add_map(f"v4_{c.value}", grid, config.tau_v4)
    for c in CHANNELS:
        pf[c] = network.add_unit(f"pf_{c.value}", config.tau_unit, passive=True)
    for c in CHANNELS:
        it[c] = network.add_unit(f"it_{c.value}", config.tau_unit)
    saliency = network.add_map("saliency", grid, config.tau_saliency)
    focus = network.add_map("focus", grid, config.tau_focus, kernel=focus_kernel,
                            resting_level=eccentricity_resting_level(grid, config.focus_eccentricity_bias))
    wm = network.add_map("wm", grid, config.tau_wm, kernel=wm_kernel, resting_level=config.wm_resting)
    anticipation = network.add_map("anticipation", grid, config.tau_anticipation, passive=True)
    move = network.add_unit("move", config.tau_unit)
    switch = network.add_unit("switch", config.tau_unit)

    # Feature maps: bottom-up drive, feature bias, spatial bias
    for c in CHANNELS:
        network.connect(Afferent(inputs[c], v4[c], config.g_input_v4))
        network.connect(Gated(inputs[c], pf[c], v4[c], config.g_pf_v4))
        network.connect(Gated(inputs[c], focus, v4[c], config.g_focus_v4))

    # Spatial pathway
    for c in CHANNELS:
        network.connect(Afferent(v4[c], saliency, config.g_v4_sal))
    network.connect(Afferent(saliency, focus, config.g_sal_focus))
    network.connect(Gated(wm, switch, focus, -config.g_wm_switch_inhibit))
    network.connect(Afferent(focus, wm, config.g_focus_wm))
    network.connect(Remap(wm, focus, anticipation, 1.0))

    # Feature pathway and decision units
    for c in CHANNELS:
        network.connect(Readout(v4[c], it[c], config.g_it_readout))
    evidence = tuple(it[c] for c in CHANNELS)
    relevance = tuple(pf[c] for c in CHANNELS)
    network.connect(FeatureMatch(evidence, relevance, move, config.g_move, "move", config.lambda_inhibit))
    network.connect(FeatureMatch(evidence, relevance, switch, config.g_switch, "switch", config.lambda_inhibit))

    model = AttentionModel(network, target, config)
    model.set_target(target)
    logger.info(
        f"Built attention model on {grid.width}x{grid.height}: {len(network.map_ids)} maps, "
        f"{len(network.unit_ids)} units, {len(network.projections)} projections; "
        f"target {target.color.value}/{target.orientation.value}"
    )
    return model


def attend_until_decision(model: AttentionModel, world: World, gaze: Gaze, budget: int) -> Decision:
    """
    Step until the switch or move unit stays above threshold for hold_steps

    Evidence is attached to the current attention episode and restarts when a
    new focus bubble emerges; a bubble that emerged during the previous
    refractory period keeps what it gathered there. Move evidence also needs
    the bubble to be present. Ties go to switch.

    Args:
        model: The attention model, stepped in place
        world: Scene to render when it differs from the current one
        gaze: Gaze to render from
        budget: Maximum number of steps

    Returns:
        Decision: 'move', 'switch' or 'budget'
    """
    config = model.config
    if world is not model.world or gaze != model.gaze:
        model.render(world, gaze)

    for _ in range(max(0, budget)):
        model.step()
        episode = model.episode
        if episode is None or episode.consumed:
            continue

        move, switch = model.move_activity, model.switch_activity
        kind = None
        if episode.switch_run >= config.hold_steps:
            kind = 'switch'
        elif episode.move_run >= config.hold_steps:
            kind = 'move'
        if kind is not None:
            episode.consumed = True
            logger.info(
                f"Decision {kind} at step {model.step_count}: location "
                f"({episode.location[0]:.2f}, {episode.location[1]:.2f}), move={move:.3f}, switch={switch:.3f}"
            )
            return Decision(kind, episode.location, model.step_count, move, switch)

    logger.info(f"No decision within budget (step {model.step_count})")
    return Decision('budget', None, model.step_count, model.move_activity, model.switch_activity)


def perform_switch(model: AttentionModel, steps: Optional[int] = None) -> None:
    """
    Let the switch-gated wm -> focus inhibition act

    Args:
        model: The attention model, stepped in place
        steps: Settling steps, refractory_steps when None
    """
    steps = model.config.refractory_steps if steps is None else steps
    if steps < 1:
        raise InvalidParameterError(f"a switch needs at least one step, got {steps}")
    model.run(steps)
    peak = model.focus_peak()
    if peak is None:
        logger.info("Switch left the focus empty")
    else:
        logger.info(f"Switch moved focus to ({peak.location[0]:.2f}, {peak.location[1]:.2f})")


def _normalized(u: np.ndarray) -> np.ndarray:
    peak = float(u.max())
    if peak <= 0.0:
        return np.zeros_like(u)
    return u / peak


def perform_saccade(model: AttentionModel, world: World, gaze: Gaze, steps: Optional[int] = None) -> Gaze:
    """
    Saccade to the focus bubble and rebuild working memory in the new frame

    The anticipation (memory correlated with the saccade target, pre-saccadic
    state) is combined multiplicatively with the normalized post-saccadic
    saliency to drive wm for the settling steps.

    Args:
        model: The attention model, stepped in place
        world: Scene to render from the new gaze
        gaze: Gaze before the saccade
        steps: Settling steps, refractory_steps when None; at least 2

    Returns:
        Gaze: The post-saccadic gaze

    Raises:
        NoFocusError: If the focus map holds no bubble
    """
    config = model.config
    network = model.network
    steps = config.refractory_steps if steps is None else steps
    if steps < 2:
        raise InvalidParameterError(f"a saccade needs at least two settling steps, got {steps}")
    peak = model.focus_peak()
    if peak is None:
        raise NoFocusError("saccade requested but the focus map holds no bubble")

    cx, cy = model.grid.center
    vector = (peak.location[0] - cx, peak.location[1] - cy)

    anticipation = _normalized(np.clip(network.compute_input(model.anticipation), 0.0, None))
    network.set_activity(model.anticipation, anticipation)

    new_gaze = apply_saccade(gaze, vector)
    logger.info(
        f"Saccade by ({vector[0]:.2f}, {vector[1]:.2f}): gaze "
        f"({gaze.center[0]:.2f}, {gaze.center[1]:.2f}) -> ({new_gaze.center[0]:.2f}, {new_gaze.center[1]:.2f})"
    )
    model.render(world, new_gaze)
    network.clear(model.focus, model.saliency, model.wm, *model.v4.values())
    model.episode = None
    model.focus_present = False

    for _ in range(steps):
        salience = _normalized(network.activity(model.saliency))
        drive = config.g_anticipation * anticipation * salience
        model.step(overrides={model.wm: drive})

    logger.info(f"Working memory rebuilt with {len(model.bubbles(model.wm))} bubble(s)")
    return new_gaze
