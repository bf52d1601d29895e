"""
Projection network over named neural fields and scalar units

Inputs I(x, t) are the ordered sum of projection contributions, each of which
is either a weighted sum of afferent activity or a weighted product of
activities (gating, remapping correlation). Stepping is synchronous: every
input is evaluated on the pre-step state before any state advances.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import signal

from src.errors import DuplicateNameError, InvalidParameterError, UnknownIdError
from src.fields.core import FieldMap, Grid, LateralKernel, StepParams, euler_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MapId:
    index: int
    name: str


@dataclass(frozen=True)
class UnitId:
    index: int
    name: str


NodeId = Union[MapId, UnitId]


@dataclass(frozen=True, eq=False)
class Afferent:
    """weight * source, optionally convolved with a small spread kernel"""

    source: NodeId
    target: NodeId
    weight: float
    spread: Optional[np.ndarray] = None


@dataclass(frozen=True)
class Gated:
    """weight * source(x) * modulator(x); a unit modulator is broadcast"""

    source: MapId
    modulator: NodeId
    target: MapId
    weight: float


@dataclass(frozen=True)
class Remap:
    """weight * remap_correlate(memory, displacement, fovea)"""

    memory: MapId
    displacement: MapId
    target: MapId
    weight: float


@dataclass(frozen=True)
class Readout:
    """weight * spatial maximum of a map, into a scalar unit"""

    source: MapId
    target: UnitId
    weight: float


@dataclass(frozen=True)
class FeatureMatch:
    """
    weight * match/mismatch evidence, into a decision unit

    `evidence` and `relevance` are parallel per-feature units; a feature is
    relevant while its relevance unit is at or above 0.5.
    """

    evidence: Tuple[UnitId, ...]
    relevance: Tuple[UnitId, ...]
    target: UnitId
    weight: float
    role: str = "move"
    inhibition: float = 0.5


Projection = Union[Afferent, Gated, Remap, Readout, FeatureMatch]


@dataclass
class ScalarUnit:
    tau: float
    activity: float = 0.0
    passive: bool = False
    name: str = ""


@dataclass
class _MapSlot:
    field: FieldMap
    kernel: Optional[LateralKernel]
    passive: bool


def remap_correlate(memory: FieldMap, displacement: FieldMap,
                    center: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """
    A(z) = sum_c memory(z + c - center) * displacement(c)

    A point mass of displacement at c shifts the memory by -(c - center);
    memory outside the grid reads as zero.
    """
    if memory.grid != displacement.grid:
        raise InvalidParameterError("remap needs memory and displacement on the same grid")
    grid = memory.grid
    cx, cy = grid.center if center is None else center
    full = signal.correlate2d(memory.u, displacement.u, mode='full', boundary='fill', fillvalue=0.0)
    row0 = grid.height - 1 - cy
    col0 = grid.width - 1 - cx
    return np.ascontiguousarray(full[row0:row0 + grid.height, col0:col0 + grid.width])


def match_drive(evidence: Sequence[float], relevant: Sequence[bool], inhibition: float) -> Tuple[float, float]:
    """
    Move and switch drives from per-feature evidence

    match = min over relevant features, mismatch = max over the others;
    move = match - inhibition * mismatch,
    switch = mismatch + (1 - match) - inhibition * match, both floored at 0.
    """
    matched = [e for e, r in zip(evidence, relevant) if r]
    unmatched = [e for e, r in zip(evidence, relevant) if not r]
    match = min(matched) if matched else 0.0
    mismatch = max(unmatched) if unmatched else 0.0
    move = max(0.0, match - inhibition * mismatch)
    switch = max(0.0, mismatch + (1.0 - match) - inhibition * match)
    return move, switch


class Network:
    def __init__(self, params: StepParams = StepParams()):
        self.params = params
        self._maps: Dict[MapId, _MapSlot] = {}
        self._units: Dict[UnitId, ScalarUnit] = {}
        self._names: Dict[str, NodeId] = {}
        self.projections: List[Projection] = []
        self._incoming: Dict[NodeId, List[Projection]] = {}

    # ------------------------------------------------------------------ build

    def _register(self, name: str, node: NodeId) -> None:
        if name in self._names:
            raise DuplicateNameError(f"'{name}' is already registered")
        self._names[name] = node
        self._incoming[node] = []

    def add_map(self, name: str, grid: Grid, tau: float, kernel: Optional[LateralKernel] = None,
                resting_level: Union[float, np.ndarray] = 0.0, passive: bool = False) -> MapId:
        """
        Register a map with zeroed activity

        Args:
            name: Unique name across maps and units
            grid: Grid of the map
            tau: Time constant
            kernel: Lateral interaction, or None for none
            resting_level: Scalar or per-cell resting level h
            passive: Passive maps are set externally and never stepped

        Returns:
            MapId: Handle of the new map
        """
        if np.ndim(resting_level) and np.shape(resting_level) != grid.shape:
            raise InvalidParameterError(
                f"resting level shape {np.shape(resting_level)} does not match grid {grid.shape}")
        map_id = MapId(len(self._names), name)
        self._register(name, map_id)
        self._maps[map_id] = _MapSlot(
            FieldMap.zeros(grid, tau, resting_level=resting_level, name=name), kernel, passive)
        return map_id

    def add_unit(self, name: str, tau: float, passive: bool = False) -> UnitId:
        """Register a scalar unit at activity 0; passive units are never stepped"""
        unit_id = UnitId(len(self._names), name)
        self._register(name, unit_id)
        self._units[unit_id] = ScalarUnit(tau=tau, passive=passive, name=name)
        return unit_id

    def _check(self, node: NodeId, kind: Optional[type] = None) -> None:
        known = node in self._maps or node in self._units
        if not known:
            raise UnknownIdError(f"unknown id {node!r}")
        if kind is not None and not isinstance(node, kind):
            raise UnknownIdError(f"{node.name} is not a {kind.__name__}")

    def connect(self, projection: Projection) -> None:
        """Validate the referenced ids and append the projection"""
        if isinstance(projection, Afferent):
            self._check(projection.source)
            self._check(projection.target)
            if isinstance(projection.source, MapId) and isinstance(projection.target, UnitId):
                raise InvalidParameterError("use Readout to project a map onto a unit")
            if projection.spread is not None:
                spread = np.asarray(projection.spread)
                if not isinstance(projection.source, MapId):
                    raise InvalidParameterError("a spread kernel needs a map source")
                # 'same' convolution is only centered for odd sizes
                if spread.ndim != 2 or spread.shape[0] % 2 == 0 or spread.shape[1] % 2 == 0:
                    raise InvalidParameterError(f"spread kernel must be 2D with odd sizes, got shape {spread.shape}")
        elif isinstance(projection, Gated):
            self._check(projection.source, MapId)
            self._check(projection.modulator)
            self._check(projection.target, MapId)
        elif isinstance(projection, Remap):
            self._check(projection.memory, MapId)
            self._check(projection.displacement, MapId)
            self._check(projection.target, MapId)
        elif isinstance(projection, Readout):
            self._check(projection.source, MapId)
            self._check(projection.target, UnitId)
        elif isinstance(projection, FeatureMatch):
            if len(projection.evidence) != len(projection.relevance):
                raise InvalidParameterError("evidence and relevance units must pair up")
            for node in projection.evidence + projection.relevance:
                self._check(node, UnitId)
            self._check(projection.target, UnitId)
            if projection.role not in ("move", "switch"):
                raise InvalidParameterError(f"unknown role '{projection.role}'")
        else:
            raise InvalidParameterError(f"unsupported projection {projection!r}")
        self.projections.append(projection)
        self._incoming[projection.target].append(projection)

    # ------------------------------------------------------------------ state

    def lookup(self, name: str) -> NodeId:
        """
        Find a map or unit by name

        Args:
            name: Registered name

        Returns:
            NodeId: The MapId or UnitId

        Raises:
            UnknownIdError: If nothing is registered under the name
        """
        try:
            return self._names[name]
        except KeyError:
            raise UnknownIdError(f"no map or unit named '{name}'")

    @property
    def map_ids(self) -> List[MapId]:
        return list(self._maps)

    @property
    def unit_ids(self) -> List[UnitId]:
        return list(self._units)

    def field(self, map_id: MapId) -> FieldMap:
        """Current state of a map"""
        self._check(map_id, MapId)
        return self._maps[map_id].field

    def kernel(self, map_id: MapId) -> Optional[LateralKernel]:
        self._check(map_id, MapId)
        return self._maps[map_id].kernel

    def unit(self, unit_id: UnitId) -> ScalarUnit:
        """Current state of a scalar unit"""
        self._check(unit_id, UnitId)
        return self._units[unit_id]

    def activity(self, node: NodeId):
        """Activity array of a map, or activity value of a unit"""
        if isinstance(node, MapId):
            return self.field(node).u
        return self.unit(node).activity

    def set_activity(self, node: NodeId, value) -> None:
        """
        Overwrite the activity of a map or unit, clamped to its bounds

        Args:
            node: Map or unit id
            value: Array of the grid shape for a map, a number for a unit

        Raises:
            UnknownIdError: If `node` is not part of this network
        """
        if isinstance(node, MapId):
            slot = self._maps[node] if node in self._maps else None
            if slot is None:
                raise UnknownIdError(f"unknown id {node!r}")
            slot.field = slot.field.with_activity(value)
        else:
            self.unit(node).activity = float(np.clip(value, 0.0, 1.0))

    def clear(self, *nodes: NodeId) -> None:
        """Reset the given maps and units to zero"""
        for node in nodes:
            if isinstance(node, MapId):
                self.set_activity(node, np.zeros(self.field(node).grid.shape))
            else:
                self.set_activity(node, 0.0)

    # ------------------------------------------------------------------ dynamics

    def _contribution(self, projection: Projection, target: NodeId):
        if isinstance(projection, Afferent):
            value = self.activity(projection.source)
            if projection.spread is not None and isinstance(projection.source, MapId):
                value = signal.convolve2d(value, projection.spread, mode='same', boundary='fill')
            if isinstance(target, MapId) and isinstance(projection.source, UnitId):
                return np.full(self.field(target).grid.shape, projection.weight * value)
            return projection.weight * value
        if isinstance(projection, Gated):
            return projection.weight * self.activity(projection.source) * self.activity(projection.modulator)
        if isinstance(projection, Remap):
            return projection.weight * remap_correlate(self.field(projection.memory),
                                                       self.field(projection.displacement))
        if isinstance(projection, Readout):
            return projection.weight * float(np.max(self.activity(projection.source)))
        move, switch = match_drive(
            [self.activity(u) for u in projection.evidence],
            [self.activity(u) >= 0.5 for u in projection.relevance],
            projection.inhibition,
        )
        return projection.weight * (move if projection.role == "move" else switch)

    def compute_input(self, target: NodeId):
        """Sum of incoming contributions on the current state, in projection order"""
        self._check(target)
        if isinstance(target, MapId):
            total = np.zeros(self.field(target).grid.shape, dtype=np.float64)
        else:
            total = 0.0
        for projection in self._incoming[target]:
            total = total + self._contribution(projection, target)
        return total

    def step(self, params: Optional[StepParams] = None,
             overrides: Optional[Dict[NodeId, object]] = None) -> None:
        """
        Advance every non-passive map and unit by one Euler step

        `overrides` replaces the computed input of the given nodes for this step.
        """
        params = params or self.params
        overrides = overrides or {}
        for map_id, slot in self._maps.items():
            if not slot.passive:
                params.check(map_id.name, slot.field.tau)
        for unit_id, unit in self._units.items():
            if not unit.passive:
                params.check(unit_id.name, unit.tau)

        map_inputs = {
            map_id: overrides[map_id] if map_id in overrides else self.compute_input(map_id)
            for map_id, slot in self._maps.items() if not slot.passive
        }
        unit_inputs = {
            unit_id: float(overrides[unit_id]) if unit_id in overrides else self.compute_input(unit_id)
            for unit_id, unit in self._units.items() if not unit.passive
        }

        for map_id, drive in map_inputs.items():
            slot = self._maps[map_id]
            slot.field = euler_step(slot.field, drive, slot.kernel, params)
        for unit_id, drive in unit_inputs.items():
            unit = self._units[unit_id]
            ratio = params.dt / unit.tau
            unit.activity = float(np.clip(unit.activity + ratio * (-unit.activity + drive), 0.0, 1.0))


def step_network(network: Network, params: Optional[StepParams] = None) -> None:
    """Synchronous step of the whole network"""
    network.step(params)
