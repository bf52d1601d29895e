"""
Run configuration: JSON loading, validation and writing
"""

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

from src.artifacts import atomic_write_text
from src.attention.trial import TrialLimits
from src.config import (
    DEFAULT_MAX_ATTENDS,
    DEFAULT_MAX_STEPS,
    DEFAULT_MODEL_CONFIG,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_SNAPSHOT_EVERY,
    DEFAULT_SNAPSHOT_MAPS,
    KernelParams,
    ModelConfig,
    validate_config,
)
from src.errors import ConfigError, ConfigParseError, SimulationError
from src.features import CHANNELS, TargetSpec, parse_channel
from src.scenario import Gaze, Stimulus, World

logger = logging.getLogger(__name__)

MAP_NAMES = tuple(
    [f"input_{c.value}" for c in CHANNELS]
    + [f"v4_{c.value}" for c in CHANNELS]
    + ["saliency", "focus", "wm", "anticipation"]
)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = DEFAULT_OUTPUT_DIR
    snapshot_every: int = DEFAULT_SNAPSHOT_EVERY
    maps: Tuple[str, ...] = DEFAULT_SNAPSHOT_MAPS

    def __post_init__(self):
        object.__setattr__(self, 'maps', tuple(self.maps))
        if self.snapshot_every < 1:
            raise ConfigError("snapshot cadence must be >= 1", "output.snapshot_every")
        for name in self.maps:
            if name not in MAP_NAMES:
                raise ConfigError(f"unknown map '{name}'", "output.maps")


@dataclass(frozen=True)
class RunConfig:
    target: TargetSpec
    world: World
    gaze: Gaze = Gaze()
    model: ModelConfig = DEFAULT_MODEL_CONFIG
    limits: TrialLimits = TrialLimits()
    output: OutputConfig = field(default_factory=OutputConfig)


def _require_mapping(value: Any, path: str) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError("expected an object", path)
    return value


def _check_keys(data: Dict[str, Any], allowed, path: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown field '{key}'", f"{path}.{key}" if path else key)


def _number(value: Any, path: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value):
        raise ConfigError("expected a finite number", path)
    if integer:
        if float(value) != int(value):
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return int(value)
    return float(value)


def _point(value: Any, path: str) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("expected [x, y]", path)
    return (_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def _parse_kernel(data: Any, path: str) -> KernelParams:
    data = _require_mapping(data, path)
    names = [f.name for f in dataclasses.fields(KernelParams)]
    _check_keys(data, names, path)
    missing = [n for n in names if n not in ('radius', 'global_inhibition') and n not in data]
    if missing:
        raise ConfigError(f"missing required fields: {', '.join(missing)}", path)
    radius = data.get('radius')
    return KernelParams(
        a_exc=_number(data['a_exc'], f"{path}.a_exc"),
        sigma_exc=_number(data['sigma_exc'], f"{path}.sigma_exc"),
        a_inh=_number(data['a_inh'], f"{path}.a_inh"),
        sigma_inh=_number(data['sigma_inh'], f"{path}.sigma_inh"),
        radius=None if radius is None else _number(radius, f"{path}.radius", integer=True),
        global_inhibition=_number(data.get('global_inhibition', 0.0), f"{path}.global_inhibition"),
    )


def parse_model(data: Any) -> ModelConfig:
    """
    Overlay a `model` object on the default model configuration

    Args:
        data: Decoded `model` object; omitted fields keep their defaults

    Returns:
        ModelConfig: The validated configuration

    Raises:
        ConfigError: On unknown fields, non-numeric values or failed validation
    """
    data = _require_mapping(data, "model")
    kinds = {f.name: f.type for f in dataclasses.fields(ModelConfig)}
    _check_keys(data, kinds, "model")
    values = {}
    for key, value in data.items():
        path = f"model.{key}"
        if key in ('focus_kernel', 'wm_kernel'):
            values[key] = _parse_kernel(value, path)
        else:
            integer = kinds[key] in (int, 'int')
            values[key] = _number(value, path, integer=integer)
    config = dataclasses.replace(DEFAULT_MODEL_CONFIG, **values)
    validate_config(config)
    return config


def parse_scene(data: Any) -> Tuple[World, Gaze]:
    """Build the world and the initial gaze from a `scene` object"""
    data = _require_mapping(data, "scene")
    _check_keys(data, ('gaze', 'stimuli', 'extent'), "scene")
    gaze = Gaze(_point(data.get('gaze', [0.0, 0.0]), "scene.gaze"))
    items = data.get('stimuli', [])
    if not isinstance(items, list):
        raise ConfigError("expected a list", "scene.stimuli")
    stimuli = []
    for i, item in enumerate(items):
        path = f"scene.stimuli[{i}]"
        item = _require_mapping(item, path)
        _check_keys(item, ('position', 'color', 'orientation'), path)
        for key in ('position', 'color', 'orientation'):
            if key not in item:
                raise ConfigError("missing required field", f"{path}.{key}")
        try:
            stimuli.append(Stimulus(
                _point(item['position'], f"{path}.position"),
                parse_channel(item['color'], f"{path}.color"),
                parse_channel(item['orientation'], f"{path}.orientation"),
            ))
        except ConfigError:
            raise
        except SimulationError as e:
            raise ConfigError(str(e), path)
    extent = data.get('extent')
    if extent is not None:
        if not isinstance(extent, list) or len(extent) != 4:
            raise ConfigError("expected [xmin, ymin, xmax, ymax]", "scene.extent")
        extent = tuple(_number(v, f"scene.extent[{i}]") for i, v in enumerate(extent))
    return World(tuple(stimuli), extent), gaze


def parse_run_config(data: Any) -> RunConfig:
    """Validate a decoded config document and fill defaults"""
    data = _require_mapping(data, "")
    _check_keys(data, ('target', 'scene', 'model', 'limits', 'output'), "")
    for key in ('target', 'scene'):
        if key not in data:
            raise ConfigError("missing required field", key)

    target_data = data['target']
    if not isinstance(target_data, list):
        raise ConfigError("expected a list of two feature names", "target")
    target = TargetSpec.of(target_data)
    world, gaze = parse_scene(data['scene'])
    model = parse_model(data.get('model', {}))

    limits_data = _require_mapping(data.get('limits', {}), "limits")
    _check_keys(limits_data, ('max_attends', 'max_steps'), "limits")
    limits = TrialLimits(
        max_attends=_number(limits_data.get('max_attends', DEFAULT_MAX_ATTENDS), "limits.max_attends", True),
        max_steps=_number(limits_data.get('max_steps', DEFAULT_MAX_STEPS), "limits.max_steps", True),
    )

    output_data = _require_mapping(data.get('output', {}), "output")
    _check_keys(output_data, ('directory', 'snapshot_every', 'maps'), "output")
    maps = output_data.get('maps', list(DEFAULT_SNAPSHOT_MAPS))
    if not isinstance(maps, list):
        raise ConfigError("expected a list of map names", "output.maps")
    output = OutputConfig(
        directory=str(output_data.get('directory', DEFAULT_OUTPUT_DIR)),
        snapshot_every=_number(output_data.get('snapshot_every', DEFAULT_SNAPSHOT_EVERY),
                               "output.snapshot_every", True),
        maps=tuple(str(m) for m in maps),
    )
    return RunConfig(target=target, world=world, gaze=gaze, model=model, limits=limits, output=output)


def load_config(path: str) -> RunConfig:
    """Load and validate a JSON run configuration"""
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}", path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, path, e.lineno, e.colno)
    config = parse_run_config(data)
    logger.info(f"Loaded config {path}: {len(config.world.stimuli)} stimuli")
    return config


def config_to_dict(config: RunConfig) -> dict:
    """JSON-ready form of a run configuration, defaults spelled out"""
    model = dataclasses.asdict(config.model)
    return {
        'target': config.target.to_dict(),
        'scene': {
            'gaze': list(config.gaze.center),
            'stimuli': [s.to_dict() for s in config.world.stimuli],
            'extent': list(config.world.extent) if config.world.extent is not None else None,
        },
        'model': model,
        'limits': {'max_attends': config.limits.max_attends, 'max_steps': config.limits.max_steps},
        'output': {
            'directory': config.output.directory,
            'snapshot_every': config.output.snapshot_every,
            'maps': list(config.output.maps),
        },
    }


def write_config(config: RunConfig, path: str) -> None:
    """Write a run configuration that load_config reads back unchanged"""
    atomic_write_text(path, json.dumps(config_to_dict(config), indent=2) + "\n")
