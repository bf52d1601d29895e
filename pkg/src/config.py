"""
Configuration settings for the attention field simulator
Holds the frozen default parameter set of the attention model
"""

import math
import os
import logging
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.errors import ConfigError

load_dotenv()


def get_env_var(name: str, default: Any = None) -> str:
    """Get environment variable with validation"""
    value = os.environ.get(name, default)
    if value is None:
        raise ValueError(f"Environment variable {name} is not set")
    return value


# Set up logging
LOG_LEVEL = get_env_var('ATTENTION_LOG_LEVEL', 'INFO').upper()
logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
logger = logging.getLogger(__name__)

# Output directory override (takes precedence over the run config)
OUTPUT_DIR_ENV = 'ATTENTION_OUTPUT_DIR'

# Default output settings
DEFAULT_OUTPUT_DIR = "output"
DEFAULT_SNAPSHOT_EVERY = 50
DEFAULT_SNAPSHOT_MAPS = ("saliency", "focus", "wm", "anticipation")

# Trial limits
DEFAULT_MAX_ATTENDS = 8
DEFAULT_MAX_STEPS = 3000

# Exit codes
EXIT_DONE = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2


@dataclass(frozen=True)
class KernelParams:
    """Difference-of-gaussians parameters; radius None means ceil(3 * sigma_inh)"""

    a_exc: float
    sigma_exc: float
    a_inh: float
    sigma_inh: float
    radius: Optional[int] = None
    global_inhibition: float = 0.0

    @property
    def effective_radius(self) -> int:
        """Explicit radius, or 3 sigma_inh rounded up"""
        if self.radius is not None:
            return int(self.radius)
        return int(math.ceil(3.0 * self.sigma_inh))


@dataclass(frozen=True)
class ModelConfig:
    grid_width: int = 40
    grid_height: int = 40
    dt: float = 1.0

    # Time constants (dt/tau = 0.1 on maps)
    tau_v4: float = 10.0
    tau_saliency: float = 10.0
    tau_focus: float = 10.0
    tau_wm: float = 10.0
    tau_anticipation: float = 10.0
    tau_unit: float = 4.0

    # Lateral interaction
    focus_kernel: KernelParams = field(
        default_factory=lambda: KernelParams(0.25, 1.5, 0.0, 3.0, radius=4, global_inhibition=0.1))
    wm_kernel: KernelParams = field(default_factory=lambda: KernelParams(2.5, 1.2, 1.0, 2.5))
    wm_resting: float = -0.5
    # Focus resting level falls linearly from 0 at the fovea to -bias at the farthest cell
    focus_eccentricity_bias: float = 0.25

    # Projection gains
    g_input_v4: float = 0.5
    g_pf_v4: float = 0.1
    g_focus_v4: float = 0.5
    g_v4_sal: float = 0.5
    g_sal_focus: float = 1.0
    g_focus_wm: float = 0.7
    g_wm_switch_inhibit: float = 3.0
    g_it_readout: float = 1.0
    g_move: float = 1.0
    g_switch: float = 1.0
    g_anticipation: float = 1.5
    lambda_inhibit: float = 0.8

    # Decision
    theta_move: float = 0.5
    theta_switch: float = 0.5
    theta_bubble: float = 0.5
    hold_steps: int = 10
    refractory_steps: int = 30

    # Stimuli and saccades
    sigma_stim: float = 1.5
    target_tolerance: float = 1.0

    def tau_values(self) -> Dict[str, float]:
        return {
            'tau_v4': self.tau_v4,
            'tau_saliency': self.tau_saliency,
            'tau_focus': self.tau_focus,
            'tau_wm': self.tau_wm,
            'tau_anticipation': self.tau_anticipation,
            'tau_unit': self.tau_unit,
        }

    def gains(self) -> Dict[str, float]:
        """Projection gains and lambda_inhibit by field name"""
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name.startswith('g_') or f.name == 'lambda_inhibit'}


def validate_config(config: ModelConfig) -> None:
    """Validate the model configuration settings"""
    try:
        if config.grid_width < 1 or config.grid_height < 1:
            raise ConfigError("grid must be at least 1 x 1", "model.grid_width")
        if not (config.dt > 0 and math.isfinite(config.dt)):
            raise ConfigError("dt must be a positive finite number", "model.dt")

        for name, tau in config.tau_values().items():
            if not tau > 0:
                raise ConfigError("time constant must be positive", f"model.{name}")
            if config.dt / tau >= 1.0:
                raise ConfigError(
                    f"stability bound dt/tau < 1 violated (dt/tau = {config.dt / tau:.4g})",
                    f"model.{name}",
                )

        for name, gain in config.gains().items():
            if not math.isfinite(gain):
                raise ConfigError("gain must be finite", f"model.{name}")

        for name in ('theta_move', 'theta_switch', 'theta_bubble'):
            value = getattr(config, name)
            if not 0.0 < value < 1.0:
                raise ConfigError("threshold must lie in (0, 1)", f"model.{name}")

        if config.hold_steps < 1:
            raise ConfigError("hold_steps must be >= 1", "model.hold_steps")
        if config.refractory_steps < 2:
            raise ConfigError("refractory_steps must be >= 2", "model.refractory_steps")
        if not (config.focus_eccentricity_bias >= 0 and math.isfinite(config.focus_eccentricity_bias)):
            raise ConfigError("focus_eccentricity_bias must be a non-negative number", "model.focus_eccentricity_bias")
        if not config.sigma_stim > 0:
            raise ConfigError("sigma_stim must be positive", "model.sigma_stim")
        if not config.target_tolerance > 0:
            raise ConfigError("target_tolerance must be positive", "model.target_tolerance")

        for name in ('focus_kernel', 'wm_kernel'):
            kernel = getattr(config, name)
            if not (kernel.sigma_exc > 0 and kernel.sigma_inh > kernel.sigma_exc):
                raise ConfigError("need 0 < sigma_exc < sigma_inh", f"model.{name}")
            if kernel.effective_radius < 1:
                raise ConfigError("radius must be >= 1", f"model.{name}.radius")
            if not (kernel.a_exc > 0 and kernel.a_inh >= 0):
                raise ConfigError("need a_exc > 0 and a_inh >= 0", f"model.{name}")
            if not (kernel.global_inhibition >= 0 and math.isfinite(kernel.global_inhibition)):
                raise ConfigError("global_inhibition must be a non-negative number",
                                  f"model.{name}.global_inhibition")

        logger.debug("Model configuration validated successfully")
    except ConfigError as e:
        logger.error(f"Configuration validation failed: {str(e)}")
        raise


DEFAULT_MODEL_CONFIG = ModelConfig()

# Validate defaults on import
validate_config(DEFAULT_MODEL_CONFIG)
