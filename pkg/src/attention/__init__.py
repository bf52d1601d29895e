"""
Covert/overt spatial attention model built on the field network
"""

from src.attention.model import (
    AttentionModel,
    Decision,
    attend_until_decision,
    build_model,
    eccentricity_resting_level,
    move_switch_drive,
    perform_saccade,
    perform_switch,
)
from src.attention.trial import EventKind, ScanEvent, TrialLimits, TrialLog, run_trial

__all__ = [
    "AttentionModel",
    "Decision",
    "EventKind",
    "ScanEvent",
    "TrialLimits",
    "TrialLog",
    "attend_until_decision",
    "build_model",
    "eccentricity_resting_level",
    "move_switch_drive",
    "perform_saccade",
    "perform_switch",
    "run_trial",
]
