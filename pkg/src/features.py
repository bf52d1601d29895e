"""
Feature channels and target specifications
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable

from src.errors import ConfigError


class FeatureChannel(str, Enum):
    BLUE = "blue"
    GREEN = "green"
    DEG45 = "deg45"
    DEG135 = "deg135"


CHANNELS = (FeatureChannel.BLUE, FeatureChannel.GREEN, FeatureChannel.DEG45, FeatureChannel.DEG135)
COLORS = frozenset({FeatureChannel.BLUE, FeatureChannel.GREEN})
ORIENTATIONS = frozenset({FeatureChannel.DEG45, FeatureChannel.DEG135})


def parse_channel(value: str, field: str = "channel") -> FeatureChannel:
    """Parse a channel name such as 'blue' or 'deg45'"""
    try:
        return FeatureChannel(str(value).lower())
    except ValueError:
        names = ", ".join(c.value for c in CHANNELS)
        raise ConfigError(f"unknown feature '{value}' (expected one of {names})", field)


@dataclass(frozen=True)
class TargetSpec:
    """The conjunction of one color and one orientation the model searches for"""

    relevant: FrozenSet[FeatureChannel]

    def __post_init__(self):
        relevant = frozenset(self.relevant)
        object.__setattr__(self, "relevant", relevant)
        if len(relevant) != 2 or len(relevant & COLORS) != 1 or len(relevant & ORIENTATIONS) != 1:
            raise ConfigError(
                f"target must name exactly one color and one orientation, got "
                f"{sorted(c.value for c in relevant)}",
                "target",
            )

    @classmethod
    def of(cls, features: Iterable[str]) -> "TargetSpec":
        """Build from feature names such as ("blue", "deg45")"""
        return cls(frozenset(parse_channel(f, "target") for f in features))

    @property
    def color(self) -> FeatureChannel:
        return next(iter(self.relevant & COLORS))

    @property
    def orientation(self) -> FeatureChannel:
        return next(iter(self.relevant & ORIENTATIONS))

    def pf_pattern(self) -> tuple:
        """PF activities over (blue, green, deg45, deg135)"""
        return tuple(1.0 if c in self.relevant else 0.0 for c in CHANNELS)

    def matches(self, color: FeatureChannel, orientation: FeatureChannel) -> bool:
        """Whether a stimulus with these features is the target"""
        return color == self.color and orientation == self.orientation

    def to_dict(self) -> list:
        return [self.color.value, self.orientation.value]
