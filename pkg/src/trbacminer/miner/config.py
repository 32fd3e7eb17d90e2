from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ConfigError
from ..metrics import MetricSpec
from ..policy import InheritanceType


class InitVariant(enum.Enum):
    PERM_BPES = "perm-bpes"
    PERM_BPES_MINUS = "perm-bpes-minus"
    BOTH = "both"


@dataclass(frozen=True)
class MinerConfig:
    it: InheritanceType = InheritanceType.WR
    epsilon: int = 0
    delta: Fraction = Fraction("1.001")
    ric: Fraction = Fraction(1)
    metric: MetricSpec = field(default_factory=MetricSpec)
    init_variant: InitVariant = InitVariant.PERM_BPES
    seed: int = 0
    # re-derive every incremental quantity during elimination and compare
    debug: bool = False

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(str(self.delta)) if not isinstance(self.delta, Fraction) else self.delta)
        object.__setattr__(self, "ric", Fraction(str(self.ric)) if not isinstance(self.ric, Fraction) else self.ric)
        if self.delta < 1:
            raise ConfigError("delta must be at least 1")
        if not 0 <= self.ric <= 1:
            raise ConfigError("ric must lie in [0, 1]")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit natural number")
