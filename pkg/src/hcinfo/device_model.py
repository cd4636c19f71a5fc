"""Input devices as products of independent, equiprobable state variables."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class DeviceVariable:
    name: str
    cardinality: int

    def __post_init__(self):
        if not self.name:
            raise ValidationError("device variable needs a name")
        if isinstance(self.cardinality, bool) or int(self.cardinality) != self.cardinality:
            raise ValidationError(f"cardinality of {self.name!r} must be an integer")
        if self.cardinality < 1:
            raise ValidationError(f"cardinality of {self.name!r} must be >= 1")
        object.__setattr__(self, "cardinality", int(self.cardinality))


@dataclass(frozen=True)
class InputDeviceSpec:
    name: str
    variables: tuple[DeviceVariable, ...]
    sampling_rate_hz: float

    def __post_init__(self):
        variables = tuple(self.variables)
        if not variables:
            raise ValidationError(f"device {self.name!r} has no variables")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValidationError(f"device {self.name!r} repeats a variable name")
        rate = float(self.sampling_rate_hz)
        if not (rate > 0 and math.isfinite(rate)):
            raise ValidationError(f"sampling rate of {self.name!r} must be > 0, got {rate!r}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "sampling_rate_hz", rate)

    @classmethod
    def build(cls, name: str, cardinalities: dict[str, int], sampling_rate_hz: float) -> "InputDeviceSpec":
        return cls(name, tuple(DeviceVariable(k, v) for k, v in cardinalities.items()), sampling_rate_hz)


def instantaneous_capacity(dev: InputDeviceSpec) -> float:
    """Bits per sample: the sum of log2(cardinality) over all variables."""
    # sum of logs, never the product of cardinalities
    return math.fsum(math.log2(v.cardinality) for v in dev.variables)


def bandwidth(dev: InputDeviceSpec) -> float:
    """Bits per second at the device's sampling rate."""
    return dev.sampling_rate_hz * instantaneous_capacity(dev)
