"""Voltage-profile physical-layer authentication for RIS-aided backscatter tag-to-tag links."""

from __future__ import annotations

__version__ = "0.1.0"

from .adversary import AttackKind, AttackSpec, RelayGain
from .auth import BaselineProfile, TagRegistry, Thresholds, decide, establish_baseline, normalized_score
from .channel import ChannelRealization, RicianParams, RisConfig, RisMode, ScenarioGeometry
from .circuit import CircuitParams, NoiseParams, VoltageProfile
from .errors import ConfigError, InsufficientDataError, RegistrationError, UnknownTagError
from .sim import RocPoint, TrialConfig, TrialOutcome, roc_curve, simulate, tpr_at_fpr

__all__ = [
    "AttackKind", "AttackSpec", "BaselineProfile", "ChannelRealization", "CircuitParams", "ConfigError",
    "InsufficientDataError", "NoiseParams", "RegistrationError", "RelayGain", "RicianParams", "RisConfig",
    "RisMode", "RocPoint", "ScenarioGeometry", "TagRegistry", "Thresholds", "TrialConfig", "TrialOutcome",
    "UnknownTagError", "VoltageProfile", "decide", "establish_baseline", "normalized_score", "roc_curve",
    "simulate", "tpr_at_fpr",
]
