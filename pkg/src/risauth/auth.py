"""Tag registration, baseline profiles and the two-threshold hypothesis test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import VoltageProfile
from .errors import InsufficientDataError, RegistrationError, UnknownTagError

SPREAD_FLOOR = 1e-9
DEFAULT_PILOTS = 100


@dataclass(frozen=True)
class BaselineProfile:
    """Per-component pilot mean and sample standard deviation.

    ``spread`` reuses the profile layout; its entries are standard deviations.
    """

    mean: VoltageProfile
    spread: VoltageProfile
    pilot_count: int

    def __post_init__(self):
        if self.pilot_count < 2:
            raise InsufficientDataError(f"baseline needs at least 2 pilots, got {self.pilot_count}")

    def scale(self, floor: float = SPREAD_FLOOR) -> tuple[float, float]:
        """State-maxed (harvester, demodulator) spreads, floored."""
        s = self.spread
        return max(s.v_hrv_on, s.v_hrv_off, floor), max(s.v_dem_on, s.v_dem_off, floor)


@dataclass(frozen=True)
class Thresholds:
    tau_hrv: float
    tau_dem: float

    def __post_init__(self):
        if self.tau_hrv < 0 or self.tau_dem < 0:
            raise ValueError("thresholds must be >= 0")

    @classmethod
    def scaled(cls, baseline: BaselineProfile, t: float) -> Thresholds:
        """Thresholds ``(t s_hrv, t s_dem)`` under which ``decide`` matches ``score <= t``."""
        s_hrv, s_dem = baseline.scale()
        return cls(t * s_hrv, t * s_dem)


@dataclass(frozen=True)
class AuthDecision:
    accepted: bool
    delta_hrv: float
    delta_dem: float
    score: float = float("nan")


@dataclass
class TagRecord:
    tag_id: str
    baseline: BaselineProfile | None = None


def establish_baseline(pilot_profiles: Sequence[VoltageProfile]) -> BaselineProfile:
    if len(pilot_profiles) < 2:
        raise InsufficientDataError(f"baseline needs at least 2 pilots, got {len(pilot_profiles)}")
    volts = np.array([p.as_array() for p in pilot_profiles])
    shifted = volts - volts[0]
    mean = volts[0] + shifted.mean(axis=0)
    spread = shifted.std(axis=0, ddof=1)
    return BaselineProfile(VoltageProfile.from_array(mean), VoltageProfile.from_array(spread), len(volts))


def profile_delta(measured: VoltageProfile, baseline: BaselineProfile) -> tuple[float, float]:
    """Largest per-state deviation on each branch: ``(delta_hrv, delta_dem)``."""
    dev = np.abs(measured.as_array() - baseline.mean.as_array())
    return float(max(dev[0], dev[1])), float(max(dev[2], dev[3]))


def decide(deltas: tuple[float, float], th: Thresholds, score: float = float("nan")) -> AuthDecision:
    """Accept iff both deviations are within their thresholds (boundary inclusive)."""
    d_hrv, d_dem = deltas
    return AuthDecision(bool(d_hrv <= th.tau_hrv and d_dem <= th.tau_dem), d_hrv, d_dem, score)


def normalized_score(deltas: tuple[float, float], baseline: BaselineProfile) -> float:
    s_hrv, s_dem = baseline.scale()
    return max(deltas[0] / s_hrv, deltas[1] / s_dem)


class TagRegistry:
    """LT-side store of registered tags and their baselines."""

    def __init__(self):
        self._records: dict[str, TagRecord] = {}

    def __contains__(self, tag_id: str) -> bool:
        return tag_id in self._records

    def __len__(self) -> int:
        return len(self._records)

    def register_tag(self, tag_id: str) -> TagRecord:
        if tag_id in self._records:
            raise RegistrationError(f"tag {tag_id!r} is already registered")
        record = TagRecord(tag_id)
        self._records[tag_id] = record
        return record

    def record(self, tag_id: str) -> TagRecord:
        try:
            return self._records[tag_id]
        except KeyError:
            raise UnknownTagError(tag_id) from None

    def set_baseline(self, tag_id: str, baseline: BaselineProfile) -> None:
        self.record(tag_id).baseline = baseline

    def authenticate(self, claimed_id: str, measured: VoltageProfile, th: Thresholds,
                     expected_id: str | None = None) -> AuthDecision:
        """Run the ID check, then the voltage test against the stored baseline.

        When ``expected_id`` is given and differs from ``claimed_id`` the claim
        is rejected before any voltage comparison.
        """
        if expected_id is not None and claimed_id != expected_id:
            return AuthDecision(False, float("nan"), float("nan"))
        record = self.record(claimed_id)
        if record.baseline is None:
            raise UnknownTagError(f"tag {claimed_id!r} has no baseline yet")
        deltas = profile_delta(measured, record.baseline)
        return decide(deltas, th, normalized_score(deltas, record.baseline))
