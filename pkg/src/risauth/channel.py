"""Rician small-scale fading, distance path loss and RIS phase configuration.

Every link coefficient is ``path_gain(link) * small_scale_sample``; distance
decay is applied here exactly once, so the incident-power expression in
:mod:`risauth.circuit` uses the coefficients as they are.

Realizations may be batched: scalar links then carry a leading trial axis and
per-element links have shape ``(..., n_elements)``. The single and batched
samplers consume random numbers in the same order, so trial ``t`` of a batch
equals a single draw from the same stream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from numpy.random import Generator

SPEED_OF_LIGHT = 299_792_458.0
TWO_PI = 2.0 * np.pi

LEGIT_SCALARS = ("h_ST", "h_SL", "h_TL")
EVE_SCALARS = ("h_SE", "h_EL", "h_TE")


@dataclass(frozen=True)
class ScenarioGeometry:
    """Distances in meters, exponents, carrier and antenna gains.

    ``g_eve`` defaults to ``g_tag`` when left as ``None``. The source and each
    RIS element have their own gains. ``n_elements == 0`` means no RIS.
    """

    d_ST: float = 1.0
    d_SL: float = 1.0
    d_TL: float = 1.5
    d_TR: float = 1.0
    d_RL: float = 1.0
    d_SE: float = 1.0
    d_EL: float = 0.75
    d_TE: float = 0.75
    d_ER: float = 0.70
    chi_direct: float = 3.5
    chi_ris: float = 2.5
    f_c: float = 915e6
    g_tag: float = 8.0
    g_source: float = 1.0
    g_eve: float | None = 1.0
    g_ris: float = 1.0
    n_elements: int = 0

    def __post_init__(self):
        for name in ("d_ST", "d_SL", "d_TL", "d_TR", "d_RL", "d_SE", "d_EL", "d_TE", "d_ER"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.f_c <= 0:
            raise ValueError(f"f_c must be > 0, got {self.f_c}")
        if self.chi_direct < 0 or self.chi_ris < 0:
            raise ValueError("path-loss exponents must be >= 0")
        for name in ("g_tag", "g_source", "g_ris"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.g_eve is not None and not self.g_eve > 0:
            raise ValueError("g_eve must be > 0")
        if self.n_elements < 0 or int(self.n_elements) != self.n_elements:
            raise ValueError(f"n_elements must be a non-negative integer, got {self.n_elements}")
        floor = self.proximity_floor
        if self.d_EL < floor:
            raise ValueError(f"d_EL={self.d_EL} m is below the 0.5 wavelength floor ({floor:.4f} m)")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    @property
    def proximity_floor(self) -> float:
        """Closest admissible Eve-LT distance: half a wavelength."""
        return 0.5 * self.wavelength

    @property
    def eve_gain(self) -> float:
        return self.g_tag if self.g_eve is None else self.g_eve

    def link(self, name: str) -> tuple[float, float, float, float]:
        """(distance, exponent, g_tx, g_rx) for a link name like ``"TL"`` or ``"ER"``."""
        gains = {"S": self.g_source, "T": self.g_tag, "L": self.g_tag, "E": self.eve_gain, "R": self.g_ris}
        chi = self.chi_ris if "R" in name else self.chi_direct
        return getattr(self, f"d_{name}"), chi, gains[name[0]], gains[name[1]]


@dataclass(frozen=True)
class RicianParams:
    """Rician K (linear) for direct links; ``k_factor_ris`` overrides it for RIS element links."""

    k_factor: float = 3.0
    seed: int = 0
    k_factor_ris: float | None = None

    def __post_init__(self):
        if self.k_factor < 0 or (self.k_factor_ris is not None and self.k_factor_ris < 0):
            raise ValueError("Rician K must be >= 0")

    @property
    def k_ris(self) -> float:
        return self.k_factor if self.k_factor_ris is None else self.k_factor_ris

    def make_rng(self) -> Generator:
        return np.random.default_rng(self.seed)


class RisMode(enum.Enum):
    OPTIMAL = "optimal"
    RANDOM = "random"
    ABSENT = "absent"


@dataclass(frozen=True)
class RisConfig:
    phases: np.ndarray
    mode: RisMode

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if self.mode is RisMode.ABSENT:
            phases = phases[..., :0] if phases.ndim else np.zeros(0)
        object.__setattr__(self, "phases", np.mod(phases, TWO_PI))

    @classmethod
    def absent(cls) -> RisConfig:
        return cls(np.zeros(0), RisMode.ABSENT)

    @property
    def n_elements(self) -> int:
        return self.phases.shape[-1]


@dataclass(frozen=True)
class ChannelRealization:
    """One coherence-interval draw of every link (or a batch of them).

    ``delta`` and ``zeta`` are the element phase decompositions, defined by
    ``H_TR = |H_TR| exp(-j delta)`` and ``H_RL = |H_RL| exp(-j zeta)``.
    Eve links are ``None`` when they were not sampled.
    """

    h_ST: complex | np.ndarray
    h_SL: complex | np.ndarray
    h_TL: complex | np.ndarray
    H_TR: np.ndarray
    H_RL: np.ndarray
    h_SE: complex | np.ndarray | None = None
    h_EL: complex | np.ndarray | None = None
    h_TE: complex | np.ndarray | None = None
    H_ER: np.ndarray | None = None
    delta: np.ndarray = field(init=False)
    zeta: np.ndarray = field(init=False)

    def __post_init__(self):
        if np.shape(self.H_TR) != np.shape(self.H_RL):
            raise ValueError("H_TR and H_RL must have equal shapes")
        object.__setattr__(self, "delta", np.mod(-np.angle(self.H_TR), TWO_PI))
        object.__setattr__(self, "zeta", np.mod(-np.angle(self.H_RL), TWO_PI))

    @property
    def n_elements(self) -> int:
        return np.shape(self.H_TR)[-1]

    @property
    def has_eve(self) -> bool:
        return self.h_SE is not None

    def with_eve(self, eve: ChannelRealization) -> ChannelRealization:
        """Copy of this realization with Eve's links taken from ``eve``."""
        return replace(self, h_SE=eve.h_SE, h_EL=eve.h_EL, h_TE=eve.h_TE, H_ER=eve.H_ER)

    def trial(self, t: int) -> ChannelRealization:
        """Slice trial ``t`` out of a batched realization."""
        pick = lambda x: None if x is None else x[t]  # noqa: E731
        return ChannelRealization(
            h_ST=pick(self.h_ST), h_SL=pick(self.h_SL), h_TL=pick(self.h_TL),
            H_TR=pick(self.H_TR), H_RL=pick(self.H_RL),
            h_SE=pick(self.h_SE), h_EL=pick(self.h_EL), h_TE=pick(self.h_TE), H_ER=pick(self.H_ER),
        )


def path_gain(d: float, chi: float, lam: float, g_tx: float = 1.0, g_rx: float = 1.0) -> float:
    """Amplitude gain sqrt(g_tx g_rx) * (lambda / 4 pi) * d**(-chi / 2)."""
    if not np.all(np.asarray(d) > 0):
        raise ValueError(f"distance must be > 0, got {d}")
    if not lam > 0:
        raise ValueError(f"wavelength must be > 0, got {lam}")
    if chi < 0 or g_tx <= 0 or g_rx <= 0:
        raise ValueError("chi must be >= 0 and gains > 0")
    return np.sqrt(g_tx * g_rx) * (lam / (4.0 * np.pi)) * np.power(d, -chi / 2.0)


def link_gain(geom: ScenarioGeometry, name: str) -> float:
    d, chi, g_tx, g_rx = geom.link(name)
    return path_gain(d, chi, geom.wavelength, g_tx, g_rx)


def _rician_from_draws(k: float, u: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Map uniform LOS phases ``u`` and normal pairs ``z`` (last axis 2) to unit-power Rician samples."""
    los = np.sqrt(k / (k + 1.0)) * np.exp(1j * TWO_PI * u)
    scatter = np.sqrt(0.5 / (k + 1.0)) * (z[..., 0] + 1j * z[..., 1])
    return los + scatter


def sample_small_scale(p: RicianParams, rng: Generator, size=None, los_phase: float | np.ndarray = 0.0):
    """Unit mean-power Rician sample(s): sqrt(K/(K+1)) e^{j los_phase} + CN(0, 1/(K+1))."""
    k = p.k_factor
    if k < 0:
        raise ValueError("k_factor must be >= 0")
    if np.isinf(k):
        return np.exp(1j * np.asarray(los_phase)) * np.ones(size or ())
    shape = () if size is None else tuple(np.atleast_1d(size))
    z = rng.standard_normal((*shape, 2))
    return _rician_from_draws(k, np.asarray(los_phase) / TWO_PI, z)


def _draw_links(rngs: Sequence[Generator], n_links: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty((len(rngs), n_links))
    z = np.empty((len(rngs), n_links, 2))
    for i, rng in enumerate(rngs):
        u[i] = rng.random(n_links)
        z[i] = rng.standard_normal((n_links, 2))
    return u, z


def _links_from_draws(geom, p, names, n_el, u, z) -> dict[str, np.ndarray]:
    # scalars first, then one block of n_el per element link
    n_scalar = sum(1 for n in names if n.startswith("h_"))
    out = {}
    for i, name in enumerate(names[:n_scalar]):
        out[name] = link_gain(geom, name[2:]) * _rician_from_draws(p.k_factor, u[:, i], z[:, i])
    for j, name in enumerate(names[n_scalar:]):
        sl = slice(n_scalar + j * n_el, n_scalar + (j + 1) * n_el)
        out[name] = link_gain(geom, name[2:]) * _rician_from_draws(p.k_ris, u[:, sl], z[:, sl])
    return out


def sample_legit_batch(geom: ScenarioGeometry, p: RicianParams, rngs: Sequence[Generator]) -> ChannelRealization:
    """Source/TT/LT/RIS links for one trial per stream; Eve links left unset."""
    names = (*LEGIT_SCALARS, "H_TR", "H_RL")
    n = geom.n_elements
    links = _links_from_draws(geom, p, names, n, *_draw_links(rngs, 3 + 2 * n))
    return ChannelRealization(**links)


def sample_eve_batch(geom: ScenarioGeometry, p: RicianParams, rngs: Sequence[Generator]) -> dict[str, np.ndarray]:
    """Fresh Eve links (h_SE, h_EL, h_TE, H_ER) for one trial per stream."""
    names = (*EVE_SCALARS, "H_ER")
    n = geom.n_elements
    return _links_from_draws(geom, p, names, n, *_draw_links(rngs, 3 + n))


def sample_realization(geom: ScenarioGeometry, p: RicianParams, rng: Generator) -> ChannelRealization:
    """Draw every link once: path gain times an independent Rician sample.

    LOS phases are uniform per link and per element, standing in for the
    unmodeled element positions.
    """
    legit = sample_legit_batch(geom, p, [rng])
    eve = sample_eve_batch(geom, p, [rng])
    return replace(legit, **eve).trial(0)


def optimal_ris_phases(real: ChannelRealization) -> RisConfig:
    """Co-phase every TT-RIS-LT element path: phi_n = delta_n + zeta_n."""
    if real.n_elements == 0:
        raise ValueError("optimal phases need at least one RIS element")
    return RisConfig(real.delta + real.zeta, RisMode.OPTIMAL)


def random_ris_phases(n: int, rng: Generator) -> RisConfig:
    if n == 0:
        return RisConfig.absent()
    if n < 0:
        raise ValueError(f"element count must be >= 0, got {n}")
    return RisConfig(rng.uniform(0.0, TWO_PI, n), RisMode.RANDOM)


def cascade_coefficient(h_a, h_b, cfg: RisConfig):
    """sum_n h_a[n] h_b[n] exp(j phi_n) over the last axis; zero when the RIS is absent."""
    h_a = np.asarray(h_a)
    h_b = np.asarray(h_b)
    if cfg.mode is RisMode.ABSENT:
        return np.zeros(np.broadcast_shapes(h_a.shape[:-1], h_b.shape[:-1]), dtype=complex)[()]
    if h_a.shape[-1] != h_b.shape[-1] or h_a.shape[-1] != cfg.n_elements:
        raise ValueError(
            f"element count mismatch: h_a {h_a.shape[-1]}, h_b {h_b.shape[-1]}, phases {cfg.n_elements}"
        )
    return np.sum(h_a * h_b * np.exp(1j * cfg.phases), axis=-1)[()]
