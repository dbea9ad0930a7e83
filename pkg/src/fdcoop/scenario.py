# Cell configuration, unit conversions and random channel generation.
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any

import numpy as np

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Invalid scenario/sweep configuration (bad field value or unknown key)."""


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level from dBm to watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    """Convert a power level from watts to dBm."""
    if p_w <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * np.log10(p_w) + 30.0


def dbw_to_watts(p_dbw: float) -> float:
    """Convert a power level from dBW to watts."""
    return 10.0 ** (p_dbw / 10.0)


def noise_power(noise_density_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power N0*W in watts over the given bandwidth."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return dbm_to_watts(noise_density_dbm_hz) * bandwidth_hz


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of one cell: two user groups, subcarriers, budgets, QoS floors.

    Group 1 (k1 far users) reaches the base station only through amplify-and-forward
    relays drawn from group 2 (k2 near users). Powers are stored in dB units as
    configured and converted on demand.
    """

    k1: int = 2
    k2: int = 2
    n_subcarriers: int = 8
    subcarrier_bandwidth_hz: float = 20e3
    noise_density_dbm_hz: float = -174.0
    pmax_user_dbm: float = 20.0
    pmax_bs_dbw: float = 10.0
    si_suppression_db: float = 110.0
    si_enabled: bool = True
    rmin_coop_bps_hz: float = 0.0
    rmin_noncoop_bps_hz: float = 0.0
    seed: int = 1

    def __post_init__(self):
        for name in ("k1", "k2", "n_subcarriers"):
            val = getattr(self, name)
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                raise ConfigError(f"field '{name}': must be an integer >= 1, got {val!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError(f"field 'seed': must be an integer, got {self.seed!r}")
        for name in ("subcarrier_bandwidth_hz",):
            if not getattr(self, name) > 0:
                raise ConfigError(f"field '{name}': must be > 0")
        for name in ("rmin_coop_bps_hz", "rmin_noncoop_bps_hz"):
            if getattr(self, name) < 0:
                raise ConfigError(f"field '{name}': must be >= 0")
        for name in ("noise_density_dbm_hz", "pmax_user_dbm", "pmax_bs_dbw",
                     "si_suppression_db"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"field '{name}': must be finite")

    @property
    def pmax_user_w(self) -> float:
        return dbm_to_watts(self.pmax_user_dbm)

    @property
    def pmax_bs_w(self) -> float:
        return dbw_to_watts(self.pmax_bs_dbw)

    @property
    def noise_power_w(self) -> float:
        return noise_power(self.noise_density_dbm_hz, self.subcarrier_bandwidth_hz)


def scenario_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """Build a ScenarioConfig from parsed JSON; unknown keys are rejected."""
    known = {f.name: f.type for f in fields(ScenarioConfig)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown key '{sorted(unknown)[0]}' in scenario config")
    coerced = {}
    for key, val in data.items():
        if key in ("k1", "k2", "n_subcarriers", "seed"):
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"field '{key}': expected integer, got {val!r}")
            coerced[key] = val
        elif key == "si_enabled":
            if not isinstance(val, bool):
                raise ConfigError(f"field '{key}': expected boolean, got {val!r}")
            coerced[key] = val
        else:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"field '{key}': expected number, got {val!r}")
            coerced[key] = float(val)
    return ScenarioConfig(**coerced)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all complex channel coefficients for the cell.

    h[k, m, i]  : far user k -> near user (relay) m on subcarrier i, slot 1
    g[m, j]     : near user m -> base station on subcarrier j (either slot)
    h_si[j]     : base-station transmit -> receive self-interference path
    """

    h: np.ndarray
    g: np.ndarray
    h_si: np.ndarray

    def validate_against(self, config: ScenarioConfig):
        k1, k2, n = config.k1, config.k2, config.n_subcarriers
        if self.h.shape != (k1, k2, n) or self.g.shape != (k2, n) or self.h_si.shape != (n,):
            raise ValueError(
                f"channel shapes {self.h.shape}/{self.g.shape}/{self.h_si.shape} "
                f"do not match config ({k1},{k2},{n})")
        for arr in (self.h, self.g, self.h_si):
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError("channel coefficients must be finite")


@dataclass(frozen=True)
class NormalizedGains:
    """Noise-normalized channel power gains.

    alpha[k, m, i] = |h|^2 / (N0 W), beta[m, j] = |g|^2 / (N0 W) (same value
    serves both time slots), gamma_si[j] = residual |h_si|^2 / (N0 W) after
    suppression, identically zero when self-interference is disabled.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma_si: np.ndarray


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent substream for one trial: Philox keyed by seed XOR trial_index."""
    key = (seed ^ trial_index) & _MASK64
    return np.random.Generator(np.random.Philox(key=key))


def _complex_normal(rng: np.random.Generator, shape: tuple) -> np.ndarray:
    # circularly-symmetric CN(0, 1): each part has variance 1/2
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def sample_channels(config: ScenarioConfig, trial_index: int) -> ChannelRealization:
    """Draw one i.i.d. CN(0,1) realization, deterministic in (seed, trial_index)."""
    rng = trial_rng(config.seed, trial_index)
    k1, k2, n = config.k1, config.k2, config.n_subcarriers
    h = _complex_normal(rng, (k1, k2, n))
    g = _complex_normal(rng, (k2, n))
    h_si = _complex_normal(rng, (n,))
    return ChannelRealization(h=h, g=g, h_si=h_si)


def normalize_gains(config: ScenarioConfig, channels: ChannelRealization) -> NormalizedGains:
    """Noise-normalize squared channel magnitudes; apply SI suppression."""
    channels.validate_against(config)
    n0w = config.noise_power_w
    alpha = np.abs(channels.h) ** 2 / n0w
    beta = np.abs(channels.g) ** 2 / n0w
    if config.si_enabled:
        suppression = 10.0 ** (-config.si_suppression_db / 10.0)
        gamma_si = np.abs(channels.h_si) ** 2 * suppression / n0w
    else:
        gamma_si = np.zeros(config.n_subcarriers)
    return NormalizedGains(alpha=alpha, beta=beta, gamma_si=gamma_si)
