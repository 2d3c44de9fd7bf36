"""One-snapshot multiple-access channel simulation.

All sensors transmit simultaneously in the same band; the fusion center
receives their coherent sum plus complex Gaussian noise.  Two transmit
schemes are covered: constant-modulus phase signaling sqrt(rho)*exp(j*w*x_i)
and amplify-and-forward alpha_L*x_i.

Convention: channel noise CN(0, sigma_v^2) has independent real/imaginary
parts of variance sigma_v^2 / 2 each.  Fading gains are real positive
envelopes |h_i| normalized to E[|h|^2] = 1 (sensors pre-correct the channel
phase, which keeps transmissions constant-modulus).

Stream discipline per batch: sensing noise first, then fading gains (if
any), then channel noise.  Identical seed and config replay bit-identically.
"""

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigError
from .noise import NoiseModel

__all__ = [
    "PerSensorPower",
    "TotalPower",
    "PowerMode",
    "NoFading",
    "RayleighFading",
    "RiceanFading",
    "FadingModel",
    "NetworkConfig",
    "Snapshot",
    "simulate_cm_snapshot",
    "cm_snapshot_batch",
    "simulate_af_snapshot",
    "af_snapshot_batch",
    "af_gain",
]


@dataclass(frozen=True)
class PerSensorPower:
    """Fixed power rho per sensor; total power grows with the network."""

    rho: float

    def per_sensor_power(self, n_sensors: int) -> float:
        return self.rho

    def total_power(self, n_sensors: int) -> float:
        return self.rho * n_sensors


@dataclass(frozen=True)
class TotalPower:
    """Fixed network power p_t split evenly, rho = p_t / L."""

    p_t: float

    def per_sensor_power(self, n_sensors: int) -> float:
        return self.p_t / n_sensors

    def total_power(self, n_sensors: int) -> float:
        return self.p_t


PowerMode = Union[PerSensorPower, TotalPower]


@dataclass(frozen=True)
class NoFading:
    def sample_gains(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.ones(size)


@dataclass(frozen=True)
class RayleighFading:
    """Rayleigh envelope with E[|h|^2] = 1."""

    def sample_gains(self, rng, size):
        re = rng.standard_normal(size)
        im = rng.standard_normal(size)
        return np.sqrt(0.5) * np.hypot(re, im)


@dataclass(frozen=True)
class RiceanFading:
    """Ricean envelope with line-of-sight factor K and E[|h|^2] = 1."""

    k_factor: float

    def __post_init__(self):
        if self.k_factor < 0.0:
            raise ConfigError(f"Ricean K factor must be >= 0, got {self.k_factor}")

    def sample_gains(self, rng, size):
        k = self.k_factor
        los = math.sqrt(k / (k + 1.0))
        sig = math.sqrt(0.5 / (k + 1.0))
        re = los + sig * rng.standard_normal(size)
        im = sig * rng.standard_normal(size)
        return np.hypot(re, im)


FadingModel = Union[NoFading, RayleighFading, RiceanFading]

#: Slack on the transmit-phase upper bound 2*pi/theta_range.
_OMEGA_TOL = 1e-12


@dataclass(frozen=True)
class NetworkConfig:
    """One snapshot scenario: network size, parameter, transmit phase, channel."""

    n_sensors: int
    theta: float
    theta_range: float
    omega: float
    power: PowerMode
    channel_noise_variance: float
    noise: NoiseModel
    fading: FadingModel = field(default_factory=NoFading)

    def __post_init__(self):
        if self.n_sensors < 1:
            raise ConfigError(f"need at least one sensor, got {self.n_sensors}")
        if self.theta_range <= 0.0:
            raise ConfigError(f"theta_range must be > 0, got {self.theta_range}")
        if not 0.0 <= self.theta <= self.theta_range:
            raise ConfigError(
                f"theta must lie in [0, {self.theta_range}], got {self.theta}"
            )
        omega_max = 2.0 * math.pi / self.theta_range
        if not 0.0 < self.omega <= omega_max * (1.0 + _OMEGA_TOL):
            raise ConfigError(
                f"omega must lie in (0, 2*pi/theta_range = {omega_max:.6g}], "
                f"got {self.omega}"
            )
        if self.channel_noise_variance < 0.0:
            raise ConfigError(
                f"channel noise variance must be >= 0, got "
                f"{self.channel_noise_variance}"
            )

    @property
    def per_sensor_power(self) -> float:
        return self.power.per_sensor_power(self.n_sensors)


@dataclass(frozen=True)
class Snapshot:
    """Received fusion-center value for one time snapshot."""

    y: complex
    n_sensors: int
    config: NetworkConfig


def _channel_noise(rng, sigma_v2: float, n: int) -> np.ndarray:
    re = rng.standard_normal(n)
    im = rng.standard_normal(n)
    return math.sqrt(sigma_v2 / 2.0) * (re + 1j * im)


def cm_snapshot_batch(
    config: NetworkConfig, n_trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Simulate ``n_trials`` independent constant-modulus snapshots.

    Returns the complex received values
    y = sqrt(rho) * sum_i g_i * exp(j*omega*(theta + eta_i)) + v.
    Every transmitted symbol has modulus sqrt(rho) exactly, whatever the
    noise draws; fading rescales only the received amplitude.
    """
    L = config.n_sensors
    eta = config.noise.sample_sensors(rng, n_trials, L)
    phase = config.omega * (config.theta + eta)
    re = np.cos(phase)
    im = np.sin(phase)
    if not isinstance(config.fading, NoFading):
        gains = config.fading.sample_gains(rng, (n_trials, L))
        re *= gains
        im *= gains
    amp = math.sqrt(config.per_sensor_power)
    y = amp * (re.sum(axis=1) + 1j * im.sum(axis=1))
    if config.channel_noise_variance > 0.0:
        y = y + _channel_noise(rng, config.channel_noise_variance, n_trials)
    return y


def simulate_cm_snapshot(config: NetworkConfig, rng: np.random.Generator) -> Snapshot:
    """One constant-modulus snapshot."""
    y = cm_snapshot_batch(config, 1, rng)
    return Snapshot(y=complex(y[0]), n_sensors=config.n_sensors, config=config)


def af_gain(config: NetworkConfig, nominal_variance: float) -> float:
    """Amplify-and-forward gain meeting the average total-power constraint.

    alpha_L = sqrt(P_T / (L * (theta^2 + nominal_variance))).  The caller
    supplies the nominal sensing-noise variance because the true average
    power is undefined for infinite-variance noise, which is still simulated
    with a nominal calibration.  The true theta enters the calibration.
    """
    if not isinstance(config.power, TotalPower):
        raise ConfigError("amplify-and-forward is defined under a total power budget")
    if nominal_variance <= 0.0:
        raise ConfigError(
            f"nominal variance must be > 0 for AF gain, got {nominal_variance}"
        )
    L = config.n_sensors
    return math.sqrt(
        config.power.p_t / (L * (config.theta ** 2 + nominal_variance))
    )


def af_snapshot_batch(
    config: NetworkConfig,
    nominal_variance: float,
    rng: np.random.Generator,
    n_trials: int = 1,
) -> np.ndarray:
    """Simulate ``n_trials`` amplify-and-forward snapshots.

    y = alpha_L * sum_i (theta + eta_i) + v.  Per-sensor instantaneous power
    alpha_L^2 (theta + eta_i)^2 is a random variable, unbounded for
    heavy-tailed noise; only its average is constrained.
    """
    if not isinstance(config.fading, NoFading):
        raise ConfigError("fading is not modeled for the AF baseline")
    alpha = af_gain(config, nominal_variance)
    eta = config.noise.sample_sensors(rng, n_trials, config.n_sensors)
    y = alpha * (config.theta * config.n_sensors + eta.sum(axis=1)).astype(complex)
    if config.channel_noise_variance > 0.0:
        y = y + _channel_noise(rng, config.channel_noise_variance, n_trials)
    return y


def simulate_af_snapshot(
    config: NetworkConfig, nominal_variance: float, rng: np.random.Generator
) -> Snapshot:
    """One amplify-and-forward snapshot (total power budget, no fading)."""
    y = af_snapshot_batch(config, nominal_variance, rng, n_trials=1)
    return Snapshot(y=complex(y[0]), n_sensors=config.n_sensors, config=config)
