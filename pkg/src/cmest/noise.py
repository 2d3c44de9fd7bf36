"""Sensing-noise distributions: sampling, characteristic functions, moments.

Every model is symmetric about zero.  Characteristic functions are therefore
real-valued, and are only evaluated at omega >= 0.  Models are immutable;
sampling takes a caller-owned ``numpy.random.Generator`` so threads never
share stream state.
"""

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError, MomentUndefinedError, UnsupportedModelError

__all__ = [
    "NoiseModel",
    "Gaussian",
    "Laplace",
    "Cauchy",
    "Uniform",
    "ClassA",
    "HeterogeneousScaled",
    "BoundedScales",
    "LinearGrowthScales",
    "class_a_mgf",
]


def class_a_mgf(t: float, overlap: float, background_ratio: float, variance: float):
    """Moment generating function of the Middleton Class-A variance mixture.

    The mixture variable is X = variance * [Y/(A(T+1)) + T/(T+1)] with
    Y ~ Poisson(A), where A is the impulsive overlap factor and T the
    background-to-impulsive power ratio.  Then

        M_X(t) = exp(t * variance * T/(T+1))
                 * exp(A * (exp(t * variance / (A (T+1))) - 1)),

    evaluated for t <= 0 only, where it lies in (0, 1].
    """
    if overlap <= 0.0:
        raise DomainError(f"Class-A overlap factor must be > 0, got {overlap}")
    if background_ratio < 0.0:
        raise DomainError(
            f"Class-A background ratio must be >= 0, got {background_ratio}"
        )
    t = np.asarray(t, dtype=float)
    if np.any(t > 0.0):
        raise DomainError("class_a_mgf is only evaluated at t <= 0")
    a, big_t = overlap, background_ratio
    out = np.exp(t * variance * big_t / (big_t + 1.0)) * np.exp(
        a * np.expm1(t * variance / (a * (big_t + 1.0)))
    )
    return out if out.ndim else float(out)


def _poisson_inversion(rng: np.random.Generator, lam: float, size) -> np.ndarray:
    """Poisson draws by CDF inversion with sequential search.

    One uniform per draw; deterministic given the stream.  Expected cost is
    O(lam) per draw, fine for the small overlap factors used here.
    """
    u = rng.random(1 if size is None else size)
    out = np.zeros(np.shape(u), dtype=np.int64)
    pmf = math.exp(-lam)
    cdf = pmf
    k = 0
    remaining = u >= cdf
    while remaining.any():
        k += 1
        pmf *= lam / k
        cdf += pmf
        out[remaining] = k
        remaining &= u >= cdf
        if pmf < 1e-320 and k > lam:  # tail mass exhausted in float64
            break
    return out


class NoiseModel:
    """Common interface of all sensing-noise distributions."""

    def cf(self, omega):
        """Characteristic function E[exp(j*omega*eta)], real by symmetry."""
        raise UnsupportedModelError(
            f"{type(self).__name__} has no single characteristic function"
        )

    def variance(self) -> float:
        raise MomentUndefinedError(f"{type(self).__name__} variance undefined")

    def excess_kurtosis(self) -> float:
        raise MomentUndefinedError(f"{type(self).__name__} kurtosis undefined")

    def sample(self, rng: np.random.Generator, size=None, sensor_index: int = 1):
        """Draw noise values; ``sensor_index`` only matters for per-sensor scaling."""
        raise NotImplementedError

    def sample_sensors(
        self, rng: np.random.Generator, n_trials: int, n_sensors: int
    ) -> np.ndarray:
        """(n_trials, n_sensors) noise matrix; column j belongs to sensor j+1."""
        return self.sample(rng, (n_trials, n_sensors))


@dataclass(frozen=True)
class Gaussian(NoiseModel):
    variance_: float = 1.0

    def __post_init__(self):
        if self.variance_ <= 0.0:
            raise DomainError(f"Gaussian variance must be > 0, got {self.variance_}")

    def cf(self, omega):
        return np.exp(-0.5 * self.variance_ * np.square(omega))

    def variance(self) -> float:
        return self.variance_

    def excess_kurtosis(self) -> float:
        return 0.0

    def sample(self, rng, size=None, sensor_index=1):
        return math.sqrt(self.variance_) * rng.standard_normal(size)


@dataclass(frozen=True)
class Laplace(NoiseModel):
    """Laplace noise with total variance ``variance_`` (scale b, b^2 = variance/2)."""

    variance_: float = 1.0

    def __post_init__(self):
        if self.variance_ <= 0.0:
            raise DomainError(f"Laplace variance must be > 0, got {self.variance_}")

    @property
    def scale(self) -> float:
        return math.sqrt(self.variance_ / 2.0)

    def cf(self, omega):
        return 1.0 / (1.0 + (self.variance_ / 2.0) * np.square(omega))

    def variance(self) -> float:
        return self.variance_

    def excess_kurtosis(self) -> float:
        return 3.0

    def sample(self, rng, size=None, sensor_index=1):
        return rng.laplace(0.0, self.scale, size)


@dataclass(frozen=True)
class Cauchy(NoiseModel):
    """Cauchy noise with scale gamma.  No moments exist."""

    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0.0:
            raise DomainError(f"Cauchy scale must be > 0, got {self.scale}")

    def cf(self, omega):
        return np.exp(-self.scale * np.abs(omega))

    def sample(self, rng, size=None, sensor_index=1):
        # Inversion: gamma * tan(pi (U - 1/2)).
        return self.scale * np.tan(np.pi * (rng.random(size) - 0.5))


@dataclass(frozen=True)
class Uniform(NoiseModel):
    """Uniform noise on [-a, a] with a = sqrt(3 * variance)."""

    variance_: float = 1.0

    def __post_init__(self):
        if self.variance_ <= 0.0:
            raise DomainError(f"Uniform variance must be > 0, got {self.variance_}")

    @property
    def half_width(self) -> float:
        return math.sqrt(3.0 * self.variance_)

    def cf(self, omega):
        x = self.half_width * np.asarray(omega, dtype=float)
        # sin(x)/x with a two-term Taylor fallback below x = 1e-4 to dodge 0/0.
        small = np.abs(x) < 1e-4
        safe = np.where(small, 1.0, x)
        out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
        return out if out.ndim else float(out)

    def variance(self) -> float:
        return self.variance_

    def excess_kurtosis(self) -> float:
        return -1.2

    def sample(self, rng, size=None, sensor_index=1):
        a = self.half_width
        return rng.uniform(-a, a, size)


@dataclass(frozen=True)
class ClassA(NoiseModel):
    """Middleton Class-A impulsive noise (compound Gaussian, Poisson mixture).

    ``overlap`` is the impulsive overlap factor (Poisson rate), and
    ``background_ratio`` the Gaussian-background-to-impulsive power ratio.
    Total variance is ``variance_`` for any parameter choice.
    """

    overlap: float = 0.1
    background_ratio: float = 0.1
    variance_: float = 1.0

    def __post_init__(self):
        if self.overlap <= 0.0:
            raise DomainError(f"Class-A overlap must be > 0, got {self.overlap}")
        if self.background_ratio < 0.0:
            raise DomainError(
                f"Class-A background ratio must be >= 0, got {self.background_ratio}"
            )
        if self.variance_ <= 0.0:
            raise DomainError(f"Class-A variance must be > 0, got {self.variance_}")

    def cf(self, omega):
        t = -0.5 * np.square(np.asarray(omega, dtype=float))
        return class_a_mgf(t, self.overlap, self.background_ratio, self.variance_)

    def variance(self) -> float:
        # E[X] = variance regardless of overlap/background split.
        return self.variance_

    def excess_kurtosis(self) -> float:
        # kappa = 3 var(X) / E[X]^2 for a compound Gaussian sqrt(X)*G.
        return 3.0 / (self.overlap * (self.background_ratio + 1.0) ** 2)

    def sample(self, rng, size=None, sensor_index=1):
        y = _poisson_inversion(rng, self.overlap, size)
        big_t = self.background_ratio
        x = self.variance_ * (
            y / (self.overlap * (big_t + 1.0)) + big_t / (big_t + 1.0)
        )
        draws = np.sqrt(x) * rng.standard_normal(np.shape(y))
        return float(draws[0]) if size is None else draws


@dataclass(frozen=True)
class BoundedScales:
    """Per-sensor scales sigma_i = sigma_max * (1 - 1/(i+1)); bounded above."""

    sigma_max: float = 1.0

    def __call__(self, sensor_index):
        i = np.asarray(sensor_index, dtype=float)
        return self.sigma_max * (1.0 - 1.0 / (i + 1.0))


@dataclass(frozen=True)
class LinearGrowthScales:
    """Per-sensor scales sigma_i = sigma * sqrt(i); variances grow linearly."""

    sigma: float = 1.0

    def __call__(self, sensor_index):
        return self.sigma * np.sqrt(np.asarray(sensor_index, dtype=float))


ScaleRule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HeterogeneousScaled(NoiseModel):
    """Non-identically distributed noise eta_i = sigma_i * eta.

    ``scale_rule`` maps 1-based sensor indices to scales sigma_i.  There is no
    single characteristic function, so cf() and the moments raise.
    """

    base: NoiseModel
    scale_rule: ScaleRule

    def sample(self, rng, size=None, sensor_index=1):
        return float(self.scale_rule(sensor_index)) * self.base.sample(rng, size)

    def sample_sensors(self, rng, n_trials, n_sensors):
        scales = np.asarray(self.scale_rule(np.arange(1, n_sensors + 1)))
        return self.base.sample(rng, (n_trials, n_sensors)) * scales[None, :]


AnyNoise = Union[Gaussian, Laplace, Cauchy, Uniform, ClassA, HeterogeneousScaled]
