"""Correlated complex-Gaussian observation model for two distant sensors.

One sensor (the "encoder") observes a white, unit-variance circular
complex normal (CCN) signal ``x[n]``.  The other (the "decoder") observes
a correlated, noisy copy delayed by an unknown integer number of samples:

    y[n] = rho * x[n - d] + rho_bar * z[n],    rho = |rho| * exp(j*theta),

where ``z[n]`` is white CCN(0, 1) independent of ``x``, ``rho_bar =
sqrt(1 - |rho|^2)``, and the delay ``d`` is uniform on the delay spread
``{-d_max, ..., d_max}``.  The SNR is defined through the correlation
magnitude as ``snr = |rho|^2 / rho_bar^2``, i.e. ``|rho|^2 = snr / (1 + snr)``.

The raw two-sensor form (a common signal received with attenuation,
phase rotation and independent noise at each sensor) reduces to the
model above after variance normalization; :func:`effective_rho` returns
the correlation coefficient of that reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT_HALF = math.sqrt(0.5)
_TWO_PI = 2.0 * math.pi


def rho_from_snr(snr_db: float) -> tuple[float, float]:
    """Map an SNR in dB to (|rho|^2, rho_bar^2).

    Uses |rho|^2 = snr / (1 + snr), the inverse of snr = |rho|^2 / rho_bar^2.
    ``-inf`` dB is accepted and yields (0, 1); the complement is exact by
    construction.
    """
    if math.isnan(snr_db):
        raise ValueError("snr_db must not be NaN")
    snr = 10.0 ** (snr_db / 10.0)
    if math.isinf(snr):
        rho_sq = 1.0
    else:
        rho_sq = snr / (1.0 + snr)
    return rho_sq, 1.0 - rho_sq


def ccn_samples(stream: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` i.i.d. unit-variance circular complex normal samples.

    Each sample is (a + j*b)/sqrt(2) with a, b independent standard
    normals, so E[|x|^2] = 1 and E[x^2] = 0 hold exactly in law.
    """
    a = stream.standard_normal(2 * size)
    a *= _SQRT_HALF
    return a.view(np.complex128)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the correlated-pair model.

    snr_db  : SNR in decibels (may be -inf for the uncorrelated case)
    d_max   : maximum absolute delay in samples; spread size is 2*d_max + 1
    k       : message size in bits; the encoder window has n = 2**k samples
    theta   : phase of the correlation coefficient, in [0, 2*pi)
    """

    snr_db: float
    d_max: int
    k: int
    theta: float = 0.0

    def __post_init__(self) -> None:
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")
        if self.d_max < 0:
            raise ValueError(f"d_max must be >= 0, got {self.d_max}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not (0.0 <= self.theta < _TWO_PI):
            raise ValueError(f"theta must lie in [0, 2*pi), got {self.theta}")

    @property
    def n(self) -> int:
        """Encoder window length, 2**k (never stored independently)."""
        return 1 << self.k

    @property
    def snr(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def rho_sq(self) -> float:
        return rho_from_snr(self.snr_db)[0]

    @property
    def rho_bar_sq(self) -> float:
        return rho_from_snr(self.snr_db)[1]

    @property
    def rho(self) -> complex:
        return math.sqrt(self.rho_sq) * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def spread_size(self) -> int:
        return 2 * self.d_max + 1


@dataclass(frozen=True)
class ObservationPair:
    """One realization of the correlated pair.

    ``x`` holds samples n = -2*d_max .. n_window-1 + 2*d_max (the extra
    margin is exactly what the decoder window needs for every admissible
    delay); ``y`` holds samples n = -d_max .. n_window-1 + d_max.  The
    relation y[n] = rho*x[n - d_true] + rho_bar*z[n] holds on all of ``y``
    by construction; the noise ``z`` is not stored.
    """

    x: np.ndarray
    y: np.ndarray
    d_true: int
    d_max: int

    def __post_init__(self) -> None:
        if len(self.x) != len(self.y) + 2 * self.d_max:
            raise ValueError("x must extend y's support by d_max on each side")
        if abs(self.d_true) > self.d_max:
            raise ValueError("d_true outside the delay spread")
        if self.n_window < 1:
            raise ValueError("empty encoder window")

    @property
    def n_window(self) -> int:
        """Encoder window length N."""
        return len(self.x) - 4 * self.d_max

    @property
    def encoder_window(self) -> np.ndarray:
        """The encoder's view: samples x[0 .. N-1]."""
        return self.x[2 * self.d_max : 2 * self.d_max + self.n_window]

    def x_at(self, n: int) -> complex:
        return self.x[n + 2 * self.d_max]

    def y_at(self, n: int) -> complex:
        return self.y[n + self.d_max]


def generate_pair(params: ModelParams, stream: np.random.Generator) -> ObservationPair:
    """Draw one observation pair from the correlated model.

    Consumes the stream in a fixed order (delay, then x, then z) so that
    realizations are reproducible from the stream state alone.
    """
    n, d_max = params.n, params.d_max
    d_true = int(stream.integers(-d_max, d_max + 1)) if d_max > 0 else 0
    x = ccn_samples(stream, n + 4 * d_max)
    z = ccn_samples(stream, n + 2 * d_max)
    # y sample n sits at array index n + d_max; x[n - d] at n - d + 2*d_max
    start = d_max - d_true
    y = params.rho * x[start : start + n + 2 * d_max]
    z *= math.sqrt(params.rho_bar_sq)  # z is private here; scale in place
    y += z
    return ObservationPair(x=x, y=y, d_true=d_true, d_max=d_max)


@dataclass(frozen=True)
class RawSensorParams:
    """Raw two-sensor model: r1[n] = s[n] + z1[n],
    r2[n] = alpha * exp(j*theta_tilde) * s[n - d] + z2[n],
    with s white CCN(0,1) and z1, z2 independent white CCN noises.
    """

    alpha: float
    theta_tilde: float = 0.0
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.sigma1_sq < 0 or self.sigma2_sq < 0:
            raise ValueError("noise variances must be >= 0")
        if not (0.0 <= self.theta_tilde < _TWO_PI):
            raise ValueError(f"theta_tilde must lie in [0, 2*pi), got {self.theta_tilde}")


def generate_raw_pair(
    raw: RawSensorParams,
    d_max: int,
    n_samples: int,
    stream: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Draw (r1, r2, d_true) from the raw two-sensor model.

    Both returned signals hold samples n = 0 .. n_samples-1; the common
    signal is generated on an extended support so r2 is defined for every
    admissible delay.  Stream order: delay, s, z1, z2.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if d_max < 0:
        raise ValueError("d_max must be >= 0")
    d_true = int(stream.integers(-d_max, d_max + 1)) if d_max > 0 else 0
    s = ccn_samples(stream, n_samples + 2 * d_max)  # samples -d_max .. n_samples-1+d_max
    z1 = ccn_samples(stream, n_samples)
    z2 = ccn_samples(stream, n_samples)
    gain = raw.alpha * complex(math.cos(raw.theta_tilde), math.sin(raw.theta_tilde))
    r1 = s[d_max : d_max + n_samples] + math.sqrt(raw.sigma1_sq) * z1
    start = d_max - d_true
    r2 = gain * s[start : start + n_samples] + math.sqrt(raw.sigma2_sq) * z2
    return r1, r2, d_true


def effective_rho(raw: RawSensorParams) -> complex:
    """Correlation coefficient of the variance-normalized raw pair.

    This is the rho of the equivalent correlated-pair model:
    alpha * exp(j*theta_tilde) / sqrt((1 + sigma1^2) * (alpha^2 + sigma2^2)).
    """
    gain = raw.alpha * complex(math.cos(raw.theta_tilde), math.sin(raw.theta_tilde))
    norm = math.sqrt((1.0 + raw.sigma1_sq) * (raw.alpha**2 + raw.sigma2_sq))
    return gain / norm
