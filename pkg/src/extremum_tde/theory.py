"""Closed-form performance results for the extremum-encoding delay estimator.

Collected here:

* the error exponent E(snr) = snr / (2 + snr) and the matching upper and
  lower bounds on the decoding error probability,
* the exact law of the encoder's maximum, P(|x[j]|^2 < log(n) + tau) =
  (1 - exp(-tau)/n)**n, together with its Gumbel limit exp(-exp(-tau)),
* harmonic-sum moments of the maximum: E = H(n), Var = sum 1/i^2,
* a Monte Carlo checker for the tail inequality
  P(|rho*u + rho_bar*z| > a) >= P(|v| > a) - 2*V*exp(-V^2), where u is v
  truncated in magnitude at V.

All probabilities use base-2 exponentials in k (the message size); the
o(1) slack in the exponent is configurable via :class:`EpsilonMode`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .signal_model import ccn_samples

EULER_GAMMA = 0.5772156649015329

_LN2 = math.log(2.0)
_CHUNK = 1 << 22


@lru_cache(maxsize=None)
def harmonic_number(n: int) -> float:
    """H(n) = sum_{i=1..n} 1/i by direct summation (small terms first)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    total = 0.0
    hi = n
    while hi > 0:
        lo = max(hi - _CHUNK, 0)
        total += float(np.sum(1.0 / np.arange(hi, lo, -1, dtype=np.float64)))
        hi = lo
    return total


@lru_cache(maxsize=None)
def harmonic_moments(n: int) -> tuple[float, float]:
    """Mean and variance of the maximum of n i.i.d. unit-rate exponentials.

    Mean is H(n); variance is sum_{i=1..n} 1/i^2 (-> pi^2/6).  These are
    also the exact moments of |x[j]|^2 for the extremum encoder.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    var = 0.0
    hi = n
    while hi > 0:
        lo = max(hi - _CHUNK, 0)
        i = np.arange(hi, lo, -1, dtype=np.float64)
        var += float(np.sum(1.0 / (i * i)))
        hi = lo
    return harmonic_number(n), var


def harmonic_asymptotic(n: int) -> float:
    """log(n) + Euler-Mascheroni, the large-n form of H(n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.log(n) + EULER_GAMMA


class EpsilonMode(Enum):
    """Concrete choice for the o(1) slack eps(k) in the bound exponents.

    ZERO drops the slack (the plotting convention); DELTA_OVER_LOGN uses
    log(k*ln 2)/(k*ln 2), the slack produced by the extremum-law threshold
    delta(k) = log(k*ln 2).
    """

    ZERO = "zero"
    DELTA_OVER_LOGN = "delta_over_logn"


def epsilon_term(k: int, mode: EpsilonMode) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if mode is EpsilonMode.ZERO:
        return 0.0
    return math.log(k * _LN2) / (k * _LN2)


def error_exponent(snr: float) -> float:
    """E(snr) = snr / (2 + snr), the decay rate of the error probability
    per message bit.  Equals |rho|^2 / (2 - |rho|^2)."""
    if not snr > 0:
        raise ValueError(f"snr must be > 0, got {snr}")
    if math.isinf(snr):
        return 1.0
    return snr / (2.0 + snr)


def upper_bound(
    k: int, snr: float, d_max: int, epsilon_mode: EpsilonMode = EpsilonMode.ZERO
) -> float:
    """Upper bound (2*d_max*(1+snr)/(2+snr)) * 2**(-k*E*(1-eps(k))).

    Not clamped to [0, 1]; see :func:`evaluate_bounds` for the clamped
    probability.
    """
    if d_max < 0:
        raise ValueError(f"d_max must be >= 0, got {d_max}")
    exponent = error_exponent(snr)
    eps = epsilon_term(k, epsilon_mode)
    prefactor = 2.0 * d_max * (1.0 + snr) / (2.0 + snr) if not math.isinf(snr) else 2.0 * d_max
    return prefactor * 2.0 ** (-k * exponent * (1.0 - eps))


def lower_bound(k: int, snr: float, epsilon_mode: EpsilonMode = EpsilonMode.ZERO) -> float:
    """Lower bound 2**(-k*E*(1+eps(k))); independent of the delay spread."""
    exponent = error_exponent(snr)
    eps = epsilon_term(k, epsilon_mode)
    return 2.0 ** (-k * exponent * (1.0 + eps))


@dataclass(frozen=True)
class BoundReport:
    """Bound evaluation at one (k, snr, d_max) operating point."""

    k: int
    snr: float
    d_max: int
    exponent: float
    upper: float
    upper_clamped: float
    lower: float
    epsilon_mode: EpsilonMode


def evaluate_bounds(
    k: int, snr: float, d_max: int, epsilon_mode: EpsilonMode = EpsilonMode.ZERO
) -> BoundReport:
    up = upper_bound(k, snr, d_max, epsilon_mode)
    return BoundReport(
        k=k,
        snr=snr,
        d_max=d_max,
        exponent=error_exponent(snr),
        upper=up,
        upper_clamped=min(up, 1.0),
        lower=lower_bound(k, snr, epsilon_mode),
        epsilon_mode=epsilon_mode,
    )


def extremum_cdf_exact(tau: float, n: int) -> float:
    """P(max of n unit-rate exponentials < log(n) + tau) = (1 - e^-tau/n)**n.

    Evaluated as exp(n*log1p(-q)) with q = exp(-tau)/n, which stays
    accurate when q is tiny.  Returns 0 when q >= 1 (empty event).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    q = math.exp(-tau) / n
    if q >= 1.0:
        return 0.0
    return math.exp(n * math.log1p(-q))


def extremum_cdf_limit(tau: float) -> float:
    """Gumbel limit exp(-exp(-tau)) of :func:`extremum_cdf_exact`."""
    return math.exp(-math.exp(-tau))


class TailBoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def truncated_tail_bound_check(
    rho_sq: float,
    trunc: float,
    a: float,
    n_samples: int,
    stream: np.random.Generator,
    z_slack: float = 3.0,
) -> TailBoundCheck:
    """Monte Carlo check of the truncated-signal tail inequality.

    With v, z independent CCN(0, 1) and u = v truncated in magnitude at
    ``trunc``, estimates lhs = P(|rho*u + rho_bar*z| > a) and compares it
    against rhs = P(|v| > a) - 2*trunc*exp(-trunc^2)
    = exp(-a^2) - 2*trunc*exp(-trunc^2) (Rayleigh tail).  ``holds`` is
    lhs >= rhs - slack, with slack a ``z_slack``-sigma binomial margin.

    Requires trunc > 1/sqrt(2) and a > 0.
    """
    if not trunc > 1.0 / math.sqrt(2.0):
        raise ValueError(f"trunc must exceed 1/sqrt(2), got {trunc}")
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    if not 0.0 <= rho_sq <= 1.0:
        raise ValueError(f"rho_sq must lie in [0, 1], got {rho_sq}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")

    rho = math.sqrt(rho_sq)
    rho_bar = math.sqrt(1.0 - rho_sq)
    hits = 0
    remaining = n_samples
    while remaining > 0:
        m = min(remaining, _CHUNK)
        v = ccn_samples(stream, m)
        z = ccn_samples(stream, m)
        mag = np.abs(v)
        scale = np.minimum(mag, trunc) / np.where(mag > 0, mag, 1.0)
        w = rho * (v * scale) + rho_bar * z
        hits += int(np.count_nonzero(np.abs(w) > a))
        remaining -= m
    lhs = hits / n_samples
    rhs = math.exp(-a * a) - 2.0 * trunc * math.exp(-trunc * trunc)
    slack = z_slack * math.sqrt(max(lhs * (1.0 - lhs), 1.0 / n_samples) / n_samples)
    return TailBoundCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - slack)
