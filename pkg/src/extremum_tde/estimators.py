"""Delay estimators and the benchmark compression front-ends.

The decoder-side estimators all pick the delay maximizing a magnitude
objective over the delay spread D = {-d_max, ..., d_max}:

* MMIE: argmax over l in D of |y[j + l]|^2, where j is the received
  extremum index.  Reads exactly 2*d_max + 1 decoder samples.
* CCE: argmax over l in D of |(1/m) * sum_n x_hat[n] * conj(y[n + l])|^2,
  the classical cross-correlation search, computed lag by lag (direct
  products, no FFT) so its cost is Theta(m * (2*d_max + 1)).

Two compression front-ends feed the CCE for benchmarking the extremum
code against compress-then-correlate pipelines: an optimal Gaussian
forward test channel at the same total bit budget (``rd_compress``) and
1-bit-per-sample sign quantization (``one_bit_quantize``).

Windows are addressed like the generator lays them out: a decoder window
of length m + 2*d_max holds samples n = -d_max .. m-1+d_max, so sample
n sits at array index n + d_max.  Estimators accept any object that
supports ``len`` and slicing, which keeps sample-access instrumentable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .extremum_codec import Message
from .theory import harmonic_number


class EstimatorId(Enum):
    MMIE = "mmie"
    CCE = "cce"
    RD_CCE = "rd_cce"
    ONEBIT_CCE = "onebit_cce"


@dataclass(frozen=True)
class DelayEstimate:
    """A delay decision plus (optionally) the objective over the spread.

    When present, ``score_profile[i]`` is the objective at lag
    l = i - d_max and ``d_hat`` is its argmax with ties broken toward the
    smallest lag.
    """

    d_hat: int
    estimator_id: EstimatorId
    score_profile: Optional[np.ndarray] = None


def mmie_decode(y_window, msg: Message, d_max: int) -> DelayEstimate:
    """Decode the delay from the received extremum index.

    Picks argmax over l in D of |y[j + l]|^2, touching only the
    2*d_max + 1 decoder samples centered on the index j.
    """
    if d_max < 0:
        raise ValueError(f"d_max must be >= 0, got {d_max}")
    n = 1 << msg.k
    if len(y_window) < n + 2 * d_max:
        raise ValueError(
            f"decoder window too short: need {n + 2 * d_max} samples, got {len(y_window)}"
        )
    span = 2 * d_max + 1
    seg = np.asarray(y_window[msg.j : msg.j + span])
    scores = seg.real * seg.real + seg.imag * seg.imag
    return DelayEstimate(
        d_hat=int(np.argmax(scores)) - d_max,
        estimator_id=EstimatorId.MMIE,
        score_profile=scores,
    )


def rho_sq_mmie(y_at_j: complex, n: int) -> float:
    """Estimate |rho|^2 from the decoder sample at the extremum index.

    Returns |y[j]|^2 / H(n): asymptotically unbiased for |rho|^2 with
    variance O(1/H(n)), since E[|x[j]|^2] = H(n) exactly.
    """
    return abs(y_at_j) ** 2 / harmonic_number(n)


def rho_sq_profile(y_window, msg: Message, d_max: int, n: int) -> np.ndarray:
    """Correlation-magnitude profile |y[j + l]|^2 / H(n) over l in D.

    H(n) does not depend on the lag, so the argmax of this profile is
    exactly the MMIE decision.
    """
    est = mmie_decode(y_window, msg, d_max)
    return est.score_profile / harmonic_number(n)


def cce(
    x_hat,
    y_window,
    d_max: int,
    estimator_id: EstimatorId = EstimatorId.CCE,
) -> DelayEstimate:
    """Cross-correlation delay search over the delay spread.

    ``x_hat`` holds m samples aligned to encoder indices 0 .. m-1 (the
    full window, or a compressed prefix); ``y_window`` must cover samples
    -d_max .. m-1+d_max.  The objective at lag l is
    |(1/m) * sum_n x_hat[n] * conj(y[n + l])|^2, accumulated directly so
    every lag costs m products.
    """
    if d_max < 0:
        raise ValueError(f"d_max must be >= 0, got {d_max}")
    x = np.asarray(x_hat[:])
    m = x.size
    if m < 1:
        raise ValueError("x_hat must be nonempty")
    if len(y_window) < m + 2 * d_max:
        raise ValueError(
            f"window length mismatch: need >= {m + 2 * d_max} decoder samples, got {len(y_window)}"
        )
    span = 2 * d_max + 1
    scores = np.empty(span)
    for i in range(span):
        seg = np.asarray(y_window[i : i + m])
        c = np.vdot(seg, x)  # sum_n x[n] * conj(y[n + i - d_max])
        scores[i] = (c.real * c.real + c.imag * c.imag) / (m * m)
    return DelayEstimate(
        d_hat=int(np.argmax(scores)) - d_max,
        estimator_id=estimator_id,
        score_profile=scores,
    )


def forward_test_channel(
    values: np.ndarray, rate: float, stream: np.random.Generator, variance: float = 0.5
) -> np.ndarray:
    """Simulate optimal rate-R compression of i.i.d. real Gaussians.

    Applies the forward test channel that attains the Gaussian
    rate-distortion optimum at ``rate`` bits per sample: with distortion
    D = variance * 2**(-2*rate),

        out = (1 - D/variance) * values + noise,
        noise ~ Normal(0, D * (1 - D/variance)),

    so that E[(out - values)^2] = D exactly.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    distortion = variance * 2.0 ** (-2.0 * rate)
    scale = 1.0 - distortion / variance
    noise_std = math.sqrt(distortion * scale)
    return scale * values + noise_std * stream.standard_normal(len(values))


def rd_compress(x, k: int, stream: np.random.Generator) -> np.ndarray:
    """Compress the encoder window to k bits via the Gaussian test channel.

    The budget is split evenly: k/2 bits for the real part sequence and
    k/2 for the imaginary, i.e. rate k/(2n) bits per real sample at
    per-dimension source variance 1/2.  Consumes the stream real part
    first, then imaginary.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    x = np.asarray(x[:])
    n = x.size
    if n != 1 << k:
        raise ValueError(f"expected 2**k = {1 << k} samples, got {n}")
    rate = (k / 2.0) / n
    re = forward_test_channel(x.real, rate, stream)
    im = forward_test_channel(x.imag, rate, stream)
    return re + 1j * im


def one_bit_quantize(x, budget_k: int, truncate: bool = True) -> np.ndarray:
    """Sign-quantize to sign(Re) + j*sign(Im), respecting a k-bit budget.

    Each complex sample costs 2 bits, so only the first budget_k // 2
    samples are emitted (set ``truncate=False`` to quantize the whole
    window regardless of budget).  sign(0) is taken as +1.
    """
    if budget_k < 2:
        raise ValueError(f"budget_k must be >= 2, got {budget_k}")
    m = min(budget_k // 2, len(x)) if truncate else len(x)
    seg = np.asarray(x[:m])
    re = np.where(seg.real >= 0.0, 1.0, -1.0)
    im = np.where(seg.imag >= 0.0, 1.0, -1.0)
    return re + 1j * im
