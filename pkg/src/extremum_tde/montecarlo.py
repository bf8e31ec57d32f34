"""Reproducible Monte Carlo harness for delay-estimation error rates.

Every trial owns a dedicated random stream derived from
(master_seed, trial_index), so results are bit-identical for any worker
count and any execution order; aggregation is pure counting.  Adaptive
runs stop at a fixed batch boundary once every estimator has accrued the
requested number of errors (or at ``max_trials``), which keeps the
stopping rule worker-independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .estimators import (
    EstimatorId,
    cce,
    mmie_decode,
    one_bit_quantize,
    rd_compress,
)
from .extremum_codec import encode_max_index
from .signal_model import ModelParams, generate_pair
from .theory import BoundReport, EpsilonMode, evaluate_bounds

_WILSON_Z = 1.959963984540054  # two-sided 95%

# Canonical evaluation order; fixes the rng consumption sequence per trial.
_CANONICAL_ORDER = (
    EstimatorId.MMIE,
    EstimatorId.CCE,
    EstimatorId.RD_CCE,
    EstimatorId.ONEBIT_CCE,
)


def wilson_interval(errors: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion.

    Valid down to zero observed errors, unlike the normal interval.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= errors <= trials:
        raise ValueError("errors must lie in [0, trials]")
    p_hat = errors / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials)) / denom
    # the endpoints are exact at the boundary counts; avoid sqrt residue
    low = 0.0 if errors == 0 else max(center - half, 0.0)
    high = 1.0 if errors == trials else min(center + half, 1.0)
    return low, high


@dataclass(frozen=True)
class ErrorRateEstimate:
    """Error-probability estimate for one estimator."""

    estimator_id: EstimatorId
    trials: int
    errors: int
    p_hat: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, estimator_id: EstimatorId, errors: int, trials: int) -> "ErrorRateEstimate":
        low, high = wilson_interval(errors, trials)
        return cls(
            estimator_id=estimator_id,
            trials=trials,
            errors=errors,
            p_hat=errors / trials,
            ci_low=low,
            ci_high=high,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    Either fix ``trials``, or leave it None for adaptive stopping: run in
    batches of ``batch_size`` until every estimator has at least
    ``min_errors`` errors or ``max_trials`` is reached.  The estimator
    set is normalized to canonical order so the per-trial stream usage is
    unambiguous.
    """

    params: ModelParams
    estimators: tuple[EstimatorId, ...] = (EstimatorId.MMIE,)
    master_seed: int = 0
    trials: Optional[int] = None
    min_errors: int = 100
    max_trials: int = 1_000_000
    batch_size: int = 4096

    def __post_init__(self) -> None:
        ids = tuple(est for est in _CANONICAL_ORDER if est in set(self.estimators))
        if not ids:
            raise ValueError("at least one estimator is required")
        object.__setattr__(self, "estimators", ids)
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.trials is None:
            if self.min_errors < 1:
                raise ValueError(f"min_errors must be >= 1, got {self.min_errors}")
            if self.max_trials < 1:
                raise ValueError(f"max_trials must be >= 1, got {self.max_trials}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def trial_stream(master_seed: int, trial_index: int) -> np.random.Generator:
    """Dedicated stream for one trial, independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, trial_index]))


def run_trial(config: ExperimentConfig, trial_index: int) -> dict[EstimatorId, bool]:
    """Run one trial; returns, per estimator, whether d_hat == d_true.

    All requested estimators see the same realization.  Stream usage is
    fixed: the observation pair first, then compression noise for RD_CCE
    when requested.
    """
    params = config.params
    stream = trial_stream(config.master_seed, trial_index)
    pair = generate_pair(params, stream)
    msg = encode_max_index(pair.encoder_window)

    flags: dict[EstimatorId, bool] = {}
    for est in config.estimators:
        if est is EstimatorId.MMIE:
            d_hat = mmie_decode(pair.y, msg, params.d_max).d_hat
        elif est is EstimatorId.CCE:
            d_hat = cce(pair.encoder_window, pair.y, params.d_max).d_hat
        elif est is EstimatorId.RD_CCE:
            x_hat = rd_compress(pair.encoder_window, params.k, stream)
            d_hat = cce(x_hat, pair.y, params.d_max, EstimatorId.RD_CCE).d_hat
        else:
            x_hat = one_bit_quantize(pair.encoder_window, params.k)
            d_hat = cce(x_hat, pair.y, params.d_max, EstimatorId.ONEBIT_CCE).d_hat
        flags[est] = d_hat == pair.d_true
    return flags


def _count_errors(config: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    """Error counts per estimator over trial indices [start, stop)."""
    counts = np.zeros(len(config.estimators), dtype=np.int64)
    for t in range(start, stop):
        flags = run_trial(config, t)
        for i, est in enumerate(config.estimators):
            counts[i] += not flags[est]
    return counts


def _chunks(start: int, stop: int, pieces: int) -> list[tuple[int, int]]:
    size = stop - start
    pieces = max(1, min(pieces, size))
    step = -(-size // pieces)
    return [(a, min(a + step, stop)) for a in range(start, stop, step)]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[ErrorRateEstimate]:
    """Run the experiment; returns one estimate per requested estimator.

    Results are identical for any ``workers`` value: trials are seeded by
    absolute index and error counts merge commutatively.
    """
    total_cap = config.trials if config.trials is not None else config.max_trials
    counts = np.zeros(len(config.estimators), dtype=np.int64)
    done = 0

    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while done < total_cap:
            batch_stop = min(done + config.batch_size, total_cap)
            pieces = _chunks(done, batch_stop, workers)
            if executor is None:
                results = [_count_errors(config, a, b) for a, b in pieces]
            else:
                results = list(
                    executor.map(_count_errors, [config] * len(pieces), *zip(*pieces))
                )
            counts += np.sum(results, axis=0)
            done = batch_stop
            if config.trials is None and bool(np.all(counts >= config.min_errors)):
                break
    finally:
        if executor is not None:
            executor.shutdown()

    return [
        ErrorRateEstimate.from_counts(est, int(counts[i]), done)
        for i, est in enumerate(config.estimators)
    ]


def derive_point_seed(master_seed: int, index: int) -> int:
    """Per-point master seed for sweeps, stable under point reordering."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepPoint:
    """One sweep point: estimates plus the matching closed-form bounds."""

    k: int
    snr_db: float
    d_max: int
    master_seed: int
    estimates: list[ErrorRateEstimate] = field(default_factory=list)
    bounds: Optional[BoundReport] = None


def _run_point(
    config: ExperimentConfig, index: int, workers: int, epsilon_mode: EpsilonMode
) -> SweepPoint:
    params = config.params
    point_config = replace(config, master_seed=derive_point_seed(config.master_seed, index))
    estimates = run_experiment(point_config, workers=workers)
    bounds = None
    if params.snr > 0:
        bounds = evaluate_bounds(params.k, params.snr, params.d_max, epsilon_mode)
    return SweepPoint(
        k=params.k,
        snr_db=params.snr_db,
        d_max=params.d_max,
        master_seed=point_config.master_seed,
        estimates=estimates,
        bounds=bounds,
    )


def sweep_k(
    base_config: ExperimentConfig,
    k_values: Sequence[int],
    workers: int = 1,
    epsilon_mode: EpsilonMode = EpsilonMode.ZERO,
) -> list[SweepPoint]:
    """Run one experiment per message size; bounds attached per point."""
    if not k_values:
        raise ValueError("k_values must be nonempty")
    points = []
    for i, k in enumerate(k_values):
        config = replace(base_config, params=replace(base_config.params, k=int(k)))
        points.append(_run_point(config, i, workers, epsilon_mode))
    return points


def sweep_snr(
    base_config: ExperimentConfig,
    snr_db_values: Sequence[float],
    workers: int = 1,
    epsilon_mode: EpsilonMode = EpsilonMode.ZERO,
) -> list[SweepPoint]:
    """Run one experiment per SNR value; bounds attached per point."""
    if not snr_db_values:
        raise ValueError("snr_db_values must be nonempty")
    points = []
    for i, snr_db in enumerate(snr_db_values):
        config = replace(
            base_config, params=replace(base_config.params, snr_db=float(snr_db))
        )
        points.append(_run_point(config, i, workers, epsilon_mode))
    return points


def fit_constant(
    k_values: Sequence[int], p_hats: Sequence[float], exponent: float
) -> float:
    """Least-squares fit of c in log2 p ~ log2 c - k * exponent.

    Only points with p_hat > 0 contribute; raises if none remain.
    """
    pairs = [(k, p) for k, p in zip(k_values, p_hats, strict=True) if p > 0]
    if not pairs:
        raise ValueError("fit requires at least one positive error-rate estimate")
    log2_c = np.mean([math.log2(p) + k * exponent for k, p in pairs])
    return float(2.0**log2_c)
