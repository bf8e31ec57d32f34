"""Statistical self-tests for the generator, the extremum law, and the bounds.

Each check draws fresh randomness from a seeded stream, compares an
empirical statistic against its closed form, and reports pass/fail.
Checks refuse to claim anything from under-powered runs: below
``MIN_REPLICATES`` they report ``inconclusive`` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_model import RawSensorParams, ccn_samples, effective_rho, generate_raw_pair
from .theory import extremum_cdf_exact, harmonic_moments, truncated_tail_bound_check

MIN_REPLICATES = 10_000

_CDF_WINDOW = 1024
_DKW_COEFF = 1.36  # 95% Dvoretzky-Kiefer-Wolfowitz band: 1.36 / sqrt(M)

# Raw-sensor settings exercised by the equivalence check; the middle one
# has |rho| = 1/2 exactly.
_RAW_SETTINGS = (
    RawSensorParams(alpha=1.0, theta_tilde=0.0, sigma1_sq=0.0, sigma2_sq=0.0),
    RawSensorParams(alpha=1.0, theta_tilde=0.3, sigma1_sq=1.0, sigma2_sq=1.0),
    RawSensorParams(alpha=0.5, theta_tilde=5.5, sigma1_sq=0.25, sigma2_sq=2.0),
)

# rho^2 x truncation x threshold grid for the tail-bound check.
_TAIL_GRID = tuple(
    (rho_sq, trunc, a)
    for rho_sq in (0.5, 0.9, 0.99)
    for trunc in (1.0, 2.0, 3.0)
    for a in (0.5, 1.0, 2.0, 3.0)
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _inconclusive(name: str, replicates: int) -> CheckResult:
    return CheckResult(
        name=name,
        status="inconclusive",
        detail=f"replicates={replicates} below minimum {MIN_REPLICATES}; not enough power",
    )


def _draw_extremum_values(replicates: int, seed: int) -> np.ndarray:
    """Max of |x|^2 over windows of length _CDF_WINDOW, one per replicate."""
    stream = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    out = np.empty(replicates)
    done = 0
    chunk = max(1, int(4e6) // _CDF_WINDOW)
    while done < replicates:
        m = min(chunk, replicates - done)
        x = ccn_samples(stream, m * _CDF_WINDOW).reshape(m, _CDF_WINDOW)
        out[done : done + m] = np.max(x.real**2 + x.imag**2, axis=1)
        done += m
    return out


def check_extremum_moments(replicates: int, seed: int) -> CheckResult:
    """Empirical mean/variance of the window maximum vs harmonic sums."""
    name = "extremum_moments"
    if replicates < MIN_REPLICATES:
        return _inconclusive(name, replicates)
    values = _draw_extremum_values(replicates, seed)
    mean_exact, var_exact = harmonic_moments(_CDF_WINDOW)
    mean_tol = 4.0 * math.sqrt(var_exact / replicates)
    # Var of the sample variance via the normal-ish 4th moment; Gumbel
    # excess kurtosis is 12/5, so E[(X-mu)^4] ~ 5.4 sigma^4.
    var_tol = 4.0 * var_exact * math.sqrt(4.4 / replicates)
    mean_err = abs(float(np.mean(values)) - mean_exact)
    var_err = abs(float(np.var(values)) - var_exact)
    ok = mean_err <= mean_tol and var_err <= var_tol
    return CheckResult(
        name=name,
        status="pass" if ok else "fail",
        detail=(
            f"n={_CDF_WINDOW} |mean-{mean_exact:.4f}|={mean_err:.2e} (tol {mean_tol:.2e}) "
            f"|var-{var_exact:.4f}|={var_err:.2e} (tol {var_tol:.2e})"
        ),
    )


def check_extremum_cdf(replicates: int, seed: int) -> CheckResult:
    """DKW band between the empirical CDF of max|x|^2 - log n and the exact law."""
    name = "extremum_cdf"
    if replicates < MIN_REPLICATES:
        return _inconclusive(name, replicates)
    values = np.sort(_draw_extremum_values(replicates, seed + 1)) - math.log(_CDF_WINDOW)
    exact = np.array([extremum_cdf_exact(t, _CDF_WINDOW) for t in values])
    steps = np.arange(1, replicates + 1) / replicates
    sup_dev = float(np.max(np.maximum(np.abs(steps - exact), np.abs(steps - 1 / replicates - exact))))
    band = _DKW_COEFF / math.sqrt(replicates)
    return CheckResult(
        name=name,
        status="pass" if sup_dev <= band else "fail",
        detail=f"sup|F_hat-F|={sup_dev:.5f} band={band:.5f} n={_CDF_WINDOW}",
    )


def check_raw_equivalence(replicates: int, seed: int) -> CheckResult:
    """Empirical correlation of the raw pair vs the reduced-model rho."""
    name = "raw_equivalence"
    if replicates < MIN_REPLICATES:
        return _inconclusive(name, replicates)
    stream = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    tol = 5.0 / math.sqrt(replicates)
    worst = 0.0
    details = []
    for raw in _RAW_SETTINGS:
        r1, r2, d = generate_raw_pair(raw, d_max=4, n_samples=replicates + 8, stream=stream)
        lo, hi = max(0, -d), len(r1) - max(0, d)
        cross = np.mean(r2[lo + d : hi + d] * np.conj(r1[lo:hi]))
        power = math.sqrt(float(np.mean(np.abs(r1) ** 2) * np.mean(np.abs(r2) ** 2)))
        dev = abs(cross / power - effective_rho(raw))
        worst = max(worst, dev)
        details.append(f"alpha={raw.alpha} dev={dev:.2e}")
    return CheckResult(
        name=name,
        status="pass" if worst <= tol else "fail",
        detail=f"max|corr_hat-rho|={worst:.2e} tol={tol:.2e} ({'; '.join(details)})",
    )


def check_truncated_tail(replicates: int, seed: int) -> CheckResult:
    """Tail inequality for the truncated signal plus noise, on the full grid."""
    name = "truncated_tail"
    if replicates < MIN_REPLICATES:
        return _inconclusive(name, replicates)
    stream = np.random.default_rng(np.random.SeedSequence([seed, 3]))
    failures = []
    for rho_sq, trunc, a in _TAIL_GRID:
        res = truncated_tail_bound_check(rho_sq, trunc, a, replicates, stream)
        if not res.holds:
            failures.append(f"(rho_sq={rho_sq}, V={trunc}, a={a}): lhs={res.lhs:.4g} rhs={res.rhs:.4g}")
    status = "pass" if not failures else "fail"
    detail = f"{len(_TAIL_GRID)} cells x {replicates} samples"
    if failures:
        detail += "; violated at " + "; ".join(failures)
    return CheckResult(name=name, status=status, detail=detail)


ALL_CHECKS = {
    "extremum_moments": check_extremum_moments,
    "extremum_cdf": check_extremum_cdf,
    "raw_equivalence": check_raw_equivalence,
    "truncated_tail": check_truncated_tail,
}


def run_verification(
    checks: list[str] | None = None, replicates: int = 100_000, seed: int = 0
) -> list[CheckResult]:
    """Run the named checks (all by default); unknown names raise KeyError."""
    names = list(ALL_CHECKS) if checks is None else list(checks)
    for name in names:
        if name not in ALL_CHECKS:
            raise KeyError(name)
    return [ALL_CHECKS[name](replicates, seed) for name in names]
