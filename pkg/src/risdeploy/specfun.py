"""Special functions behind the capacity bound.

Only two series are needed: the confluent hypergeometric function
1F1(3/2; 1; k) and the modified Bessel function I0.  Both have positive
terms with factorial-squared denominators, so plain summation with a
term-ratio recursion converges quickly.  Above ``LOG_DOMAIN_THRESHOLD``
the series are summed in the log domain so nothing overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import DomainError

__all__ = [
    "LOS",
    "RicianSpec",
    "kummer_3half_1",
    "log_kummer_3half_1",
    "bessel_i0",
    "log_bessel_i0",
    "omega",
    "log_omega",
    "gamma_factor",
]

# Rician factor of a pure line-of-sight link.
LOS = math.inf

REL_TOL = 1e-14
MAX_TERMS = 500
LOG_DOMAIN_THRESHOLD = 30.0
# Beyond this the series needs more than MAX_TERMS terms; the large-argument
# expansions are accurate to machine precision there.
ASYMPTOTIC_THRESHOLD = 200.0


def _check_arg(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    if x < 0:
        raise DomainError(f"{name} must be >= 0, got {x}")
    return x


def is_los(k: float) -> bool:
    return math.isinf(k) and k > 0


@dataclass(frozen=True)
class RicianSpec:
    """Rician factors of the Tx->RIS (``K1``) and RIS->Rx (``K2``) hops.

    Use :data:`LOS` for a pure line-of-sight hop.
    """

    K1: float = 5.0
    K2: float = 5.0

    def __post_init__(self):
        for name in ("K1", "K2"):
            k = getattr(self, name)
            if math.isnan(k) or k < 0:
                raise DomainError(f"{name} must be >= 0 or LOS, got {k}")


def _series(ratio, n_max: int = MAX_TERMS) -> float:
    # ratio(j) gives t_{j+1} / t_j, with t_0 = 1
    total = term = 1.0
    for j in range(n_max):
        term *= ratio(j)
        total += term
        if term < REL_TOL * total:
            return total
    return total


def _log_series(log_ratio, n_max: int = MAX_TERMS) -> float:
    # Running log-sum-exp over log-terms; the peak term sets the scale.
    log_term = 0.0
    log_total = 0.0
    for j in range(n_max):
        log_term += log_ratio(j)
        if log_term > log_total:
            log_total = log_term + math.log1p(math.exp(log_total - log_term))
        else:
            log_total += math.log1p(math.exp(log_term - log_total))
        if log_term < log_total + math.log(REL_TOL) and log_ratio(j + 1) < 0:
            break
    return log_total


def kummer_3half_1(k: float) -> float:
    """Confluent hypergeometric function 1F1(3/2; 1; k) for k >= 0."""
    k = _check_arg(k, "k")
    if k <= LOG_DOMAIN_THRESHOLD:
        return _series(lambda j: (1.5 + j) * k / (j + 1) ** 2)
    return math.exp(log_kummer_3half_1(k))


def log_kummer_3half_1(k: float) -> float:
    """Natural log of 1F1(3/2; 1; k)."""
    k = _check_arg(k, "k")
    if k <= LOG_DOMAIN_THRESHOLD:
        return math.log(kummer_3half_1(k))
    if k <= ASYMPTOTIC_THRESHOLD:
        log_k = math.log(k)
        return _log_series(lambda j: math.log(1.5 + j) + log_k - 2 * math.log(j + 1))
    # 1F1(a; b; k) ~ G(b)/G(a) e^k k^(a-b) sum_s (b-a)_s (1-a)_s / (s! k^s)
    # with (b-a) = (1-a) = -1/2.  The companion e^-k branch is negligible here.
    acc = term = 1.0
    for s in range(60):
        term *= (s - 0.5) ** 2 / ((s + 1) * k)
        acc += term
        if abs(term) < REL_TOL * acc:
            break
    return k + 0.5 * math.log(k) - math.lgamma(1.5) + math.log(acc)


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero."""
    x = _check_arg(x, "x")
    if x <= LOG_DOMAIN_THRESHOLD:
        q = 0.25 * x * x
        return _series(lambda j: q / (j + 1) ** 2)
    return math.exp(log_bessel_i0(x))


def log_bessel_i0(x: float) -> float:
    x = _check_arg(x, "x")
    if x <= LOG_DOMAIN_THRESHOLD:
        return math.log(bessel_i0(x))
    if x <= ASYMPTOTIC_THRESHOLD:
        log_q = 2 * math.log(0.5 * x)
        return _log_series(lambda j: log_q - 2 * math.log(j + 1))
    # I0(x) ~ e^x / sqrt(2 pi x) * sum_s ((2s-1)!!)^2 / (s! (8x)^s)
    acc = term = 1.0
    for s in range(60):
        term *= (2 * s + 1) ** 2 / ((s + 1) * 8 * x)
        acc += term
        if term < REL_TOL * acc:
            break
    return x - 0.5 * math.log(2 * math.pi * x) + math.log(acc)


def log_omega(k: float) -> float:
    if is_los(k):
        return 0.0
    k = _check_arg(k, "k")
    return (
        math.log(math.pi / 4)
        + 2 * log_kummer_3half_1(k)
        - 2 * k
        - math.log1p(k)
    )


def omega(k: float) -> float:
    """pi 1F1(3/2;1;k)^2 / (4 (1+k) e^(2k)), the per-hop coherence factor.

    Runs from pi/4 at k = 0 (Rayleigh) to 1 as k -> infinity (pure LOS).
    """
    # guard the last ulp so the range [pi/4, 1] holds exactly
    return min(1.0, math.exp(log_omega(k)))


def gamma_factor(spec: RicianSpec) -> float:
    """Cross-term coefficient of the expected SNR, ``omega(K1) * omega(K2)``."""
    return omega(spec.K1) * omega(spec.K2)
