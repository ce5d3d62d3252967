"""Cascade Rician fading, SNR and ergodic capacity.

The Monte Carlo estimator draws its randomness in fixed-size blocks of
trials.  Block ``i`` always uses the stream ``SeedSequence(seed,
spawn_key=(i,))``, and inside a block trial ``t`` and unit ``n`` always
read the same position, so the estimate is a pure function of the inputs
and the seed no matter how many workers process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import DomainError, SceneGeometry, link_distances
from .radiometrics import PatternConfig, composite_gain
from .specfun import RicianSpec, gamma_factor, is_los, log_bessel_i0, log_kummer_3half_1

__all__ = [
    "LinkBudget",
    "ChannelSample",
    "CapacityReport",
    "BLOCK_TRIALS",
    "sample_cascade",
    "instantaneous_snr",
    "mc_ergodic_capacity",
    "expected_snr",
    "snr_per_ccg",
    "capacity_upper_bound",
    "moment_abs",
    "pdf_abs",
    "db",
]

BLOCK_TRIALS = 2048


def db(x: float) -> float:
    return 10 * math.log10(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class LinkBudget:
    """Link budget; defaults follow the reference planning scenario."""

    p_t_dbm: float = 10.0
    noise_density_dbm_hz: float = -174.0
    bandwidth_hz: float = 5e6
    rho0_db: float = -40.0
    n_units: int = 64
    wavelength_m: float = 0.125
    reflect_amp: float = 1.0

    def __post_init__(self):
        if int(self.n_units) != self.n_units or self.n_units < 1:
            raise DomainError(f"n_units must be an integer >= 1, got {self.n_units}")
        if not 0 < self.reflect_amp <= 1:
            raise DomainError(f"reflect_amp must lie in (0, 1], got {self.reflect_amp}")
        if not self.bandwidth_hz > 0:
            raise DomainError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")
        if not self.wavelength_m > 0:
            raise DomainError(f"wavelength_m must be positive, got {self.wavelength_m}")
        for name in ("p_t_dbm", "noise_density_dbm_hz", "rho0_db"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def noise_dbm(self) -> float:
        return self.noise_density_dbm_hz + 10 * math.log10(self.bandwidth_hz)

    @property
    def tx_to_noise(self) -> float:
        """P_t / N_0, linear."""
        return 10 ** ((self.p_t_dbm - self.noise_dbm) / 10)

    @property
    def rho0(self) -> float:
        return 10 ** (self.rho0_db / 10)


@dataclass(frozen=True)
class ChannelSample:
    g_mag: np.ndarray
    z_mag: np.ndarray

    def __post_init__(self):
        if self.g_mag.shape != self.z_mag.shape:
            raise DomainError("g_mag and z_mag must have equal length")


@dataclass
class CapacityReport:
    upper_bound_bpshz: float
    expected_snr_db: float
    trials: int
    mc_mean_bpshz: float | None = None
    mc_stderr_bpshz: float | None = None
    rho_cc: float = field(default=0.0, repr=False)

    def to_dict(self) -> dict:
        out = {
            "upper_bound_bpshz": self.upper_bound_bpshz,
            "expected_snr_db": self.expected_snr_db,
            "ccg_db": db(self.rho_cc),
            "trials": self.trials,
        }
        if self.mc_mean_bpshz is not None:
            out["mc_mean_bpshz"] = self.mc_mean_bpshz
            out["mc_stderr_bpshz"] = self.mc_stderr_bpshz
        return out


def _rician_weights(k: float) -> tuple[float, float]:
    if is_los(k):
        return 1.0, 0.0
    return math.sqrt(k / (1 + k)), math.sqrt(1 / (1 + k))


def _draw_magnitudes(rng, shape, rho, k, phase):
    """|sqrt(rho) (a e^{j phase} + b CN(0,1))| over ``shape``.

    Always consumes two normal arrays from ``rng`` so the stream layout
    does not depend on the Rician factor.
    """
    a, b = _rician_weights(k)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    if b == 0.0:
        return np.full(shape, math.sqrt(rho))
    s = math.sqrt(0.5) * b
    return math.sqrt(rho) * np.hypot(a * math.cos(phase) + s * re, a * math.sin(phase) + s * im)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_cascade(
    rho_tc: float,
    rho_cr: float,
    spec: RicianSpec,
    n: int,
    seed: int,
    los_phase: tuple[float, float] = (0.0, 0.0),
) -> ChannelSample:
    """One far-field realization of the N per-unit channel magnitudes."""
    if rho_tc < 0 or rho_cr < 0:
        raise DomainError("path gains must be >= 0")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = _block_rng(seed, 0)
    g = _draw_magnitudes(rng, (n,), rho_tc, spec.K1, los_phase[0])
    z = _draw_magnitudes(rng, (n,), rho_cr, spec.K2, los_phase[1])
    return ChannelSample(g_mag=g, z_mag=z)


def instantaneous_snr(sample: ChannelSample, budget: LinkBudget) -> float:
    coherent = float(np.dot(sample.g_mag, sample.z_mag))
    return budget.reflect_amp**2 * budget.tx_to_noise * coherent**2


def snr_per_ccg(spec: RicianSpec, budget: LinkBudget) -> float:
    """E{SNR} / rho_cc, i.e. (P_t/N_0) T^2 N [1 + (N-1) gamma]."""
    n = budget.n_units
    return budget.tx_to_noise * budget.reflect_amp**2 * n * (1 + (n - 1) * gamma_factor(spec))


def expected_snr(rho_cc: float, spec: RicianSpec, budget: LinkBudget) -> float:
    """Mean SNR under optimal phase alignment, far-field."""
    if rho_cc < 0:
        raise DomainError("rho_cc must be >= 0")
    return rho_cc * snr_per_ccg(spec, budget)


def capacity_upper_bound(rho_cc: float, spec: RicianSpec, budget: LinkBudget) -> float:
    """Jensen bound log2(1 + E{SNR}) on the ergodic capacity, bit/s/Hz."""
    return math.log2(1 + expected_snr(rho_cc, spec, budget))


def _block_capacity(seed, block, trials, n, rho_tc, rho_cr, spec, phases, scale):
    rng = _block_rng(seed, block)
    g = _draw_magnitudes(rng, (trials, n), rho_tc, spec.K1, phases[0])
    z = _draw_magnitudes(rng, (trials, n), rho_cr, spec.K2, phases[1])
    coherent = np.einsum("ij,ij->i", g, z)
    return np.log2(1 + scale * coherent**2)


def mc_ergodic_capacity(
    scene: SceneGeometry,
    pattern: PatternConfig,
    spec: RicianSpec,
    budget: LinkBudget,
    trials: int = 100_000,
    seed: int = 0,
    directivity_mode: str = "db",
    workers: int = 1,
) -> CapacityReport:
    """Monte Carlo ergodic capacity next to its closed-form upper bound.

    With ``trials == 0`` only the analytic fields are filled.
    """
    if trials < 0:
        raise DomainError(f"trials must be >= 0, got {trials}")
    gain = composite_gain(scene, pattern, budget.rho0, directivity_mode)
    snr = expected_snr(gain.rho_cc, spec, budget)
    report = CapacityReport(
        upper_bound_bpshz=math.log2(1 + snr),
        expected_snr_db=db(snr),
        trials=trials,
        rho_cc=gain.rho_cc,
    )
    if trials == 0:
        return report

    n = budget.n_units
    scale = budget.reflect_amp**2 * budget.tx_to_noise
    if is_los(spec.K1) and is_los(spec.K2):
        coherent = n * math.sqrt(gain.rho_tc * gain.rho_cr)
        report.mc_mean_bpshz = math.log2(1 + scale * coherent**2)
        report.mc_stderr_bpshz = 0.0
        return report

    d_tc, d_cr = link_distances(scene)
    phases = (-2 * math.pi * d_tc / budget.wavelength_m, -2 * math.pi * d_cr / budget.wavelength_m)
    sizes = [min(BLOCK_TRIALS, trials - start) for start in range(0, trials, BLOCK_TRIALS)]

    def run(block):
        return _block_capacity(seed, block, sizes[block], n, gain.rho_tc, gain.rho_cr, spec, phases, scale)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    caps = np.concatenate(parts)
    report.mc_mean_bpshz = float(caps.mean())
    report.mc_stderr_bpshz = float(caps.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return report


def moment_abs(a_los_weight: float, b_nlos_weight: float, lambda_nc: float | None = None):
    """Mean and mean square of X = |a u + b v|, v ~ CN(0, 1), |u| = 1.

    ``lambda_nc`` defaults to a**2 / b**2.
    """
    b = b_nlos_weight
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    lam = a_los_weight**2 / b**2 if lambda_nc is None else lambda_nc
    if lam < 0:
        raise DomainError(f"noncentrality must be >= 0, got {lam}")
    mean = math.exp(math.log(b * math.sqrt(math.pi) / 2) - lam + log_kummer_3half_1(lam))
    return mean, b**2 * (lam + 1)


_log_i0 = np.vectorize(log_bessel_i0, otypes=[float])


def pdf_abs(x, b: float, lambda_nc: float):
    """Density of X = |a u + b v| (a Rician amplitude) at ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be >= 0")
    with np.errstate(divide="ignore"):
        log_f = (
            np.log(2 * x / b**2)
            - x**2 / b**2
            - lambda_nc
            + _log_i0(2 * math.sqrt(lambda_nc) * x / b)
        )
    out = np.exp(log_f)
    return out if out.ndim else float(out)
