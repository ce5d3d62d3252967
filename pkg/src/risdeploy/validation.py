"""Monte Carlo cross-checks of the closed forms.

Two suites back the ``validate-mc`` command: per-hop amplitude moments
against their closed forms, and the ergodic capacity bound against Monte
Carlo on the reference antenna-misalignment scenarios.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy.integrate import quad

from .fading import LinkBudget, mc_ergodic_capacity, moment_abs, pdf_abs, sample_cascade
from .geometry import SceneGeometry
from .radiometrics import PatternConfig
from .specfun import RicianSpec


__all__ = [
    "MomentCheck",
    "TightnessCheck",
    "moment_checks",
    "tightness_checks",
    "summarize",
    "quadrature_norm",
]

MOMENT_K = (0.0, 1.0, 5.0, 20.0)
TIGHTNESS_LOCATIONS = ((0.0, 200.0, 100.0), (100.0, 200.0, 100.0), (0.0, 500.0, 100.0), (100.0, 500.0, 100.0))
TIGHTNESS_ROTATIONS_DEG = (50.0, 60.0)
TIGHTNESS_UNITS = (16, 32, 64, 128)
GAP_TOL = 0.02
SIGMAS = 3.0
PDF_NORM_TOL = 1e-6


@dataclass
class MomentCheck:
    k: float
    samples: int
    mean: float
    mean_expected: float
    mean_stderr: float
    mean_square: float
    mean_square_expected: float
    mean_square_stderr: float
    pdf_norm: float

    @property
    def passed(self) -> bool:
        return (
            abs(self.mean - self.mean_expected) <= SIGMAS * self.mean_stderr
            and abs(self.mean_square - self.mean_square_expected) <= SIGMAS * self.mean_square_stderr
            and abs(self.pdf_norm - 1) <= PDF_NORM_TOL
        )

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


@dataclass
class TightnessCheck:
    l: float
    r: float
    h: float
    rotation_deg: float
    n_units: int
    upper_bound: float
    mc_mean: float
    mc_stderr: float

    @property
    def gap(self) -> float:
        return (self.upper_bound - self.mc_mean) / self.upper_bound if self.upper_bound > 0 else 0.0

    @property
    def below_bound(self) -> bool:
        return self.mc_mean - SIGMAS * self.mc_stderr <= self.upper_bound

    @property
    def passed(self) -> bool:
        return self.below_bound and (self.n_units != 64 or self.gap < GAP_TOL)

    def to_dict(self) -> dict:
        return {**asdict(self), "gap": self.gap, "below_bound": self.below_bound, "passed": self.passed}


def moment_checks(samples: int = 1_000_000, seed: int = 0, rho: float = 1.0, ks=MOMENT_K) -> list[MomentCheck]:
    out = []
    for i, k in enumerate(ks):
        draw = sample_cascade(rho, rho, RicianSpec(K1=k, K2=k), samples, seed + i)
        x = draw.g_mag
        b = math.sqrt(rho / (1 + k))
        a = math.sqrt(rho * k / (1 + k))
        mean, mean_sq = moment_abs(a, b, k)
        x2 = x * x
        out.append(MomentCheck(
            k=k, samples=samples,
            mean=float(x.mean()), mean_expected=mean,
            mean_stderr=float(x.std(ddof=1) / math.sqrt(samples)),
            mean_square=float(x2.mean()), mean_square_expected=mean_sq,
            mean_square_stderr=float(x2.std(ddof=1) / math.sqrt(samples)),
            pdf_norm=quadrature_norm(b, k),
        ))
    return out


def tightness_checks(
    trials: int = 100_000,
    seed: int = 0,
    budget: LinkBudget | None = None,
    spec: RicianSpec | None = None,
    units=TIGHTNESS_UNITS,
    workers: int = 1,
    R: float = 1000.0,
) -> list[TightnessCheck]:
    """Bound vs Monte Carlo with both antennas tilted towards the RIS by a fixed angle.

    The Tx-Ant tilts clockwise and the Rx-Ant counterclockwise, each by
    ``rotation_deg``; the RIS stays flat.
    """
    budget = budget or LinkBudget()
    spec = spec or RicianSpec()
    out = []
    for l, r, h in TIGHTNESS_LOCATIONS:
        scene = SceneGeometry(R=R, l=l, r=r, h=h)
        for rot in TIGHTNESS_ROTATIONS_DEG:
            pattern = PatternConfig(theta_t0=math.radians(rot), theta_r0=-math.radians(rot))
            for n in units:
                b = LinkBudget(**{**asdict(budget), "n_units": n})
                rep = mc_ergodic_capacity(scene, pattern, spec, b, trials=trials, seed=seed, workers=workers)
                out.append(TightnessCheck(
                    l=l, r=r, h=h, rotation_deg=rot, n_units=n,
                    upper_bound=rep.upper_bound_bpshz, mc_mean=rep.mc_mean_bpshz,
                    mc_stderr=rep.mc_stderr_bpshz,
                ))
    return out


def summarize(moments, tightness) -> dict:
    return {
        "moments": [m.to_dict() for m in moments],
        "tightness": [t.to_dict() for t in tightness],
        "max_gap_n64": max((t.gap for t in tightness if t.n_units == 64), default=float("nan")),
        "passed": bool(all(m.passed for m in moments) and all(t.passed for t in tightness)),
    }


def quadrature_norm(b: float, lambda_nc: float) -> float:
    """Numerical integral of the amplitude density over [0, inf)."""
    # the density is negligible past mean + 40 b
    upper = b * (math.sqrt(lambda_nc) + 40.0)
    val, _ = quad(lambda x: pdf_abs(x, b, lambda_nc), 0.0, upper, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val

