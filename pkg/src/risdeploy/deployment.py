"""RIS rotation and placement optimization.

The placement search works on the ground-terminal, ``l = 0`` gain surface
with the RIS at its optimal rotation everywhere.  For a fixed altitude
that surface is symmetric about ``r = R/2`` and, when ``R > 2h``, falls
monotonically on ``[r1, R/2]`` with ``r1 = (R - sqrt(R^2 - 4h^2)) / 2``.
Both searches exploit this: the optimum scan stops at ``r1`` and the
effective-region search bisects for the threshold crossing past ``r1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .fading import LinkBudget, db, expected_snr, snr_per_ccg
from .geometry import AngleSet, DomainError
from .radiometrics import DEFAULT_RHO0, PatternConfig, directivity_factor
from .specfun import RicianSpec

__all__ = [
    "DeploymentResult",
    "RegionMap",
    "BISECTION_TOL",
    "optimal_ris_rotation",
    "optimal_ris_rotation_at",
    "ccg_location_exact",
    "ccg_location_approx",
    "mu_nu",
    "mu_nu_h_derivatives",
    "mu_nu_r_derivatives",
    "scan_grid",
    "optimize_location",
    "effective_region",
    "ccg_threshold",
]

BISECTION_TOL = 0.01  # meters


def optimal_ris_rotation(angles: AngleSet) -> float:
    """Best RIS rotation (alpha - beta) / 2; always inside the feasible window."""
    return (angles.alpha - angles.beta) / 2


def optimal_ris_rotation_at(r, h, R):
    """Optimal RIS rotation at horizontal offset ``r`` and altitude ``h`` (ground terminals)."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise DomainError("h must be positive")
    a = np.arccos(np.minimum(1.0, h / np.hypot(r, h)))
    b = np.arccos(np.minimum(1.0, h / np.hypot(np.subtract(R, r), h)))
    out = (a - b) / 2
    return out if out.ndim else float(out)


def _prefactor(q_t, q_r, q_u, rho0, mode):
    return rho0**2 * directivity_factor(q_t, q_r, q_u, mode) / 2.0**q_u


def ccg_location_exact(
    l, r, h, R,
    q_t: float, q_r: float, q_u: float,
    h_t: float = 0.0, h_r: float = 0.0,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
):
    """CCG at RIS location (l, r, h) with every element optimally rotated."""
    ht = np.subtract(h, h_t)
    hr = np.subtract(h, h_r)
    a = np.square(r) + np.square(l) + np.square(ht)
    b = np.square(np.subtract(R, r)) + np.square(l) + np.square(hr)
    horiz = np.sqrt((np.square(r) + np.square(l)) * (np.square(np.subtract(R, r)) + np.square(l)))
    bracket = 1 + (ht * hr - horiz) / np.sqrt(a * b)
    out = _prefactor(q_t, q_r, q_u, rho0, directivity_mode) / (a * b) * bracket**q_u
    return out if np.ndim(out) else float(out)


def mu_nu(r, h, R, q_u):
    """Angular factor mu and distance factor nu of the approximate CCG surface.

    ``ccg_location_approx == prefactor * mu * nu / 2**q_u``.
    """
    a = np.square(r) + np.square(h)
    b = np.square(np.subtract(R, r)) + np.square(h)
    bracket = 1 + (np.square(r) - np.multiply(R, r) + np.square(h)) / np.sqrt(a * b)
    return bracket**q_u, 1 / (a * b)


def mu_nu_h_derivatives(r, h, R, q_u):
    """Closed-form d(mu)/dh and d(nu)/dh."""
    a = np.square(r) + np.square(h)
    b = np.square(np.subtract(R, r)) + np.square(h)
    bracket = 1 + (np.square(r) - np.multiply(R, r) + np.square(h)) / np.sqrt(a * b)
    dmu = (
        q_u * R**2 * h * (np.square(h) + np.multiply(R, r) - np.square(r))
        / (a * b) ** 1.5 * bracket ** (q_u - 1)
    )
    dnu = -2 * h * (2 * np.square(h) + np.square(r) + np.square(np.subtract(R, r))) / (a * b) ** 2
    return dmu, dnu


def mu_nu_r_derivatives(r, h, R, q_u):
    """Closed-form d(mu)/dr and d(nu)/dr."""
    a = np.square(r) + np.square(h)
    b = np.square(np.subtract(R, r)) + np.square(h)
    c = np.square(r) - np.multiply(R, r) + np.square(h)
    bracket = 1 + c / np.sqrt(a * b)
    dmu = q_u * np.square(h) * R**2 * (2 * np.asarray(r) - R) / (a * b) ** 1.5 * bracket ** (q_u - 1)
    dnu = 2 * (R - 2 * np.asarray(r)) * c / (a * b) ** 2
    return dmu, dnu


def ccg_location_approx(
    r, h, R,
    q_t: float, q_r: float, q_u: float,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
):
    """Optimally rotated CCG for ground terminals and a RIS above the Tx-Rx line."""
    mu, nu = mu_nu(r, h, R, q_u)
    out = _prefactor(q_t, q_r, q_u, rho0, directivity_mode) * mu * nu
    return out if np.ndim(out) else float(out)


def scan_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """``lo, lo+step, ...`` up to ``hi``, with ``hi`` itself always included."""
    if not step > 0:
        raise DomainError(f"grid step must be positive, got {step}")
    if hi < lo:
        raise DomainError(f"empty grid: [{lo}, {hi}]")
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = lo + step * np.arange(n + 1)
    if hi - pts[-1] > 1e-9 * max(1.0, abs(hi)):
        pts = np.append(pts, hi)
    return pts


def _r1(R, h):
    disc = R**2 - 4 * h**2
    return (R - math.sqrt(disc)) / 2 if disc > 0 else None


@dataclass
class DeploymentResult:
    r_opt: float
    h_opt: float
    mirror_r_opt: float
    theta0_opt_deg: float
    ccg_opt: float
    capacity_opt_bpshz: float
    evaluated: int = field(default=0, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ccg_opt_db"] = db(self.ccg_opt)
        return d


def optimize_location(
    R: float,
    h_min: float,
    h_max: float,
    grid: tuple[float, float] = (1.0, 1.0),
    budget: LinkBudget | None = None,
    spec: RicianSpec | None = None,
    pattern: PatternConfig | None = None,
    directivity_mode: str = "db",
    narrowed: bool = True,
) -> DeploymentResult:
    """Exhaustive altitude scan with the horizontal scan cut at ``r1``.

    Ties go to the smallest ``r`` and then the smallest ``h``.  With
    ``narrowed=False`` every altitude is scanned over the full ``[0, R/2]``.
    """
    budget = budget or LinkBudget()
    spec = spec or RicianSpec()
    pattern = pattern or PatternConfig()
    dr, dh = grid
    if not (dr > 0 and dh > 0):
        raise DomainError("grid steps must be positive")
    if not 0 < h_min <= h_max:
        raise DomainError(f"need 0 < h_min <= h_max, got h_min={h_min}, h_max={h_max}")

    best = (-math.inf, math.inf, math.inf)  # (gain, r, h)
    evaluated = 0
    for h in scan_grid(h_min, h_max, dh):
        r1 = _r1(R, h) if narrowed else None
        rs = scan_grid(0.0, R / 2 if r1 is None else r1, dr)
        gains = ccg_location_approx(rs, h, R, pattern.q_t, pattern.q_r, pattern.q_u,
                                    budget.rho0, directivity_mode)
        evaluated += rs.size
        i = int(np.argmax(gains))  # first occurrence gives the smallest r
        g, r = float(gains[i]), float(rs[i])
        if g > best[0] or (g == best[0] and r < best[1]):
            best = (g, r, float(h))

    gain, r_opt, h_opt = best
    return DeploymentResult(
        r_opt=r_opt,
        h_opt=h_opt,
        mirror_r_opt=R - r_opt,
        theta0_opt_deg=math.degrees(optimal_ris_rotation_at(r_opt, h_opt, R)),
        ccg_opt=gain,
        capacity_opt_bpshz=math.log2(1 + expected_snr(gain, spec, budget)),
        evaluated=evaluated,
    )


def ccg_threshold(gamma_th_db: float, spec: RicianSpec, budget: LinkBudget) -> float:
    """Smallest CCG whose expected SNR reaches ``gamma_th_db``."""
    if math.isnan(gamma_th_db) or gamma_th_db == math.inf:
        raise DomainError(f"invalid SNR threshold {gamma_th_db}")
    if gamma_th_db == -math.inf:
        return 0.0
    return 10 ** (gamma_th_db / 10) / snr_per_ccg(spec, budget)


@dataclass
class RegionMap:
    """Effective-region map on an (h, r) lattice; 2-D arrays are indexed [h, r]."""

    r: np.ndarray
    h: np.ndarray
    effective: np.ndarray
    ccg: np.ndarray
    expected_snr_db: np.ndarray
    capacity: np.ndarray
    theta0_opt_deg: np.ndarray
    gamma_th_db: float
    ccg_threshold: float
    # per altitude: largest r in [0, R/2] found effective by bisection, or nan
    boundary_r: np.ndarray = field(repr=False, default=None)

    def rows(self):
        for i, h in enumerate(self.h):
            for j, r in enumerate(self.r):
                yield (
                    float(r), float(h), float(self.theta0_opt_deg[i, j]), db(self.ccg[i, j]),
                    float(self.expected_snr_db[i, j]), float(self.capacity[i, j]),
                    int(self.effective[i, j]),
                )


def _row_effective(rs, h, R, thr, gain):
    """Effective flags for ``rs`` in ``[0, R/2]`` at altitude ``h``.

    Returns the flags and the bisection boundary (nan when not used).
    """
    r1 = _r1(R, h)
    direct = gain(rs) >= thr
    if r1 is None:
        return direct, math.nan
    flags = np.where(rs <= r1, direct, False)
    if gain(r1) < thr:
        return flags, math.nan
    lo, hi = r1, R / 2
    if gain(hi) >= thr:
        lo = hi
    else:
        while hi - lo > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            if gain(mid) >= thr:
                lo = mid
            else:
                hi = mid
    tail = rs > r1
    flags = np.where(tail & (rs <= lo), True, flags)
    # inside the final bracket the crossing is unresolved; check directly
    flags = np.where(tail & (rs > lo) & (rs <= hi), direct, flags)
    return flags, lo


def effective_region(
    R: float,
    h_min: float,
    h_max: float,
    grid: tuple[float, float] = (1.0, 1.0),
    gamma_th_db: float = 45.0,
    budget: LinkBudget | None = None,
    spec: RicianSpec | None = None,
    pattern: PatternConfig | None = None,
    directivity_mode: str = "db",
) -> RegionMap:
    """Locations whose expected SNR reaches ``gamma_th_db`` (optimal rotations)."""
    budget = budget or LinkBudget()
    spec = spec or RicianSpec()
    pattern = pattern or PatternConfig()
    dr, dh = grid
    if not 0 < h_min <= h_max:
        raise DomainError(f"need 0 < h_min <= h_max, got h_min={h_min}, h_max={h_max}")
    thr = ccg_threshold(gamma_th_db, spec, budget)
    rs = scan_grid(0.0, R, dr)
    hs = scan_grid(h_min, h_max, dh)
    half = np.minimum(rs, R - rs)  # mirror about R/2

    eff = np.zeros((hs.size, rs.size), dtype=bool)
    boundary = np.full(hs.size, math.nan)
    for i, h in enumerate(hs):
        def gain(x, h=h):
            return ccg_location_approx(x, h, R, pattern.q_t, pattern.q_r, pattern.q_u,
                                       budget.rho0, directivity_mode)
        eff[i], boundary[i] = _row_effective(half, h, R, thr, gain)

    hh, rr = np.meshgrid(hs, rs, indexing="ij")
    ccg = ccg_location_approx(rr, hh, R, pattern.q_t, pattern.q_r, pattern.q_u,
                              budget.rho0, directivity_mode)
    snr = ccg * snr_per_ccg(spec, budget)
    with np.errstate(divide="ignore"):
        snr_db = 10 * np.log10(snr)
    return RegionMap(
        r=rs, h=hs, effective=eff, ccg=ccg, expected_snr_db=snr_db,
        capacity=np.log2(1 + snr), theta0_opt_deg=np.degrees(optimal_ris_rotation_at(rr, hh, R)),
        gamma_th_db=gamma_th_db, ccg_threshold=thr, boundary_r=boundary,
    )
