"""Directional radiation model and composite channel gains (CCG).

Every antenna and RIS unit uses the cos^q power pattern, rotated about
the X axis.  The CCG is the product of the Tx->RIS and RIS->Rx path gains
with all pattern and directivity factors folded in.

Directivity has two modes.  ``"db"`` treats the per-element
directivity 2(q+1) as a dB figure, giving the linear prefactor
``10**(0.2*(q_t + q_r + 2*q_u + 4))`` that the reference planning numbers
use.  ``"physical"`` uses the linear directivity 2(q+1) per element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    AngleSet,
    DomainError,
    SceneGeometry,
    elevation_angles,
    link_distances,
    rotation_feasible,
)

__all__ = [
    "PatternConfig",
    "CompositeGain",
    "DIRECTIVITY_MODES",
    "power_pattern",
    "directivity_factor",
    "link_directivity",
    "ccg_antenna_rotations",
    "ccg_optimal_antennas",
    "ccg_ris_rotation",
    "ccg_no_rotation_location",
    "composite_gain",
    "optimal_pattern",
]

DIRECTIVITY_MODES = ("db", "physical")
DEFAULT_RHO0 = 1e-4  # -40 dB reference path gain at 1 m


@dataclass(frozen=True)
class PatternConfig:
    q_t: float = 20.0
    q_r: float = 20.0
    q_u: float = 4.0
    theta_t0: float = 0.0
    theta_r0: float = 0.0
    theta_0: float = 0.0

    def __post_init__(self):
        for name in ("q_t", "q_r", "q_u"):
            q = getattr(self, name)
            if not (math.isfinite(q) and q >= 0):
                raise DomainError(f"{name} must be a finite exponent >= 0, got {q}")
        for name in ("theta_t0", "theta_r0", "theta_0"):
            t = getattr(self, name)
            if not (math.isfinite(t) and abs(t) <= math.pi / 2 + 1e-12):
                raise DomainError(f"{name} must lie in [-pi/2, pi/2], got {t}")


@dataclass(frozen=True)
class CompositeGain:
    rho_cc: float
    rho_tc: float
    rho_cr: float

    @property
    def db(self) -> float:
        return 10 * math.log10(self.rho_cc) if self.rho_cc > 0 else -math.inf


def _cos_pow(x, q):
    """cos(x)**q on the support |x| <= pi/2, zero elsewhere.

    Evaluated as exp(q log cos) so large q underflows cleanly to 0.
    """
    x = np.asarray(x, dtype=float)
    c = np.cos(x)
    inside = (np.abs(x) <= math.pi / 2) & (c > 0)
    if q == 0:
        out = np.where(np.abs(x) <= math.pi / 2, 1.0, 0.0)
    else:
        with np.errstate(divide="ignore"):
            out = np.where(inside, np.exp(q * np.log(np.where(inside, c, 1.0))), 0.0)
    return out if out.ndim else float(out)


def power_pattern(theta, theta_rot, q):
    """Normalized power pattern cos^q(theta - theta_rot), zero off the front half-space."""
    return _cos_pow(np.subtract(theta, theta_rot), q)


def directivity_factor(q_t, q_r, q_u, mode: str = "db"):
    """Product D_t * D_r * D_u**2 of maximum directivities (linear)."""
    if mode == "db":
        return 10.0 ** (0.2 * (q_t + q_r + 2 * q_u + 4))
    if mode == "physical":
        return 2 * (q_t + 1) * 2 * (q_r + 1) * (2 * (q_u + 1)) ** 2
    raise DomainError(f"unknown directivity mode {mode!r}; expected one of {DIRECTIVITY_MODES}")


def link_directivity(q_a, q_u, mode: str = "db"):
    """D_a * D_u for one hop (antenna a, RIS unit u)."""
    if mode == "db":
        return 10.0 ** (0.2 * (q_a + q_u + 2))
    if mode == "physical":
        return 2 * (q_a + 1) * 2 * (q_u + 1)
    raise DomainError(f"unknown directivity mode {mode!r}; expected one of {DIRECTIVITY_MODES}")


def composite_gain(
    scene: SceneGeometry,
    pattern: PatternConfig,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
    angles: AngleSet | None = None,
) -> CompositeGain:
    """Per-hop path gains for arbitrary antenna and RIS rotations.

    A RIS rotation outside the feasibility window blocks the link and
    gives zero gain; a mispointed antenna is attenuated by its pattern.
    """
    d_tc, d_cr = link_distances(scene)
    ang = angles if angles is not None else elevation_angles(scene)
    th0 = pattern.theta_0
    if not rotation_feasible(th0, ang):
        return CompositeGain(0.0, 0.0, 0.0)
    rho_tc = (
        rho0 * link_directivity(pattern.q_t, pattern.q_u, directivity_mode) / d_tc**2
        * _cos_pow(ang.theta_t_aod - pattern.theta_t0, pattern.q_t)
        * _cos_pow(ang.alpha - th0, pattern.q_u)
    )
    rho_cr = (
        rho0 * link_directivity(pattern.q_r, pattern.q_u, directivity_mode) / d_cr**2
        * _cos_pow(ang.theta_r_aoa - pattern.theta_r0, pattern.q_r)
        * _cos_pow(ang.beta + th0, pattern.q_u)
    )
    return CompositeGain(rho_cc=rho_tc * rho_cr, rho_tc=rho_tc, rho_cr=rho_cr)


def optimal_pattern(scene: SceneGeometry, pattern: PatternConfig, theta_0: float | None = None) -> PatternConfig:
    """Copy of ``pattern`` with both antennas pointed at the RIS center."""
    ang = elevation_angles(scene)
    return PatternConfig(
        q_t=pattern.q_t, q_r=pattern.q_r, q_u=pattern.q_u,
        theta_t0=ang.theta_t_aod, theta_r0=ang.theta_r_aoa,
        theta_0=pattern.theta_0 if theta_0 is None else theta_0,
    )


def ccg_antenna_rotations(
    scene: SceneGeometry,
    pattern: PatternConfig,
    angles: AngleSet | None = None,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
) -> CompositeGain:
    """CCG with rotated antennas and an unrotated RIS."""
    if pattern.theta_0 != 0:
        raise DomainError("ccg_antenna_rotations assumes an unrotated RIS (theta_0 = 0)")
    return composite_gain(scene, pattern, rho0, directivity_mode, angles)


def ccg_optimal_antennas(
    scene: SceneGeometry,
    q_t: float,
    q_r: float,
    q_u: float,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
) -> CompositeGain:
    """CCG when both antennas point at the RIS center and the RIS is flat."""
    pattern = optimal_pattern(scene, PatternConfig(q_t=q_t, q_r=q_r, q_u=q_u), theta_0=0.0)
    return composite_gain(scene, pattern, rho0, directivity_mode)


def ccg_ris_rotation(
    scene: SceneGeometry,
    pattern: PatternConfig,
    angles: AngleSet | None = None,
    theta_0: float | None = None,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
) -> CompositeGain:
    """CCG with optimally pointed antennas and the RIS rotated by ``theta_0``.

    ``theta_0`` defaults to ``pattern.theta_0``.  Outside the feasible
    rotation window the gain is 0.
    """
    th0 = pattern.theta_0 if theta_0 is None else theta_0
    ang = angles if angles is not None else elevation_angles(scene)
    if not rotation_feasible(th0, ang):
        return CompositeGain(0.0, 0.0, 0.0)
    pointed = PatternConfig(
        q_t=pattern.q_t, q_r=pattern.q_r, q_u=pattern.q_u,
        theta_t0=ang.theta_t_aod, theta_r0=ang.theta_r_aoa, theta_0=th0,
    )
    return composite_gain(scene, pointed, rho0, directivity_mode, ang)


def ccg_no_rotation_location(
    R, l, r, h,
    q_t: float,
    q_r: float,
    q_u: float,
    rho0: float = DEFAULT_RHO0,
    directivity_mode: str = "db",
):
    """Location-dependent CCG with pointed antennas and a flat RIS.

    Ground-level terminals.  Vectorizes over ``l``, ``r`` and ``h``.
    """
    a = np.add(np.square(r) + np.square(l), np.square(h))
    b = np.add(np.square(np.subtract(R, r)) + np.square(l), np.square(h))
    prod = a * b
    ang = np.square(h) / np.sqrt(prod)
    out = rho0**2 * directivity_factor(q_t, q_r, q_u, directivity_mode) / prod * ang**q_u
    return out if np.ndim(out) else float(out)
