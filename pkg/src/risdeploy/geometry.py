"""Scene geometry for a single Tx-Ant / RIS / Rx-Ant link.

The Tx-Ant sits at the origin, the Rx-Ant on the Y axis at horizontal
distance ``R``.  The RIS center is at ``(l, r, h)``: ``l`` is its offset
from the YOZ plane, ``r`` its offset from the XOZ plane and ``h`` its
altitude.  Everything here is radians and meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "SceneGeometry",
    "AngleSet",
    "link_distances",
    "elevation_angles",
    "rotation_feasible",
    "feasible_interval",
]


class DomainError(ValueError):
    """Raised when inputs fall outside the domain of a formula."""


@dataclass(frozen=True)
class SceneGeometry:
    R: float
    l: float
    r: float
    h: float
    h_t: float = 0.0
    h_r: float = 0.0
    h_min: float | None = None
    h_max: float | None = None

    def __post_init__(self):
        for name in ("R", "l", "r", "h", "h_t", "h_r"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.R <= 0:
            raise DomainError(f"R must be positive, got {self.R}")
        if self.l < 0:
            raise DomainError(f"l must be >= 0, got {self.l}")
        if not 0 <= self.r <= self.R:
            raise DomainError(f"r must lie in [0, R], got r={self.r}, R={self.R}")
        if self.h <= max(self.h_t, self.h_r):
            raise DomainError(
                f"RIS altitude h={self.h} must exceed both terminal heights "
                f"(h_t={self.h_t}, h_r={self.h_r})"
            )
        lo = self.h_min if self.h_min is not None else -math.inf
        hi = self.h_max if self.h_max is not None else math.inf
        if lo > hi:
            raise DomainError(f"h_min={self.h_min} exceeds h_max={self.h_max}")
        if not lo <= self.h <= hi:
            raise DomainError(f"h={self.h} outside [h_min, h_max]=[{lo}, {hi}]")

    def mirrored(self) -> "SceneGeometry":
        """Swap the roles of the two terminals (r -> R - r, h_t <-> h_r)."""
        return SceneGeometry(
            R=self.R, l=self.l, r=self.R - self.r, h=self.h,
            h_t=self.h_r, h_r=self.h_t, h_min=self.h_min, h_max=self.h_max,
        )


@dataclass(frozen=True)
class AngleSet:
    """Elevation angles at the RIS center.

    ``alpha`` is the arrival angle from the Tx-Ant and ``beta`` the
    departure angle towards the Rx-Ant, both measured from the RIS
    normal.  ``theta_t_aod`` / ``theta_r_aoa`` are the signed elevations of
    the RIS center as seen from each antenna (clockwise about X positive).
    The azimuths are diagnostics only; the cos^q patterns ignore them.
    """

    alpha: float
    beta: float
    theta_t_aod: float
    theta_r_aoa: float
    phi_t_aod: float = 0.0
    phi_r_aoa: float = 0.0


def link_distances(scene: SceneGeometry) -> tuple[float, float]:
    """Return ``(d_tc, d_cr)``, Tx-to-RIS-center and RIS-center-to-Rx."""
    d_tc = math.sqrt(scene.r**2 + scene.l**2 + (scene.h - scene.h_t) ** 2)
    d_cr = math.sqrt((scene.R - scene.r) ** 2 + scene.l**2 + (scene.h - scene.h_r) ** 2)
    if d_tc == 0 or d_cr == 0:
        raise DomainError("degenerate scene: RIS coincides with a terminal")
    return d_tc, d_cr


def elevation_angles(scene: SceneGeometry) -> AngleSet:
    d_tc, d_cr = link_distances(scene)
    # clip guards against |cos| creeping past 1 by an ulp
    alpha = math.acos(min(1.0, (scene.h - scene.h_t) / d_tc))
    beta = math.acos(min(1.0, (scene.h - scene.h_r) / d_cr))
    return AngleSet(
        alpha=alpha,
        beta=beta,
        theta_t_aod=alpha,
        theta_r_aoa=-beta,
        phi_t_aod=math.atan2(scene.r, scene.l),
        phi_r_aoa=math.atan2(scene.r - scene.R, scene.l),
    )


def feasible_interval(angles: AngleSet) -> tuple[float, float]:
    """Open interval of RIS rotations that keep both terminals in front."""
    return angles.alpha - math.pi / 2, math.pi / 2 - angles.beta


def rotation_feasible(theta_0: float, angles: AngleSet) -> bool:
    lo, hi = feasible_interval(angles)
    return lo < theta_0 < hi
