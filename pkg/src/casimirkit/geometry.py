"""Proximity mapping of plane-plane energy onto curved-probe geometries.

F_sphere(d) = 2*pi*R * E_area(d); crossed cylinders use the effective radius
sqrt(R_a*R_b).  The mapping assumes gentle curvature, so a guard enforces a
minimum radius-to-gap ratio: below 10 it is an error, below 100 a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import C_LIGHT, HBAR
from .errors import InvalidInputError, PFAValidityError
from .lifshitz import GapConfig, casimir_energy_area

__all__ = [
    "SphericalProbe",
    "CrossedCylinders",
    "RoughnessProfile",
    "PFAValidityWarning",
    "sphere_plate_force",
    "crossed_cylinder_force",
    "roughness_average",
    "ideal_sphere_plate_force",
    "load_roughness_profile",
]

PFA_ERROR_RATIO = 10.0
PFA_WARN_RATIO = 100.0


class PFAValidityWarning(UserWarning):
    """Radius-to-gap ratio below the comfortable proximity regime."""


@dataclass(frozen=True)
class SphericalProbe:
    radius: float  # m

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidInputError("probe radius must be positive")


@dataclass(frozen=True)
class CrossedCylinders:
    radius_a: float
    radius_b: float

    def __post_init__(self):
        if not (self.radius_a > 0 and self.radius_b > 0):
            raise InvalidInputError("cylinder radii must be positive")

    @property
    def effective_radius(self) -> float:
        return math.sqrt(self.radius_a * self.radius_b)


@dataclass(frozen=True)
class RoughnessProfile:
    """Discrete surface-height distribution: (height, weight) pairs.

    Weights must be positive and sum to one; heights offset the nominal gap.
    """

    offsets: tuple

    def __post_init__(self):
        offsets = tuple((float(h), float(w)) for h, w in self.offsets)
        object.__setattr__(self, "offsets", offsets)
        if not offsets:
            raise InvalidInputError("roughness profile needs at least one offset")
        if any(w <= 0 for _, w in offsets):
            raise InvalidInputError("roughness weights must be positive")
        total = math.fsum(w for _, w in offsets)
        if abs(total - 1.0) > 1e-12:
            raise InvalidInputError(f"roughness weights must sum to 1, got {total!r}")


def _guard_ratio(radius: float, separation: float) -> None:
    ratio = radius / separation
    if ratio < PFA_ERROR_RATIO:
        raise PFAValidityError(
            f"radius/gap ratio {ratio:.3g} below {PFA_ERROR_RATIO}; "
            "proximity mapping invalid"
        )
    if ratio < PFA_WARN_RATIO:
        warnings.warn(
            f"radius/gap ratio {ratio:.3g} below {PFA_WARN_RATIO}; "
            "proximity mapping is approximate here",
            PFAValidityWarning,
            stacklevel=3,
        )


def sphere_plate_force(probe: SphericalProbe, gap: GapConfig, rtol: float = 1e-6) -> float:
    """Signed sphere-plate force in newtons (negative = attractive)."""
    _guard_ratio(probe.radius, gap.separation)
    return 2.0 * math.pi * probe.radius * casimir_energy_area(gap, rtol)


def crossed_cylinder_force(cyl: CrossedCylinders, gap: GapConfig, rtol: float = 1e-6) -> float:
    """Signed force between crossed cylinders (negative = attractive)."""
    _guard_ratio(cyl.effective_radius, gap.separation)
    return 2.0 * math.pi * cyl.effective_radius * casimir_energy_area(gap, rtol)


def ideal_sphere_plate_force(radius: float, d: float) -> float:
    """Closed form for perfect mirrors: -pi**3*hbar*c*R/(360*d**3)."""
    return -math.pi**3 * HBAR * C_LIGHT * radius / (360.0 * d**3)


def roughness_average(force_of_distance, profile: RoughnessProfile, d: float) -> float:
    """Weighted average of the force over the surface-height distribution."""
    for h, _ in profile.offsets:
        if d + h <= 0:
            raise InvalidInputError(f"gap {d} + offset {h} is not positive")
    return math.fsum(w * force_of_distance(d + h) for h, w in profile.offsets)


def load_roughness_profile(path) -> RoughnessProfile:
    """Read ``height_m,weight`` rows (``#`` comments allowed)."""
    offsets = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise InvalidInputError(f"{path}:{lineno}: expected 'height_m,weight'")
            try:
                offsets.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: non-numeric field")
    return RoughnessProfile(offsets=tuple(offsets))
