"""Physical constants and unit conversions (SI internally, everywhere)."""

from __future__ import annotations

from dataclasses import dataclass

HBAR = 1.054571817e-34  # J s
C_LIGHT = 2.99792458e8  # m / s
EV = 1.602176634e-19  # J

# Engine validity window for the gap between plane mirrors.
SEPARATION_MIN = 1e-9  # m
SEPARATION_MAX = 100e-6  # m


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable constant set threaded through the force formulas."""

    hbar: float = HBAR
    c: float = C_LIGHT


CONSTANTS = PhysicalConstants()


def ev_to_rad_per_s(energy_ev: float) -> float:
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    return energy_ev * EV / HBAR


def rad_per_s_to_ev(omega: float) -> float:
    return omega * HBAR / EV


def wavelength_to_rad_per_s(lambda_m: float) -> float:
    """Angular frequency of light with vacuum wavelength ``lambda_m``."""
    import math

    return 2.0 * math.pi * C_LIGHT / lambda_m
