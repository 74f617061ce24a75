"""Dielectric response models evaluated on the imaginary frequency axis.

Every model here answers one question: what is eps(i*xi) for xi >= 0?  On
that axis the permittivity of a passive material is real, >= 1 and monotone
non-increasing, which is what makes the fluctuation integrals well behaved.

The perfect conductor is a separate variant rather than a huge epsilon so the
ideal-metal limit is exact; reflection code maps it to r_TM = +1, r_TE = -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, ev_to_rad_per_s
from .errors import InvalidInputError, UnknownPresetError

__all__ = [
    "PerfectConductor",
    "ConstantEps",
    "Drude",
    "Plasma",
    "LorentzOscillators",
    "DrudeLowTail",
    "PowerHighTail",
    "TabulatedAbsorption",
    "UniaxialModel",
    "epsilon_at_imaginary",
    "kramers_kronig_imag",
    "builtin_presets",
    "get_preset",
    "load_absorption_table",
]

PC_EPS_SENTINEL = -1.0  # marks a perfect conductor in kernel-facing arrays


@dataclass(frozen=True)
class PerfectConductor:
    """Ideal mirror: unit reflectivity for both polarizations."""


@dataclass(frozen=True)
class ConstantEps:
    """Frequency-independent permittivity (eps >= 1)."""

    eps: float

    def __post_init__(self):
        if not (self.eps >= 1.0 and math.isfinite(self.eps)):
            raise InvalidInputError(f"constant permittivity must be >= 1, got {self.eps}")


@dataclass(frozen=True)
class Drude:
    """Free-electron metal: eps(i xi) = 1 + omega_p**2 / (xi*(xi + gamma))."""

    omega_p: float  # rad/s
    gamma: float  # rad/s

    def __post_init__(self):
        if not (self.omega_p > 0 and math.isfinite(self.omega_p)):
            raise InvalidInputError("Drude omega_p must be positive")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise InvalidInputError("Drude gamma must be >= 0")


@dataclass(frozen=True)
class Plasma:
    """Dissipationless metal: eps(i xi) = 1 + omega_p**2 / xi**2."""

    omega_p: float  # rad/s

    def __post_init__(self):
        if not (self.omega_p > 0 and math.isfinite(self.omega_p)):
            raise InvalidInputError("plasma omega_p must be positive")


@dataclass(frozen=True)
class LorentzOscillators:
    """Bound-charge response as a sum of oscillators.

    ``terms`` is a tuple of (omega_j, strength_j, gamma_j); each contributes
    strength_j * omega_j**2 / (omega_j**2 + xi**2 + gamma_j*xi).
    """

    terms: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidInputError("oscillator model needs at least one term")
        for j, (omega, strength, gamma) in enumerate(self.terms):
            if not (omega > 0 and math.isfinite(omega)):
                raise InvalidInputError(f"oscillator {j}: omega must be positive")
            if not (strength > 0 and math.isfinite(strength)):
                raise InvalidInputError(f"oscillator {j}: strength must be positive")
            if not (gamma >= 0 and math.isfinite(gamma)):
                raise InvalidInputError(f"oscillator {j}: gamma must be >= 0")


@dataclass(frozen=True)
class DrudeLowTail:
    """Absorption below the tabulated window, eps2 = wp**2*g/(w*(w**2+g**2))."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if self.omega_p < 0 or (self.omega_p > 0 and self.gamma <= 0):
            raise InvalidInputError("low tail needs omega_p >= 0 and gamma > 0 when active")


@dataclass(frozen=True)
class PowerHighTail:
    """Absorption above the window: eps2 = amplitude * (omega_max/omega)**exponent."""

    amplitude: float
    exponent: float = 3.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise InvalidInputError("high tail amplitude must be >= 0")
        if self.amplitude > 0 and self.exponent <= 1.0:
            raise InvalidInputError("high tail exponent must exceed 1 for a finite transform")


@dataclass(frozen=True, eq=False)
class TabulatedAbsorption:
    """Measured absorption eps2(omega) on a strictly ascending grid.

    The transform to the imaginary axis needs eps2 on (0, inf); inside the
    window the table is interpolated linearly, outside it the explicit tail
    models take over.  Out-of-window behavior is an assumption, not data,
    which is why the tails are separate, overridable objects.
    """

    omega: np.ndarray  # rad/s, strictly ascending
    eps2: np.ndarray  # dimensionless, >= 0
    low_tail: DrudeLowTail = None
    high_tail: PowerHighTail = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        eps2 = np.asarray(self.eps2, dtype=float)
        if omega.ndim != 1 or omega.size < 2:
            raise InvalidInputError("absorption table needs at least 2 samples")
        if eps2.shape != omega.shape:
            raise InvalidInputError("omega and eps2 lengths differ")
        if not np.all(np.diff(omega) > 0):
            raise InvalidInputError("omega samples must be strictly ascending")
        if omega[0] <= 0:
            raise InvalidInputError("omega samples must be positive")
        if np.any(eps2 < 0) or not np.all(np.isfinite(eps2)):
            raise InvalidInputError("eps2 samples must be finite and >= 0")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "eps2", eps2)
        if self.low_tail is None:
            object.__setattr__(self, "low_tail", self._default_low_tail(omega, eps2))
        if self.high_tail is None:
            object.__setattr__(self, "high_tail", PowerHighTail(amplitude=float(eps2[-1])))

    @staticmethod
    def _default_low_tail(omega, eps2):
        # Drude-like continuation matching eps2 at the first sample, with the
        # knee placed at the window edge: wp**2 = eps2[0]*w0*(w0**2+g**2)/g.
        g = float(omega[0])
        wp2 = 2.0 * float(eps2[0]) * g * g
        return DrudeLowTail(omega_p=math.sqrt(max(wp2, 0.0)), gamma=g)


@dataclass(frozen=True)
class UniaxialModel:
    """Uniaxial response: distinct ordinary/extraordinary components.

    The optic axis lies in the plate plane; the isotropic case is simply
    ordinary == extraordinary.
    """

    ordinary: object
    extraordinary: object

    @property
    def isotropic(self) -> bool:
        return self.ordinary == self.extraordinary


DielectricModel = (
    PerfectConductor,
    ConstantEps,
    Drude,
    Plasma,
    LorentzOscillators,
    TabulatedAbsorption,
)


def epsilon_at_imaginary(model, xi: float) -> float:
    """Evaluate eps(i*xi) for any model variant.

    Perfect conductors return ``math.inf`` as the distinguished sentinel.
    Raises ``InvalidInputError`` for negative xi, or xi = 0 where the model
    diverges (Drude).
    """
    if xi < 0 or not math.isfinite(xi):
        raise InvalidInputError(f"imaginary frequency must be finite and >= 0, got {xi}")
    if isinstance(model, PerfectConductor):
        return math.inf
    if isinstance(model, ConstantEps):
        return model.eps
    if isinstance(model, Drude):
        if xi == 0.0:
            raise InvalidInputError("Drude response diverges at xi = 0")
        return 1.0 + model.omega_p**2 / (xi * (xi + model.gamma))
    if isinstance(model, Plasma):
        return math.inf if xi == 0.0 else 1.0 + (model.omega_p / xi) ** 2
    if isinstance(model, LorentzOscillators):
        total = 1.0
        for omega, strength, gamma in model.terms:
            total += strength * omega * omega / (omega * omega + xi * xi + gamma * xi)
        return total
    if isinstance(model, TabulatedAbsorption):
        if xi == 0.0:
            raise InvalidInputError("tabulated transform requires xi > 0")
        return kramers_kronig_imag(model, xi)
    raise InvalidInputError(f"unknown dielectric model {model!r}")


def epsilon_many(model, xi: np.ndarray) -> np.ndarray:
    """Vectorized ``epsilon_at_imaginary`` over an array of xi > 0."""
    xi = np.asarray(xi, dtype=float)
    if isinstance(model, TabulatedAbsorption):
        return _kk_transform(model, xi)
    return np.array([epsilon_at_imaginary(model, v) for v in xi])


# ---------------------------------------------------------------------------
# Kramers-Kronig transform of tabulated absorption data
#
# eps(i xi) = 1 + (2/pi) * Int_0^inf  w * eps2(w) / (w**2 + xi**2) dw
#
# The in-window part integrates the piecewise-linear interpolant exactly:
# on each segment eps2 = a*w + b and
#   Int (a*w + b) * w/(w**2+xi**2) dw
#     = a*[w - xi*atan(w/xi)] + (b/2)*ln(w**2 + xi**2),
# so no quadrature error enters beyond the interpolation itself.  Both tails
# have closed forms (the generic power-law exponent falls back to quadrature).
# ---------------------------------------------------------------------------


def kramers_kronig_imag(model: TabulatedAbsorption, xi: float) -> float:
    """Imaginary-axis permittivity from tabulated absorption data."""
    if xi <= 0 or not math.isfinite(xi):
        raise InvalidInputError("xi must be positive and finite")
    return float(_kk_transform(model, np.array([xi]))[0])


def _kk_transform(model: TabulatedAbsorption, xi: np.ndarray) -> np.ndarray:
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi <= 0):
        raise InvalidInputError("xi must be positive")
    w = model.omega
    e2 = model.eps2
    x2 = xi * xi

    # Piecewise-linear segments, all xi at once: shape (nseg, nxi).
    w1 = w[:-1, None]
    w2 = w[1:, None]
    a = ((e2[1:] - e2[:-1]) / (w[1:] - w[:-1]))[:, None]
    b = e2[:-1][:, None] - a * w1
    u1 = w1 / xi[None, :]
    u2 = w2 / xi[None, :]
    # atan(u2) - atan(u1) without cancellation for u >> 1 or u << 1
    datan = np.arctan((u2 - u1) / (1.0 + u1 * u2))
    term_a = a * ((w2 - w1) - xi[None, :] * datan)
    term_b = 0.5 * b * np.log1p((w2 * w2 - w1 * w1) / (w1 * w1 + x2[None, :]))
    inner = np.sum(term_a + term_b, axis=0)

    low = _low_tail_integral(model.low_tail, float(w[0]), xi)
    high = _high_tail_integral(model.high_tail, float(w[-1]), xi)
    return 1.0 + (2.0 / math.pi) * (low + inner + high)


def _low_tail_integral(tail: DrudeLowTail, w_min: float, xi: np.ndarray) -> np.ndarray:
    if tail is None or tail.omega_p == 0.0:
        return np.zeros_like(xi)
    wp2 = tail.omega_p**2
    g = tail.gamma
    out = np.empty_like(xi)
    for i, x in enumerate(xi):
        if abs(x - g) > 1e-8 * max(x, g):
            out[i] = (
                wp2
                * g
                / (x * x - g * g)
                * (math.atan(w_min / g) / g - math.atan(w_min / x) / x)
            )
        else:
            # xi == gamma limit of the partial-fraction form
            out[i] = wp2 * g * (
                w_min / (2 * g * g * (w_min * w_min + g * g))
                + math.atan(w_min / g) / (2 * g**3)
            )
    return out


def _high_tail_integral(tail: PowerHighTail, w_max: float, xi: np.ndarray) -> np.ndarray:
    if tail is None or tail.amplitude == 0.0:
        return np.zeros_like(xi)
    amp = tail.amplitude
    p = tail.exponent
    if p == 3.0:
        out = np.empty_like(xi)
        for i, x in enumerate(xi):
            u = x / w_max
            if u < 1e-3:
                # series of (1 - atan(u)/u)/u**2, avoids cancellation at xi << w
                out[i] = amp * (1.0 / 3.0 - u * u / 5.0 + u**4 / 7.0)
            else:
                out[i] = amp * (1.0 - math.atan(u) / u) / (u * u)
        return out
    # Generic exponent: map (w_max, inf) -> (0, 1] and integrate numerically.
    from .quadrature import integrate_unit

    out = np.empty_like(xi)
    for i, x in enumerate(xi):

        def f(t):
            wv = w_max / t
            return amp * (w_max / wv) ** p * wv / (wv * wv + x * x) * (w_max / (t * t))

        out[i], _ = integrate_unit(f, rtol=1e-9, n0=32)
    return out


# ---------------------------------------------------------------------------
# Built-in presets.  Parameter values are bundled configuration defaults for
# common mirror materials; they satisfy the model invariants but are not
# certified optical data.
# ---------------------------------------------------------------------------

GOLD_DRUDE = Drude(omega_p=ev_to_rad_per_s(9.0), gamma=ev_to_rad_per_s(0.035))
GOLD_PLASMA = Plasma(omega_p=ev_to_rad_per_s(9.0))
COPPER_DRUDE = Drude(omega_p=ev_to_rad_per_s(7.5), gamma=ev_to_rad_per_s(0.03))
PALLADIUM_DRUDE = Drude(omega_p=ev_to_rad_per_s(5.5), gamma=ev_to_rad_per_s(0.09))
POLYSTYRENE = LorentzOscillators(
    terms=((ev_to_rad_per_s(8.0), 1.50, ev_to_rad_per_s(0.5)),)
)
# Two-oscillator (IR phonon + UV electronic) uniaxial model of a negative
# birefringent crystal; ordinary exceeds extraordinary at all frequencies.
LINBO3 = UniaxialModel(
    ordinary=LorentzOscillators(
        terms=(
            (1.10e14, 38.0, 1.0e12),
            (1.00e16, 3.90, 1.0e14),
        )
    ),
    extraordinary=LorentzOscillators(
        terms=(
            (1.15e14, 23.0, 1.0e12),
            (1.00e16, 3.60, 1.0e14),
        )
    ),
)
# Stand-in switchable-mirror states.  No trustworthy broadband dielectric
# data exists for these films; the pair below only realizes "metallic-like"
# vs "transparent dielectric" responses for model studies.
HSM_REFLECTIVE_STANDIN = Drude(omega_p=ev_to_rad_per_s(6.0), gamma=ev_to_rad_per_s(0.6))
HSM_TRANSPARENT_STANDIN = LorentzOscillators(
    terms=((ev_to_rad_per_s(3.0), 3.0, ev_to_rad_per_s(0.8)),)
)

_PRESETS = {
    "gold-drude": GOLD_DRUDE,
    "gold-plasma": GOLD_PLASMA,
    "copper-drude": COPPER_DRUDE,
    "palladium-drude": PALLADIUM_DRUDE,
    "polystyrene": POLYSTYRENE,
    "vacuum": ConstantEps(1.0),
    "perfect-conductor": PerfectConductor(),
    "linbo3": LINBO3,
    "hsm-reflective-standin": HSM_REFLECTIVE_STANDIN,
    "hsm-transparent-standin": HSM_TRANSPARENT_STANDIN,
}


def builtin_presets() -> dict:
    """Catalog of named material models shipped with the package."""
    return dict(_PRESETS)


def get_preset(name: str):
    try:
        return _PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(_PRESETS))
        raise UnknownPresetError(f"unknown material preset {name!r}; known: {known}") from None


# ---------------------------------------------------------------------------
# Optical data files
# ---------------------------------------------------------------------------


def load_absorption_table(path, low_tail=None, high_tail=None) -> TabulatedAbsorption:
    """Read tabulated absorption data from a text file.

    Two comma-separated layouts are accepted, selected by the header line:

    * ``omega_rad_per_s,eps2`` -- direct samples, strictly ascending omega.
    * ``lambda_um,n,k`` -- converted via eps2 = 2*n*k, omega = 2*pi*c/lambda,
      then sorted ascending in omega.

    Lines starting with ``#`` are ignored.
    """
    rows = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            parts = line.split(",")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: non-numeric field in {line!r}")
    if header is None or not rows:
        raise InvalidInputError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    if header == ["omega_rad_per_s", "eps2"]:
        if data.shape[1] != 2:
            raise InvalidInputError(f"{path}: expected 2 columns for {header}")
        omega, eps2 = data[:, 0], data[:, 1]
    elif header == ["lambda_um", "n", "k"]:
        if data.shape[1] != 3:
            raise InvalidInputError(f"{path}: expected 3 columns for {header}")
        lam = data[:, 0] * 1e-6
        if np.any(lam <= 0):
            raise InvalidInputError(f"{path}: wavelengths must be positive")
        omega = 2.0 * math.pi * C_LIGHT / lam
        eps2 = 2.0 * data[:, 1] * data[:, 2]
        order = np.argsort(omega)
        omega, eps2 = omega[order], eps2[order]
    else:
        raise InvalidInputError(
            f"{path}: unrecognized header {header}; expected "
            "'omega_rad_per_s,eps2' or 'lambda_um,n,k'"
        )
    if not np.all(np.diff(omega) > 0):
        raise InvalidInputError(f"{path}: omega values must be strictly ascending")
    return TabulatedAbsorption(omega=omega, eps2=eps2, low_tail=low_tail, high_tail=high_tail)
