"""Zero-temperature fluctuation energy and pressure between planar mirrors.

The double integral over imaginary frequency xi and transverse wavenumber k
is computed in the dimensionless variables x = 2*d*xi/c (outer) and
y = 2*d*kappa0 (inner, y >= x), in which

    E(d) = hbar*c / (32*pi**2*d**3) * Int dx Int_x^inf dy  y    * sum_p ln(1 - r_a r_b e**-y)
    P(d) = -hbar*c / (32*pi**2*d**4) * Int dx Int_x^inf dy  y**2 * sum_p [r_a r_b e**-y / (1 - r_a r_b e**-y)]

with P = -dE/dd holding identically.  The substitution makes the ideal-metal
integrand separation-independent, so quadrature grids condition uniformly
across the whole validity window.

Integrand batches are evaluated by the selected kernel backend (compiled or
numpy); this module owns the types, the adaptive quadrature driving, and the
per-frequency material evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .constants import C_LIGHT, HBAR, SEPARATION_MAX, SEPARATION_MIN
from .errors import InvalidInputError
from .materials import PerfectConductor, epsilon_at_imaginary, epsilon_many
from .quadrature import (
    QuadratureBudget,
    QuadratureReport,
    integrate_interval,
    integrate_half_line,
)

__all__ = [
    "Layer",
    "LayerStack",
    "GapConfig",
    "SpectralDecomposition",
    "fresnel_imag",
    "stack_reflection",
    "casimir_energy_area",
    "casimir_pressure",
    "casimir_energy_area_detailed",
    "casimir_pressure_detailed",
    "spectral_cumulative",
    "hydrogenation_delta",
    "ideal_energy_area",
    "ideal_pressure",
]

_INNER_SCALE = 2.0  # decay length of e**-y in the mapped inner variable
_OUTER_SCALE = 2.0


@dataclass(frozen=True)
class Layer:
    """Finite coating: a dielectric model plus a thickness in metres."""

    model: object
    thickness: float

    def __post_init__(self):
        if not (self.thickness > 0 and math.isfinite(self.thickness)):
            raise InvalidInputError(f"layer thickness must be positive, got {self.thickness}")


@dataclass(frozen=True)
class LayerStack:
    """A mirror: semi-infinite substrate plus coatings, gap side first."""

    substrate: object
    coatings: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coatings", tuple(self.coatings))
        for layer in self.coatings:
            if not isinstance(layer, Layer):
                raise InvalidInputError("coatings must be Layer instances")


@dataclass(frozen=True)
class GapConfig:
    """Two mirrors facing across a vacuum gap of width ``separation``."""

    mirror_a: LayerStack
    mirror_b: LayerStack
    separation: float

    def __post_init__(self):
        d = self.separation
        if not (SEPARATION_MIN <= d <= SEPARATION_MAX):
            raise InvalidInputError(
                f"separation {d} m outside validity window "
                f"[{SEPARATION_MIN}, {SEPARATION_MAX}] m"
            )


@dataclass(frozen=True)
class SpectralDecomposition:
    """Cumulative pressure fraction below each imaginary-frequency cutoff."""

    cutoffs: tuple  # rad/s, ascending
    cumulative_fraction: tuple
    wavelengths: tuple  # 2*pi*c/xi per cutoff (inf at xi = 0)


# ---------------------------------------------------------------------------
# Reflection amplitudes (reference, per-point API)
# ---------------------------------------------------------------------------


def _check_pol(polarization: str) -> str:
    pol = polarization.upper()
    if pol not in ("TE", "TM"):
        raise InvalidInputError(f"polarization must be 'TE' or 'TM', got {polarization!r}")
    return pol


def fresnel_imag(model, xi: float, k: float, polarization: str) -> float:
    """Vacuum/half-space reflection amplitude at imaginary frequency.

    TM: (eps*kappa0 - kappa) / (eps*kappa0 + kappa);  TE analogously without
    the eps weights, where kappa0 = sqrt(k**2 + xi**2/c**2) and
    kappa = sqrt(k**2 + eps*xi**2/c**2).
    """
    pol = _check_pol(polarization)
    if k < 0 or xi < 0:
        raise InvalidInputError("xi and k must be >= 0")
    if isinstance(model, PerfectConductor):
        return 1.0 if pol == "TM" else -1.0
    eps = epsilon_at_imaginary(model, xi)
    if math.isinf(eps):
        return 1.0 if pol == "TM" else -1.0
    w2 = (xi / C_LIGHT) ** 2
    kappa0 = math.sqrt(k * k + w2)
    kappa = math.sqrt(k * k + eps * w2)
    if kappa0 == 0.0:
        return 0.0
    if pol == "TM":
        return (eps * kappa0 - kappa) / (eps * kappa0 + kappa)
    return (kappa0 - kappa) / (kappa0 + kappa)


def stack_reflection(stack: LayerStack, xi: float, k: float, polarization: str) -> float:
    """Reflection amplitude of a coated mirror seen from the vacuum gap.

    Downward recursion r = (rho + r_below*e**(-2*kappa*t)) /
    (1 + rho*r_below*e**(-2*kappa*t)) folded from the substrate up.
    """
    pol = _check_pol(polarization)
    if k < 0 or xi < 0:
        raise InvalidInputError("xi and k must be >= 0")
    w2 = (xi / C_LIGHT) ** 2

    # Media from the gap downward; anything beneath a perfect conductor is
    # unreachable and dropped.
    eps_list = [1.0]
    pc_bottom = False
    for layer in stack.coatings:
        if isinstance(layer.model, PerfectConductor):
            pc_bottom = True
            break
        eps_list.append(epsilon_at_imaginary(layer.model, xi))
    tau = [layer.thickness for layer in stack.coatings[: len(eps_list) - 1]]
    if not pc_bottom:
        if isinstance(stack.substrate, PerfectConductor):
            pc_bottom = True
        else:
            eps_sub = epsilon_at_imaginary(stack.substrate, xi)
            if math.isinf(eps_sub):
                pc_bottom = True
            else:
                eps_list.append(eps_sub)

    kappa = [math.sqrt(k * k + e * w2) for e in eps_list]

    def rho(i, j):
        if pol == "TE":
            return (kappa[i] - kappa[j]) / (kappa[i] + kappa[j])
        return (eps_list[j] * kappa[i] - eps_list[i] * kappa[j]) / (
            eps_list[j] * kappa[i] + eps_list[i] * kappa[j]
        )

    if pc_bottom:
        r = 1.0 if pol == "TM" else -1.0
        deepest = len(eps_list) - 1
    else:
        r = rho(len(eps_list) - 2, len(eps_list) - 1)
        deepest = len(eps_list) - 2

    for j in range(deepest, 0, -1):
        decay = math.exp(-2.0 * kappa[j] * tau[j - 1])
        z = r * decay
        r = (rho(j - 1, j) + z) / (1.0 + rho(j - 1, j) * z)
    return r


# ---------------------------------------------------------------------------
# Kernel-facing stack descriptors
# ---------------------------------------------------------------------------


def _stack_media(stack: LayerStack):
    """(models, tau-needed) with perfect-conductor truncation applied.

    Returns the list of models from the gap downward ending at the effective
    substrate, plus the coating thickness list.
    """
    models = []
    thicknesses = []
    for layer in stack.coatings:
        if isinstance(layer.model, PerfectConductor):
            models.append(layer.model)
            return models, thicknesses
        models.append(layer.model)
        thicknesses.append(layer.thickness)
    models.append(stack.substrate)
    return models, thicknesses


def _stack_eps_table(models, xi_nodes):
    """Permittivity of every stack medium on all outer nodes at once.

    Shape (n_media, n_xi); perfect conductors contribute the kernel sentinel.
    """
    cols = []
    for m in models:
        if isinstance(m, PerfectConductor):
            cols.append(np.full(xi_nodes.shape, backend.PC_SENTINEL))
        else:
            col = epsilon_many(m, xi_nodes)
            col = np.where(np.isinf(col), backend.PC_SENTINEL, col)
            cols.append(col)
    return np.array(cols)


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


@dataclass
class EngineResult:
    value: float
    report: QuadratureReport = field(default_factory=QuadratureReport)


class _PlaneEngine:
    """One energy/pressure integration over a fixed gap configuration."""

    def __init__(self, gap: GapConfig, rtol: float):
        self.gap = gap
        self.rtol = rtol
        self.inner_rtol = 0.1 * rtol
        self.d = gap.separation
        self.models_a, t_a = _stack_media(gap.mirror_a)
        self.models_b, t_b = _stack_media(gap.mirror_b)
        self.tau_a = np.asarray(t_a, dtype=float) / self.d
        self.tau_b = np.asarray(t_b, dtype=float) / self.d
        self.budget = QuadratureBudget()
        self.report = QuadratureReport()

    def _inner(self, x: float, eps_a, eps_b, power: int) -> float:
        def f(s):
            y = x + s
            g_e, g_p = backend.plane_integrand_batch(
                x, y, eps_a, self.tau_a, eps_b, self.tau_b
            )
            g = g_e if power == 1 else g_p
            return (y**power) * g

        val, n = integrate_half_line(
            f,
            _INNER_SCALE,
            self.inner_rtol,
            budget=self.budget,
            context=f"inner k integral at x={x:g}",
        )
        if n > self.report.inner_nodes_max:
            self.report.inner_nodes_max = n
        return val

    def _outer_values(self, x_nodes: np.ndarray, power: int) -> np.ndarray:
        xi_nodes = x_nodes * C_LIGHT / (2.0 * self.d)
        eps_a_tab = _stack_eps_table(self.models_a, xi_nodes)
        eps_b_tab = _stack_eps_table(self.models_b, xi_nodes)
        out = np.empty_like(x_nodes)
        for i, x in enumerate(x_nodes):
            out[i] = self._inner(x, eps_a_tab[:, i], eps_b_tab[:, i], power)
        return out

    def integrate(self, power: int, x_max: float = None) -> float:
        """Outer integral of the inner results; power 1 = energy, 2 = pressure."""

        def f(x):
            return self._outer_values(np.atleast_1d(x), power)

        if x_max is None:
            val, n = integrate_half_line(
                f,
                _OUTER_SCALE,
                self.rtol,
                budget=self.budget,
                context="outer xi integral",
            )
        else:
            val, n = integrate_interval(
                f,
                0.0,
                x_max,
                self.rtol,
                budget=self.budget,
                context="outer xi integral (truncated)",
            )
        self.report.outer_nodes = max(self.report.outer_nodes, n)
        self.report.evaluations = self.budget.evaluations
        return val


def casimir_energy_area_detailed(gap: GapConfig, rtol: float = 1e-6) -> EngineResult:
    """Energy per unit area (J/m**2), negative for attracting mirrors."""
    eng = _PlaneEngine(gap, rtol)
    j = eng.integrate(power=1)
    value = HBAR * C_LIGHT / (32.0 * math.pi**2 * gap.separation**3) * j
    return EngineResult(value=value, report=eng.report)


def casimir_pressure_detailed(gap: GapConfig, rtol: float = 1e-6) -> EngineResult:
    """Pressure (Pa), negative = attractive."""
    eng = _PlaneEngine(gap, rtol)
    j = eng.integrate(power=2)
    value = -HBAR * C_LIGHT / (32.0 * math.pi**2 * gap.separation**4) * j
    return EngineResult(value=value, report=eng.report)


def casimir_energy_area(gap: GapConfig, rtol: float = 1e-6) -> float:
    return casimir_energy_area_detailed(gap, rtol).value


def casimir_pressure(gap: GapConfig, rtol: float = 1e-6) -> float:
    return casimir_pressure_detailed(gap, rtol).value


def ideal_energy_area(d: float) -> float:
    """Closed form for perfect mirrors: -pi**2*hbar*c/(720*d**3)."""
    return -math.pi**2 * HBAR * C_LIGHT / (720.0 * d**3)


def ideal_pressure(d: float) -> float:
    """Closed form for perfect mirrors: -pi**2*hbar*c/(240*d**4)."""
    return -math.pi**2 * HBAR * C_LIGHT / (240.0 * d**4)


# ---------------------------------------------------------------------------
# Spectral decomposition and paired-state comparison
# ---------------------------------------------------------------------------


def spectral_cumulative(gap: GapConfig, cutoffs, rtol: float = 1e-6) -> SpectralDecomposition:
    """Cumulative pressure fraction from modes with xi below each cutoff.

    The outer integral is truncated at each cutoff; segments between
    consecutive cutoffs are integrated once and accumulated, so the returned
    fractions are non-decreasing by construction.
    """
    cutoffs = [float(c) for c in cutoffs]
    if not cutoffs:
        raise InvalidInputError("need at least one cutoff")
    if any(c < 0 for c in cutoffs):
        raise InvalidInputError("cutoffs must be >= 0")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise InvalidInputError("cutoffs must be strictly ascending")

    d = gap.separation
    eng_total = _PlaneEngine(gap, rtol)
    total = eng_total.integrate(power=2)

    fractions = []
    acc = 0.0
    prev_x = 0.0
    eng = _PlaneEngine(gap, rtol)
    for xi_cut in cutoffs:
        x_cut = 2.0 * d * xi_cut / C_LIGHT
        if x_cut > prev_x:

            def f(x):
                return eng._outer_values(np.atleast_1d(x), power=2)

            seg, _ = integrate_interval(
                f,
                prev_x,
                x_cut,
                rtol,
                atol=abs(total) * rtol,
                budget=eng.budget,
                context="spectral segment",
            )
            acc += seg
            prev_x = x_cut
        fractions.append(acc / total if total != 0.0 else 0.0)

    lams = tuple(2.0 * math.pi * C_LIGHT / c if c > 0 else math.inf for c in cutoffs)
    return SpectralDecomposition(
        cutoffs=tuple(cutoffs),
        cumulative_fraction=tuple(fractions),
        wavelengths=lams,
    )


def hydrogenation_delta(reflective: GapConfig, transparent: GapConfig, rtol: float = 1e-6) -> float:
    """Relative pressure change between two mirror states, |P1-P2|/|P1|.

    The two configurations must share the separation and differ in at most
    one mirror.
    """
    if reflective.separation != transparent.separation:
        raise InvalidInputError("paired gaps must share the same separation")
    if (
        reflective.mirror_a != transparent.mirror_a
        and reflective.mirror_b != transparent.mirror_b
    ):
        raise InvalidInputError("paired gaps may differ in only one mirror")
    p1 = casimir_pressure(reflective, rtol)
    p2 = casimir_pressure(transparent, rtol)
    if p1 == p2:
        return 0.0
    if p1 == 0.0:
        raise InvalidInputError("reference state has zero pressure; relative change undefined")
    return abs(p1 - p2) / abs(p1)
