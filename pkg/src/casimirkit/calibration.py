"""Absolute-distance calibration: synthetic curves, offset fits, error budgets.

The measured quantity is force versus piezo extension d_p; the true gap is
d0 - d_p with the absolute offset d0 unknown a priori.  Because the force
grows so steeply at short range, nanometre-scale offset errors translate
into percent-scale force errors; the operations here quantify exactly that:
chi-square fitting of d0, the sensitivity |F(d) - F(d+delta)|/|F(d)|, the
distance below which it exceeds a threshold, the smallest offset resolvable
at a given force resolution, and the rigid-shift residual analysis.

All fits keep the force amplitude fixed by theory; an optional free
amplitude (for sensitivity studies only) is available behind a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    InvalidInputError,
    NonIdentifiableError,
    NoSolutionError,
)

__all__ = [
    "ForceCurveSample",
    "ForceCurve",
    "CalibrationResult",
    "NoiseModel",
    "ShiftAnalysis",
    "synthesize_curve",
    "fit_d0",
    "offset_sensitivity",
    "crossover_distance",
    "min_resolvable_offset",
    "shift_residual_analysis",
]

SEARCH_WINDOW = (1e-9, 100e-6)  # m, for crossover searches
FIT_BRACKET_PAD_LO = 1e-9  # m above the largest piezo extension
FIT_BRACKET_PAD_HI = 100e-6
FIT_XTOL = 1e-12  # m, 1e-3 nm
MIN_GAP = 1e-9


@dataclass(frozen=True)
class ForceCurveSample:
    d_p: float  # piezo extension, m
    force: float  # N
    sigma: float  # N, > 0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InvalidInputError("sample sigma must be positive")


@dataclass(frozen=True)
class ForceCurve:
    samples: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = tuple(self.samples)
        object.__setattr__(self, "samples", samples)
        dps = [s.d_p for s in samples]
        if any(b <= a for a, b in zip(dps, dps[1:])):
            raise InvalidInputError("piezo extensions must be strictly increasing")

    @property
    def d_p(self) -> np.ndarray:
        return np.array([s.d_p for s in self.samples])

    @property
    def force(self) -> np.ndarray:
        return np.array([s.force for s in self.samples])

    @property
    def sigma(self) -> np.ndarray:
        return np.array([s.sigma for s in self.samples])


@dataclass(frozen=True)
class CalibrationResult:
    d0_hat: float
    sigma_d0: float
    chi2: float
    residuals: tuple  # N, data minus fitted theory
    converged: bool


@dataclass(frozen=True)
class NoiseModel:
    """Seeded Gaussian force noise (PCG64; same seed, same sequence)."""

    sigma_force: float  # N
    seed: int = 0

    def __post_init__(self):
        if self.sigma_force < 0:
            raise InvalidInputError("noise sigma must be >= 0")


@dataclass(frozen=True)
class ShiftAnalysis:
    best_shift: float  # m
    rms_before: float  # relative residual RMS at zero shift
    rms_after: float


def synthesize_curve(theory, d0: float, dp_grid, noise: NoiseModel) -> ForceCurve:
    """Generate a synthetic measurement: F(d0 - d_p) plus Gaussian noise.

    Zero-noise curves carry unit sigmas (weights are then immaterial).
    """
    dp = np.asarray(sorted(dp_grid), dtype=float)
    if dp.size == 0:
        raise InvalidInputError("empty piezo grid")
    if d0 - dp.max() < MIN_GAP:
        raise InvalidInputError(
            f"gap underflow: d0 - max(d_p) = {d0 - dp.max():g} m < {MIN_GAP:g} m"
        )
    clean = np.array([theory(d0 - v) for v in dp])
    if noise.sigma_force > 0:
        rng = np.random.default_rng(noise.seed)
        values = clean + rng.normal(0.0, noise.sigma_force, size=dp.size)
        sigma = noise.sigma_force
    else:
        values = clean
        sigma = 1.0
    samples = tuple(
        ForceCurveSample(d_p=float(p), force=float(f), sigma=sigma)
        for p, f in zip(dp, values)
    )
    return ForceCurve(samples=samples, meta={"true_d0": d0, "seed": noise.seed})


def _chi2_function(curve: ForceCurve, theory, amplitude_free: bool):
    dp = curve.d_p
    f = curve.force
    w = 1.0 / curve.sigma**2

    def chi2(d0: float) -> float:
        model = np.array([theory(d0 - v) for v in dp])
        if amplitude_free:
            denom = float(np.sum(w * model * model))
            amp = float(np.sum(w * f * model)) / denom if denom > 0 else 0.0
            model = amp * model
        r = f - model
        return float(np.sum(w * r * r))

    return chi2


def _golden_section(f, a: float, b: float, xtol: float):
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def _parabolic_refine(f, x: float, h: float, xtol: float, max_iter: int = 60):
    """Successive parabolic steps from a bracketing triplet around x."""
    for _ in range(max_iter):
        f0, fp, fm = f(x), f(x + h), f(x - h)
        denom = fp - 2.0 * f0 + fm
        if denom <= 0:
            h *= 0.5
            if h < xtol:
                break
            continue
        step = 0.5 * h * (fm - fp) / denom
        step = max(-h, min(h, step))
        x = x + step
        if abs(step) < xtol:
            break
        h = max(xtol, min(h, 2.0 * abs(step)))
    return x


def fit_d0(curve: ForceCurve, theory, amplitude_free: bool = False) -> CalibrationResult:
    """Weighted least-squares fit of the absolute offset d0.

    The search bracket is [max(d_p) + 1 nm, max(d_p) + 100 um]; golden
    section locates the valley and parabolic refinement sharpens it to
    1e-3 nm.  sigma_d0 comes from the delta-chi-square = 1 interval.
    """
    if len(curve.samples) < 3:
        raise InvalidInputError("need at least 3 samples to fit d0")
    chi2 = _chi2_function(curve, theory, amplitude_free)
    lo = curve.d_p.max() + FIT_BRACKET_PAD_LO
    hi = curve.d_p.max() + FIT_BRACKET_PAD_HI

    coarse = _golden_section(chi2, lo, hi, xtol=1e-10)
    d0_hat = _parabolic_refine(chi2, coarse, h=5e-10, xtol=FIT_XTOL)
    d0_hat = min(max(d0_hat, lo), hi)
    if d0_hat - lo < 1e-11 or hi - d0_hat < 1e-11:
        raise ConvergenceError(
            f"d0 minimum pinned at the search bracket edge near {d0_hat:g} m"
        )
    chi2_min = chi2(d0_hat)

    # Identifiability: flat objective means the data do not constrain d0.
    # The curvature is compared against the local chi-square magnitude so the
    # criterion is independent of the overall sigma scale.
    h = max(1e-9, 1e-6 * d0_hat)
    c_plus, c_minus = chi2(d0_hat + h), chi2(d0_hat - h)
    curvature = c_plus - 2.0 * chi2_min + c_minus
    local_scale = chi2_min + abs(c_plus) + abs(c_minus)
    if local_scale == 0.0 or abs(curvature) < 1e-12 * local_scale:
        raise NonIdentifiableError(
            "chi-square is flat in d0 (relative curvature < 1e-12)"
        )

    sigma = _delta_chi2_halfwidth(chi2, d0_hat, chi2_min, lo, hi)
    model = np.array([theory(d0_hat - v) for v in curve.d_p])
    residuals = tuple(float(r) for r in curve.force - model)
    return CalibrationResult(
        d0_hat=float(d0_hat),
        sigma_d0=float(sigma),
        chi2=float(chi2_min),
        residuals=residuals,
        converged=True,
    )


def _delta_chi2_halfwidth(chi2, d0: float, chi2_min: float, lo: float, hi: float) -> float:
    """Half-width of the chi2_min + 1 interval, averaged over both sides.

    If the interval runs past a bracket edge the edge distance is used (the
    data simply do not constrain d0 more tightly than that on this side).
    """
    target = chi2_min + 1.0

    def crossing(direction: int) -> float:
        bound = hi if direction > 0 else lo
        step = max(1e-12, 1e-7 * d0)
        x = d0
        while True:
            x_next = x + direction * step
            if (direction > 0 and x_next >= bound) or (direction < 0 and x_next <= bound):
                x_next = bound
            if chi2(x_next) >= target or x_next == bound:
                break
            x = x_next
            step *= 2.0
        if x_next == bound and chi2(x_next) < target:
            return abs(bound - d0)
        a, b = (x, x_next) if direction > 0 else (x_next, x)
        for _ in range(200):
            mid = 0.5 * (a + b)
            if b - a < 1e-13:
                break
            if (chi2(mid) >= target) == (direction > 0):
                b = mid
            else:
                a = mid
        return abs(0.5 * (a + b) - d0)

    return 0.5 * (crossing(+1) + crossing(-1))


def offset_sensitivity(theory, d: float, delta: float) -> float:
    """Relative force change produced by a distance offset delta."""
    if d <= 0 or d + delta <= 0:
        raise InvalidInputError("distances must stay positive")
    f0 = theory(d)
    if f0 == 0.0:
        raise InvalidInputError("theory force vanishes at the reference distance")
    return abs(f0 - theory(d + delta)) / abs(f0)


def crossover_distance(theory, delta: float, threshold: float) -> float:
    """Distance where the offset sensitivity drops to ``threshold``.

    Requires a sensitivity that decreases with distance (checked on a coarse
    grid); solved by bisection to 0.1 nm.  Below the returned distance the
    sensitivity exceeds the threshold.
    """
    if not (0.0 < threshold < 1.0):
        raise InvalidInputError("threshold must lie in (0, 1)")
    lo, hi = SEARCH_WINDOW

    probe = np.geomspace(lo, hi, 12)
    svals = [offset_sensitivity(theory, d, delta) for d in probe]
    if any(b >= a for a, b in zip(svals, svals[1:])):
        raise InvalidInputError("offset sensitivity is not decreasing in distance")
    if svals[0] < threshold or svals[-1] > threshold:
        raise NoSolutionError(
            f"sensitivity never crosses {threshold} inside "
            f"[{lo:g}, {hi:g}] m (range {svals[-1]:.3g} .. {svals[0]:.3g})"
        )
    a, b = lo, hi
    while b - a > 1e-10:
        mid = 0.5 * (a + b)
        if offset_sensitivity(theory, mid, delta) > threshold:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def min_resolvable_offset(theory, d: float, force_resolution: float) -> float:
    """Smallest offset whose force change reaches the resolution.

    Solves |F(d) - F(d + delta)| = force_resolution by bisection to 0.01
    angstrom.  Fails if the resolution exceeds |F(d)| (the largest change any
    offset can produce when the force decays to zero).
    """
    if force_resolution <= 0:
        raise InvalidInputError("force resolution must be positive")
    f0 = theory(d)
    if force_resolution >= abs(f0):
        raise NoSolutionError(
            f"resolution {force_resolution:g} N exceeds the attainable change "
            f"|F(d)| = {abs(f0):g} N"
        )

    def change(delta: float) -> float:
        return abs(f0 - theory(d + delta))

    hi = 1e-10
    while change(hi) < force_resolution:
        hi *= 2.0
        if hi > 1.0:
            raise NoSolutionError("force change never reaches the resolution")
    lo = 0.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if change(mid) < force_resolution:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shift_residual_analysis(curve: ForceCurve, theory, d0_nominal: float, shift_grid) -> ShiftAnalysis:
    """Rigid-shift study of relative residuals.

    Residuals are relative, r_i(s) = (F_i - T(d0 - d_p_i + s)) / T(...);
    the RMS over the curve is minimized on the given grid and refined with a
    parabola through the best triplet.
    """
    shifts = sorted(float(s) for s in shift_grid)
    if not shifts:
        raise InvalidInputError("empty shift grid")
    dp = curve.d_p
    f = curve.force
    gaps0 = d0_nominal - dp
    lowest = min(gaps0) + min(shifts)
    if lowest <= 0:
        raise InvalidInputError("shift grid drives the gap non-positive")

    def rms(s: float) -> float:
        model = np.array([theory(g + s) for g in gaps0])
        if np.any(model == 0.0):
            raise InvalidInputError("theory force vanishes inside the shift window")
        r = (f - model) / model
        return float(np.sqrt(np.mean(r * r)))

    values = [rms(s) for s in shifts]
    i_best = int(np.argmin(values))
    best_s, best_v = shifts[i_best], values[i_best]

    if 0 < i_best < len(shifts) - 1:
        s1, s2, s3 = shifts[i_best - 1], shifts[i_best], shifts[i_best + 1]
        v1, v2, v3 = values[i_best - 1], values[i_best], values[i_best + 1]
        denom = (s2 - s1) * (v2 - v3) - (s2 - s3) * (v2 - v1)
        if denom != 0.0:
            vertex = s2 - 0.5 * (
                (s2 - s1) ** 2 * (v2 - v3) - (s2 - s3) ** 2 * (v2 - v1)
            ) / denom
            if shifts[i_best - 1] < vertex < shifts[i_best + 1]:
                v_vertex = rms(vertex)
                if v_vertex < best_v:
                    best_s, best_v = vertex, v_vertex

    return ShiftAnalysis(
        best_shift=float(best_s),
        rms_before=rms(0.0),
        rms_after=float(best_v),
    )
