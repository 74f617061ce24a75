"""Pure-numpy implementation of the plane-plane integrand kernel.

This is the fallback twin of the compiled extension ``_plane_kernel_c``; the
two must implement identical arithmetic.  See ``backend`` for selection.

All quantities are dimensionless: with gap d, outer variable x = 2*d*xi/c,
inner variable y = 2*d*kappa0 (y >= x), and each medium contributes
kap = sqrt(y**2 + (eps-1)*x**2), i.e. 2*d times its decay constant.  Layer
thicknesses are passed as tau = t/d so the decay across a layer is
exp(-kap*tau).

Stack layout: ``eps`` holds the coating permittivities at this xi ordered
from the vacuum gap downward, with the substrate last; ``tau`` holds the
matching coating thicknesses (one element shorter).  A perfect conductor is
marked by the sentinel value -1.0 and may only appear as the substrate
(callers truncate anything beneath one).
"""

from __future__ import annotations

import numpy as np

PC_SENTINEL = -1.0


def _stack_r(x, y, eps, tau):
    """TE and TM reflection amplitudes of one mirror for every y node."""
    x2 = x * x
    n_media = len(eps)  # coatings + substrate
    pc_sub = eps[n_media - 1] == PC_SENTINEL

    # kap for vacuum plus every non-PC medium, gap-first
    kap = [np.asarray(y, dtype=float)]
    n_real = n_media - 1 if pc_sub else n_media
    for j in range(n_real):
        kap.append(np.sqrt(y * y + (eps[j] - 1.0) * x2))

    if pc_sub:
        r_te = np.full_like(kap[0], -1.0)
        r_tm = np.full_like(kap[0], 1.0)
        deepest = n_real  # interface (medium n_real, PC) already folded in
    else:
        ki, kj = kap[n_real - 1], kap[n_real]
        ei = 1.0 if n_real == 1 else eps[n_real - 2]
        ej = eps[n_real - 1]
        r_te = (ki - kj) / (ki + kj)
        r_tm = (ej * ki - ei * kj) / (ej * ki + ei * kj)
        deepest = n_real - 1  # deepest remaining interface index

    # Fold coatings upward: interface j sits between media j-1 and j,
    # with layer j (thickness tau[j-1]) below it.
    for j in range(deepest, 0, -1):
        decay = np.exp(-kap[j] * tau[j - 1])
        ki, kj = kap[j - 1], kap[j]
        ei = 1.0 if j == 1 else eps[j - 2]
        ej = eps[j - 1]
        rho_te = (ki - kj) / (ki + kj)
        rho_tm = (ej * ki - ei * kj) / (ej * ki + ei * kj)
        zt = r_te * decay
        zm = r_tm * decay
        r_te = (rho_te + zt) / (1.0 + rho_te * zt)
        r_tm = (rho_tm + zm) / (1.0 + rho_tm * zm)
    return r_te, r_tm


def plane_integrand_batch(x, y, eps_a, tau_a, eps_b, tau_b):
    """Round-trip integrand factors for a batch of inner nodes.

    Returns ``(g_energy, g_pressure)`` with, per node and summed over both
    polarizations, g_energy = ln(1 - r_a*r_b*e**-y) and
    g_pressure = r_a*r_b*e**-y / (1 - r_a*r_b*e**-y).
    """
    y = np.asarray(y, dtype=float)
    rte_a, rtm_a = _stack_r(x, y, eps_a, tau_a)
    rte_b, rtm_b = _stack_r(x, y, eps_b, tau_b)
    emy = np.exp(-y)
    z_te = rte_a * rte_b * emy
    z_tm = rtm_a * rtm_b * emy
    g_e = np.log1p(-z_te) + np.log1p(-z_tm)
    g_p = z_te / (1.0 - z_te) + z_tm / (1.0 - z_tm)
    return g_e, g_p
