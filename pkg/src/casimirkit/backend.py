"""Kernel backend selection: compiled extension with pure-numpy fallback.

The compiled module is preferred when importable; set
``CASIMIRKIT_BACKEND=python`` (or ``compiled``) to force a choice, or call
:func:`use_backend` at runtime (used by the benchmark and the equivalence
tests).
"""

from __future__ import annotations

import os

from . import _plane_kernel_py

try:
    from . import _plane_kernel_c
except ImportError:
    _plane_kernel_c = None

_BACKENDS = {"python": _plane_kernel_py}
if _plane_kernel_c is not None:
    _BACKENDS["compiled"] = _plane_kernel_c


def _initial_backend() -> str:
    forced = os.environ.get("CASIMIRKIT_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(
                f"CASIMIRKIT_BACKEND={forced!r} unavailable; have {sorted(_BACKENDS)}"
            )
        return forced
    return "compiled" if "compiled" in _BACKENDS else "python"


_current = _initial_backend()


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def active_backend() -> str:
    return _current


def use_backend(name: str) -> None:
    global _current
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    _current = name


def plane_integrand_batch(x, y, eps_a, tau_a, eps_b, tau_b):
    return _BACKENDS[_current].plane_integrand_batch(x, y, eps_a, tau_a, eps_b, tau_b)


PC_SENTINEL = _plane_kernel_py.PC_SENTINEL
