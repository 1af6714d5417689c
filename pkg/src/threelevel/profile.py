"""Definition-based (finite-difference) quantities on a time grid.

Thin wrapper over the selected kernel backend.  Everything here is computed
from state amplitudes alone; no closed form is consulted.
"""
from __future__ import annotations

import math

import numpy as np

from ._backend import STATE_CODES, kernels
from .errors import InvalidArgumentError
from .qsystem import STATE_KINDS, DriveParams

DEFAULT_STEP = 1e-6
COLUMNS = kernels.PROFILE_COLUMNS


def state_code(state: str) -> int:
    try:
        return STATE_CODES[state]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown state kind {state!r}; expected one of {STATE_KINDS}"
        ) from None


def time_grid(t) -> np.ndarray:
    """Validate times (finite, non-negative) and return them as a 1-D float array."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if arr.ndim != 1:
        raise InvalidArgumentError("time grid must be one-dimensional")
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr >= 0)):
        raise InvalidArgumentError("times must be finite and non-negative")
    return np.ascontiguousarray(arr)


def check_step(h: float) -> float:
    h = float(h)
    if not (h > 0 and math.isfinite(h)):
        raise InvalidArgumentError(f"finite-difference step must be positive, got {h!r}")
    return h


def amplitudes(p: DriveParams, t, state: str = "exact") -> np.ndarray:
    """Bare-basis amplitudes on a grid, shape (len(t), 3)."""
    t = time_grid(t)
    return kernels.state_grid(p.vartheta2, p.vartheta3, p.delta, p.phi2, p.phi3, t, state_code(state))


def numeric_profile(p: DriveParams, t, state: str = "exact", h: float = DEFAULT_STEP) -> dict:
    """QFI entries, Uhlmann term, HSS, coherence and norm from central phase differences.

    Keys follow ``COLUMNS``; each value is an array over ``t``.
    """
    t = time_grid(t)
    out = kernels.numeric_profile(
        p.vartheta2, p.vartheta3, p.delta, p.phi2, p.phi3, t, state_code(state), check_step(h)
    )
    return {name: out[:, i] for i, name in enumerate(COLUMNS)}
