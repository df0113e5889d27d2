"""Visibility-region identification from aggregated echo magnitudes.

Elements inside the visibility region receive the backscattered probe on top
of noise, elements outside receive noise alone, so the aggregated magnitudes
split into two level groups. The window search charges every element left
outside a candidate window its observed magnitude and every element inside a
flat rate alpha, then minimizes that cost over all windows of admissible span.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .channel import VisibilityRegion, min_vr_span
from .errors import InfeasibleWindowError


def estimate_power_levels(y_bar: np.ndarray, n_alpha: int) -> tuple[float, float]:
    """Estimate the outside/inside magnitude levels from order statistics.

    Averages the n_alpha smallest aggregated magnitudes for the outside level
    and the n_alpha largest for the inside level. Valid whenever the true
    region leaves at least n_alpha elements on each side.
    """
    mags = np.abs(np.asarray(y_bar))
    if mags.ndim != 1:
        raise ValueError(f"aggregated echo must be a vector, got shape {mags.shape}")
    if not 1 <= n_alpha <= mags.size // 2:
        raise ValueError(
            f"n_alpha must lie in 1..{mags.size // 2} for {mags.size} elements, got {n_alpha}"
        )
    mags = np.sort(mags)
    return float(mags[:n_alpha].mean()), float(mags[-n_alpha:].mean())


def scaling_factor(p_out: float, p_in: float) -> float:
    """Midpoint window rate between the outside and inside levels."""
    if p_out < 0 or p_in < 0:
        raise ValueError(f"power levels must be nonnegative, got ({p_out}, {p_in})")
    if p_out > p_in:
        raise ValueError(f"outside level {p_out} exceeds inside level {p_in}")
    if p_out == p_in:
        warnings.warn(
            "inside and outside magnitude levels coincide; the window rate is "
            "uninformative and identification may be arbitrary",
            RuntimeWarning,
            stacklevel=2,
        )
    return 0.5 * (p_out + p_in)


def identify_vr(y_bar: np.ndarray, eta: float, alpha: float) -> VisibilityRegion:
    """Exhaustive minimum-cost window search over all admissible windows.

    The cost of a window [s, e] is

        f(s, e) = sum of |y_bar| outside the window + alpha * (e - s + 1),

    evaluated in O(1) per window from a prefix sum. Admissible windows have
    s in 1..floor((1 - eta) N) and e - s >= ceil(eta N). Ties break toward
    the smallest window, then the smallest start.
    """
    mags = np.abs(np.asarray(y_bar))
    if mags.ndim != 1:
        raise ValueError(f"aggregated echo must be a vector, got shape {mags.shape}")
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if alpha < 0:
        raise ValueError(f"window rate must be nonnegative, got {alpha}")
    n = mags.size
    span = min_vr_span(n, eta)
    start_max = math.floor((1.0 - eta) * n)
    if start_max < 1 or 1 + span > n:
        raise InfeasibleWindowError(
            f"no window of span >= {span} fits in {n} elements with eta = {eta}"
        )

    prefix = np.concatenate([[0.0], np.cumsum(mags)])
    total = prefix[n]
    best: tuple[float, int, int] | None = None  # (cost, size, start)
    best_end = 0
    for s in range(1, start_max + 1):
        ends = np.arange(s + span, n + 1)
        costs = prefix[s - 1] + (total - prefix[ends]) + alpha * (ends - s + 1)
        i = int(np.argmin(costs))  # first minimum, so the smallest end for this start
        key = (float(costs[i]), int(ends[i] - s + 1), s)
        if best is None or key < best:
            best = key
            best_end = int(ends[i])
    return VisibilityRegion(best[2], best_end)
