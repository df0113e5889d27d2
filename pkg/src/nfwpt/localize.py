"""Receiver localization from the aggregated echo.

With the reflection coefficient concentrated out, the position estimate
maximizes

    q(l) = |h_hat(l)^H y_bar|^2 / ||h_hat(l)||^2,

where h_hat(l) is the array response at the candidate masked by the
identified visibility region. The search runs in two phases: a coarse grid
over the prior uncertainty box, then cyclic golden-section refinement that
only ever accepts improvements. Each refinement cycle sweeps the three
coordinate axes and then the ray from the array center through the current
estimate: the objective is sharply peaked across that ray but nearly flat
along it, so a range sweep is what actually moves the estimate once the
axis sweeps have locked the bearing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import VisibilityRegion, steering_vector, vr_cover
from .errors import DegenerateChannelError, SingularGeometryError, UnidentifiableReflectionError
from .geometry import UpaGeometry

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LocalizationResult:
    """Position estimate with the matching reflection estimate and diagnostics."""

    position_hat: np.ndarray
    b_hat: complex
    objective: float
    iterations: int
    converged: bool


def concentrated_objective(
    geom: UpaGeometry, y_bar: np.ndarray, candidate, vr_hat: VisibilityRegion
) -> float:
    """Concentrated likelihood score of one candidate position."""
    h = steering_vector(geom, candidate) * vr_cover(vr_hat, geom.n_elements)
    norm_sq = np.vdot(h, h).real
    if norm_sq == 0.0:
        raise DegenerateChannelError("masked response is identically zero")
    return float(abs(np.vdot(h, y_bar)) ** 2 / norm_sq)


def _objective_batch(
    geom: UpaGeometry, y_bar: np.ndarray, points: np.ndarray, vr_hat: VisibilityRegion
) -> np.ndarray:
    """Concentrated objective over a (Q, 3) batch of candidates."""
    dists = np.linalg.norm(geom.positions[None, :, :] - points[:, None, :], axis=2)
    if np.any(dists == 0.0):
        raise SingularGeometryError("a candidate point coincides with an array element")
    entries = geom.wavelength / (4.0 * np.pi * dists) * np.exp(
        -2j * np.pi / geom.wavelength * dists
    )
    entries *= vr_cover(vr_hat, geom.n_elements)[None, :]
    num = np.abs(entries.conj() @ y_bar) ** 2
    den = (np.abs(entries) ** 2).sum(axis=1)
    return num / den


def _ray_extent(point: np.ndarray, u: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Parameter range t keeping point + t*u inside the box, or None if empty."""
    t_lo, t_hi = -math.inf, math.inf
    for i in range(3):
        if u[i] == 0.0:
            continue
        t0 = (lo[i] - point[i]) / u[i]
        t1 = (hi[i] - point[i]) / u[i]
        t_lo = max(t_lo, min(t0, t1))
        t_hi = min(t_hi, max(t0, t1))
    if not t_lo < t_hi:
        return None
    return t_lo, t_hi


def _golden_max(fn, lo: float, hi: float, iters: int) -> tuple[float, float]:
    """Golden-section maximization of fn on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return (c, fc) if fc > fd else (d, fd)


def locate_er(
    geom: UpaGeometry,
    y_bar: np.ndarray,
    vr_hat: VisibilityRegion,
    search_box,
    probe: np.ndarray,
    slot_len: int,
    coarse_grid: tuple[int, int, int] = (9, 9, 9),
    tol: float = 1e-4,
    max_iters: int = 50,
    line_search_iters: int = 30,
) -> LocalizationResult:
    """Two-phase position search over a box, then reflection estimation.

    Phase 1 scores a coarse lattice spanning the box. Phase 2 cycles through
    the three coordinates and then the range direction (the ray from the
    array center through the current estimate), running a golden-section
    line search across the box on each and keeping a move only when it
    improves the objective, until the per-cycle position change falls below
    tol or max_iters cycles pass. Degenerate (zero-width) box axes are held
    fixed, and the range sweep is confined to the box, so it degenerates to
    a no-op when every axis is pinned.
    """
    lo = np.asarray(search_box[0], dtype=float)
    hi = np.asarray(search_box[1], dtype=float)
    if lo.shape != (3,) or hi.shape != (3,):
        raise ValueError("search box must give (3,) lower and upper corners")
    if np.any(lo > hi):
        raise ValueError(f"search box is empty: lower {lo} exceeds upper {hi}")
    counts = tuple(int(c) for c in coarse_grid)
    if len(counts) != 3 or any(c < 2 for c in counts):
        raise ValueError(f"coarse grid needs >= 2 points per axis, got {coarse_grid}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")

    axes = [np.linspace(lo[i], hi[i], counts[i]) for i in range(3)]
    mesh = np.meshgrid(*axes, indexing="ij")
    lattice = np.column_stack([m.ravel() for m in mesh])
    scores = _objective_batch(geom, y_bar, lattice, vr_hat)
    best_idx = int(np.argmax(scores))
    point = lattice[best_idx].copy()
    best_val = float(scores[best_idx])

    iterations = 0
    converged = False
    for _ in range(max_iters):
        iterations += 1
        previous = point.copy()
        for ax in range(3):
            if hi[ax] <= lo[ax]:
                continue

            def along(c: float, ax: int = ax) -> float:
                trial = point.copy()
                trial[ax] = c
                return concentrated_objective(geom, y_bar, trial, vr_hat)

            c_new, v_new = _golden_max(along, lo[ax], hi[ax], line_search_iters)
            if v_new > best_val:
                point[ax] = c_new
                best_val = v_new

        radius = float(np.linalg.norm(point))
        if radius > 0.0:
            u = point / radius
            extent = _ray_extent(point, u, lo, hi)
            if extent is not None:

                def along_ray(t: float) -> float:
                    return concentrated_objective(geom, y_bar, point + t * u, vr_hat)

                t_new, v_new = _golden_max(along_ray, extent[0], extent[1], line_search_iters)
                if v_new > best_val:
                    point = point + t_new * u
                    best_val = v_new

        if np.linalg.norm(point - previous) < tol:
            converged = True
            break

    b_hat = estimate_b(geom, y_bar, point, vr_hat, probe, slot_len)
    point.setflags(write=False)
    return LocalizationResult(
        position_hat=point,
        b_hat=b_hat,
        objective=best_val,
        iterations=iterations,
        converged=converged,
    )


def estimate_b(
    geom: UpaGeometry,
    y_bar: np.ndarray,
    position_hat,
    vr_hat: VisibilityRegion,
    probe: np.ndarray,
    slot_len: int,
) -> complex:
    """Least-squares reflection coefficient at a hypothesized position.

    Projects the aggregated echo on the model direction, so at the true
    position with the true region the noiseless estimate is exact.
    """
    if slot_len < 1:
        raise ValueError(f"slot length must be >= 1, got {slot_len}")
    h = steering_vector(geom, position_hat) * vr_cover(vr_hat, geom.n_elements)
    norm_sq = np.vdot(h, h).real
    if norm_sq == 0.0:
        raise DegenerateChannelError("masked response is identically zero")
    through = h @ np.asarray(probe, dtype=complex)
    if through == 0:
        raise UnidentifiableReflectionError(
            "probe is orthogonal to the hypothesized channel"
        )
    return complex(np.vdot(h, y_bar) / (slot_len * through * norm_sq))
