"""Near-field spherical-wavefront channels with visibility-region masking.

A point at l sees element n through the free-space response

    a_n(l) = lambda / (4 pi d_n) * exp(-j 2 pi d_n / lambda),  d_n = ||l_n - l||,

where both the amplitude and the phase vary across the aperture. Over a
non-stationary channel only a contiguous run of elements, the visibility
region, is unblocked; the effective channel is the element-wise product of
the array response and the 0/1 cover vector of that run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularGeometryError
from .geometry import UpaGeometry

_AXES = {"x": 0, "y": 1, "z": 2}


def min_vr_span(n: int, eta: float) -> int:
    """Smallest allowed index span (end - start) of a visibility region."""
    if n < 2:
        raise ValueError(f"array must have at least 2 elements, got {n}")
    if not 0 < eta < 1:
        raise ValueError(f"proportional factor must lie in (0, 1), got {eta}")
    return math.ceil(eta * n)


@dataclass(frozen=True)
class VisibilityRegion:
    """Contiguous run of unblocked element indices, 1-based and inclusive."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start != int(self.start) or self.end != int(self.end):
            raise ValueError("visibility region bounds must be integers")
        if self.start < 1:
            raise ValueError(f"visibility region start must be >= 1, got {self.start}")
        if self.end <= self.start:
            raise ValueError(
                f"visibility region must span at least two elements, got "
                f"[{self.start}, {self.end}]"
            )

    @property
    def size(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class ErState:
    """Ground-truth state of one energy receiver."""

    position: np.ndarray
    vr: VisibilityRegion
    reflection: complex = 1.0 + 0.0j
    weight: float = 1.0

    def __post_init__(self) -> None:
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,):
            raise ValueError(f"position must have shape (3,), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("position must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)
        refl = complex(self.reflection)
        if not (math.isfinite(refl.real) and math.isfinite(refl.imag)):
            raise ValueError("reflection coefficient must be finite")
        object.__setattr__(self, "reflection", refl)
        if not self.weight >= 0:
            raise ValueError(f"weight must be nonnegative, got {self.weight}")


def steering_vector(geom: UpaGeometry, point) -> np.ndarray:
    """Spherical-wavefront array response of the full aperture at a point.

    Entry n carries the free-space amplitude lambda / (4 pi d_n) and the
    propagation phase exp(-j 2 pi d_n / lambda), with d_n the exact distance
    from element n to the point (no far-field plane-wave approximation).
    """
    pos = np.asarray(point, dtype=float)
    if pos.shape != (3,):
        raise ValueError(f"point must have shape (3,), got {pos.shape}")
    dists = np.linalg.norm(geom.positions - pos, axis=1)
    if np.any(dists == 0.0):
        raise SingularGeometryError(f"point {pos} coincides with an array element")
    amp = geom.wavelength / (4.0 * np.pi * dists)
    return amp * np.exp(-2j * np.pi / geom.wavelength * dists)


def vr_cover(vr: VisibilityRegion, n: int) -> np.ndarray:
    """0/1 cover vector of a visibility region over an n-element array."""
    if vr.end > n:
        raise ValueError(f"visibility region end {vr.end} exceeds array size {n}")
    cover = np.zeros(n)
    cover[vr.start - 1 : vr.end] = 1.0
    return cover


def channel(geom: UpaGeometry, er: ErState) -> np.ndarray:
    """Effective channel of a receiver: masked array response at its position."""
    return steering_vector(geom, er.position) * vr_cover(er.vr, geom.n_elements)


def channel_derivative(geom: UpaGeometry, point, vr: VisibilityRegion, axis: str) -> np.ndarray:
    """Partial derivative of the masked channel with respect to one coordinate.

    Differentiating amplitude and phase of each entry gives

        d a_n / d u = a_n(l) * ( (u_n - u) / d_n^2 + j 2 pi (u_n - u) / (lambda d_n) ),

    with a_n(l) the full complex entry and u_n the element coordinate on the
    chosen axis. Entries outside the visibility region are zero.
    """
    if axis not in _AXES:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}")
    col = _AXES[axis]
    pos = np.asarray(point, dtype=float)
    if pos.shape != (3,):
        raise ValueError(f"point must have shape (3,), got {pos.shape}")
    dists = np.linalg.norm(geom.positions - pos, axis=1)
    if np.any(dists == 0.0):
        raise SingularGeometryError(f"point {pos} coincides with an array element")
    entries = geom.wavelength / (4.0 * np.pi * dists) * np.exp(
        -2j * np.pi / geom.wavelength * dists
    )
    diff = geom.positions[:, col] - pos[col]
    radial = diff / dists
    deriv = entries * (radial / dists + 2j * np.pi / geom.wavelength * radial)
    return deriv * vr_cover(vr, geom.n_elements)
