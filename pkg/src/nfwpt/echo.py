"""Backscatter echo simulation for the sensing stage.

During its slot a receiver reflects the probe back through the same masked
channel, so symbol t arrives at the array as

    y(t) = b * h * (h^T x) + z(t),

with b the complex reflection coefficient and z(t) circularly-symmetric
Gaussian noise, independent across elements and symbols. Because the probe
is held constant over the slot, the column sum of the echo block is a
sufficient statistic for (position, b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EchoBatch:
    """One slot of received echo symbols, one column per symbol."""

    samples: np.ndarray
    slot_len: int
    noise_power: float

    def __post_init__(self) -> None:
        if self.samples.ndim != 2 or self.samples.shape[1] != self.slot_len:
            raise ValueError(
                f"samples must have shape (n_elements, {self.slot_len}), "
                f"got {self.samples.shape}"
            )


def uniform_probe(geom, p_max: float) -> np.ndarray:
    """Constant probe that splits the power budget evenly over the elements."""
    if p_max <= 0:
        raise ValueError(f"probe power must be positive, got {p_max}")
    return np.full(geom.n_elements, np.sqrt(p_max / geom.n_elements), dtype=complex)


def simulate_echo(
    h: np.ndarray,
    b: complex,
    probe: np.ndarray,
    slot_len: int,
    noise_power: float,
    rng: np.random.Generator,
) -> EchoBatch:
    """Simulate one receiver's echo slot under the constant probe.

    Each complex noise entry draws two independent zero-mean normals (real
    block first, then imaginary), each with variance noise_power / 2.
    """
    h = np.asarray(h, dtype=complex)
    probe = np.asarray(probe, dtype=complex)
    if h.shape != probe.shape or h.ndim != 1:
        raise ValueError(f"channel {h.shape} and probe {probe.shape} must be equal-length vectors")
    if slot_len < 1:
        raise ValueError(f"slot length must be >= 1, got {slot_len}")
    if noise_power < 0:
        raise ValueError(f"noise power must be nonnegative, got {noise_power}")
    signal = complex(b) * h * (h @ probe)
    samples = np.broadcast_to(signal[:, None], (h.size, slot_len)).astype(complex)
    if noise_power > 0:
        scale = np.sqrt(noise_power / 2.0)
        noise = scale * rng.standard_normal((h.size, slot_len))
        noise = noise + 1j * scale * rng.standard_normal((h.size, slot_len))
        samples = samples + noise
    samples.setflags(write=False)
    return EchoBatch(samples=samples, slot_len=int(slot_len), noise_power=float(noise_power))


def aggregate(batch: EchoBatch) -> np.ndarray:
    """Column sum of the echo block, the statistic every later stage consumes.

    Columns are accumulated in time order, so the result is reproducible
    against any independent in-order summation.
    """
    total = batch.samples[:, 0].copy()
    for t in range(1, batch.samples.shape[1]):
        total += batch.samples[:, t]
    return total
