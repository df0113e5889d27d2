"""Energy covariance design for the charging stage.

The weighted harvested power sum beta_1 h_1^H R h_1 + ... is linear in the
transmit covariance R, so over the feasible set {R >= 0, tr R <= P} the
optimum sits at an extreme point: a rank-one covariance along the principal
eigenvector of the weighted channel matrix, using the full power budget. The
largest eigenvalue certifies optimality, since tr(A R) <= lambda_max(A) tr(R)
for every feasible R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleBlockError

_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class BeamformerSolution:
    """Rank-one transmit covariance: power on a unit beam direction."""

    direction: np.ndarray
    power: float
    objective: float
    certificate: float

    @property
    def covariance(self) -> np.ndarray:
        return self.power * np.outer(self.direction, self.direction.conj())


def weighted_channel_matrix(channels, weights) -> np.ndarray:
    """Weighted sum of channel outer products, Hermitian by construction."""
    if len(channels) != len(weights):
        raise ValueError(
            f"got {len(channels)} channels but {len(weights)} weights"
        )
    if len(channels) == 0:
        raise ValueError("at least one channel is required")
    mats = None
    for h, w in zip(channels, weights):
        if w < 0:
            raise ValueError(f"weights must be nonnegative, got {w}")
        h = np.asarray(h, dtype=complex)
        term = w * np.outer(h, h.conj())
        mats = term if mats is None else mats + term
    return mats


def solve_energy_covariance(weighted_matrix: np.ndarray, p_max: float) -> BeamformerSolution:
    """Optimal covariance under the power budget, with optimality certificate.

    The beam direction is the principal eigenvector of the (Hermitian)
    weighted channel matrix, phase-normalized so its largest-magnitude entry
    is real positive; the eigenpair residual is checked against 1e-10 times
    the matrix scale. A zero matrix falls back to the first standard basis
    direction with zero objective.
    """
    if p_max <= 0:
        raise ValueError(f"power budget must be positive, got {p_max}")
    a = np.asarray(weighted_matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"weighted matrix must be square, got shape {a.shape}")
    scale = np.abs(a).max()
    if scale == 0.0:
        direction = np.zeros(a.shape[0], dtype=complex)
        direction[0] = 1.0
        direction.setflags(write=False)
        return BeamformerSolution(direction, float(p_max), 0.0, 0.0)
    if np.abs(a - a.conj().T).max() > 1e-8 * scale:
        raise ValueError("weighted matrix is not Hermitian")

    hermitian = 0.5 * (a + a.conj().T)
    eigvals, eigvecs = np.linalg.eigh(hermitian)
    lam = float(eigvals[-1])
    v = eigvecs[:, -1]
    k = int(np.argmax(np.abs(v)))
    v = v * (v[k].conjugate() / abs(v[k]))
    v = v / np.linalg.norm(v)
    residual = np.linalg.norm(hermitian @ v - lam * v)
    if residual > _RESIDUAL_TOL * max(abs(lam), scale):
        raise ArithmeticError(
            f"eigenpair residual {residual:.3e} exceeds tolerance for scale {scale:.3e}"
        )
    objective = float(p_max * (np.vdot(v, hermitian @ v)).real)
    v.setflags(write=False)
    return BeamformerSolution(
        direction=v, power=float(p_max), objective=objective, certificate=lam
    )


def harvested_power(h_true: np.ndarray, solution: BeamformerSolution) -> float:
    """Instantaneous RF power collected by a receiver under the beam."""
    h = np.asarray(h_true, dtype=complex)
    if h.shape != solution.direction.shape:
        raise ValueError(
            f"channel shape {h.shape} does not match beam shape {solution.direction.shape}"
        )
    return float(solution.power * abs(np.vdot(h, solution.direction)) ** 2)


def average_harvested_power(
    h_true: np.ndarray,
    solution: BeamformerSolution,
    tau: int,
    n_ers: int,
    block_len: int,
) -> float:
    """Block-average harvested power after paying the sensing overhead.

    Charging runs for block_len - n_ers * tau of the block_len symbols; the
    tau = 0 case (no sensing, full block) is allowed.
    """
    if tau < 0:
        raise ValueError(f"slot length must be nonnegative, got {tau}")
    if n_ers < 1 or block_len < 1:
        raise ValueError("receiver count and block length must be positive")
    if n_ers * tau >= block_len:
        raise InfeasibleBlockError(
            f"sensing {n_ers} x {tau} symbols consumes the {block_len}-symbol block"
        )
    duty = (block_len - n_ers * tau) / block_len
    return duty * harvested_power(h_true, solution)


def isotropic_covariance(p_max: float, n_elements: int) -> np.ndarray:
    """Unfocused covariance that spreads the budget evenly: (P / N) I."""
    if p_max <= 0:
        raise ValueError(f"power budget must be positive, got {p_max}")
    if n_elements < 1:
        raise ValueError(f"element count must be positive, got {n_elements}")
    return (p_max / n_elements) * np.eye(n_elements)
