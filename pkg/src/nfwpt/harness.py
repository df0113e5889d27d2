"""Monte Carlo harness: scenario configuration, benchmark schemes, sweeps, CSV.

Each trial draws ground truth around the configured priors, runs one scheme
over a single transmission block, and scores the average harvested power per
receiver. Schemes:

    proposed     two-stage design: planned sensing slots, region
                 identification, localization, then focused charging
    perfect_csi  genie channels, no sensing overhead (upper bound)
    isotropic    unfocused covariance (P / N) I over the whole block
    equal_time   two-stage pipeline with half the block spent sensing
    no_vr        two-stage pipeline that never identifies regions and
                 models the full aperture as visible

Per-trial randomness derives from SeedSequence((master_seed, trial_index)),
so every result is reproducible from the config alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .beamform import (
    average_harvested_power,
    solve_energy_covariance,
    weighted_channel_matrix,
)
from .channel import (
    ErState,
    VisibilityRegion,
    channel,
    min_vr_span,
    steering_vector,
    vr_cover,
)
from .crb import min_sensing_duration
from .echo import aggregate, simulate_echo, uniform_probe
from .errors import InfeasibleBlockError
from .geometry import UpaGeometry, build_upa
from .localize import locate_er
from .visibility import estimate_power_levels, identify_vr, scaling_factor

SCHEMES = ("proposed", "perfect_csi", "isotropic", "equal_time", "no_vr")

# Accuracy target (m^2) sized so the planned slot stays in the single digits
# at the default 1 W budget while leaving most of the block for power
# transfer down to 0.1 W.
DEFAULT_GAMMA = 4e4

_SENSING_SCHEMES = ("proposed", "equal_time", "no_vr")
_PLANNED_SCHEMES = ("proposed", "no_vr")


@dataclass(frozen=True)
class ArraySpec:
    """Transmitter array block of the scenario configuration."""

    n_y: int = 16
    n_z: int = 16
    carrier_freq: float = 28e9
    spacing: float | None = None

    def __post_init__(self) -> None:
        if self.n_y < 1 or self.n_z < 1:
            raise ValueError(f"array dimensions must be positive, got {self.n_y}x{self.n_z}")
        if self.carrier_freq <= 0:
            raise ValueError(f"carrier frequency must be positive, got {self.carrier_freq}")
        if self.spacing is not None and self.spacing <= 0:
            raise ValueError(f"element spacing must be positive, got {self.spacing}")

    @property
    def n_elements(self) -> int:
        return self.n_y * self.n_z


@dataclass(frozen=True)
class ErSpec:
    """One receiver's prior knowledge and ground-truth distribution.

    reflection given as a real number is a magnitude whose phase is drawn
    uniformly per trial; a complex value pins the coefficient exactly. The
    default magnitude corresponds to a device-scale radar cross section of
    roughly 0.02 square meters at 28 GHz. vr given as (start, end) pins the
    visibility region instead of drawing it.
    """

    prior_position: tuple[float, float, float]
    error_bounds: tuple[float, float, float] = (0.15, 0.15, 0.15)
    weight: float = 1.0
    reflection: complex | float = 50.0
    vr: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        pos = tuple(float(v) for v in self.prior_position)
        if len(pos) != 3:
            raise ValueError(f"prior position must have 3 coordinates, got {len(pos)}")
        object.__setattr__(self, "prior_position", pos)
        bounds = tuple(float(v) for v in self.error_bounds)
        if len(bounds) != 3 or any(v < 0 for v in bounds):
            raise ValueError(f"error bounds must be 3 nonnegative values, got {self.error_bounds}")
        object.__setattr__(self, "error_bounds", bounds)
        if self.weight < 0:
            raise ValueError(f"weight must be nonnegative, got {self.weight}")
        if abs(self.reflection) == 0:
            raise ValueError("reflection coefficient must be nonzero")
        if self.vr is not None:
            start, end = self.vr
            object.__setattr__(self, "vr", (int(start), int(end)))
            VisibilityRegion(int(start), int(end))


def _default_ers() -> tuple[ErSpec, ...]:
    return (
        ErSpec(prior_position=(1.0, 2.0, 3.0), weight=0.1),
        ErSpec(prior_position=(1.5, 3.0, 4.5), weight=0.9),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Full scenario: array, receivers, budgets, and harness settings."""

    array: ArraySpec = field(default_factory=ArraySpec)
    ers: tuple[ErSpec, ...] = field(default_factory=_default_ers)
    noise_power: float = 1e-15
    p_max: float = 1.0
    block_len: int = 200
    eta: float = 0.25
    n_alpha: int = 32
    gamma: float = DEFAULT_GAMMA
    trials: int = 100
    master_seed: int = 0
    scheme: str = "proposed"

    def __post_init__(self) -> None:
        object.__setattr__(self, "ers", tuple(self.ers))
        if not self.ers:
            raise ValueError("at least one receiver is required")
        if self.noise_power <= 0:
            raise ValueError(f"noise power must be positive, got {self.noise_power}")
        if self.p_max <= 0:
            raise ValueError(f"power budget must be positive, got {self.p_max}")
        if self.block_len < 1:
            raise ValueError(f"block length must be >= 1, got {self.block_len}")
        if not 0 < self.eta < 1:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        n = self.array.n_elements
        if not 1 <= self.n_alpha <= n // 2:
            raise ValueError(
                f"n_alpha must lie in 1..{n // 2} for {n} elements, got {self.n_alpha}"
            )
        if self.gamma <= 0:
            raise ValueError(f"accuracy target must be positive, got {self.gamma}")
        if self.trials < 1:
            raise ValueError(f"trial count must be >= 1, got {self.trials}")
        if self.master_seed < 0:
            raise ValueError(f"master seed must be nonnegative, got {self.master_seed}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        needs_draw = any(spec.vr is None for spec in self.ers)
        if needs_draw and n - self.n_alpha < min_vr_span(n, self.eta) + 1:
            raise ValueError(
                "visibility draw infeasible: the minimal region size exceeds "
                f"{n} - n_alpha = {n - self.n_alpha} elements"
            )
        for spec in self.ers:
            if spec.vr is not None and spec.vr[1] > n:
                raise ValueError(
                    f"fixed visibility region {spec.vr} exceeds array size {n}"
                )


def default_config() -> ScenarioConfig:
    """The built-in evaluation scenario."""
    return ScenarioConfig()


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one transmission block under one scheme."""

    powers: tuple[float, ...]
    tau_used: int
    vr_hit: bool
    pos_errors: tuple[float, ...]
    seed: tuple[int, int]


@dataclass(frozen=True)
class SweepRow:
    """Aggregates of one (sweep value, scheme) cell over the trial budget."""

    sweep_value: float
    scheme: str
    tau_mean: float
    duty_factor: float
    powers: tuple[float, ...]
    vr_hit_rate: float
    pos_rmse: float


def _draw_vr(n: int, eta: float, n_alpha: int, rng: np.random.Generator) -> VisibilityRegion:
    """Random contiguous region: minimal size plus geometric slack, capped so
    the order-statistic level split always sees both sides."""
    span = min_vr_span(n, eta)
    min_size = span + 1
    max_size = n - n_alpha
    if max_size < min_size:
        raise ValueError(
            f"visibility draw infeasible: need size {min_size} but at most {max_size}"
        )
    slack = int(rng.geometric(1.0 / (1.0 + span))) - 1
    size = min(min_size + slack, max_size)
    start = int(rng.integers(1, n - size + 1, endpoint=True))
    return VisibilityRegion(start, start + size - 1)


def _draw_scene(
    cfg: ScenarioConfig, geom: UpaGeometry, rng: np.random.Generator
) -> list[ErState]:
    states = []
    for spec in cfg.ers:
        prior = np.asarray(spec.prior_position)
        bounds = np.asarray(spec.error_bounds)
        position = prior + rng.uniform(-bounds, bounds)
        if spec.vr is not None:
            vr = VisibilityRegion(*spec.vr)
        else:
            vr = _draw_vr(geom.n_elements, cfg.eta, cfg.n_alpha, rng)
        if isinstance(spec.reflection, complex):
            b = spec.reflection
        else:
            b = float(spec.reflection) * np.exp(2j * np.pi * rng.uniform())
        states.append(ErState(position=position, vr=vr, reflection=b, weight=spec.weight))
    return states


def run_trial(cfg: ScenarioConfig, trial_index: int) -> TrialResult:
    """Simulate one transmission block and score the configured scheme."""
    if trial_index < 0:
        raise ValueError(f"trial index must be nonnegative, got {trial_index}")
    geom = build_upa(cfg.array.n_y, cfg.array.n_z, cfg.array.carrier_freq, cfg.array.spacing)
    n = geom.n_elements
    n_ers = len(cfg.ers)
    seed = (cfg.master_seed, trial_index)
    streams = np.random.SeedSequence(seed).spawn(1 + n_ers)
    scene = _draw_scene(cfg, geom, np.random.default_rng(streams[0]))
    true_channels = [channel(geom, er) for er in scene]
    weights = [er.weight for er in scene]
    block_len = cfg.block_len

    if cfg.scheme == "isotropic":
        powers = tuple(
            (cfg.p_max / n) * np.vdot(h, h).real for h in true_channels
        )
        return TrialResult(powers, 0, False, (math.nan,) * n_ers, seed)

    if cfg.scheme == "perfect_csi":
        solution = solve_energy_covariance(
            weighted_channel_matrix(true_channels, weights), cfg.p_max
        )
        powers = tuple(
            average_harvested_power(h, solution, 0, n_ers, block_len)
            for h in true_channels
        )
        return TrialResult(powers, 0, True, (0.0,) * n_ers, seed)

    # Sensing schemes: pick the slot length, then probe each receiver in turn.
    full_aperture = VisibilityRegion(1, n)
    probe = uniform_probe(geom, cfg.p_max)
    if cfg.scheme == "equal_time":
        tau = block_len // (2 * n_ers)
        if tau < 1:
            raise InfeasibleBlockError(
                f"block of {block_len} symbols cannot host {n_ers} half-block sensing slots"
            )
    else:
        # Planning runs before this block's sensing, so the region prior is
        # the configured one when pinned and the full aperture otherwise;
        # no_vr ignores region knowledge entirely.
        priors = [
            (
                spec.prior_position,
                VisibilityRegion(*spec.vr)
                if cfg.scheme == "proposed" and spec.vr is not None
                else full_aperture,
                abs(spec.reflection),
            )
            for spec in cfg.ers
        ]
        bounds = np.asarray([spec.error_bounds for spec in cfg.ers])
        tau = min_sensing_duration(
            geom, priors, bounds, cfg.gamma, block_len, probe, cfg.noise_power
        )

    identify = cfg.scheme != "no_vr"
    est_channels = []
    hits = []
    errors = []
    for idx, (er, spec) in enumerate(zip(scene, cfg.ers)):
        rng = np.random.default_rng(streams[1 + idx])
        batch = simulate_echo(
            true_channels[idx], er.reflection, probe, tau, cfg.noise_power, rng
        )
        y_bar = aggregate(batch)
        if identify:
            p_out, p_in = estimate_power_levels(y_bar, cfg.n_alpha)
            alpha = scaling_factor(p_out, p_in)
            vr_hat = identify_vr(y_bar, cfg.eta, alpha)
        else:
            vr_hat = full_aperture
        prior = np.asarray(spec.prior_position)
        reach = 2.0 * np.asarray(spec.error_bounds)
        loc = locate_er(
            geom, y_bar, vr_hat, (prior - reach, prior + reach), probe, tau
        )
        est_channels.append(
            steering_vector(geom, loc.position_hat) * vr_cover(vr_hat, n)
        )
        hits.append(vr_hat == er.vr)
        errors.append(float(np.linalg.norm(loc.position_hat - er.position)))

    solution = solve_energy_covariance(
        weighted_channel_matrix(est_channels, weights), cfg.p_max
    )
    powers = tuple(
        average_harvested_power(h, solution, tau, n_ers, block_len)
        for h in true_channels
    )
    return TrialResult(powers, int(tau), all(hits), tuple(errors), seed)


def run_trials(cfg: ScenarioConfig) -> list[TrialResult]:
    """Run the configured trial budget sequentially (deterministic order)."""
    return [run_trial(cfg, i) for i in range(cfg.trials)]


def summarize(cfg: ScenarioConfig, results: list[TrialResult], sweep_value: float) -> SweepRow:
    """Aggregate trial results into one sweep row."""
    if not results:
        raise ValueError("cannot summarize zero trials")
    n_ers = len(cfg.ers)
    taus = np.array([r.tau_used for r in results], dtype=float)
    duty = float(np.mean((cfg.block_len - n_ers * taus) / cfg.block_len))
    powers = tuple(
        float(np.mean([r.powers[j] for r in results])) for j in range(n_ers)
    )
    hit_rate = float(np.mean([r.vr_hit for r in results]))
    squared = np.array([e for r in results for e in r.pos_errors]) ** 2
    return SweepRow(
        sweep_value=float(sweep_value),
        scheme=cfg.scheme,
        tau_mean=float(taus.mean()),
        duty_factor=duty,
        powers=powers,
        vr_hit_rate=hit_rate,
        pos_rmse=float(np.sqrt(squared.mean())),
    )


def simulate(cfg: ScenarioConfig) -> SweepRow:
    """Run one scheme at the configured settings and aggregate."""
    return summarize(cfg, run_trials(cfg), sweep_value=cfg.gamma)


def sweep_gamma(cfg: ScenarioConfig, gamma_grid) -> list[SweepRow]:
    """Sweep the accuracy target for the configured scheme."""
    grid = [float(g) for g in gamma_grid]
    if not grid or any(g <= 0 for g in grid):
        raise ValueError(f"gamma grid must be nonempty and positive, got {gamma_grid}")
    rows = []
    for g in grid:
        sub = replace(cfg, gamma=g)
        rows.append(summarize(sub, run_trials(sub), sweep_value=g))
    return rows


def sweep_pmax(cfg: ScenarioConfig, pmax_grid) -> list[SweepRow]:
    """Sweep the power budget across all schemes."""
    grid = [float(p) for p in pmax_grid]
    if not grid or any(p <= 0 for p in grid):
        raise ValueError(f"power grid must be nonempty and positive, got {pmax_grid}")
    rows = []
    for p in grid:
        for scheme in SCHEMES:
            sub = replace(cfg, p_max=p, scheme=scheme)
            rows.append(summarize(sub, run_trials(sub), sweep_value=p))
    return rows


def sweep_beta(cfg: ScenarioConfig, beta2_grid) -> list[SweepRow]:
    """Sweep the second receiver's weight (the first gets the complement)."""
    if len(cfg.ers) != 2:
        raise ValueError(
            f"the weight sweep requires exactly two receivers, got {len(cfg.ers)}"
        )
    grid = [float(b) for b in beta2_grid]
    if not grid or any(not 0 <= b <= 1 for b in grid):
        raise ValueError(f"weight grid must lie in [0, 1], got {beta2_grid}")
    rows = []
    for b2 in grid:
        ers = (
            replace(cfg.ers[0], weight=1.0 - b2),
            replace(cfg.ers[1], weight=b2),
        )
        sub = replace(cfg, ers=ers)
        rows.append(summarize(sub, run_trials(sub), sweep_value=b2))
    return rows


# --- configuration files and CSV output ------------------------------------

_ARRAY_KEYS = {"n_y", "n_z", "carrier_freq", "spacing"}
_ER_KEYS = {"prior_position", "error_bounds", "weight", "reflection", "vr"}
_CONFIG_KEYS = {
    "array",
    "ers",
    "noise_power",
    "p_max",
    "block_len",
    "eta",
    "n_alpha",
    "gamma",
    "trials",
    "master_seed",
    "scheme",
}


def _reject_unknown(data: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown {where} keys: {', '.join(unknown)}")


def _er_from_dict(data: dict) -> ErSpec:
    _reject_unknown(data, _ER_KEYS, "receiver")
    if "prior_position" not in data:
        raise ValueError("receiver entry is missing prior_position")
    kwargs = dict(data)
    refl = kwargs.get("reflection")
    if isinstance(refl, (list, tuple)):
        if len(refl) != 2:
            raise ValueError(f"reflection must be a number or [re, im], got {refl}")
        kwargs["reflection"] = complex(float(refl[0]), float(refl[1]))
    vr = kwargs.get("vr")
    if vr is not None:
        kwargs["vr"] = (int(vr[0]), int(vr[1]))
    kwargs["prior_position"] = tuple(kwargs["prior_position"])
    if "error_bounds" in kwargs:
        kwargs["error_bounds"] = tuple(kwargs["error_bounds"])
    return ErSpec(**kwargs)


def config_from_dict(data: dict) -> ScenarioConfig:
    """Build a config from parsed JSON, rejecting unknown keys at every level."""
    if not isinstance(data, dict):
        raise ValueError(f"config root must be an object, got {type(data).__name__}")
    _reject_unknown(data, _CONFIG_KEYS, "config")
    kwargs = dict(data)
    if "array" in kwargs:
        array = kwargs["array"]
        _reject_unknown(array, _ARRAY_KEYS, "array")
        kwargs["array"] = ArraySpec(**array)
    if "ers" in kwargs:
        kwargs["ers"] = tuple(_er_from_dict(er) for er in kwargs["ers"])
    return ScenarioConfig(**kwargs)


def load_config(path) -> ScenarioConfig:
    """Load a scenario from a JSON file."""
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def csv_header(n_ers: int) -> str:
    power_cols = ",".join(f"power_er{j + 1}_watts" for j in range(n_ers))
    return f"sweep_value,scheme,tau_mean,duty_factor,{power_cols},vr_hit_rate,pos_rmse_m"


def _fmt(value: float) -> str:
    return f"{value:.12e}"


def rows_to_csv(rows: list[SweepRow]) -> str:
    """Render sweep rows to CSV text with 13 significant digits per float."""
    if not rows:
        raise ValueError("cannot render zero rows")
    n_ers = len(rows[0].powers)
    if any(len(r.powers) != n_ers for r in rows):
        raise ValueError("all rows must report the same receiver count")
    lines = [csv_header(n_ers)]
    for r in rows:
        cells = [
            _fmt(r.sweep_value),
            r.scheme,
            _fmt(r.tau_mean),
            _fmt(r.duty_factor),
            *(_fmt(p) for p in r.powers),
            _fmt(r.vr_hit_rate),
            _fmt(r.pos_rmse),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_csv(path, rows: list[SweepRow]) -> None:
    """Write sweep rows to a CSV file with LF newlines regardless of platform."""
    Path(path).write_text(rows_to_csv(rows), newline="\n")
