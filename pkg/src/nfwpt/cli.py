"""Command-line front end for the simulation harness."""

from __future__ import annotations

import argparse
from dataclasses import replace
from itertools import product

import numpy as np

from .channel import ErState, VisibilityRegion
from .crb import crb_position, fim, min_sensing_duration
from .echo import uniform_probe
from .geometry import build_upa
from .harness import (
    SCHEMES,
    ScenarioConfig,
    default_config,
    load_config,
    rows_to_csv,
    simulate,
    sweep_beta,
    sweep_gamma,
    sweep_pmax,
    write_csv,
)

_DEFAULT_POWER_GRID = "0.1,0.31622776601683794,1.0,3.1622776601683795"
_DEFAULT_WEIGHT_GRID = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", default=None, help="JSON scenario file (built-in scenario when omitted)"
    )
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument("--trials", type=int, default=None, help="override the trial budget")
    parser.add_argument("--out", default=None, help="write results as CSV to this path")
    parser.add_argument("--scheme", choices=SCHEMES, default=None, help="override the scheme")


def _resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else default_config()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.scheme is not None:
        overrides["scheme"] = args.scheme
    return replace(cfg, **overrides) if overrides else cfg


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise SystemExit(f"could not parse grid {text!r}: {exc}")


def _planning_inputs(cfg: ScenarioConfig):
    """Geometry, probe, and per-receiver planning priors for CRB reporting.

    Receivers without a pinned visibility region are planned with the full
    aperture visible.
    """
    geom = build_upa(cfg.array.n_y, cfg.array.n_z, cfg.array.carrier_freq, cfg.array.spacing)
    probe = uniform_probe(geom, cfg.p_max)
    full = VisibilityRegion(1, geom.n_elements)
    priors = [
        (
            np.asarray(spec.prior_position),
            VisibilityRegion(*spec.vr) if spec.vr is not None else full,
            abs(spec.reflection),
        )
        for spec in cfg.ers
    ]
    bounds = np.asarray([spec.error_bounds for spec in cfg.ers])
    return geom, probe, priors, bounds


def _crb1_at(geom, probe, noise_power, position, vr, refl) -> float:
    state = ErState(position=position, vr=vr, reflection=refl)
    return crb_position(fim(geom, state, probe, 1, noise_power)).crb_total


def _crb1_extremes(cfg: ScenarioConfig) -> list[tuple[float, float]]:
    """Per receiver: (nominal, worst-over-lattice) planning CRB at tau = 1."""
    geom, probe, priors, bounds = _planning_inputs(cfg)
    out = []
    for (position, vr, refl), dvec in zip(priors, bounds):
        nominal = _crb1_at(geom, probe, cfg.noise_power, position, vr, refl)
        worst = nominal
        for off in product(*[(-d, 0.0, d) for d in dvec]):
            worst = max(
                worst,
                _crb1_at(geom, probe, cfg.noise_power, position + np.asarray(off), vr, refl),
            )
        out.append((nominal, worst))
    return out


def _default_gamma_grid(cfg: ScenarioConfig) -> list[float]:
    """Log grid around the worst planning CRB.

    Spans targets loose enough that one symbol suffices down to targets that
    nearly exhaust the block, so the duty-cycle trade-off is visible.
    """
    worst = max(w for _, w in _crb1_extremes(cfg))
    return list(worst * np.logspace(-1.95, 0.5, 8))


def _emit(rows, out_path) -> None:
    text = rows_to_csv(rows)
    if out_path:
        write_csv(out_path, rows)
    print(text, end="")


def _report_crb(cfg: ScenarioConfig) -> None:
    geom, probe, priors, bounds = _planning_inputs(cfg)
    for idx, ((nominal, worst), (_, vr, _)) in enumerate(zip(_crb1_extremes(cfg), priors), 1):
        print(
            f"er{idx}: crb1_nominal_m2={nominal:.12e} crb1_worst_m2={worst:.12e} "
            f"vr=[{vr.start},{vr.end}]"
        )
    tau = min_sensing_duration(
        geom, priors, bounds, cfg.gamma, cfg.block_len, probe, cfg.noise_power
    )
    print(f"gamma_m2={cfg.gamma:.12e} tau_star={tau} block_len={cfg.block_len}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nfwpt",
        description="Two-stage sensing-assisted near-field power transfer simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scheme and print its aggregates")
    _add_common(p_sim)

    p_gamma = sub.add_parser("sweep-gamma", help="sweep the sensing accuracy target")
    _add_common(p_gamma)
    p_gamma.add_argument(
        "--grid",
        default=None,
        help="comma-separated gamma values in m^2 (default: three decades around the planning CRB)",
    )

    p_power = sub.add_parser("sweep-power", help="sweep the power budget over all schemes")
    _add_common(p_power)
    p_power.add_argument(
        "--grid",
        default=_DEFAULT_POWER_GRID,
        help="comma-separated budgets in watts (default: 20 to 35 dBm)",
    )

    p_weight = sub.add_parser("sweep-weight", help="sweep the second receiver's weight")
    _add_common(p_weight)
    p_weight.add_argument(
        "--grid",
        default=_DEFAULT_WEIGHT_GRID,
        help="comma-separated weights in [0, 1] for the second receiver",
    )

    p_crb = sub.add_parser("crb", help="report the planning CRB and slot length")
    _add_common(p_crb)

    args = parser.parse_args(argv)
    cfg = _resolve_config(args)

    if args.command == "simulate":
        _emit([simulate(cfg)], args.out)
    elif args.command == "sweep-gamma":
        grid = _parse_grid(args.grid) if args.grid else _default_gamma_grid(cfg)
        _emit(sweep_gamma(cfg, grid), args.out)
    elif args.command == "sweep-power":
        _emit(sweep_pmax(cfg, _parse_grid(args.grid)), args.out)
    elif args.command == "sweep-weight":
        _emit(sweep_beta(cfg, _parse_grid(args.grid)), args.out)
    elif args.command == "crb":
        _report_crb(cfg)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
