"""Batch driver: parameter sweeps, figure-reproduction datasets, and
machine-readable outputs.

Subcommands: qfi-sweep, stirap, protocol, threshold, source.  Every CSV file
starts with '#' comment lines recording the artifact version and the full
config; JSON outputs carry the same record in a "_meta" field.  Numbers are
written with 12 significant digits and LF line endings, so repeated runs with
the same config and seed are byte-identical (except for measured runtimes).

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from . import bounds as bounds_mod
from . import stirap as stirap_mod
from .channels import amplitude_damping, apply_iid_family, dephasing, depolarizing
from .codes import five_qubit_code, four_qubit_code, repetition_code
from .encoder import captured_protocol_state, multiphoton_discriminate, teleport_capture, vacuum_projection
from .metrology import adaptive_theta, local_measurement_fi, sld_and_qfi
from .recovery import CodespaceLeakageError, qec_pipeline
from .source import (
    SourceParams,
    conditioned_state,
    covariance_matrix,
    diagonalize_source,
    expected_diagonal_covariance,
    fock_expansion,
    rho_star,
    rho_star_family,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_AD_EPSILON = 1e-3  # internal weight for amplitude-damping rows; cancels per photon


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


@dataclass(frozen=True)
class SweepConfig:
    code: str
    channel: str
    gamma: float
    phi: float
    p_grid: tuple[float, ...]
    parameter: str
    qfi_mode: str
    seed: int

    def __post_init__(self):
        if self.parameter not in ("phi", "gamma"):
            raise ConfigError(f"parameter must be phi or gamma, got '{self.parameter}'")
        if self.qfi_mode not in ("averaged", "syndrome-resolved"):
            raise ConfigError(f"qfi_mode must be averaged or syndrome-resolved")
        if not self.p_grid:
            raise ConfigError("p_grid must be nonempty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ConfigError("p_grid values must lie in [0, 1]")
        if self.channel not in ("dephasing", "depolarizing", "amplitude-damping"):
            raise ConfigError(f"unknown channel '{self.channel}'")
        _resolve_code(self.code)
        if self.channel == "amplitude-damping" and self.code != "none":
            raise ConfigError("amplitude damping is modeled for the unencoded memory only")


def _resolve_code(name: str):
    if name == "none":
        return None
    if name == "four-qubit":
        return four_qubit_code()
    if name == "five-one-three":
        return five_qubit_code()
    if name.startswith("rep-"):
        try:
            n = int(name[4:])
        except ValueError:
            raise ConfigError(f"bad repetition code '{name}'") from None
        if not 1 <= n <= 6:
            raise ConfigError("repetition codes supported for 1 <= n <= 6")
        return repetition_code(n)
    raise ConfigError(f"unknown code '{name}'")


def _channel_factory(name: str):
    return {
        "dephasing": dephasing,
        "depolarizing": depolarizing,
        "amplitude-damping": amplitude_damping,
    }[name]


def _sweep_row(cfg: SweepConfig, p: float) -> tuple[float, float, float, float]:
    t0 = time.perf_counter()
    make_channel = _channel_factory(cfg.channel)
    channel = make_channel(p)
    theta = adaptive_theta(cfg.parameter, cfg.phi)

    if cfg.channel == "amplitude-damping":
        family = rho_star_family(
            SourceParams(epsilon=_AD_EPSILON, gamma=cfg.gamma, phi=cfg.phi)
        )
        noisy = apply_iid_family(family, channel, [0, 1])
        qfi = sld_and_qfi(noisy, cfg.parameter).qfi / _AD_EPSILON
        fi = local_measurement_fi(noisy, theta)[0 if cfg.parameter == "phi" else 1]
        fi /= _AD_EPSILON
        qfi_unprot = qfi
    else:
        params = SourceParams(epsilon=1e-3, gamma=cfg.gamma, phi=cfg.phi)
        family = conditioned_state(params)
        code = _resolve_code(cfg.code)
        unprot = apply_iid_family(family, channel, [0, 1])
        qfi_unprot = sld_and_qfi(unprot, cfg.parameter).qfi
        if code is None:
            noisy = unprot
            qfi = qfi_unprot
            averaged = noisy
        else:
            noisy = qec_pipeline(code, channel, family, qfi_mode=cfg.qfi_mode)
            qfi = sld_and_qfi(noisy, cfg.parameter).qfi
            averaged = (
                noisy
                if cfg.qfi_mode == "averaged"
                else qec_pipeline(code, channel, family, qfi_mode="averaged")
            )
        fi = local_measurement_fi(averaged, theta)[0 if cfg.parameter == "phi" else 1]
    runtime_ms = (time.perf_counter() - t0) * 1e3
    return qfi, qfi_unprot, fi, runtime_ms


def run_qfi_sweep(cfg: SweepConfig, jobs: int = 1) -> list[str]:
    """CSV lines for one sweep; rows ordered by grid index."""
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    lines = [
        f"# starqec {__version__} qfi-sweep",
        f"# config: {json.dumps(asdict(cfg), sort_keys=True)}",
        "p,qfi,qfi_unprotected,fi_local_at_adaptive_theta,runtime_ms",
    ]
    if jobs == 1:
        rows = [_sweep_row(cfg, p) for p in cfg.p_grid]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda p: _sweep_row(cfg, p), cfg.p_grid))
    for p, (qfi, unprot, fi, ms) in zip(cfg.p_grid, rows):
        lines.append(
            ",".join([_fmt(p), _fmt(qfi), _fmt(unprot), _fmt(fi), f"{ms:.3f}"])
        )
    return lines


def run_stirap(
    total_time: float,
    sector: int,
    optimize: bool,
    seed: int,
    points: int,
) -> list[str]:
    if optimize:
        opt = stirap_mod.optimize_pulse(total_time, objective_n=1, seed=seed)
        if not opt.converged:
            raise stirap_mod.PropagationError(
                f"pulse optimization did not reach target (best {opt.objective:.4f})"
            )
        schedule = opt.schedule
    else:
        schedule = stirap_mod.default_schedule(total_time)
    schedule.validate_profile()
    traj = stirap_mod.propagate(schedule, sector, np.array([0, 0, 1.0]), num_points=points)
    cfg = {
        "total_time": total_time,
        "sector": sector,
        "optimize": optimize,
        "seed": seed,
        "points": points,
        "schedule": asdict(schedule),
    }
    lines = [
        f"# starqec {__version__} stirap",
        f"# config: {json.dumps(cfg, sort_keys=True)}",
        "t,omega,delta,pop_0R,pop_e,pop_1R",
    ]
    for i, t in enumerate(traj.times):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    t,
                    schedule.omega(t),
                    schedule.delta(t),
                    traj.populations[i, 2],
                    traj.populations[i, 1],
                    traj.populations[i, 0],
                )
            )
        )
    return lines


def run_threshold(n_grid, p_grid, distance_rate: float) -> list[str]:
    lines = [
        f"# starqec {__version__} threshold",
        f"# config: {json.dumps({'n_grid': list(n_grid), 'p_grid': list(p_grid), 'distance_rate': distance_rate}, sort_keys=True)}",
        f"# gv_threshold: {_fmt(bounds_mod.gv_threshold())} ({bounds_mod.gv_threshold_display()})",
        "n,d,p,chernoff_bound,exact_tail",
    ]
    for n in n_grid:
        d = distance_rate * n
        for p in p_grid:
            exact = bounds_mod.exact_fail_probability(n, d, p)
            try:
                ch = _fmt(bounds_mod.chernoff_fail_bound(n, d, p).bound)
            except bounds_mod.VacuousBoundError:
                ch = "nan"
            lines.append(f"{n},{_fmt(d)},{_fmt(p)},{ch},{_fmt(exact)}")
    return lines


def run_protocol(epsilons, gamma: float, phi: float, delta: float) -> dict:
    entries = []
    for eps in epsilons:
        params = SourceParams(epsilon=eps, gamma=gamma, phi=phi)
        captured = teleport_capture(rho_star(params))
        proj = vacuum_projection(captured)
        cond = proj.conditioned
        qfi_phi = None
        model_distance = None
        if cond is not None:
            fam = conditioned_state(params)
            model_distance = float(np.max(np.abs(cond.matrix - fam.state.matrix)))
            qfi_phi = sld_and_qfi(fam, "phi").qfi
        outcomes = multiphoton_discriminate(captured_protocol_state(params, delta=delta))
        entries.append(
            {
                "epsilon": eps,
                "accept_probability": proj.accept_probability,
                "reject_probability": proj.reject_probability,
                "conditioned_qfi_phi_per_photon": qfi_phi,
                "conditioned_model_distance": model_distance,
                "discrimination": {
                    o.tag: o.probability for o in outcomes
                },
            }
        )
    return {
        "_meta": {
            "artifact": f"starqec {__version__}",
            "command": "protocol",
            "config": {"epsilons": list(epsilons), "gamma": gamma, "phi": phi, "delta": delta},
        },
        "results": entries,
    }


def run_source(epsilon: float, gamma: float, phi: float) -> dict:
    params = SourceParams(epsilon=epsilon, gamma=gamma, phi=phi)
    dec = fock_expansion(params)
    sigma = covariance_matrix(params)
    _, sigma_diag = diagonalize_source(params)
    resid = float(np.max(np.abs(sigma_diag - expected_diagonal_covariance(params))))
    return {
        "_meta": {
            "artifact": f"starqec {__version__}",
            "command": "source",
            "config": {"epsilon": epsilon, "gamma": gamma, "phi": phi},
        },
        "p00": dec.p00,
        "one_photon": {
            "weight": dec.one_photon.weight,
            "psi_plus": dec.one_photon.weight_plus,
            "psi_minus": dec.one_photon.weight_minus,
        },
        "two_photon": {
            "weight": dec.two_photon.weight,
            "sym0": dec.two_photon.weight_sym0,
            "plus": dec.two_photon.weight_plus,
            "minus": dec.two_photon.weight_minus,
        },
        "occupations": {"n_a": dec.n_a, "n_b": dec.n_b},
        "total_weight": dec.total_weight,
        "covariance": [[[float(z.real), float(z.imag)] for z in row] for row in sigma],
        "diagonalization_residual": resid,
    }


def _write(out_path: str | None, text: str) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(text)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise ConfigError(f"bad grid '{text}'") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="starqec", description=__doc__)
    ap.add_argument("--version", action="version", version=f"starqec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("qfi-sweep", help="QFI versus noise strength for a code/channel pair")
    sweep.add_argument("--config", help="JSON config file; command line wins")
    sweep.add_argument("--out", help="output CSV path (default stdout)")
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--qfi-mode", choices=["averaged", "syndrome-resolved"], default=None)
    sweep.add_argument("--code", default=None,
                       help="none | rep-N | four-qubit | five-one-three")
    sweep.add_argument("--channel", default=None,
                       choices=["dephasing", "depolarizing", "amplitude-damping"])
    sweep.add_argument("--gamma", type=float, default=None)
    sweep.add_argument("--phi", type=float, default=None)
    sweep.add_argument("--p-grid", default=None, help="comma-separated noise strengths")
    sweep.add_argument("--parameter", choices=["phi", "gamma"], default=None)

    st = sub.add_parser("stirap", help="population-transfer trajectory CSV")
    st.add_argument("--out", default=None)
    st.add_argument("--total-time", type=float, default=50.0)
    st.add_argument("--sector", type=int, default=1)
    st.add_argument("--optimize", action="store_true",
                    help="run the pulse optimizer instead of the default profile")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--points", type=int, default=1001)

    pr = sub.add_parser("protocol", help="capture/projection/discrimination table JSON")
    pr.add_argument("--out", default=None)
    pr.add_argument("--epsilon-grid", default="0.001")
    pr.add_argument("--gamma", type=float, default=0.5)
    pr.add_argument("--phi", type=float, default=0.0)
    pr.add_argument("--delta", type=float, default=0.0,
                    help="dispersive phase on the doubly-occupied component")

    th = sub.add_parser("threshold", help="Chernoff bound versus exact binomial tail CSV")
    th.add_argument("--out", default=None)
    th.add_argument("--n-grid", default="100,1000")
    th.add_argument("--p-grid", default="0.02,0.04,0.06,0.08")
    th.add_argument("--distance-rate", type=float, default=bounds_mod.GV_DISTANCE_RATE)

    so = sub.add_parser("source", help="source decomposition JSON")
    so.add_argument("--out", default=None)
    so.add_argument("--epsilon", type=float, default=0.001)
    so.add_argument("--gamma", type=float, default=0.5)
    so.add_argument("--phi", type=float, default=0.0)
    return ap


_SWEEP_DEFAULTS = {
    "code": "none",
    "channel": "dephasing",
    "gamma": 0.95,
    "phi": 0.0,
    "p_grid": (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5),
    "parameter": "phi",
    "qfi_mode": "averaged",
    "seed": 0,
}


def _sweep_config_from_args(args) -> SweepConfig:
    cfg = dict(_SWEEP_DEFAULTS)
    file_cfg = _load_config(args.config)
    unknown = set(file_cfg) - set(cfg)
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    cfg.update(file_cfg)
    overrides = {
        "code": args.code,
        "channel": args.channel,
        "gamma": args.gamma,
        "phi": args.phi,
        "p_grid": _parse_grid(args.p_grid) if args.p_grid is not None else None,
        "parameter": args.parameter,
        "qfi_mode": args.qfi_mode,
        "seed": args.seed,
    }
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    cfg["p_grid"] = tuple(float(p) for p in cfg["p_grid"])
    try:
        return SweepConfig(**cfg)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "qfi-sweep":
            cfg = _sweep_config_from_args(args)
            lines = run_qfi_sweep(cfg, jobs=args.jobs)
            _write(args.out, "\n".join(lines) + "\n")
        elif args.command == "stirap":
            lines = run_stirap(
                args.total_time, args.sector, args.optimize, args.seed, args.points
            )
            _write(args.out, "\n".join(lines) + "\n")
        elif args.command == "protocol":
            doc = run_protocol(
                _parse_grid(args.epsilon_grid), args.gamma, args.phi, args.delta
            )
            _write(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        elif args.command == "threshold":
            n_grid = tuple(int(v) for v in _parse_grid(args.n_grid))
            lines = run_threshold(n_grid, _parse_grid(args.p_grid), args.distance_rate)
            _write(args.out, "\n".join(lines) + "\n")
        elif args.command == "source":
            doc = run_source(args.epsilon, args.gamma, args.phi)
            _write(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    except (
        CodespaceLeakageError,
        stirap_mod.PropagationError,
        stirap_mod.TransferFidelityError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
