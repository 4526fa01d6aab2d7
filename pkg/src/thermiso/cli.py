"""Command-line interface.

Subcommands
-----------
spectrum   probe-detuning sweep -> alpha/T/IR/IL table (CSV/JSON)
sweep      same pipeline over omega_a, theta, or temperature
validate   reduced-model vs full five-level absorption at v = 0
optimize   constrained IR/IL trade-off search over {theta, T, omega_a}
bandwidth  qualifying-interval extraction from a spectrum

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 infeasible optimization.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time

import numpy as np

from . import config as cfg
from . import observables
from .errors import ConfigError, SimulationError
from .fulldm import FiveLevelProblem, alpha_tilde, five_level_steady_state
from .observables import (bandwidth as extract_bandwidth, compute_spectrum,
                          evaluate_point, tradeoff_search)
from .reduced import reduce as reduce_point
from .reduced import rho55_closed_form

log = logging.getLogger("thermiso")

_SWEEP_COLUMN = {"delta_p": ("delta_p_mhz", 1e-6),
                 "omega_a": ("omega_a_mhz", 1e-6),
                 "theta": ("theta_deg", 1.0),
                 "temperature": ("temperature_k", 1.0)}


# ----------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermiso",
        description="Direction-dependent probe absorption and optical "
                    "isolation in thermal multi-level vapors")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="path to an INI run configuration")
        src.add_argument("--preset", help="name of a shipped preset")
        p.add_argument("--out", help="output file stem (default: stdout CSV)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--quad-nodes", type=int, help="override base node count")
        p.add_argument("--quad-span", type=float, help="override span in v_p")
        p.add_argument("--quad-tol", type=float, help="override adaptive tolerance")
        p.add_argument("--quad-scheme", choices=("dense-trapezoid", "adaptive"),
                       help="override quadrature scheme")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--plot", action="store_true",
                       help="also render a PNG next to the output file")
        p.add_argument("--verify", action="store_true",
                       help="re-run one random output row and compare")
        return p

    common(sub.add_parser("spectrum", help="probe-detuning spectrum"))
    common(sub.add_parser("sweep", help="generic single-variable sweep"))
    common(sub.add_parser("validate", help="reduced vs full model at v=0"))

    opt = common(sub.add_parser("optimize", help="IR/IL trade-off search"))
    opt.add_argument("--il-max", type=float, help="override IL budget in dB")

    bwd = common(sub.add_parser("bandwidth", help="qualifying bandwidth"))
    bwd.add_argument("--ir-min", type=float, default=20.0)
    bwd.add_argument("--il-max", type=float, default=1.0)
    return parser


def _load_runconfig(args) -> cfg.RunConfig:
    if args.preset:
        run = cfg.load_preset(args.preset)
    else:
        run = cfg.load_config(args.config)
    quad = run.quad
    updates = {}
    if args.quad_nodes is not None:
        updates["nodes"] = args.quad_nodes
    if args.quad_span is not None:
        updates["span"] = args.quad_span
    if args.quad_tol is not None:
        updates["rel_tol"] = args.quad_tol
    if getattr(args, "quad_scheme", None):
        updates["scheme"] = args.quad_scheme
    if updates:
        from dataclasses import replace
        run.quad = replace(quad, **updates)
    return run


# ----------------------------------------------------------------------
# output helpers

def _header_lines(run: cfg.RunConfig) -> list[str]:
    quad = run.quad
    return [
        f"# config_hash = {run.config_hash}",
        f"# source = {run.name}",
        f"# quadrature = {quad.scheme} nodes={quad.nodes} "
        f"span={quad.span:g} tol={quad.rel_tol:g}",
    ]


def _spectrum_rows(spectrum, sweep_var):
    col, scale = _SWEEP_COLUMN[sweep_var]
    header = [col, "alpha_fwd_per_cm", "alpha_bwd_per_cm",
              "t_fwd", "t_bwd", "ir_db", "il_db"]
    t_f, t_b = spectrum.t_fwd, spectrum.t_bwd
    ir, il = spectrum.ir_db, spectrum.il_db
    rows = []
    for i, x in enumerate(spectrum.sweep_values):
        rows.append([
            f"{x * scale:.6f}",
            f"{spectrum.alpha_fwd[i] / 100.0:.8e}",
            f"{spectrum.alpha_bwd[i] / 100.0:.8e}",
            f"{t_f[i]:.8e}",
            f"{t_b[i]:.8e}",
            f"{ir[i]:.6f}",
            f"{il[i]:.6f}",
        ])
    return header, rows


def _write_csv(path, header_lines, header, rows):
    text = "\n".join(header_lines + [",".join(header)]
                     + [",".join(r) for r in rows]) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _json_payload(run, spectrum, sweep_var):
    col, scale = _SWEEP_COLUMN[sweep_var]
    return {
        "metadata": {
            "config_hash": run.config_hash,
            "source": run.name,
            "quadrature": {
                "scheme": run.quad.scheme, "nodes": run.quad.nodes,
                "span": run.quad.span, "rel_tol": run.quad.rel_tol,
            },
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
        "records": {
            col: (spectrum.sweep_values * scale).tolist(),
            "alpha_fwd_per_cm": (spectrum.alpha_fwd / 100.0).tolist(),
            "alpha_bwd_per_cm": (spectrum.alpha_bwd / 100.0).tolist(),
            "t_fwd": spectrum.t_fwd.tolist(),
            "t_bwd": spectrum.t_bwd.tolist(),
            "ir_db": spectrum.ir_db.tolist(),
            "il_db": spectrum.il_db.tolist(),
        },
    }


def _plot_spectrum(spectrum, sweep_var, stem):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    col, scale = _SWEEP_COLUMN[sweep_var]
    x = spectrum.sweep_values * scale
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    axes[0, 0].plot(x, spectrum.t_fwd)
    axes[0, 0].set_ylabel("forward transmissivity")
    axes[0, 1].plot(x, spectrum.t_bwd)
    axes[0, 1].set_ylabel("backward transmissivity")
    axes[1, 0].plot(x, spectrum.ir_db)
    axes[1, 0].axhline(20.0, ls=":", c="gray")
    axes[1, 0].set_ylabel("isolation ratio (dB)")
    axes[1, 1].plot(x, spectrum.il_db)
    axes[1, 1].axhline(1.0, ls=":", c="gray")
    axes[1, 1].set_ylabel("insertion loss (dB)")
    for ax in axes[1]:
        ax.set_xlabel(col)
    fig.tight_layout()
    fig.savefig(f"{stem}.png", dpi=150)
    plt.close(fig)


# ----------------------------------------------------------------------
# subcommands

def _run_sweep_like(args, require_delta_p: bool):
    run = _load_runconfig(args)
    if run.sweep is None:
        raise ConfigError("this command needs a [sweep] section")
    if require_delta_p and run.sweep.variable != "delta_p":
        raise ConfigError("the spectrum command sweeps delta_p; use the "
                          "sweep command for other variables")
    values = run.sweep.values()
    log.info("sweeping %s over %d points, quadrature %s/%d nodes",
             run.sweep.variable, len(values), run.quad.scheme, run.quad.nodes)
    spectrum = compute_spectrum(
        run.sweep.variable, values, run.configure, run.species,
        run.ensemble.length, run.quad, threads=max(args.threads, 1),
        metadata={"config_hash": run.config_hash})
    log.info("sweep done; IR range [%.2f, %.2f] dB",
             float(spectrum.ir_db.min()), float(spectrum.ir_db.max()))

    if args.verify:
        rng = random.Random(run.config_hash)
        idx = rng.randrange(len(values))
        drive, ens, theta = run.configure(float(values[idx]))
        a_f, a_b = evaluate_point(drive, run.species, ens, theta, run.quad)
        ok = (abs(a_f - spectrum.alpha_fwd[idx]) <= 1e-12 * max(abs(a_f), 1.0)
              and abs(a_b - spectrum.alpha_bwd[idx])
              <= 1e-12 * max(abs(a_b), 1.0))
        log.info("verify row %d: %s", idx, "ok" if ok else "MISMATCH")
        if not ok:
            raise SimulationError(f"verification failed on row {idx}")

    stem = args.out
    if args.format == "csv":
        header, rows = _spectrum_rows(spectrum, run.sweep.variable)
        path = f"{stem}.csv" if stem else None
        _write_csv(path, _header_lines(run), header, rows)
    else:
        path = f"{stem}.json" if stem else None
        _write_json(path, _json_payload(run, spectrum, run.sweep.variable))
    if args.plot and stem:
        _plot_spectrum(spectrum, run.sweep.variable, stem)
    return run, spectrum


def cmd_spectrum(args) -> int:
    _run_sweep_like(args, require_delta_p=True)
    return 0


def cmd_sweep(args) -> int:
    _run_sweep_like(args, require_delta_p=False)
    return 0


def model_comparison(run: cfg.RunConfig):
    """Reduced-model vs full-model absorption at rest (v = 0).

    Sweeps delta_p across ``validate_window`` around the two-photon
    resonance -delta_a and returns (deltas, alpha_reduced, alpha_full,
    max_relative_deviation, detuning_rabi_ratio).  The deviation is
    normalized to the largest full-model value so the comparison is not
    dominated by near-zero points inside the transparency dip.
    """
    from .observables import absorption

    drive0 = run.resolved_drive()
    center = -drive0.delta_a
    half = run.validate_window
    deltas = np.linspace(center - half, center + half, run.validate_points)

    alpha_red = np.empty_like(deltas)
    alpha_full = np.empty_like(deltas)
    for i, dp in enumerate(deltas):
        drive = drive0.replace(delta_p=float(dp))
        pt = reduce_point(drive, run.species)
        alpha_red[i] = absorption(rho55_closed_form(pt), drive.omega_p,
                                  run.species, run.ensemble.number_density)
        prob = FiveLevelProblem.from_detunings(
            drive.omega_p, drive.omega_a, drive.omega_c1, drive.omega_c2,
            drive.delta_p, drive.delta_a, drive.delta_c1, drive.delta_c2,
            run.species, drive.gamma_laser, drive.gamma_21)
        rho = five_level_steady_state(prob)
        alpha_full[i] = alpha_tilde(rho[3, 1], drive.omega_p, run.species,
                                    run.ensemble.number_density)

    scale = float(np.max(np.abs(alpha_full)))
    max_dev = float(np.max(np.abs(alpha_red - alpha_full)) / scale)
    ratios = [abs(d) / o if o else float("inf") for d, o in (
        (drive0.delta_a, drive0.omega_a),
        (drive0.delta_c1, drive0.omega_c1),
        (drive0.delta_c2, drive0.omega_c2))]
    return deltas, alpha_red, alpha_full, max_dev, min(ratios)


def cmd_validate(args) -> int:
    run = _load_runconfig(args)
    deltas, alpha_red, alpha_full, max_dev, ratio = model_comparison(run)
    passed = max_dev <= 0.05
    log.info("validate: detuning/Rabi ratio %.3g, max relative deviation "
             "%.3e -> %s", ratio, max_dev, "pass" if passed else "fail")

    payload = {
        "metadata": {"config_hash": run.config_hash, "source": run.name},
        "detuning_rabi_ratio": ratio,
        "max_relative_deviation": max_dev,
        "threshold": 0.05,
        "pass": passed,
        "records": {
            "delta_p_mhz": (deltas / 1e6).tolist(),
            "alpha_reduced_per_cm": (alpha_red / 100.0).tolist(),
            "alpha_full_per_cm": (alpha_full / 100.0).tolist(),
        },
    }
    if args.format == "csv":
        header = ["delta_p_mhz", "alpha_reduced_per_cm", "alpha_full_per_cm"]
        rows = [[f"{d / 1e6:.6f}", f"{r / 100.0:.8e}", f"{f / 100.0:.8e}"]
                for d, r, f in zip(deltas, alpha_red, alpha_full)]
        extra = [f"# max_relative_deviation = {max_dev:.6e}",
                 f"# detuning_rabi_ratio = {ratio:.6g}"]
        _write_csv(f"{args.out}.csv" if args.out else None,
                   _header_lines(run) + extra, header, rows)
    else:
        _write_json(f"{args.out}.json" if args.out else None, payload)
    return 0


def cmd_optimize(args) -> int:
    run = _load_runconfig(args)
    if not run.optimize:
        raise ConfigError("this command needs an [optimize] section")
    bounds = run.optimize["bounds"]
    il_max = args.il_max if args.il_max is not None else run.optimize["il_max"]

    def configure(params: dict):
        drive = run.resolved_drive()
        ens = run.ensemble
        theta = run.theta_deg
        if "omega_a" in params:
            drive = drive.replace(omega_a=params["omega_a"])
        if "temperature" in params:
            from .atomdata import EnsembleConfig
            ens = EnsembleConfig(params["temperature"], ens.number_density,
                                 ens.length)
        if "theta" in params:
            theta = params["theta"]
        return drive, ens, theta

    result = tradeoff_search(
        bounds, configure, run.species, run.quad, il_max=il_max,
        coarse=run.optimize["coarse"], threads=max(args.threads, 1),
        resolution=run.optimize["resolution"])
    log.info("optimum: %s", result)
    payload = {"metadata": {"config_hash": run.config_hash,
                            "source": run.name},
               "il_max": il_max, "result": result}
    _write_json(f"{args.out}.json" if args.out else None, payload)
    return 0


def cmd_bandwidth(args) -> int:
    run, spectrum = _run_sweep_like(args, require_delta_p=True)
    result = extract_bandwidth(spectrum, ir_min=args.ir_min,
                               il_max=args.il_max)
    scale = 1e-6  # report in MHz
    payload = {
        "metadata": {"config_hash": run.config_hash, "source": run.name},
        "ir_min_db": result.ir_min,
        "il_max_db": result.il_max,
        "intervals_mhz": [[lo * scale, hi * scale]
                          for lo, hi in result.intervals],
        "total_width_mhz": result.total_width * scale,
    }
    stem = f"{args.out}.bandwidth.json" if args.out else None
    _write_json(stem, payload)
    return 0


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "optimize": cmd_optimize,
    "bandwidth": cmd_bandwidth,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SimulationError as exc:
        log.error("%s", exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
