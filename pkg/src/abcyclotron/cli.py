"""Command line front end: ``abcyclotron <rate|spectrum|simulate|averaged>``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import averaging, jacobi
from .config import (
    ConfigError,
    RunConfig,
    dump_config,
    load_config,
    parse_config,
    parse_float_list,
    parse_index_list,
)
from .initial_state import (
    dress_initial_state,
    gaussian_density,
    synthesize_state,
    tabulated_density,
    theta_grid,
)
from .output import line_plot_svg, write_csv
from .propagator import IntegrationError, acceleration_series, integrate

log = logging.getLogger("abcyclotron")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


class NumericalFailure(RuntimeError):
    pass


def build_spec(cfg: RunConfig, j_max=None) -> jacobi.JacobiSpec:
    n = cfg.numerics
    return jacobi.JacobiSpec.from_params(
        cfg.model,
        j_max=n.j_max if j_max is None else j_max,
        window=(n.fit_window_lo, n.fit_window_hi),
        theta_min=n.theta_min,
    )


def build_density(cfg: RunConfig, n_nodes=None):
    grid = theta_grid(n_nodes or cfg.numerics.theta_nodes, cfg.numerics.theta_min)
    rho = cfg.rho
    if rho.kind == "table":
        return tabulated_density(rho.path, grid)
    return gaussian_density(grid, rho.center, rho.concentration, rho.momentum)


def cmd_rate(cfg: RunConfig, out: Path):
    params = cfg.model
    rho = build_density(cfg)
    dens = np.abs(rho.values) ** 2
    norm = float(np.sum(rho.weights * dens))
    weighted = float(np.sum(rho.weights * np.sin(rho.nodes) * dens))
    gamma = averaging.acceleration_rate(rho, params)
    write_csv(
        out / "rate.csv",
        ["gamma_acc", "int_sin_rho_sq", "int_rho_sq", "epsilon", "hbar_omega_c", "omega"],
        [[gamma, weighted, norm, params.epsilon, params.energy_quantum, params.omega]],
    )
    print(f"gamma_acc        = {gamma:.6f}")
    print(f"int sin|rho|^2   = {weighted:.12g}")
    print(f"int |rho|^2      = {norm:.12g}")
    return {"gamma_acc": gamma, "int_sin_rho_sq": weighted, "int_rho_sq": norm}


def cmd_spectrum(cfg: RunConfig, out: Path, thetas=None):
    spec = build_spec(cfg)
    thetas = parse_float_list(cfg.numerics.thetas) if thetas is None else list(thetas)
    rows = []
    for th in thetas:
        try:
            raw = jacobi.eigenvector_raw(th, spec)
            amp, phase = jacobi.fit_tail(raw, th, spec)
            res = jacobi.recurrence_residual(raw, th, spec)
            rows.append([th, amp, phase, res, "ok"])
        except (jacobi.FitError, ValueError) as exc:
            log.error("theta=%g: %s", th, exc)
            rows.append([th, math.nan, math.nan, math.nan, f"failed: {exc}".replace(",", ";")])
    write_csv(out / "spectrum.csv", ["theta", "raw_amplitude", "phase", "residual", "status"], rows)
    series = jacobi.phase_derivative_center(spec, cfg.numerics.series_terms)
    fd = jacobi.phase_derivative_fd(spec)
    write_csv(
        out / "phase_derivative.csv",
        ["p", "series", "finite_difference", "difference"],
        [[spec.p, series, fd, series - fd]],
    )
    for th, amp, phase, res, status in rows:
        print(f"theta={th:.6f}  A_raw={amp:.10g}  phi={phase:+.8f}  residual={res:.2e}  {status}")
    print(f"dphi/dtheta at pi/2: series={series:.8f}  finite difference={fd:.8f}")
    if cfg.output.plot:
        ok = [r for r in rows if r[4] == "ok"]
        if len(ok) >= 2:
            line_plot_svg(
                out / "spectrum.svg",
                [("fitted phase", [r[0] for r in ok], [r[2] for r in ok])],
                title=f"Tail phase of generalized eigenvectors, p={spec.p:g}",
                xlabel="theta",
                ylabel="phi",
            )
    return {"rows": rows, "series": series, "finite_difference": fd}


def cmd_averaged(cfg: RunConfig, out: Path, N_list=None):
    params = cfg.model
    Ns = parse_index_list(cfg.numerics.averaged_n) if N_list is None else list(N_list)
    j_keep = averaging.required_j(max(Ns), params)
    j_jac = max(cfg.numerics.j_max, 2 * j_keep)
    rho = build_density(cfg, max(cfg.numerics.theta_nodes, 2 * j_keep))
    comps = averaging.spectral_components(rho, params, j_keep, build_spec(cfg, j_jac))
    res = averaging.averaged_energy(rho, Ns, params, j_keep, components=comps)
    gamma = averaging.acceleration_rate(rho, params)
    T = params.period
    t = np.asarray(Ns, dtype=float) * T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t > 0, res.energy / t, math.nan)
    running = np.full(len(Ns), math.nan)
    running[1:] = np.diff(res.energy) / np.diff(t)
    rows = [
        [int(n), tt, e, r, s, c, bool(f)]
        for n, tt, e, r, s, c, f in zip(Ns, t, res.energy, ratio, running, res.captured, res.flagged)
    ]
    write_csv(
        out / "averaged.csv",
        ["N", "t", "energy", "energy_over_t", "running_slope", "captured", "flagged"],
        rows,
    )
    sel = (np.asarray(Ns) >= 200) & (np.asarray(Ns) <= 400)
    if sel.sum() < 2:
        sel = np.asarray(Ns) >= np.median(Ns)
    slope = float(np.polyfit(t[sel], res.energy[sel], 1)[0]) if sel.sum() >= 2 else math.nan
    print(f"averaged energy at N={Ns[0]}: {res.energy[0]:.10g}")
    print(f"slope of averaged energy vs NT: {slope:.6f}   gamma_acc: {gamma:.6f}")
    if np.any(res.flagged):
        print(f"warning: captured norm below 99% for {int(np.sum(res.flagged))} values of N")
    if cfg.output.plot:
        pos = t > 0
        line_plot_svg(
            out / "averaged.svg",
            [("averaged E(NT)/(NT)", list(t[pos]), list(ratio[pos]))],
            title="Averaged dynamics",
            xlabel="t = NT",
            ylabel="E/t",
            hlines=[(f"gamma_acc = {gamma:.4f}", gamma)],
        )
    return {"N": Ns, "energy": res.energy, "captured": res.captured, "slope": slope, "gamma_acc": gamma}


def cmd_simulate(cfg: RunConfig, out: Path):
    params = cfg.model
    drive = cfg.drive.build()
    num = cfg.numerics
    rho = build_density(cfg)
    psi0 = synthesize_state(rho, params, build_spec(cfg))
    # the averaging transformation only exists at resonance
    x0 = dress_initial_state(psi0, params, drive) if params.resonant else psi0
    t_end = num.t_end_periods * params.period
    start = time.perf_counter()
    traj = integrate(
        x0, t_end, params, drive, tol=num.tol,
        samples_per_period=num.samples_per_period, picture=num.picture,
    )
    elapsed = time.perf_counter() - start
    acc = acceleration_series(traj, num.slope_fraction)
    gamma = averaging.acceleration_rate(rho, params) if params.resonant else math.nan
    ratio = np.concatenate(([math.nan], traj.energies[1:] / traj.times[1:]))
    write_csv(
        out / "trajectory.csv",
        ["t", "E", "E_over_t", "norm", "top_tail_weight"],
        zip(traj.times, traj.energies, ratio, traj.norms, traj.tail),
    )
    if cfg.output.plot:
        line_plot_svg(
            out / "fig1.svg",
            [("E(t)/t", list(acc.times), list(acc.ratio))],
            title="Mean energy growth under the resonant flux drive",
            xlabel="t",
            ylabel="E(t)/t",
            hlines=[(f"gamma_acc = {gamma:.4f}", gamma)] if math.isfinite(gamma) else [],
            ylim=(0.0, max(0.5, 2.0 * gamma if math.isfinite(gamma) else 0.0)),
        )
    print(f"integrated to t={t_end:.6g} in {elapsed:.1f} s ({traj.steps_accepted} steps)")
    print(f"final-window slope of E(t): {acc.slope:.6f}   gamma_acc: {gamma:.6f}")
    print(f"norm drift: {traj.norm_drift:.3e}   max tail weight: {traj.max_tail:.3e}")
    report = {
        "slope": acc.slope, "gamma_acc": gamma, "norm_drift": traj.norm_drift,
        "max_tail": traj.max_tail, "leaked": traj.leaked, "trajectory": traj,
    }
    if traj.leaked:
        raise NumericalFailure(
            f"truncation leakage: top-mode weight {traj.max_tail:.3g} exceeds 1e-6; increase n_max"
        )
    return report


COMMANDS = {
    "rate": cmd_rate,
    "spectrum": cmd_spectrum,
    "simulate": cmd_simulate,
    "averaged": cmd_averaged,
}


def make_parser():
    ap = argparse.ArgumentParser(prog="abcyclotron", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="INI configuration file (defaults: reference run)")
    ap.add_argument("--out", help="output directory (overrides [output] directory)")
    ap.add_argument("--dump-config", action="store_true", help="print the effective configuration and exit")
    ap.add_argument("--allow-off-resonance", action="store_true")
    ap.add_argument("--theta", type=float, action="append", help="theta values for spectrum")
    ap.add_argument("--N", dest="n_list", help="N values for averaged, e.g. 0:400:10")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.config:
            cfg = load_config(args.config, args.allow_off_resonance)
        else:
            cfg = parse_config("", "<defaults>", args.allow_off_resonance)
        if args.n_list:
            parse_index_list(args.n_list)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return EXIT_OK
    out = Path(args.out or cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "spectrum":
            cmd_spectrum(cfg, out, args.theta)
        elif args.command == "averaged":
            cmd_averaged(cfg, out, parse_index_list(args.n_list) if args.n_list else None)
        else:
            COMMANDS[args.command](cfg, out)
    except (NumericalFailure, IntegrationError, jacobi.FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        # unreadable density tables and similar input problems
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
