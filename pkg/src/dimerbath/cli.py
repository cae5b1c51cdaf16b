"""Command line entry point: ``dimerbath {modes,spectral,evolve,sweep}``."""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .bathstats import (
    bath_spectrum,
    ohmic_limit_check,
    spectral_from_kernel,
)
from .chain import band_edges, build_bath_potential, diagonalize
from .config import ConfigError, RunConfig, config_text, load_config
from .output import (
    PLOT_EVOLVE,
    PLOT_SPECTRAL,
    fmt,
    rel,
    write_csv,
    write_json,
    write_long_csv,
    write_text,
)
from .simulate import classify_regime, penetration_profile, run


class Manifest:
    """Collects emitted files and results, then writes ``manifest.json``."""

    def __init__(self, command, cfg: RunConfig, out_dir):
        self.command = command
        self.cfg = cfg
        self.out_dir = out_dir
        self.artifacts = []
        self.results = {}
        self.start = time.perf_counter()

    def add(self, path):
        self.artifacts.append(rel(self.out_dir, path))
        return path

    def write(self):
        payload = {
            "command": self.command,
            "version": __version__,
            "config": self.cfg.values,
            "artifacts": sorted(self.artifacts + ["config.ini", "manifest.json"]),
            "results": self.results,
            "wall_clock_seconds": round(time.perf_counter() - self.start, 3),
        }
        write_text(os.path.join(self.out_dir, "config.ini"), config_text(self.cfg))
        return write_json(os.path.join(self.out_dir, "manifest.json"), payload)


def _exact_gap(freqs, chain):
    top_a, bottom_o, _, _ = band_edges(chain)
    if bottom_o - top_a <= 0:
        return None
    mid = 0.5 * (top_a + bottom_o)
    below, above = freqs[freqs <= mid], freqs[freqs > mid]
    if not len(below) or not len(above):
        return None
    return float(below.max()), float(above.min())


def write_modes(cfg, out_dir, manifest):
    chain = cfg.chain
    modes = diagonalize(build_bath_potential(chain))
    w = modes.frequencies
    manifest.add(write_csv(
        os.path.join(out_dir, "modes.csv"),
        ["index", "frequency [1/time]"],
        [np.arange(1, len(w) + 1), w],
    ))
    top_a, bottom_o, top_o, bottom_a = band_edges(chain)
    gap = _exact_gap(w, chain)
    names = ["acoustic_bottom", "acoustic_top", "optical_bottom", "optical_top"]
    closed = [bottom_a, top_a, bottom_o, top_o]
    if gap is None:
        exact = [w.min(), np.nan, np.nan, w.max()]
    else:
        exact = [w.min(), gap[0], gap[1], w.max()]
    path = os.path.join(out_dir, "bandedges.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("edge,closed_form [1/time],exact [1/time]\n")
        for name, c, e in zip(names, closed, exact):
            fh.write(f"{name},{fmt(c)},{fmt(e)}\n")
    manifest.add(path)
    manifest.results["gap_closed_form"] = [top_a, bottom_o]
    manifest.results["gap_exact"] = list(gap) if gap else None
    return modes, gap, (top_a, bottom_o)


def cmd_modes(cfg, out_dir, args):
    manifest = Manifest("modes", cfg, out_dir)
    modes, gap, closed = write_modes(cfg, out_dir, manifest)
    print(f"gap (closed form): [{closed[0]:.3f}, {closed[1]:.3f}] width {closed[1] - closed[0]:.3f}")
    if gap is not None:
        print(f"gap (exact, N={cfg.chain.N}): [{gap[0]:.3f}, {gap[1]:.3f}] width {gap[1] - gap[0]:.3f}")
    manifest.write()


def cmd_spectral(cfg, out_dir, args):
    manifest = Manifest("spectral", cfg, out_dir)
    write_modes(cfg, out_dir, manifest)
    spectrum = bath_spectrum(
        cfg.chain, cfg.system.kappa, delta_omega=cfg.spectral_width, t_max=cfg.get("run", "kernel_t_max")
    )
    J_k = spectral_from_kernel(spectrum.kernel, spectrum.t_grid[-1], spectrum.omega_grid)
    manifest.add(write_csv(os.path.join(out_dir, "J_binned.csv"),
                           ["omega [1/time]", "J [frequency^3]"], [spectrum.omega_grid, spectrum.smoothed_J]))
    manifest.add(write_csv(os.path.join(out_dir, "J_from_kernel.csv"),
                           ["omega [1/time]", "J [frequency^3]"], [spectrum.omega_grid, J_k]))
    manifest.add(write_csv(os.path.join(out_dir, "gamma.csv"),
                           ["t [time]", "gamma [frequency^2]"], [spectrum.t_grid, spectrum.kernel]))
    manifest.add(write_text(os.path.join(out_dir, "plot_spectral.py"), PLOT_SPECTRAL))
    manifest.results["delta_omega"] = spectrum.delta_omega
    manifest.results["gamma0"] = float(spectrum.kernel[0])
    manifest.results["total_weight"] = float(spectrum.weights.sum())
    chain = cfg.chain
    if chain.g == chain.h:
        rep = ohmic_limit_check(chain.g, omega0=chain.omega0, N=chain.N, kappa=cfg.system.kappa)
        manifest.results["ohmic_check"] = {
            "cutoff_expected": rep.cutoff_expected,
            "highest_mode": rep.highest_mode,
            "slope": rep.slope,
            "max_relative_deviation": rep.max_relative_deviation,
            "above_cutoff_ratio": rep.above_cutoff_ratio,
        }
    manifest.write()


def evolve_into(cfg: RunConfig, out_dir, threads, command="evolve"):
    """Run one scenario and write its tables; returns (regime report, profile)."""
    os.makedirs(out_dir, exist_ok=True)
    manifest = Manifest(command, cfg, out_dir)
    scenario = cfg.scenario()
    traj = run(scenario, threads=threads)
    report = classify_regime(scenario, traj)
    profile = penetration_profile(traj, cfg.penetration_window)

    manifest.add(write_long_csv(os.path.join(out_dir, "mi.csv"),
                                ["t [time]", "n", "I [nats]"], traj.times, traj.sites, traj.mi))
    manifest.add(write_long_csv(os.path.join(out_dir, "energy.csv"),
                                ["t [time]", "n", "E [energy]"], traj.times, traj.sites, traj.energy))
    manifest.add(write_csv(os.path.join(out_dir, "system.csv"),
                           ["t [time]", "E_S [energy]", "S_S [nats]"],
                           [traj.times, traj.system_energy, traj.system_entropy]))
    manifest.add(write_csv(os.path.join(out_dir, "profile.csv"),
                           ["n", "maxMI [nats]", "maxE [energy]"],
                           [traj.sites, profile.max_mi, profile.max_energy]))
    front = report.front
    if report.label == "ballistic":
        reached = ~np.isnan(front.arrival_times)
        manifest.add(write_csv(os.path.join(out_dir, "front.csv"),
                               ["n", "arrival_t [time]"],
                               [front.sites[reached], front.arrival_times[reached]]))
    manifest.add(write_text(os.path.join(out_dir, "plot_evolve.py"), PLOT_EVOLVE))
    drift = np.abs(traj.total_energy - traj.total_energy[0]).max() / abs(traj.total_energy[0])
    manifest.results.update({
        "regime": report.label,
        "oscillation_count": report.oscillation_count,
        "confinement_ratio": report.confinement_ratio,
        "front_fitted": front.fitted,
        "front_sites_reached": front.n_reached,
        "front_velocity": front.velocity,
        "decay_length": profile.decay_length,
        "decay_fit_r2": profile.r_squared,
        "energy_drift_relative": float(drift),
    })
    manifest.write()
    return report, profile


def cmd_evolve(cfg, out_dir, args):
    report, profile = evolve_into(cfg, out_dir, args.threads)
    print(f"regime: {report.label}")


def parse_omega_list(text):
    parts = [p for p in text.replace(" ", ",").split(",") if p]
    if not parts:
        raise ConfigError("--omega-s: empty frequency list")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"--omega-s: cannot parse {text!r}") from None
    return values


def cmd_sweep(cfg, out_dir, args):
    if args.omega_s is None:
        raise ConfigError("sweep needs --omega-s (comma-separated list)")
    omegas = parse_omega_list(args.omega_s)
    manifest = Manifest("sweep", cfg, out_dir)
    rows = []
    for w in omegas:
        sub = f"omega_s_{fmt(w)}"
        report, profile = evolve_into(cfg.with_omega_s(w), os.path.join(out_dir, sub), args.threads, "sweep")
        manifest.artifacts.append(f"{sub}/manifest.json")
        rows.append((w, report.label, report.front.velocity, profile.decay_length))
        print(f"omega_s={fmt(w)}: {report.label}")
    path = os.path.join(out_dir, "sweep_summary.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("omega_s [1/time],regime,front_velocity [sites/time],decay_length [sites]\n")
        for w, label, v, xi in rows:
            fh.write(f"{fmt(w)},{label},{fmt(v)},{fmt(xi)}\n")
    manifest.add(path)
    manifest.results["omega_s"] = omegas
    manifest.results["regimes"] = [r[1] for r in rows]
    manifest.write()


COMMANDS = {
    "modes": cmd_modes,
    "spectral": cmd_spectral,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dimerbath",
        description="System oscillator coupled to a finite dimer chain: spectra and propagation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out", default=".", help="output directory (created if missing)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for time evaluation")
        if name == "sweep":
            p.add_argument("--omega-s", dest="omega_s", help="comma-separated system frequencies")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        COMMANDS[args.command](cfg, args.out, args)
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"dimerbath: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
