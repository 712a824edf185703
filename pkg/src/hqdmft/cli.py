"""Command-line entry point: ``hqdmft {dmft,sweep,greens,asp,pps}``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import pps
from .config import SCHEMA, RunConfig, parse_config
from .dmft import dmft_iterate, saturation_estimate, spectrum_at
from .exceptions import ConfigError
from .greens import green_realfreq, greens_from_correlators, spectral_density
from .solver import asp_evolve, impurity_ground_state, scattering_correlations

log = logging.getLogger("hqdmft")

EXIT_OK, EXIT_PIPELINE, EXIT_CONFIG = 0, 1, 2


def fmt(x) -> str:
    return f"{x:.12g}"


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_spectrum(path: Path, omega, A):
    write_csv(path, ("omega", "A"), ((fmt(w), fmt(a)) for w, a in zip(omega, A)))


def run_dmft(cfg: RunConfig, out: Path, U: float | None = None) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    dcfg = cfg.dmft_config(U)
    log_path = out / "iterations.csv"
    with open(log_path, "w", encoding="utf-8") as fh:
        fh.write("k,V,f\n")

    def append(it):
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(f"{it.k},{fmt(it.V)},{fmt(it.f)}\n")

    trace = dmft_iterate(dcfg, callback=append)
    sat = saturation_estimate(trace, min(cfg.window, len(trace)))
    omega, A = spectrum_at(trace.final_V, dcfg, cfg.omega(), cfg.eta_real)
    write_spectrum(out / "spectrum.csv", omega, A)
    summary = {
        "U": dcfg.params.U,
        "converged": trace.converged,
        "iterations": len(trace),
        "final_V": trace.final_V,
        "final_f": float(trace.f[-1]),
        "mean_V": sat.mean_V,
        "std_V": sat.std_V,
        "window": sat.window,
    }
    with open(out / "final_summary.txt", "w", encoding="utf-8") as fh:
        for key, val in summary.items():
            fh.write(f"{key} = {fmt(val) if isinstance(val, float) else val}\n")
        fh.write(f"V = {fmt(sat.mean_V)} +/- {fmt(sat.std_V)}\n")
    return summary


def run_sweep(cfg: RunConfig, out: Path) -> list[dict]:
    out.mkdir(parents=True, exist_ok=True)
    rows = [run_dmft(cfg, out / f"U_{fmt(U)}", U) for U in cfg.U_list]
    keys = ("U", "converged", "iterations", "final_V", "mean_V", "std_V")
    write_csv(out / "sweep_summary.csv", keys,
              ([fmt(r[k]) if isinstance(r[k], float) else r[k] for k in keys] for r in rows))
    return rows


def run_greens(cfg: RunConfig, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    params = cfg.params()
    ground = impurity_ground_state(params, cfg.ground_state, cfg.schedule)
    t = cfg.time_grid.times
    o1 = scattering_correlations("O1", t, params, ground, cfg.mode, cfg.trotter_n)
    o2 = scattering_correlations("O2", t, params, ground, cfg.mode, cfg.trotter_n)
    write_csv(out / "correlators.csv", ("t", "re_O1", "im_O1", "re_O2", "im_O2"),
              ((fmt(ti), fmt(a.real), fmt(a.imag), fmt(b.real), fmt(b.imag))
               for ti, a, b in zip(t, o1, o2)))
    omega = cfg.omega()
    A = spectral_density(green_realfreq(greens_from_correlators(o1, o2, t), omega, cfg.eta_real))
    write_spectrum(out / "spectrum.csv", omega, A)


def run_asp(cfg: RunConfig, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    _, fidelity = asp_evolve(cfg.params(), cfg.schedule)
    s = cfg.schedule.s()
    write_csv(out / "fidelity.csv", ("s", "fidelity"),
              ((fmt(a), fmt(b)) for a, b in zip(s, fidelity)))
    print(f"final fidelity = {fmt(fidelity[-1])}")


def _layout(cfg: RunConfig) -> pps.SpinLayout:
    if cfg.layout == "FFFHH":
        return pps.SpinLayout.fffhh(cfg.gamma_ratio)
    if cfg.layout == "AAAA":
        return pps.SpinLayout.aaaa()
    return getattr(pps.SpinLayout, cfg.layout.lower())(cfg.gamma_ratio)


def run_pps(cfg: RunConfig, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    layout = _layout(cfg)
    stages = pps.prepare_pps(layout)
    table = pps.population_table(stages, layout)
    write_csv(out / "populations.csv", table[0], table[1:])
    report = pps.verify_pps(stages["gz2"])
    lines = [f"layout = {layout.name}"] + [
        f"{name} = {fmt(val) if isinstance(val, float) else val}"
        for name, val in vars(report).items()
    ]
    (out / "pps_report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    for row in table:
        print("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    print("\n".join(lines))


COMMANDS = {"dmft": run_dmft, "sweep": run_sweep, "greens": run_greens,
            "asp": run_asp, "pps": run_pps}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqdmft", description="Two-site DMFT with a simulated impurity solver.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key = value file")
        p.add_argument("--out", type=Path, default=Path("out") / name, help="output directory")
        for key in SCHEMA:
            p.add_argument(f"--{key}", dest=f"cfg_{key}", metavar="VALUE")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_") and v is not None}
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, overrides)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        COMMANDS[args.command](cfg, args.out)
    except Exception as exc:  # noqa: BLE001 - any pipeline failure maps to one exit status
        print(f"{args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
