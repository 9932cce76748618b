"""Command-line interface: ``ponsim {ber,sensitivity,sweep,fit,tables}``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import config as cfg
from .filters import fit_equivalent_gf, read_response_file, to_normalized
from .link import build, NonOperable, sensitivity
from .reference import format_tables, s0_dbm
from .sweep import SweepGrid, run_sweep

log = logging.getLogger("ponsim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# flag dest -> (section, key)
SCENARIO_FLAGS = {
    "format": ("scenario", "format"),
    "rb_gbps": ("scenario", "rb_gbps"),
    "rop_dbm": ("scenario", "rop_dbm"),
    "seed": ("scenario", "seed"),
    "b3db_pct": ("filter", "b3db_pct"),
    "b20db_pct": ("filter", "b20db_pct"),
    "poles": ("filter", "poles"),
    "dispersion_ps_nm": ("fiber", "dispersion_ps_nm"),
    "band": ("fiber", "band"),
}


def _common(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--config", metavar="PATH", help="INI configuration file")
    if sweep:
        p.add_argument("--format", nargs="+", choices=["pam2", "pam4", "edb", "odb"])
        p.add_argument("--rb-gbps", nargs="+", type=float, choices=[25.0, 50.0])
        p.add_argument("--b3db-pct", nargs="+", type=float, metavar="F")
        p.add_argument("--b20db-pct", nargs="+", type=float, metavar="F")
        p.add_argument("--dispersion-ps-nm", nargs="+", type=float, metavar="F")
        p.add_argument("--workers", type=int, metavar="N")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--emit-plot-script", action="store_true",
                       help="also write a matplotlib script that plots the CSV")
    else:
        p.add_argument("--format", choices=["pam2", "pam4", "edb", "odb"])
        p.add_argument("--rb-gbps", type=float, choices=[25.0, 50.0])
        p.add_argument("--b3db-pct", type=float, metavar="F")
        p.add_argument("--b20db-pct", type=float, metavar="F")
        p.add_argument("--dispersion-ps-nm", type=float, metavar="F")
    p.add_argument("--poles", type=int, metavar="N", help="use N-pole Butterworth filters")
    p.add_argument("--band", choices=["O", "C", "L"])
    p.add_argument("--seed", type=int, metavar="N")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ponsim", description="IM/DD PON link simulator")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ber", help="BER of one scenario at one received power")
    _common(p)
    p.add_argument("--rop-dbm", type=float, metavar="F")

    p = sub.add_parser("sensitivity", help="ROP for BER 1e-3 of one scenario")
    _common(p)

    p = sub.add_parser("sweep", help="sensitivity/penalty over a parameter grid, as CSV")
    _common(p, sweep=True)

    p = sub.add_parser("fit", help="equivalent identical-GF pair for measured TX/RX responses")
    p.add_argument("responses", nargs="+", metavar="FILE",
                   help="TX and RX response files (frequency_Hz magnitude_dB), or one cascade file")
    p.add_argument("--out", metavar="PATH", help="also write the result as CSV")

    sub.add_parser("tables", help="print the bundled reference device tables and S0 anchors")
    return parser


def _settings(args) -> dict:
    settings = cfg.load_config(args.config)
    overrides = {}
    for dest, target in SCENARIO_FLAGS.items():
        if hasattr(args, dest):
            overrides[target] = getattr(args, dest)
    return cfg.apply_overrides(settings, overrides)


def cmd_ber(args) -> int:
    settings = _settings(args)
    scenario = cfg.scenario_from_settings(settings)
    rop = settings["scenario"]["rop_dbm"]
    print(cfg.describe_scenario(scenario))
    print(f"rop_dbm           = {rop:g}")
    try:
        res = build(scenario).ber(rop)
    except NonOperable as exc:
        print(f"status            = non-operable ({exc})")
        return 0
    print(f"ber               = {res.ber:.4e}")
    print(f"status            = {'ok' if res.ok else 'non-operable (' + res.reason + ')'}")
    return 0


def cmd_sensitivity(args) -> int:
    settings = _settings(args)
    scenario = cfg.scenario_from_settings(settings)
    print(cfg.describe_scenario(scenario))
    res = sensitivity(scenario)
    if res.converged:
        s0 = s0_dbm(scenario.bit_rate / 1e9)
        print(f"sensitivity_dbm   = {res.sensitivity_dbm:.2f}")
        print(f"penalty_db        = {res.sensitivity_dbm - s0:.2f}  (S0 = {s0:g} dBm)")
    else:
        print("sensitivity_dbm   = NA")
        print(f"status            = non-operable ({res.reason})")
    return 0


def cmd_sweep(args) -> int:
    settings = cfg.load_config(args.config)
    sw = settings["sweep"]
    for dest, key in [("format", "formats"), ("rb_gbps", "rb_gbps"), ("b3db_pct", "b3db_pct"),
                      ("b20db_pct", "b20db_pct"), ("dispersion_ps_nm", "dispersion_ps_nm"),
                      ("workers", "workers"), ("out", "out")]:
        v = getattr(args, dest)
        if v is not None:
            sw[key] = cfg.parse_value("sweep", key, v)
    cfg.apply_overrides(settings, {("fiber", "band"): args.band, ("scenario", "seed"): args.seed,
                                   ("filter", "poles"): args.poles})
    # equalizer/APD settings come from the config; reuse the scenario builder
    base = cfg.scenario_from_settings(_valid_single(settings))
    grid = SweepGrid(
        formats=sw["formats"],
        rb_gbps=sw["rb_gbps"],
        b3db_pct=sw["b3db_pct"],
        b20db_pct=sw["b20db_pct"],
        dispersion_ps_nm=sw["dispersion_ps_nm"],
        wavelength_nm=cfg.wavelength_nm(settings),
        seed=settings["scenario"]["seed"],
        poles=settings["filter"]["poles"],
        apd=base.apd,
        eq=base.eq,
        prbs_seed=base.prbs_seed,
    )
    rows = run_sweep(grid, sw["out"], workers=max(1, sw["workers"]), emit_plot_script=args.emit_plot_script)
    n_ok = sum(r.status == "ok" for r in rows)
    print(f"wrote {len(rows)} rows ({n_ok} ok) to {sw['out']}")
    return 0


def _valid_single(settings: dict) -> dict:
    # the single-scenario filter keys are irrelevant for a sweep
    s = {k: dict(v) for k, v in settings.items()}
    s["filter"] = dict(s["filter"], b3db_pct=10.0, b20db_pct=20.0, poles=None, rx_poles=None)
    return s


def cmd_fit(args) -> int:
    curves = [read_response_file(p) for p in args.responses]
    if len(curves) > 2:
        raise UsageError("fit takes one cascade file or a TX and an RX file")
    f, mag = curves[0]
    if len(curves) == 2:
        f2, mag2 = curves[1]
        lo, hi = max(f.min(), f2.min()), min(f.max(), f2.max())
        grid = np.union1d(f[(f >= lo) & (f <= hi)], f2[(f2 >= lo) & (f2 <= hi)])
        mag = np.interp(grid, f, mag) + np.interp(grid, f2, mag2)
        f = grid
    f3, f20 = fit_equivalent_gf(f, mag)
    print(f"f3db_ghz  = {f3 / 1e9:.3f}")
    print(f"f20db_ghz = {f20 / 1e9:.3f}")
    lines = ["rb_gbps,f3db_ghz,f20db_ghz,b3db_pct,b20db_pct"]
    for rb in (25, 50):
        nb = to_normalized(f3, f20, rb * 1e9)
        print(f"Rb = {rb} Gb/s: B3dB = {nb.b3db:.1f} %, B20dB = {nb.b20db:.1f} %")
        lines.append(f"{rb},{f3 / 1e9:.4f},{f20 / 1e9:.4f},{nb.b3db:.2f},{nb.b20db:.2f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def cmd_tables(args) -> int:
    sys.stdout.write(format_tables())
    return 0


COMMANDS = {
    "ber": cmd_ber,
    "sensitivity": cmd_sensitivity,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "tables": cmd_tables,
}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (cfg.ConfigError, UsageError) as exc:
        print(f"ponsim: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"ponsim: runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
