"""Command-line front end.

    rislink <subcommand> --config <path|preset:name> [--out PATH] [--format json|csv]
                         [--bandwidth-method numeric|analytic]

Subcommands: report, pattern, squint, power, techs.  Exit status is 0 on
success, 1 for invalid input and 2 when a numeric solver fails.  The log
level comes from ``RISLINK_LOG_LEVEL``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import aperture, link, switches
from .config import ConfigError, RunConfig, load_config
from .units import DomainError

log = logging.getLogger("rislink")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


def _num(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(f"{x:.9g}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow(["" if v is None else (f"{v:.9g}" if isinstance(v, float) else v)
                             for v in row.values()])
    return buf.getvalue()


# --- data builders (pure, used by tests as well) -----------------------------

def build_reports(cfg: RunConfig, method: str) -> list[dict]:
    out = []
    for scenario in cfg.scenarios():
        report = link.evaluate_scenario(scenario, method)
        log.info("theta_max=%g deg: side %.2f mm, B %.3g GHz", scenario.theta_max,
                 report.panel_side * 1e3, report.max_bandwidth_3db / 1e9)
        out.append(link.report_to_dict(report))
    return out


def _pattern_design(p):
    f0 = p["design_frequency_hz"]
    if "cells_per_side" in p:
        return aperture.ApertureDesign(f0, p["cells_per_side"])
    return aperture.build_grid(p["panel_side_m"], f0)


def _plane(d, where):
    try:
        return aperture.PlaneWave(float(d.get("theta_deg", 0.0)), float(d.get("phi_deg", 0.0)))
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(where, str(exc)) from exc


def _pattern_target(p):
    outgoing = _plane(p.get("outgoing", {}), "pattern.outgoing")
    inc = p.get("incident", {"theta_deg": 0.0})
    if "point_m" in inc:
        try:
            incident = aperture.PointSource(*[float(v) for v in inc["point_m"]])
        except (DomainError, TypeError, ValueError) as exc:
            raise ConfigError("pattern.incident.point_m", str(exc)) from exc
    else:
        incident = _plane(inc, "pattern.incident")
    return aperture.SteeringTarget(outgoing=outgoing, incident=incident)


def build_patterns(cfg: RunConfig) -> list[tuple[str, aperture.RadiationPattern]]:
    """``(label, pattern)`` per requested bit depth and frequency."""
    p = cfg.raw.get("pattern")
    if p is None:
        raise ConfigError("pattern", "section is required for this command")
    design = _pattern_design(p)
    target = _pattern_target(p)
    grid = p["theta_grid_deg"]
    theta = np.linspace(grid["start"], grid["stop"], grid["steps"])
    freqs = p.get("frequencies_hz")
    base = aperture.synthesize_profile(design, target)
    out = []
    for bits in p.get("bits", ["continuous"]):
        profile = base if bits == "continuous" else aperture.quantize_profile(base, bits)
        tag = "continuous" if bits == "continuous" else f"{bits}bit"
        for f in freqs or [design.design_frequency]:
            label = f"{tag}_{f / 1e9:.9g}GHz" if freqs else tag
            try:
                pat = aperture.radiation_pattern(design, profile, f, target, theta, p.get("cut_phi_deg", 0.0))
            except ValueError as exc:
                raise ConfigError("pattern.theta_grid_deg", str(exc)) from exc
            out.append((label, pat))
    return out


def build_squint_rows(cfg: RunConfig) -> list[dict]:
    if cfg.sweep is None:
        raise ConfigError("sweep", "a sweep over panel_side_m or theta_deg is required")
    if cfg.sweep.parameter not in ("panel_side_m", "theta_deg"):
        raise ConfigError("sweep.parameter", "squint sweeps run over panel_side_m or theta_deg")
    sq = dict(cfg.raw.get("squint", {}))
    f0 = sq.get("frequency_hz", 140e9)
    beta = sq.get("beta", aperture.DEFAULT_SQUINT_BETA)
    bits = sq.get("phase_bits")
    axis = cfg.sweep.parameter
    fixed = "theta_deg" if axis == "panel_side_m" else "panel_side_m"
    if fixed not in sq:
        raise ConfigError(f"squint.{fixed}", "is required when sweeping " + axis)
    rows = []
    for value in cfg.sweep.values():
        point = {**sq, axis: value}
        side, theta = point["panel_side_m"], point["theta_deg"]
        if not 0.0 < theta < 90.0:
            raise ConfigError(f"squint.{'theta_deg'}", f"must lie in (0, 90) degrees, got {theta!r}")
        try:
            design = aperture.build_grid(side, f0, bits)
        except DomainError as exc:
            raise ConfigError("squint.panel_side_m", str(exc)) from exc
        numeric = aperture.squint_bandwidth_numeric(design, aperture.SteeringTarget.normal_to(theta))
        analytic = aperture.squint_bandwidth_analytic(side, theta, f0, beta)
        rows.append({axis: _num(value), "numeric_bandwidth_ghz": _num(numeric / 1e9),
                     "analytic_bandwidth_ghz": _num(analytic / 1e9)})
    return rows


def _ranged(value, unit=1.0):
    if isinstance(value, switches.Unknown):
        return None
    return {"min": _num(value.lo / unit), "max": _num(value.hi / unit)}


def power_table(count: int, catalog, on_fraction: float = 1.0) -> list[dict]:
    """Per-technology static power (W) and reconfiguration energy (J), lowest static power first."""
    rows = []
    for tech in catalog:
        static = switches.static_power(count, tech, on_fraction)
        energy = switches.reconfiguration_energy(count, tech)
        fc = switches.cutoff_frequency(tech.ron_coff)
        rows.append((static, tech.name, {
            "name": tech.name,
            "static_power_w": _ranged(static),
            "reconfiguration_energy_j": _ranged(energy),
            "cutoff_frequency_thz": _ranged(fc, 1e12),
            "trl": {"min": int(tech.trl.lo), "max": int(tech.trl.hi)},
        }))

    def key(item):
        static, name, _ = item
        if isinstance(static, switches.Unknown):
            return (1, 0.0, 0.0, name)
        return (0, static.lo, static.hi, name)

    return [row for _, _, row in sorted(rows, key=key)]


def build_power(cfg: RunConfig) -> dict:
    pw = cfg.raw.get("power", {})
    on_fraction = pw.get("on_fraction", 1.0)
    if isinstance(on_fraction, bool) or not isinstance(on_fraction, (int, float)) or not 0 <= on_fraction <= 1:
        raise ConfigError("power.on_fraction", f"must be a number in [0, 1], got {on_fraction!r}")
    catalog = _catalog(cfg)
    if "switch_count" in pw:
        count = pw["switch_count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ConfigError("power.switch_count", f"must be an integer >= 0, got {count!r}")
        sources = [({"source": "config"}, count)]
    else:
        sources = []
        for s in cfg.scenarios():
            side, design, count = link.size_panel(s)
            sources.append(({"source": "scenario", "theta_max_deg": _num(s.theta_max),
                             "panel_side_mm": _num(side * 1e3), "cells_per_side": design.cells_per_side},
                            count))
    tables = []
    for meta, count in sources:
        tables.append({**meta, "switch_count": count, "on_fraction": _num(float(on_fraction)),
                       "technologies": power_table(count, catalog, on_fraction)})
    return {"tables": tables}


def _catalog(cfg):
    path = (cfg.raw.get("power") or {}).get("catalog") if cfg is not None else None
    if path is None:
        return switches.builtin_catalog()
    try:
        return switches.load_catalog(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError("power.catalog", str(exc)) from exc


# --- output -------------------------------------------------------------------

def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write(text)


def cmd_report(cfg, out, fmt, method):
    rows = build_reports(cfg, method)
    _emit(_dumps(rows) if fmt == "json" else _csv_text(rows), out)


def cmd_pattern(cfg, out, fmt, method):
    if out is None:
        raise ConfigError("output.path", "pattern output needs a directory (--out)")
    patterns = build_patterns(cfg)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        doc = [{"label": label, "frequency_ghz": _num(p.frequency / 1e9), "cut_phi_deg": _num(p.phi_deg),
                "theta_deg": [_num(t) for t in p.theta_deg], "gain_db": [_num(g) for g in p.gain_db]}
               for label, p in patterns]
        _emit(_dumps(doc), outdir / "patterns.json")
        return
    for label, pat in patterns:
        pat.to_csv(outdir / f"pattern_{label}.csv")


def cmd_squint(cfg, out, fmt, method):
    rows = build_squint_rows(cfg)
    _emit(_dumps(rows) if fmt == "json" else _csv_text(rows), out)


def cmd_power(cfg, out, fmt, method):
    if fmt != "json":
        raise ConfigError("output.format", "the power comparison is emitted as JSON only")
    _emit(_dumps(build_power(cfg)), out)


def cmd_techs(cfg, out, fmt, method):
    if fmt != "json":
        raise ConfigError("output.format", "the catalog is emitted as JSON only")
    _emit(_dumps(switches.catalog_to_json(_catalog(cfg))), out)


COMMANDS = {"report": cmd_report, "pattern": cmd_pattern, "squint": cmd_squint,
            "power": cmd_power, "techs": cmd_techs}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rislink", description="RIS link budget and hardware requirements")
    parser.add_argument("subcommand", choices=list(COMMANDS))
    parser.add_argument("--config", help="config file, or preset:<name> for a bundled preset")
    parser.add_argument("--out", help="output file (output directory for 'pattern'); default stdout")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--bandwidth-method", choices=("numeric", "analytic"))
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("RISLINK_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = make_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.subcommand != "techs":
                raise ConfigError("--config", "is required for " + args.subcommand)
            cfg = None
        else:
            cfg = load_config(args.config)
        out = args.out or (cfg.output_path if cfg else None)
        fmt = args.format or (cfg.output_format if cfg else "json")
        method = args.bandwidth_method or (cfg.bandwidth_method if cfg else "numeric")
        COMMANDS[args.subcommand](cfg, out, fmt, method)
    except (ConfigError, DomainError) as exc:
        print(f"rislink: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (aperture.SquintSearchError, OverflowError) as exc:
        print(f"rislink: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
