"""Command-line front end: scenario config, experiment dispatch, CSV output.

Commands
--------
run        evaluate one scenario (simulated and/or exact)
sweep      sweep rho_db / n_cells / gamma_db / sigma_eps, emit CSV + plot script
compare    proposed vs NOMA baseline with percentage deltas
degrade    ESC degradation vs the perfect-CSI/perfect-SIC reference
validate   simulated-vs-exact consistency check with tolerance gate
topology   export BS and user positions as CSV

Exit codes: 0 success, 1 failed validation gate, 2 configuration error,
3 numerical-domain error. Config files hold one ``key = value`` per line
with ``#`` comments; CLI flags override file values.
"""

import argparse
import datetime
import json
import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import harness
from .errors import ConfigError, NumericalDomainError
from .geometry import ScenarioConfig, build_topology
from .harness import db_to_linear

CSV_HEADER = ("scheme,mode,param_name,param_value,user_role,user_index,"
              "mean_bps_hz,stderr,esc_mean,esc_stderr,trials,seed")

# config-file / override keys -> ScenarioConfig field + parser
_CONFIG_KEYS = {
    "m": ("m_comp", int),
    "n": ("n_cells", int),
    "alpha": ("alpha", float),
    "rho_db": ("rho", lambda s: db_to_linear(float(s))),
    "sigma_eps": ("sigma_eps", float),
    "gamma_db": ("gamma", lambda s: db_to_linear(float(s))),
    "pathloss_exp": ("pathloss_exp", float),
    "trials": ("trials", int),
    "seed": ("master_seed", int),
    "redraw_topology": ("topology_redraws", int),
    "sigma_eps_cap": ("sigma_eps_cap",
                      lambda s: None if s.lower() == "none" else float(s)),
}


@dataclass
class RunManifest:
    """Record of one dispatch: what ran, with what config, what was written."""

    command: str
    out_dir: str
    config: ScenarioConfig
    emitted_files: list = field(default_factory=list)
    status: int = 0


def _fmt(x):
    if x is None or x == "":
        return ""
    return format(float(x), ".9g")


def parse_config_file(path):
    overrides = {}
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        field_name, conv = _CONFIG_KEYS[key]
        try:
            overrides[field_name] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
    return overrides


def _build_config(args):
    overrides = {}
    if getattr(args, "config", None):
        overrides.update(parse_config_file(args.config))
    for flag, key in (("m", "m"), ("n", "n"), ("alpha", "alpha"),
                      ("rho_db", "rho_db"), ("sigma_eps", "sigma_eps"),
                      ("gamma_db", "gamma_db"), ("pathloss_exp", "pathloss_exp"),
                      ("trials", "trials"), ("seed", "seed"),
                      ("redraw_topology", "redraw_topology")):
        value = getattr(args, flag, None)
        if value is not None:
            field_name, conv = _CONFIG_KEYS[key]
            overrides[field_name] = conv(str(value))
    try:
        return ScenarioConfig(**{**_defaults(), **overrides})
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _defaults():
    cfg = ScenarioConfig()
    return {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}


def _modes(mode_flag):
    return {
        "sim": ["simulated"],
        "exact": ["exact_full"],
        "exact-paper-literal": ["exact_paper_literal"],
        "both": ["simulated", "exact_full"],
    }[mode_flag]


def _report_rows(report):
    cfg = report.config
    rows = []
    for role, idx, mean, err in zip(report.user_roles, report.user_indices,
                                    report.user_means, report.user_stderrs):
        rows.append(",".join([
            report.scheme, report.mode, report.param_name,
            _fmt(report.param_value) if report.param_value is not None else "",
            role, str(idx), _fmt(mean), _fmt(err),
            _fmt(report.esc_mean), _fmt(report.esc_stderr),
            str(report.trials_used), str(cfg.master_seed)]))
    return rows


def _write(manifest, name, text):
    path = f"{manifest.out_dir}/{name}"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest.emitted_files.append(name)


def _write_reports_csv(manifest, name, reports):
    rows = [CSV_HEADER]
    for report in reports:
        rows.extend(_report_rows(report))
    _write(manifest, name, "\n".join(rows) + "\n")


def _write_meta(manifest, argv, wall):
    # the only file allowed to carry timestamps
    lines = [
        f"generated_at = {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
        f"wall_time_s = {wall:.3f}",
        f"argv = {' '.join(argv)}",
    ]
    _write(manifest, f"{manifest.command}_meta.txt", "\n".join(lines) + "\n")


def _write_manifest(manifest):
    cfg = manifest.config
    payload = {
        "command": manifest.command,
        "out_dir": manifest.out_dir,
        "config": {k: (getattr(cfg, k) if not isinstance(getattr(cfg, k), tuple)
                       else list(getattr(cfg, k)))
                   for k in cfg.__dataclass_fields__},
        "files": sorted(manifest.emitted_files + ["manifest.json"]),
    }
    _write(manifest, "manifest.json", json.dumps(payload, sort_keys=True, indent=2) + "\n")


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Plot {param} sweep curves from {csv}; run from the directory holding it."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

esc = defaultdict(dict)
users = defaultdict(dict)
with open("{csv}", newline="") as fh:
    for row in csv.DictReader(fh):
        x = float(row["param_value"])
        key = (row["scheme"], row["mode"])
        esc[key][x] = float(row["esc_mean"])
        users[(row["scheme"], row["mode"], row["user_role"])].setdefault(x, 0.0)
        users[(row["scheme"], row["mode"], row["user_role"])][x] = \\
            users[(row["scheme"], row["mode"], row["user_role"])][x] + float(row["mean_bps_hz"])

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
for (scheme, mode), pts in sorted(esc.items()):
    xs = sorted(pts)
    ax1.plot(xs, [pts[x] for x in xs], marker="o", label=f"{{scheme}}/{{mode}}")
ax1.set_xlabel("{param}"); ax1.set_ylabel("ESC (bits/s/Hz)"); ax1.grid(True); ax1.legend(fontsize=8)
for (scheme, mode, role), pts in sorted(users.items()):
    xs = sorted(pts)
    ax2.plot(xs, [pts[x] for x in xs], marker=".", label=f"{{scheme}}/{{mode}}/{{role}}")
ax2.set_xlabel("{param}"); ax2.set_ylabel("summed role capacity (bits/s/Hz)")
ax2.grid(True); ax2.legend(fontsize=7)
fig.tight_layout()
fig.savefig("{png}", dpi=150)
print("wrote {png}")
'''


def _parse_values(spec_text):
    spec_text = spec_text.strip()
    if ":" in spec_text:
        parts = spec_text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range values must be start:stop:step, got {spec_text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"bad range {spec_text!r}") from exc
        if step <= 0:
            raise ConfigError("range step must be positive")
        values = []
        x = start
        while x <= stop + 1e-9:
            values.append(round(x, 12))
            x += step
        return values
    try:
        return [float(p) for p in spec_text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad values list {spec_text!r}") from exc


# --- command implementations -------------------------------------------------

def _cmd_run(args, config, manifest):
    reports = []
    for mode in _modes(args.mode):
        reports.append(harness.run_scenario(config, scheme="proposed", mode=mode))
        if mode == "simulated":
            reports.append(harness.run_scenario(config, scheme="noma_baseline", mode=mode))
    _write_reports_csv(manifest, "run.csv", reports)


def _cmd_sweep(args, config, manifest):
    values = _parse_values(args.values)
    reports = []
    for mode in _modes(args.mode):
        reports.extend(harness.sweep(config, args.param, values,
                                     scheme="proposed", mode=mode))
        if mode == "simulated":
            reports.extend(harness.sweep(config, args.param, values,
                                         scheme="noma_baseline", mode=mode))
    csv_name = f"sweep_{args.param}.csv"
    _write_reports_csv(manifest, csv_name, reports)
    plot = _PLOT_TEMPLATE.format(param=args.param, csv=csv_name,
                                 png=f"sweep_{args.param}.png")
    _write(manifest, f"sweep_{args.param}_plot.py", plot)


def _cmd_compare(args, config, manifest):
    cmp_result = harness.compare_schemes(config)
    lines = ["label,proposed_mean,baseline_mean,delta_pct"]
    for row in cmp_result.rows:
        lines.append(f"{row.label},{_fmt(row.proposed_mean)},"
                     f"{_fmt(row.baseline_mean)},{_fmt(row.delta_pct)}")
    _write(manifest, "compare_deltas.csv", "\n".join(lines) + "\n")
    _write_reports_csv(manifest, "compare_reports.csv",
                       [cmp_result.proposed, cmp_result.baseline])


def _cmd_degrade(args, config, manifest):
    levels = _parse_values(args.levels) if args.levels else None
    if args.axis == "gamma" and levels is not None:
        levels = [db_to_linear(v) for v in levels]
    mode = "simulated" if args.mode == "sim" else "exact_full"
    rows = harness.degradation_study(config, args.axis, levels=levels, mode=mode)
    lines = ["axis,level,esc,esc_perfect,degradation_pct"]
    for row in rows:
        lines.append(f"{row.axis},{_fmt(row.level)},{_fmt(row.esc)},"
                     f"{_fmt(row.esc_perfect)},{_fmt(row.degradation_pct)}")
    _write(manifest, f"degrade_{args.axis}.csv", "\n".join(lines) + "\n")


def _cmd_validate(args, config, manifest):
    sim = harness.run_scenario(config, scheme="proposed", mode="simulated")
    exact = harness.run_scenario(config, scheme="proposed", mode="exact_full")
    tol = args.tol
    lines = ["quantity,simulated,exact,rel_gap,tolerance,ok"]
    all_ok = True
    quantities = list(zip(
        [f"{r}_{i}" for r, i in zip(sim.user_roles, sim.user_indices)],
        sim.user_means, exact.user_means))
    quantities.append(("esc", sim.esc_mean, exact.esc_mean))
    for name, s, e in quantities:
        gap = abs(s - e) / max(abs(e), 1e-12)
        ok = gap < tol
        all_ok &= ok
        lines.append(f"{name},{_fmt(s)},{_fmt(e)},{_fmt(gap)},{_fmt(tol)},{int(ok)}")
    _write(manifest, "validate.csv", "\n".join(lines) + "\n")
    if not all_ok:
        manifest.status = 1


def _cmd_topology(args, config, manifest):
    topology = build_topology(config, config.master_seed)
    _write(manifest, "topology_bs.csv", topology.bs_csv())
    _write(manifest, "topology_users.csv", topology.users_csv())


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "degrade": _cmd_degrade,
    "validate": _cmd_validate,
    "topology": _cmd_topology,
}


def _add_common_flags(p):
    p.add_argument("--config", help="config file (key = value lines, # comments)")
    p.add_argument("--m", type=int, help="number of coordinated cells")
    p.add_argument("--n", type=int, help="total number of cells")
    p.add_argument("--alpha", type=float, help="CCU power fraction (default 0.1)")
    p.add_argument("--rho-db", dest="rho_db", type=float, help="transmit SNR in dB")
    p.add_argument("--sigma-eps", dest="sigma_eps", type=float,
                   help="channel-estimation error variance")
    p.add_argument("--gamma-db", dest="gamma_db", type=float,
                   help="residual SIC factor in dB")
    p.add_argument("--pathloss-exp", dest="pathloss_exp", type=float,
                   help="path-loss exponent (default 2.5)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--redraw-topology", dest="redraw_topology", type=int,
                   help="average over this many redrawn topologies (0 = fixed)")
    p.add_argument("--mode", choices=("sim", "exact", "exact-paper-literal", "both"),
                   default="both")
    p.add_argument("--out", default="out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="compnoma",
        description="Multi-cell downlink capacity simulator: coordinated-multipoint "
                    "NOMA with spatial-modulation cell-edge users.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (("run", "evaluate one scenario"),
                        ("sweep", "sweep one parameter"),
                        ("compare", "proposed vs NOMA baseline"),
                        ("degrade", "impairment degradation study"),
                        ("validate", "simulated-vs-exact consistency gate"),
                        ("topology", "export topology CSV")):
        p = sub.add_parser(name, help=descr)
        _add_common_flags(p)
        if name == "sweep":
            p.add_argument("--param", required=True, choices=harness.SWEEP_PARAMETERS)
            p.add_argument("--values", required=True,
                           help="comma list or start:stop:step (inclusive)")
        if name == "degrade":
            p.add_argument("--axis", required=True, choices=("gamma", "sigma_eps"))
            p.add_argument("--levels",
                           help="impairment levels (gamma in dB); default per axis")
        if name == "validate":
            p.add_argument("--tol", type=float, default=0.02,
                           help="relative tolerance for every gap (default 0.02)")
    return parser


def parse_and_dispatch(argv):
    """Parse argv, execute the command, write outputs, return the manifest."""
    args = build_parser().parse_args(argv)
    config = _build_config(args)
    import os
    os.makedirs(args.out, exist_ok=True)
    manifest = RunManifest(command=args.command, out_dir=args.out, config=config)
    t0 = time.perf_counter()
    _COMMANDS[args.command](args, config, manifest)
    _write_meta(manifest, list(argv), time.perf_counter() - t0)
    _write_manifest(manifest)
    return manifest


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        manifest = parse_and_dispatch(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalDomainError as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return 3
    return manifest.status


if __name__ == "__main__":
    sys.exit(main())
