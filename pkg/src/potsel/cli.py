"""Command-line interface.

    potsel summarize --input claims.csv --years 1985-1989
    potsel select    --input claims.csv --years 1985 --kind ForwardStop --alpha 0.01
    potsel var       --input claims.csv --years 1985 --levels 0.9 0.95
    potsel simulate  --scenarios scenarios.yaml
    potsel plot-cdf  --input claims.csv --years 1985 --methods ForwardStop:0.01

Options may also come from a YAML/JSON file given with ``--config``; flags
win over file values. Relative ``--input`` paths are looked up in
``$POTSEL_DATA_DIR`` when not found in the working directory.

Exit codes: 0 success, 2 invalid arguments, 3 data problem, 4 no threshold
found, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from importlib import resources
from pathlib import Path

import yaml

from . import errors
from .dataio import filter_year, load_claims, summary_stats
from .gof import BOOTSTRAP, DEFAULT_BOOT, TABLE
from .gpd import MIN_EXCEEDANCES, ExceedanceSet, fit_gpd
from .plots import cdf_curves, curves_csv, curves_svg
from .risk import empirical_var, var_with_ci
from .selection import AccumulationSpec, Kind, Status, build_candidate_grid, select_threshold
from .simlab import load_scenarios, scenario_table

SCHEMA_VERSION = "1"
DATA_DIR_ENV = "POTSEL_DATA_DIR"
DEFAULT_INPUT = "norwegianfire.csv"

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_THRESHOLD, EXIT_NUMERIC = 0, 2, 3, 4, 5

DEFAULTS = {
    "input": None,
    "years": None,
    "year_column": "year",
    "claim_column": "claim",
    "scale_factor": 1e6,
    "kind": "ForwardStop",
    "alpha": 0.01,
    "c": 2.0,
    "grid_lower": 0.0,
    "grid_upper": 0.98,
    "grid_count": 30,
    "gof_method": TABLE,
    "n_boot": DEFAULT_BOOT,
    "seed": 0,
    "levels": [0.90, 0.95],
    "ci_level": 0.95,
    "threshold": None,
    "methods": None,
    "scenarios": None,
    "replicates": None,
    "out_dir": "potsel-out",
    "formats": ["json", "text"],
}

log = logging.getLogger("potsel")


class UsageError(Exception):
    pass


class NoThreshold(Exception):
    def __init__(self, outputs):
        super().__init__("no threshold found")
        self.outputs = outputs


def _parse_years(spec) -> list[int] | None:
    if spec is None:
        return None
    items = spec if isinstance(spec, list) else [spec]
    years = []
    for item in items:
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                a, b = part.split("-", 1)
                years.extend(range(int(a), int(b) + 1))
            else:
                years.append(int(part))
    return years


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", type=Path, default=S, help="YAML/JSON options file")
    common.add_argument("--input", default=S, help="claims CSV (columns year, claim)")
    common.add_argument("--years", nargs="+", default=S, help="e.g. 1985 1987 or 1985-1989")
    common.add_argument("--year-column", default=S)
    common.add_argument("--claim-column", default=S)
    common.add_argument("--scale-factor", type=float, default=S)
    common.add_argument("--out-dir", default=S)
    common.add_argument("--formats", nargs="+", choices=["json", "text", "csv"], default=S)
    common.add_argument("--seed", type=int, default=S)

    sel = argparse.ArgumentParser(add_help=False)
    sel.add_argument("--kind", choices=[k.value for k in Kind], default=S)
    sel.add_argument("--alpha", type=float, default=S)
    sel.add_argument("--c", type=float, default=S, help="C for SeqStep/HingeExp")
    sel.add_argument("--grid-lower", type=float, default=S, help="lowest percentile level (0-1)")
    sel.add_argument("--grid-upper", type=float, default=S)
    sel.add_argument("--grid-count", type=int, default=S)
    sel.add_argument("--gof-method", choices=[TABLE, BOOTSTRAP], default=S)
    sel.add_argument("--n-boot", type=int, default=S)

    p = argparse.ArgumentParser(prog="potsel", description="Peaks-over-threshold GPD toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("summarize", parents=[common], help="Table of summary statistics per year")
    sub.add_parser("select", parents=[common, sel], help="Automated threshold selection")
    v = sub.add_parser("var", parents=[common, sel], help="VaR with delta-method CIs")
    v.add_argument("--levels", nargs="+", type=float, default=S)
    v.add_argument("--ci-level", type=float, default=S)
    v.add_argument("--threshold", type=float, default=S, help="skip selection, use this threshold")
    s = sub.add_parser("simulate", parents=[common], help="Run a simulation scenario file")
    s.add_argument("--scenarios", default=S, help="scenario YAML (default: bundled study)")
    s.add_argument("--replicates", type=int, default=S, help="override replicate count")
    pc = sub.add_parser("plot-cdf", parents=[common, sel], help="ECDF vs fitted GPD curves")
    pc.add_argument("--methods", nargs="+", default=S, help="KIND:ALPHA, e.g. ForwardStop:0.01")
    return p


def resolve_config(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    given = vars(ns)
    if "config" in given:
        try:
            loaded = yaml.safe_load(Path(given["config"]).read_text()) or {}
        except OSError as exc:
            raise UsageError(f"cannot read config {given['config']}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a mapping")
        unknown = set(k.replace("-", "_") for k in loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config key(s): {sorted(unknown)}")
        cfg.update({k.replace("-", "_"): v for k, v in loaded.items()})
    cfg.update({k: v for k, v in given.items() if k in DEFAULTS})
    cfg["command"] = ns.command
    cfg["years"] = _parse_years(cfg["years"])
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    def need(cond, msg):
        if not cond:
            raise UsageError(msg)

    need(0 < cfg["alpha"] < 1, "--alpha must lie in (0, 1)")
    need(cfg["c"] > 1, "--c must exceed 1")
    need(0 <= cfg["grid_lower"] < cfg["grid_upper"] <= 1, "grid percentiles must satisfy 0 <= lower < upper <= 1")
    need(cfg["grid_count"] >= 2, "--grid-count must be at least 2")
    need(cfg["n_boot"] >= 1, "--n-boot must be positive")
    need(cfg["scale_factor"] > 0, "--scale-factor must be positive")
    need(all(0 < lv < 1 for lv in cfg["levels"]), "VaR levels must lie strictly between 0 and 1")
    need(0 < cfg["ci_level"] < 1, "--ci-level must lie in (0, 1)")
    need(cfg["gof_method"] in (TABLE, BOOTSTRAP), "unknown --gof-method")
    if cfg["replicates"] is not None:
        need(cfg["replicates"] >= 1, "--replicates must be positive")
    if cfg["methods"]:
        cfg["methods"] = [_parse_method(m, cfg) for m in cfg["methods"]]
    if cfg["command"] == "simulate" and cfg["scenarios"] is None:
        cfg["scenarios"] = str(resources.files("potsel.data") / "scenarios.yaml")


def _parse_method(text, cfg) -> AccumulationSpec:
    if isinstance(text, AccumulationSpec):
        return text
    kind, _, alpha = str(text).partition(":")
    try:
        return AccumulationSpec(kind, float(alpha) if alpha else cfg["alpha"], cfg["c"])
    except (ValueError, errors.DomainError) as exc:
        raise UsageError(f"bad method {text!r}: {exc}") from exc


def _input_path(cfg) -> Path:
    raw = cfg["input"] or DEFAULT_INPUT
    path = Path(raw)
    data_dir = os.environ.get(DATA_DIR_ENV)
    if not path.is_absolute() and not path.exists() and data_dir:
        path = Path(data_dir) / path
    return path


def _load(cfg):
    data = load_claims(_input_path(cfg), cfg["year_column"], cfg["claim_column"], cfg["scale_factor"])
    years = cfg["years"] or data.available_years
    samples = {y: filter_year(data, y) for y in years}
    return data, samples


def _spec(cfg) -> AccumulationSpec:
    return AccumulationSpec(cfg["kind"], cfg["alpha"], cfg["c"])


def _select(values, cfg, spec):
    grid = build_candidate_grid(
        values, cfg["grid_lower"], cfg["grid_upper"], cfg["grid_count"], MIN_EXCEEDANCES
    )
    return select_threshold(values, grid, spec, cfg["gof_method"], n_boot=cfg["n_boot"], seed=cfg["seed"])


def _num(v):
    if v is None:
        return None
    v = float(v)
    return None if math.isnan(v) else v


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def _envelope(cfg, body: dict) -> dict:
    # where the files go does not belong in their content
    keep = {k: cfg[k] for k in sorted(cfg) if k not in ("methods", "out_dir", "formats")}
    keep["methods"] = [m.label + f":{m.alpha:g}" for m in cfg["methods"]] if cfg["methods"] else None
    return {"schema_version": SCHEMA_VERSION, "command": cfg["command"], "config": keep, **body}


def cmd_summarize(cfg) -> dict[str, str]:
    _, samples = _load(cfg)
    rows = []
    for year, values in samples.items():
        s = summary_stats(values)
        rows.append({"year": year, **s.as_dict()})
    text = [["Year", "n", "Mean", "SD", "Q1", "Q2", "Q3", "Max"]]
    for r in rows:
        text.append([str(r["year"]), str(r["n"])] + [f"{r[k]:.3f}" for k in ("mean", "sd", "q1", "q2", "q3", "max")])
    csv_lines = ["year,n,mean,sd,q1,q2,q3,max"] + [
        ",".join(repr(r[k]) if isinstance(r[k], float) else str(r[k]) for k in ("year", "n", "mean", "sd", "q1", "q2", "q3", "max"))
        for r in rows
    ]
    return {
        "summary.json": json.dumps(_envelope(cfg, {"years": rows}), indent=2),
        "summary.txt": _table(text),
        "summary.csv": "\n".join(csv_lines) + "\n",
    }


def _selection_record(year, values, res) -> dict:
    fit = res.chosen_fit
    return {
        "year": year,
        "n": int(values.size),
        "method": res.spec.label,
        "alpha": res.spec.alpha,
        "status": res.status.value,
        "k_hat": res.k_hat,
        "threshold": res.chosen_threshold,
        "sigma": _num(fit.params.sigma) if fit else None,
        "gamma": _num(fit.params.gamma) if fit else None,
        "n_exceedances": fit.n_exceedances if fit else None,
        "candidates": [
            {
                "threshold": float(t),
                "p_value": float(p),
                "statistic": _num(a),
                "running_average": _num(avg),
                "fit_failed": bool(f),
            }
            for t, p, a, avg, f in zip(res.grid.thresholds, res.p_values, res.statistics, res.running_averages, res.failed)
        ],
    }


def cmd_select(cfg) -> dict[str, str]:
    _, samples = _load(cfg)
    spec = _spec(cfg)
    records = [_selection_record(y, v, _select(v, cfg, spec)) for y, v in samples.items()]
    text = [["Year", "n", "Method", "alpha", "Threshold", "Scale", "Shape", "k_hat", "Status"]]
    for r in records:
        text.append([
            str(r["year"]), str(r["n"]), r["method"], f"{r['alpha']:g}",
            "-" if r["threshold"] is None else f"{r['threshold']:.3f}",
            "-" if r["sigma"] is None else f"{r['sigma']:.3f}",
            "-" if r["gamma"] is None else f"{r['gamma']:.3f}",
            str(r["k_hat"]), r["status"],
        ])
    outputs = {
        "select.json": json.dumps(_envelope(cfg, {"years": records}), indent=2),
        "select.txt": _table(text),
    }
    if any(r["status"] == Status.NO_THRESHOLD.value for r in records):
        raise NoThreshold(outputs)
    return outputs


def cmd_var(cfg) -> dict[str, str]:
    _, samples = _load(cfg)
    spec = _spec(cfg)
    records = []
    missing = False
    for year, values in samples.items():
        if cfg["threshold"] is not None:
            fit = fit_gpd(ExceedanceSet.from_data(values, cfg["threshold"]))
            origin = {"source": "explicit", "threshold": cfg["threshold"]}
        else:
            res = _select(values, cfg, spec)
            fit = res.chosen_fit
            origin = {"source": res.spec.label, "alpha": spec.alpha, "status": res.status.value, "threshold": res.chosen_threshold}
        rec = {"year": year, "n": int(values.size), "selection": origin, "levels": []}
        if fit is None:
            missing = True
        else:
            rec.update(sigma=fit.params.sigma, gamma=fit.params.gamma, n_exceedances=fit.n_exceedances)
        for lv in cfg["levels"]:
            emp = empirical_var(values, lv)
            item = {"level": lv, "empirical": emp}
            if fit is not None:
                est = var_with_ci(fit, lv, cfg["ci_level"])
                item.update(
                    var=est.var, omega=est.omega, ci_lower=est.ci_lower, ci_upper=est.ci_upper,
                    ci_level=est.ci_level, ci_excludes_empirical=not est.covers(emp),
                )
            rec["levels"].append(item)
        records.append(rec)
    text = [["Year", "Row"] + [f"VaR({lv:g}) ({cfg['ci_level']:.0%} CI)" for lv in cfg["levels"]]]
    for r in records:
        text.append([str(r["year"]), "Empirical"] + [f"{it['empirical']:.2f}" for it in r["levels"]])
        cells = []
        for it in r["levels"]:
            if "var" not in it:
                cells.append("-")
                continue
            mark = " *" if it["ci_excludes_empirical"] else ""
            cells.append(f"{it['var']:.2f} ({it['ci_lower']:.2f}, {it['ci_upper']:.2f}){mark}")
        text.append(["", r["selection"]["source"]] + cells)
    body = _table(text) + "* CI does not cover the empirical VaR\n"
    outputs = {"var.json": json.dumps(_envelope(cfg, {"years": records}), indent=2), "var.txt": body}
    if missing:
        raise NoThreshold(outputs)
    return outputs


def cmd_simulate(cfg) -> dict[str, str]:
    try:
        specs = load_scenarios(cfg["scenarios"])
    except (OSError, yaml.YAMLError, KeyError, TypeError) as exc:
        raise UsageError(f"bad scenario file {cfg['scenarios']}: {exc}") from exc
    if cfg["replicates"] is not None:
        from dataclasses import replace

        specs = [replace(s, replicates=cfg["replicates"]) for s in specs]
    table = scenario_table(specs)
    js = json.loads(table.to_json())
    return {
        "simulation.csv": table.to_csv(),
        "simulation.json": json.dumps(_envelope(cfg, {"rows": js["rows"]}), indent=2),
        "simulation.txt": table.to_text(),
    }


def cmd_plot_cdf(cfg) -> dict[str, str]:
    _, samples = _load(cfg)
    methods = cfg["methods"] or [AccumulationSpec(k, cfg["alpha"], cfg["c"]) for k in Kind]
    outputs = {}
    for year, values in samples.items():
        fits = {}
        for m in methods:
            fit = _select(values, cfg, m).chosen_fit
            if fit is not None:
                fits[f"{m.label} a={m.alpha:g}"] = fit.params
        x, curves = cdf_curves(values, fits)
        outputs[f"cdf_{year}.csv"] = curves_csv(x, curves, year)
        outputs[f"cdf_{year}.svg"] = curves_svg(x, curves, title=f"{year}: empirical vs fitted GPD CDFs")
    return outputs


COMMANDS = {
    "summarize": cmd_summarize,
    "select": cmd_select,
    "var": cmd_var,
    "simulate": cmd_simulate,
    "plot-cdf": cmd_plot_cdf,
}


def _filter_formats(outputs: dict[str, str], formats) -> dict[str, str]:
    ext = {"json": ".json", "text": ".txt", "csv": ".csv"}
    wanted = {ext[f] for f in formats}
    # plot data always travels with its figure
    return {k: v for k, v in outputs.items() if Path(k).suffix in wanted or k.startswith("cdf_")}


def _write(outputs: dict[str, str], cfg) -> None:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    for name, body in _filter_formats(outputs, cfg["formats"]).items():
        (out / name).write_text(body, encoding="utf-8")
    for name, body in outputs.items():
        if name.endswith(".txt") and "text" in cfg["formats"]:
            sys.stdout.write(body)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(ns)
        outputs = COMMANDS[cfg["command"]](cfg)
    except (UsageError, errors.InvalidSpec) as exc:
        print(f"potsel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoThreshold as exc:
        _write(exc.outputs, cfg)
        print("potsel: no threshold could be identified within the candidates", file=sys.stderr)
        return EXIT_NO_THRESHOLD
    except (errors.FileUnreadable, errors.SchemaMismatch, errors.EmptyAfterParse,
            errors.YearAbsent, errors.DegenerateGrid, errors.InsufficientData) as exc:
        msg = f"year {exc.args[0]} not present in the data" if isinstance(exc, errors.YearAbsent) else str(exc)
        print(f"potsel: data error: {msg}", file=sys.stderr)
        return EXIT_DATA
    except (errors.NonConvergence, errors.NonPositiveVariance, errors.RegularityViolation) as exc:
        print(f"potsel: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except errors.DomainError as exc:
        print(f"potsel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(outputs, cfg)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
