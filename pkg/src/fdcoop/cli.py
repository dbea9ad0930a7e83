# Command-line entry point: config loading, subcommand dispatch, CSV/JSON output.
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Optional, Sequence

from .allocator import OversubscriptionError
from .concavity_audit import DEFAULT_AUDIT_STEP, audit_concavity
from .lapjv import brute_force_assignment, read_matrix_file, solve_rectangular
from .montecarlo import SweepPoint, SweepSpec, run_sweep, run_trial
from .scenario import ConfigError, ScenarioConfig, scenario_from_dict

CSV_HEADER = ("pmax_dbm,si_mode,k1,k2,trials,"
              "mean_sum_rate_bps_hz,ci95_halfwidth,outage_fraction")
_SWEEP_KEYS = {"pmax_user_dbm_values", "si_modes", "trials_per_point", "group_sizes"}


def _read_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - {"scenario", "sweep"}
    if unknown:
        raise ConfigError(f"unknown key '{sorted(unknown)[0]}' at config top level "
                          "(expected 'scenario' and/or 'sweep' sections)")
    for key in ("scenario", "sweep"):
        if key in data and not isinstance(data[key], dict):
            raise ConfigError(f"section '{key}' must be a JSON object")
    return data


def _parse_override(text: str) -> tuple[str, str, object]:
    """'key=value' or 'section.key=value' -> (section, key, parsed value)."""
    if "=" not in text:
        raise ConfigError(f"override '{text}' must look like key=value")
    key, raw = text.split("=", 1)
    section = "scenario"
    if "." in key:
        section, key = key.split(".", 1)
        if section not in ("scenario", "sweep"):
            raise ConfigError(f"override section '{section}' unknown")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(value, (list, dict)):
        raise ConfigError(f"override '{key}': lists are only settable in the JSON file")
    return section, key, value


def _apply_overrides(data: dict, overrides: Sequence[str]) -> dict:
    merged = {"scenario": dict(data.get("scenario", {})),
              "sweep": dict(data.get("sweep", {}))}
    for text in overrides or ():
        section, key, value = _parse_override(text)
        if section == "sweep" and key not in _SWEEP_KEYS:
            raise ConfigError(f"unknown key '{key}' in sweep config")
        merged[section][key] = value
    return merged


def load_config(path: str, overrides: Sequence[str] = ()) -> ScenarioConfig:
    """Scenario from the JSON file's 'scenario' section with overrides applied."""
    merged = _apply_overrides(_read_config_file(path), overrides)
    return scenario_from_dict(merged["scenario"])


def load_sweep_spec(path: str, overrides: Sequence[str] = ()) -> SweepSpec:
    """SweepSpec from the JSON file's sections with overrides applied."""
    merged = _apply_overrides(_read_config_file(path), overrides)
    base = scenario_from_dict(merged["scenario"])
    sweep = merged["sweep"]
    unknown = set(sweep) - _SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown key '{sorted(unknown)[0]}' in sweep config")
    kwargs = {}
    if "pmax_user_dbm_values" in sweep:
        kwargs["pmax_user_dbm_values"] = tuple(sweep["pmax_user_dbm_values"])
    if "si_modes" in sweep:
        kwargs["si_modes"] = tuple(sweep["si_modes"])
    if "trials_per_point" in sweep:
        val = sweep["trials_per_point"]
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError("field 'trials_per_point': expected integer")
        kwargs["trials_per_point"] = val
    if "group_sizes" in sweep:
        try:
            kwargs["group_sizes"] = tuple((int(a), int(b)) for a, b in sweep["group_sizes"])
        except (TypeError, ValueError):
            raise ConfigError("field 'group_sizes': expected a list of [k1, k2] pairs")
    return SweepSpec(base=base, **kwargs)


@contextmanager
def _open_out(path: Optional[str]):
    """Writable text handle: stdout for None or '-', else the file (LF endings)."""
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def format_sweep_csv(points: Sequence[SweepPoint]) -> str:
    """Byte-stable CSV: fixed column order, 9 significant digits, LF endings."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(f"{p.pmax_dbm:.9g},{p.si_mode},{p.k1},{p.k2},{p.trials},"
                     f"{p.mean_sum_rate:.9g},{p.ci95_halfwidth:.9g},"
                     f"{p.outage_fraction:.9g}")
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.config, args.set or ())
    points = run_sweep(spec)
    with _open_out(args.out) as fh:
        fh.write(format_sweep_csv(points))
    if args.figures:
        from .plots import render_sweep_figures
        for path in render_sweep_figures(points, args.figures):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_trial(args) -> int:
    config = load_config(args.config, args.set or ())
    report = run_trial(config, args.trial_index)
    with _open_out(args.out) as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_audit(args) -> int:
    report = audit_concavity(n_points=args.points, seed=args.seed, step=args.step)
    with _open_out(args.out) as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_lap(args) -> int:
    matrix = read_matrix_file(args.matrix)
    if args.brute_force:
        result = brute_force_assignment(matrix)
    else:
        result = solve_rectangular(matrix)
    with _open_out(args.out) as fh:
        for i, j in enumerate(result.row_to_col):
            if j >= 0:
                fh.write(f"{i} {j} {matrix.costs[i, j]:.9g}\n")
        fh.write(f"total_cost {result.total_cost:.9g}\n")
    return 0


def _cmd_report(args) -> int:
    points = _read_sweep_csv(args.csv)
    from .plots import render_sweep_figures
    for path in render_sweep_figures(points, args.out_dir):
        print(f"wrote {path}")
    return 0


def _read_sweep_csv(path: str) -> list[SweepPoint]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except FileNotFoundError:
        raise ConfigError(f"sweep CSV not found: {path}")
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"unrecognized sweep CSV header in {path}")
    points = []
    for ln in lines[1:]:
        cols = ln.split(",")
        if len(cols) != 8:
            raise ConfigError(f"malformed sweep CSV row: {ln!r}")
        points.append(SweepPoint(
            pmax_dbm=float(cols[0]), si_mode=cols[1], k1=int(cols[2]),
            k2=int(cols[3]), trials=int(cols[4]), mean_sum_rate=float(cols[5]),
            ci95_halfwidth=float(cols[6]), outage_fraction=float(cols[7])))
    return points


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdcoop",
        description="Uplink resource allocation for a full-duplex cooperative "
                    "OFDMA cell: Monte-Carlo sweeps, single trials, concavity "
                    "audits and assignment solving.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep and emit CSV")
    p.add_argument("--config", required=True, help="JSON config (scenario + sweep sections)")
    p.add_argument("--out", default="-", help="output CSV path, or - for stdout")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config field (e.g. seed=7, sweep.trials_per_point=50)")
    p.add_argument("--figures", metavar="DIR",
                   help="also render sweep figures into this directory")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("trial", help="run one trial and emit its rate report as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--trial-index", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=_cmd_trial)

    p = sub.add_parser("audit", help="run the concavity audit and emit JSON")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=DEFAULT_AUDIT_STEP,
                   help="relative finite-difference step")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("lap", help="solve an assignment problem from a matrix file")
    p.add_argument("--matrix", required=True,
                   help="whitespace-delimited file: first line 'rows cols', then entries")
    p.add_argument("--brute-force", action="store_true",
                   help="use the enumeration oracle instead of the solver")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_lap)

    p = sub.add_parser("report", help="render figures from an existing sweep CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Dispatch a CLI invocation: 0 success, 1 validation error, 2 runtime error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OversubscriptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures map to exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
