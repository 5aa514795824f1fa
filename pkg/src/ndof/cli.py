"""Command-line scenario runner.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from typing import List, Optional

from . import builtins, scenarios
from .errors import (ConfigError, DegenerateSpectrum, InsufficientSpectrum, NdofError,
                     NumericalFailure, SingularKernel)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NUMERICAL = (NumericalFailure, DegenerateSpectrum, InsufficientSpectrum, SingularKernel)

log = logging.getLogger("ndof")


def _exit_code(exc: Exception) -> int:
    return EXIT_NUMERICAL if isinstance(exc, _NUMERICAL) else EXIT_CONFIG


def _load(source: str) -> List[scenarios.ScenarioConfig]:
    name, _, case = source.partition(":")
    if name in builtins.BUILTINS:
        docs = builtins.get_builtin(name).configs()
        if case:
            docs = [d for d in docs if d["id"].rsplit("/", 1)[-1] == case]
            if not docs:
                raise ConfigError(f"builtin {name!r} has no case {case!r}")
        return [scenarios.parse_config(d) for d in docs]
    if not os.path.exists(source):
        raise ConfigError(f"{source!r} is neither a file nor a builtin scenario "
                          f"(see --list-builtins)")
    return [scenarios.load_config(source)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ndof",
        description="Degrees of freedom and channel strength between two regions.")
    p.add_argument("--scenario", help="scenario JSON file or builtin name (NAME or NAME:CASE)")
    p.add_argument("--output-dir", help="directory for CSV/JSON output (default: config or '.')")
    p.add_argument("--format", choices=["csv", "json", "both"],
                   help="output format (default: config or 'both')")
    p.add_argument("--points-per-wavelength", type=float,
                   help="override the sampling density of every scenario")
    p.add_argument("--max-modes", type=int,
                   help="truncate stored spectra to this many modes (metrics use all)")
    p.add_argument("--list-builtins", action="store_true", help="list builtin scenarios and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _list_builtins(out):
    for b in builtins.BUILTINS.values():
        cases = [d["id"] for d in b.configs()]
        out.write(f"{b.name}\n  {b.summary}\n  expected: {b.expected}\n"
                  f"  cases: {', '.join(c.rsplit('/', 1)[-1] if '/' in c else c for c in cases)}\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.list_builtins:
        _list_builtins(sys.stdout)
        return EXIT_OK
    if not args.scenario:
        parser.print_usage(sys.stderr)
        sys.stderr.write("error: --scenario is required\n")
        return EXIT_CONFIG
    if args.max_modes is not None and args.max_modes < 1:
        sys.stderr.write("error: --max-modes must be positive\n")
        return EXIT_CONFIG
    if args.points_per_wavelength is not None and not args.points_per_wavelength >= 2:
        sys.stderr.write("error: --points-per-wavelength must be >= 2\n")
        return EXIT_CONFIG

    try:
        configs = _load(args.scenario)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG

    status = EXIT_OK
    all_records = []
    out_dir = None
    fmt = "both"
    for cfg in configs:
        if args.points_per_wavelength is not None:
            cfg = dataclasses.replace(cfg, points_per_wavelength=args.points_per_wavelength)
        out_dir = args.output_dir or cfg.output_dir or "."
        fmt = args.format or cfg.output_format
        log.info("running %s (%d point(s))", cfg.id, len(cfg.points()))
        try:
            records = scenarios.run_scenario(cfg)
        except NdofError as exc:
            code = _exit_code(exc)
            kind = "numerical failure" if code == EXIT_NUMERICAL else "config error"
            sys.stderr.write(f"{kind}: {exc}\n")
            status = status or code
            continue
        os.makedirs(out_dir, exist_ok=True)
        if fmt in ("csv", "both"):
            for r in records:
                if r.spectrum is not None:
                    scenarios.emit_spectrum_csv(r, scenarios.spectrum_csv_path(r, out_dir),
                                                args.max_modes)
        for r in records:
            v = r.values
            log.info("%s[%d]: n_e=%s n_r=%s n_c=%s n_a=%s", r.scenario, r.index,
                     v.get("n_e"), v.get("n_r"), v.get("n_c"), v.get("n_a"))
        all_records.extend(records)

    if all_records and fmt in ("json", "both"):
        name = args.scenario.partition(":")[0]
        stem = os.path.splitext(os.path.basename(name))[0] if os.path.exists(name) else name
        path = os.path.join(out_dir, f"{scenarios._safe_name(stem)}_report.json")
        scenarios.emit_report_json(all_records, path)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
