"""Command line entry point: ``satghi synth | validate | run``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import DataError, NumericalError, ParseError
from .ingest import validate_csv
from .pipeline import SHIFT_SIGNS, RunConfig, StageError, run
from .synth import SynthConfig, write_fixtures

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="satghi", description="Map satellite GHI onto ground-station GHI, month by month.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="write synthetic ground/satellite CSV fixtures")
    p.add_argument("--config", help="JSON file with SynthConfig fields")
    p.add_argument("--out", required=True, help="directory for ground.csv and satellite.csv")
    p.add_argument("--latitude", type=float)
    p.add_argument("--years", type=int, nargs="+")
    p.add_argument("--bias-scale", type=float)
    p.add_argument("--bias-offset", type=float)
    p.add_argument("--noise-sigma", type=float)
    p.add_argument("--noise-peak-fraction", type=float)
    p.add_argument("--cloudiness", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--shift-steps", type=int, default=2,
                   help="displacement baked into the satellite file (undone by `run`)")

    p = sub.add_parser("validate", help="report row count, gaps and duplicates of a CSV file")
    p.add_argument("path")

    p = sub.add_parser("run", help="run the full calibration pipeline")
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--ground", dest="ground_path")
    p.add_argument("--satellite", dest="satellite_path")
    p.add_argument("--shift-steps", type=int)
    p.add_argument("--shift-sign", choices=sorted(SHIFT_SIGNS))
    p.add_argument("--epsilon", type=float)
    p.add_argument("--split-ratio", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--boxplot-month", type=int)
    p.add_argument("--out", dest="output_dir")
    return parser


def cmd_synth(args) -> int:
    values = _load_json(args.config)
    overrides = {
        "latitude": args.latitude,
        "years": tuple(args.years) if args.years else None,
        "bias_scale": args.bias_scale,
        "bias_offset": args.bias_offset,
        "noise_sigma": args.noise_sigma,
        "noise_peak_fraction": args.noise_peak_fraction,
        "cloudiness": args.cloudiness,
        "seed": args.seed,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("years", "peak_ghi_by_month"):
        if key in values:
            values[key] = tuple(values[key])
    try:
        config = SynthConfig(**values)
    except TypeError as exc:
        raise DataError(f"bad synth config: {exc}") from exc
    try:
        paths = write_fixtures(config, args.out, args.shift_steps)
    except OSError as exc:
        raise DataError(f"cannot write fixtures to {args.out}: {exc}") from exc
    print(f"wrote {paths.ground} and {paths.satellite} ({paths.hours} hourly rows)")
    return EXIT_OK


def cmd_validate(args) -> int:
    path = Path(args.path)
    if not path.is_file():
        raise DataError(f"input file not found: {path}")
    rep = validate_csv(path.read_text(encoding="utf-8"))
    print(f"file:        {path}")
    print("\n".join(rep.lines()))
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {k: getattr(args, k) for k in (
        "ground_path", "satellite_path", "shift_steps", "shift_sign", "epsilon",
        "split_ratio", "seed", "workers", "boxplot_month", "output_dir",
    )}
    config = RunConfig.from_sources(_load_json(args.config), overrides)
    outcome = run(config)
    for r in outcome.fits.results:
        print(f"month {r.month:2d}: r2_test={r.r2_test:.4f} r2_train={r.r2_train:.4f} "
              f"n_train={r.n_train} n_test={r.n_test}")
    for month, reason in sorted(outcome.fits.skipped.items()):
        print(f"month {month:2d}: skipped ({reason})")
    print(f"report written to {config.output_dir} ({len(outcome.manifest['artifacts'])} files)")
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "validate": cmd_validate, "run": cmd_run}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL if exc.numerical else EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, ParseError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
