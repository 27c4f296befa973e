"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 runtime failure.

Files written by ``run`` (all into ``--out``)::

    report.json                       full report, re-loadable with load_report()
    ber_curve_<label>.csv             snr_db,ber_pre_mlsd,ber_post_mlsd,bit_errors,bits_compared
    ber_comparison.csv                label + the ber_curve columns, all trainers
    mse_trace_<label>_<snr>dB.csv     iteration,mse
    equalized_<label>_<snr>dB.csv     only with [output] equalized = true or --equalized

``bit_errors``/``bits_compared`` count the final decision stage (after MLSD
when it is enabled).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

from adamffe.config import ConfigError, ExperimentConfig, load_config
from adamffe.errors import StageError
from adamffe.metrics import complexity_adam, complexity_lms, complexity_rls
from adamffe.pipeline import ExperimentReport, run_experiment, run_sweep, sweep_config

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
BER_COLUMNS = ["snr_db", "ber_pre_mlsd", "ber_post_mlsd", "bit_errors", "bits_compared"]
BUILTIN_PREFIX = "builtin:"
ALGORITHM_NAMES = {"adam": "BGD-Adam", "lms": "LMS", "rls": "RLS"}


class UsageError(Exception):
    pass


def preset_names() -> list[str]:
    root = resources.files("adamffe") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def resolve_config(spec: str) -> ExperimentConfig:
    """Load ``spec`` as a file path, or a shipped preset via ``builtin:<name>``."""
    if spec.startswith(BUILTIN_PREFIX):
        name = spec[len(BUILTIN_PREFIX):]
        if name not in preset_names():
            raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
        with resources.as_file(resources.files("adamffe") / "presets" / f"{name}.toml") as path:
            return load_config(path)
    return load_config(spec)


def load_report(path) -> ExperimentReport:
    """Read a ``report.json`` back into an :class:`ExperimentReport`."""
    return ExperimentReport.from_dict(json.loads(Path(path).read_text()))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v
                         for v in row])
    return buf.getvalue()


def _snr_tag(snr: float) -> str:
    return f"{snr!r}dB"


def bundle_files(report: ExperimentReport, samples: bool = False) -> dict[str, str]:
    """File name -> text content of one run's output bundle."""
    files = {"report.json": json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n"}
    comparison = []
    for label in report.labels:
        rows = report.ber_curve(label)
        files[f"ber_curve_{label}.csv"] = _csv_text(
            BER_COLUMNS, ([r[c] for c in BER_COLUMNS] for r in rows))
        comparison += [[label] + [r[c] for c in BER_COLUMNS] for r in rows]
        for p in report.points:
            result = p.trainers[label]
            trace = result.train.mse_trace
            files[f"mse_trace_{label}_{_snr_tag(p.snr_db)}.csv"] = _csv_text(
                ["iteration", "mse"], ((i + 1, float(v)) for i, v in enumerate(trace)))
            if samples and result.equalized is not None:
                decided = result.decided if result.decided is not None else [None] * len(
                    result.equalized)
                files[f"equalized_{label}_{_snr_tag(p.snr_db)}.csv"] = _csv_text(
                    ["index", "equalized", "decided"],
                    ((i, float(s), None if d is None else float(d))
                     for i, (s, d) in enumerate(zip(result.equalized, decided))))
    files["ber_comparison.csv"] = _csv_text(["label"] + BER_COLUMNS, comparison)
    return files


def write_files(out_dir: Path, files: dict[str, str]) -> None:
    """Write every file to a temporary name first, then rename them all into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            target = out_dir / name
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, target))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)


def _parse_value(token: str):
    token = token.strip()
    for kind in (int, float):
        try:
            return kind(token)
        except ValueError:
            pass
    if token.lower() in ("true", "false"):
        return token.lower() == "true"
    return token


def cmd_run(args) -> int:
    cfg = resolve_config(args.config)
    samples = args.equalized or cfg.output.equalized
    report = run_experiment(cfg, workers=args.workers, keep_samples=samples)
    write_files(Path(args.out), bundle_files(report, samples))
    for label in report.labels:
        for row in report.ber_curve(label):
            post = row["ber_post_mlsd"]
            print(f"{label:>10}  snr={row['snr_db']:6.2f} dB  ber_pre={row['ber_pre_mlsd']:.3e}"
                  + ("" if post is None else f"  ber_post={post:.3e}"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    values = [_parse_value(v) for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values must list at least one value")
    base = resolve_config(args.config)
    try:
        for value in values:
            sweep_config(base, args.param, value)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    samples = args.equalized or base.output.equalized
    reports = run_sweep(base, args.param, values, workers=args.workers, keep_samples=samples)
    files, merged, curves = {}, [], {}
    for index, (value, report) in enumerate(zip(values, reports)):
        sub = f"{args.param}={value}"
        for name, text in bundle_files(report, samples).items():
            files[f"{sub}/{name}"] = text
        for label in report.labels:
            for row in report.ber_curve(label):
                merged.append((label, row["snr_db"], index,
                               [args.param, value, label] + [row[c] for c in BER_COLUMNS]))
                curves.setdefault(label, []).append(row)
    merged.sort(key=lambda item: item[:3])
    files["sweep_comparison.csv"] = _csv_text(["param", "value", "label"] + BER_COLUMNS,
                                              (item[3] for item in merged))
    if args.param == "snr_db":
        for label, rows in curves.items():
            rows = sorted(rows, key=lambda r: r["snr_db"])
            files[f"ber_curve_{label}.csv"] = _csv_text(
                BER_COLUMNS, ([r[c] for c in BER_COLUMNS] for r in rows))
    write_files(Path(args.out), files)
    print(f"wrote {len(reports)} reports to {args.out}")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def complexity_rows(M: list[int], N: int, I: int | None, algorithms: list[str]):
    if len(M) not in (1, len(algorithms)):
        raise UsageError(f"--M takes one value or one per algorithm ({len(algorithms)})")
    Ms = M * len(algorithms) if len(M) == 1 else M
    rows = []
    for alg, m in zip(algorithms, Ms):
        try:
            if alg == "adam":
                if I is None:
                    raise UsageError("--I is required when adam is requested")
                rep = complexity_adam(m, N, I)
            elif alg == "lms":
                rep = complexity_lms(m, N)
            else:
                rep = complexity_rls(m, N)
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from exc
        rows.append((ALGORITHM_NAMES[alg], rep.M, rep.operations, rep.run_mode))
    return rows


def cmd_complexity(args) -> int:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    unknown = set(algorithms) - set(ALGORITHM_NAMES)
    if unknown or not algorithms:
        raise UsageError(f"unknown algorithm(s): {', '.join(sorted(unknown)) or '(none)'}")
    rows = complexity_rows(args.M, args.N, args.I, algorithms)
    header = ("algorithm", "M", "operations", "run_mode")
    if args.csv:
        sys.stdout.write(_csv_text(header, rows))
    else:
        print(f"{header[0]:<10} {header[1]:>6} {header[2]:>12} {header[3]:>9}")
        for name, m, ops, mode in rows:
            print(f"{name:<10} {m:>6} {ops:>12} {mode:>9}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adamffe", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("config", help="TOML file or builtin:<preset>")
    run.add_argument("--out", required=True)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--equalized", action="store_true", help="dump equalized samples")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a config once per parameter value")
    sweep.add_argument("config")
    sweep.add_argument("--param", required=True,
                       help="trainer, snr_db, or a dotted key such as frame.training_len")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--equalized", action="store_true")
    sweep.set_defaults(func=cmd_sweep)

    comp = sub.add_parser("complexity", help="training operation counts")
    comp.add_argument("--M", type=_int_list, required=True,
                      help="training length, or one per algorithm (e.g. 300,1200,300)")
    comp.add_argument("--N", type=int, required=True)
    comp.add_argument("--I", type=int, default=None)
    comp.add_argument("--algorithms", default="adam,lms,rls")
    comp.add_argument("--csv", action="store_true")
    comp.set_defaults(func=cmd_complexity)

    sub.add_parser("presets", help="list shipped presets").set_defaults(
        func=lambda args: print("\n".join(preset_names())) or EXIT_OK)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("adamffe: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"adamffe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"adamffe: runtime error in stage {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:
        print(f"adamffe: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
