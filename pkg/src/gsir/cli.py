"""Command-line front end.

Subcommands: theory, sim-rate, kernel-recovery (experiment runners driven by
a JSON config), plus fit and predict (train a model to JSON, evaluate it on
new points).  Exit codes: 0 success, 2 config/usage error, 3 numerical
failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .datasets import SyntheticModel, generate
from .estimator import evaluate_predictors, fit_gsir1, fit_gsir2
from .experiments import (ConfigError, SCHEMA_VERSION, _as_int, _as_kernel,
                          _as_real, _reject_unknown, _require, _resolve_kernel,
                          load_config, run_experiment)
from .linalg import NumericalError
from .modelio import load_fit, save_fit

_MODE_BY_COMMAND = {"theory": "theory_table", "sim-rate": "sim_rate",
                    "kernel-recovery": "kernel_recovery"}


def _read_table(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read data file {path}: {exc}") from exc
    if len(rows) < 2:
        raise ConfigError(f"data file {path} needs a header row and data rows")
    return rows[0], rows[1:]


def _columns(header, prefix, path):
    """Indices of prefix_1..prefix_k columns (or the bare name), in order."""
    if prefix in header:
        return [header.index(prefix)]
    found = {}
    for idx, name in enumerate(header):
        if name.startswith(prefix + "_"):
            try:
                j = int(name[len(prefix) + 1:])
            except ValueError:
                continue
            found[j] = idx
    if not found:
        return []
    expected = list(range(1, len(found) + 1))
    if sorted(found) != expected:
        raise ConfigError(f"data file {path} has non-contiguous {prefix}_* "
                          f"columns: {sorted(found)}")
    return [found[j] for j in expected]


def _parse_block(body, idxs, path):
    try:
        return np.array([[float(row[i]) for i in idxs] for row in body])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"data file {path} has malformed rows: {exc}") from exc


def read_points_csv(path, need_response):
    """Read x_1..x_p (and y columns when fitting) from a CSV file."""
    header, body = _read_table(path)
    x_idx = _columns(header, "x", path)
    if not x_idx:
        raise ConfigError(f"data file {path} has no x_1..x_p columns")
    x = _parse_block(body, x_idx, path)
    if not need_response:
        return x, None
    y_idx = _columns(header, "y", path)
    if not y_idx:
        raise ConfigError(f"data file {path} has no y column(s)")
    return x, _parse_block(body, y_idx, path)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _run_fit(args):
    doc = _load_json(args.config)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    allowed = ("schema_version", "data_csv", "dataset", "variant", "kernel_x",
               "kernel_y", "epsilon", "d", "base_seed", "output_path")
    _reject_unknown(doc, allowed, "fit config")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version "
                          f"{doc.get('schema_version')!r}; expected {SCHEMA_VERSION}")
    variant = _require(doc, "variant", "fit config")
    if variant not in ("gsir1", "gsir2"):
        raise ConfigError(f"field 'variant' must be gsir1 or gsir2, got {variant!r}")
    epsilon = _as_real(_require(doc, "epsilon", "fit config"), "epsilon",
                       positive=True)
    d = _as_int(_require(doc, "d", "fit config"), "d", minimum=1)
    has_csv = "data_csv" in doc
    has_synth = "dataset" in doc
    if has_csv == has_synth:
        raise ConfigError("fit config needs exactly one of 'data_csv' or 'dataset'")
    if has_csv:
        x, y = read_points_csv(str(doc["data_csv"]), need_response=True)
    else:
        ds = doc["dataset"]
        if not isinstance(ds, dict):
            raise ConfigError(f"field 'dataset' must be an object, got {ds!r}")
        _reject_unknown(ds, ("model", "p", "sigma_noise", "n"), "dataset section")
        try:
            model = SyntheticModel(name=str(_require(ds, "model", "dataset section")),
                                   p=_as_int(_require(ds, "p", "dataset section"),
                                             "dataset.p", minimum=1),
                                   sigma_noise=_as_real(
                                       _require(ds, "sigma_noise", "dataset section"),
                                       "dataset.sigma_noise"))
        except ValueError as exc:
            raise ConfigError(f"invalid dataset section: {exc}") from exc
        n = _as_int(_require(ds, "n", "dataset section"), "dataset.n", minimum=3)
        seed = args.seed if args.seed is not None else doc.get("base_seed", 0)
        x, y, _ = generate(model, n, _as_int(seed, "base_seed", minimum=0))
    kx = _resolve_kernel(_as_kernel(doc.get("kernel_x", {"family": "gaussian"}),
                                    "kernel_x"), x)
    ky = _resolve_kernel(_as_kernel(doc.get("kernel_y", {"family": "gaussian"}),
                                    "kernel_y"), y)
    out = args.out or str(doc.get("output_path", ""))
    if not out:
        raise ConfigError("fit needs an output path: give --out or 'output_path'")
    fit_fn = fit_gsir1 if variant == "gsir1" else fit_gsir2
    fit = fit_fn(x, y, kx, ky, epsilon, d)
    save_fit(fit, out)
    for note in fit.warnings:
        print(f"warning: {note}", file=sys.stderr)
    print(f"fit {variant}: n={x.shape[0]} d={d} eigenvalues="
          f"{[format(v, '.6g') for v in fit.eigenvalues]} -> {out}")


def _run_predict(args):
    doc = _load_json(args.config)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(doc, ("schema_version", "model_path", "data_csv",
                          "output_path"), "predict config")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version "
                          f"{doc.get('schema_version')!r}; expected {SCHEMA_VERSION}")
    model_path = str(_require(doc, "model_path", "predict config"))
    data_path = str(_require(doc, "data_csv", "predict config"))
    out = args.out or str(doc.get("output_path", ""))
    if not out:
        raise ConfigError("predict needs an output path: give --out or 'output_path'")
    try:
        fit = load_fit(model_path)
    except OSError as exc:
        raise ConfigError(f"cannot read model {model_path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid model document {model_path}: {exc}") from exc
    x, _ = read_points_csv(data_path, need_response=False)
    pred = evaluate_predictors(fit, x)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"pred_{j + 1}" for j in range(pred.shape[1])])
        for row in pred:
            writer.writerow([format(v, ".17g") for v in row])
    print(f"predict: {pred.shape[0]} points x {pred.shape[1]} predictors -> {out}")


def _run_experiment_command(args):
    config = load_config(args.config)
    expected = _MODE_BY_COMMAND[args.command]
    if config.mode != expected:
        raise ConfigError(f"config mode {config.mode!r} does not match "
                          f"subcommand {args.command!r} (expected {expected!r})")
    if args.seed is not None:
        if config.mode == "theory_table":
            raise ConfigError("theory_table takes no seed")
        config = type(config)(**{**config.__dict__, "base_seed": args.seed})
    if args.out:
        config = type(config)(**{**config.__dict__, "output_path": args.out})
    report = run_experiment(config, threads=args.threads)
    if config.output_path:
        print(f"{config.mode}: {len(report.rows)} rows -> {config.output_path}")
    else:
        print(f"{config.mode}: {len(report.rows)} rows (no output_path; "
              f"summary below)")
    print(json.dumps(report.summary, indent=2, default=str))


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="gsir",
        description="Nonlinear sufficient dimension reduction experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("theory", "tabulate optimal rates over an (alpha, beta) grid"),
            ("sim-rate", "sequence-space convergence experiment"),
            ("kernel-recovery", "synthetic-data recovery experiment"),
            ("fit", "fit a model and save it as JSON"),
            ("predict", "evaluate a saved model at new points")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default="", help="output path (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the base seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for replications")
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        if args.command in _MODE_BY_COMMAND:
            _run_experiment_command(args)
        elif args.command == "fit":
            _run_fit(args)
        else:
            _run_predict(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError, ValueError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
