"""Command-line entry point: ``cobaycpd {simulate,detect,eval,ablate}``.

Exit codes: 0 success, 2 usage or config error, 3 data or file error,
4 numerical failure. ``COBAY_LOG`` sets the log level (default WARNING).
"""

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from ._validation import DataError
from .datagen import SegmentSpec, generate_piecewise, stress_configs, synthetic_preset
from .detector import run
from .gibbs import NumericalError
from .io import (ConfigError, atomic_write, load_config, read_events, read_json, read_labels,
                 report_to_dict, write_events, write_json, write_labels)
from .metrics import aggregate, compute_mse, evaluate, match_changepoints

logger = logging.getLogger("cobaycpd")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4

ABLATION_GRIDS = {
    "bases": (1, 2, 3),
    "ci": (0.95, 0.90, 0.85),
    "sigma2": (0.01, 0.5, 10.0),
}
ABLATION_COLUMNS = ("axis_value", "fnr_mean", "fnr_std", "fpr_mean", "fpr_std",
                    "mse_mean", "mse_std", "rt_mean")


def parse_segments(text, weights):
    """``"5:n=42,10:n=93,3:t=15"`` -> list of :class:`SegmentSpec`.

    Each item is ``lambda_bar:n=<events>`` or ``lambda_bar:t=<duration>``.
    """
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            lam, size = item.split(":")
            key, value = size.split("=")
            if key == "n":
                out.append(SegmentSpec(float(lam), weights, n_events=int(value)))
            elif key == "t":
                out.append(SegmentSpec(float(lam), weights, duration=float(value)))
            else:
                raise ValueError(f"size key must be n or t, got {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad segment {item!r}: {exc}") from None
    if not out:
        raise ConfigError("empty --segments")
    return out


def parse_stress(text, weights):
    try:
        kind, level = text.split(":")
        return stress_configs(kind, float(level), weights)
    except ValueError as exc:
        raise ConfigError(f"bad --stress {text!r}: {exc}") from None


def _seed(args, config):
    return config.seed if args.seed is None else int(args.seed)


def _config(args):
    config = load_config(getattr(args, "config", None))
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed must be non-negative")
    return config


def _check_writable(*paths):
    for path in paths:
        if path is None:
            continue
        directory = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
            raise OSError(f"cannot write to {path}: directory missing or read-only")


def _labels_path(out):
    stem, _ = os.path.splitext(out)
    return stem + "_labels.csv"


def cmd_simulate(args):
    config = _config(args)
    weights = tuple(config.truth_weights)
    if args.segments and args.stress:
        raise ConfigError("use either --segments or --stress, not both")
    if args.segments:
        segments = parse_segments(args.segments, weights)
    elif args.stress:
        segments = parse_stress(args.stress, weights)
    else:
        segments = synthetic_preset(weights)
    labels = args.labels or _labels_path(args.out)
    _check_writable(args.out, labels)
    data = generate_piecewise(segments, config.basis, seed=_seed(args, config))
    write_events(args.out, data.timestamps)
    write_labels(labels, data.change_indices)
    print(f"wrote {len(data.timestamps)} events to {args.out}, "
          f"{len(data.change_indices)} change points to {labels}")
    return EXIT_OK


def _detector_config(args, config):
    if getattr(args, "n_jobs", None) is not None:
        config = config.with_overrides(detector={"n_jobs": args.n_jobs})
    return config


def cmd_detect(args):
    config = _detector_config(args, _config(args))
    _check_writable(args.out)
    seed = _seed(args, config)
    events = read_events(args.events, time_scale=args.time_scale, tie_epsilon=args.tie_epsilon)
    result = run(events, config.detector_config, seed=seed)
    payload = report_to_dict(result, config, seed, timing=not args.no_timing)
    if args.out:
        write_json(args.out, payload)
        print(f"{len(result.change_points)} change points: {result.change_points}")
    else:
        print(json.dumps(payload, indent=2))
    return EXIT_OK


def report_metrics(report, labels, tol):
    """Score a detection JSON (as loaded) against a list of true change indices."""
    tested = [s for s in report["steps"] if s["tested"]]
    if not tested:
        raise DataError("report has no tested steps")
    match = match_changepoints(labels, report["change_indices"], tol, tested_steps=len(tested))
    runtime = report.get("runtime_seconds")
    return {
        "fnr": match.fnr,
        "fpr": match.fpr,
        "mse": compute_mse([(s["pred_mean"], s["observed"]) for s in tested]),
        "rt_minutes": None if runtime is None else runtime / 60.0,
        "tp": match.tp, "fp": match.fp, "fn": match.fn, "tn": match.tn,
        "match_tol": int(tol),
    }


def _fmt(v, spec=".4f"):
    return "NA" if v is None else format(v, spec)


def _one_run(job):
    """Detect + evaluate one seed; top-level so it pickles for process pools."""
    config, seed, events, labels, tol = job
    if events is None:
        data = generate_piecewise(synthetic_preset(tuple(config.truth_weights)), config.basis,
                                  seed=seed)
        events, labels = data.timestamps, data.change_indices
    result = run(events, config.detector_config, seed=seed)
    return evaluate(result, labels, tol)


def _run_seeds(config, seeds, tol, events=None, labels=None, jobs=1):
    batch = [(config, s, events, labels, tol) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_one_run, batch))
    return [_one_run(j) for j in batch]


def cmd_eval(args):
    config = _config(args)
    tol = config.match_tol if args.tol is None else args.tol
    if tol < 0:
        raise ConfigError("--tol must be non-negative")
    _check_writable(args.out)
    if args.seeds is None:
        if args.report is None or args.labels is None:
            raise ConfigError("eval needs REPORT and LABELS unless --seeds is given")
        metrics = report_metrics(read_json(args.report), read_labels(args.labels), tol)
        print("fnr\tfpr\tmse\trt_minutes")
        print("\t".join(_fmt(metrics[k]) for k in ("fnr", "fpr", "mse", "rt_minutes")))
    else:
        if args.seeds < 1:
            raise ConfigError("--seeds must be positive")
        events = labels = None
        if args.events is not None:
            # with --events the single positional is the labels file
            label_path = args.labels or args.report
            if label_path is None:
                raise ConfigError("--events needs LABELS")
            events, labels = read_events(args.events), read_labels(label_path)
        base = _seed(args, config)
        reports = _run_seeds(config, range(base, base + args.seeds), tol, events, labels,
                             args.jobs)
        agg = aggregate(reports)
        metrics = {
            "n_runs": agg["n_runs"],
            "fnr": agg["fnr"], "fpr": agg["fpr"], "mse": agg["mse"],
            "rt_minutes": {k: v / 60.0 for k, v in agg["runtime"].items() if k != "text"},
            "runs": [r.to_dict() for r in reports],
            "match_tol": int(tol),
        }
        print("fnr\tfpr\tmse\trt_minutes")
        print("\t".join(agg[k]["text"] for k in ("fnr", "fpr", "mse"))
              + f"\t{metrics['rt_minutes']['mean']:.3f} ± {metrics['rt_minutes']['std']:.3f}")
    if args.out:
        write_json(args.out, metrics)
    return EXIT_OK


def ablation_config(config, axis, value):
    """Config for one grid point; ``bases`` keeps the first ``value`` shifts."""
    if axis == "bases":
        b = int(value)
        shifts = list(config.raw["model"]["shifts"])
        if not 1 <= b <= len(shifts):
            raise ConfigError(f"bases={b} but only {len(shifts)} shifts configured")
        weights = list(config.raw["truth"]["weights"])
        return config.with_overrides(model={"n_bases": b, "shifts": shifts[:b]},
                                     truth={"weights": weights[:b + 1]})
    if axis == "ci":
        return config.with_overrides(detector={"confidence_level": float(value)})
    if axis == "sigma2":
        return config.with_overrides(prior={"sigma2": float(value)})
    raise ConfigError(f"unknown axis {axis!r}")


def cmd_ablate(args):
    config = _config(args)
    if args.seeds < 1:
        raise ConfigError("--seeds must be positive")
    grid = ABLATION_GRIDS[args.axis] if args.grid is None else tuple(args.grid)
    points = [(v, ablation_config(config, args.axis, v)) for v in grid]
    _check_writable(args.out)
    base = _seed(args, config)
    # datasets always come from the full configured model so every grid point
    # sees the same events
    tol = config.match_tol
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ABLATION_COLUMNS)
    for value, cfg in points:
        jobs = []
        for s in range(base, base + args.seeds):
            data = generate_piecewise(synthetic_preset(tuple(config.truth_weights)),
                                      config.basis, seed=s)
            jobs.append((cfg, s, data.timestamps, data.change_indices, tol))
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                reports = list(pool.map(_one_run, jobs))
        else:
            reports = [_one_run(j) for j in jobs]
        agg = aggregate(reports)
        row = [repr(float(value))]
        for name in ("fnr", "fpr", "mse"):
            row += [repr(agg[name]["mean"]), repr(agg[name]["std"])]
        row.append(repr(agg["runtime"]["mean"] / 60.0))
        writer.writerow(row)
        logger.info("ablate %s=%g done", args.axis, value)
    if args.out:
        atomic_write(args.out, buf.getvalue())
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def build_parser():
    seed_kw = dict(type=int, help="root seed (overrides the config file)")
    parser = argparse.ArgumentParser(prog="cobaycpd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", default=None, **seed_kw)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--seed", default=argparse.SUPPRESS, **seed_kw)
        p.add_argument("--config", help="YAML config merged over the defaults")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "simulate a piecewise Hawkes stream")
    p.add_argument("--segments", help="e.g. '5:n=42,10:n=93,3:t=15'")
    p.add_argument("--stress", help="kind:level, e.g. delta_lambda:0.1")
    p.add_argument("--out", required=True, help="events CSV")
    p.add_argument("--labels", help="labels CSV (default <out stem>_labels.csv)")

    p = add("detect", cmd_detect, "run online change-point detection")
    p.add_argument("events", help="events CSV")
    p.add_argument("--out", help="report JSON (stdout when omitted)")
    p.add_argument("--time-scale", type=float, default=None,
                   help="shift the first event to 0 and divide by this")
    p.add_argument("--tie-epsilon", type=float, default=0.0,
                   help="nudge tied timestamps apart by this much")
    p.add_argument("--n-jobs", type=int, default=None, help="threads for predictive sampling")
    p.add_argument("--no-timing", action="store_true",
                   help="write runtime_seconds as null for byte-identical reruns")

    p = add("eval", cmd_eval, "score a report against labels")
    p.add_argument("report", nargs="?")
    p.add_argument("labels", nargs="?")
    p.add_argument("--tol", type=int, default=None, help="match tolerance in event indices")
    p.add_argument("--out", help="metrics JSON")
    p.add_argument("--seeds", type=int, default=None,
                   help="rerun detection for this many seeds and aggregate")
    p.add_argument("--events", help="events CSV for --seeds (default: simulated preset)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes across seeds")

    p = add("ablate", cmd_ablate, "sweep one hyperparameter")
    p.add_argument("--axis", choices=sorted(ABLATION_GRIDS), required=True)
    p.add_argument("--grid", type=float, nargs="+", default=None)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--out", help="CSV table")
    p.add_argument("--jobs", type=int, default=1, help="worker processes across seeds")
    return parser


def main(argv=None):
    level = os.environ.get("COBAY_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
