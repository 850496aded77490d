"""Event/label CSV files, run configuration and JSON reports.

CSV files are UTF-8 with LF line endings, a one-line header and one value per
row. Floats are written with ``repr`` so a write/read round trip is exact.
"""

import copy
import csv
import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np
import yaml

from ._validation import DataError, check_timestamps
from .detector import DetectorConfig
from .gibbs import GibbsConfig
from .hawkes import Basis, BasisSet

__all__ = [
    "ConfigError",
    "RunConfig",
    "DEFAULT_CONFIG",
    "load_config",
    "read_events",
    "write_events",
    "read_labels",
    "write_labels",
    "report_to_dict",
    "write_json",
    "read_json",
    "atomic_write",
]


class ConfigError(ValueError):
    """Bad or unknown configuration entry."""


DEFAULT_CONFIG = {
    "model": {
        "n_bases": 4,
        "alpha": 50.0,
        "beta": 50.0,
        "scale": 6.0,
        "shifts": [-2.0, -1.0, 0.0, 1.0],
        "support_bound": 6.0,
    },
    "prior": {"sigma2": 0.5},
    "gibbs": {"iterations": 100, "burn_in": 50},
    "detector": {"confidence_level": 0.9, "min_window": 10, "max_window": 200, "n_jobs": 1},
    "eval": {"match_tol": 3},
    "truth": {"weights": [0.0, 1.0, 0.5, 0.5, 0.5]},
    "seed": 0,
}


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{where}' must be a section")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; ``raw`` keeps the merged key/value tree."""

    raw: dict

    @classmethod
    def from_dict(cls, data=None):
        merged = _merge(DEFAULT_CONFIG, data or {})
        cfg = cls(merged)
        cfg.validate()
        return cfg

    def with_overrides(self, **sections):
        data = copy.deepcopy(self.raw)
        for section, values in sections.items():
            if isinstance(values, dict):
                data[section].update(values)
            else:
                data[section] = values
        return RunConfig.from_dict(data)

    def validate(self):
        try:
            self.basis
            self.detector_config
            w = self.truth_weights
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if w.shape[0] != self.basis.n_features:
            raise ConfigError(
                f"truth.weights needs {self.basis.n_features} entries (mu plus one per basis)"
            )
        tol = self.raw["eval"]["match_tol"]
        if not isinstance(tol, int) or tol < 0:
            raise ConfigError("eval.match_tol must be a non-negative integer")
        if not isinstance(self.raw["seed"], int) or self.raw["seed"] < 0:
            raise ConfigError("seed must be a non-negative integer")

    @property
    def basis(self):
        m = self.raw["model"]
        shifts = list(m["shifts"])
        if int(m["n_bases"]) != len(shifts):
            raise ConfigError(f"model.n_bases={m['n_bases']} but {len(shifts)} shifts given")
        return BasisSet(
            tuple(Basis(float(m["alpha"]), float(m["beta"]), float(m["scale"]), float(s))
                  for s in shifts),
            float(m["support_bound"]),
        )

    @property
    def gibbs_config(self):
        g = self.raw["gibbs"]
        return GibbsConfig(int(g["iterations"]), int(g["burn_in"]),
                           float(self.raw["prior"]["sigma2"]))

    @property
    def detector_config(self):
        d = self.raw["detector"]
        return DetectorConfig(
            confidence_level=float(d["confidence_level"]),
            min_window=int(d["min_window"]),
            max_window=int(d["max_window"]),
            gibbs=self.gibbs_config,
            basis=self.basis,
            n_jobs=int(d["n_jobs"]),
        )

    @property
    def truth_weights(self):
        return np.array(self.raw["truth"]["weights"], dtype=float)

    @property
    def match_tol(self):
        return int(self.raw["eval"]["match_tol"])

    @property
    def seed(self):
        return int(self.raw["seed"])


def load_config(path=None):
    """Read a YAML (or JSON) config file and merge it over the defaults."""
    if path is None:
        return RunConfig.from_dict({})
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return RunConfig.from_dict(data)


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    return repr(float(x))


def write_events(path, timestamps):
    atomic_write(path, "timestamp\n" + "".join(_fmt(t) + "\n" for t in timestamps))


def write_labels(path, change_indices):
    atomic_write(path, "change_index\n" + "".join(f"{int(i)}\n" for i in change_indices))


def _read_column(path, header):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty")
    if [c.strip() for c in rows[0]][:1] != [header]:
        raise DataError(f"{path}: expected header '{header}', got {rows[0]!r}", row=1)
    values = []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or not row[0].strip():
            continue
        values.append((line_no, row[0].strip()))
    return values


def read_events(path, time_scale=None, tie_epsilon=0.0):
    """Load an events CSV.

    Parameters
    ----------
    time_scale : float, optional
        When given, timestamps become ``(t - t_first) / time_scale``.
    tie_epsilon : float
        When positive, a timestamp equal to its predecessor is nudged to
        ``previous + tie_epsilon``; decreasing timestamps are always an error.

    Raises
    ------
    DataError
        Empty file, unparsable value or non-increasing timestamps; ``row`` is
        the 1-based line number in the file.
    """
    entries = _read_column(path, "timestamp")
    if not entries:
        raise DataError(f"{path} contains no events")
    values = []
    for line_no, text in entries:
        try:
            v = float(text)
        except ValueError:
            raise DataError(f"{path}:{line_no}: cannot parse {text!r}", row=line_no) from None
        if not math.isfinite(v):
            raise DataError(f"{path}:{line_no}: non-finite timestamp", row=line_no)
        values.append(v)
    ts = np.array(values)
    if time_scale is not None:
        if not time_scale > 0:
            raise DataError("time_scale must be positive")
        ts = (ts - ts[0]) / float(time_scale)
    if tie_epsilon > 0:
        for i in range(1, ts.size):
            if values[i] >= values[i - 1] and ts[i] <= ts[i - 1]:
                ts[i] = ts[i - 1] + tie_epsilon
    try:
        return check_timestamps(ts, min_events=1, name=os.path.basename(path))
    except DataError as exc:
        line = None if exc.row is None else entries[exc.row][0]
        raise DataError(f"{path}:{line}: {exc}", row=line) from None


def read_labels(path):
    out = []
    for line_no, text in _read_column(path, "change_index"):
        try:
            out.append(int(text))
        except ValueError:
            raise DataError(f"{path}:{line_no}: cannot parse {text!r}", row=line_no) from None
    return out


def report_to_dict(result, config=None, seed=None, timing=True):
    """JSON-ready detection report.

    With ``timing=False`` the wall-clock runtime is written as ``null`` so
    reruns with the same seed are byte-identical.
    """
    steps = []
    for r in result.records:
        steps.append({
            "index": r.index,
            "tested": r.tested,
            "lo": r.interval[0],
            "hi": r.interval[1],
            "observed": r.observed,
            "is_change": r.is_change,
            "pred_mean": r.pred_mean,
            "window_start": r.window_start,
            "n_censored": r.n_censored,
        })
    out = {
        "change_indices": list(result.change_points),
        "steps": steps,
        "runtime_seconds": result.runtime if timing else None,
        "seed": seed,
    }
    if config is not None:
        out["config_echo"] = config.raw
    return out


def write_json(path, payload):
    atomic_write(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
