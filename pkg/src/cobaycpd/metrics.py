"""Detection scores: FNR, FPR, predictive MSE and runtime."""

from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = [
    "MatchResult",
    "RunReport",
    "match_changepoints",
    "compute_mse",
    "evaluate",
    "aggregate",
]


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    tn: int
    pairs: tuple = ()

    @property
    def fnr(self):
        return self.fn / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def fpr(self):
        return self.fp / (self.fp + self.tn) if self.fp + self.tn else 0.0


@dataclass(frozen=True)
class RunReport:
    fnr: float
    fpr: float
    mse: float
    runtime: float
    match: MatchResult = None
    extra: dict = field(default_factory=dict)

    @property
    def rt_minutes(self):
        return self.runtime / 60.0

    def to_dict(self):
        out = {"fnr": self.fnr, "fpr": self.fpr, "mse": self.mse,
               "runtime_seconds": self.runtime, "rt_minutes": self.rt_minutes}
        if self.match is not None:
            out.update({k: v for k, v in asdict(self.match).items() if k != "pairs"})
            out["pairs"] = [list(p) for p in self.match.pairs]
        out.update(self.extra)
        return out


def match_changepoints(truth, detected, tol=3, tested_steps=None):
    """Greedy one-to-one matching of detections to true change points.

    Detections are visited in index order; each takes the nearest unmatched
    truth within ``tol`` (ties go to the earlier truth). ``tn`` is
    ``tested_steps - tp - fp - fn`` (floored at 0) when ``tested_steps`` is given.
    """
    truth = sorted(int(g) for g in truth)
    detected = sorted(int(d) for d in detected)
    tol = int(tol)
    if tol < 0:
        raise ValueError("tol must be non-negative")
    free = list(truth)
    pairs = []
    for d in detected:
        best = None
        for g in free:
            gap = abs(d - g)
            if gap <= tol and (best is None or gap < abs(d - best)):
                best = g
        if best is not None:
            free.remove(best)
            pairs.append((best, d))
    tp = len(pairs)
    fp = len(detected) - tp
    fn = len(truth) - tp
    tn = 0 if tested_steps is None else max(int(tested_steps) - tp - fp - fn, 0)
    return MatchResult(tp, fp, fn, tn, tuple(pairs))


def compute_mse(records):
    """Mean squared gap between the predictive mean and the observed event.

    ``records`` are detector step records (untested ones are skipped) or
    ``(predicted_mean, observed)`` pairs.
    """
    errors = []
    for rec in records:
        if isinstance(rec, tuple):
            pred, obs = rec
        else:
            if not getattr(rec, "tested", True):
                continue
            pred, obs = rec.pred_mean, rec.observed
        errors.append((float(pred) - float(obs)) ** 2)
    if not errors:
        raise ValueError("no tested records to score")
    return float(np.mean(errors))


def evaluate(result, truth, tol=3):
    """Score a :class:`~cobaycpd.detector.DetectionResult` against true change indices."""
    tested = result.tested_records
    match = match_changepoints(truth, result.change_points, tol, tested_steps=len(tested))
    return RunReport(match.fnr, match.fpr, compute_mse(tested), result.runtime, match,
                     {"match_tol": int(tol), "tested_steps": len(tested)})


def aggregate(reports):
    """Mean and population standard deviation of every metric across runs.

    Returns
    -------
    dict
        ``{metric: {"mean": .., "std": .., "text": "m +- s"}}`` for fnr, fpr,
        mse and runtime, plus ``n_runs``.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("need at least one report")
    out = {"n_runs": len(reports)}
    for name in ("fnr", "fpr", "mse", "runtime"):
        vals = np.array([getattr(r, name) if not isinstance(r, dict) else r[name]
                         for r in reports], dtype=float)
        mean, std = float(vals.mean()), float(vals.std(ddof=0))
        out[name] = {"mean": mean, "std": std, "text": f"{mean:.3f} ± {std:.3f}"}
    return out
