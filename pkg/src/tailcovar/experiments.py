"""Monte Carlo reproduction harness, baselines, scans, forecasts, scoring.

Five loosely coupled pieces live here because they all consume the composite
estimator rather than extend it:

* :func:`naive_covar` — the empirical conditional-quantile baseline;
* :func:`run_table1` — seeded replication of the simulation table
  (mean/sd of the proposed estimator per ``k`` triple, the naive baseline,
  and the exact true value);
* :func:`eta_scan` — sensitivity of the fitted tail dependence coefficient
  to the rank fraction ``k3``, with per-point error capture;
* :func:`dynamic_covar` — combines externally supplied conditional
  location/scale paths with a rolling static estimate on residual pairs;
* :func:`quantile_score` / :func:`score_series` — forecast evaluation on
  distress days.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from tailcovar.covar import covar_estimate
from tailcovar.dependence import (
    WeightScheme,
    default_weight_scheme,
    m_estimate,
    rank_pairs,
)
from tailcovar.errors import (
    BadLevel,
    BadSpec,
    TailCovarError,
    TooFewExceedances,
    WindowTooShort,
)
from tailcovar.families import TailFamily, resolve_family
from tailcovar.models import (
    Model1Spec,
    Model2Spec,
    sample_model1,
    sample_model2,
    true_covar,
)
from tailcovar.sample import PairedSample
from tailcovar.serialize import write_csv

__all__ = [
    "EtaScanPoint",
    "ExperimentConfig",
    "ExperimentReport",
    "ForecastRecord",
    "KCellReport",
    "ScoreSeries",
    "distress_events",
    "dynamic_covar",
    "eta_scan",
    "eta_scan_rows",
    "forecast_rows",
    "naive_covar",
    "quantile_score",
    "run_table1",
    "score_series",
    "write_eta_scan_csv",
    "write_forecast_csv",
    "write_report_csv",
    "write_report_json",
]


def _check_level(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise BadLevel(f"p={p} must lie in (0, 1)")
    return p


def naive_covar(sample, p: float) -> float:
    """Empirical conditional quantile of ``Y`` over the ``X``-exceedance set.

    Observations with ``X_i >= X_{n,n-floor(np)+1}`` (the empirical
    ``(1-p)``-quantile by order statistic) form the conditioning subsample
    of size ``m``.  The estimate is the smallest of their ``Y`` order
    statistics whose weak-exceedance frequency within the subsample is at
    most ``p`` — the ``(m - floor(p*m) + 1)``-th smallest — mirroring how
    the conditional risk level is defined through ``P(Y >= y | ...) <= p``.

    Raises:
        BadLevel: ``p`` outside ``(0, 1)``.
        TooFewExceedances: fewer than two conditioning observations
            (``floor(n*p) < 2``), or the conditional level is unresolvable
            on the subsample (``floor(p*m) < 1``, so every order statistic
            is weakly exceeded more often than ``p``).
    """
    p = _check_level(p)
    x = np.asarray(sample.x, dtype=np.float64).ravel()
    y = np.asarray(sample.y, dtype=np.float64).ravel()
    n = x.shape[0]
    j = int(math.floor(n * p))
    if j < 2:
        raise TooFewExceedances(
            f"floor(n*p) = {j} < 2: not enough exceedances to condition on"
        )
    threshold = np.partition(x, n - j)[n - j]
    sub = np.sort(y[x >= threshold])
    m = sub.shape[0]
    tail = int(math.floor(p * m))
    if tail < 1:
        raise TooFewExceedances(
            f"floor(p*m) = 0 with m = {m} conditioning observations: "
            "no subsample order statistic attains the conditional level"
        )
    return float(sub[m - tail])


# ---------------------------------------------------------------------------
# Seeded replication of the simulation table


def _draw(model, n: int, seed: int) -> PairedSample:
    if isinstance(model, Model1Spec):
        return sample_model1(model, n, seed)
    if isinstance(model, Model2Spec):
        return sample_model2(model, n, seed)
    raise BadSpec(f"unknown model spec {type(model).__name__}")


def _model_to_dict(model) -> dict:
    if isinstance(model, Model1Spec):
        return {"id": "model1", "theta1": model.theta1, "theta2": model.theta2}
    if isinstance(model, Model2Spec):
        return {"id": "model2", "theta": model.theta}
    raise BadSpec(f"unknown model spec {type(model).__name__}")


def _require(mapping: dict, field_name: str, context: str = "config"):
    if field_name not in mapping:
        raise BadSpec(f"{context} is missing required field {field_name!r}")
    return mapping[field_name]


def _model_from_dict(d: dict):
    if not isinstance(d, dict):
        raise BadSpec("config field 'model' must be an object")
    model_id = str(_require(d, "id", "config field 'model'")).lower()
    if model_id in ("model1", "m1"):
        return Model1Spec(
            theta1=float(_require(d, "theta1", "config field 'model'")),
            theta2=float(_require(d, "theta2", "config field 'model'")),
        )
    if model_id in ("model2", "m2"):
        return Model2Spec(theta=float(_require(d, "theta", "config field 'model'")))
    raise BadSpec(f"unknown model id {model_id!r}; expected model1 or model2")


def _normalize_k_grid(raw, n: int) -> tuple[tuple[int, int, int], ...]:
    grid: list[tuple[int, int, int]] = []
    for entry in raw:
        if isinstance(entry, (int, np.integer)):
            triple = (int(entry),) * 3
        else:
            triple = tuple(int(v) for v in entry)
            if len(triple) != 3:
                raise BadSpec(
                    f"k_grid entry {entry!r} must be an integer or a (k1, k2, k3) triple"
                )
        for k in triple:
            if not 0 < k < n:
                raise BadSpec(f"k={k} outside (0, n={n})")
        grid.append(triple)
    if not grid:
        raise BadSpec("k_grid must contain at least one entry")
    return tuple(grid)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to replicate one simulation-table row.

    ``k_grid`` holds ``(k1, k2, k3)`` triples; rep ``r`` draws its sample
    from seed ``seed + r``, so reports are reproducible regardless of how
    repetitions are scheduled.
    """

    model: Model1Spec | Model2Spec
    p: float
    n: int
    reps: int
    k_grid: tuple[tuple[int, int, int], ...]
    seed: int
    family_id: str
    scheme: WeightScheme | None = None
    output: str | None = None

    def __post_init__(self) -> None:
        _check_level(self.p)
        if int(self.reps) < 1:
            raise BadSpec(f"reps={self.reps} must be >= 1")
        if int(self.n) < 2:
            raise BadSpec(f"n={self.n} must be >= 2")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "k_grid", _normalize_k_grid(self.k_grid, self.n))
        resolve_family(self.family_id)  # fail fast on unknown names

    def family(self) -> TailFamily:
        return resolve_family(self.family_id)

    def resolved_scheme(self) -> WeightScheme:
        return self.scheme if self.scheme is not None else default_weight_scheme(
            self.family()
        )

    def to_json_dict(self) -> dict:
        return {
            "model": _model_to_dict(self.model),
            "p": self.p,
            "n": self.n,
            "reps": self.reps,
            "k_grid": [list(t) for t in self.k_grid],
            "seed": self.seed,
            "family": self.family_id,
            "output": self.output,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise BadSpec("config must be a JSON object")
        model = _model_from_dict(_require(d, "model"))
        return cls(
            model=model,
            p=float(_require(d, "p")),
            n=int(_require(d, "n")),
            reps=int(_require(d, "reps")),
            k_grid=_require(d, "k_grid"),
            seed=int(_require(d, "seed")),
            family_id=str(_require(d, "family")),
            output=d.get("output"),
        )


@dataclass(frozen=True)
class KCellReport:
    """Aggregates for one ``(k1, k2, k3)`` triple across repetitions."""

    k1: int
    k2: int
    k3: int
    mean: float
    sd: float
    estimates: tuple[float, ...]

    @property
    def label(self) -> str:
        return f"{self.k1}_{self.k2}_{self.k3}"


def _mean_sd(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if values.size > 1 else float("nan")
    return mean, sd


@dataclass(frozen=True)
class ExperimentReport:
    """Replication results for one configuration, with raw estimates kept."""

    config: ExperimentConfig
    true_value: float
    cells: tuple[KCellReport, ...]
    naive_mean: float
    naive_sd: float
    naive_estimates: tuple[float, ...]

    @property
    def rep_seeds(self) -> tuple[int, ...]:
        return tuple(self.config.seed + r for r in range(self.config.reps))

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "true_value": self.true_value,
            "cells": [
                {
                    "k1": c.k1,
                    "k2": c.k2,
                    "k3": c.k3,
                    "mean": c.mean,
                    "sd": c.sd,
                    "estimates": list(c.estimates),
                }
                for c in self.cells
            ],
            "naive": {
                "mean": self.naive_mean,
                "sd": self.naive_sd,
                "estimates": list(self.naive_estimates),
            },
        }

    def csv_header(self) -> str:
        cols = ["rep", "seed", "naive"] + [f"covar_{c.label}" for c in self.cells]
        return ",".join(cols)

    def csv_rows(self):
        for r in range(self.config.reps):
            row = [r, self.config.seed + r, self.naive_estimates[r]]
            row.extend(c.estimates[r] for c in self.cells)
            yield row


def _table1_rep(config: ExperimentConfig, rep: int):
    """One repetition: sample once, estimate the naive and every k-cell."""
    sample = _draw(config.model, config.n, config.seed + rep)
    naive = naive_covar(sample, config.p)
    family = config.family()
    scheme = config.resolved_scheme()
    values = [
        covar_estimate(sample, config.p, k1, k2, k3, family, scheme).covar_hat
        for (k1, k2, k3) in config.k_grid
    ]
    return rep, naive, values


def _table1_worker(args):
    return _table1_rep(*args)


def run_table1(config: ExperimentConfig, threads: int | None = None) -> ExperimentReport:
    """Replicate one simulation-table row.

    Repetition ``r`` is seeded with ``config.seed + r`` and contributes one
    naive estimate plus one proposed estimate per ``k_grid`` triple; the
    same sample is reused across triples.  With ``threads > 1`` repetitions
    run in a process pool, and because aggregation is keyed by repetition
    index the report is bit-identical to the sequential run.
    """
    reps = config.reps
    naive = np.empty(reps, dtype=np.float64)
    per_cell = np.empty((len(config.k_grid), reps), dtype=np.float64)

    if threads is not None and int(threads) > 1 and reps > 1:
        workers = min(int(threads), reps)
        tasks = [(config, r) for r in range(reps)]
        chunk = max(1, reps // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rep, nv, values in pool.map(_table1_worker, tasks, chunksize=chunk):
                naive[rep] = nv
                per_cell[:, rep] = values
    else:
        for rep in range(reps):
            _, nv, values = _table1_rep(config, rep)
            naive[rep] = nv
            per_cell[:, rep] = values

    cells = []
    for (k1, k2, k3), values in zip(config.k_grid, per_cell):
        mean, sd = _mean_sd(values)
        cells.append(
            KCellReport(
                k1=k1,
                k2=k2,
                k3=k3,
                mean=mean,
                sd=sd,
                estimates=tuple(float(v) for v in values),
            )
        )
    naive_mean, naive_sd = _mean_sd(naive)
    return ExperimentReport(
        config=config,
        true_value=true_covar(config.model, config.p),
        cells=tuple(cells),
        naive_mean=naive_mean,
        naive_sd=naive_sd,
        naive_estimates=tuple(float(v) for v in naive),
    )


def write_report_json(path, report: ExperimentReport) -> None:
    from tailcovar.serialize import dumps

    with open(path, "w", newline="\n") as fh:
        fh.write(dumps(report.to_json_dict()) + "\n")


def write_report_csv(path, report: ExperimentReport) -> None:
    write_csv(path, report.csv_header(), report.csv_rows())


# ---------------------------------------------------------------------------
# Sensitivity of the fitted tail dependence coefficient to k3


@dataclass(frozen=True)
class EtaScanPoint:
    """One grid point of the ``k3`` sensitivity scan.

    ``eta_hat`` is NaN when the fit failed; ``error`` then carries the
    exception class and message so a scan survives isolated bad points.
    """

    k3: int
    eta_hat: float
    error: str | None = None


def eta_scan(sample, family: TailFamily, scheme, k3_grid) -> list[EtaScanPoint]:
    """Fit the dependence family at each ``k3`` and record ``eta_hat``.

    Grid order (and duplicates) are preserved.  Library errors are captured
    per point rather than aborting the scan; anything that is not a
    :class:`TailCovarError` propagates.
    """
    if scheme is None:
        scheme = default_weight_scheme(family)
    ranks = rank_pairs(sample.x, sample.y)
    points: list[EtaScanPoint] = []
    for k3 in k3_grid:
        k3 = int(k3)
        try:
            fit = m_estimate(ranks, k3, family, scheme)
            points.append(EtaScanPoint(k3=k3, eta_hat=float(fit.eta_hat)))
        except TailCovarError as exc:
            points.append(
                EtaScanPoint(
                    k3=k3,
                    eta_hat=float("nan"),
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return points


def eta_scan_rows(points):
    for pt in points:
        yield (pt.k3, pt.eta_hat)


def write_eta_scan_csv(path, points) -> None:
    write_csv(path, "k3,eta_hat", eta_scan_rows(points))


# ---------------------------------------------------------------------------
# Dynamic forecasts: conditional location/scale around a rolling static fit


@dataclass(frozen=True)
class ForecastRecord:
    """One-step-ahead CoVaR forecast at time ``t``.

    ``covar = mu_y + sigma_y * static`` where ``static`` is the estimate on
    the residual window in force at ``t``; ``z_x``/``z_y`` echo the residual
    pair observed at ``t`` for downstream evaluation.
    """

    t: int
    mu_y: float
    sigma_y: float
    z_x: float
    z_y: float
    covar: float

    def __post_init__(self) -> None:
        if not self.sigma_y > 0.0:
            raise BadSpec(f"sigma_y={self.sigma_y} at t={self.t} must be positive")


def dynamic_covar(
    residuals,
    params,
    p: float,
    ks: tuple[int, int, int],
    family: TailFamily,
    scheme=None,
    window: int = 3000,
    refresh_every: int = 50,
) -> list[ForecastRecord]:
    """Forecast CoVaR one step ahead along a residual series.

    ``residuals`` holds the innovation-proxy pairs ``(z_x, z_y)`` for times
    ``0 .. T-1``; ``params`` holds the conditional ``(mu_y, sigma_y)`` of the
    system margin, aligned with the same time axis.  For each ``t`` from
    ``window`` to ``T-1`` a static estimate on ``residuals[t-window:t)`` is
    combined as ``mu_y[t] + sigma_y[t] * static``.  The static fit is
    recomputed only every ``refresh_every`` steps and held in between.

    Raises:
        WindowTooShort: fewer than ``window + 1`` residual pairs.
        BadSpec: misaligned ``params``, non-positive ``sigma_y``, or a
            non-positive cadence.
        Propagates estimation errors from the static fit.
    """
    p = _check_level(p)
    x = np.asarray(residuals.x, dtype=np.float64).ravel()
    y = np.asarray(residuals.y, dtype=np.float64).ravel()
    total = x.shape[0]
    window = int(window)
    refresh_every = int(refresh_every)
    if refresh_every < 1:
        raise BadSpec(f"refresh_every={refresh_every} must be >= 1")
    if window < 2:
        raise BadSpec(f"window={window} must be >= 2")
    if total <= window:
        raise WindowTooShort(
            f"need more than window={window} residual pairs, have {total}"
        )
    par = np.asarray(params, dtype=np.float64)
    if par.ndim != 2 or par.shape[1] != 2 or par.shape[0] != total:
        raise BadSpec(
            f"params must have shape ({total}, 2) aligned with the residuals, "
            f"got {par.shape}"
        )
    k1, k2, k3 = (int(k) for k in ks)

    records: list[ForecastRecord] = []
    static = math.nan
    for t in range(window, total):
        if (t - window) % refresh_every == 0:
            piece = PairedSample(x[t - window : t], y[t - window : t])
            static = covar_estimate(piece, p, k1, k2, k3, family, scheme).covar_hat
        mu_t, sigma_t = float(par[t, 0]), float(par[t, 1])
        records.append(
            ForecastRecord(
                t=t,
                mu_y=mu_t,
                sigma_y=sigma_t,
                z_x=float(x[t]),
                z_y=float(y[t]),
                covar=mu_t + sigma_t * static,
            )
        )
    return records


def forecast_rows(records):
    for rec in records:
        yield (rec.t, rec.mu_y, rec.sigma_y, rec.covar)


def write_forecast_csv(path, records) -> None:
    write_csv(path, "t,mu,sigma,covar", forecast_rows(records))


# ---------------------------------------------------------------------------
# Quantile scoring on distress days


def quantile_score(forecast: float, observation: float, p: float) -> float:
    """One-homogeneous score of a ``(1-p)``-quantile forecast.

    ``S(r, x) = (p - 1{x > r}) * r + 1{x > r} * x``; lower is better.
    """
    r = float(forecast)
    x = float(observation)
    exceeded = 1.0 if x > r else 0.0
    return (float(p) - exceeded) * r + exceeded * x


def distress_events(x, p: float, window: int) -> list[int]:
    """Times whose loss reaches the rolling empirical value-at-risk.

    For each ``t >= window``, the threshold is the same order statistic the
    naive estimator conditions on — ``x_{w,w-floor(w*p)+1}`` over the
    preceding ``window`` observations — and ``t`` is an event when
    ``x[t] >= threshold``.
    """
    p = _check_level(p)
    x = np.asarray(x, dtype=np.float64).ravel()
    window = int(window)
    j = int(math.floor(window * p))
    if j < 1:
        raise TooFewExceedances(
            f"floor(window*p) = {j} < 1: rolling threshold undefined"
        )
    if x.shape[0] <= window:
        raise WindowTooShort(f"need more than window={window} points, have {x.shape[0]}")
    events: list[int] = []
    for t in range(window, x.shape[0]):
        win = x[t - window : t]
        threshold = np.partition(win, window - j)[window - j]
        if x[t] >= threshold:
            events.append(t)
    return events


@dataclass(frozen=True)
class ScoreSeries:
    """Per-event quantile scores and their arithmetic mean."""

    event_times: tuple[int, ...]
    scores: tuple[float, ...]
    average: float
    count: int

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "average": self.average,
            "event_times": list(self.event_times),
            "scores": list(self.scores),
        }


def score_series(records, x, y, p: float, window: int) -> ScoreSeries:
    """Score forecasts on the days the conditioning loss hit its VaR.

    ``records`` are :class:`ForecastRecord` objects (or anything exposing
    ``t`` and ``covar``); ``x``/``y`` are the full observed loss histories on
    the same time axis.  Events come from :func:`distress_events` on ``x``
    and only events with an available forecast are scored.
    """
    p = _check_level(p)
    by_time = {int(rec.t): float(rec.covar) for rec in records}
    y = np.asarray(y, dtype=np.float64).ravel()
    times: list[int] = []
    scores: list[float] = []
    for t in distress_events(x, p, window):
        if t in by_time and t < y.shape[0]:
            times.append(t)
            scores.append(quantile_score(by_time[t], float(y[t]), p))
    count = len(scores)
    average = float(np.mean(scores)) if count else float("nan")
    return ScoreSeries(
        event_times=tuple(times),
        scores=tuple(scores),
        average=average,
        count=count,
    )
