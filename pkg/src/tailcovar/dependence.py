"""Rank-based estimation of the joint tail limit function.

The estimator compares integrals of the empirical tail measure

    Q_n(x, y) = (1/n) * sum_i 1{rank(X_i) >= n+1-floor(k3*x),
                               rank(Y_i) >= n+1-floor(k3*y)}

against integrals of a parametric limit ``zeta * c(x, y; theta)`` over a
fixed set of weight rectangles, and minimizes the Euclidean distance
between the two moment vectors over ``(theta, zeta)``.  Because ``Q_n``
depends on the data only through within-margin ranks, every output here is
invariant under strictly increasing transforms of either margin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from tailcovar import _kernels
from tailcovar.errors import (
    BadK,
    BadSpec,
    DegenerateMoments,
    NoConvergence,
    NonFiniteData,
    RegionTooLarge,
    TooShort,
)
from tailcovar.families import (
    INVERTED_HUSLER_REISS,
    PARETO_MIXTURE,
    Rect,
    TailFamily,
)

__all__ = [
    "RankedPairs",
    "WeightScheme",
    "FitResult",
    "rank_pairs",
    "empirical_q",
    "moment_vector",
    "family_moment_vector",
    "m_estimate",
    "m_estimate_from_moments",
    "m_objective",
    "default_weight_scheme",
]

# Clamp range for the residual dependence coefficient produced by a fit; the
# downstream exponent 2 - 1/eta needs eta strictly above 1/2.
ETA_MIN = 0.5 + 1e-6
ETA_MAX = 1.0

_N_STARTS = 5
_XATOL = 1e-8
_MAXITER = 500


@dataclass(frozen=True)
class RankedPairs:
    """Within-margin ranks of a paired sample (1-based, ties broken by
    first occurrence)."""

    rank_x: np.ndarray
    rank_y: np.ndarray

    @property
    def n(self) -> int:
        return self.rank_x.shape[0]


def rank_pairs(x, y) -> RankedPairs:
    """Rank both margins of a paired sample.

    Ranks are 1-based; the largest value gets rank ``n``.  Ties are broken
    by first-occurrence order (earlier observation gets the smaller rank),
    which makes the result deterministic.

    Raises:
        TooShort: fewer than 2 pairs.
        NonFiniteData: NaN/inf present.
        BadSpec: mismatched lengths.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise BadSpec(f"margin lengths differ: {x.shape[0]} vs {y.shape[0]}")
    if x.size < 2:
        raise TooShort(f"need at least 2 pairs, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteData("paired sample contains NaN or infinite values")
    rank_x = stats.rankdata(x, method="ordinal").astype(np.int64)
    rank_y = stats.rankdata(y, method="ordinal").astype(np.int64)
    return RankedPairs(rank_x=rank_x, rank_y=rank_y)


def _corners(ranks: RankedPairs, k3: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower-left corners ``(u_i, v_i)`` of the per-point indicator supports.

    The indicator ``1{rank_x_i >= n+1-floor(k3*x)}`` equals ``1{x >= u_i}``
    with ``u_i = (n+1-rank_x_i)/k3``, which turns rank-window counts into a
    plain step function.
    """
    n = ranks.n
    u = (n + 1 - ranks.rank_x) / float(k3)
    v = (n + 1 - ranks.rank_y) / float(k3)
    return u, v


def _check_k3(ranks: RankedPairs, k3: int) -> None:
    if not 1 <= k3 <= ranks.n:
        raise BadK(f"k3={k3} out of range 1..{ranks.n}")


def empirical_q(ranks: RankedPairs, k3: int, x, y):
    """Evaluate the empirical tail measure at ``(x, y)``.

    Accepts scalars or equally-shaped arrays for ``x`` and ``y``; values
    must satisfy ``x, y >= 0`` and ``floor(k3*max(x, y)) <= n``.

    Raises:
        BadK: ``k3`` or a query point out of range.
    """
    _check_k3(ranks, k3)
    x_arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y_arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if np.any(x_arr < 0) or np.any(y_arr < 0):
        raise BadK("query coordinates must be non-negative")
    hi = max(float(np.max(x_arr)), float(np.max(y_arr)))
    if np.floor(k3 * hi) > ranks.n:
        raise BadK(
            f"query reaches rank window floor(k3*{hi}) > n={ranks.n}; "
            "shrink the query or k3"
        )
    u, v = _corners(ranks, k3)
    counts = _kernels.joint_tail_counts(u, v, x_arr.ravel(), y_arr.ravel())
    out = counts.astype(np.float64).reshape(x_arr.shape) / ranks.n
    return float(out[0]) if np.ndim(x) == 0 and np.ndim(y) == 0 else out


@dataclass(frozen=True)
class WeightScheme:
    """Weight rectangles with their family normalizers.

    ``normalizers[j]`` is the integral of ``c(x, y; theta_ref)`` over
    ``regions[j]`` for the family the scheme was built against; moment
    vectors divide by it so every component equals 1 at the reference
    parameter.
    """

    regions: tuple[Rect, ...]
    theta_ref: tuple[float, ...]
    normalizers: np.ndarray
    family_id: str

    @property
    def s(self) -> int:
        return len(self.regions)

    @classmethod
    def from_family(cls, family: TailFamily, regions, theta_ref) -> "WeightScheme":
        """Build a scheme, computing normalizers from the family at
        ``theta_ref``."""
        rects = tuple(
            (float(r[0]), float(r[1]), float(r[2]), float(r[3])) for r in regions
        )
        if not rects:
            raise BadSpec("weight scheme needs at least one region")
        for r in rects:
            if not (0.0 <= r[0] < r[1] and 0.0 <= r[2] < r[3]):
                raise BadSpec(f"degenerate or negative region {r}")
        ref = np.atleast_1d(np.asarray(theta_ref, dtype=np.float64))
        norms = np.array([family.rect_integral(r, ref) for r in rects])
        if not np.all(norms > 0.0):
            raise BadSpec("every region must give a positive normalizer")
        return cls(
            regions=rects,
            theta_ref=tuple(ref.tolist()),
            normalizers=norms,
            family_id=family.family_id,
        )

    def to_json(self) -> str:
        """Serialize as regions plus reference parameter (normalizers are
        recomputed on load, never stored)."""
        from tailcovar.serialize import dumps

        ref = self.theta_ref[0] if len(self.theta_ref) == 1 else list(self.theta_ref)
        return dumps({"regions": [list(r) for r in self.regions], "theta_ref": ref})

    @classmethod
    def from_json(cls, family: TailFamily, text: str) -> "WeightScheme":
        try:
            payload = json.loads(text)
            regions = payload["regions"]
            theta_ref = payload["theta_ref"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise BadSpec(f"invalid weight scheme JSON: {exc}") from exc
        return cls.from_family(family, regions, theta_ref)


# Default weight rectangles, chosen per family so the outer regions reach
# into the part of the quadrant where the two families differ most.
_DEFAULT_REGIONS = {
    "pareto_mixture": (
        (0.0, 1.0, 0.0, 1.0),
        (0.0, 0.8, 0.0, 1.0),
        (0.0, 1.0, 0.0, 0.5),
        (0.0, 0.5, 0.0, 0.3),
        (0.0, 0.5, 0.0, 0.5),
    ),
    "inverted_husler_reiss": (
        (0.0, 1.0, 0.0, 1.0),
        (0.0, 2.0, 0.0, 2.0),
        (0.5, 1.5, 0.5, 1.5),
        (0.0, 1.0, 0.0, 3.0),
        (0.0, 3.0, 0.0, 1.0),
    ),
}
_DEFAULT_THETA_REF = {"pareto_mixture": 1.0, "inverted_husler_reiss": 0.6}


def default_weight_scheme(family: TailFamily) -> WeightScheme:
    """The built-in five-rectangle scheme for a built-in family."""
    try:
        regions = _DEFAULT_REGIONS[family.family_id]
        theta_ref = _DEFAULT_THETA_REF[family.family_id]
    except KeyError:
        raise BadSpec(
            f"no default weight scheme for family {family.family_id!r}; "
            "construct one with WeightScheme.from_family"
        ) from None
    return WeightScheme.from_family(family, regions, theta_ref)


def _check_scheme_domain(ranks: RankedPairs, k3: int, scheme: WeightScheme) -> None:
    n = ranks.n
    for r in scheme.regions:
        if np.floor(k3 * r[1]) > n or np.floor(k3 * r[3]) > n:
            raise RegionTooLarge(
                f"region {r} needs floor(k3*edge) <= n; k3={k3}, n={n}"
            )


def moment_vector(ranks: RankedPairs, k3: int, scheme: WeightScheme) -> np.ndarray:
    """Normalized integrals of the empirical tail measure over the scheme.

    Component ``j`` is ``(1/a_j) * integral over regions[j] of Q_n``.  The
    integral of the piecewise-constant ``Q_n`` is computed exactly: each
    observation contributes the area of the overlap between the region and
    the quadrant ``[u_i, inf) x [v_i, inf)``.

    Raises:
        BadK: ``k3`` out of range.
        RegionTooLarge: a region extends past the resolvable rank window.
    """
    _check_k3(ranks, k3)
    _check_scheme_domain(ranks, k3, scheme)
    u, v = _corners(ranks, k3)
    rects = np.asarray(scheme.regions, dtype=np.float64)
    raw = _kernels.rect_indicator_integrals(u, v, rects)
    return raw / (ranks.n * scheme.normalizers)


def family_moment_vector(
    family: TailFamily, theta, scheme: WeightScheme
) -> np.ndarray:
    """Normalized integrals of ``c(., .; theta)`` over the scheme regions.

    Raises:
        ThetaOutOfBox: ``theta`` outside the family box.
    """
    arr = family.require_theta(theta)
    vals = np.array([family.rect_integral(r, arr) for r in scheme.regions])
    return vals / scheme.normalizers


def _profile_zeta(mf: np.ndarray, me: np.ndarray) -> float:
    """Least-squares scale for fixed theta, clamped to stay positive."""
    den = float(mf @ mf)
    num = float(mf @ me)
    if den <= 0.0:
        return 1e-12
    return max(num / den, 1e-12)


def m_objective(
    empirical_moments: np.ndarray,
    family: TailFamily,
    scheme: WeightScheme,
    theta,
    zeta: float,
) -> float:
    """Euclidean norm of ``zeta * M_family(theta) - M_empirical``."""
    mf = family_moment_vector(family, theta, scheme)
    return float(np.linalg.norm(zeta * mf - np.asarray(empirical_moments)))


@dataclass(frozen=True)
class FitResult:
    """Outcome of the moment fit.

    ``eta_hat`` is ``eta(theta_hat)`` clamped to ``[0.5 + 1e-6, 1]``;
    ``eta_clamped`` flags when the clamp was active.
    """

    theta_hat: np.ndarray
    zeta_hat: float
    eta_hat: float
    eta_clamped: bool
    objective_value: float
    converged: bool
    k3: int
    family_id: str


def m_estimate_from_moments(
    empirical_moments,
    family: TailFamily,
    scheme: WeightScheme,
    k3: int = 0,
) -> FitResult:
    """Fit ``(theta, zeta)`` to a precomputed empirical moment vector.

    The scale ``zeta`` is profiled out in closed form, reducing the search
    to ``theta`` alone; that search runs a bounded Nelder-Mead simplex from
    5 evenly spaced starts across the parameter box (absolute tolerance
    1e-8, 500 iterations per start) and keeps the smallest objective,
    breaking ties by the lowest start index.

    Raises:
        DegenerateMoments: the empirical moment vector is all zero.
        NoConvergence: no start converged within its iteration budget.
        BadSpec: scheme/family mismatch or too few regions.
    """
    me = np.asarray(empirical_moments, dtype=np.float64)
    if scheme.family_id != family.family_id:
        raise BadSpec(
            f"scheme built for family {scheme.family_id!r}, got {family.family_id!r}"
        )
    if family.param_dim + 1 > scheme.s:
        raise BadSpec(
            f"{scheme.s} regions cannot identify {family.param_dim}+1 parameters"
        )
    if me.shape != (scheme.s,):
        raise BadSpec(f"moment vector shape {me.shape} != ({scheme.s},)")
    if np.all(me == 0.0):
        raise DegenerateMoments("empirical moment vector is identically zero")

    box = family.param_box
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])

    def objective(theta_vec: np.ndarray) -> float:
        mf = family_moment_vector(family, theta_vec, scheme)
        return float(np.linalg.norm(_profile_zeta(mf, me) * mf - me))

    best = None
    any_converged = False
    for i in range(_N_STARTS):
        frac = (2 * i + 1) / (2 * _N_STARTS)
        x0 = lo + frac * (hi - lo)
        res = optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=list(box),
            options={"xatol": _XATOL, "fatol": 1e-14, "maxiter": _MAXITER},
        )
        any_converged = any_converged or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    if not any_converged:
        raise NoConvergence("no simplex start converged within 500 iterations")

    theta_hat = np.clip(np.asarray(best.x, dtype=np.float64), lo, hi)
    mf = family_moment_vector(family, theta_hat, scheme)
    zeta_hat = _profile_zeta(mf, me)
    eta_raw = family.eta(theta_hat)
    eta_hat = min(max(eta_raw, ETA_MIN), ETA_MAX)
    return FitResult(
        theta_hat=theta_hat,
        zeta_hat=zeta_hat,
        eta_hat=eta_hat,
        eta_clamped=(eta_hat != eta_raw),
        objective_value=float(np.linalg.norm(zeta_hat * mf - me)),
        converged=True,
        k3=int(k3),
        family_id=family.family_id,
    )


def m_estimate(
    ranks: RankedPairs,
    k3: int,
    family: TailFamily,
    scheme: WeightScheme | None = None,
) -> FitResult:
    """Fit the family to the empirical tail measure of a ranked sample.

    Args:
        ranks: output of :func:`rank_pairs`.
        k3: tail sample fraction for the empirical measure.
        family: parametric tail family to fit.
        scheme: weight rectangles; defaults to the family's built-in scheme.

    Returns:
        FitResult with ``theta_hat``, profiled ``zeta_hat`` and
        ``eta_hat = eta(theta_hat)``.

    Raises:
        Same as :func:`moment_vector` and :func:`m_estimate_from_moments`.
    """
    if scheme is None:
        scheme = default_weight_scheme(family)
    me = moment_vector(ranks, k3, scheme)
    return m_estimate_from_moments(me, family, scheme, k3=k3)
