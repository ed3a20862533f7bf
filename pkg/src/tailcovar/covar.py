"""Adjustment-factor solving and the composite CoVaR estimator.

CoVaR at level ``p`` is the level-``p`` value-at-risk of the system loss
``Y`` conditioned on the institution's loss ``X`` exceeding its own
value-at-risk: ``P(Y >= CoVaR | X >= VaR_X(p)) = p``.  For asymptotically
independent pairs it equals the *unconditional* quantile of ``Y`` at the
shifted level ``p * eta_p``, where the adjustment factor ``eta_p`` solves
``Q(p, p*eta_p) = p**2`` for the joint survival-scale distribution ``Q``.

The estimator replaces ``eta_p`` by its tail-limit approximation
``eta*_p``, the root of ``c(1, eta*_p; theta) = p**(2 - 1/eta)`` in a
fitted parametric family, and replaces the ``Y``-quantile by a Weissman
extrapolation:

    covar_hat = (eta*_p) ** (-gamma_hat) * var_hat_Y(p)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from tailcovar.dependence import (
    FitResult,
    WeightScheme,
    default_weight_scheme,
    m_estimate,
    rank_pairs,
)
from tailcovar.errors import BadEta, BadLevel, BadSpec, NoRoot, RootFail, Unsupported
from tailcovar.families import TailFamily
from tailcovar.margins import hill, sort_series, weissman_var
from tailcovar.sample import PairedSample
from tailcovar.serialize import dumps

__all__ = [
    "AdjustmentQuery",
    "CovarEstimate",
    "solve_eta_star",
    "covar_estimate",
    "adjustment_factor_exact",
    "VARIANTS",
]

VARIANTS = (
    "exceedance",
    "exceedance_two_level",
    "equality",
    "equality_two_level",
)

_LOG_S_MIN = math.log(1e-300)


def _bracketed_unit_root(g, target: float, what: str) -> float:
    """Solve ``g(s) = target`` for ``s`` in ``(0, 1]``, ``g`` non-decreasing.

    Works on ``t = log s`` over the bracket ``[log 1e-300, 0]`` so the
    relative tolerance in ``s`` is an absolute tolerance in ``t`` (set to
    1e-13, beyond the 1e-12 contract).

    Raises:
        NoRoot: ``target >= g(1)`` — no root at or below the endpoint.
        RootFail: the bracket does not enclose a sign change.
    """
    top = float(g(1.0))
    if not np.isfinite(top):
        raise RootFail(f"{what}: equation side not finite at s=1")
    if target >= top:
        raise NoRoot(
            f"{what}: target {target:.6g} >= value {top:.6g} at s=1 "
            "(dependence too weak or level too extreme)"
        )
    f = lambda t: float(g(math.exp(t))) - target
    f_lo = f(_LOG_S_MIN)
    if f_lo > 0.0:
        raise RootFail(f"{what}: no sign change on [1e-300, 1]")
    t = optimize.brentq(f, _LOG_S_MIN, 0.0, xtol=1e-13, maxiter=200)
    return math.exp(t)


@dataclass(frozen=True)
class AdjustmentQuery:
    """Inputs for one adjustment-factor solve.

    Attributes:
        p: tail probability level in ``(0, 1)``.
        family: parametric tail family.
        theta: family parameter (inside the family box).
        eta: residual dependence coefficient in ``(1/2, 1]``; defaults to
            ``family.eta(theta)``.
        variant: one of :data:`VARIANTS`. ``exceedance`` solves
            ``c(1, s) = p**(2-1/eta)``; the two-level forms scale both
            sides by ``level_ratio``; the equality forms use the partial
            derivative ``c_x`` on the left side.
        level_ratio: the ratio ``C`` between the two quantile levels of a
            two-level variant (1 reduces to the single-level equation).
    """

    p: float
    family: TailFamily
    theta: tuple[float, ...] | float
    eta: float | None = None
    variant: str = "exceedance"
    level_ratio: float = 1.0

    def resolved_eta(self) -> float:
        eta = self.family.eta(self.theta) if self.eta is None else float(self.eta)
        if not 0.5 < eta <= 1.0:
            raise BadEta(f"eta={eta} outside (1/2, 1]")
        return eta


def solve_eta_star(query: AdjustmentQuery) -> float:
    """Solve the tail-limit adjustment equation for ``eta*_p`` in ``(0, 1]``.

    Raises:
        BadLevel, BadEta, BadSpec: invalid query fields.
        Unsupported: an equality variant on a family without analytic
            partial derivatives.
        NoRoot: the equation has no root in ``(0, 1]``.
    """
    if not 0.0 < query.p < 1.0:
        raise BadLevel(f"p={query.p} must lie in (0, 1)")
    if query.variant not in VARIANTS:
        raise BadSpec(f"unknown variant {query.variant!r}; expected one of {VARIANTS}")
    ratio = float(query.level_ratio)
    if not ratio > 0.0:
        raise BadSpec(f"level_ratio={ratio} must be positive")
    family = query.family
    theta = family.require_theta(query.theta)
    eta = query.resolved_eta()
    target = ratio * query.p ** (2.0 - 1.0 / eta)

    if query.variant.startswith("equality"):
        if not family.analytic_partials:
            raise Unsupported(
                f"family {family.family_id!r} has no analytic partial "
                "derivatives; equality variants need exact c_x"
            )
        g = lambda s: family.c_x(1.0, ratio * s, theta)
    else:
        g = lambda s: family.c(1.0, ratio * s, theta)
    return _bracketed_unit_root(g, target, f"solve_eta_star[{query.variant}]")


def adjustment_factor_exact(model, p: float) -> float:
    """Exact adjustment factor ``eta_p``: the root of ``Q(p, p*s) = p**2``.

    Args:
        model: a model specification exposing ``joint_survival()``, or a
            joint-survival object exposing ``q(x, y)`` directly.
        p: level in ``(0, 1)``.

    Raises:
        BadLevel: invalid ``p``.
        NoRoot: no root in ``(0, 1]`` (the pair is negatively associated
            at this level).
    """
    if not 0.0 < p < 1.0:
        raise BadLevel(f"p={p} must lie in (0, 1)")
    js = model.joint_survival() if hasattr(model, "joint_survival") else model
    g = lambda s: js.q(p, p * s)
    # Tolerate q(p, p) == p**2 exactly (independence): the root is s = 1.
    if abs(float(g(1.0)) - p * p) <= 1e-15 * p * p:
        return 1.0
    return _bracketed_unit_root(g, p * p, "adjustment_factor_exact")


@dataclass(frozen=True)
class CovarEstimate:
    """The composite estimate with every intermediate quantity.

    Invariant: ``covar_hat == eta_star_hat ** (-gamma_hat) * var_hat_p``.
    """

    covar_hat: float
    var_hat_p: float
    gamma_hat: float
    eta_star_hat: float
    fit: FitResult
    p: float
    k1: int
    k2: int
    k3: int

    @property
    def theta_hat(self) -> np.ndarray:
        return self.fit.theta_hat

    @property
    def zeta_hat(self) -> float:
        return self.fit.zeta_hat

    @property
    def eta_hat(self) -> float:
        return self.fit.eta_hat

    def to_dict(self) -> dict:
        return {
            "covar_hat": self.covar_hat,
            "var_hat_p": self.var_hat_p,
            "gamma_hat": self.gamma_hat,
            "eta_star_hat": self.eta_star_hat,
            "eta_hat": self.fit.eta_hat,
            "eta_clamped": self.fit.eta_clamped,
            "theta_hat": list(self.fit.theta_hat),
            "zeta_hat": self.fit.zeta_hat,
            "objective_value": self.fit.objective_value,
            "converged": self.fit.converged,
            "family_id": self.fit.family_id,
            "p": self.p,
            "k1": self.k1,
            "k2": self.k2,
            "k3": self.k3,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def covar_estimate(
    sample: PairedSample,
    p: float,
    k1: int,
    k2: int,
    k3: int,
    family: TailFamily,
    scheme: WeightScheme | None = None,
) -> CovarEstimate:
    """Estimate CoVaR at level ``p`` from a paired loss sample.

    Composes the Hill tail index and Weissman quantile of ``Y`` with the
    rank-based family fit and the adjustment-factor solve:

        covar_hat = eta_star ** (-gamma_hat) * var_hat_Y(p)

    Args:
        sample: paired observations (or anything with ``.x``/``.y``).
        p: CoVaR level in ``(0, 1)``.
        k1: upper order statistics for the Hill estimate of ``Y``.
        k2: anchor order statistic count for the Weissman quantile.
        k3: tail fraction for the rank-based dependence fit.
        family: parametric tail family for the dependence structure.
        scheme: weight rectangles; family default when omitted.

    Raises:
        Propagates every sub-operation error (BadK, BadLevel,
        NonPositiveThreshold, DegenerateMoments, NoConvergence, NoRoot ...).
    """
    if not 0.0 < p < 1.0:
        raise BadLevel(f"p={p} must lie in (0, 1)")
    if scheme is None:
        scheme = default_weight_scheme(family)
    y_sorted = sort_series(sample.y)
    tail = hill(y_sorted, k1)
    var_y = weissman_var(y_sorted, tail.gamma_hat, k2, p)
    ranks = rank_pairs(sample.x, sample.y)
    fit = m_estimate(ranks, k3, family, scheme)
    eta_star = solve_eta_star(
        AdjustmentQuery(
            p=p, family=family, theta=tuple(fit.theta_hat), eta=fit.eta_hat
        )
    )
    covar = eta_star ** (-tail.gamma_hat) * var_y.value
    return CovarEstimate(
        covar_hat=float(covar),
        var_hat_p=var_y.value,
        gamma_hat=tail.gamma_hat,
        eta_star_hat=float(eta_star),
        fit=fit,
        p=float(p),
        k1=int(k1),
        k2=int(k2),
        k3=int(k3),
    )
