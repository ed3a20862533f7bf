"""Exact samplers and analytic oracles for the two simulation models.

Model 1 mixes an independent heavy-tailed pair with a comonotone one:

    (X, Y) = B * (Z1, Z3) + (1 - B) * (Z2, Z2),   B ~ Bernoulli(1/2)

with ``Z1, Z3 ~ Pareto(theta1)`` and ``Z2 ~ Pareto(theta2)`` independent
(survival ``t**(-1/theta)`` on ``t >= 1``).  Its joint tail limit lives in
the Pareto-mixture family with ``alpha = theta1/theta2``.

Model 2 is the inverted Huesler-Reiss copula with unit Frechet margins:
the survival-uniform pair ``(1-F(X), 1-F(Y))`` has joint CDF

    Q(x, y) = exp(-l(-log x, -log y)),
    l(a, b) = a*Phi(lam + (log a - log b)/(2 lam))
            + b*Phi(lam + (log b - log a)/(2 lam))

parameterized by ``theta = Phi(lam)`` in ``(1/2, 1]``; ``theta = 1`` is
exact independence.  Sampling inverts the conditional CDF
``dQ(u, v)/du`` numerically, which is exact to solver tolerance.

Randomness comes from a counter-based Philox generator keyed by a 64-bit
seed; Monte Carlo repetitions use keys ``seed + rep`` so concurrently
executed repetitions reproduce bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.special import ndtr, ndtri

from tailcovar._kernels import hr_conditional_invert
from tailcovar.covar import adjustment_factor_exact
from tailcovar.errors import BadLevel, BadSpec
from tailcovar.sample import PairedSample

__all__ = [
    "Model1Spec",
    "Model2Spec",
    "JointSurvival",
    "make_rng",
    "sample_model1",
    "sample_model2",
    "joint_survival",
    "true_covar",
    "hr_stdf",
]


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for a 64-bit seed (Philox)."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class Model1Spec:
    """Mixture model parameters; requires ``3/2 < theta1/theta2 < 2``."""

    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        if not (self.theta1 > 0 and self.theta2 > 0):
            raise BadSpec("theta1 and theta2 must be positive")
        ratio = self.theta1 / self.theta2
        if not 1.5 < ratio < 2.0:
            raise BadSpec(
                f"theta1/theta2={ratio:.4g} outside the admissible range (3/2, 2)"
            )

    @property
    def alpha(self) -> float:
        """The identifiable tail-family parameter ``theta1/theta2``."""
        return self.theta1 / self.theta2

    def joint_survival(self) -> "JointSurvival":
        return joint_survival(self)


@dataclass(frozen=True)
class Model2Spec:
    """Inverted Huesler-Reiss parameters; ``theta = Phi(lam)`` in (1/2, 1]."""

    theta: float

    def __post_init__(self) -> None:
        if not 0.5 < self.theta <= 1.0:
            raise BadSpec(f"theta={self.theta} outside (1/2, 1]")

    @property
    def lam(self) -> float:
        return math.inf if self.theta == 1.0 else float(ndtri(self.theta))

    def joint_survival(self) -> "JointSurvival":
        return joint_survival(self)


@dataclass(frozen=True)
class JointSurvival:
    """Analytic joint and marginal survival functions of a model.

    Attributes:
        joint: ``S(s, t) = P(X > s, Y > t)``.
        sx, sy: marginal survivals.
        sx_inv, sy_inv: marginal survival inverses (``VaR`` at a level).
        q: joint CDF of the survival-uniform pair ``(1-F1(X), 1-F2(Y))``.
    """

    joint: Callable[[float, float], float]
    sx: Callable[[float], float]
    sy: Callable[[float], float]
    sx_inv: Callable[[float], float]
    sy_inv: Callable[[float], float]
    q: Callable[[float, float], float]


def hr_stdf(a: float, b: float, lam: float) -> float:
    """Huesler-Reiss stable tail dependence function ``l(a, b)``.

    Satisfies ``max(a, b) <= l(a, b) <= a + b``, with the upper bound
    attained in the independence limit ``lam = inf``.
    """
    if a < 0.0 or b < 0.0:
        raise BadSpec("stdf arguments must be non-negative")
    if a == 0.0 or not math.isfinite(lam):
        return a + b
    if b == 0.0:
        return a + b
    d = (math.log(a) - math.log(b)) / (2.0 * lam)
    return a * float(ndtr(lam + d)) + b * float(ndtr(lam - d))


def sample_model1(spec: Model1Spec, n: int, seed: int) -> PairedSample:
    """Draw ``n`` pairs from Model 1.

    Draw order is fixed (Bernoulli stream, then the three Pareto streams)
    so a given seed always yields the same sample.
    """
    if n < 1:
        raise BadSpec(f"n={n} must be at least 1")
    rng = make_rng(seed)
    ub = rng.random(n)
    u1 = rng.random(n)
    u2 = rng.random(n)
    u3 = rng.random(n)
    return _model1_from_uniforms(spec, ub, u1, u2, u3)


def _model1_from_uniforms(spec, ub, u1, u2, u3) -> PairedSample:
    """Deterministic transform of uniform streams into Model 1 pairs.

    ``ub < 1/2`` selects the independent branch; Pareto variables are
    ``(1-u)**(-theta)`` so the open-interval endpoint maps to finite values.
    """
    b = ub < 0.5
    z1 = (1.0 - u1) ** (-spec.theta1)
    z2 = (1.0 - u2) ** (-spec.theta2)
    z3 = (1.0 - u3) ** (-spec.theta1)
    return PairedSample(x=np.where(b, z1, z2), y=np.where(b, z3, z2))


_ONE_MINUS_EPS = float(np.nextafter(1.0, 0.0))


def sample_model2(spec: Model2Spec, n: int, seed: int) -> PairedSample:
    """Draw ``n`` pairs from Model 2 (unit Frechet margins).

    Draws ``U`` then ``W`` uniform, solves the conditional CDF
    ``dQ(u, v)/du = w`` for ``v`` (80 bisection steps on ``log(-log v)``),
    and maps survival-uniforms to losses via ``t -> -1/log(1 - t)``.
    ``theta = 1`` short-circuits to exact independence.
    """
    if n < 1:
        raise BadSpec(f"n={n} must be at least 1")
    rng = make_rng(seed)
    u = np.minimum(1.0 - rng.random(n), _ONE_MINUS_EPS)
    w = np.minimum(1.0 - rng.random(n), _ONE_MINUS_EPS)
    if spec.theta == 1.0:
        v = w
    else:
        v = hr_conditional_invert(u, w, spec.lam)
    x = -1.0 / np.log1p(-u)
    y = -1.0 / np.log1p(-v)
    return PairedSample(x=x, y=y)


def _model1_survival(spec: Model1Spec) -> JointSurvival:
    inv_t1 = 1.0 / spec.theta1
    inv_t2 = 1.0 / spec.theta2

    def sx(s: float) -> float:
        s = max(float(s), 1.0)
        return 0.5 * s**-inv_t1 + 0.5 * s**-inv_t2

    def joint(s: float, t: float) -> float:
        s = max(float(s), 1.0)
        t = max(float(t), 1.0)
        return 0.5 * (s * t) ** -inv_t1 + 0.5 * max(s, t) ** -inv_t2

    theta_max = max(spec.theta1, spec.theta2)

    def sx_inv(level: float) -> float:
        if not 0.0 < level <= 1.0:
            raise BadLevel(f"survival level {level} outside (0, 1]")
        if level == 1.0:
            return 1.0
        # Bisect on log(u): both mixture terms are then pure exponentials.
        t_hi = theta_max * math.log(2.0 / level)
        f = lambda t: 0.5 * math.exp(-t * inv_t1) + 0.5 * math.exp(-t * inv_t2) - level
        root = optimize.brentq(f, 0.0, t_hi, xtol=1e-13, maxiter=200)
        return math.exp(root)

    def q(x: float, y: float) -> float:
        if x <= 0.0 or y <= 0.0:
            return 0.0
        return joint(sx_inv(min(x, 1.0)), sx_inv(min(y, 1.0)))

    return JointSurvival(joint=joint, sx=sx, sy=sx, sx_inv=sx_inv, sy_inv=sx_inv, q=q)


def _model2_survival(spec: Model2Spec) -> JointSurvival:
    lam = spec.lam

    def q(x: float, y: float) -> float:
        if x <= 0.0 or y <= 0.0:
            return 0.0
        x = min(float(x), 1.0)
        y = min(float(y), 1.0)
        return math.exp(-hr_stdf(-math.log(x), -math.log(y), lam))

    def sx(t: float) -> float:
        if t <= 0.0:
            return 1.0
        return -math.expm1(-1.0 / t)

    def sx_inv(level: float) -> float:
        if not 0.0 < level <= 1.0:
            raise BadLevel(f"survival level {level} outside (0, 1]")
        if level == 1.0:
            return 0.0
        return -1.0 / math.log1p(-level)

    def joint(s: float, t: float) -> float:
        return q(sx(s), sx(t))

    return JointSurvival(joint=joint, sx=sx, sy=sx, sx_inv=sx_inv, sy_inv=sx_inv, q=q)


def joint_survival(spec) -> JointSurvival:
    """Analytic survival bundle for a model specification."""
    if isinstance(spec, Model1Spec):
        return _model1_survival(spec)
    if isinstance(spec, Model2Spec):
        return _model2_survival(spec)
    raise BadSpec(f"unknown model spec {type(spec).__name__}")


def true_covar(spec, p: float) -> float:
    """Exact CoVaR of a model at level ``p``.

    Solves ``Q(p, p*eta_p) = p**2`` for the adjustment factor and returns
    the exact ``Y``-quantile ``VaR_Y(p * eta_p)``.
    """
    if not 0.0 < p < 1.0:
        raise BadLevel(f"p={p} must lie in (0, 1)")
    js = joint_survival(spec)
    eta_p = adjustment_factor_exact(js, p)
    return float(js.sy_inv(p * eta_p))
