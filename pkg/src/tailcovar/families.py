"""Parametric families for the joint tail limit of asymptotically
independent pairs.

A family supplies the limit function ``c(x, y; theta)`` of the rescaled
joint tail, its residual dependence coefficient ``eta(theta)``, partial
derivatives, and integrals of ``c`` over axis-aligned rectangles.  ``c``
is homogeneous of order ``1/eta(theta)``:

    c(a*x, a*y; theta) = a**(1/eta(theta)) * c(x, y; theta)

Two families are built in:

* :class:`ParetoMixtureFamily` — ``c(x, y) = 2**(a-1) * min(x, y)**a``
  with ``a`` in ``[1, 2]`` and ``eta = 1/a``; arises from a mixture of an
  independent heavy-tailed pair and a comonotone pair.
* :class:`InvertedHuslerReissFamily` — ``c(x, y) = (x*y)**t`` with ``t``
  in ``[1/2, 1]`` and ``eta = 1/(2t)``; the inverted Huesler-Reiss copula.

User-defined families can plug in plain callables via
:class:`GenericTailFamily`; rectangle integrals then fall back to adaptive
quadrature at absolute tolerance 1e-10.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from tailcovar.errors import ThetaOutOfBox, Unsupported

__all__ = [
    "resolve_family",
    "TailFamily",
    "ParetoMixtureFamily",
    "InvertedHuslerReissFamily",
    "GenericTailFamily",
    "PARETO_MIXTURE",
    "INVERTED_HUSLER_REISS",
]

Rect = tuple[float, float, float, float]


def _theta_vector(theta) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    return arr


class TailFamily:
    """Base class for joint tail limit families.

    Subclasses set ``family_id``, ``param_box`` (one ``(lo, hi)`` pair per
    parameter, closed interval) and implement ``c`` and ``eta``; partial
    derivatives and rectangle integrals have generic numeric defaults.
    """

    family_id: str = "abstract"
    param_box: tuple[tuple[float, float], ...] = ()
    # True when c_x/c_y below are exact formulas rather than differences;
    # equality-conditioned adjustment factors require exact partials.
    analytic_partials: bool = False

    @property
    def param_dim(self) -> int:
        return len(self.param_box)

    def theta_in_box(self, theta) -> bool:
        arr = _theta_vector(theta)
        if arr.shape[0] != self.param_dim:
            return False
        return all(
            lo <= t <= hi for t, (lo, hi) in zip(arr.tolist(), self.param_box)
        )

    def require_theta(self, theta) -> np.ndarray:
        arr = _theta_vector(theta)
        if not self.theta_in_box(arr):
            raise ThetaOutOfBox(
                f"theta={arr.tolist()} outside box {self.param_box} "
                f"for family {self.family_id!r}"
            )
        return arr

    def c(self, x, y, theta):
        raise NotImplementedError

    def eta(self, theta) -> float:
        raise NotImplementedError

    def c_x(self, x, y, theta):
        """Partial derivative of ``c`` in ``x`` (central difference default)."""
        h = 1e-6 * max(float(np.max(np.abs(x))), 1.0)
        return (self.c(np.asarray(x) + h, y, theta) - self.c(np.asarray(x) - h, y, theta)) / (2 * h)

    def c_y(self, x, y, theta):
        """Partial derivative of ``c`` in ``y`` (central difference default)."""
        h = 1e-6 * max(float(np.max(np.abs(y))), 1.0)
        return (self.c(x, np.asarray(y) + h, theta) - self.c(x, np.asarray(y) - h, theta)) / (2 * h)

    def rect_integral(self, rect: Rect, theta) -> float:
        """Integral of ``c(., .; theta)`` over ``[x0, x1] x [y0, y1]``.

        The default integrates numerically (adaptive quadrature, absolute
        tolerance 1e-10); built-in families override with closed forms.
        """
        x0, x1, y0, y1 = rect
        val, _ = integrate.dblquad(
            lambda yy, xx: float(self.c(xx, yy, theta)),
            x0,
            x1,
            y0,
            y1,
            epsabs=1e-10,
            epsrel=1e-10,
        )
        return float(val)


class ParetoMixtureFamily(TailFamily):
    """Tail limit of a half/half mixture of independent and comonotone
    heavy-tailed pairs: ``c(x, y; a) = 2**(a-1) * min(x, y)**a``.

    The single identifiable parameter ``a`` lives in ``[1, 2]`` and equals
    the ratio of the two Pareto shape parameters of the generating mixture;
    ``eta(a) = 1/a``.
    """

    family_id = "pareto_mixture"
    param_box = ((1.0, 2.0),)
    analytic_partials = True

    def c(self, x, y, theta):
        (a,) = self.require_theta(theta)
        out = 2.0 ** (a - 1.0) * np.minimum(x, y) ** a
        return out if np.ndim(out) else float(out)

    def eta(self, theta) -> float:
        (a,) = self.require_theta(theta)
        return 1.0 / a

    def c_x(self, x, y, theta):
        (a,) = self.require_theta(theta)
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        out = np.where(x < y, a * 2.0 ** (a - 1.0) * x ** (a - 1.0), 0.0)
        return out if out.ndim else float(out)

    def c_y(self, x, y, theta):
        return self.c_x(y, x, theta)

    def rect_integral(self, rect: Rect, theta) -> float:
        (a,) = self.require_theta(theta)
        x0, x1, y0, y1 = rect

        def corner(xx: float, yy: float) -> float:
            # F(X, Y) = int_0^X int_0^Y min(x, y)**a dy dx
            lo, hi = (xx, yy) if xx <= yy else (yy, xx)
            if lo <= 0.0:
                return 0.0
            return lo ** (a + 1.0) / (a + 1.0) * (hi - lo * a / (a + 2.0))

        raw = corner(x1, y1) - corner(x0, y1) - corner(x1, y0) + corner(x0, y0)
        return float(2.0 ** (a - 1.0) * raw)


class InvertedHuslerReissFamily(TailFamily):
    """Inverted Huesler-Reiss tail limit ``c(x, y; t) = (x*y)**t``.

    ``t`` lives in ``[1/2, 1]`` (``t = 1`` is exact independence) and
    ``eta(t) = 1/(2t)``.
    """

    family_id = "inverted_husler_reiss"
    param_box = ((0.5, 1.0),)
    analytic_partials = True

    def c(self, x, y, theta):
        (t,) = self.require_theta(theta)
        out = (np.asarray(x, dtype=np.float64) * np.asarray(y, dtype=np.float64)) ** t
        return out if out.ndim else float(out)

    def eta(self, theta) -> float:
        (t,) = self.require_theta(theta)
        return 1.0 / (2.0 * t)

    def c_x(self, x, y, theta):
        (t,) = self.require_theta(theta)
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        out = t * x ** (t - 1.0) * y**t
        return out if out.ndim else float(out)

    def c_y(self, x, y, theta):
        return self.c_x(y, x, theta)

    def rect_integral(self, rect: Rect, theta) -> float:
        (t,) = self.require_theta(theta)
        x0, x1, y0, y1 = rect
        ix = (x1 ** (t + 1.0) - x0 ** (t + 1.0)) / (t + 1.0)
        iy = (y1 ** (t + 1.0) - y0 ** (t + 1.0)) / (t + 1.0)
        return float(ix * iy)


class GenericTailFamily(TailFamily):
    """A user-defined family assembled from plain callables.

    Args:
        family_id: identifier used in serialized output.
        c: callable ``(x, y, theta) -> value``.
        eta: callable ``(theta) -> float``.
        param_box: one ``(lo, hi)`` pair per parameter.
        c_x, c_y: optional partial derivatives; central differences if
            omitted.
        rect_integral: optional ``(rect, theta) -> float``; adaptive
            quadrature at tolerance 1e-10 if omitted.
    """

    def __init__(
        self,
        family_id: str,
        c: Callable,
        eta: Callable[..., float],
        param_box: Sequence[tuple[float, float]],
        c_x: Callable | None = None,
        c_y: Callable | None = None,
        rect_integral: Callable | None = None,
    ) -> None:
        self.family_id = str(family_id)
        self.param_box = tuple((float(lo), float(hi)) for lo, hi in param_box)
        self._c = c
        self._eta = eta
        self._c_x = c_x
        self._c_y = c_y
        self._rect_integral = rect_integral
        self.analytic_partials = c_x is not None and c_y is not None

    def c(self, x, y, theta):
        self.require_theta(theta)
        return self._c(x, y, theta)

    def eta(self, theta) -> float:
        self.require_theta(theta)
        return float(self._eta(theta))

    def c_x(self, x, y, theta):
        if self._c_x is not None:
            return self._c_x(x, y, theta)
        return super().c_x(x, y, theta)

    def c_y(self, x, y, theta):
        if self._c_y is not None:
            return self._c_y(x, y, theta)
        return super().c_y(x, y, theta)

    def rect_integral(self, rect: Rect, theta) -> float:
        if self._rect_integral is not None:
            return float(self._rect_integral(rect, theta))
        return super().rect_integral(rect, theta)


PARETO_MIXTURE = ParetoMixtureFamily()
INVERTED_HUSLER_REISS = InvertedHuslerReissFamily()

# Accepted spellings for the two built-in families, as used by config files
# and the command line.
_FAMILY_ALIASES = {
    "pareto_mixture": PARETO_MIXTURE,
    "pareto-mixture": PARETO_MIXTURE,
    "pm": PARETO_MIXTURE,
    "inverted_husler_reiss": INVERTED_HUSLER_REISS,
    "inverted-husler-reiss": INVERTED_HUSLER_REISS,
    "ihr": INVERTED_HUSLER_REISS,
}


def resolve_family(name: str) -> TailFamily:
    """Map a family name or alias to its built-in singleton.

    Raises:
        Unsupported: unknown name.
    """
    fam = _FAMILY_ALIASES.get(str(name).strip().lower())
    if fam is None:
        raise Unsupported(
            f"unknown family {name!r}; expected one of "
            "pareto_mixture (pm) or inverted_husler_reiss (ihr)"
        )
    return fam
