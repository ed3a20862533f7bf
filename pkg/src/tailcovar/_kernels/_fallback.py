"""Pure-NumPy implementations of the numerical hot loops.

These mirror the compiled routines in ``_core.pyx`` exactly; the package
selects one backend at import time (see ``tailcovar._kernels``).  Keeping
both in sync is enforced by the backend-equivalence tests.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

__all__ = ["rect_indicator_integrals", "joint_tail_counts", "hr_conditional_invert"]


def rect_indicator_integrals(u, v, rects):
    """Sum of per-point rectangle overlaps for a step-function integral.

    For each rectangle ``[x0, x1] x [y0, y1]`` returns

        sum_i max(0, x1 - max(x0, u_i)) * max(0, y1 - max(y0, v_i))

    which is ``n`` times the integral over the rectangle of the empirical
    step function ``(1/n) sum_i 1{x >= u_i, y >= v_i}``.

    Parameters
    ----------
    u, v : float arrays of shape (n,)
        Lower-left corners of the per-point indicator supports.
    rects : float array of shape (s, 4)
        Rows ``(x0, x1, y0, y1)``.

    Returns
    -------
    float array of shape (s,)
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    rects = np.asarray(rects, dtype=np.float64)
    out = np.empty(rects.shape[0], dtype=np.float64)
    for j, (x0, x1, y0, y1) in enumerate(rects):
        wx = np.maximum(x1 - np.maximum(u, x0), 0.0)
        wy = np.maximum(y1 - np.maximum(v, y0), 0.0)
        out[j] = float(wx @ wy)
    return out


def joint_tail_counts(u, v, x, y):
    """Count points with ``u_i <= x_k`` and ``v_i <= y_k`` per query point.

    Parameters
    ----------
    u, v : float arrays of shape (n,)
    x, y : float arrays of shape (q,)

    Returns
    -------
    int64 array of shape (q,)
    """
    u = np.asarray(u, dtype=np.float64)[:, None]
    v = np.asarray(v, dtype=np.float64)[:, None]
    x = np.asarray(x, dtype=np.float64)[None, :]
    y = np.asarray(y, dtype=np.float64)[None, :]
    return np.count_nonzero((u <= x) & (v <= y), axis=0).astype(np.int64)


def _cond_cdf(x, log_x, t, lam):
    """Conditional CDF ``P(V <= e^{-e^t} | U = u)`` for the inverted HR copula.

    Arguments are ``x = -log u`` (precomputed), ``log_x = log x``, and
    ``t = log y`` with ``y = -log v``.  Uses the closed form

        H = exp(x - ell(x, y)) * Phi(lam + (log x - log y) / (2 lam))

    where ``ell`` is the Huesler-Reiss stable tail dependence function.
    ``H`` is decreasing in ``y`` from 1 to 0.
    """
    d = (log_x - t) / (2.0 * lam)
    a = lam + d
    ell = x * ndtr(a) + np.exp(t) * ndtr(lam - d)
    return np.exp(x - ell) * ndtr(a)


def hr_conditional_invert(u, w, lam, iters=80):
    """Invert the conditional CDF of the inverted Huesler-Reiss copula.

    Given ``U = u`` and target probabilities ``w``, solves
    ``P(V <= v | U = u) = w`` for ``v`` by bisection on ``t = log(-log v)``
    over the fixed bracket ``[-700, 700]``; the conditional CDF is monotone
    on that range for any ``lam > 0``, so ``iters`` halvings pin the root to
    relative accuracy ``1400 * 2**-iters`` in ``-log v``.

    Parameters
    ----------
    u, w : float arrays of shape (n,), values in (0, 1)
    lam : float, positive Huesler-Reiss dependence parameter
    iters : int, number of bisection steps

    Returns
    -------
    float array of shape (n,): the conditional quantiles ``v``.
    """
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    x = -np.log(u)
    log_x = np.log(x)
    lo = np.full_like(x, -700.0)
    hi = np.full_like(x, 700.0)
    for _ in range(int(iters)):
        mid = 0.5 * (lo + hi)
        above = _cond_cdf(x, log_x, mid, lam) > w
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    y = np.exp(0.5 * (lo + hi))
    return np.exp(-y)
