"""Parametric joint tail families: formulas, boxes, integrals, homogeneity."""

import numpy as np
import pytest

from tailcovar.errors import ThetaOutOfBox, Unsupported
from tailcovar.families import (
    INVERTED_HUSLER_REISS,
    PARETO_MIXTURE,
    GenericTailFamily,
    resolve_family,
)


def test_pareto_mixture_values():
    assert PARETO_MIXTURE.c(1.0, 1.0, 1.5) == pytest.approx(2**0.5)
    assert PARETO_MIXTURE.c(2.0, 1.0, 1.5) == pytest.approx(2**0.5)  # min(2,1)=1
    assert PARETO_MIXTURE.c(0.5, 2.0, 2.0) == pytest.approx(2.0 * 0.25)
    assert PARETO_MIXTURE.eta(1.6) == pytest.approx(1 / 1.6)


def test_inverted_husler_reiss_values():
    assert INVERTED_HUSLER_REISS.c(1.0, 1.0, 0.7) == pytest.approx(1.0)
    assert INVERTED_HUSLER_REISS.c(2.0, 3.0, 0.8) == pytest.approx(6.0**0.8)
    assert INVERTED_HUSLER_REISS.eta(0.8) == pytest.approx(1 / 1.6)
    # theta = 1 is exact independence: c(x, y) = x*y and eta = 1/2
    assert INVERTED_HUSLER_REISS.c(2.0, 3.0, 1.0) == pytest.approx(6.0)
    assert INVERTED_HUSLER_REISS.eta(1.0) == pytest.approx(0.5)


def test_parameter_boxes():
    assert PARETO_MIXTURE.param_box == ((1.0, 2.0),)
    assert INVERTED_HUSLER_REISS.param_box == ((0.5, 1.0),)
    with pytest.raises(ThetaOutOfBox):
        PARETO_MIXTURE.c(1.0, 1.0, 2.5)
    with pytest.raises(ThetaOutOfBox):
        INVERTED_HUSLER_REISS.eta(0.3)


@pytest.mark.parametrize(
    "family,thetas",
    [
        (PARETO_MIXTURE, (1.0, 1.3, 1.7, 2.0)),
        (INVERTED_HUSLER_REISS, (0.5, 0.6, 0.85, 1.0)),
    ],
)
def test_homogeneity_of_order_one_over_eta(family, thetas):
    rng = np.random.Generator(np.random.Philox(41))
    for theta in thetas:
        inv_eta = 1.0 / family.eta(theta)
        for _ in range(100):
            x, y, a = rng.uniform(0.05, 3.0, size=3)
            lhs = family.c(a * x, a * y, theta)
            rhs = a**inv_eta * family.c(x, y, theta)
            assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("family", [PARETO_MIXTURE, INVERTED_HUSLER_REISS])
def test_closed_form_rect_integrals_match_quadrature(family):
    generic = GenericTailFamily(
        family_id="quadrature_twin",
        c=family.c,
        eta=family.eta,
        param_box=family.param_box,
    )
    theta = 0.5 * (family.param_box[0][0] + family.param_box[0][1])
    rects = [(0.0, 1.0, 0.0, 1.0), (0.0, 0.5, 0.0, 0.3), (0.5, 1.5, 0.25, 2.0)]
    for rect in rects:
        closed = family.rect_integral(rect, theta)
        numeric = generic.rect_integral(rect, theta)
        assert closed == pytest.approx(numeric, rel=1e-8)


def test_partial_derivatives_match_finite_differences():
    for family, theta in ((PARETO_MIXTURE, 1.7), (INVERTED_HUSLER_REISS, 0.8)):
        for x, y in ((0.4, 0.9), (1.2, 0.7), (0.6, 0.6001)):
            h = 1e-7
            fd_x = (family.c(x + h, y, theta) - family.c(x - h, y, theta)) / (2 * h)
            fd_y = (family.c(x, y + h, theta) - family.c(x, y - h, theta)) / (2 * h)
            assert family.c_x(x, y, theta) == pytest.approx(fd_x, rel=1e-5, abs=1e-7)
            assert family.c_y(x, y, theta) == pytest.approx(fd_y, rel=1e-5, abs=1e-7)


def test_generic_family_carries_custom_formulas():
    fam = GenericTailFamily(
        family_id="product_power",
        c=lambda x, y, t: (np.asarray(x) * np.asarray(y)) ** np.atleast_1d(t)[0],
        eta=lambda t: 1.0 / (2.0 * np.atleast_1d(t)[0]),
        param_box=((0.5, 1.0),),
    )
    assert fam.c(2.0, 3.0, 0.8) == pytest.approx(6.0**0.8)
    assert fam.eta(0.8) == pytest.approx(0.625)
    assert fam.rect_integral((0.0, 1.0, 0.0, 1.0), 1.0) == pytest.approx(0.25, rel=1e-8)


def test_resolve_family_accepts_aliases():
    for name in ("pm", "pareto-mixture", "pareto_mixture", "PM"):
        assert resolve_family(name) is PARETO_MIXTURE
    for name in ("ihr", "inverted-husler-reiss", "inverted_husler_reiss"):
        assert resolve_family(name) is INVERTED_HUSLER_REISS


def test_resolve_family_rejects_unknown_names():
    with pytest.raises(Unsupported):
        resolve_family("logistic")
