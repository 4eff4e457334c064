import numpy as np
import pytest

from opbell.errors import DomainViolation
from opbell.functions import (
    Affine,
    Exp,
    IntervalBounds,
    Power,
    PowerOneMinus,
    Shape,
    Tabulated,
    parse_function,
    shape_on,
)


def test_eval_examples():
    assert PowerOneMinus(3).eval(0.5) == 0.125
    assert Exp().eval(0.0) == 1.0
    assert Power(1 / 3).eval(8.0) == pytest.approx(2.0, rel=1e-15)


def test_domains():
    assert PowerOneMinus(3).domain.contains(5.0)
    assert not PowerOneMinus(2.5).domain.contains(1.0)
    assert PowerOneMinus(-2).domain.contains(0.999)
    assert Power(0.5).domain.contains(0.0)
    assert not Power(-1).domain.contains(0.0)
    assert Power(3).domain.contains(-2.0)
    with pytest.raises(DomainViolation):
        PowerOneMinus(-2).eval(1.0)
    with pytest.raises(DomainViolation):
        Power(0.5).eval(-0.1)


def test_tabulated_interpolates_and_validates():
    f = Tabulated([0, 1, 2], [0, 2, 3])
    assert f.eval(0.5) == 1.0
    assert f.eval(1.5) == 2.5
    with pytest.raises(DomainViolation):
        f.eval(2.5)
    with pytest.raises(ValueError):
        Tabulated([0, 0], [1, 1])


@pytest.mark.parametrize("t", np.linspace(-3, 0.99, 17))
@pytest.mark.parametrize("r", [-3, -1.5, 0.5, 2, 3.7])
def test_power_one_minus_is_shifted_power(r, t):
    assert PowerOneMinus(r).eval(t) == pytest.approx(Power(r).eval(1 - t), rel=1e-12)


def test_shape_examples():
    assert shape_on(PowerOneMinus(3), IntervalBounds(0.1, 0.5)) is Shape.CONVEX
    assert shape_on(Power(1 / 3), IntervalBounds(0.1, 0.9)) is Shape.CONCAVE
    assert shape_on(Affine(2, 1), IntervalBounds(-5, 5)) is Shape.AFFINE
    assert shape_on(Tabulated([0, 1, 2], [0, 2, 3]), IntervalBounds(0, 2)) is Shape.CONCAVE
    assert shape_on(Power(3), IntervalBounds(-1, 1)) is Shape.NEITHER


@pytest.mark.parametrize("r", [-4, -2.5, -1, -0.3, 0.2, 0.5, 0.9, 1.3, 2, 2.5, 4])
@pytest.mark.parametrize("mM", [(0.1, 0.5), (0.2, 0.8), (0.05, 0.95)])
def test_power_one_minus_shape_grid(r, mM):
    expect = Shape.CONCAVE if 0 < r < 1 else Shape.CONVEX
    assert shape_on(PowerOneMinus(r), IntervalBounds(*mM)) is expect


@pytest.mark.parametrize("mM", [(-3, -1), (0.1, 0.9), (2, 10)])
def test_exp_always_convex(mM):
    assert shape_on(Exp(), IntervalBounds(*mM)) is Shape.CONVEX


def test_shape_needs_samples():
    with pytest.raises(ValueError):
        shape_on(Exp(), IntervalBounds(0, 1), samples=2)


@pytest.mark.parametrize("spec", ["power-one-minus:r=3", "exp", "power:p=0.5", "affine:a=1,b=0",
                                  "tabulated:0.0/1.0;1.0/3.0"])
def test_spec_round_trip(spec):
    f = parse_function(spec)
    assert parse_function(f.spec) == f


def test_parse_errors():
    for bad in ("nope", "power", "power:q=2", "affine:a"):
        with pytest.raises(ValueError):
            parse_function(bad)


def test_bounds_validation():
    with pytest.raises(ValueError):
        IntervalBounds(0.5, 0.1)
    assert IntervalBounds(0.3, 0.3).degenerate
