import math

import pytest

from meanx.domain import Interval, PointVector, POSITIVE, REALS
from meanx.errors import DomainError


def test_interval_ordering_enforced():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(-1.0, 1.0, requires_positive=True)


def test_positive_interval_excludes_zero():
    assert not POSITIVE.contains(0.0)
    assert POSITIVE.contains(1e-300)
    assert not POSITIVE.contains(-1.0)
    assert POSITIVE.contains(math.inf)


def test_reals_contains_everything_finite():
    assert REALS.contains(-1e300)
    assert REALS.contains(0.0)
    assert not REALS.contains(math.nan)


def test_check_raises_with_position():
    with pytest.raises(DomainError):
        POSITIVE.check([1.0, -2.0])


def test_point_vector_drop_is_one_based():
    pv = PointVector((1.0, 2.0, 3.0))
    assert pv.drop(1).values == (2.0, 3.0)
    assert pv.drop(3).values == (1.0, 2.0)
    with pytest.raises(IndexError):
        pv.drop(0)
    with pytest.raises(IndexError):
        pv.drop(4)


def test_point_vector_validates_against_interval():
    PointVector.of([1.0, 2.0], POSITIVE)
    with pytest.raises(DomainError):
        PointVector.of([1.0, 0.0], POSITIVE)


def test_point_vector_requires_entries():
    with pytest.raises(ValueError):
        PointVector(())
