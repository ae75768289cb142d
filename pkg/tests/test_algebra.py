import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ckfusion.algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    abs_alg,
    inv,
    is_positive,
    is_strictly_nonzero,
    leq,
    mul,
    one,
    sqrt_pos,
    star,
)
from ckfusion.errors import DescriptorMismatch, NotInvertible, NotPositive

finite = st.floats(-1e3, 1e3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def elements(d=3):
    return st.lists(cplx, min_size=d, max_size=d).map(AlgebraElement)


def positives(d=3):
    return st.lists(st.floats(0, 1e3), min_size=d, max_size=d).map(AlgebraElement)


def test_star_examples():
    assert star(AlgebraElement([1 + 2j])) == AlgebraElement([1 - 2j])
    assert star(AlgebraElement([1, -1j])) == AlgebraElement([1, 1j])


def test_mul_examples():
    assert mul(AlgebraElement([2]), AlgebraElement([3])) == AlgebraElement([6])
    assert mul(AlgebraElement([1, 2]), AlgebraElement([0, 5])) == AlgebraElement([0, 10])


def test_descriptor_mismatch():
    with pytest.raises(DescriptorMismatch):
        AlgebraElement([1, 2]) + AlgebraElement([1, 2, 3])
    with pytest.raises(ValueError):
        AlgebraDescriptor(0)


def test_inv_examples():
    assert inv(AlgebraElement([2, 4])).allclose([0.5, 0.25])
    assert inv(AlgebraElement([1])) == AlgebraElement([1])
    with pytest.raises(NotInvertible):
        inv(AlgebraElement([0, 1]))


def test_positivity_examples():
    assert is_positive(AlgebraElement([0, 3]))
    assert not is_positive(AlgebraElement([-1, 2]))
    assert not is_positive(AlgebraElement([1j]))
    assert leq(AlgebraElement([1, 1]), AlgebraElement([2, 3]))
    assert not leq(AlgebraElement([1, 5]), AlgebraElement([2, 3]))


def test_sqrt_and_abs_examples():
    assert sqrt_pos(AlgebraElement([4, 9])).allclose([2, 3])
    assert sqrt_pos(AlgebraElement([0])).allclose([0])
    with pytest.raises(NotPositive):
        sqrt_pos(AlgebraElement([-1]))
    assert abs_alg(AlgebraElement([3 - 4j])).allclose([5])
    assert abs_alg(AlgebraElement([-2, 1j])).allclose([2, 1])


def test_strictly_nonzero_examples():
    assert is_strictly_nonzero(AlgebraElement([2, 0.5]))
    assert not is_strictly_nonzero(AlgebraElement([2, 0]))
    assert not is_strictly_nonzero(AlgebraElement([-1]))


def test_json_round_trip():
    a = AlgebraElement([1 + 2j, -3.5])
    assert AlgebraElement.from_json(a.to_json()) == a


@given(elements())
def test_star_is_involution(a):
    assert star(star(a)) == a


@given(elements())
def test_unit_and_reflexivity(a):
    assert a * one(3) == a
    assert leq(a, a)


@given(elements())
def test_cstar_identity(a):
    assert np.isclose((star(a) * a).norm(), a.norm() ** 2, rtol=1e-12, atol=1e-12)


@given(elements())
def test_abs_squared_is_star_product(a):
    assert (abs_alg(a) * abs_alg(a)).allclose(star(a) * a, atol=1e-9 * max(1, a.norm() ** 2))


@given(positives())
def test_sqrt_squares_back(a):
    r = sqrt_pos(a)
    assert (r * r).allclose(a, atol=1e-9 * max(1, a.norm()))


@given(positives(), positives(), positives())
def test_order_transitive(a, b, c):
    lo, mid, hi = (AlgebraElement(v) for v in np.sort(np.stack([a.real, b.real, c.real]), axis=0))
    assert leq(lo, mid) and leq(mid, hi) and leq(lo, hi, 2e-9)


@given(positives(), positives())
def test_sqrt_monotone(a, b):
    lo = AlgebraElement(np.minimum(a.real, b.real))
    hi = AlgebraElement(np.maximum(a.real, b.real))
    assert leq(sqrt_pos(lo), sqrt_pos(hi))


@given(st.lists(st.floats(1e-3, 1e3), min_size=3, max_size=3))
def test_inverse_accuracy(vals):
    a = AlgebraElement(vals)
    assert (a * inv(a) - one(3)).norm() <= 10 * np.finfo(float).eps
