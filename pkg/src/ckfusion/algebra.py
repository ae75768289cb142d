"""The commutative unital C*-algebra C^d.

Elements are d-tuples of complex numbers with pointwise product, pointwise
conjugation as the involution and the sup norm.  ``d = 1`` is the scalar
algebra; larger ``d`` is a finite truncation of l^infinity.
"""

from dataclasses import dataclass

import numpy as np

from ._linalg import DEFAULT_TOL, from_pairs, to_pairs
from .errors import DescriptorMismatch, NotInvertible, NotPositive


@dataclass(frozen=True)
class AlgebraDescriptor:
    d: int

    def __post_init__(self):
        if int(self.d) < 1:
            raise ValueError(f"algebra needs d >= 1, got {self.d}")

    def one(self):
        return AlgebraElement(np.ones(self.d))

    def zero(self):
        return AlgebraElement(np.zeros(self.d))

    def scalar(self, c):
        return AlgebraElement(np.full(self.d, c, dtype=complex))


class AlgebraElement:
    """Immutable element of C^d."""

    __slots__ = ("_v",)

    def __init__(self, values):
        v = np.array(values, dtype=complex).reshape(-1)
        if v.size == 0:
            raise ValueError("algebra element needs at least one component")
        v.setflags(write=False)
        self._v = v

    @property
    def values(self):
        return self._v

    @property
    def d(self):
        return self._v.size

    @property
    def descriptor(self):
        return AlgebraDescriptor(self.d)

    @property
    def real(self):
        return self._v.real.copy()

    def norm(self):
        return float(np.max(np.abs(self._v)))

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement(np.broadcast_to(np.asarray(other, dtype=complex), (self.d,)))
        if other.d != self.d:
            raise DescriptorMismatch(f"algebra dimension {self.d} vs {other.d}")
        return other

    def __add__(self, other):
        return AlgebraElement(self._v + self._check(other)._v)

    __radd__ = __add__

    def __sub__(self, other):
        return AlgebraElement(self._v - self._check(other)._v)

    def __rsub__(self, other):
        return AlgebraElement(self._check(other)._v - self._v)

    def __mul__(self, other):
        return AlgebraElement(self._v * self._check(other)._v)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(-self._v)

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and np.array_equal(self._v, other._v)

    def __hash__(self):
        return hash(self._v.tobytes())

    def __repr__(self):
        return f"AlgebraElement({np.array2string(self._v, precision=6)})"

    def allclose(self, other, atol=1e-12):
        other = self._check(other)
        return bool(np.allclose(self._v, other._v, atol=atol, rtol=0))

    def to_json(self):
        return to_pairs(self._v)

    @classmethod
    def from_json(cls, data):
        return cls(from_pairs(data))


def one(d):
    return AlgebraElement(np.ones(d))


def star(a):
    return AlgebraElement(np.conj(a.values))


def add(a, b):
    return a + b


def sub(a, b):
    return a - b


def mul(a, b):
    return a * b


def inv(a, tol=DEFAULT_TOL):
    if np.any(np.abs(a.values) <= tol):
        raise NotInvertible(f"component within {tol:g} of zero: {a!r}")
    return AlgebraElement(1.0 / a.values)


def is_positive(a, tol=DEFAULT_TOL):
    v = a.values
    return bool(np.all(np.abs(v.imag) <= tol) and np.all(v.real >= -tol))


def leq(a, b, tol=DEFAULT_TOL):
    """The order a <= b, i.e. b - a is positive."""
    return is_positive(b - a, tol)


def sqrt_pos(a, tol=DEFAULT_TOL):
    if not is_positive(a, tol):
        raise NotPositive(f"{a!r} is not positive")
    return AlgebraElement(np.sqrt(np.clip(a.values.real, 0.0, None)))


def abs_alg(a):
    return AlgebraElement(np.abs(a.values))


def is_strictly_nonzero(a, tol=DEFAULT_TOL):
    # positive and invertible: every component real and above tol
    return is_positive(a, tol) and bool(np.all(a.values.real > tol))
