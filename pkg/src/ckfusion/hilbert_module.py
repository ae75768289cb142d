"""The free Hilbert C^d-module H = A^n.

A vector is stored as an ``n x d`` complex array whose column ``t`` is the
t-th algebra component.  Because the algebra is commutative, every
orthogonally complemented submodule is a choice of one ordinary subspace of
C^n per component, and that is exactly how :class:`Submodule` stores it.
"""

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .algebra import AlgebraElement, sqrt_pos
from .errors import NotInvertible, ShapeMismatch


class ModuleVector:
    __slots__ = ("_e",)

    def __init__(self, entries):
        e = np.array(entries, dtype=complex)
        if e.ndim == 1:
            e = e[:, None]
        if e.ndim != 2:
            raise ShapeMismatch(f"module vector must be n x d, got shape {e.shape}")
        e.setflags(write=False)
        self._e = e

    @property
    def entries(self):
        return self._e

    @property
    def n(self):
        return self._e.shape[0]

    @property
    def d(self):
        return self._e.shape[1]

    @property
    def shape(self):
        return self._e.shape

    def component(self, t):
        return self._e[:, t]

    def scale(self, a):
        """Left module action a.x."""
        if isinstance(a, AlgebraElement):
            if a.d != self.d:
                raise ShapeMismatch("algebra/module dimension mismatch")
            return ModuleVector(self._e * a.values[None, :])
        return ModuleVector(self._e * a)

    def __add__(self, other):
        _same_shape(self, other)
        return ModuleVector(self._e + other._e)

    def __sub__(self, other):
        _same_shape(self, other)
        return ModuleVector(self._e - other._e)

    def __neg__(self):
        return ModuleVector(-self._e)

    def __repr__(self):
        return f"ModuleVector(n={self.n}, d={self.d})"

    def to_json(self):
        return la.to_pairs(self._e)

    @classmethod
    def from_json(cls, data):
        return cls(la.from_pairs(data))

    @classmethod
    def zeros(cls, n, d):
        return cls(np.zeros((n, d), dtype=complex))

    @classmethod
    def basis(cls, i, n, d=1):
        """e_i with every algebra component equal to the unit."""
        e = np.zeros((n, d), dtype=complex)
        e[i, :] = 1.0
        return cls(e)

    @classmethod
    def random(cls, n, d, rng):
        return cls(rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d)))


def _same_shape(x, y):
    if x.shape != y.shape:
        raise ShapeMismatch(f"shape {x.shape} vs {y.shape}")


def inner(x, y):
    """A-valued inner product, linear in the first argument.

    Component t is sum_i x[i, t] * conj(y[i, t]).
    """
    _same_shape(x, y)
    return AlgebraElement(np.einsum("it,it->t", x.entries, y.entries.conj()))


def module_norm(x):
    return float(np.sqrt(inner(x, x).norm()))


def abs_vec(x):
    return sqrt_pos(inner(x, x))


class SequenceVector:
    """Finite stand-in for l2(I, H) or l2(I, A)."""

    def __init__(self, items):
        self.items = list(items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def gram(self):
        """sum_i <x_i, x_i> (module case) or sum_i a_i a_i^* (algebra case)."""
        if not self.items:
            raise ValueError("empty sequence has no algebra to live in")
        first = self.items[0]
        if isinstance(first, AlgebraElement):
            return AlgebraElement(sum(np.abs(a.values) ** 2 for a in self.items))
        return AlgebraElement(sum(inner(x, x).values for x in self.items))

    def l2_norm(self):
        return float(np.sqrt(self.gram().norm()))


class Submodule:
    """Orthogonally complemented submodule, one orthonormal basis per component."""

    __slots__ = ("_bases", "_n")

    def __init__(self, bases, n=None):
        bases = [np.array(Q, dtype=complex) for Q in bases]
        if not bases:
            raise ShapeMismatch("submodule needs at least one algebra component")
        if n is None:
            n = bases[0].shape[0]
        for Q in bases:
            if Q.ndim != 2 or Q.shape[0] != n:
                raise ShapeMismatch(f"basis of shape {Q.shape} in C^{n}")
            Q.setflags(write=False)
        self._bases = tuple(bases)
        self._n = n

    @property
    def bases(self):
        return self._bases

    @property
    def n(self):
        return self._n

    @property
    def d(self):
        return len(self._bases)

    @property
    def ranks(self):
        return tuple(Q.shape[1] for Q in self._bases)

    def projection_blocks(self):
        return np.stack([Q @ Q.conj().T for Q in self._bases])

    def generators(self):
        """Module vectors whose t-th components are the t-th basis columns."""
        r = max(self.ranks, default=0)
        out = []
        for k in range(r):
            e = np.zeros((self._n, self.d), dtype=complex)
            for t, Q in enumerate(self._bases):
                if k < Q.shape[1]:
                    e[:, t] = Q[:, k]
            out.append(ModuleVector(e))
        return out

    def to_json(self):
        return {"generators": [g.to_json() for g in self.generators()]}

    @classmethod
    def from_json(cls, data, n, d, tol=DEFAULT_TOL):
        gens = [ModuleVector.from_json(g) for g in data["generators"]]
        if not gens:
            return cls.zero(n, d)
        sub = from_generators(gens, tol)
        if sub.n != n or sub.d != d:
            raise ShapeMismatch("generator shape disagrees with the declared n, d")
        return sub

    @classmethod
    def zero(cls, n, d):
        return cls([np.zeros((n, 0), dtype=complex) for _ in range(d)], n)

    @classmethod
    def full(cls, n, d):
        return cls([np.eye(n, dtype=complex) for _ in range(d)], n)

    @classmethod
    def coordinate(cls, indices, n, d=1):
        """Span of the standard basis vectors ``indices`` in every component."""
        Q = np.eye(n, dtype=complex)[:, list(indices)]
        return cls([Q] * d, n)

    def __repr__(self):
        return f"Submodule(n={self._n}, ranks={self.ranks})"


def from_generators(vectors, tol=DEFAULT_TOL):
    vectors = list(vectors)
    if not vectors:
        raise ShapeMismatch("from_generators needs a nonempty list")
    shape = vectors[0].shape
    for v in vectors:
        if v.shape != shape:
            raise ShapeMismatch(f"generator shape {v.shape} vs {shape}")
    n, d = shape
    stacked = np.stack([v.entries for v in vectors], axis=1)  # n x k x d
    return Submodule([la.orth(stacked[:, :, t], tol) for t in range(d)], n)


def _check_sub(W, x):
    if W.n != x.n or W.d != x.d:
        raise ShapeMismatch(f"submodule (n={W.n}, d={W.d}) vs vector {x.shape}")


def project(W, x):
    _check_sub(W, x)
    cols = [Q @ (Q.conj().T @ x.component(t)) for t, Q in enumerate(W.bases)]
    return ModuleVector(np.stack(cols, axis=1))


def complement(W):
    return Submodule([la.orth_complement(Q) for Q in W.bases], W.n)


def intersect(W, V, tol=DEFAULT_TOL):
    """W cap V, computed as the complement of span(W^perp, V^perp)."""
    if W.n != V.n or W.d != V.d:
        raise ShapeMismatch("intersecting submodules of different modules")
    bases = []
    for Qw, Qv in zip(W.bases, V.bases):
        perp = np.hstack([la.orth_complement(Qw), la.orth_complement(Qv)])
        bases.append(la.orth_complement(la.orth(perp, tol)))
    return Submodule(bases, W.n)


def image_under(U, W, tol=DEFAULT_TOL):
    """U(W) for an invertible operator U (anything exposing ``.blocks``)."""
    blocks = U.blocks
    if blocks.shape[0] != W.d or blocks.shape[1] != W.n:
        raise ShapeMismatch("operator and submodule live in different modules")
    bases = []
    for Ut, Q in zip(blocks, W.bases):
        s = np.linalg.svd(Ut, compute_uv=False)
        if s[0] == 0.0 or s[-1] <= tol * s[0]:
            raise NotInvertible("image_under needs an invertible operator")
        bases.append(la.orth(Ut @ Q, tol) if Q.shape[1] else Q)
    return Submodule(bases, W.n)


def contains(W, V, tol=DEFAULT_TOL):
    """True when V is a submodule of W (per-component subspace test)."""
    for Qw, Qv in zip(W.bases, V.bases):
        if Qv.shape[1] and np.linalg.norm(Qv - Qw @ (Qw.conj().T @ Qv), 2) > tol * max(1.0, np.sqrt(W.n)):
            return False
    return True
