"""Adjointable operators on H = A^n and the operator-theoretic toolbox.

An operator is one ``n x n`` complex matrix per algebra component.  All the
"closed range" hypotheses of the infinite-dimensional theory are automatic
here, so the checks below only make rank-level decisions at ``tol``.
"""

from typing import NamedTuple, Optional

import numpy as np

from . import _linalg as la
from ._linalg import DEFAULT_TOL
from .algebra import AlgebraElement, leq
from .errors import NeitherCase, NotInvertible, ShapeMismatch
from .hilbert_module import ModuleVector, Submodule, image_under, inner


class ModuleOperator:
    __slots__ = ("_b",)

    def __init__(self, blocks):
        b = np.array(blocks, dtype=complex)
        if b.ndim == 2:
            b = b[None]
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise ShapeMismatch(f"operator blocks must be d x n x n, got {b.shape}")
        b.setflags(write=False)
        self._b = b

    @property
    def blocks(self):
        return self._b

    @property
    def d(self):
        return self._b.shape[0]

    @property
    def n(self):
        return self._b.shape[1]

    def __matmul__(self, other):
        if isinstance(other, ModuleOperator):
            return compose(self, other)
        if isinstance(other, ModuleVector):
            return apply(self, other)
        return NotImplemented

    def __add__(self, other):
        _same(self, other)
        return ModuleOperator(self._b + other._b)

    def __sub__(self, other):
        _same(self, other)
        return ModuleOperator(self._b - other._b)

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            return ModuleOperator(self._b * c.values[:, None, None])
        return ModuleOperator(self._b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return ModuleOperator(-self._b)

    @property
    def H(self):
        return adjoint(self)

    def __repr__(self):
        return f"ModuleOperator(d={self.d}, n={self.n})"

    def to_json(self):
        return la.to_pairs(self._b)

    @classmethod
    def from_json(cls, data):
        return cls(la.from_pairs(data))

    @classmethod
    def identity(cls, n, d=1):
        return cls(np.broadcast_to(np.eye(n), (d, n, n)))

    @classmethod
    def zeros(cls, n, d=1):
        return cls(np.zeros((d, n, n)))

    @classmethod
    def diag(cls, values, d=1):
        """Diagonal operator; ``values`` is length n (shared) or d x n."""
        v = np.asarray(values, dtype=complex)
        if v.ndim == 1:
            v = np.broadcast_to(v, (d, v.size))
        return cls(np.stack([np.diag(row) for row in v]))

    @classmethod
    def projection(cls, W):
        return cls(W.projection_blocks())


def _same(T, U):
    if T.blocks.shape != U.blocks.shape:
        raise ShapeMismatch(f"operator shapes {T.blocks.shape} vs {U.blocks.shape}")


def apply(T, x):
    if T.d != x.d or T.n != x.n:
        raise ShapeMismatch(f"operator (d={T.d}, n={T.n}) on vector {x.shape}")
    return ModuleVector(np.einsum("tij,jt->it", T.blocks, x.entries))


def adjoint(T):
    return ModuleOperator(np.conj(np.swapaxes(T.blocks, 1, 2)))


def compose(T, U):
    _same(T, U)
    return ModuleOperator(T.blocks @ U.blocks)


def op_norm(T):
    return max(la.spectral_norm(B) for B in T.blocks)


def is_hermitian(T, tol=DEFAULT_TOL):
    scale = max(1.0, op_norm(T))
    return all(np.linalg.norm(B - B.conj().T, 2) <= tol * scale for B in T.blocks)


def is_invertible(T, tol=DEFAULT_TOL):
    for B in T.blocks:
        s = np.linalg.svd(B, compute_uv=False)
        if s[0] == 0.0 or s[-1] <= tol * s[0]:
            return False
    return True


def inverse(T, tol=DEFAULT_TOL):
    if not is_invertible(T, tol):
        raise NotInvertible("operator is singular at the working tolerance")
    return ModuleOperator(np.linalg.inv(T.blocks))


def is_in_GLplus(T, tol=DEFAULT_TOL):
    """Positive (Hermitian PSD) and invertible, component by component."""
    if not is_hermitian(T, tol):
        return False
    scale = max(1.0, op_norm(T))
    return all(la.min_eig(B) > tol * scale for B in T.blocks)


def spectral_bounds(T):
    """(min, max) eigenvalue over all components of a Hermitian operator."""
    lo = min(la.min_eig(B) for B in T.blocks)
    hi = max(la.max_eig(B) for B in T.blocks)
    return lo, hi


def psd_sqrt(T):
    return ModuleOperator(np.stack([la.psd_sqrt(B) for B in T.blocks]))


def commutator_norm(T, U):
    _same(T, U)
    return max(la.spectral_norm(B) for B in (T.blocks @ U.blocks - U.blocks @ T.blocks))


def prop25_check(T, h, tol=DEFAULT_TOL):
    """<Th, Th> <= ||T||^2 <h, h> in the algebra order."""
    Th = apply(T, h)
    lhs = inner(Th, Th)
    rhs = inner(h, h) * (op_norm(T) ** 2)
    return leq(lhs, rhs, tol * max(1.0, rhs.norm()))


def moore_penrose(T, tol=DEFAULT_TOL):
    return ModuleOperator(np.stack([la.pinv(B, tol) for B in T.blocks]))


def penrose_residuals(T, Tp):
    """Residuals of the four Penrose identities for a candidate inverse Tp."""
    A, X = T.blocks, Tp.blocks
    AX, XA = A @ X, X @ A
    ct = lambda M: np.conj(np.swapaxes(M, 1, 2))  # noqa: E731
    norm = lambda M: max(la.spectral_norm(B) for B in M)  # noqa: E731
    return (norm(AX @ A - A), norm(XA @ X - X), norm(ct(AX) - AX), norm(ct(XA) - XA))


def range_projection(T, tol=DEFAULT_TOL):
    return Submodule([la.orth(B, tol) for B in T.blocks], T.n)


def kernel_projection(T, tol=DEFAULT_TOL):
    return Submodule([la.null_basis(B, tol) for B in T.blocks], T.n)


def lemma26_check(T, tol=DEFAULT_TOL):
    """Surjectivity of T and the bounded-below constant of T^*.

    ``m`` is the smallest singular value over all components, so that
    ||T^* x|| >= m ||x|| for every x.  T is surjective iff m > tol.
    """
    m = min(float(np.linalg.svd(B, compute_uv=False)[-1]) for B in T.blocks)
    return m > tol, m


class SandwichBounds(NamedTuple):
    lower: float
    upper: float
    which: str  # "injective" (T^*T) or "surjective" (TT^*)


def lemma27_bounds(T, tol=DEFAULT_TOL):
    """Eigenvalue sandwich ||(G)^{-1}||^{-1} I <= G <= ||T||^2 I.

    G is T^*T when T is injective, otherwise TT^* when T is surjective.
    Both inequalities are re-checked as PSD conditions before returning.
    """
    injective = all(la.null_basis(B, tol).shape[1] == 0 for B in T.blocks)
    surjective = all(la.null_basis(B.conj().T, tol).shape[1] == 0 for B in T.blocks)
    if injective:
        G, which = adjoint(T).blocks @ T.blocks, "injective"
    elif surjective:
        G, which = T.blocks @ adjoint(T).blocks, "surjective"
    else:
        raise NeitherCase("T is neither injective nor surjective")
    lower = 1.0 / max(la.spectral_norm(np.linalg.inv(g)) for g in G)
    upper = op_norm(T) ** 2
    eye = np.eye(T.n)
    slack = tol * max(1.0, upper)
    for g in G:
        assert la.min_eig(g - lower * eye) >= -slack
        assert la.min_eig(upper * eye - g) >= -slack
    return SandwichBounds(lower, upper, which)


class DouglasResult(NamedTuple):
    inclusion: bool
    lam: Optional[float]
    mu: Optional[float]


def douglas_check(Tp, T, tol=DEFAULT_TOL):
    """Range inclusion Im(T') in Im(T) and the minimal lambda with T'T'^* <= lambda TT^*.

    When the inclusion holds, T' = T X with X = T^dagger T', so the smallest
    feasible lambda is ||X||^2 (maximised over components) and mu = sqrt(lambda).
    """
    _same(Tp, T)
    lam = 0.0
    for Bp, B in zip(Tp.blocks, T.blocks):
        scale = max(la.spectral_norm(Bp), la.spectral_norm(B), 1.0)
        R = la.orth(B, tol)
        leak = Bp - R @ (R.conj().T @ Bp)
        if la.spectral_norm(leak) > tol * scale * 10:
            return DouglasResult(False, None, None)
        X = la.pinv(B, tol) @ Bp
        lam = max(lam, la.spectral_norm(X) ** 2)
    return DouglasResult(True, lam, float(np.sqrt(lam)))


class TransportResult(NamedTuple):
    image: Submodule
    formula_projection: Optional[ModuleOperator]
    residual: Optional[float]
    hypothesis_ok: bool
    hypothesis_residual: float


def projection_transport(T, M, tol=DEFAULT_TOL):
    """TM computed from the basis image and, when T^*T M is inside M, from T pi_M T^{-1}.

    The hypothesis is measured as ||(I - pi_M) T^*T pi_M||.  When it fails
    the formula route is skipped and only the basis image is returned.
    """
    Tinv = inverse(T, tol)
    P = ModuleOperator.projection(M)
    Id = ModuleOperator.identity(T.n, T.d)
    hyp = op_norm((Id - P) @ adjoint(T) @ T @ P)
    image = image_under(T, M, tol)
    ok = hyp <= tol * max(1.0, op_norm(T) ** 2)
    if not ok:
        return TransportResult(image, None, None, False, hyp)
    formula = T @ P @ Tinv
    resid = op_norm(formula - ModuleOperator.projection(image))
    return TransportResult(image, formula, resid, True, hyp)
