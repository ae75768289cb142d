"""Dense per-block helpers used by the module, operator and frame layers."""

import numpy as np

DEFAULT_TOL = 1e-9


def herm(M):
    return 0.5 * (M + M.conj().T)


def orth(M, tol=DEFAULT_TOL):
    """Orthonormal basis of the column space of ``M``.

    Rank is decided by a singular-value cutoff relative to the largest
    singular value, so the result does not depend on the scale of ``M``.
    """
    n = M.shape[0]
    if M.size == 0:
        return np.zeros((n, 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, 0), dtype=complex)
    r = int(np.sum(s > tol * s[0]))
    return U[:, :r].astype(complex)


def orth_complement(Q):
    """Orthonormal basis of the orthogonal complement of ``span(Q)``.

    ``Q`` must already have orthonormal columns.
    """
    n, r = Q.shape
    if r == 0:
        return np.eye(n, dtype=complex)
    if r == n:
        return np.zeros((n, 0), dtype=complex)
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, r:].astype(complex)


def null_basis(M, tol=DEFAULT_TOL):
    n = M.shape[1]
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n, dtype=complex)
    r = int(np.sum(s > tol * s[0]))
    return Vh[r:].conj().T.astype(complex)


def psd_sqrt(M):
    """Positive square root of a Hermitian PSD matrix via eigendecomposition.

    Tiny negative eigenvalues caused by rounding are clipped to zero.
    """
    lam, U = np.linalg.eigh(herm(M))
    lam = np.clip(lam, 0.0, None)
    return (U * np.sqrt(lam)) @ U.conj().T


def pinv(M, tol=DEFAULT_TOL):
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=complex)
    keep = s > tol * s[0]
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vh.conj().T * s_inv) @ U.conj().T


def spectral_norm(M):
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def min_eig(M):
    return float(np.linalg.eigvalsh(herm(M))[0])


def max_eig(M):
    return float(np.linalg.eigvalsh(herm(M))[-1])


def lowest_eigpair(M):
    lam, U = np.linalg.eigh(herm(M))
    return float(lam[0]), U[:, 0]


def to_pairs(a):
    """Complex array -> nested lists with a trailing [re, im] axis."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def from_pairs(data):
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex numbers must be encoded as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
