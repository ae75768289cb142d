"""Seeded random frame systems and the fixed worked example."""

from dataclasses import dataclass

import numpy as np

from . import _linalg as la
from .algebra import AlgebraElement
from .errors import CrossNotPositive, GenerationFailed, ValidationFailed
from .frames import FrameSystem, optimal_star_bounds
from .hilbert_module import Submodule
from .operators import ModuleOperator

CONTROL_MODES = ("equal", "commuting", "independent", "identity")
PRESETS = ("random", "coordinate")


@dataclass(frozen=True)
class InstanceSpec:
    d: int
    n: int
    m: int
    rank_range: tuple = (1, 1)
    weight_range: tuple = (0.5, 2.0)
    control_condition: float = 2.0
    k_rank: int = -1  # -1 means full rank n
    seed: int = 0
    control_mode: str = "equal"
    preset: str = "random"
    require_frame: bool = True
    max_attempts: int = 50

    def __post_init__(self):
        if min(self.d, self.n, self.m) < 1:
            raise ValidationFailed("d, n and m must be positive")
        lo, hi = self.rank_range
        if not 0 <= lo <= hi <= self.n:
            raise ValidationFailed(f"rank_range {self.rank_range} not within [0, {self.n}]")
        wlo, whi = self.weight_range
        if not 0 < wlo <= whi:
            raise ValidationFailed(f"weight_range {self.weight_range} must be positive and ordered")
        if self.control_condition < 1:
            raise ValidationFailed("control_condition must be >= 1")
        if self.k_rank > self.n:
            raise ValidationFailed(f"k_rank {self.k_rank} exceeds n = {self.n}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationFailed("seed must be a 64-bit unsigned integer")
        if self.control_mode not in CONTROL_MODES:
            raise ValidationFailed(f"control_mode must be one of {CONTROL_MODES}")
        if self.preset not in PRESETS:
            raise ValidationFailed(f"preset must be one of {PRESETS}")

    @property
    def effective_k_rank(self):
        return self.n if self.k_rank < 0 else self.k_rank


def random_unitary(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _spectrum(rng, n, cond):
    """Eigenvalues in [1/cond, 1], both ends attained when n > 1."""
    lam = np.exp(rng.uniform(-np.log(cond), 0.0, n))
    if n > 1 and cond > 1:
        lam[0], lam[-1] = 1.0 / cond, 1.0
    return lam


def _positive(Q, lam):
    M = (Q * lam) @ Q.conj().T
    return la.herm(M)


def coordinate_frame(n, m, d=1):
    subs = [Submodule.coordinate([i % n], n, d) for i in range(m)]
    Id = ModuleOperator.identity(n, d)
    ones = AlgebraElement(np.ones(d))
    return FrameSystem(subs, [ones] * m, Id, Id, Id)


def _draw(spec, rng):
    n, d, m = spec.n, spec.d, spec.m
    lo, hi = spec.rank_range
    kr = spec.effective_k_rank
    cond = spec.control_condition
    Cb, Cpb, Kb = [], [], []
    bases = [[] for _ in range(m)]
    for _ in range(d):
        if spec.control_mode == "commuting":
            Q = random_unitary(rng, n)
            for i in range(m):
                cols = rng.choice(n, size=int(rng.integers(lo, hi + 1)), replace=False)
                bases[i].append(Q[:, np.sort(cols)])
            Cb.append(_positive(Q, _spectrum(rng, n, cond)))
            Cpb.append(_positive(Q, _spectrum(rng, n, cond)))
            k = np.zeros(n)
            k[rng.choice(n, size=kr, replace=False)] = rng.uniform(0.5, 1.5, kr)
            Kb.append((Q * k) @ Q.conj().T)
            continue
        for i in range(m):
            r = int(rng.integers(lo, hi + 1))
            G = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
            bases[i].append(la.orth(G) if r else np.zeros((n, 0), dtype=complex))
        if spec.control_mode == "identity":
            C = Cp = np.eye(n, dtype=complex)
        else:
            C = _positive(random_unitary(rng, n), _spectrum(rng, n, cond))
            Cp = C if spec.control_mode == "equal" else _positive(random_unitary(rng, n), _spectrum(rng, n, cond))
        Cb.append(C)
        Cpb.append(Cp)
        G1 = rng.standard_normal((n, kr)) + 1j * rng.standard_normal((n, kr))
        G2 = rng.standard_normal((kr, n)) + 1j * rng.standard_normal((kr, n))
        Kb.append(G1 @ G2 / np.sqrt(n))
    wlo, whi = spec.weight_range
    weights = [AlgebraElement(rng.uniform(wlo, whi, d)) for _ in range(m)]
    subs = [Submodule(b, n) for b in bases]
    return FrameSystem(subs, weights, ModuleOperator(Cb), ModuleOperator(Cpb), ModuleOperator(Kb))


def generate(spec):
    """Draw a validated FrameSystem from ``spec``; retries are seeded too."""
    if spec.preset == "coordinate":
        return coordinate_frame(spec.n, spec.m, spec.d)
    rng = np.random.default_rng(spec.seed)
    last = "no attempt made"
    for _ in range(spec.max_attempts):
        F = _draw(spec, rng)
        if not F.cross_ok:
            last = "C'^* pi_W C not positive"
            continue
        if spec.require_frame and spec.effective_k_rank > 0:
            b = optimal_star_bounds(F)
            if not b.is_frame or b.A_scalar < 1e-6:
                last = "drawn system is not a K-frame"
                continue
        return F
    raise GenerationFailed(f"no valid instance after {spec.max_attempts} attempts ({last})")


def sequence_example_system(N=16, alpha=1.0, beta=1.0, layout="scalar"):
    """Finite truncation of the sequence-space example.

    W_j keeps only coordinate 2j (1-based), weights are 1, C = alpha I,
    C' = beta I and K multiplies even coordinates by beta / 2 and kills odd
    ones.  The lower *-bound is then 2 sqrt(alpha / beta).

    ``layout="scalar"`` stores the N coordinates as the module C^N over
    d = 1; ``layout="sequence"`` stores them as the algebra C^N acting on
    itself (n = 1, d = N).
    """
    if N < 2 or N % 2:
        raise ValidationFailed("N must be a positive even integer")
    if alpha <= 0 or beta <= 0:
        raise ValidationFailed("alpha and beta must be positive")
    even = np.arange(1, N, 2)  # 0-based positions of 1-based even coordinates
    kdiag = np.zeros(N)
    kdiag[even] = beta / 2
    if layout == "scalar":
        subs = [Submodule.coordinate([j], N, 1) for j in even]
        w = [AlgebraElement([1.0])] * len(subs)
        C = ModuleOperator.identity(N, 1) * alpha
        Cp = ModuleOperator.identity(N, 1) * beta
        K = ModuleOperator.diag(kdiag, 1)
    elif layout == "sequence":
        subs = []
        for j in even:
            subs.append(Submodule([np.ones((1, 1)) if t == j else np.zeros((1, 0)) for t in range(N)], 1))
        w = [AlgebraElement(np.ones(N))] * len(subs)
        C = ModuleOperator.identity(1, N) * alpha
        Cp = ModuleOperator.identity(1, N) * beta
        K = ModuleOperator(kdiag.reshape(N, 1, 1))
    else:
        raise ValidationFailed(f"unknown layout {layout!r}")
    F = FrameSystem(subs, w, C, Cp, K)
    if not F.cross_ok:  # cannot happen for scalar controls
        raise CrossNotPositive("example system has a non-positive cross term")
    return F
