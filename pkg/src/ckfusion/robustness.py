"""Robustness certificates: removing one submodule, erasing a subset, perturbing all of them.

Each routine evaluates the sufficient conditions first, then measures
the reduced or perturbed family directly with the PSD machinery, so the
verdict never rests on the hypotheses alone.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import expm

from . import _linalg as la
from .algebra import AlgebraElement
from .certificate import EVIDENCE, INDEPENDENT, PROOF, Certificate, HypothesisResult
from .errors import HypothesisFailed, NotAFrame, ShapeMismatch, ValidationFailed
from .frames import FrameClass, bounds_for, optimal_star_bounds, verify_membership
from .hilbert_module import ModuleVector, SequenceVector, Submodule, intersect
from .operators import ModuleOperator, adjoint, commutator_norm, inverse, lemma26_check, moore_penrose, op_norm


def _frame_bounds(F):
    b = optimal_star_bounds(F)
    if not b.is_frame:
        raise NotAFrame("the input system is not a controlled *-K-fusion frame")
    return b


def _pinv_norm(K, tol):
    return op_norm(moore_penrose(K, tol))


# ------------------------------------------------------------------ removal


def removal_single(F, i0):
    """Is {W_i}_{i != i0} still a controlled *-K-fusion frame?

    Condition (i): the remaining submodules lie in Ran(K) and
    Ran(C'^* pi_{i0} C) is orthogonal to Ran(K).  Condition (ii): the
    constant A' = A^2 - w_{i0}^2 ||C'^* pi_{i0} C|| ||K^+||^2 is positive,
    in which case sqrt(A') lower-bounds the reduced family when K is
    surjective.  The reduced family is always measured directly.
    """
    if not 0 <= i0 < F.m:
        raise IndexError(f"submodule index {i0} out of range 0..{F.m - 1}")
    tol = F.tol
    b = _frame_bounds(F)
    A = b.A_scalar if b.A_scalar is not None else 0.0
    X = F.cross_blocks[i0]
    RK = [la.orth(Kt, tol) for Kt in F.K.blocks]

    inside = True
    for i, W in enumerate(F.submodules):
        if i == i0:
            continue
        for Q, R in zip(W.bases, RK):
            if Q.shape[1] and la.spectral_norm(Q - R @ (R.conj().T @ Q)) > 10 * tol:
                inside = False
    xscale = max(1.0, max(la.spectral_norm(Xt) for Xt in X))
    ortho = all(la.spectral_norm(R.conj().T @ Xt) <= 10 * tol * xscale for R, Xt in zip(RK, X) if R.shape[1])
    cond_i = inside and ortho

    xn = max(la.spectral_norm(Xt) for Xt in X)  # = ||(C'^* pi C)^{1/2}||^2
    kd = _pinv_norm(F.K, tol)
    w2 = float(np.max(F.weights_sq[i0]))
    A_prime = A ** 2 - w2 * xn * kd ** 2
    cond_ii = A_prime > tol
    surjective, _ = lemma26_check(F.K, tol)

    Fr = F.without([i0])
    br = optimal_star_bounds(Fr)
    measured = br.A_scalar
    conclusion = br.is_frame
    bound_ok = None
    if cond_ii and surjective and measured is not None:
        bound_ok = measured >= np.sqrt(A_prime) - 1e-8
        conclusion = conclusion and bound_ok
    return Certificate(
        claim=f"removing submodule {i0} leaves a controlled *-K-fusion frame",
        conclusion_verified=conclusion,
        hypothesis_results=[
            HypothesisResult("(i) submodules inside Ran(K)", inside),
            HypothesisResult("(i) Ran(C'^* pi C) orthogonal to Ran(K)", ortho, note="Ran(T) read as Ran(K)"),
            HypothesisResult("(ii) A' > 0", cond_ii, A_prime),
            HypothesisResult("K surjective", surjective),
        ],
        predicted_bound=np.sqrt(A_prime) if cond_ii else None,
        measured_bound=measured,
        residuals={"A_prime": A_prime, "lower_bound_ok": bound_ok},
        witness=None if br.is_frame else br.witness_vector("lower"),
        labels=[PROOF, INDEPENDENT],
        details={
            "condition_i": cond_i,
            "condition_ii": cond_ii,
            "constant_statement": A - xn ** 2 * kd ** 2,
            "constant_proof_final": A - np.sqrt(w2) * np.sqrt(xn) * kd,
            "constant_used": A_prime,
        },
    )


# ------------------------------------------------------------------ erasure


def erasure_subset(F, J, A=None, B=None):
    """Erase {W_i}_{i in J} from a (C, C)-controlled K-fusion frame.

    A, B are real bounds (squares of the scalar *-bounds by default).
    (i) B ||C^{-1}||^2 < sum_J w_i^2 should force the J-intersection to be
    zero; it is checked in both directions.  (ii) ||K^+||^2 sum_J w_i^2 < A
    with predicted constant min_t (A - ||K^+||^2 sum_J w_{i,t}^2).  That
    constant is only guaranteed when K is surjective and ||C|| <= 1; the
    certificate carries the ||C||^2-corrected constant and a flag when the
    uncorrected hypothesis holds but the reduced family is not a frame.
    """
    tol = F.tol
    J = sorted(set(int(j) for j in J))
    if any(j < 0 or j >= F.m for j in J):
        raise IndexError(f"erasure set {J} out of range 0..{F.m - 1}")
    if op_norm(F.C - F.Cp) > tol * max(1.0, op_norm(F.C)):
        raise HypothesisFailed("erasure needs a (C, C)-controlled system (C' = C)")
    Cinv = inverse(F.C, tol)
    for i, W in enumerate(F.submodules):
        P = ModuleOperator.projection(W)
        if commutator_norm(P, Cinv) > tol * max(1.0, op_norm(Cinv)):
            raise HypothesisFailed(f"pi_W{i} does not commute with C^-1")
    b = _frame_bounds(F)
    A = (b.A_scalar ** 2 if b.A_scalar is not None else 0.0) if A is None else float(A)
    B = b.B_scalar ** 2 if B is None else float(B)

    SJ = F.weights_sq[J].sum(axis=0) if J else np.zeros(F.d)
    cinv2 = op_norm(Cinv) ** 2
    hyp_i = bool(np.all(B * cinv2 < SJ - tol))
    if J:
        inter = F.submodules[J[0]]
        for j in J[1:]:
            inter = intersect(inter, F.submodules[j], tol)
        inter_zero = all(r == 0 for r in inter.ranks)
    else:
        inter_zero = False
    direction_i_ok = inter_zero or not hyp_i

    kd2 = _pinv_norm(F.K, tol) ** 2
    c2 = op_norm(F.C) ** 2
    hyp_ii = bool(np.all(kd2 * SJ < A - tol))
    predicted = float(np.min(A - kd2 * SJ))
    corrected = float(np.min(A - c2 * kd2 * SJ))
    surjective, _ = lemma26_check(F.K, tol)

    Fr = F.without(J)
    br = optimal_star_bounds(Fr)
    measured = br.A_scalar ** 2 if br.A_scalar is not None else None
    bound_ok = None
    if hyp_ii and measured is not None:
        bound_ok = measured >= predicted - 1e-8
    counterexample = hyp_ii and not br.is_frame
    conclusion = direction_i_ok and br.is_frame and bound_ok is not False
    return Certificate(
        claim=f"erasing {J} leaves a (C, C)-controlled K-fusion frame",
        conclusion_verified=conclusion,
        hypothesis_results=[
            HypothesisResult("(i) B ||C^-1||^2 < sum_J w^2", hyp_i, float(np.min(SJ - B * cinv2))),
            HypothesisResult("(ii) ||K^+||^2 sum_J w^2 < A", hyp_ii, float(np.min(A - kd2 * SJ))),
            HypothesisResult("(ii) corrected: K surjective", surjective),
            HypothesisResult("(ii) corrected: ||C||^2 ||K^+||^2 sum_J w^2 < A", corrected > tol, corrected),
        ],
        predicted_bound=predicted if hyp_ii else None,
        measured_bound=measured,
        residuals={"intersection_zero": inter_zero, "lower_bound_ok": bound_ok},
        witness=None if br.is_frame else br.witness_vector("lower"),
        labels=[PROOF, INDEPENDENT],
        details={
            "corrected_constant": corrected,
            "intersection_ranks": list(inter.ranks) if J else None,
            "counterexample": counterexample,
            "direction_i_ok": direction_i_ok,
        },
    )


# -------------------------------------------------------------- perturbation


@dataclass(frozen=True)
class PerturbationData:
    a1: AlgebraElement
    a2: AlgebraElement
    ai: SequenceVector
    single: Optional[AlgebraElement] = None

    def __post_init__(self):
        if self.a1.norm() >= 1 or self.a2.norm() >= 1:
            raise ValidationFailed("perturbation parameters need ||a1|| < 1 and ||a2|| < 1")

    @property
    def a_norm(self):
        return self.ai.l2_norm()

    @property
    def table(self):
        """m x d array of |a_i|."""
        return np.stack([np.abs(a.values) for a in self.ai])

    @classmethod
    def zero(cls, m, d):
        z = AlgebraElement(np.zeros(d))
        return cls(z, z, SequenceVector([z] * m), z)


def _check_compatible(Fw, Fv):
    if (Fw.n, Fw.d, Fw.m) != (Fv.n, Fv.d, Fv.m):
        raise ShapeMismatch(f"systems differ in shape: {(Fw.n, Fw.d, Fw.m)} vs {(Fv.n, Fv.d, Fv.m)}")
    same_w = all(np.allclose(a.values, b.values, rtol=0, atol=Fw.tol) for a, b in zip(Fw.weights, Fv.weights))
    same_ops = all(
        np.allclose(X.blocks, Y.blocks, rtol=0, atol=Fw.tol) for X, Y in ((Fw.C, Fv.C), (Fw.Cp, Fv.Cp), (Fw.K, Fv.K))
    )
    if not (same_w and same_ops):
        raise ShapeMismatch("perturbed systems must share weights, controls and K")


def _difference_blocks(Fw, Fv):
    """m x d x n x n array of v_i C'^*(pi_W - pi_V) C."""
    v = np.sqrt(Fw.weights_sq)[:, :, None, None]
    return v * (Fw.cross_blocks - Fv.cross_blocks)


def difference_norms(Fw, Fv):
    D = _difference_blocks(Fw, Fv)
    return np.array([[la.spectral_norm(B) for B in row] for row in D])


def energy_operator(F):
    """sum_i w_i^2 (C'^* pi_i C)^* (C'^* pi_i C), the squared norm of the family (w_i C'^* pi_i C f)_i."""
    X = F.cross_blocks
    XhX = np.conj(np.swapaxes(X, 2, 3)) @ X
    return ModuleOperator(np.einsum("it,itab->tab", F.weights_sq, XhX))


def energy_bounds(F):
    return bounds_for(energy_operator(F).blocks, F.K.blocks, F.tol)


def perturbation_condition(Fw, Fv, P, samples=1000, seed=0):
    """Check |v_i C'^*(pi_W - pi_V) C f| <= a1 |v_i C'^* pi_W C f| + a2 |v_i C'^* pi_V C f| + a_i |f|.

    (a) proof level: a1 = a2 = 0 and the operator norms b_i do not exceed a_i.
    (b) evidence: random f plus the top singular vectors of each difference.
    """
    _check_compatible(Fw, Fv)
    if len(P.ai) != Fw.m:
        raise ShapeMismatch(f"{len(P.ai)} perturbation coefficients for {Fw.m} submodules")
    tol = Fw.tol
    n, d, m = Fw.n, Fw.d, Fw.m
    bnorm = difference_norms(Fw, Fv)
    a = P.table
    a1, a2 = np.abs(P.a1.values), np.abs(P.a2.values)
    scale = max(1.0, float(np.max(bnorm)))
    zero12 = P.a1.norm() <= tol and P.a2.norm() <= tol
    proof_ok = bool(zero12 and np.all(bnorm <= a + tol * scale))

    D = _difference_blocks(Fw, Fv)
    v = np.sqrt(Fw.weights_sq)[:, :, None, None]
    XW, XV = v * Fw.cross_blocks, v * Fv.cross_blocks
    rng = np.random.default_rng(seed)
    fs = rng.standard_normal((samples, n, d)) + 1j * rng.standard_normal((samples, n, d))
    seeds = []
    for i in range(m):
        for t in range(d):
            _, _, Vh = np.linalg.svd(D[i, t])
            e = np.zeros((n, d), dtype=complex)
            e[:, t] = Vh[0].conj()
            seeds.append(e)
    fs = np.concatenate([fs, np.stack(seeds)]) if seeds else fs
    # per sample, submodule, component
    Df = np.linalg.norm(np.einsum("itab,sbt->sita", D, fs), axis=3)
    Wf = np.linalg.norm(np.einsum("itab,sbt->sita", XW, fs), axis=3)
    Vf = np.linalg.norm(np.einsum("itab,sbt->sita", XV, fs), axis=3)
    ff = np.linalg.norm(fs, axis=1)[:, None, :]
    rhs = a1 * Wf + a2 * Vf + a[None] * ff
    excess = (Df - rhs) / np.maximum(ff, 1e-300)
    worst = np.unravel_index(int(np.argmax(excess)), excess.shape)
    max_excess = float(max(excess[worst], 0.0))
    sample_ok = max_excess <= tol * scale

    verdict = proof_ok or sample_ok
    return Certificate(
        claim="perturbation condition holds for every index",
        conclusion_verified=verdict,
        hypothesis_results=[
            HypothesisResult("(a) operator-norm bound b_i <= a_i with a1 = a2 = 0", proof_ok, float(np.max(bnorm - a))),
            HypothesisResult("(b) sampled inequality", sample_ok, max_excess),
        ],
        predicted_bound=P.table,
        measured_bound=bnorm,
        residuals={"max_sampled_excess": max_excess, "samples": int(fs.shape[0])},
        witness=None if sample_ok else ModuleVector(fs[worst[0]]),
        labels=[PROOF if proof_ok else EVIDENCE],
        details={"level": "proof" if proof_ok else ("evidence" if sample_ok else "violated")},
    )


def perturbation_stability(Fw, Fv, P, samples=1000, seed=0):
    """Predicted bound envelope for a perturbed family, checked against measurement.

    The argument behind the envelope controls the energy
    sum_i ||v_i C'^* pi_i C f||^2, so the envelope is compared with the
    optimal bounds of that energy (it coincides with the frame operator
    when C = C' = I).  With scalar *-bounds a, b of Fw and r = ||{a_i}||_2:

        upper = ((1 + ||a1||) b + r)^2 / (1 - ||a2||)^2
        lower = ((1 - ||a1||) a - ||K^+|| r)^2 / (1 + ||a2||)^2   (K surjective)

    Both the plain hypothesis r < (1 - ||a1||) a and the corrected
    r < (1 - ||a1||) a / ||K^+|| are reported.
    """
    tol = Fw.tol
    bw = _frame_bounds(Fw)
    cond = perturbation_condition(Fw, Fv, P, samples=samples, seed=seed)
    ew = energy_bounds(Fw)
    ev = energy_bounds(Fv)
    a_e = ew.A_scalar if ew.A_scalar is not None else 0.0
    b_e = ew.B_scalar
    r = P.a_norm
    n1, n2 = P.a1.norm(), P.a2.norm()
    kd = _pinv_norm(Fw.K, tol)
    surjective, _ = lemma26_check(Fw.K, tol)
    hyp_plain = r < (1 - n1) * a_e
    hyp_corrected = r * kd < (1 - n1) * a_e
    upper = ((1 + n1) * b_e + r) ** 2 / (1 - n2) ** 2
    lower = max((1 - n1) * a_e - kd * r, 0.0) ** 2 / (1 + n2) ** 2
    meas_lo = ev.A_scalar ** 2 if ev.A_scalar is not None else None
    meas_hi = ev.B_scalar ** 2
    slack = 1e-8 * max(1.0, upper)
    upper_ok = meas_hi <= upper + slack
    lower_ok = None
    if hyp_corrected and surjective and meas_lo is not None:
        lower_ok = meas_lo >= lower - slack
    if Fv.cross_ok:
        member = verify_membership(Fv, FrameClass.CONTROLLED_K_FUSION)
        v_ok, v_witness, v_bounds = member.conclusion_verified, member.witness, member.details["bounds"]
    else:
        # the perturbed cross terms lost positivity, so Fv has no frame operator
        v_ok, v_witness, v_bounds = False, None, None
    conclusion = v_ok and upper_ok and lower_ok is not False
    return Certificate(
        claim="perturbed family is a controlled *-K-fusion frame within the predicted envelope",
        conclusion_verified=conclusion,
        hypothesis_results=[
            HypothesisResult("perturbation condition", cond.conclusion_verified, note=cond.details["level"]),
            HypothesisResult("||{a_i}|| < (1 - ||a1||) sqrt(A)", hyp_plain, (1 - n1) * a_e - r),
            HypothesisResult("||{a_i}|| < (1 - ||a1||) sqrt(A) / ||K^+||", hyp_corrected, (1 - n1) * a_e - kd * r),
            HypothesisResult("K surjective", surjective),
            HypothesisResult("perturbed cross terms positive", Fv.cross_ok),
        ],
        predicted_bound={"lower": lower, "upper": upper},
        measured_bound={"lower": meas_lo, "upper": meas_hi},
        residuals={"lower_ok": lower_ok, "upper_ok": upper_ok, "a_norm": r},
        witness=v_witness,
        labels=[PROOF, INDEPENDENT],
        details={
            "frame_bounds_w": {"A": bw.A_scalar, "B": bw.B_scalar},
            "frame_bounds_v": v_bounds,
            "perturbed_cross_positive": Fv.cross_ok,
            "energy_bounds_w": {"A": ew.A_scalar, "B": ew.B_scalar},
        },
    )


def _skew(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X = (G - G.conj().T) / 2
    return X / la.spectral_norm(X)


def build_perturbed_frame(Fw, magnitude, seed=0):
    """Rotate every W_i (per component) by exp(magnitude X) with X a unit skew-Hermitian.

    The rotation directions depend only on ``seed``, so shrinking
    ``magnitude`` moves along the same one-parameter families.  Returns
    (Fv, P) with a1 = a2 = 0 and a_i the operator norms of the differences.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    rng = np.random.default_rng(seed)
    subs = []
    for W in Fw.submodules:
        bases = []
        for Q in W.bases:
            X = _skew(rng, Fw.n)
            U = expm(magnitude * X) if magnitude else np.eye(Fw.n)
            bases.append(U @ Q)
        subs.append(Submodule(bases, Fw.n))
    Fv = replace(Fw, submodules=subs)
    b = difference_norms(Fw, Fv)
    z = AlgebraElement(np.zeros(Fw.d))
    ai = SequenceVector([AlgebraElement(row) for row in b])
    v = np.sqrt(Fw.weights_sq)
    single = AlgebraElement(np.max(b / v, axis=0))
    return Fv, PerturbationData(z, z, ai, single)
