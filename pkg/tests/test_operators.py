import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ckfusion.errors import NeitherCase, NotInvertible
from ckfusion.hilbert_module import ModuleVector, Submodule, inner, module_norm, project
from ckfusion.operators import (
    ModuleOperator,
    adjoint,
    douglas_check,
    inverse,
    is_in_GLplus,
    kernel_projection,
    lemma26_check,
    lemma27_bounds,
    moore_penrose,
    op_norm,
    penrose_residuals,
    projection_transport,
    prop25_check,
    range_projection,
)

seeds = st.integers(0, 2 ** 32 - 1)


def rand_op(rng, n, d, rank=None):
    blocks = []
    for _ in range(d):
        r = n if rank is None else rank
        G1 = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
        G2 = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
        blocks.append(G1 @ G2)
    return ModuleOperator(blocks)


def test_basic_examples():
    T = ModuleOperator([[[1j]]])
    np.testing.assert_allclose(adjoint(T).blocks, [[[-1j]]])
    assert op_norm(ModuleOperator([np.diag([2, 1]), np.diag([5, 0])])) == pytest.approx(5)


def test_glplus():
    assert is_in_GLplus(ModuleOperator.diag([1, 2], d=2))
    assert not is_in_GLplus(ModuleOperator.diag([1, 0]))
    assert not is_in_GLplus(ModuleOperator([[[1, 1], [0, 1]]]))
    with pytest.raises(NotInvertible):
        inverse(ModuleOperator.diag([1, 0]))


def test_prop25_examples(rng):
    h = ModuleVector.random(3, 2, rng)
    assert prop25_check(ModuleOperator.identity(3, 2), h)
    assert prop25_check(ModuleOperator.zeros(3, 2), h)
    for _ in range(100):
        T = rand_op(rng, 3, 2)
        assert prop25_check(T, ModuleVector.random(3, 2, rng))


def test_moore_penrose_examples(rng):
    np.testing.assert_allclose(moore_penrose(ModuleOperator.diag([2, 0])).blocks[0], np.diag([0.5, 0]))
    T = rand_op(rng, 4, 1)
    np.testing.assert_allclose(moore_penrose(T).blocks, np.linalg.inv(T.blocks), atol=1e-10)
    assert max(penrose_residuals(T, moore_penrose(T))) < 1e-10
    T2 = rand_op(rng, 4, 1, rank=2)
    assert max(penrose_residuals(T2, moore_penrose(T2))) < 1e-9


def test_range_kernel_examples(rng):
    T = ModuleOperator.diag([1, 0])
    np.testing.assert_allclose(range_projection(T).projection_blocks()[0], np.diag([1, 0]))
    np.testing.assert_allclose(kernel_projection(T).projection_blocks()[0], np.diag([0, 1]))
    Ti = rand_op(rng, 3, 2)
    assert range_projection(Ti).ranks == (3, 3) and kernel_projection(Ti).ranks == (0, 0)
    Tr = rand_op(rng, 5, 2, rank=3)
    total = range_projection(Tr).projection_blocks() + kernel_projection(adjoint(Tr)).projection_blocks()
    np.testing.assert_allclose(total, np.broadcast_to(np.eye(5), (2, 5, 5)), atol=1e-9)


def test_lemma26_examples(rng):
    assert lemma26_check(ModuleOperator.identity(3)) == (True, pytest.approx(1))
    ok, m = lemma26_check(ModuleOperator.diag([1, 0]))
    assert not ok and m == pytest.approx(0)
    T = rand_op(rng, 4, 1)
    ok, m = lemma26_check(T)
    x = rng.standard_normal((1000, 4)) + 1j * rng.standard_normal((1000, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    vals = np.linalg.norm(x @ T.blocks[0].conj(), axis=1)  # ||T^* x||
    assert ok and vals.min() >= m - 1e-8


def test_lemma27_examples(rng):
    lo, hi, which = lemma27_bounds(ModuleOperator.identity(3) * 2)
    assert (lo, hi) == (pytest.approx(4), pytest.approx(4))
    lo, hi, _ = lemma27_bounds(ModuleOperator.diag([1, 2]))
    assert (lo, hi) == (pytest.approx(1), pytest.approx(4))
    T = rand_op(rng, 4, 1)
    lo, _, _ = lemma27_bounds(T)
    G = T.blocks[0] @ T.blocks[0].conj().T
    assert lo == pytest.approx(np.linalg.eigvalsh(G)[0], rel=1e-9)
    with pytest.raises(NeitherCase):
        lemma27_bounds(ModuleOperator.diag([1, 0]))


def test_douglas_examples(rng):
    T = rand_op(rng, 4, 2, rank=2)
    r = douglas_check(T, T)
    assert r.inclusion and r.lam == pytest.approx(1) and r.mu == pytest.approx(1)
    r = douglas_check(T * 2, T)
    assert r.inclusion and r.lam == pytest.approx(4) and r.mu == pytest.approx(2)
    outside = np.array(T.blocks)
    R = np.linalg.svd(outside[0])[0][:, 2:]
    outside[0][:, 0] += R[:, 0]
    assert douglas_check(ModuleOperator(outside), T) == (False, None, None)


def test_projection_transport_examples(rng):
    M = Submodule.coordinate([0, 2], 3)
    r = projection_transport(ModuleOperator.identity(3), M)
    assert r.hypothesis_ok and r.residual < 1e-12
    Q = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    W = Submodule([np.linalg.qr(rng.standard_normal((3, 2)))[0]], 3)
    r = projection_transport(ModuleOperator(Q), W)
    assert r.hypothesis_ok and r.residual < 1e-10
    r = projection_transport(ModuleOperator.diag([2, 1]), Submodule.coordinate([0], 2))
    assert r.hypothesis_ok and r.residual < 1e-12
    np.testing.assert_allclose(r.image.projection_blocks()[0], np.diag([1, 0]), atol=1e-12)
    bad = projection_transport(ModuleOperator([[[1, 1], [0, 1]]]), Submodule.coordinate([0], 2))
    assert not bad.hypothesis_ok and bad.formula_projection is None and bad.image is not None


@given(seeds)
def test_adjoint_identities(seed):
    rng = np.random.default_rng(seed)
    T, U = rand_op(rng, 4, 2), rand_op(rng, 4, 2)
    x, y = ModuleVector.random(4, 2, rng), ModuleVector.random(4, 2, rng)
    lhs, rhs = inner(T @ x, y), inner(x, adjoint(T) @ y)
    assert lhs.allclose(rhs, atol=1e-10 * max(1, lhs.norm()))
    np.testing.assert_allclose(adjoint(T @ U).blocks, (adjoint(U) @ adjoint(T)).blocks, atol=1e-12 * op_norm(T) * op_norm(U))


@given(seeds, st.integers(0, 4))
def test_pinv_commutes_with_adjoint(seed, rank):
    rng = np.random.default_rng(seed)
    T = rand_op(rng, 4, 2, rank=rank)
    np.testing.assert_allclose(moore_penrose(adjoint(T)).blocks, adjoint(moore_penrose(T)).blocks, atol=1e-9)


@given(seeds, st.floats(0.1, 10))
def test_douglas_scaling(seed, c):
    rng = np.random.default_rng(seed)
    T = rand_op(rng, 4, 2, rank=3)
    Tp = T @ rand_op(rng, 4, 2)
    r1, r2 = douglas_check(Tp, T), douglas_check(Tp * c, T)
    assert r1.inclusion and r2.inclusion
    assert r2.lam == pytest.approx(c ** 2 * r1.lam, rel=1e-7)


@given(seeds)
def test_range_invariance(seed):
    rng = np.random.default_rng(seed)
    T = rand_op(rng, 5, 2, rank=3)
    R = rand_op(rng, 5, 2)
    np.testing.assert_allclose(
        range_projection(T).projection_blocks(), range_projection(T @ R).projection_blocks(), atol=1e-8
    )


@given(seeds)
def test_pinv_lower_bound_on_range(seed):
    rng = np.random.default_rng(seed)
    K = rand_op(rng, 5, 2, rank=3)
    f = project(range_projection(K), ModuleVector.random(5, 2, rng))
    kd = op_norm(moore_penrose(K))
    assert module_norm(f) <= kd * module_norm(adjoint(K) @ f) * (1 + 1e-9)
