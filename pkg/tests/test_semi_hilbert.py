import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semi_hilbert_lab.errors import DegenerateContext, DimensionMismatch, \
    NotInBA, NotPSD
from semi_hilbert_lab.linalg import ginibre, psd_sqrt, seeded_rng, \
    spectral_norm
from semi_hilbert_lab.semi_hilbert import a_abs, a_abs_sharp, a_adjoint, \
    a_func, a_inner, a_modulus, a_modulus_sharp, a_norm, a_seminorm_op, \
    block_bold_A, cartesian, douglas_member, make_context, predicates, \
    require_ba

from conftest import NILPOTENT, instance


def _rel(X, Y):
    return np.linalg.norm(X - Y) / max(1.0, np.linalg.norm(Y))


def test_context_of_identity(identity_ctx):
    assert identity_ctx.rank_A == 2
    assert np.allclose(identity_ctx.P_A, np.eye(2))
    assert np.allclose(identity_ctx.A_pinv, np.eye(2))


def test_context_rejects_indefinite():
    with pytest.raises(NotPSD):
        make_context(np.diag([1.0, -1.0]))


def test_zero_context_is_degenerate():
    ctx = make_context(np.zeros((2, 2)))
    assert ctx.rank_A == 0
    assert a_seminorm_op(ctx, np.eye(2)) == 0.0
    with pytest.raises(DegenerateContext):
        ctx.require_support()


def test_dimension_mismatch(identity_ctx):
    with pytest.raises(DimensionMismatch):
        a_seminorm_op(identity_ctx, np.eye(3))


def test_adjoint_with_identity_is_conjugate_transpose(identity_ctx):
    T = np.array([[1.0 + 2.0j, 3.0], [0.5j, -1.0]])
    assert np.allclose(a_adjoint(identity_ctx, T), T.conj().T)


def test_outside_ba(singular_ctx):
    # Maps the kernel direction into range(A): T* A has a kernel component.
    T = np.zeros((3, 3))
    T[0, 2] = 1.0
    assert not douglas_member(singular_ctx, T)
    with pytest.raises(NotInBA):
        a_adjoint(singular_ctx, T)
    with pytest.raises(NotInBA):
        require_ba(singular_ctx, T)


def test_inner_product_and_norm(singular_ctx):
    x = np.array([1.0, 1.0, 5.0])
    assert a_inner(singular_ctx, x, x) == pytest.approx(3.0)
    assert a_norm(singular_ctx, x) == pytest.approx(np.sqrt(3.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 40))
def test_fundamental_identities(seed):
    inst = instance(seed)
    ctx, T = inst.ctx, inst.operator
    S = a_adjoint(ctx, T)
    assert _rel(ctx.A @ S, T.conj().T @ ctx.A) <= 1e-10
    assert _rel(a_adjoint(ctx, S), ctx.P_A @ T @ ctx.P_A) <= 1e-9
    norm = a_seminorm_op(ctx, T)
    assert abs(a_seminorm_op(ctx, S) - norm) <= 1e-8 * max(1.0, norm)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 40))
def test_reduction_is_star_homomorphism(seed):
    inst = instance(seed)
    ctx, T = inst.ctx, inst.operator
    R = ctx.reduce(T)
    assert np.allclose(ctx.reduce(a_adjoint(ctx, T)), R.conj().T, atol=1e-8)
    assert a_seminorm_op(ctx, T) == pytest.approx(spectral_norm(R))
    x = ctx.embed(np.eye(ctx.rank_A)[:, 0])
    assert a_norm(ctx, x) == pytest.approx(1.0)


def test_identity_reduces_to_classical():
    rng = seeded_rng(5, 'test')
    ctx = make_context(np.eye(4))
    T = ginibre(4, 4, rng)
    assert a_seminorm_op(ctx, T) == pytest.approx(spectral_norm(T))
    assert np.allclose(a_abs(ctx, T), psd_sqrt(T.conj().T @ T), atol=1e-9)
    assert np.allclose(a_modulus(ctx, T), a_abs(ctx, T), atol=1e-9)
    assert np.allclose(a_abs_sharp(ctx, T), psd_sqrt(T @ T.conj().T),
                       atol=1e-9)
    assert np.allclose(a_modulus_sharp(ctx, T), a_abs_sharp(ctx, T),
                       atol=1e-9)


def test_modulus_squares_to_sharp_product():
    inst = instance(17)
    ctx, T = inst.ctx, inst.operator
    M = a_modulus(ctx, T)
    assert _rel(ctx.A @ M @ M, ctx.A @ a_adjoint(ctx, T) @ T) <= 1e-8
    assert predicates(ctx, M).a_positive


def test_a_func_rejects_non_positive(identity_ctx):
    with pytest.raises(NotPSD):
        a_func(identity_ctx, np.diag([1.0, -1.0]), np.sqrt)


def test_cartesian_parts():
    inst = instance(23)
    ctx, T = inst.ctx, inst.operator
    parts = cartesian(ctx, T)
    assert np.allclose(parts.reconstruct(), T, atol=1e-10)
    assert predicates(ctx, parts.real_part).a_selfadjoint
    assert predicates(ctx, parts.imag_part).a_selfadjoint


def test_predicates_of_nilpotent(identity_ctx):
    flags = predicates(identity_ctx, NILPOTENT)
    assert flags.douglas
    assert not flags.a_selfadjoint
    assert not flags.a_normal
    assert 'a_normal' in flags.reasons


def test_predicates_of_positive(identity_ctx):
    flags = predicates(identity_ctx, np.diag([1.0, 2.0]))
    assert flags.a_positive and flags.a_normal and flags.sharp_a_selfadjoint
    assert flags.to_dict()['commutes_with_A']


def test_block_bold_A(singular_ctx):
    bold = block_bold_A(singular_ctx)
    assert bold.dim == 6
    assert bold.rank_A == 4
