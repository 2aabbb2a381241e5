import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semi_hilbert_lab.errors import DegenerateContext
from semi_hilbert_lab.generators import Structure
from semi_hilbert_lab.linalg import ginibre, seeded_rng
from semi_hilbert_lab.radii import TupleMode, TupleRadiusQuery, c_A, r_A, \
    random_sphere, sample_W_A, sphere_ascent, tuple_radii, tuple_value_at, \
    w_A, w_pA
from semi_hilbert_lab.semi_hilbert import a_seminorm_op, cartesian, \
    make_context

from conftest import NILPOTENT, instance


def test_w_A_of_nilpotent(identity_ctx):
    estimate = w_A(identity_ctx, NILPOTENT)
    assert estimate.value == pytest.approx(0.5, abs=1e-8)
    x = estimate.lower_witness
    assert abs(np.vdot(x, NILPOTENT @ x)) == pytest.approx(0.5, abs=1e-8)


def test_w_A_of_diagonal(identity_ctx):
    assert w_A(identity_ctx, np.diag([1.0, -3.0])).value == \
        pytest.approx(3.0, abs=1e-9)


def test_w_A_degenerate():
    with pytest.raises(DegenerateContext):
        w_A(make_context(np.zeros((2, 2))), np.eye(2))


def test_w_A_outside_ba_is_unbounded(singular_ctx):
    T = np.zeros((3, 3))
    T[0, 2] = 1.0
    assert math.isinf(w_A(singular_ctx, T).value)


def test_c_A(identity_ctx):
    assert c_A(identity_ctx, np.diag([1.0, 2.0])).value == \
        pytest.approx(1.0, abs=1e-8)
    assert c_A(identity_ctx, NILPOTENT).value == pytest.approx(0.0, abs=1e-8)


def test_r_A(identity_ctx):
    estimate = r_A(identity_ctx, NILPOTENT)
    assert estimate.value == 0.0
    assert estimate.limit == pytest.approx(0.0, abs=1e-12)
    diagonal = r_A(identity_ctx, np.diag([0.5, 2.0]))
    assert diagonal.value == pytest.approx(2.0)
    assert diagonal.to_dict()['n_max'] == 24


def test_r_A_rejects_bad_truncation(identity_ctx):
    with pytest.raises(ValueError):
        r_A(identity_ctx, NILPOTENT, n_max=0)


def test_sample_W_A_hermitian_segment(identity_ctx):
    values = sample_W_A(identity_ctx, np.diag([0.0, 1.0]), 500, seed=1)
    assert values.shape == (500,)
    assert np.all(np.abs(values.imag) <= 1e-12)
    assert np.all(values.real >= -1e-12)
    assert np.all(values.real <= 1.0 + 1e-12)


def test_sample_W_A_seeded(identity_ctx):
    first = sample_W_A(identity_ctx, NILPOTENT, 50, seed=4)
    again = sample_W_A(identity_ctx, NILPOTENT, 50, seed=4)
    assert np.array_equal(first, again)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 40))
def test_radius_chain(seed):
    inst = instance(seed)
    ctx, T = inst.ctx, inst.operator
    norm = a_seminorm_op(ctx, T)
    w = w_A(ctx, T).value
    slack = 1e-8 * max(1.0, norm)
    assert r_A(ctx, T).limit <= w + slack
    assert w <= norm + slack
    assert 0.5 * norm <= w + slack


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 40))
def test_w_A_agrees_with_sampling(seed):
    inst = instance(seed)
    ctx, T = inst.ctx, inst.operator
    w = w_A(ctx, T).value
    count = 100000
    values = np.abs(sample_W_A(ctx, T, count, seed=seed))
    assert values.max() <= w + 1e-9

    # The same A-unit vectors, polished from the best one.
    Z = random_sphere(seeded_rng(seed, 'numerical-range'), ctx.rank_A, count)
    R = ctx.reduce(T)

    def _value_and_grad(z):
        phi = np.vdot(z, R @ z)
        return abs(phi) ** 2, 2.0 * (np.conj(phi) * (R @ z)
                                     + phi * (R.conj().T @ z))
    _, best = sphere_ascent(_value_and_grad, Z[:, int(np.argmax(values))])
    assert math.sqrt(best) == pytest.approx(w, abs=1e-6)


@pytest.mark.parametrize('seed', [3, 8])
def test_nilpotent_equality(seed):
    inst = instance(seed, {Structure.NILPOTENT_AT2})
    ctx, T = inst.ctx, inst.operator
    norm = a_seminorm_op(ctx, T)
    assert w_A(ctx, T).value == pytest.approx(0.5 * norm, abs=1e-6 * norm)


@pytest.mark.parametrize('seed', [4, 9])
def test_normal_equality(seed):
    inst = instance(seed, {Structure.A_NORMAL, Structure.COMMUTES_WITH_A})
    ctx, T = inst.ctx, inst.operator
    norm = a_seminorm_op(ctx, T)
    assert w_A(ctx, T).value == pytest.approx(norm, abs=1e-6 * norm)


def test_tuple_query_validation():
    with pytest.raises(ValueError):
        TupleRadiusQuery((), 2.0)
    with pytest.raises(ValueError):
        TupleRadiusQuery((NILPOTENT,), 0.5)
    with pytest.raises(ValueError):
        TupleRadiusQuery((NILPOTENT,), math.inf, TupleMode.CRAWFORD)


@pytest.mark.parametrize('n', [2, 3])
def test_rhombic_radius_of_repeated_operator(n):
    inst = instance(31, dims=(3,))
    ctx, C = inst.ctx, inst.operator
    single = w_A(ctx, C).value
    joint = w_pA(ctx, TupleRadiusQuery((C,) * n, 1.0), seed=2).value
    assert joint == pytest.approx(n * single, abs=1e-7 * max(1.0, single))


def test_euclidean_radius_of_cartesian_parts():
    inst = instance(12, dims=(3,))
    ctx, T = inst.ctx, inst.operator
    single = w_A(ctx, T)
    parts = cartesian(ctx, T)
    joint = w_pA(ctx, TupleRadiusQuery(
        (parts.real_part, parts.imag_part), 2.0), seed=5,
        seed_vectors=(single.lower_witness,)).value
    assert joint == pytest.approx(single.value, abs=1e-6)


def test_single_operator_tuple_is_w_A(identity_ctx):
    estimate = w_pA(identity_ctx, TupleRadiusQuery((NILPOTENT,), 3.0))
    assert estimate.value == pytest.approx(0.5, abs=1e-8)
    assert estimate.params['n'] == 1


def test_tuple_value_at_witness():
    rng = seeded_rng(6, 'test')
    ctx = make_context(np.eye(3))
    operators = (ginibre(3, 3, rng), ginibre(3, 3, rng))
    estimate = w_pA(ctx, TupleRadiusQuery(operators, 2.0), seed=1)
    at_witness = tuple_value_at(ctx, operators, 2.0, estimate.lower_witness)
    assert at_witness == pytest.approx(estimate.value, rel=1e-6)
    for x in random_sphere(rng, 3, 50).T:
        assert tuple_value_at(ctx, operators, 2.0, x) <= \
            estimate.value + 1e-6


def test_tuple_radii_match_single_searches():
    rng = seeded_rng(8, 'test')
    ctx = make_context(np.diag([3.0, 1.0, 0.5, 0.0]))
    operators = tuple(ginibre(4, 4, rng) @ ctx.A for _ in range(2))
    estimates = tuple_radii(ctx, operators, (1.0, 2.0, 3.0), seed=4)
    assert sorted(estimates) == [1.0, 2.0, 3.0]
    for p, estimate in estimates.items():
        single = w_pA(ctx, TupleRadiusQuery(operators, p), seed=4)
        assert estimate.value >= single.value - 1e-9
        assert tuple_value_at(ctx, operators, p, estimate.lower_witness) \
            == pytest.approx(estimate.value, rel=1e-9)
    # Power means decrease in p.
    assert estimates[1.0].value >= estimates[2.0].value - 1e-9
    assert estimates[2.0].value >= estimates[3.0].value - 1e-9


def test_tuple_radii_of_one_operator(identity_ctx):
    estimates = tuple_radii(identity_ctx, (NILPOTENT,), (1.0, 4.0))
    assert [e.value for e in estimates.values()] == \
        pytest.approx([0.5, 0.5], abs=1e-8)


def test_tuple_radii_rejects_infinite_exponent(identity_ctx):
    with pytest.raises(ValueError):
        tuple_radii(identity_ctx, (NILPOTENT, NILPOTENT), (2.0, math.inf))
