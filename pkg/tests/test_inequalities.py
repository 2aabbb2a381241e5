import json
import math

import numpy as np
import pytest

from semi_hilbert_lab.errors import ConfigError
from semi_hilbert_lab.generators import OperatorInstance, Structure, \
    realized_tags
from semi_hilbert_lab.inequalities import CheckRecord, InequalityChecker, \
    Link, Severity, Verdict, get_checker, registry, run_check, select
from semi_hilbert_lab.inequalities.checker import check_rng, psd_link
from semi_hilbert_lab.inequalities.tuples import TUPLE_EXPONENTS, joint_radii
from semi_hilbert_lab.linalg import seeded_rng
from semi_hilbert_lab.matrix_io import dumps, vector_from_dict
from semi_hilbert_lab.semi_hilbert import make_context

from conftest import NILPOTENT, instance

EXPLORE = {'thm2_spectral_factor', 'superquad_refine'}


def _instance_for(checker, seed, size=None):
    return instance(seed, checker.structure,
                    tuple_size=size or checker.tuple_sizes[0])


def _grid(checker, inst):
    return checker.parameter_grid(
        seeded_rng(inst.seed, 'grid', checker.stream or checker.id))


def test_registry_ids_and_anchors():
    checkers = registry()
    ids = [checker.id for checker in checkers]
    assert len(ids) == 36
    assert len(set(ids)) == len(ids)
    for checker in checkers:
        assert checker.anchor
        assert checker.tuple_sizes
        assert Structure.GENERAL_IN_BA in checker.structure
    assert {c.id for c in checkers if c.severity is Severity.EXPLORE} \
        == EXPLORE


def test_get_checker_unknown():
    with pytest.raises(ConfigError):
        get_checker('no_such_checker')


def test_select_dedupes_in_registry_order():
    order = [checker.id for checker in registry()]
    chosen = select(['kato_half', 'fund_r_w_norm', 'kato_half'])
    assert [checker.id for checker in chosen] == \
        sorted(['kato_half', 'fund_r_w_norm'], key=order.index)
    assert len(select()) == 36
    with pytest.raises(ConfigError):
        select(['kato_half', 'bogus'])


def test_link_relative_slack():
    link = Link('x <= y', 1.0, 2.0)
    assert link.slack == pytest.approx(1.0)
    assert link.relative_slack == pytest.approx(0.5)
    violated = Link('x <= y', 3.0, 2.0)
    assert violated.relative_slack == pytest.approx(-0.5)
    assert Link('x <= y', 1e-12, 1e-13).relative_slack == pytest.approx(-9.0)
    assert Link('x <= y', 0.0, 0.0).relative_slack == 0.0


def test_link_noise_level():
    assert Link('x <= y', 1e-12, 1e-13).at_noise_level(1e-6)
    assert not Link('x <= y', 1e-12, 1e-3).at_noise_level(1e-6)


def test_psd_link():
    zero = psd_link('diag', np.diag([2.0, 0.0]))
    assert zero.slack == pytest.approx(0.0)
    assert zero.relative_slack == pytest.approx(0.0)
    negative = psd_link('diag', np.diag([2.0, -1.0]))
    assert negative.relative_slack == pytest.approx(-0.5)


class _FixedLink(InequalityChecker):
    id = 'fixed_link'
    anchor = 'test'

    def __init__(self, lhs, rhs):
        self.lhs, self.rhs = lhs, rhs

    def evaluate(self, instance, params, prepared, rng):
        return [Link('fixed', self.lhs, self.rhs)]


def _identity_instance():
    ctx = make_context(np.eye(2))
    return OperatorInstance(ctx, (np.eye(2),),
                            frozenset({Structure.GENERAL_IN_BA}), 0)


def test_noise_level_link_is_not_a_violation():
    record = run_check(_FixedLink(1e-12, 1e-13), _identity_instance(), {})
    assert record.relative_slack == pytest.approx(-9.0)
    assert record.verdict is Verdict.HOLDS
    assert record.extras['noise_level'] is True
    assert record.extras['noise_margin'] == pytest.approx(1e-6)


def test_small_rhs_above_noise_is_a_violation():
    record = run_check(_FixedLink(1e-3, 1e-4), _identity_instance(), {})
    assert record.relative_slack == pytest.approx(-9.0)
    assert record.verdict is Verdict.VIOLATED
    assert 'noise_level' not in record.extras


def test_kato_half_equality_for_nilpotent():
    ctx = make_context(np.eye(2))
    inst = OperatorInstance(ctx, (NILPOTENT,),
                            realized_tags(ctx, [NILPOTENT]), 0)
    record = run_check(get_checker('kato_half'), inst, {'alpha': 0.5})
    assert record.verdict is Verdict.HOLDS
    assert record.is_equality


def test_kato_alpha_half_is_kato_half():
    inst = instance(5, {Structure.COMMUTES_WITH_A})
    alpha = run_check(get_checker('kato_alpha'), inst, {'alpha': 0.5})
    half = run_check(get_checker('kato_half'), inst, {'alpha': 0.5})
    assert alpha.relative_slack == half.relative_slack
    assert alpha.witness == half.witness


def test_kato_alpha_grid():
    checker = get_checker('kato_alpha')
    grid = checker.parameter_grid(seeded_rng(0, 'grid'))
    alphas = [point['alpha'] for point in grid]
    assert alphas[:5] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert all(0.0 <= a <= 1.0 for a in alphas)


def test_missing_hypothesis_is_skipped():
    ctx = make_context(np.eye(2))
    inst = OperatorInstance(ctx, (NILPOTENT,),
                            frozenset({Structure.GENERAL_IN_BA}), 0)
    record = run_check(get_checker('schwarz_A_positive'), inst, {})
    assert record.verdict is Verdict.HYPOTHESIS_SKIPPED
    assert 'a_positive' in record.note
    assert math.isnan(record.relative_slack)


def test_tuple_size_is_a_hypothesis():
    inst = instance(2, tuple_size=1)
    record = run_check(get_checker('power_mean_49'), inst, {'p': 2.0})
    assert record.verdict is Verdict.HYPOTHESIS_SKIPPED


def test_zero_context_is_degenerate():
    ctx = make_context(np.zeros((2, 2)))
    inst = OperatorInstance(ctx, (np.eye(2),),
                            frozenset({Structure.GENERAL_IN_BA}), 0)
    record = run_check(get_checker('fund_r_w_norm'), inst, {})
    assert record.verdict is Verdict.DEGENERATE


def test_half_norm_equality_cases():
    checker = get_checker('fund_half_norm')
    nilpotent = instance(3, {Structure.NILPOTENT_AT2})
    record = run_check(checker, nilpotent, {})
    assert record.verdict is Verdict.HOLDS
    assert record.is_equality
    assert any('A T^2 = 0' in link.name for link in record.links)


def test_record_round_trip():
    inst = instance(9, {Structure.COMMUTES_WITH_A})
    record = run_check(get_checker('kato_half'), inst, {'alpha': 0.5})
    again = CheckRecord.from_dict(json.loads(dumps(record)))
    assert dumps(again) == dumps(record)


@pytest.mark.parametrize('seed', range(25))
def test_block_positivity_agreement(seed):
    checker = get_checker('lemma1_block_equiv')
    inst = _instance_for(checker, seed)
    outcomes = []
    for params in _grid(checker, inst):
        record = run_check(checker, inst, params)
        assert record.verdict is Verdict.HOLDS, record.extras
        assert record.extras['block_psd'] == record.extras['scalar_holds']
        outcomes.append(record.extras['block_psd'])
    # Factors below the critical scale keep the block positive.
    assert outcomes == [True, True, False, False]


def _hermitian_power(M, exponent):
    values, vectors = np.linalg.eigh((M + M.conj().T) / 2.0)
    return (vectors * np.maximum(values, 0.0) ** exponent) @ vectors.conj().T


@pytest.mark.parametrize('seed', range(4))
def test_kato_alpha_is_classical_kato_for_identity_weight(seed):
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    ctx = make_context(np.eye(3))
    inst = OperatorInstance(ctx, (T,), realized_tags(ctx, [T]), seed)
    checker = get_checker('kato_alpha')
    gram, gram_sharp = T.conj().T @ T, T @ T.conj().T
    for params in _grid(checker, inst):
        alpha = params['alpha']
        if not 0.0 < alpha < 1.0:
            continue
        record = run_check(checker, inst, params)
        assert record.verdict is Verdict.HOLDS
        assert record.relative_slack >= -1e-8
        x = vector_from_dict(record.witness['x'])
        y = vector_from_dict(record.witness['y'])
        classical = math.sqrt(
            np.real(np.vdot(x, _hermitian_power(gram, alpha) @ x))
            * np.real(np.vdot(y, _hermitian_power(gram_sharp, 1.0 - alpha)
                              @ y)))
        assert record.lhs == pytest.approx(abs(np.vdot(y, T @ x)),
                                           rel=1e-9, abs=1e-12)
        assert record.rhs == pytest.approx(classical, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize('seed', range(5))
def test_single_operator_square_bounds_match_quarter_bound(seed):
    inst = instance(seed)
    tuple_bounds = run_check(get_checker('thm10_tuple'), inst, {'p': 1.0})
    quarter = run_check(get_checker('eq43_quarter'), inst, {})
    assert len(tuple_bounds.links) == len(quarter.links) == 2
    for ours, theirs in zip(tuple_bounds.links, quarter.links):
        assert ours.lhs == pytest.approx(theirs.lhs, rel=1e-9, abs=1e-12)
        assert ours.rhs == pytest.approx(theirs.rhs, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize('size', [1, 2, 3])
@pytest.mark.parametrize('p', [1.0, 2.0])
def test_tuple_square_bounds(size, p):
    checker = get_checker('thm10_tuple')
    for seed in range(3):
        inst = _instance_for(checker, seed, size)
        record = run_check(checker, inst, {'p': p})
        assert record.verdict is Verdict.HOLDS
        for link in record.links:
            assert link.relative_slack >= -1e-8, link


@pytest.mark.parametrize('checker', [c for c in registry()
                                     if c.severity is Severity.ASSERT],
                         ids=lambda c: c.id)
def test_assert_checkers_hold(checker):
    for seed in (0, 1):
        size = checker.tuple_sizes[seed % len(checker.tuple_sizes)]
        inst = _instance_for(checker, seed, size)
        for params in _grid(checker, inst):
            record = run_check(checker, inst, params,
                               check_rng(checker, inst, params))
            assert record.verdict is not Verdict.VIOLATED, \
                (params, record.links)


def test_joint_radii_share_one_search():
    inst = instance(6, tuple_size=2)
    ctx, operators = inst.ctx, inst.operators
    first, witnesses = joint_radii(ctx, operators, (2.0, 3.0), inst.seed)
    again, _ = joint_radii(ctx, operators, (2.0,), inst.seed)
    assert again[2.0] is first[2.0]
    assert len(witnesses) == len(TUPLE_EXPONENTS)
    extra, _ = joint_radii(ctx, operators, (2.5,), inst.seed)
    # Searched from the cached witnesses, among them the one for p = 3.
    assert extra[2.5].value >= first[3.0].value - 1e-9
