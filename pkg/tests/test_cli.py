import json

import numpy as np
import pytest

from semi_hilbert_lab.__main__ import run
from semi_hilbert_lab.generators import generate, random_spec
from semi_hilbert_lab.matrix_io import dumps, matrix_from_dict, \
    matrix_to_dict

from conftest import NILPOTENT


def _write(path, obj):
    path.write_text(dumps(obj))
    return str(path)


@pytest.fixture
def nilpotent_file(tmp_path):
    return _write(tmp_path / 'T.json', matrix_to_dict(NILPOTENT))


def _output(capsys):
    return json.loads(capsys.readouterr().out)


def test_compute_w_A(nilpotent_file, capsys):
    assert run(['--command', 'compute', '--quantity', 'w_A',
                '--matrix', nilpotent_file]) == 0
    result = _output(capsys)
    assert result['quantity'] == 'w_A'
    assert result['value'] == pytest.approx(0.5, abs=1e-8)


def test_compute_a_adjoint_echoes_conjugate_transpose(tmp_path, capsys):
    T = np.array([[1.0 + 1.0j, 2.0], [0.25, -3.0j]])
    path = _write(tmp_path / 'T.json', matrix_to_dict(T))
    context = _write(tmp_path / 'A.json', matrix_to_dict(np.eye(2)))
    assert run(['--command', 'compute', '--quantity', 'a_adjoint',
                '--matrix', path, '--context', context]) == 0
    adjoint = matrix_from_dict(_output(capsys)['matrix'])
    assert np.allclose(adjoint, T.conj().T, atol=1e-14)


def test_compute_zero_context_is_domain_error(nilpotent_file, tmp_path,
                                              capsys):
    context = _write(tmp_path / 'A.json', matrix_to_dict(np.zeros((2, 2))))
    assert run(['--command', 'compute', '--quantity', 'w_A',
                '--matrix', nilpotent_file, '--context', context]) == 3
    assert 'DegenerateContext' in capsys.readouterr().err


def test_compute_outside_ba(tmp_path, capsys):
    T = np.zeros((3, 3))
    T[0, 2] = 1.0
    path = _write(tmp_path / 'T.json', matrix_to_dict(T))
    context = _write(tmp_path / 'A.json',
                     matrix_to_dict(np.diag([2.0, 1.0, 0.0])))
    assert run(['--command', 'compute', '--quantity', 'a_adjoint',
                '--matrix', path, '--context', context]) == 3
    assert 'NotInBA' in capsys.readouterr().err


def test_compute_a_norm_outside_ba(tmp_path, capsys):
    path = _write(tmp_path / 'T.json', matrix_to_dict(NILPOTENT))
    context = _write(tmp_path / 'A.json',
                     matrix_to_dict(np.diag([1.0, 0.0])))
    assert run(['--command', 'compute', '--quantity', 'a_norm',
                '--matrix', path, '--context', context]) == 0
    assert _output(capsys)['value'] == pytest.approx(0.0, abs=1e-15)


def test_compute_with_tolerance_object(nilpotent_file, tmp_path, capsys):
    context = _write(tmp_path / 'A.json',
                     {'A': matrix_to_dict(np.eye(2)),
                      'tol': {'psd_tol': 1e-7}})
    assert run(['--command', 'compute', '--quantity', 'a_norm',
                '--matrix', nilpotent_file, '--context', context]) == 0
    assert _output(capsys)['value'] == pytest.approx(1.0)


@pytest.mark.parametrize('quantity', ['a_abs', 'a_abs_sharp', 'c_A', 'r_A',
                                      'cartesian', 'predicates'])
def test_compute_quantities(nilpotent_file, quantity, capsys):
    assert run(['--command', 'compute', '--quantity', quantity,
                '--matrix', nilpotent_file]) == 0
    assert _output(capsys)['quantity'] == quantity


def test_compute_sample_and_modulus(nilpotent_file, capsys):
    assert run(['--command', 'compute', '--quantity', 'sample_W_A',
                '--count', '25', '--seed', '3',
                '--matrix', nilpotent_file]) == 0
    samples = _output(capsys)
    assert len(samples['re']) == 25
    assert run(['--command', 'compute', '--quantity', 'a_modulus',
                '--alpha', '2', '--matrix', nilpotent_file]) == 0
    modulus = matrix_from_dict(_output(capsys)['matrix'])
    assert np.allclose(modulus, np.diag([0.0, 1.0]))


def test_compute_tuple_radius(tmp_path, capsys):
    path = _write(tmp_path / 'T.json', [matrix_to_dict(NILPOTENT),
                                        matrix_to_dict(NILPOTENT)])
    assert run(['--command', 'compute', '--quantity', 'w_pA', '--p', '1',
                '--matrix', path]) == 0
    assert _output(capsys)['value'] == pytest.approx(1.0, abs=1e-7)


def test_compute_needs_matrix(capsys):
    assert run(['--command', 'compute', '--quantity', 'w_A']) == 2
    assert '--matrix' in capsys.readouterr().err


def test_compute_malformed_matrix(tmp_path):
    path = tmp_path / 'T.json'
    path.write_text('{"rows": 2}')
    assert run(['--command', 'compute', '--quantity', 'w_A',
                '--matrix', str(path)]) == 2
    path.write_text('not json')
    assert run(['--command', 'compute', '--quantity', 'w_A',
                '--matrix', str(path)]) == 2


def test_missing_command(capsys):
    assert run([]) == 2


def test_unknown_checker(capsys):
    assert run(['--command', 'fuzz', '--seed', '1',
                '--checkers', 'no_such_checker']) == 2
    assert 'no_such_checker' in capsys.readouterr().err


def test_fuzz_needs_seed():
    assert run(['--command', 'fuzz', '--checkers', 'kato_half']) == 2


def test_bad_tolerance():
    assert run(['--command', 'fuzz', '--seed', '1', '--instances', '1',
                '--checkers', 'kato_half', '--tol-slack', '2']) == 2


def test_fuzz_is_deterministic(tmp_path, capsys):
    argv = ['--command', 'fuzz', '--seed', '5', '--instances', '3',
            '--checkers', 'fund_r_w_norm,kato_half', '--dims', '2,3']
    assert run(argv + ['--out', str(tmp_path / 'a.jsonl')]) == 0
    first = capsys.readouterr().out
    assert run(argv + ['--out', str(tmp_path / 'b.jsonl')]) == 0
    assert capsys.readouterr().out == first
    assert (tmp_path / 'a.jsonl').read_text() == \
        (tmp_path / 'b.jsonl').read_text()
    summary = json.loads(first)
    assert set(summary) == {'fund_r_w_norm', 'kato_half'}


def test_fuzz_then_report(tmp_path, capsys):
    records = tmp_path / 'records.jsonl'
    assert run(['--command', 'fuzz', '--seed', '2', '--instances', '2',
                '--checkers', 'fund_half_norm', '--out', str(records)]) == 0
    capsys.readouterr()
    assert run(['--command', 'report', '--input', str(records),
                '--format', 'csv']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith('checker_id,severity,instances')
    assert lines[1].startswith('fund_half_norm,assert,2,2,')


def test_report_of_empty_file(tmp_path, capsys):
    path = tmp_path / 'empty.jsonl'
    path.write_text('')
    assert run(['--command', 'report', '--input', str(path)]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith('checker')


def test_report_counts_rows(tmp_path, capsys):
    lines = []
    for checker_id in ('a', 'b', 'c'):
        lines.append(dumps({'checker_id': checker_id, 'instance_seed': 1,
                            'params': {}, 'lhs': 1.0, 'rhs': 2.0,
                            'slack': 1.0, 'relative_slack': 0.5,
                            'verdict': 'holds', 'severity': 'assert'}))
    path = tmp_path / 'three.jsonl'
    path.write_text('\n'.join(lines) + '\n')
    assert run(['--command', 'report', '--input', str(path),
                '--format', 'json']) == 0
    assert sorted(_output(capsys)) == ['a', 'b', 'c']


def test_report_malformed(tmp_path):
    path = tmp_path / 'bad.jsonl'
    path.write_text('{"verdict": "holds"}\n')
    assert run(['--command', 'report', '--input', str(path)]) == 2
    assert run(['--command', 'report',
                '--input', str(tmp_path / 'missing.jsonl')]) == 2


def test_check_replays_instance(tmp_path, capsys):
    instance = generate(random_spec(4, ['commutes_with_A']))
    path = _write(tmp_path / 'instance.json', instance)
    assert run(['--command', 'check', '--checkers', 'kato_alpha',
                '--input', path]) == 0
    records = [json.loads(line)
               for line in capsys.readouterr().out.splitlines()]
    assert len(records) == 8
    assert {r['instance_seed'] for r in records} == {4}


def test_check_regenerates_from_seed(tmp_path, capsys):
    dump = tmp_path / 'dump.json'
    assert run(['--command', 'check', '--checkers', 'fund_half_norm',
                '--seed', '7', '--dump-instance', str(dump)]) == 0
    assert json.loads(dump.read_text())['seed'] == 7
    record = json.loads(capsys.readouterr().out)
    assert record['verdict'] == 'holds'


def test_config_file(tmp_path, nilpotent_file, capsys):
    config = _write(tmp_path / 'config.json',
                    {'command': 'compute', 'quantity': 'a_norm',
                     'matrix': nilpotent_file})
    assert run(['--config', config]) == 0
    assert _output(capsys)['quantity'] == 'a_norm'
    # Flags win over the file.
    assert run(['--config', config, '--quantity', 'w_A']) == 0
    assert _output(capsys)['quantity'] == 'w_A'


def test_config_unknown_key(tmp_path):
    config = _write(tmp_path / 'config.json', {'bogus': 1})
    assert run(['--config', config]) == 2
