import json
import math

import numpy as np
import pytest

from semi_hilbert_lab.errors import ConfigError, DimensionMismatch, \
    InvalidMatrix
from semi_hilbert_lab.linalg import ginibre, seeded_rng
from semi_hilbert_lab.matrix_io import dumps, load_json, matrix_from_dict, \
    matrix_to_dict, operators_from_json, vector_from_dict, vector_to_dict


def test_matrix_text_is_bit_exact():
    M = ginibre(4, 4, seeded_rng(1, 'test')) * 1e-7
    text = dumps(matrix_to_dict(M))
    assert np.array_equal(matrix_from_dict(json.loads(text)), M)


def test_dumps_is_sorted_and_deterministic():
    assert dumps({'b': 1, 'a': [0.1, None, True]}) == \
        '{"a": [0.10000000000000001, null, true], "b": 1}'
    assert dumps(math.inf) == 'null'
    assert dumps(np.float64(0.5)) == '0.5'


def test_matrix_validation():
    with pytest.raises(InvalidMatrix):
        matrix_from_dict([[1.0]])
    with pytest.raises(InvalidMatrix):
        matrix_from_dict({'rows': 2, 'cols': 2, 're': [[1.0]]})
    with pytest.raises(DimensionMismatch):
        matrix_from_dict({'rows': 1, 'cols': 2, 're': [[1.0, 2.0]]})
    real = matrix_from_dict({'rows': 1, 'cols': 1, 're': [[2.0]]})
    assert real[0, 0] == 2.0


def test_operators_from_json_forms():
    single = matrix_to_dict(np.eye(2))
    assert len(operators_from_json(single)) == 1
    assert len(operators_from_json([single, single])) == 2
    assert len(operators_from_json({'operators': [single]})) == 1
    with pytest.raises(InvalidMatrix):
        operators_from_json([])


def test_vector_round_trip():
    x = np.array([1.0 + 2.0j, -0.5j])
    assert np.array_equal(vector_from_dict(vector_to_dict(x)), x)
    with pytest.raises(InvalidMatrix):
        vector_from_dict({'re': [1.0]})


def test_load_json_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_json(str(tmp_path / 'missing.json'))
    bad = tmp_path / 'bad.json'
    bad.write_text('{')
    with pytest.raises(ConfigError):
        load_json(str(bad))
