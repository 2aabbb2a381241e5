"""
JSON formats of the laboratory.

Matrices are stored as ``{"rows": n, "cols": m, "re": [[...]], "im": [[...]]}``.
Every float is written with 17 significant digits, which round-trips
binary64 values exactly.
"""

import json
import math

import numpy as np

from semi_hilbert_lab.errors import ConfigError, InvalidMatrix
from semi_hilbert_lab.linalg import as_matrix


def matrix_to_dict(M):
    M = np.asarray(M, dtype=np.complex128)
    return {'rows': int(M.shape[0]),
            'cols': int(M.shape[1]),
            're': M.real.tolist(),
            'im': M.imag.tolist()}


def matrix_from_dict(data, square=True):
    """
    :raises InvalidMatrix: If the object does not follow the matrix format.
    """
    if not isinstance(data, dict):
        raise InvalidMatrix("A matrix must be a JSON object.")
    try:
        rows, cols = int(data['rows']), int(data['cols'])
        re = np.array(data['re'], dtype=float)
        im = np.array(data.get('im', np.zeros((rows, cols))), dtype=float)
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidMatrix("Malformed matrix object: %s" % err) from err
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise InvalidMatrix("Matrix entries do not match the declared "
                            "%d x %d shape." % (rows, cols))
    return as_matrix(re + 1j * im, square=square)


def operators_from_json(data):
    """
    Accept a single matrix object, a list of them, or ``{"operators": [...]}``.
    """
    if isinstance(data, dict) and 'operators' in data:
        data = data['operators']
    if isinstance(data, dict):
        return [matrix_from_dict(data)]
    if isinstance(data, list) and data:
        return [matrix_from_dict(entry) for entry in data]
    raise InvalidMatrix("Expected a matrix object or a non-empty list of "
                        "matrix objects.")


def vector_to_dict(x):
    x = np.asarray(x, dtype=np.complex128)
    return {'re': x.real.tolist(), 'im': x.imag.tolist()}


def vector_from_dict(data):
    try:
        return np.array(data['re'], dtype=float) \
            + 1j * np.array(data['im'], dtype=float)
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidMatrix("Malformed vector object: %s" % err) from err


def _encode(obj):
    if obj is None:
        return 'null'
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return 'null'
        return '%.17g' % value
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({'re': obj.real, 'im': obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return '{' + ', '.join('%s: %s' % (json.dumps(k), _encode(v))
                               for k, v in items) + '}'
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return '[' + ', '.join(_encode(v) for v in obj) + ']'
    if hasattr(obj, 'to_dict'):
        return _encode(obj.to_dict())
    raise TypeError("Cannot encode %r as JSON." % type(obj))


def dumps(obj):
    """Deterministic JSON text: sorted keys, 17-digit floats, one line."""
    return _encode(obj)


def load_json(path):
    """
    :raises ConfigError: If the file is missing or is not valid JSON.
    """
    try:
        with open(path, 'r') as handle:
            return json.load(handle)
    except OSError as err:
        raise ConfigError("Cannot read '%s': %s" % (path, err)) from err
    except json.JSONDecodeError as err:
        raise ConfigError("'%s' is not valid JSON: %s" % (path, err)) \
            from err


def write_text(path, text):
    with open(path, 'w') as handle:
        handle.write(text)
        if not text.endswith('\n'):
            handle.write('\n')
