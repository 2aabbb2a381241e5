import numpy as np
import pytest

from semi_hilbert_lab.generators import generate, random_spec
from semi_hilbert_lab.semi_hilbert import make_context

NILPOTENT = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)


def instance(seed, structure=(), dims=(2, 3, 4, 5, 6), tuple_size=1):
    """A generated instance of the campaign distribution."""
    return generate(random_spec(seed, structure, dims, tuple_size))


@pytest.fixture
def identity_ctx():
    return make_context(np.eye(2))


@pytest.fixture
def singular_ctx():
    """``A = diag(2, 1, 0)``, a rank-two context with a kernel."""
    return make_context(np.diag([2.0, 1.0, 0.0]))
