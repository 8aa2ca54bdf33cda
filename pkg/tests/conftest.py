import numpy as np
import pytest

from qdbound.linalg import PAULI_X, PAULI_Y, PAULI_Z


@pytest.fixture
def paulis():
    return PAULI_X, PAULI_Y, PAULI_Z


@pytest.fixture
def eye2():
    return np.eye(2, dtype=complex)
