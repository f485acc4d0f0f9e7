import os
import sys

import pytest

baseDir = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..')
if baseDir not in sys.path:
    sys.path.insert(0, baseDir)

from utilsPolynomials import Polynomial, Subspace, SubspaceFamily


@pytest.fixture
def axes2():
    return SubspaceFamily.axes(2)


@pytest.fixture
def rank_two_family():
    return SubspaceFamily([
        Subspace([[0, 0, 1, 0], [0, 0, 0, 1]]),
        Subspace([[1, 0, 0, 0], [0, 1, 0, 0]]),
        Subspace([[1, 0, 1, 0], [0, 1, 0, 1]]),
    ])


@pytest.fixture
def rank_two_polynomial():
    return Polynomial.from_string('x1*x4 - x2*x3', 4)


@pytest.fixture
def problem_dir():
    return os.path.join(baseDir, 'Examples', 'problems')
