import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rydqc.stark import StarkBasis, stark_map  # noqa: E402
from rydqc.states import SODIUM, RydbergState  # noqa: E402


def na(n, L, J, mJ=None):
    return RydbergState(SODIUM, n, L, J, mJ)


@pytest.fixture(scope="session")
def na_stark_basis():
    """Na mJ = 1/2, n = 32..40, all L."""
    basis = StarkBasis.build("Na", 32, 40, 0.5)
    basis.dipole  # noqa: B018  build the coupling matrix once
    return basis


@pytest.fixture(scope="session")
def na_stark_map(na_stark_basis):
    return stark_map(na_stark_basis, np.linspace(0.0, 10.0, 201))
