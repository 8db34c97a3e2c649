import numpy as np
import pytest

from bornexact import (
    GaussErfProfile,
    GaussianControlProfile,
    RationalEnvelopeProfile,
    TransverseBox,
)

ALPHA = 1.0


@pytest.fixture(scope="session")
def reference_medium():
    """Reference rational medium: zeta=0.01, m=1, a=2/alpha, box 3x4."""
    return RationalEnvelopeProfile(ALPHA, 2.0, 1, TransverseBox(0.01, 3.0, 4.0))


@pytest.fixture(scope="session")
def gausserf_medium():
    return GaussErfProfile(ALPHA, 2.0, TransverseBox(0.01, 3.0, 4.0))


@pytest.fixture(scope="session")
def control_medium():
    """Unmodulated Gaussian of equal peak |eta| (sqrt(pi) * 0.01)."""
    return GaussianControlProfile(2.0, TransverseBox(np.sqrt(np.pi) * 0.01, 3.0, 4.0))
