import numpy as np
import pytest

from lgap.sarx import SARXSystem, generate_excited_trajectory
from lgap.subspace import SubspaceBasis

# depth-7 gap between the two case-study modes, from the Gram-Schmidt oracle
INTERMODE_GAP_L7 = 0.5675591793539074


def random_orthogonal(rng, N):
    Q, R = np.linalg.qr(rng.standard_normal((N, N)))
    return Q * np.sign(np.diag(R))


def random_basis(rng, N, k):
    Q, _ = np.linalg.qr(rng.standard_normal((N, k)))
    return SubspaceBasis(Q)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def clean_system():
    return SARXSystem.case_study(noise_sigma=0.0)


@pytest.fixture(scope="session")
def noisy_system():
    return SARXSystem.case_study()


@pytest.fixture(scope="session")
def mode_data(clean_system):
    """Noise-free 60-step excited trajectories of both modes."""
    rng = np.random.default_rng(7)
    return [generate_excited_trajectory(clean_system, k, 60, rng=rng) for k in (0, 1)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
