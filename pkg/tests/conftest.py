import numpy as np
import pytest


def random_unitaries(n: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of Haar-ish random 2x2 unitaries via QR of complex Gaussians."""
    z = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2).copy()
    diag /= np.abs(diag)
    return q * diag[:, None, :]


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
