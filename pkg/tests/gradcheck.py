"""Central finite-difference gradient oracle for the numerical kernels.

Kept deliberately independent of the analytic backward passes it checks:
it only ever evaluates forward functions at perturbed inputs.
"""

import numpy as np

STEP = 1e-5
TOLERANCE = 1e-4


def numerical_gradient(f, x: np.ndarray, h: float = STEP) -> np.ndarray:
    """Central differences of scalar-valued f at x, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = x.ravel()
    gflat = grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = f(x)
        flat[i] = orig - h
        down = f(x)
        flat[i] = orig
        gflat[i] = (up - down) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Norm-based relative error between gradient arrays."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


def assert_gradients_close(analytic, numeric, tolerance: float = TOLERANCE, label: str = ""):
    err = relative_error(analytic, numeric)
    assert err < tolerance, f"gradient mismatch{' for ' + label if label else ''}: rel err {err:.3e}"
