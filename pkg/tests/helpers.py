import numpy as np


def is_unimodal(masses, trials=None, n_sigma=4.0):
    """Rises to a single maximum then falls; steps against the trend may not
    exceed ``n_sigma`` binomial standard errors when ``trials`` is given."""
    m = np.asarray(masses, dtype=float)
    tol = np.zeros_like(m) if trials is None else n_sigma * np.sqrt(np.maximum(m, 1.0 / trials) / trials)
    peak = int(np.argmax(m))
    left_ok = all(m[i + 1] >= m[i] - tol[i] - tol[i + 1] for i in range(peak))
    right_ok = all(m[i + 1] <= m[i] + tol[i] + tol[i + 1] for i in range(peak, m.size - 1))
    return left_ok and right_ok
