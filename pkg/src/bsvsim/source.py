"""Bright squeezed vacuum source: Fock weights, gain calibration, mode counting
and the Gaussian (Wigner) description used for bright beams."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, FitError, ResourceLimitError
from .fock import PhotonDistribution

DEFAULT_FOCK_CAP = 10 ** 6
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class TwinBeamSpec:
    """Twin-beam source description.

    ``gain`` fixes the total mean photon number per arm, sinh^2(gain); mode k
    carries the fraction ``mode_weights[k]`` of it.  The pre-splitter
    efficiencies model losses applied to one arm only.
    """

    gain: float
    mode_weights: tuple = (1.0,)
    eta_signal_pre: float = 1.0
    eta_idler_pre: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.gain) or self.gain < 0:
            raise DomainError(f"gain must be >= 0, got {self.gain}")
        w = np.asarray(self.mode_weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or w.sum() <= 0:
            raise DomainError("mode_weights must be non-negative and not all zero")
        object.__setattr__(self, "mode_weights", tuple(float(x) for x in w / w.sum()))
        for name in ("eta_signal_pre", "eta_idler_pre"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")

    @property
    def n_modes(self):
        return len(self.mode_weights)

    def mode_gains(self):
        """Per-mode gains with sinh^2(G_k) = lambda_k sinh^2(G)."""
        total = math.sinh(self.gain)
        return np.array([math.asinh(math.sqrt(lam) * total) for lam in self.mode_weights])

    def mean_photons(self):
        return mean_photons_per_mode(self.gain)


@dataclass(frozen=True)
class GainFit:
    N0: float
    kappa: float
    residual: float

    def gain(self, power):
        return self.kappa * math.sqrt(power)

    def to_dict(self):
        return {"N0": self.N0, "kappa": self.kappa, "residual": self.residual}


def _log_tanh(G):
    # log(tanh G) without tanh saturating to 1.0
    return math.log1p(-2.0 / (math.exp(2.0 * G) + 1.0)) if G < 350 else -2.0 * math.exp(-2.0 * G)


def fock_weights(G, tail_epsilon=1e-12, hard_cap=DEFAULT_FOCK_CAP):
    """|c_n|^2 = tanh^(2n) G / cosh^2 G, truncated once the geometric tail drops below tail_epsilon."""
    if not math.isfinite(G) or G < 0:
        raise DomainError(f"gain must be >= 0, got {G}")
    if not 0.0 < tail_epsilon < 1.0:
        raise DomainError("tail_epsilon must lie in (0, 1)")
    if G == 0.0:
        return PhotonDistribution(np.ones(1), meta={"G": 0.0, "tail": 0.0})
    log_ratio = 2.0 * _log_tanh(G)  # log tanh^2 G
    # smallest n_max with ratio^(n_max+1) < eps
    n_max = max(0, math.floor(math.log(tail_epsilon) / log_ratio))
    if math.exp((n_max + 1) * log_ratio) >= tail_epsilon:
        n_max += 1
    if n_max > hard_cap:
        raise ResourceLimitError(
            f"gain {G} needs {n_max} Fock terms (cap {hard_cap}); use the Gaussian sampler")
    n = np.arange(n_max + 1)
    log_head = -2.0 * math.log(math.cosh(G)) if G < 350 else -2.0 * (G - _LN2)
    weights = np.exp(n * log_ratio + log_head)
    tail = math.exp((n_max + 1) * log_ratio)
    return PhotonDistribution(weights, meta={"G": G, "tail": tail})


def mean_photons_per_mode(G):
    if G < 0:
        raise DomainError(f"gain must be >= 0, got {G}")
    return math.sinh(G) ** 2


def gain_for_mean_photons(n_mean):
    if n_mean < 0:
        raise DomainError("mean photon number must be >= 0")
    return math.asinh(math.sqrt(n_mean))


def g2_to_modes(g2):
    """Effective mode number from the normalised intensity correlation, m = 1/(g2 - 1)."""
    if not 1.0 < g2 <= 2.0:
        raise DomainError(f"g2 must lie in (1, 2], got {g2}")
    return 1.0 / (g2 - 1.0)


def modes_to_g2(m):
    if m < 1.0:
        raise DomainError(f"mode number must be >= 1, got {m}")
    return 1.0 + 1.0 / m


def wigner_covariance(G):
    """Covariance of (x_s, p_s, x_i, p_i) for two-mode squeezed vacuum, vacuum variance 1/2."""
    if G < 0:
        raise DomainError(f"gain must be >= 0, got {G}")
    c = math.cosh(2.0 * G) / 2.0
    s = math.sinh(2.0 * G) / 2.0
    return np.array([
        [c, 0.0, s, 0.0],
        [0.0, c, 0.0, -s],
        [s, 0.0, c, 0.0],
        [0.0, -s, 0.0, c],
    ])


def symplectic_eigenvalues(cov):
    n = cov.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.abs(np.linalg.eigvals(1j * omega @ cov))
    return np.sort(ev)[::2]


# ---------------------------------------------------------------------------
# gain calibration
# ---------------------------------------------------------------------------

def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    big = x > 1.0
    safe_small = np.where(big, 1.0, x)
    return np.where(big, x + np.log1p(-np.exp(-2.0 * np.where(big, x, 1.0))) - _LN2,
                    np.log(np.sinh(safe_small)))


def _coth(x):
    return 1.0 / np.tanh(x)


def fit_gain(points, max_iterations=200):
    """Fit N = N0 sinh^2(kappa sqrt(P)) to (power, photons) pairs in log space."""
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError("points must be (power, photons) pairs")
    if data.shape[0] < 3:
        raise DomainError(f"need at least 3 points, got {data.shape[0]}")
    power, photons = data[:, 0], data[:, 1]
    if np.any(power <= 0) or np.any(photons < 0):
        raise DomainError("powers must be > 0 and photon numbers >= 0")
    keep = photons > 0
    power, photons = power[keep], photons[keep]
    if power.size < 3:
        raise DomainError("need at least 3 points with non-zero photon number")
    if np.ptp(power) == 0 or np.ptp(photons) == 0:
        raise FitError("degenerate data: all powers or all photon numbers equal",
                       {"n_points": int(power.size)})
    root = np.sqrt(power)
    log_n = np.log(photons)

    def residuals(theta):
        return theta[0] + 2.0 * _log_sinh(np.exp(theta[1]) * root) - log_n

    def jacobian(theta):
        x = np.exp(theta[1]) * root
        return np.column_stack([np.ones_like(x), 2.0 * _coth(x) * x])

    # coarse grid over kappa, N0 solved in closed form for each candidate
    best = None
    for log_kappa in np.linspace(math.log(1e-4 / root.max()), math.log(60.0 / root.max()), 400):
        shape = 2.0 * _log_sinh(math.exp(log_kappa) * root)
        log_n0 = float(np.mean(log_n - shape))
        sse = float(np.sum((log_n0 + shape - log_n) ** 2))
        if best is None or sse < best[0]:
            best = (sse, log_n0, log_kappa)
    start = np.array(best[1:])
    result = least_squares(residuals, start, jac=jacobian, method="lm",
                           xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iterations)
    diagnostics = {"status": int(result.status), "nfev": int(result.nfev),
                   "message": str(result.message), "start": start.tolist()}
    if not result.success or not np.all(np.isfinite(result.x)):
        raise FitError("gain fit did not converge", diagnostics)
    rms = float(np.sqrt(np.mean(result.fun ** 2)))
    return GainFit(N0=float(math.exp(result.x[0])), kappa=float(math.exp(result.x[1])), residual=rms)
