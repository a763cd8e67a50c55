"""Classical beams split, phase shifted and recombined on a balanced splitter."""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .errors import DomainError
from .sampling import DETECTION, PHASE, SOURCE, SampleBatch, check_seed, map_blocks, stream


@dataclass(frozen=True)
class ClassicalSourceSpec:
    """Thermal or coherent pulses.

    ``modes`` > 1 gives Gamma-distributed thermal intensity with that shape.
    ``phase_sampler(rng, size)`` overrides the fixed/uniform phase law.
    """

    kind: str
    mean_photons: float
    phase_mode: str = "uniform"
    phase: float = 0.0
    visibility: float = 1.0
    modes: float = 1.0
    phase_sampler: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in ("thermal", "coherent"):
            raise DomainError(f"kind must be 'thermal' or 'coherent', got {self.kind!r}")
        if self.phase_mode not in ("fixed", "uniform"):
            raise DomainError(f"phase_mode must be 'fixed' or 'uniform', got {self.phase_mode!r}")
        if not self.mean_photons >= 0:
            raise DomainError("mean_photons must be >= 0")
        if not 0.0 <= self.visibility <= 1.0:
            raise DomainError("visibility must lie in [0, 1]")
        if self.modes <= 0:
            raise DomainError("modes must be > 0")

    def describe(self):
        return {"source": self.kind, "mean_photons": self.mean_photons,
                "phase_mode": self.phase_mode, "phase": self.phase,
                "visibility": self.visibility, "modes": self.modes,
                "phase_sampler": None if self.phase_sampler is None else repr(self.phase_sampler)}


def classical_interference_samples(src, eta, trials, seed, threads=1):
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    seed = check_seed(seed)

    def run(block, size):
        rng = stream(seed, block, SOURCE)
        if src.kind == "coherent":
            intensity = np.full(size, float(src.mean_photons))
        else:
            intensity = rng.gamma(src.modes, src.mean_photons / src.modes, size)
        prng = stream(seed, block, PHASE)
        if src.phase_sampler is not None:
            phi = np.asarray(src.phase_sampler(prng, size), dtype=float)
        elif src.phase_mode == "uniform":
            phi = prng.uniform(0.0, 2.0 * math.pi, size)
        else:
            phi = np.full(size, float(src.phase))
        fringe = src.visibility * np.cos(phi)
        drng = stream(seed, block, DETECTION)
        m1 = drng.poisson(eta * intensity * (1.0 + fringe) / 2.0)
        m2 = drng.poisson(eta * intensity * (1.0 - fringe) / 2.0)
        return np.column_stack([m1, m2])

    pairs = np.concatenate(map_blocks(run, trials, threads))
    scenario = dict(src.describe(), eta=eta)
    return SampleBatch(pairs, seed, scenario)


def arcsine_density_reference(delta):
    """1 / (pi sqrt(1 - delta^2)) on (-1, 1)."""
    if not -1.0 < delta < 1.0:
        raise DomainError(f"arcsine density needs |delta| < 1, got {delta}")
    return 1.0 / (math.pi * math.sqrt(1.0 - delta * delta))


def arcsine_cdf(delta, support=1.0):
    """CDF of support * cos(uniform phase)."""
    x = np.clip(np.asarray(delta, dtype=float) / support, -1.0, 1.0)
    return 0.5 + np.arcsin(x) / math.pi


def arcsine_ks_distance(samples, support=1.0):
    return float(stats.kstest(np.asarray(samples, dtype=float),
                              lambda x: arcsine_cdf(x, support)).statistic)


def count_g2(counts):
    """Normally ordered <m(m-1)> / <m>^2: the intensity g2 seen through Poisson counting."""
    m = np.asarray(counts, dtype=float)
    return float(np.mean(m * (m - 1.0)) / np.mean(m) ** 2)
