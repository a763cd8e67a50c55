"""Reproducible Monte Carlo plumbing shared by the samplers.

Trials are cut into fixed blocks of ``BLOCK_SIZE``.  Every random stream is
a Philox generator keyed by (seed, block, purpose, index), so a block's draws
never depend on which worker ran it or how many workers there were.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

BLOCK_SIZE = 1 << 16

# purpose codes for stream keys
SOURCE = 0
DETECTION = 1
PHASE = 2


@dataclass
class SampleBatch:
    pairs: np.ndarray
    seed: int
    scenario: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        if np.any(self.pairs < 0):
            raise DomainError("counts must be non-negative")

    @property
    def trials(self):
        return int(self.pairs.shape[0])

    @property
    def m1(self):
        return self.pairs[:, 0]

    @property
    def m2(self):
        return self.pairs[:, 1]


def check_seed(seed):
    if int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed}")
    return int(seed)


def stream(seed, block, purpose, index=0):
    ss = np.random.SeedSequence(seed, spawn_key=(block, purpose, index))
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(trials):
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    n_blocks = math.ceil(trials / BLOCK_SIZE)
    return [min(BLOCK_SIZE, trials - b * BLOCK_SIZE) for b in range(n_blocks)]


def block_slices(trials):
    lo = 0
    for n in block_sizes(trials):
        yield lo, lo + n
        lo += n


def map_blocks(func, trials, threads=1):
    """Call ``func(block, size)`` for each block, results in block order."""
    sizes = block_sizes(trials)
    if threads is None or threads <= 1 or len(sizes) == 1:
        return [func(b, n) for b, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, range(len(sizes)), sizes))


def add_electronic_noise(counts, std, rng):
    """Gaussian read noise rounded to integers; negative readings clip to zero."""
    if std <= 0:
        return counts
    noisy = counts + np.rint(rng.normal(0.0, std, size=counts.shape)).astype(np.int64)
    return np.maximum(noisy, 0)


def vacuum_amplitudes(rng, size):
    """Wigner samples of vacuum: quadrature variance 1/2, <|alpha|^2> = 1/2."""
    z = rng.standard_normal((2, size))
    return (z[0] + 1j * z[1]) / 2.0


# ---------------------------------------------------------------------------
# batch statistics
# ---------------------------------------------------------------------------

def g2_cross(batch):
    """<m1 m2> / (<m1><m2>) between the two output ports."""
    m1 = batch.m1.astype(float)
    m2 = batch.m2.astype(float)
    return float(np.mean(m1 * m2) / (np.mean(m1) * np.mean(m2)))


def mean_and_error(values):
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))
