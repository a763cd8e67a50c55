"""Filtering macroscopic superpositions by photon-number difference."""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .detection import JointCountDistribution
from .errors import DomainError, ResourceLimitError
from .fock import iter_unitary_levels

MACRO_CAP = 200


@dataclass
class MacroAmplitudes:
    """gamma[i, j] amplitudes; Phi puts them on |2i+1, 2j>, PhiPerp on |2j, 2i+1>."""

    gamma: np.ndarray
    orientation: str = "Phi"

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=complex)
        if self.gamma.ndim != 2:
            raise DomainError("gamma must be a 2-D table")
        if self.orientation not in ("Phi", "PhiPerp"):
            raise DomainError(f"orientation must be 'Phi' or 'PhiPerp', got {self.orientation!r}")
        norm = float(np.sum(np.abs(self.gamma) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"sum |gamma|^2 = {norm}, expected 1")

    @classmethod
    def normalized(cls, gamma, orientation="Phi"):
        g = np.asarray(gamma, dtype=complex)
        return cls(g / math.sqrt(float(np.sum(np.abs(g) ** 2))), orientation)

    @classmethod
    def from_entries(cls, entries, orientation="Phi", normalize=True):
        """entries: iterable of (i, j, amplitude)."""
        entries = list(entries)
        if not entries:
            raise DomainError("no gamma entries")
        size = max(max(i, j) for i, j, _ in entries) + 1
        g = np.zeros((size, size), dtype=complex)
        for i, j, a in entries:
            g[i, j] += a
        return cls.normalized(g, orientation) if normalize else cls(g, orientation)

    def flipped(self):
        return MacroAmplitudes(self.gamma, "PhiPerp" if self.orientation == "Phi" else "Phi")

    def components(self):
        """{(k, l): amplitude} over input Fock states."""
        out = {}
        for i, j in zip(*np.nonzero(self.gamma)):
            key = (2 * i + 1, 2 * j) if self.orientation == "Phi" else (2 * j, 2 * i + 1)
            out[(int(key[0]), int(key[1]))] = complex(self.gamma[i, j])
        return out


def gamma_family(name, size, param=0.5):
    """Synthetic gamma tables used for checks: 'band', 'geometric' or 'diagonal'."""
    i = np.arange(size)[:, None]
    j = np.arange(size)[None, :]
    if name == "band":
        g = (np.abs(i - j) <= param).astype(float)
    elif name == "geometric":
        g = param ** (i + j) * np.ones((size, size))
    elif name == "diagonal":
        g = np.eye(size) * param ** i
    else:
        raise DomainError(f"unknown gamma family {name!r}")
    return g


def macro_joint_distribution(amps, bs, eta, cap=MACRO_CAP):
    comps = amps.components()
    s_max = max(k + l for k, l in comps)
    if s_max > cap:
        raise ResourceLimitError(f"superposition reaches {s_max} photons (cap {cap})")
    by_total = {}
    for (k, l), a in comps.items():
        by_total.setdefault(k + l, []).append((k, a))
    out = np.zeros((s_max + 1, s_max + 1))
    for s, level in iter_unitary_levels(s_max, bs):
        if s not in by_total:
            continue
        cols = np.array([k for k, _ in by_total[s]])
        amp = np.array([a for _, a in by_total[s]])
        # equal-total components interfere; different totals cannot
        psi = level[:, cols] @ amp
        m1 = np.arange(s + 1)
        out[m1, s - m1] += np.abs(psi) ** 2
    if eta < 1.0:
        thin = kernels.binomial_rows(np.arange(s_max + 1), eta, s_max).T  # [m, N]
        out = thin @ out @ thin.T
    meta = {"tau": bs.tau, "eta": eta, "orientation": amps.orientation}
    return JointCountDistribution(out, max(0.0, 1.0 - math.fsum(out.ravel())), meta)


def filter_condition(dist, delta_threshold):
    """Keep events with |m1 - m2| >= delta_threshold.

    Returns (conditioned distribution, pass probability).  A filter that
    passes nothing returns an all-zero table flagged ``meta['empty']``.
    """
    if delta_threshold < 0:
        raise DomainError("delta_threshold must be >= 0")
    table = dist.table
    m1 = np.arange(table.shape[0])[:, None]
    m2 = np.arange(table.shape[1])[None, :]
    kept = np.where(np.abs(m1 - m2) >= delta_threshold, table, 0.0)
    total = dist.total
    passed = math.fsum(kept.ravel())
    pass_probability = passed / total if total > 0 else 0.0
    meta = dict(dist.meta, delta_threshold=delta_threshold)
    if passed == 0.0:
        meta["empty"] = True
        return JointCountDistribution(kept, 0.0, meta), 0.0
    return JointCountDistribution(kept / passed, 0.0, meta), pass_probability


def _aligned(a, b):
    shape = (max(a.table.shape[0], b.table.shape[0]), max(a.table.shape[1], b.table.shape[1]))
    return a.padded(shape), b.padded(shape)


def effective_overlap(a, b):
    """Bhattacharyya coefficient: 1 for identical, 0 for disjoint distributions."""
    pa, pb = _aligned(a, b)
    return float(math.fsum(np.sqrt(pa * pb).ravel()))


def total_variation(a, b):
    pa, pb = _aligned(a, b)
    return 0.5 * float(math.fsum(np.abs(pa - pb).ravel()))
