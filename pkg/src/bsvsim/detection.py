"""Lossy photon counting behind the splitter.

Two routes to the joint count distribution:

* ``povm_joint_probability`` evaluates one (m1, m2) entry term by term from
  the pair amplitudes and binomial detection kernels.
* ``joint_distribution`` builds the whole table.  Equal detection loss on
  both outputs commutes with a lossless splitter, so the loss is applied to
  the input photon pairs first; the splitter then only has to mix the
  detected photons, which keeps the cost tied to detected counts instead of
  to the (possibly huge) emitted photon numbers.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import kernels
from .errors import DomainError, ResourceLimitError
from .fock import BeamSplitterSpec, PhotonDistribution, bs_output_probabilities, iter_unitary_levels

DEFAULT_MAX_TOTAL = 1500
_CHUNK = 2048


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass
class JointCountDistribution:
    """Probability of detecting (m1, m2); ``table[m1, m2]``, zero outside the stored block."""

    table: np.ndarray
    truncation_tail: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=float)
        if self.table.ndim != 2:
            raise DomainError("table must be two-dimensional")
        # clip rounding-level negatives from cancelling sums
        self.table[(self.table < 0) & (self.table > -1e-14)] = 0.0
        if np.any(self.table < 0):
            raise DomainError("negative probability in joint table")

    def __getitem__(self, key):
        m1, m2 = key
        if 0 <= m1 < self.table.shape[0] and 0 <= m2 < self.table.shape[1]:
            return float(self.table[m1, m2])
        return 0.0

    def entries(self):
        """Sparse view: (m1, m2, probability) for every non-zero cell."""
        for m1, m2 in zip(*np.nonzero(self.table)):
            yield int(m1), int(m2), float(self.table[m1, m2])

    @property
    def total(self):
        return float(math.fsum(self.table.ravel()))

    def marginal(self, port):
        if port not in (1, 2):
            raise DomainError("port must be 1 or 2")
        return self.table.sum(axis=2 - port)

    def conditional_slice(self, sigma):
        """P(N | sigma) = P(N, sigma - N) renormalised over N = 0..sigma."""
        vals = np.array([self[n, sigma - n] for n in range(sigma + 1)])
        s = vals.sum()
        if s <= 0:
            raise DomainError(f"no probability mass at total {sigma}")
        return PhotonDistribution(vals / s, meta={"sigma": sigma, "slice_mass": float(s)})

    def normalized(self):
        return JointCountDistribution(self.table / self.total, 0.0, dict(self.meta))

    def mirrored(self):
        return JointCountDistribution(self.table.T.copy(), self.truncation_tail, dict(self.meta))

    def padded(self, shape):
        out = np.zeros(shape)
        r, c = min(shape[0], self.table.shape[0]), min(shape[1], self.table.shape[1])
        out[:r, :c] = self.table[:r, :c]
        return out

    def moments(self):
        p = self.table / self.total
        m1 = np.arange(p.shape[0])[:, None]
        m2 = np.arange(p.shape[1])[None, :]
        mean1 = float(np.sum(p * m1))
        mean2 = float(np.sum(p * m2))
        diff = m1 - m2
        mean_d = float(np.sum(p * diff))
        var_d = float(np.sum(p * (diff - mean_d) ** 2))
        return {"mean_m1": mean1, "mean_m2": mean2, "var_diff": var_d,
                "mean_total": mean1 + mean2}


@dataclass
class DeltaHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    min_total: int
    excluded_mass: float
    meta: dict = field(default_factory=dict)

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def included_mass(self):
        return float(self.masses.sum())

    def density(self):
        return self.masses / np.diff(self.bin_edges)


# ---------------------------------------------------------------------------
# literal per-entry evaluation
# ---------------------------------------------------------------------------

def _check_eta(eta):
    if not math.isfinite(eta) or not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")


def povm_joint_probability(weights, bs, eta, m1, m2, epsilon=1e-15):
    """P(m1, m2) for twin beams with pair weights |c_n|^2, summed over n and N."""
    _check_eta(eta)
    if m1 < 0 or m2 < 0:
        raise DomainError("counts must be >= 0")
    if eta == 0.0:
        return weights.total_weight if (m1, m2) == (0, 0) else 0.0
    tau = bs.tau
    m = m1 + m2
    n_start = max((m + 1) // 2, weights.support_offset)
    w = weights.dense()
    remaining = float(math.fsum(w[n_start:]))
    terms = []
    acc = 0.0
    for n in range(n_start, len(w)):
        wn = w[n]
        remaining -= wn
        if wn == 0.0:
            continue
        losses = 2 * n - m
        if eta == 1.0 and losses > 0:
            continue
        p = bs_output_probabilities(n, tau)
        N = np.arange(m1, 2 * n - m2 + 1)
        if N.size == 0:
            continue
        log_k = (gammaln(N + 1.0) - gammaln(m1 + 1.0) - gammaln(N - m1 + 1.0)
                 + gammaln(2 * n - N + 1.0) - gammaln(m2 + 1.0) - gammaln(2 * n - N - m2 + 1.0)
                 + m * math.log(eta) + (losses * math.log1p(-eta) if losses else 0.0))
        term = wn * math.fsum(p[N] * np.exp(log_k))
        terms.append(term)
        acc += term
        # kernel is a probability (<= 1), so the unseen mass bounds the rest
        if acc > 0 and remaining < 0.1 * epsilon * acc:
            break
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# whole-table engine
# ---------------------------------------------------------------------------

def apply_binomial_loss(dist, eta):
    """Each photon survives independently with probability eta."""
    _check_eta(eta)
    support = dist.support
    kmax = int(support[-1])
    out = np.zeros(kmax + 1)
    for start in range(0, len(support), _CHUNK):
        rows = kernels.binomial_rows(support[start:start + _CHUNK], eta, kmax)
        out += dist.weights[start:start + _CHUNK] @ rows
    return PhotonDistribution(np.maximum(out, 0.0), meta=dict(dist.meta, eta=eta))


def _thinned_marginal(weights, eta, kmax):
    support = weights.support
    out = np.zeros(kmax + 1)
    for start in range(0, len(support), _CHUNK):
        rows = kernels.binomial_rows(support[start:start + _CHUNK], eta, kmax)
        out += weights.weights[start:start + _CHUNK] @ rows
    return out


def _arm_cutoff(weights, eta, budget):
    """Smallest K whose thinned-arm tail mass is below ``budget``."""
    n_top = int(weights.support[-1])
    mean = weights.mean() * eta
    var = eta * eta * weights.variance() + eta * (1.0 - eta) * weights.mean()
    k = min(n_top, int(math.ceil(mean + 12.0 * math.sqrt(var) + 16)))
    total = weights.total_weight
    while True:
        marg = _thinned_marginal(weights, eta, k)
        if total - math.fsum(marg) < budget or k >= n_top:
            return k
        k = min(n_top, 2 * k)


def lossy_pair_table(weights, eta1, eta2, k1max, k2max):
    """Q[k1, k2] = sum_n w_n Bin(n, eta1)[k1] Bin(n, eta2)[k2] for twin inputs |n, n>."""
    support = weights.support
    q = np.zeros((k1max + 1, k2max + 1))
    for start in range(0, len(support), _CHUNK):
        ns = support[start:start + _CHUNK]
        w = weights.weights[start:start + _CHUNK]
        b1 = kernels.binomial_rows(ns, eta1, k1max)
        b2 = kernels.binomial_rows(ns, eta2, k2max)
        q += b1.T @ (w[:, None] * b2)
    return q


def mix_input_table(q, bs, max_total=None):
    """Push an input photon-number table through the splitter.

    Coherences of a lossy twin-beam state only link cells whose totals
    differ, and a counting measurement cannot see those, so the mixing acts
    on probabilities.
    """
    k1max, k2max = q.shape[0] - 1, q.shape[1] - 1
    top = k1max + k2max if max_total is None else min(max_total, k1max + k2max)
    out = np.zeros((top + 1, top + 1))
    for s, level in iter_unitary_levels(top, bs):
        lo, hi = max(0, s - k2max), min(s, k1max)
        if lo > hi:
            continue
        k1 = np.arange(lo, hi + 1)
        qs = q[k1, s - k1]
        if not np.any(qs):
            continue
        probs = np.abs(level[:, lo:hi + 1]) ** 2 @ qs
        m1 = np.arange(s + 1)
        out[m1, s - m1] = probs
    return out


def joint_distribution(weights, bs, eta, epsilon=1e-10, max_total=None,
                       eta_signal=1.0, eta_idler=1.0, cap=DEFAULT_MAX_TOTAL):
    """Joint detected-count table for twin beams with pair weights ``weights``.

    ``max_total`` restricts the table to m1 + m2 <= max_total (exact on that
    block); otherwise the table is grown until the neglected mass is below
    ``epsilon``.  ``eta_signal`` / ``eta_idler`` are pre-splitter arm
    transmissions.
    """
    _check_eta(eta)
    if not isinstance(bs, BeamSplitterSpec):
        raise DomainError("bs must be a BeamSplitterSpec")
    e1, e2 = eta * eta_signal, eta * eta_idler
    n_top = int(weights.support[-1])
    if max_total is None:
        budget = max(0.0, epsilon - (1.0 - weights.total_weight)) / 4.0
        if budget <= 0:
            raise DomainError("input weights already lose more mass than epsilon")
        k1 = _arm_cutoff(weights, e1, budget)
        k2 = _arm_cutoff(weights, e2, budget)
    else:
        k1 = k2 = min(max_total, n_top)
    if k1 + k2 > cap and (max_total is None or min(max_total, k1 + k2) > cap):
        raise ResourceLimitError(
            f"exact table needs totals up to {k1 + k2} (cap {cap}); use the Gaussian sampler")
    q = lossy_pair_table(weights, e1, e2, k1, k2)
    table = mix_input_table(q, bs, max_total)
    tail = max(0.0, 1.0 - math.fsum(table.ravel()))
    meta = {"tau": bs.tau, "phi_tau": bs.phi_tau, "phi_rho": bs.phi_rho, "eta": eta,
            "eta_signal_pre": eta_signal, "eta_idler_pre": eta_idler}
    meta.update({k: v for k, v in weights.meta.items() if k in ("G",)})
    return JointCountDistribution(table, tail, meta)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def _events(source):
    """(m1, m2, weight) arrays and the mass that is not represented by events."""
    if isinstance(source, JointCountDistribution):
        m1, m2 = np.nonzero(source.table)
        return m1, m2, source.table[m1, m2], source.truncation_tail
    pairs = np.asarray(source.pairs)
    if pairs.shape[0] == 0:
        raise DomainError("empty sample batch")
    return pairs[:, 0], pairs[:, 1], np.full(pairs.shape[0], 1.0 / pairs.shape[0]), 0.0


def delta_histogram(source, bins=64, min_total=1):
    """Histogram of (m1 - m2) / (m1 + m2); events below ``min_total`` go to excluded_mass."""
    if bins < 2:
        raise DomainError("bins must be >= 2")
    if min_total < 1:
        raise DomainError("min_total must be >= 1 (Delta undefined for empty events)")
    m1, m2, w, lost = _events(source)
    if w.size == 0:
        raise DomainError("source carries no events")
    tot = m1 + m2
    keep = tot >= min_total
    delta = (m1[keep] - m2[keep]) / tot[keep]
    edges = np.linspace(-1.0, 1.0, bins + 1)
    masses, _ = np.histogram(delta, bins=edges, weights=w[keep])
    excluded = float(math.fsum(w[~keep])) + lost
    return DeltaHistogram(edges, masses, min_total, excluded,
                          meta={"truncation_tail": lost})


def delta_values(batch, min_total=1):
    pairs = np.asarray(batch.pairs)
    tot = pairs.sum(axis=1)
    keep = tot >= min_total
    return (pairs[keep, 0] - pairs[keep, 1]) / tot[keep]


def noise_reduction_factor(source):
    """Var(m1 - m2) / <m1 + m2>."""
    m1, m2, w, _ = _events(source)
    w = w / w.sum()
    mean_tot = float(np.sum(w * (m1 + m2)))
    if mean_tot <= 0:
        raise DomainError("mean total count is zero")
    d = (m1 - m2).astype(float)
    mean_d = float(np.sum(w * d))
    return float(np.sum(w * (d - mean_d) ** 2)) / mean_tot
