"""Independent mode pairs, unequal beams and the bright-regime sampler."""
import math

import numpy as np

from . import kernels
from .detection import JointCountDistribution, joint_distribution
from .errors import DomainError, ResourceLimitError
from .fock import PhotonDistribution, arcsine_distribution, iter_unitary_levels
from .sampling import (DETECTION, SOURCE, SampleBatch, add_electronic_noise, block_slices,
                       check_seed, map_blocks, stream, vacuum_amplitudes)
from .source import fock_weights

FOCK_SAMPLER_CAP = 400
# auto mode uses exact photon counting while the mean detected total stays below this
FOCK_AUTO_MEAN = 40.0


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def convolve(a, b):
    """Distribution of the sum of two independent counts.  Total weights multiply."""
    w = np.convolve(a.weights, b.weights)
    return PhotonDistribution(np.maximum(w, 0.0), a.support_offset + b.support_offset)


def convolve_joint(a, b, max_total=None):
    table = kernels.convolve2d(a.table, b.table)
    if max_total is not None:
        table = _crop_total(table, max_total)
    tail = max(0.0, 1.0 - math.fsum(table.ravel()))
    return JointCountDistribution(table, tail, dict(a.meta))


def _crop_total(table, max_total):
    size = min(table.shape[0], max_total + 1), min(table.shape[1], max_total + 1)
    out = table[:size[0], :size[1]].copy()
    m1 = np.arange(size[0])[:, None]
    m2 = np.arange(size[1])[None, :]
    out[m1 + m2 > max_total] = 0.0
    return out


def effective_mode_count(weights):
    """(sum w)^2 / sum w^2."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w < 0):
        raise DomainError("weights must be non-negative")
    s2 = float(np.sum(w * w))
    if s2 == 0:
        raise DomainError("weights are all zero")
    return float(np.sum(w)) ** 2 / s2


def mode_profile(m_eff):
    """Weights with effective mode count ``m_eff``: floor(m) equal modes plus one weaker mode."""
    if m_eff < 1:
        raise DomainError(f"effective mode count must be >= 1, got {m_eff}")
    k = int(math.floor(m_eff))
    if m_eff == k:
        return tuple([1.0 / k] * k)
    # (k + w)^2 / (k + w^2) = m  ->  (m-1) w^2 - 2k w + k(m-k) = 0, smaller root
    w = (k - math.sqrt(k * k - (m_eff - 1.0) * k * (m_eff - k))) / (m_eff - 1.0)
    raw = np.array([1.0] * k + [w])
    return tuple(raw / raw.sum())


def conditional_multimode_distribution(sigma, modes, G):
    """Unnormalised P^(m)(N | sigma) by direct discrete convolution.

    Each mode pair of gain G contributes P(n | s) = |c_{s/2}|^2 times the
    balanced-splitter arcsine weights; m modes convolve over both the
    split of sigma between modes and the split of N.
    """
    if modes < 1 or int(modes) != modes:
        raise DomainError(f"modes must be a positive integer, got {modes}")
    single = [arcsine_distribution(s, include_prefactor=True, G=G).weights for s in range(sigma + 1)]
    current = single
    for _ in range(int(modes) - 1):
        nxt = []
        for total in range(sigma + 1):
            acc = np.zeros(total + 1)
            for s in range(total + 1):
                acc += np.convolve(current[s], single[total - s])
            nxt.append(acc)
        current = nxt
    return PhotonDistribution(current[sigma], meta={"sigma": sigma, "modes": int(modes), "G": G})


def multimode_joint_distribution(spec, bs, eta, epsilon=1e-10, max_total=None):
    """Exact joint table for independent mode pairs: 2-D convolution of per-mode tables."""
    gains = spec.mode_gains()
    m = len(gains)
    tables = {}
    result = None
    for g in gains:
        key = round(float(g), 15)
        if key not in tables:
            w = fock_weights(g, epsilon / (10.0 * m))
            tables[key] = joint_distribution(w, bs, eta, epsilon / m, max_total,
                                             spec.eta_signal_pre, spec.eta_idler_pre)
        jd = tables[key]
        result = jd if result is None else convolve_joint(result, jd, max_total)
    result.meta.update({"G": spec.gain, "mode_weights": list(spec.mode_weights)})
    return result


# ---------------------------------------------------------------------------
# sampler
# ---------------------------------------------------------------------------

def _scenario(spec, bs, eta, electronic_noise_std, count_model):
    return {
        "source": "twin_beam",
        "G": spec.gain,
        "mode_weights": list(spec.mode_weights),
        "eta_signal_pre": spec.eta_signal_pre,
        "eta_idler_pre": spec.eta_idler_pre,
        "tau": bs.tau, "phi_tau": bs.phi_tau, "phi_rho": bs.phi_rho,
        "eta": eta,
        "electronic_noise_std": electronic_noise_std,
        "count_model": count_model,
    }


def choose_count_model(spec, eta):
    detected = eta * (spec.eta_signal_pre + spec.eta_idler_pre) * math.sinh(spec.gain) ** 2
    return "fock" if detected <= FOCK_AUTO_MEAN else "wigner"


def gaussian_sample_bsv(spec, bs, eta, trials, seed, electronic_noise_std=0.0,
                        count_model="auto", threads=1):
    """Per-pulse detected counts behind the splitter.

    ``count_model="wigner"`` draws each mode pair from its Wigner
    distribution, attenuates with vacuum admixture, mixes the amplitudes and
    detects Poisson counts with mean eta * max(|beta|^2 - 1/2, 0).  That is
    the bright-beam route; at low gain the clip at zero biases the mean up
    and independent Poisson noise hides the pair correlation.

    ``count_model="fock"`` samples photon pairs from the thermal pair
    distribution, thins them binomially and routes the survivors with the
    exact photon-number splitter probabilities.  Exact, but limited to
    modest detected totals.  ``"auto"`` picks between them by brightness.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if electronic_noise_std < 0:
        raise DomainError("electronic_noise_std must be >= 0")
    seed = check_seed(seed)
    if count_model == "auto":
        count_model = choose_count_model(spec, eta)
    if count_model == "wigner":
        pairs = _sample_wigner(spec, bs, eta, trials, seed, electronic_noise_std, threads)
    elif count_model == "fock":
        pairs = _sample_fock(spec, bs, eta, trials, seed, electronic_noise_std, threads)
    else:
        raise DomainError(f"unknown count model {count_model!r}")
    return SampleBatch(pairs, seed, _scenario(spec, bs, eta, electronic_noise_std, count_model))


def _sample_wigner(spec, bs, eta, trials, seed, noise_std, threads):
    t = bs.transfer_matrix()
    gains = spec.mode_gains()
    es, ei = spec.eta_signal_pre, spec.eta_idler_pre

    def run(block, size):
        i1 = np.zeros(size)
        i2 = np.zeros(size)
        for k, g in enumerate(gains):
            rng = stream(seed, block, SOURCE, k)
            v_s = vacuum_amplitudes(rng, size)
            v_i = vacuum_amplitudes(rng, size)
            ch, sh = math.cosh(g), math.sinh(g)
            a_s = ch * v_s + sh * np.conj(v_i)
            a_i = ch * v_i + sh * np.conj(v_s)
            if es < 1.0:
                a_s = math.sqrt(es) * a_s + math.sqrt(1.0 - es) * vacuum_amplitudes(rng, size)
            if ei < 1.0:
                a_i = math.sqrt(ei) * a_i + math.sqrt(1.0 - ei) * vacuum_amplitudes(rng, size)
            b1 = t[0, 0] * a_s + t[0, 1] * a_i
            b2 = t[1, 0] * a_s + t[1, 1] * a_i
            i1 += np.abs(b1) ** 2 - 0.5
            i2 += np.abs(b2) ** 2 - 0.5
        rng = stream(seed, block, DETECTION)
        m1 = rng.poisson(eta * np.maximum(i1, 0.0))
        m2 = rng.poisson(eta * np.maximum(i2, 0.0))
        m1 = add_electronic_noise(m1, noise_std, rng)
        m2 = add_electronic_noise(m2, noise_std, rng)
        return np.column_stack([m1, m2])

    return np.concatenate(map_blocks(run, trials, threads))


def _sample_fock(spec, bs, eta, trials, seed, noise_std, threads):
    gains = spec.mode_gains()
    e1, e2 = eta * spec.eta_signal_pre, eta * spec.eta_idler_pre

    def draw(block, size):
        ks, ki, us = [], [], []
        for k, g in enumerate(gains):
            rng = stream(seed, block, SOURCE, k)
            ratio = math.tanh(g) ** 2
            n = rng.geometric(1.0 - ratio, size) - 1 if ratio > 0 else np.zeros(size, np.int64)
            ks.append(rng.binomial(n, e1))
            ki.append(rng.binomial(n, e2))
            us.append(rng.random(size))
        return np.array(ks), np.array(ki), np.array(us)

    parts = map_blocks(draw, trials, threads)
    k_s = np.concatenate([p[0] for p in parts], axis=1)
    k_i = np.concatenate([p[1] for p in parts], axis=1)
    u = np.concatenate([p[2] for p in parts], axis=1)
    total = k_s + k_i
    s_max = int(total.max())
    if s_max > FOCK_SAMPLER_CAP:
        raise ResourceLimitError(
            f"exact photon routing needs totals up to {s_max} (cap {FOCK_SAMPLER_CAP}); "
            "use count_model='wigner'")
    m1 = np.zeros_like(total)
    flat_total, flat_k, flat_u = total.ravel(), k_s.ravel(), u.ravel()
    flat_m1 = m1.ravel()
    order = np.argsort(flat_total, kind="stable")
    bounds = np.searchsorted(flat_total[order], np.arange(s_max + 2))
    for s, level in iter_unitary_levels(s_max, bs):
        idx = order[bounds[s]:bounds[s + 1]]
        if idx.size == 0 or s == 0:
            continue
        cdf = np.cumsum(np.abs(level) ** 2, axis=0)
        cols = cdf[:, flat_k[idx]]
        flat_m1[idx] = np.minimum((cols < flat_u[idx][None, :]).sum(axis=0), s)
    m1 = flat_m1.reshape(total.shape)
    c1 = m1.sum(axis=0)
    c2 = (total - m1).sum(axis=0)
    if noise_std > 0:
        noisy = []
        for block, (lo, hi) in enumerate(block_slices(trials)):
            rng = stream(seed, block, DETECTION)
            noisy.append(np.column_stack([add_electronic_noise(c1[lo:hi], noise_std, rng),
                                          add_electronic_noise(c2[lo:hi], noise_std, rng)]))
        return np.concatenate(noisy)
    return np.column_stack([c1, c2])


# ---------------------------------------------------------------------------
# unequal beams
# ---------------------------------------------------------------------------

def unequal_beam_joint(spec, bs, eta, mode="exact", epsilon=1e-10, max_total=None,
                       trials=None, seed=None, count_model="auto", threads=1):
    """Twin beams with extra loss on one arm before the splitter.

    ``mode="exact"`` returns a JointCountDistribution; ``mode="sampled"`` a SampleBatch.
    """
    if mode == "exact":
        return multimode_joint_distribution(spec, bs, eta, epsilon, max_total)
    if mode == "sampled":
        if trials is None or seed is None:
            raise DomainError("sampled mode needs trials and seed")
        return gaussian_sample_bsv(spec, bs, eta, trials, seed, count_model=count_model,
                                   threads=threads)
    raise DomainError(f"unknown mode {mode!r}")

