"""Hot numeric kernels.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version.  ``BSVSIM_DISABLE_NUMBA=1`` makes the public
dispatchers use the numpy versions; both are importable directly for
testing and benchmarking.
"""
import math

import numpy as np
from scipy.special import gammaln

from ._accel import NUMBA_AVAILABLE, njit

_BIG = 1e150
_LOG_BIG = math.log(_BIG)


# ---------------------------------------------------------------------------
# Gegenbauer recurrence with rescaling
# ---------------------------------------------------------------------------

@njit(cache=True)
def _gegenbauer_scaled(order, alpha, x):
    """Return ``(mantissa, log_scale)`` with C = mantissa * exp(log_scale)."""
    if order == 0:
        return 1.0, 0.0
    c_prev = 1.0
    c_cur = 2.0 * alpha * x
    scale = 0.0
    for j in range(2, order + 1):
        c_next = (2.0 * x * (j + alpha - 1.0) * c_cur - (j + 2.0 * alpha - 2.0) * c_prev) / j
        c_prev = c_cur
        c_cur = c_next
        mag = abs(c_cur)
        if mag > _BIG:
            c_cur /= _BIG
            c_prev /= _BIG
            scale += _LOG_BIG
        elif mag < 1.0 / _BIG and abs(c_prev) < 1.0 / _BIG and (mag > 0.0 or c_prev != 0.0):
            c_cur *= _BIG
            c_prev *= _BIG
            scale -= _LOG_BIG
    return c_cur, scale


@njit(cache=True)
def _bs_probabilities_numba(n, tau):
    out = np.zeros(2 * n + 1)
    x = 2.0 * tau - 1.0
    log_tr = math.log(tau * (1.0 - tau))
    for d in range(n + 1):
        big_n = n + d
        k = n - d
        mant, scale = _gegenbauer_scaled(k, d + 0.5, x)
        if mant == 0.0:
            continue
        log_mag = (0.5 * (math.lgamma(k + 1.0) - math.lgamma(big_n + 1.0) + d * log_tr)
                   + math.lgamma(2.0 * d + 1.0) - math.lgamma(d + 1.0)
                   + math.log(abs(mant)) + scale)
        p = math.exp(2.0 * log_mag)
        out[big_n] = p
        out[n - d] = p
    return out


def _bs_probabilities_numpy(n, tau):
    out = np.zeros(2 * n + 1)
    d = np.arange(n + 1)
    k = n - d
    alpha = d + 0.5
    x = 2.0 * tau - 1.0
    c_prev = np.ones(n + 1)
    c_cur = np.where(k >= 1, 2.0 * alpha * x, 1.0)
    scale = np.zeros(n + 1)
    for j in range(2, n + 1):
        active = k >= j
        c_next = (2.0 * x * (j + alpha - 1.0) * c_cur - (j + 2.0 * alpha - 2.0) * c_prev) / j
        c_prev = np.where(active, c_cur, c_prev)
        c_cur = np.where(active, c_next, c_cur)
        mag = np.abs(c_cur)
        up = active & (mag > _BIG)
        down = active & (mag < 1.0 / _BIG) & (np.abs(c_prev) < 1.0 / _BIG) & ((mag > 0) | (c_prev != 0))
        factor = np.where(up, 1.0 / _BIG, np.where(down, _BIG, 1.0))
        c_cur = c_cur * factor
        c_prev = c_prev * factor
        scale = scale + np.where(up, _LOG_BIG, np.where(down, -_LOG_BIG, 0.0))
    nonzero = c_cur != 0.0
    with np.errstate(divide="ignore"):
        log_mag = (0.5 * (gammaln(k + 1.0) - gammaln(n + d + 1.0) + d * math.log(tau * (1.0 - tau)))
                   + gammaln(2.0 * d + 1.0) - gammaln(d + 1.0)
                   + np.log(np.abs(c_cur)) + scale)
    p = np.where(nonzero, np.exp(2.0 * log_mag), 0.0)
    out[n:] = p
    out[: n + 1] = np.maximum(out[: n + 1], p[::-1])
    return out


# ---------------------------------------------------------------------------
# Photon-number-resolved beam-splitter unitary, one total photon number per call
# ---------------------------------------------------------------------------

@njit(cache=True)
def _next_level_numba(prev, t11, t21, t12, t22):
    # |k1,k2> = (sqrt(k1) a_s^dag |k1-1,k2> + sqrt(k2) a_i^dag |k1,k2-1>) / S ;
    # the single-path ladder amplifies rounding like sqrt(C(S, k1))
    s = prev.shape[0]  # new total photon number
    new = np.zeros((s + 1, s + 1), dtype=np.complex128)
    for c in range(s):
        ws = math.sqrt(c + 1.0) / s      # feeds column c+1 through a_s^dag
        wi = math.sqrt(s - c) / s        # feeds column c through a_i^dag
        for m in range(s):
            v = prev[m, c]
            if v == 0:
                continue
            up = math.sqrt(m + 1.0) * v
            down = math.sqrt(s - m) * v
            new[m + 1, c + 1] += ws * t11 * up
            new[m, c + 1] += ws * t21 * down
            new[m + 1, c] += wi * t12 * up
            new[m, c] += wi * t22 * down
    return new


def _next_level_numpy(prev, t11, t21, t12, t22):
    s = prev.shape[0]
    up = np.sqrt(np.arange(1, s + 1))[:, None] * prev
    down = np.sqrt(s - np.arange(s))[:, None] * prev
    col = np.arange(s)
    ws = (np.sqrt(col + 1.0) / s)[None, :]
    wi = (np.sqrt(s - col) / s)[None, :]
    new = np.zeros((s + 1, s + 1), dtype=np.complex128)
    new[1:, 1:] += ws * t11 * up
    new[:-1, 1:] += ws * t21 * down
    new[1:, :-1] += wi * t12 * up
    new[:-1, :-1] += wi * t22 * down
    return new


# ---------------------------------------------------------------------------
# Binomial thinning matrices
# ---------------------------------------------------------------------------

@njit(cache=True)
def _binomial_rows_numba(ns, eta, kmax):
    """Row i holds Binomial(ns[i], eta) pmf on 0..kmax."""
    out = np.zeros((ns.shape[0], kmax + 1))
    if eta <= 0.0:
        out[:, 0] = 1.0
        return out
    if eta >= 1.0:
        for i in range(ns.shape[0]):
            if ns[i] <= kmax:
                out[i, ns[i]] = 1.0
        return out
    le = math.log(eta)
    l1e = math.log1p(-eta)
    for i in range(ns.shape[0]):
        n = ns[i]
        lgn = math.lgamma(n + 1.0)
        top = min(n, kmax)
        for k in range(top + 1):
            out[i, k] = math.exp(lgn - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)
                                 + k * le + (n - k) * l1e)
    return out


def _binomial_rows_numpy(ns, eta, kmax):
    ns = np.asarray(ns, dtype=np.int64)
    k = np.arange(kmax + 1)
    out = np.zeros((ns.shape[0], kmax + 1))
    if eta <= 0.0:
        out[:, 0] = 1.0
        return out
    if eta >= 1.0:
        rows = np.nonzero(ns <= kmax)[0]
        out[rows, ns[rows]] = 1.0
        return out
    nn = ns[:, None].astype(float)
    valid = k[None, :] <= nn
    kk = np.where(valid, k[None, :], 0)
    logp = (gammaln(nn + 1.0) - gammaln(kk + 1.0) - gammaln(nn - kk + 1.0)
            + kk * math.log(eta) + (nn - kk) * math.log1p(-eta))
    out[valid] = np.exp(logp[valid])
    return out


# ---------------------------------------------------------------------------
# Direct 2-D convolution
# ---------------------------------------------------------------------------

@njit(cache=True)
def _convolve2d_numba(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = a[i, j]
            if v == 0.0:
                continue
            for p in range(b.shape[0]):
                for q in range(b.shape[1]):
                    out[i + p, j + q] += v * b[p, q]
    return out


def _convolve2d_numpy(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    # loop over the smaller operand, shift-add the larger one
    if a.size > b.size:
        a, b = b, a
    for i, j in zip(*np.nonzero(a)):
        out[i:i + b.shape[0], j:j + b.shape[1]] += a[i, j] * b
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

IMPLEMENTATIONS = {
    "bs_probabilities": (_bs_probabilities_numba, _bs_probabilities_numpy),
    "next_level": (_next_level_numba, _next_level_numpy),
    "binomial_rows": (_binomial_rows_numba, _binomial_rows_numpy),
    "convolve2d": (_convolve2d_numba, _convolve2d_numpy),
}


def _pick(name):
    fast, slow = IMPLEMENTATIONS[name]
    return fast if NUMBA_AVAILABLE else slow


def gegenbauer_scaled(order, alpha, x):
    return _gegenbauer_scaled(int(order), float(alpha), float(x))


def bs_probabilities(n, tau):
    return _pick("bs_probabilities")(int(n), float(tau))


def next_level(prev, t):
    return _pick("next_level")(prev, complex(t[0, 0]), complex(t[1, 0]), complex(t[0, 1]), complex(t[1, 1]))


def binomial_rows(ns, eta, kmax):
    return _pick("binomial_rows")(np.ascontiguousarray(ns, dtype=np.int64), float(eta), int(kmax))


def convolve2d(a, b):
    return _pick("convolve2d")(np.ascontiguousarray(a, dtype=float), np.ascontiguousarray(b, dtype=float))
