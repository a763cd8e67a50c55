"""Brute-force two-mode Fock-space oracle.

Builds the splitter as exp(i a^dag H a) on a truncated two-mode space and
the detector as the normally-ordered counting POVM expanded term by term.
Nothing here shares code with the closed-form paths it is used to check.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, logm


def _annihilation(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1)


def dense_beam_splitter(transfer, cutoff):
    """Dense unitary on the (cutoff+1)^2 space realising a_k^dag -> sum_j T[j,k] a_j^dag.

    Exact on every block with total photon number <= cutoff.
    """
    h = -1j * logm(np.asarray(transfer, dtype=complex))
    a = _annihilation(cutoff)
    eye = np.eye(cutoff + 1)
    modes = [np.kron(a, eye), np.kron(eye, a)]
    gen = np.zeros(((cutoff + 1) ** 2,) * 2, dtype=complex)
    for j in range(2):
        for k in range(2):
            gen += h[j, k] * modes[j].conj().T @ modes[k]
    return expm(1j * gen)


def counting_povm_diagonal(eta, m, cutoff):
    """<k| :(eta n)^m / m! exp(-eta n): |k> for k = 0..cutoff via the normal-order series."""
    out = np.zeros(cutoff + 1)
    for k in range(cutoff + 1):
        acc = 0.0
        for l in range(0, k - m + 1):
            # :n^r: has diagonal k!/(k-r)!
            falling = math.factorial(k) / math.factorial(k - m - l)
            acc += eta ** m / math.factorial(m) * (-eta) ** l / math.factorial(l) * falling
        out[k] = acc
    return out


@dataclass
class FockOracleState:
    cutoff: int
    amplitudes: np.ndarray

    @classmethod
    def fock(cls, n1, n2, cutoff=None):
        cutoff = n1 + n2 if cutoff is None else cutoff
        amp = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        amp[n1, n2] = 1.0
        return cls(cutoff, amp)

    @classmethod
    def from_components(cls, components, cutoff):
        """components: mapping (n1, n2) -> complex amplitude."""
        amp = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        for (n1, n2), value in components.items():
            amp[n1, n2] += value
        return cls(cutoff, amp)

    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def apply_beam_splitter(self, bs):
        u = dense_beam_splitter(bs.transfer_matrix(), self.cutoff)
        out = u @ self.amplitudes.reshape(-1)
        return FockOracleState(self.cutoff, out.reshape(self.amplitudes.shape))

    def photon_probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def detection_probability(self, eta, m1, m2):
        d1 = counting_povm_diagonal(eta, m1, self.cutoff)
        d2 = counting_povm_diagonal(eta, m2, self.cutoff)
        return float(np.sum(self.photon_probabilities() * np.outer(d1, d2)))
