import numpy as np
import pytest

from bsvsim.fock import BeamSplitterSpec
from bsvsim.oracle import FockOracleState, counting_povm_diagonal, dense_beam_splitter


@pytest.mark.parametrize("cutoff", [1, 4, 8])
def test_dense_splitter_is_unitary(cutoff):
    u = dense_beam_splitter(BeamSplitterSpec(0.35, 0.5, 1.0).transfer_matrix(), cutoff)
    np.testing.assert_allclose(u.conj().T @ u, np.eye((cutoff + 1) ** 2), atol=1e-11)


@pytest.mark.parametrize("eta", [0.05, 0.5, 1.0])
def test_povm_elements_sum_to_identity(eta):
    total = sum(counting_povm_diagonal(eta, m, 10) for m in range(11))
    np.testing.assert_allclose(total, 1.0, atol=1e-12)


def test_povm_is_binomial():
    d = counting_povm_diagonal(0.3, 2, 6)
    assert d[5] == pytest.approx(10 * 0.09 * 0.7 ** 3)
    assert d[1] == 0.0


def test_state_norm_and_hom():
    s = FockOracleState.fock(1, 1).apply_beam_splitter(BeamSplitterSpec(0.5))
    assert s.norm() == pytest.approx(1.0, abs=1e-12)
    assert s.photon_probabilities()[1, 1] < 1e-28
