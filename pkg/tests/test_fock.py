import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsvsim.errors import DomainError
from bsvsim.fock import (BeamSplitterSpec, PhotonDistribution, arcsine_distribution,
                         binomial_reference_distribution, bs_coefficient, bs_output_distribution,
                         bs_output_probabilities, gegenbauer, general_bs_amplitude,
                         general_output_distribution, log_factorial, photon_number_unitary,
                         thermal_pair_probability)
from bsvsim.oracle import FockOracleState

TAUS = [0.2, 0.35, 0.5, 0.8]


# -- BeamSplitterSpec / PhotonDistribution ------------------------------------

def test_splitter_reduces_phases_and_rejects_bad_tau():
    bs = BeamSplitterSpec(0.3, 7.0, -1.0)
    assert bs.rho == pytest.approx(0.7)
    assert 0 <= bs.phi_tau < 2 * math.pi and 0 <= bs.phi_rho < 2 * math.pi
    for bad in (-0.1, 1.5, float("nan")):
        with pytest.raises(DomainError):
            BeamSplitterSpec(bad)


def test_mode_matrix_is_unitary():
    m = BeamSplitterSpec(0.27, 0.3, 2.0).mode_matrix()
    np.testing.assert_allclose(m @ m.conj().T, np.eye(2), atol=1e-15)


def test_photon_distribution_rejects_negative_weights():
    with pytest.raises(DomainError):
        PhotonDistribution(np.array([0.5, -0.1]))
    d = PhotonDistribution(np.array([0.25, 0.5, 0.25]), support_offset=2)
    assert d[3] == 0.5 and d[0] == 0.0 and d.mean() == pytest.approx(3.0)


# -- log_factorial / gegenbauer --------------------------------------------------

@pytest.mark.parametrize("k,expected", [(0, 0.0), (1, 0.0), (5, math.log(120)), (20, math.log(math.factorial(20)))])
def test_log_factorial_small(k, expected):
    assert log_factorial(k) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("k", [21, 100, 1000, 10 ** 5])
def test_log_factorial_matches_exact_integer(k):
    # exact big-integer factorial through its bit length
    f = math.factorial(k)
    shift = max(f.bit_length() - 60, 0)
    exact = math.log(f >> shift) + shift * math.log(2)
    assert log_factorial(k) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("bad", [-1, 2.5])
def test_log_factorial_rejects(bad):
    with pytest.raises(DomainError):
        log_factorial(bad)


@pytest.mark.parametrize("order,alpha,x,expected", [(0, 3.7, 0.2, 1.0), (1, 0.5, 0.3, 0.3), (2, 0.5, 0.5, -0.125)])
def test_gegenbauer_examples(order, alpha, x, expected):
    assert gegenbauer(order, alpha, x) == pytest.approx(expected, abs=1e-15)


# -- pair coefficients ------------------------------------------------------------

def test_hom_coefficients():
    assert bs_coefficient(1, 1, 0.5) == 0.0
    assert abs(bs_coefficient(1, 2, 0.5)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert bs_coefficient(3, 1, 0.5) == pytest.approx(bs_coefficient(3, 5, 0.5), abs=1e-15)


def test_bs_coefficient_range_checked():
    with pytest.raises(DomainError):
        bs_coefficient(2, 5, 0.5)


@pytest.mark.parametrize("tau", [0.0, 1.0])
def test_degenerate_splitter_is_pass_through(tau):
    p = bs_output_probabilities(4, tau)
    assert p[4] == 1.0 and p.sum() == 1.0


def test_output_distribution_examples(backend):
    np.testing.assert_allclose(bs_output_probabilities(1, 0.5), [0.5, 0.0, 0.5], atol=1e-16)
    assert list(bs_output_probabilities(0, 0.3)) == [1.0]
    p4 = bs_output_probabilities(4, 0.5)
    assert np.all(p4[1::2] < 1e-20)


@pytest.mark.parametrize("tau", TAUS)
def test_unitarity_up_to_500(tau, backend):
    worst = max(abs(math.fsum(bs_output_probabilities(n, tau)) - 1.0) for n in range(0, 501, 7))
    assert worst < 1e-9


def test_hom_parity_up_to_200(backend):
    for n in range(1, 201):
        assert np.all(bs_output_probabilities(n, 0.5)[1::2] < 1e-20)


@pytest.mark.parametrize("n", [1, 4, 9, 30])
@pytest.mark.parametrize("tau", TAUS)
def test_reflection_symmetry(n, tau):
    for N in range(2 * n + 1):
        a = bs_coefficient(n, N, tau)
        b = bs_coefficient(n, 2 * n - N, tau)
        assert a == pytest.approx((-1) ** (N - n) * b, abs=1e-12)


@given(n=st.integers(0, 60), tau=st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_tau_mirror_property(n, tau):
    # swapping transmission and reflection mirrors the output distribution
    np.testing.assert_allclose(bs_output_probabilities(n, tau),
                               bs_output_probabilities(n, 1.0 - tau)[::-1], atol=1e-12)


@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("tau", TAUS)
def test_pair_distribution_matches_oracle(n, tau):
    out = FockOracleState.fock(n, n).apply_beam_splitter(BeamSplitterSpec(tau)).photon_probabilities()
    oracle = np.array([out[N, 2 * n - N] for N in range(2 * n + 1)])
    np.testing.assert_allclose(bs_output_distribution(n, tau).weights, oracle, atol=1e-10)


# -- general inputs ---------------------------------------------------------------

@pytest.mark.parametrize("n1", range(7))
@pytest.mark.parametrize("n2", range(7))
def test_general_amplitude_matches_oracle(n1, n2):
    bs = BeamSplitterSpec(0.35, 0.7, 2.1)
    out = FockOracleState.fock(n1, n2).apply_beam_splitter(bs).amplitudes
    for N in range(n1 + n2 + 1):
        assert abs(general_bs_amplitude(n1, n2, N, bs) - out[N, n1 + n2 - N]) < 1e-10


def test_general_amplitude_examples():
    assert abs(general_bs_amplitude(1, 0, 1, BeamSplitterSpec(0.5))) == pytest.approx(2 ** -0.5)
    for n in range(7):
        for N in range(2 * n + 1):
            assert abs(general_bs_amplitude(n, n, N, BeamSplitterSpec(0.35))) == pytest.approx(
                abs(bs_coefficient(n, N, 0.35)), abs=1e-12)
    with pytest.raises(DomainError):
        general_bs_amplitude(2, 1, 4, BeamSplitterSpec())


@given(n1=st.integers(0, 12), n2=st.integers(0, 12), pt=st.floats(0, 6.28), pr=st.floats(0, 6.28))
@settings(max_examples=40, deadline=None)
def test_probabilities_are_phase_independent(n1, n2, pt, pr):
    a = general_output_distribution(n1, n2, BeamSplitterSpec(0.3))
    b = general_output_distribution(n1, n2, BeamSplitterSpec(0.3, pt, pr))
    np.testing.assert_allclose(a.weights, b.weights, atol=1e-12)


@pytest.mark.parametrize("total", [1, 10, 150, 400])
def test_level_matrix_is_unitary(total, backend):
    a = photon_number_unitary(total, BeamSplitterSpec(0.35, 0.2, 1.3))
    np.testing.assert_allclose(a.conj().T @ a, np.eye(total + 1), atol=1e-11)


def test_level_matrix_agrees_with_exchange_sum():
    bs = BeamSplitterSpec(0.2, 1.0, 0.4)
    a = photon_number_unitary(9, bs)
    for k1 in range(10):
        for m1 in range(10):
            assert a[m1, k1] == pytest.approx(general_bs_amplitude(k1, 9 - k1, m1, bs), abs=1e-12)


# -- arcsine and binomial ----------------------------------------------------------

def test_arcsine_examples():
    np.testing.assert_allclose(arcsine_distribution(2).weights, [0.5, 0.0, 0.5])
    np.testing.assert_allclose(arcsine_distribution(4).weights, [3 / 8, 0, 1 / 4, 0, 3 / 8])
    assert arcsine_distribution(7).total_weight == 0.0


@pytest.mark.parametrize("sigma", [2, 10, 100, 400])
def test_arcsine_equals_balanced_pair_output(sigma):
    np.testing.assert_allclose(arcsine_distribution(sigma).weights,
                               bs_output_probabilities(sigma // 2, 0.5), atol=1e-10)
    assert arcsine_distribution(sigma).total_weight == pytest.approx(1.0, abs=1e-12)


def test_arcsine_prefactor():
    d = arcsine_distribution(6, include_prefactor=True, G=0.8)
    assert d.total_weight == pytest.approx(thermal_pair_probability(0.8, 3), rel=1e-12)
    with pytest.raises(DomainError):
        arcsine_distribution(6, include_prefactor=True)


def test_binomial_reference():
    np.testing.assert_allclose(binomial_reference_distribution(2, 0.5).weights, [0.25, 0.5, 0.25])
    assert list(binomial_reference_distribution(0, 0.3).weights) == [1.0]
    d = binomial_reference_distribution(100, 0.5)
    assert np.argmax(d.weights) == 50 and math.sqrt(d.variance()) == pytest.approx(5.0)
