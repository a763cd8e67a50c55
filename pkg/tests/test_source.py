import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsvsim.errors import DomainError, FitError, ResourceLimitError
from bsvsim.source import (TwinBeamSpec, fit_gain, fock_weights, g2_to_modes, gain_for_mean_photons,
                           mean_photons_per_mode, modes_to_g2, symplectic_eigenvalues,
                           wigner_covariance)


def test_twin_beam_spec_normalizes_weights():
    spec = TwinBeamSpec(1.0, (2.0, 2.0))
    assert spec.mode_weights == (0.5, 0.5)
    assert np.sum(np.sinh(spec.mode_gains()) ** 2) == pytest.approx(math.sinh(1.0) ** 2)


@pytest.mark.parametrize("kwargs", [dict(gain=-1.0), dict(gain=1.0, mode_weights=(0.0,)),
                                    dict(gain=1.0, eta_signal_pre=1.2)])
def test_twin_beam_spec_rejects(kwargs):
    with pytest.raises(DomainError):
        TwinBeamSpec(**kwargs)


def test_fock_weights_g1():
    w = fock_weights(1.0, 1e-12)
    assert w.weights[0] == pytest.approx(1 / math.cosh(1.0) ** 2, rel=1e-14)
    assert w.weights[1] / w.weights[0] == pytest.approx(math.tanh(1.0) ** 2, rel=1e-14)
    assert w.meta["tail"] < 1e-12


def test_fock_weights_vacuum_limit():
    w = fock_weights(1e-9, 1e-12)
    assert w.weights[0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("G", [0.05, 0.5, 1.0, 1.2, 2.0])
def test_fock_weights_tail_accounting(G):
    w = fock_weights(G, 1e-12)
    n_max = len(w.weights) - 1
    analytic_tail = math.tanh(G) ** (2 * (n_max + 1))
    assert w.meta["tail"] == pytest.approx(analytic_tail, rel=1e-12)
    assert abs(w.total_weight + w.meta["tail"] - 1.0) <= 1e-12
    # the tail holds at most sinh^2 G-scaled mass beyond n_max
    assert w.mean() == pytest.approx(math.sinh(G) ** 2, rel=1e-9)


def test_fock_weights_cap():
    with pytest.raises(ResourceLimitError):
        fock_weights(13.0)


@pytest.mark.parametrize("G,expected", [(0.0, 0.0), (1.0, 1.3810978455418157)])
def test_mean_photons(G, expected):
    assert mean_photons_per_mode(G) == pytest.approx(expected, rel=1e-14)


def test_mean_photons_high_gain():
    assert 4.85e10 <= mean_photons_per_mode(13.0) <= 4.95e10
    assert gain_for_mean_photons(mean_photons_per_mode(13.0)) == pytest.approx(13.0)


def test_mode_conversions():
    assert g2_to_modes(2.0) == 1.0
    assert modes_to_g2(1.2) == pytest.approx(1.8333333333333333)
    assert modes_to_g2(1e12) == pytest.approx(1.0)
    for bad in (1.0, 0.5, 2.5):
        with pytest.raises(DomainError):
            g2_to_modes(bad)
    with pytest.raises(DomainError):
        modes_to_g2(0.9)


@given(st.floats(1.0, 1e4))
def test_mode_round_trip(m):
    assert g2_to_modes(modes_to_g2(m)) == pytest.approx(m, rel=1e-10)


def test_wigner_covariance_examples():
    np.testing.assert_allclose(wigner_covariance(0.0), np.eye(4) / 2)
    cov = wigner_covariance(1.0)
    assert cov[0, 0] == pytest.approx(math.cosh(2.0) / 2)


@pytest.mark.parametrize("G", [0.0, 0.3, 1.0, 2.0])
def test_wigner_covariance_pure_and_positive(G):
    # float64 entries cannot resolve c - s = exp(-2G)/2 to 1e-12 beyond G ~ 2.5
    cov = wigner_covariance(G)
    assert np.all(np.linalg.eigvalsh(cov) > 0)
    np.testing.assert_allclose(symplectic_eigenvalues(cov), [0.5, 0.5], rtol=1e-12)


@pytest.mark.parametrize("G", [5.0, 13.0, 20.0])
def test_wigner_covariance_high_gain_entries(G):
    cov = wigner_covariance(G)
    np.testing.assert_array_equal(cov, cov.T)
    assert cov[0, 0] == pytest.approx(math.cosh(2 * G) / 2, rel=1e-15)
    assert cov[0, 2] == pytest.approx(math.sinh(2 * G) / 2, rel=1e-15)


def test_wigner_covariance_photon_statistics():
    cov = wigner_covariance(1.0)
    x = np.random.default_rng(1).multivariate_normal(np.zeros(4), cov, size=10 ** 6)
    w = (x[:, 0] ** 2 + x[:, 1] ** 2) / 2
    mean_n = w.mean() - 0.5
    # normally ordered second moment from symmetric-ordered moments
    n2 = np.mean(w ** 2) - 2 * w.mean() + 0.5
    assert mean_n == pytest.approx(math.sinh(1.0) ** 2, rel=0.01)
    assert n2 / mean_n ** 2 == pytest.approx(2.0, abs=0.05)


# -- gain fit ------------------------------------------------------------------------

POWERS = np.linspace((0.1 / 1.3) ** 2, (13 / 1.3) ** 2, 20)


def _synthetic(n0=2.0, kappa=1.3, powers=POWERS):
    return n0 * np.sinh(kappa * np.sqrt(powers)) ** 2


def test_fit_noiseless_round_trip():
    fit = fit_gain(list(zip(POWERS, _synthetic())))
    assert fit.N0 == pytest.approx(2.0, rel=1e-6)
    assert fit.kappa == pytest.approx(1.3, rel=1e-6)
    assert fit.gain(4.0) == pytest.approx(2.6, rel=1e-6)


@pytest.mark.parametrize("n0,kappa", [(1.0, 0.2), (50.0, 3.0), (0.01, 1.0)])
def test_fit_noiseless_other_scales(n0, kappa):
    p = np.linspace(0.2, 4.0, 12)
    fit = fit_gain(list(zip(p, _synthetic(n0, kappa, p))))
    assert fit.N0 == pytest.approx(n0, rel=1e-6) and fit.kappa == pytest.approx(kappa, rel=1e-6)


def test_fit_with_five_percent_noise():
    rng = np.random.default_rng(5)
    errors = []
    for _ in range(100):
        noisy = _synthetic() * (1 + 0.05 * rng.standard_normal(POWERS.size))
        fit = fit_gain(list(zip(POWERS, noisy)))
        errors.append(max(abs(fit.N0 / 2.0 - 1), abs(fit.kappa / 1.3 - 1)))
    errors = np.array(errors)
    # estimator spread, not optimizer failure: most fits land within 5 %
    assert np.median(errors) < 0.03
    assert np.mean(errors < 0.05) >= 0.85


def test_fit_preconditions():
    with pytest.raises(DomainError):
        fit_gain([(1.0, 2.0), (2.0, 5.0)])
    with pytest.raises(DomainError):
        fit_gain([(1.0, 2.0), (-2.0, 5.0), (3.0, 9.0)])
    with pytest.raises(FitError) as info:
        fit_gain([(1.0, 2.0), (1.0, 2.0), (1.0, 2.0)])
    assert "n_points" in info.value.diagnostics
