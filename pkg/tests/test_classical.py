import math

import numpy as np
import pytest
from scipy import integrate

from bsvsim.classical import (ClassicalSourceSpec, arcsine_cdf, arcsine_density_reference,
                              arcsine_ks_distance, classical_interference_samples, count_g2)
from bsvsim.detection import delta_histogram, delta_values
from bsvsim.errors import DomainError

from helpers import is_unimodal

SEED = 77


def test_spec_validation():
    for kwargs in (dict(kind="laser", mean_photons=1.0), dict(kind="thermal", mean_photons=-1.0),
                   dict(kind="coherent", mean_photons=1.0, visibility=1.2),
                   dict(kind="coherent", mean_photons=1.0, phase_mode="random")):
        with pytest.raises(DomainError):
            ClassicalSourceSpec(**kwargs)


def test_fixed_phase_zero_sends_everything_to_port_one():
    src = ClassicalSourceSpec("coherent", 1e4, "fixed", 0.0)
    b = classical_interference_samples(src, 1.0, 1000, SEED)
    assert np.all(b.m2 == 0)
    assert np.all(delta_values(b) == 1.0)


def test_thermal_fixed_phase_peaks_at_v_cos_phi():
    src = ClassicalSourceSpec("thermal", 1e5, "fixed", 1.1, visibility=0.9)
    b = classical_interference_samples(src, 1.0, 100_000, SEED)
    d = delta_values(b)
    assert np.median(d) == pytest.approx(0.9 * math.cos(1.1), abs=0.01)
    h = delta_histogram(b, 64, min_total=1)
    assert is_unimodal(h.masses, b.trials)


@pytest.mark.parametrize("kind", ["coherent", "thermal"])
def test_uniform_phase_is_arcsine_and_improves_with_brightness(kind):
    ks = []
    for mean in (30.0, 1e6):
        src = ClassicalSourceSpec(kind, mean, "uniform")
        b = classical_interference_samples(src, 1.0, 200_000, SEED)
        ks.append(arcsine_ks_distance(delta_values(b)))
    assert ks[1] < ks[0]
    assert ks[1] < 0.01


def test_visibility_shrinks_support():
    v, mean = 0.8, 1e6
    src = ClassicalSourceSpec("coherent", mean, "uniform", visibility=v)
    d = delta_values(classical_interference_samples(src, 1.0, 200_000, SEED))
    assert np.mean(np.abs(d) > v + 5 / math.sqrt(mean)) < 1e-3


@pytest.mark.parametrize("kind,g2", [("thermal", 2.0), ("coherent", 1.0)])
def test_intensity_statistics(kind, g2):
    src = ClassicalSourceSpec(kind, 50.0, "uniform")
    b = classical_interference_samples(src, 1.0, 10 ** 6, SEED, threads=4)
    assert count_g2(b.pairs.sum(axis=1)) == pytest.approx(g2, abs=0.02)


def test_multimode_thermal_g2():
    src = ClassicalSourceSpec("thermal", 50.0, "uniform", modes=3.4)
    b = classical_interference_samples(src, 1.0, 400_000, SEED)
    assert count_g2(b.pairs.sum(axis=1)) == pytest.approx(1 + 1 / 3.4, abs=0.02)


@pytest.mark.parametrize("kind", ["coherent", "thermal"])
def test_energy_conservation(kind):
    src = ClassicalSourceSpec(kind, 40.0, "uniform", visibility=0.7)
    b = classical_interference_samples(src, 0.3, 300_000, SEED)
    tot = b.pairs.sum(axis=1)
    assert abs(tot.mean() - 12.0) < 3 * tot.std() / math.sqrt(tot.size)


def test_pluggable_phase_sampler():
    src = ClassicalSourceSpec("coherent", 1e6, "uniform", phase_sampler=lambda rng, n: np.full(n, math.pi))
    d = delta_values(classical_interference_samples(src, 1.0, 500, SEED))
    assert np.all(d < -0.99)


def test_thread_independence():
    src = ClassicalSourceSpec("thermal", 20.0, "uniform")
    a = classical_interference_samples(src, 0.5, 140_000, SEED, threads=1)
    b = classical_interference_samples(src, 0.5, 140_000, SEED, threads=4)
    np.testing.assert_array_equal(a.pairs, b.pairs)


def test_arcsine_reference():
    assert arcsine_density_reference(0.0) == pytest.approx(1 / math.pi)
    assert arcsine_density_reference(0.99) == pytest.approx(1 / (math.pi * math.sqrt(0.0199)), rel=1e-14)
    assert arcsine_density_reference(0.99) == pytest.approx(2.2564, abs=1e-4)
    total, _ = integrate.quad(arcsine_density_reference, -1, 1, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)
    for bad in (1.0, -1.5):
        with pytest.raises(DomainError):
            arcsine_density_reference(bad)


def test_arcsine_cdf_is_cdf_of_cosine():
    phi = np.random.default_rng(0).uniform(0, 2 * math.pi, 200_000)
    x = np.linspace(-0.99, 0.99, 9)
    emp = np.array([(np.cos(phi) <= t).mean() for t in x])
    np.testing.assert_allclose(arcsine_cdf(x), emp, atol=5e-3)
    assert arcsine_cdf(0.0) == 0.5 and arcsine_cdf(1.0) == 1.0
