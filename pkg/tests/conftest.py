import pytest

from bsvsim import _accel, fock, kernels


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run the test once per kernel implementation."""
    if request.param == "numba" and not _accel.NUMBA_AVAILABLE:
        pytest.skip("numba not installed or disabled")
    monkeypatch.setattr(kernels, "NUMBA_AVAILABLE", request.param == "numba")
    fock._bs_probabilities_cached.cache_clear()
    yield request.param
    fock._bs_probabilities_cached.cache_clear()
