import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catsize import linalg
from catsize.linalg import ConvergenceError, jacobi_eigh

from conftest import random_hermitian


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_jacobi_matches_lapack(d, seed):
    a = random_hermitian(np.random.default_rng(seed), d)
    w, v = jacobi_eigh(a)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-11)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-11)
    np.testing.assert_allclose(a @ v, v * w, atol=1e-10)


def test_jacobi_degenerate_and_diagonal():
    w, v = jacobi_eigh(np.diag([3.0, 1.0, 1.0, -2.0]))
    np.testing.assert_allclose(w, [-2.0, 1.0, 1.0, 3.0])
    # projector with a two-fold degenerate eigenvalue
    u = np.array([1.0, 1j, 0.0]) / np.sqrt(2)
    w, _ = jacobi_eigh(np.outer(u, u.conj()))
    np.testing.assert_allclose(w, [0.0, 0.0, 1.0], atol=1e-14)


def test_jacobi_rejects_non_hermitian():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_jacobi_reports_non_convergence():
    a = random_hermitian(np.random.default_rng(0), 8)
    with pytest.raises(ConvergenceError):
        jacobi_eigh(a, max_sweeps=1)


def test_trace_norm_methods_agree(rng):
    a = random_hermitian(rng, 9)
    expected = np.sum(np.abs(np.linalg.eigvalsh(a)))
    assert linalg.trace_norm(a) == pytest.approx(expected, abs=1e-12)
    assert linalg.trace_norm(a, "jacobi") == pytest.approx(expected, abs=1e-11)
    with pytest.raises(ValueError):
        linalg.eigvalsh(a, "qr")
