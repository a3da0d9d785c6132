"""Hermitian eigenvalue routines and trace norm.

Two eigen-solvers are provided. ``jacobi_eigh`` is a cyclic complex Jacobi
sweep, accurate to the off-diagonal threshold and self-contained;
``eigvalsh`` dispatches to it or to LAPACK (``numpy.linalg.eigvalsh``), which
is the default because the cat-size scans diagonalise thousands of matrices.
"""

import numpy as np

from ._validation import check_hermitian

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    pass


def _off_norm(a):
    # direct sum: ||A||^2 - ||diag A||^2 would cancel catastrophically near convergence
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(matrix, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix : array_like, shape (d, d)
        Hermitian matrix.
    tol : float
        Sweeps stop once the Frobenius norm of the off-diagonal part falls
        below ``tol * max(1, ||A||_F)``.
    max_sweeps : int
        Upper bound on full sweeps before ``ConvergenceError`` is raised.

    Returns
    -------
    w : ndarray, shape (d,)
        Eigenvalues in ascending order.
    v : ndarray, shape (d, d)
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = check_hermitian(matrix).copy()
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                # hypot avoids overflow of tau^2 when |a_pq| is tiny
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # phase-align the (p, q) entry, then a real Givens rotation
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        if _off_norm(a) > threshold:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_norm(a):.3e})"
            )

    w = np.diag(a).real
    order = np.argsort(w)
    return w[order], v[:, order]


def eigvalsh(matrix, method="lapack"):
    """Ascending eigenvalues of a Hermitian matrix (``method`` is 'lapack' or 'jacobi')."""
    if method == "lapack":
        return np.linalg.eigvalsh(check_hermitian(matrix))
    if method == "jacobi":
        return jacobi_eigh(matrix)[0]
    raise ValueError(f"unknown eigen-solver {method!r}")


def trace_norm(matrix, method="lapack"):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(matrix, method))))
