"""Input validation helpers shared by the public functions and estimators."""

import math
import numbers

import numpy as np

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(value, name, low=-math.inf, high=math.inf, low_open=False, high_open=False):
    """Return ``value`` as float after checking it is finite and in range."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value):
        raise ValueError(f"{name} is NaN")
    if value < low or (low_open and value == low):
        raise ValueError(f"{name}={value} below allowed range")
    if value > high or (high_open and value == high):
        raise ValueError(f"{name}={value} above allowed range")
    return value


def check_delta(delta):
    return check_real(delta, "delta", 0.0, 0.5, low_open=True, high_open=True)


def check_square(matrix, name="matrix"):
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a.astype(complex)


def check_hermitian(matrix, name="matrix", atol=HERMITIAN_ATOL):
    a = check_square(matrix, name)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > atol * scale:
        raise ValueError(f"{name} is not Hermitian")
    return a


def check_density_matrix(matrix, name="rho", atol=TRACE_ATOL):
    """Hermitian with unit trace. Positivity is checked where eigenvalues are computed."""
    a = check_hermitian(matrix, name)
    tr = np.trace(a)
    if abs(tr - 1.0) > atol:
        raise ValueError(f"{name} must have unit trace, got {tr.real:.3g}")
    return a


def check_probability_vector(probs, name="probs", atol=1e-10, renormalize=False):
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has non-finite entries")
    if np.any(p < 0):
        raise ValueError(f"{name} has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > atol:
        raise ValueError(f"{name} sums to {total!r}, not 1 within {atol:g}")
    if renormalize:
        p = p / total
    return p


def check_real_part(z, name="value", atol=1e-10):
    """Return the real part of ``z`` after asserting the imaginary residue is small."""
    z = complex(z)
    if abs(z.imag) > atol * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{name} has imaginary residue {z.imag:.3e}")
    return z.real
