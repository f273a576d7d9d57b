"""Dense complex linear algebra on small Hilbert spaces (dim <= 64).

Matrices are plain ``numpy.ndarray`` objects of dtype complex128. All
functions are pure; inputs are never modified.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
PSD_FLOOR = -1e-8


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def max_abs(a: np.ndarray) -> float:
    """Max-entry norm, the norm every tolerance in this package refers to."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor most significant."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def hermiticity_error(a: np.ndarray) -> float:
    return max_abs(a - dagger(a))


def check_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix is not square: {a.shape}")


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    check_square(h)
    err = hermiticity_error(h)
    # scale the tolerance for large-norm operators (e.g. S_z squared at n = 6)
    if err > tol * max(1.0, max_abs(h)):
        raise NotHermitian(f"||A - A^dag||_max = {err:.3e} exceeds {tol:.0e}")


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.

    Raises NotHermitian if the input is not Hermitian to 1e-12.
    """
    h = as_matrix(h)
    check_hermitian(h)
    # symmetrize so LAPACK sees exactly the matrix we validated
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    return w, v


def function_of_hermitian(h, fn) -> np.ndarray:
    """Apply a scalar function through the spectral decomposition."""
    w, v = herm_eig(h)
    return (v * fn(w)) @ dagger(v)


def expm_hermitian(h, scale: float) -> np.ndarray:
    """exp(-i * scale * h) for Hermitian h."""
    return function_of_hermitian(h, lambda w: np.exp(-1j * scale * w))


def sqrtm_psd(rho) -> np.ndarray:
    """Positive square root of a PSD Hermitian matrix.

    Eigenvalues in [-1e-8, 0) are treated as roundoff and clamped to zero;
    anything more negative raises NotPSD.
    """
    w, v = herm_eig(rho)
    if w.size and w[0] < PSD_FLOOR:
        raise NotPSD(f"min eigenvalue {w[0]:.3e} below {PSD_FLOOR:.0e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root) @ dagger(v)
    return 0.5 * (s + dagger(s))


def ket(bits: str) -> np.ndarray:
    """Column vector for a computational-basis bitstring; bit 0 is leftmost."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    v = np.zeros((2 ** len(bits), 1), dtype=complex)
    v[int(bits, 2), 0] = 1.0
    return v


def projector(vec) -> np.ndarray:
    """|v><v| for a (not necessarily normalized) column vector."""
    v = np.asarray(vec, dtype=complex).reshape(-1, 1)
    return v @ dagger(v)


def is_density_operator(rho, tol: float = 1e-10) -> bool:
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1] or hermiticity_error(rho) > 1e-9:
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0] >= -tol)
