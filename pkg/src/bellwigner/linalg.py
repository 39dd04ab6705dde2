"""Dense complex linear algebra for small Hilbert spaces (dims 2, 4, 16).

Everything works on plain ``complex128`` numpy arrays. Storage is dense and
there is no eigensolver: every spectral decomposition in this package is
written down analytically. Tolerances are absolute and default to 1e-12.
All functions are pure; nothing here mutates its arguments.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex 2-D array, raising ValueError otherwise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim={a.ndim}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError("matrix must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vector(v) -> np.ndarray:
    """Coerce to a finite complex 1-D array, raising ValueError otherwise."""
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"expected a vector, got array of ndim={a.ndim}")
    if a.shape[0] == 0:
        raise ValueError("vector must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(as_matrix(m)))


def kron(a, b) -> np.ndarray:
    """Kronecker product: entry (i*rb+k, j*cb+l) = a[i,j] * b[k,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return frobenius_norm(a - a.conj().T) <= tol


def is_projector(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ||m@m - m||_F <= tol and m is Hermitian within tol."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"projector test needs a square matrix, got {a.shape}")
    return frobenius_norm(a @ a - a) <= tol and is_hermitian(a, tol)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"unitarity test needs a square matrix, got {a.shape}")
    eye = np.eye(a.shape[0], dtype=complex)
    return frobenius_norm(a.conj().T @ a - eye) <= tol


def expectation(psi, m, tol: float = DEFAULT_TOL) -> float:
    """Real expectation value <psi| m |psi> of a Hermitian matrix.

    Raises ValueError on dimension mismatch, a non-Hermitian matrix, or a
    non-normalized state. The imaginary residue of the quadratic form is
    required to stay below ``tol``.
    """
    v = as_vector(psi)
    a = as_matrix(m)
    if a.shape != (v.shape[0], v.shape[0]):
        raise ValueError(f"dimension mismatch: state dim {v.shape[0]}, matrix {a.shape}")
    if not is_hermitian(a, tol):
        raise ValueError("expectation requires a Hermitian matrix")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError("expectation requires a normalized state")
    value = np.vdot(v, a @ v)
    if abs(value.imag) > tol:
        raise ValueError(f"imaginary residue {value.imag:.3e} exceeds tolerance")
    return float(value.real)


def commutator_norm(m, n) -> float:
    """Frobenius norm of m@n - n@m.

    For operators lifted from disjoint tensor factors the products are
    bitwise equal, so the result is exactly 0.0, not merely small.
    """
    a = as_matrix(m)
    b = as_matrix(n)
    if a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"commutator needs equal square matrices, got {a.shape} and {b.shape}")
    return frobenius_norm(a @ b - b @ a)
