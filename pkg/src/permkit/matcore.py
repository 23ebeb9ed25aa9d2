"""Small dense real-matrix primitives.

Everything here takes array-likes, never mutates its input and returns new
float64 (or complex128) arrays. Dimensions 1..16 are supported; 3x3 matrices
go through closed-form code paths.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from .errors import (DimensionError, NegativeScaleError, NoConvergenceError,
                     SingularError, ZeroDiagonalError)

MAX_DIM = 16
REAL_TOL = 1e-8


def as_matrix(m) -> np.ndarray:
    """Validate and convert to a square, finite float64 array."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def singular_tol(m) -> float:
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    return 1e-12 * max(1.0, float(np.max(np.abs(a)))) ** n


def _cofactor_det(a: np.ndarray) -> float:
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if n == 3:
        return float(_kernels.det3(a))
    total = 0.0
    cols = np.arange(n)
    for j in range(n):
        if a[0, j] == 0.0:
            continue
        minor = a[1:, cols != j]
        total += (-1) ** j * a[0, j] * _cofactor_det(minor)
    return total


def det(m) -> float:
    """Determinant: cofactor expansion for n <= 4, LU with partial pivoting above."""
    a = as_matrix(m)
    if a.shape[0] <= 4:
        return _cofactor_det(a)
    return float(np.linalg.det(a))


def adjugate(m) -> np.ndarray:
    """Classical adjoint, defined for singular input as well."""
    a = as_matrix(m)
    n = a.shape[0]
    if n == 1:
        return np.ones((1, 1))
    out = np.empty((n, n))
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[np.ix_(idx != j, idx != i)]
            out[i, j] = (-1) ** (i + j) * det(minor)
    return out


def inverse(m) -> np.ndarray:
    a = as_matrix(m)
    d = det(a)
    if abs(d) <= singular_tol(a):
        raise SingularError(f"matrix is numerically singular (det={d:.3e})")
    if a.shape[0] <= 3:
        return adjugate(a) / d
    return np.linalg.inv(a)


def principal_minor_sums(m) -> np.ndarray:
    """E_0..E_n, where E_k is the sum of all k x k principal minors."""
    a = as_matrix(m)
    n = a.shape[0]
    e = np.zeros(n + 1)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = sum(det(a[np.ix_(s, s)]) for s in combinations(range(n), k))
    return e


def char_poly(m) -> np.ndarray:
    """Coefficients of det(m - x I), highest degree first (leading (-1)^n)."""
    a = as_matrix(m)
    n = a.shape[0]
    if n <= 6:
        e = principal_minor_sums(a)
        monic = np.array([(-1) ** k * e[k] for k in range(n + 1)])
    else:
        monic = np.real(np.poly(eigenvalues(a).values))
    return (-1) ** n * monic


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    max_modulus_index: int

    @property
    def real_mask(self) -> np.ndarray:
        return is_real(self.values)

    @property
    def real_count(self) -> int:
        return int(np.count_nonzero(self.real_mask))

    @property
    def radius(self) -> float:
        return float(np.abs(self.values[self.max_modulus_index]))


def is_real(z, tol: float = REAL_TOL):
    z = np.asarray(z)
    return np.abs(z.imag) <= tol * (1.0 + np.abs(z.real))


def sort_eigenvalues(vals) -> np.ndarray:
    """Order by real part descending, then imaginary part descending."""
    vals = np.asarray(vals, dtype=np.complex128)
    order = np.lexsort((-vals.imag, -vals.real), axis=-1)
    return np.take_along_axis(vals, order, axis=-1)


def eigenvalues(m) -> Spectrum:
    """Eigenvalues, closed-form cubic at n=3 and LAPACK Hessenberg QR otherwise."""
    a = as_matrix(m)
    n = a.shape[0]
    if n == 1:
        vals = np.array([a[0, 0]], dtype=np.complex128)
    elif n == 3:
        vals = _kernels.eig3(np.ascontiguousarray(a))
    else:
        try:
            vals = np.linalg.eigvals(a).astype(np.complex128)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(str(exc)) from exc
    vals = sort_eigenvalues(vals)
    # snap rounding-level imaginary parts so real eigenvalues compare cleanly
    real = is_real(vals) & (np.abs(vals.imag) <= 1e-13 * (1.0 + np.abs(vals.real)))
    vals = np.where(real, vals.real + 0j, vals)
    return Spectrum(vals, int(np.argmax(np.abs(vals))))


def spectral_radius(m) -> float:
    return eigenvalues(m).radius


def diag_conjugate(d, m) -> np.ndarray:
    """D m D^{-1}: entry (i, j) becomes d_i m_ij / d_j."""
    a = as_matrix(m)
    d = np.asarray(d, dtype=float)
    if d.shape != (a.shape[0],):
        raise DimensionError("diagonal length does not match matrix")
    if np.any(d == 0):
        raise ZeroDiagonalError("diagonal conjugation needs nonzero entries")
    return d[:, None] * a / d[None, :]


def row_scale(u, m) -> np.ndarray:
    """U m for a nonnegative diagonal U."""
    a = as_matrix(m)
    u = np.asarray(u, dtype=float)
    if u.shape != (a.shape[0],):
        raise DimensionError("diagonal length does not match matrix")
    if np.any(u < 0):
        raise NegativeScaleError("row scaling needs nonnegative entries")
    return u[:, None] * a
