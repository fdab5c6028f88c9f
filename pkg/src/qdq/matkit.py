"""Small dense complex-matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Everything
here is a pure function; inputs are never modified.  The elimination
routines (:func:`determinant`, :func:`solve_linear`) are written out with
partial pivoting so that the singularity threshold is under our control,
and :func:`cofactor_matrix` is kept as an independent route to the inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonSquare, Singular

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "trace",
    "matmul",
    "adjoint",
    "transpose",
    "determinant",
    "singularity_threshold",
    "solve_linear",
    "inverse",
    "cofactor_matrix",
    "kron",
    "trace_pairing",
    "is_hermitian",
    "max_abs",
]


@dataclass(frozen=True)
class Tolerance:
    abs_eps: float = 1e-10
    det_eps: float = 1e-12

    def __post_init__(self):
        for name in ("abs_eps", "det_eps"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex array, rejecting NaN and Inf entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("matrix must have at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains non-finite entries")
    return arr


def _square(m) -> np.ndarray:
    arr = as_matrix(m)
    if arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"matrix of shape {arr.shape} is not square")
    return arr


def trace(m) -> complex:
    return complex(np.trace(_square(m)))


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def transpose(m) -> np.ndarray:
    return as_matrix(m).T.copy()


def _pow2_scale(z, e: int):
    return np.ldexp(np.real(z), e) + 1j * np.ldexp(np.imag(z), e)


def _divide(x: np.ndarray, pivot: complex) -> np.ndarray:
    """``x / pivot`` that survives subnormal pivots.

    Complex division squares the denominator, which underflows to zero for
    pivots near 1e-160 and below.  Rescaling numerator and pivot by the same
    power of two is exact, and partial pivoting keeps ``|x| <= |pivot|``.
    """
    magnitude = abs(pivot)
    if magnitude > 1e-150:
        return x / pivot
    e = int(np.frexp(magnitude)[1])
    return _pow2_scale(x, -e) / _pow2_scale(pivot, -e)


def _lu(a: np.ndarray):
    """In-place style LU with partial pivoting on a copy of ``a``.

    Returns ``(lu, perm, sign)`` where ``lu`` packs unit-lower and upper
    factors, ``perm`` is the row permutation and ``sign`` its parity.  A zero
    pivot leaves the remaining columns untouched; callers detect it through
    the diagonal.
    """
    lu = a.astype(complex, copy=True)
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        pivot = lu[k, k]
        if pivot == 0:
            continue
        lu[k + 1:, k] = _divide(lu[k + 1:, k], pivot)
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, sign


def _normalized(a: np.ndarray) -> tuple[np.ndarray, float]:
    """``a`` divided by its largest entry magnitude, component by component."""
    scale = float(np.max(np.abs(a)))
    if scale == 0:
        return a, 0.0
    # complex division by a subnormal scale overflows; real division does not
    return a.real / scale + 1j * (a.imag / scale), scale


def determinant(m) -> complex:
    a = _square(m)
    unit, scale = _normalized(a)
    if scale == 0:
        return 0j
    # eliminate on the normalized matrix so subnormal or huge entries stay finite
    lu, _, sign = _lu(unit)
    return complex(sign * np.prod(np.diag(lu)) * scale ** a.shape[0])


def singularity_threshold(m, tol: Tolerance = DEFAULT_TOL) -> float:
    """``det_eps * scale**n`` with ``scale`` the largest entry magnitude of ``m``."""
    a = _square(m)
    scale = float(np.max(np.abs(a)))
    return tol.det_eps * scale ** a.shape[0]


def solve_linear(a, rhs, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Solve ``a @ X = rhs`` by pivoted elimination.

    Raises :class:`Singular` when ``|det a|`` does not exceed
    :func:`singularity_threshold`.
    """
    a = _square(a)
    rhs = as_matrix(rhs)
    n = a.shape[0]
    if rhs.shape[0] != n:
        raise DimensionMismatch(f"rhs has {rhs.shape[0]} rows, expected {n}")
    unit, scale = _normalized(a)
    if scale == 0:
        raise Singular("matrix is zero")
    lu, perm, sign = _lu(unit)
    diag = np.diag(lu)
    # |det(a / scale)| against det_eps is the scale-free form of det_eps * scale**n
    unit_det = abs(sign * np.prod(diag))
    if np.any(diag == 0) or not unit_det > tol.det_eps:
        raise Singular(f"matrix is singular (|det| = {unit_det * scale**n:.3e})")

    x = rhs[perm].astype(complex, copy=True)
    x = x.real / scale + 1j * (x.imag / scale)
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def inverse(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    a = _square(m)
    return solve_linear(a, np.eye(a.shape[0], dtype=complex), tol)


def cofactor_matrix(m) -> np.ndarray:
    """Signed minors ``C[i, j] = (-1)**(i+j) det(minor(m, i, j))``.

    Satisfies ``m @ C.T == det(m) * I``.
    """
    a = _square(m)
    n = a.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    out = np.empty_like(a)
    rows = np.arange(n)
    for i in range(n):
        keep_r = rows != i
        for j in range(n):
            minor = a[keep_r][:, rows != j]
            out[i, j] = (-1) ** (i + j) * determinant(minor)
    return out


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def trace_pairing(a, b) -> complex:
    """``Tr(a @ b)`` with no conjugation."""
    a, b = _square(a), _square(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot pair {a.shape} with {b.shape}")
    # Tr(ab) = sum_ij a_ij b_ji, without forming the product
    return complex(np.sum(a * b.T))


def is_hermitian(m, eps: float = 1e-13) -> bool:
    a = _square(m)
    return bool(np.max(np.abs(a - a.conj().T)) <= eps)


def max_abs(m) -> float:
    return float(np.max(np.abs(np.asarray(m))))
