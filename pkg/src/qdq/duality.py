"""Operator sets, their flattened matrices, and the dequantizer/quantizer duality.

A minimal set for a ``d``-level system holds ``d**2`` linearly independent
``d x d`` operators.  Stacking the transposed dequantizers row-wise gives the
matrix ``A`` and stacking the quantizers gives ``B``; the duality condition
``Tr(U_k D_k') = delta_kk'`` then reads ``A @ B.T = I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matkit
from .errors import CertificationFailed, DimensionMismatch, Singular, SingularSet
from .matkit import DEFAULT_TOL, Tolerance

__all__ = [
    "OperatorSet",
    "DualPair",
    "MinimalityReport",
    "DualityReport",
    "flatten_dequantizers",
    "flatten_quantizers",
    "unflatten_quantizers",
    "check_minimal",
    "solve_quantizers",
    "pairing_matrix",
    "verify_duality",
    "certify",
]

NEAR_SINGULAR = 1e-6


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """An ordered list of ``dim**2`` operators of size ``dim x dim``.

    ``ops`` is stored as a read-only array of shape ``(dim**2, dim, dim)``.
    Indices are 0-based here; user-facing output numbers them from 1.
    """

    dim: int
    ops: np.ndarray
    label: str | None = None

    def __post_init__(self):
        ops = np.array(self.ops, dtype=complex)
        d = int(self.dim)
        if d < 1:
            raise ValueError("dim must be positive")
        if ops.shape != (d * d, d, d):
            raise DimensionMismatch(
                f"expected {d * d} operators of shape {d}x{d}, got array of shape {ops.shape}"
            )
        if not np.all(np.isfinite(ops)):
            raise ValueError("operator set contains non-finite entries")
        ops.setflags(write=False)
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_matrices(cls, matrices: Sequence, label: str | None = None) -> "OperatorSet":
        ops = np.array([matkit.as_matrix(m) for m in matrices])
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
            raise DimensionMismatch("operators must be square and share one size")
        return cls(ops.shape[1], ops, label)

    def __len__(self) -> int:
        return self.ops.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.ops[k]

    def __iter__(self):
        return iter(self.ops)

    def with_label(self, label: str | None) -> "OperatorSet":
        return OperatorSet(self.dim, self.ops, label)

    def allclose(self, other: "OperatorSet", atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.max(np.abs(self.ops - other.ops)) <= atol)


@dataclass(frozen=True, eq=False)
class DualPair:
    """Dequantizers with a matching set of quantizers.

    Construction only checks that dimensions agree; the functions that
    produce pairs (:func:`solve_quantizers`, :func:`certify`) are the ones
    that establish ``pairing_matrix == I`` within ``certified_eps``.
    """

    dequantizers: OperatorSet
    quantizers: OperatorSet
    certified_eps: float = DEFAULT_TOL.abs_eps

    def __post_init__(self):
        if self.dequantizers.dim != self.quantizers.dim:
            raise DimensionMismatch(
                f"dequantizers have dim {self.dequantizers.dim}, quantizers {self.quantizers.dim}"
            )

    @property
    def dim(self) -> int:
        return self.dequantizers.dim

    @property
    def is_self_dual(self) -> bool:
        return self.dequantizers.allclose(self.quantizers, atol=self.certified_eps)


@dataclass(frozen=True)
class MinimalityReport:
    is_minimal: bool
    det_A: complex
    condition_estimate: float
    near_singular: bool = False


@dataclass(frozen=True)
class DualityReport:
    max_deviation: float
    passed: bool
    det_product: complex
    det_product_deviation: float
    eps: float


def _vectorize_rows(ops: np.ndarray) -> np.ndarray:
    return ops.reshape(ops.shape[0], -1).copy()


def flatten_dequantizers(u: OperatorSet) -> np.ndarray:
    """Row ``k`` is the row-major vectorization of ``u[k].T``.

    For qubits a row reads ``(U11, U21, U12, U22)``.
    """
    return _vectorize_rows(np.transpose(u.ops, (0, 2, 1)))


def flatten_quantizers(d: OperatorSet) -> np.ndarray:
    """Row ``k`` is the row-major vectorization of ``d[k]``: ``(D11, D12, D21, D22)`` for qubits."""
    return _vectorize_rows(d.ops)


def unflatten_quantizers(b: np.ndarray, dim: int, label: str | None = None) -> OperatorSet:
    return OperatorSet(dim, np.asarray(b).reshape(dim * dim, dim, dim), label)


def check_minimal(u: OperatorSet, tol: Tolerance = DEFAULT_TOL) -> MinimalityReport:
    a = flatten_dequantizers(u)
    det_a = matkit.determinant(a)
    n = a.shape[0]
    scale = matkit.max_abs(a)
    threshold = matkit.singularity_threshold(a, tol) if scale > 0 else 0.0
    is_minimal = scale > 0 and abs(det_a) > threshold
    if not is_minimal:
        return MinimalityReport(False, det_a, float("inf"), near_singular=False)
    try:
        a_inv = matkit.inverse(a, tol)
    except Singular:
        return MinimalityReport(False, det_a, float("inf"), near_singular=False)
    cond = scale * matkit.max_abs(a_inv)
    near = abs(det_a) < NEAR_SINGULAR * scale**n
    return MinimalityReport(True, det_a, cond, near_singular=near)


def pairing_matrix(u: OperatorSet, d: OperatorSet) -> np.ndarray:
    """``G[k, k'] = Tr(u[k] @ d[k'])``."""
    if u.dim != d.dim or len(u) != len(d):
        raise DimensionMismatch(f"cannot pair sets of dim {u.dim} and {d.dim}")
    return np.einsum("kij,lji->kl", u.ops, d.ops)


def _deviation(u: OperatorSet, d: OperatorSet) -> float:
    g = pairing_matrix(u, d)
    return float(np.max(np.abs(g - np.eye(g.shape[0]))))


def certify(
    dequantizers: OperatorSet,
    quantizers: OperatorSet,
    eps: float = DEFAULT_TOL.abs_eps,
    slack: float = 1.0,
) -> DualPair:
    """Wrap a pair after checking that its pairing matrix is the identity.

    The pair is accepted at ``eps`` when possible, otherwise at
    ``slack * eps``; anything worse raises :class:`CertificationFailed`.
    """
    dev = _deviation(dequantizers, quantizers)
    if dev <= eps:
        return DualPair(dequantizers, quantizers, eps)
    if dev <= slack * eps:
        return DualPair(dequantizers, quantizers, slack * eps)
    raise CertificationFailed(
        f"pairing matrix deviates from identity by {dev:.3e} (allowed {slack * eps:.3e})"
    )


def solve_quantizers(
    u: OperatorSet,
    tol: Tolerance = DEFAULT_TOL,
    method: str = "solve",
) -> DualPair:
    """Find the quantizers dual to the dequantizers ``u``.

    Parameters
    ----------
    u:
        A minimal set of dequantizers.
    tol:
        Singularity and certification thresholds.
    method:
        ``"solve"`` inverts ``A`` by pivoted elimination; ``"cofactor"`` uses
        ``B = cof(A) / det(A)`` directly (only sensible for small ``d``).

    Raises
    ------
    SingularSet
        If ``u`` is not linearly independent.
    """
    report = check_minimal(u, tol)
    if not report.is_minimal:
        raise SingularSet(f"dequantizer set is not minimal (|det A| = {abs(report.det_A):.3e})")
    a = flatten_dequantizers(u)
    if method == "solve":
        try:
            b = matkit.solve_linear(a, np.eye(a.shape[0], dtype=complex), tol).T
        except Singular as exc:
            raise SingularSet(str(exc)) from exc
    elif method == "cofactor":
        b = matkit.cofactor_matrix(a) / report.det_A
    else:
        raise ValueError(f"unknown method {method!r}")

    label = f"dual({u.label})" if u.label else None
    d = unflatten_quantizers(b, u.dim, label)
    return certify(u, d, tol.abs_eps, slack=10.0)


def verify_duality(pair: DualPair, tol: Tolerance = DEFAULT_TOL) -> DualityReport:
    dev = _deviation(pair.dequantizers, pair.quantizers)
    det_a = matkit.determinant(flatten_dequantizers(pair.dequantizers))
    det_b = matkit.determinant(flatten_quantizers(pair.quantizers))
    prod = det_a * det_b
    return DualityReport(
        max_deviation=dev,
        passed=dev <= tol.abs_eps,
        det_product=prod,
        det_product_deviation=abs(prod - 1.0),
        eps=tol.abs_eps,
    )
