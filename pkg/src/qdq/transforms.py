"""Basis changes between dequantizer sets and the matching quantizer change.

New dequantizers ``V_j = sum_k L[j, k] U_k`` pair with quantizers
``E_j = sum_k M[j, k] D_k`` exactly when ``L @ M.T = I``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit
from .duality import DualPair, OperatorSet, certify, flatten_quantizers, pairing_matrix
from .errors import DegenerateTransform, DimensionMismatch, NotOrthonormalBase, Singular
from .matkit import DEFAULT_TOL, Tolerance

__all__ = [
    "TransformMatrix",
    "apply_transform",
    "find_transform",
    "find_transform_general",
    "quantizer_transform",
    "transform_pair",
]


@dataclass(frozen=True, eq=False)
class TransformMatrix:
    """Non-degenerate ``dim**2 x dim**2`` matrix ``L``."""

    dim: int
    L: np.ndarray

    def __post_init__(self):
        n = self.dim * self.dim
        mat = matkit.as_matrix(self.L).copy()
        if mat.shape != (n, n):
            raise DimensionMismatch(f"transform for dim {self.dim} must be {n}x{n}, got {mat.shape}")
        det = matkit.determinant(mat)
        if not abs(det) > matkit.singularity_threshold(mat):
            raise DegenerateTransform(f"transform is degenerate (|det L| = {abs(det):.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "L", mat)

    @classmethod
    def identity(cls, dim: int) -> "TransformMatrix":
        return cls(dim, np.eye(dim * dim, dtype=complex))

    @property
    def det(self) -> complex:
        return matkit.determinant(self.L)


def apply_transform(L: TransformMatrix, u: OperatorSet) -> OperatorSet:
    if L.dim != u.dim:
        raise DimensionMismatch(f"transform dim {L.dim} does not match set dim {u.dim}")
    return OperatorSet(u.dim, np.einsum("jk,kab->jab", L.L, u.ops), u.label and f"L*{u.label}")


def find_transform(v: OperatorSet, u: OperatorSet, tol: Tolerance = DEFAULT_TOL) -> TransformMatrix:
    """``L[j, k] = Tr(v[j] @ u[k])`` for an orthonormal reference set ``u``.

    Raises
    ------
    NotOrthonormalBase
        If the Gram matrix of ``u`` is not the identity within ``tol.abs_eps``.
    """
    if v.dim != u.dim:
        raise DimensionMismatch(f"sets have dims {v.dim} and {u.dim}")
    gram = pairing_matrix(u, u)
    dev = float(np.max(np.abs(gram - np.eye(len(u)))))
    if dev > tol.abs_eps:
        raise NotOrthonormalBase(f"reference set is not orthonormal (Gram deviation {dev:.3e})")
    return TransformMatrix(u.dim, pairing_matrix(v, u))


def find_transform_general(v: OperatorSet, u: OperatorSet, tol: Tolerance = DEFAULT_TOL) -> TransformMatrix:
    """Solve ``vec(v) = L vec(u)`` for an arbitrary minimal reference set ``u``."""
    if v.dim != u.dim:
        raise DimensionMismatch(f"sets have dims {v.dim} and {u.dim}")
    fu = flatten_quantizers(u)
    fv = flatten_quantizers(v)
    # L fu = fv  <=>  fu.T L.T = fv.T
    try:
        lt = matkit.solve_linear(fu.T, fv.T, tol)
    except Singular as exc:
        raise DegenerateTransform(f"reference set is not minimal: {exc}") from exc
    return TransformMatrix(u.dim, lt.T)


def quantizer_transform(
    L: TransformMatrix, tol: Tolerance = DEFAULT_TOL, method: str = "solve"
) -> TransformMatrix:
    """Companion ``M`` with ``L @ M.T = I``; ``method="cofactor"`` uses ``cof(L) / det(L)``."""
    if method == "solve":
        try:
            mt = matkit.solve_linear(L.L, np.eye(L.L.shape[0], dtype=complex), tol)
        except Singular as exc:
            raise DegenerateTransform(str(exc)) from exc
        return TransformMatrix(L.dim, mt.T)
    if method == "cofactor":
        return TransformMatrix(L.dim, matkit.cofactor_matrix(L.L) / L.det)
    raise ValueError(f"unknown method {method!r}")


def transform_pair(L: TransformMatrix, pair: DualPair, tol: Tolerance = DEFAULT_TOL) -> DualPair:
    """Move a certified pair to the basis ``V = L U`` and re-certify it."""
    m = quantizer_transform(L, tol)
    v = apply_transform(L, pair.dequantizers)
    e = apply_transform(m, pair.quantizers)
    return certify(v, e, pair.certified_eps, slack=10.0)
