"""Symbols of operators and the star product on symbols."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit
from .duality import DualPair, OperatorSet, pairing_matrix
from .errors import DimensionMismatch

__all__ = [
    "Symbol",
    "StarKernel",
    "symbol_of",
    "reconstruct",
    "star_direct",
    "build_star_kernel",
    "star_apply",
    "projection_check",
]


@dataclass(frozen=True, eq=False)
class Symbol:
    """Length ``dim**2`` complex vector of trace pairings.

    Values stay complex even when they are mathematically real so that any
    imaginary residue remains visible.
    """

    dim: int
    values: np.ndarray
    set_label: str | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).reshape(-1)
        if values.shape != (self.dim * self.dim,):
            raise DimensionMismatch(
                f"symbol for dim {self.dim} needs {self.dim**2} values, got {values.size}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, k: int) -> complex:
        return complex(self.values[k])

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.values.imag)))


@dataclass(frozen=True, eq=False)
class StarKernel:
    """Structure constants ``K[m, n, k] = Tr(D_m D_n U_k)``."""

    dim: int
    k3: np.ndarray

    def __post_init__(self):
        n = self.dim * self.dim
        k3 = np.array(self.k3, dtype=complex)
        if k3.shape != (n, n, n):
            raise DimensionMismatch(f"kernel for dim {self.dim} must have shape {(n, n, n)}")
        k3.setflags(write=False)
        object.__setattr__(self, "k3", k3)


def _check_operator(a, dim: int) -> np.ndarray:
    a = matkit.as_matrix(a)
    if a.shape != (dim, dim):
        raise DimensionMismatch(f"operator has shape {a.shape}, set has dim {dim}")
    return a


def symbol_of(a, u: OperatorSet) -> Symbol:
    """``f[k] = Tr(a @ u[k])``."""
    a = _check_operator(a, u.dim)
    values = np.einsum("ij,kji->k", a, u.ops)
    return Symbol(u.dim, values, u.label)


def reconstruct(f: Symbol, d: OperatorSet) -> np.ndarray:
    """Sum of quantizers weighted by the symbol values."""
    if f.dim != d.dim:
        raise DimensionMismatch(f"symbol dim {f.dim} does not match set dim {d.dim}")
    return np.einsum("k,kij->ij", f.values, d.ops)


def star_direct(a, b, u: OperatorSet) -> Symbol:
    a = _check_operator(a, u.dim)
    b = _check_operator(b, u.dim)
    return symbol_of(matkit.matmul(a, b), u)


def build_star_kernel(pair: DualPair) -> StarKernel:
    d_ops = pair.quantizers.ops
    u_ops = pair.dequantizers.ops
    products = np.einsum("mij,njl->mnil", d_ops, d_ops)
    k3 = np.einsum("mnil,kli->mnk", products, u_ops)
    return StarKernel(pair.dim, k3)


def star_apply(fa: Symbol, fb: Symbol, kernel: StarKernel) -> Symbol:
    """Star product evaluated on symbols: ``out[k] = sum_mn fa[m] fb[n] K[m, n, k]``."""
    if not fa.dim == fb.dim == kernel.dim:
        raise DimensionMismatch(
            f"symbol dims {fa.dim}, {fb.dim} do not match kernel dim {kernel.dim}"
        )
    out = np.einsum("m,n,mnk->k", fa.values, fb.values, kernel.k3)
    return Symbol(kernel.dim, out, fa.set_label)


def projection_check(f: Symbol, pair: DualPair) -> float:
    """Max deviation between ``f`` and its image ``f'[k'] = sum_k f[k] Tr(D_k U_k')``.

    Zero for any symbol when the pair is exactly dual.
    """
    if f.dim != pair.dim:
        raise DimensionMismatch(f"symbol dim {f.dim} does not match pair dim {pair.dim}")
    g = pairing_matrix(pair.dequantizers, pair.quantizers)
    return float(np.max(np.abs(g @ f.values - f.values)))
