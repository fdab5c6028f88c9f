"""Minimal sets for composite systems built from tensor products."""

from __future__ import annotations

import numpy as np

from .duality import DualPair, OperatorSet, certify

__all__ = ["tensor_sets", "tensor_pair", "parameter_count"]


def tensor_sets(a: OperatorSet, b: OperatorSet) -> OperatorSet:
    """All ``kron(a[i], b[j])`` ordered with ``i`` major and ``j`` minor."""
    d = a.dim * b.dim
    ops = np.einsum("iab,jcd->ijacbd", a.ops, b.ops).reshape(len(a) * len(b), d, d)
    label = f"{a.label}(x){b.label}" if a.label and b.label else None
    return OperatorSet(d, ops, label)


def tensor_pair(a: DualPair, b: DualPair) -> DualPair:
    """Tensor two certified pairs; the result is certified at up to 10x the looser input bound."""
    eps = max(a.certified_eps, b.certified_eps)
    return certify(
        tensor_sets(a.dequantizers, b.dequantizers),
        tensor_sets(a.quantizers, b.quantizers),
        eps,
        slack=10.0,
    )


def parameter_count(d: int) -> tuple[int, int]:
    """Real parameters and orthonormality equations for a self-dual set in dimension ``d``.

    Returns ``(d**4, d**2 (d**2 + 1) / 2)``.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return d**4, d * d * (d * d + 1) // 2
