"""Independent oracles and random generators shared by the tests.

Nothing here calls into the elimination or cofactor code under test; the
oracles use brute-force Laplace expansion, numpy's LAPACK routines, or
closed forms typed in by hand.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

S2, S3, S6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)
I = 1j


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def laplace_det(m) -> complex:
    """Determinant by the permutation sum; fine up to 6x6 or so."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inversions
        for i, p in enumerate(perm):
            term = term * m[i, p]
        total += term
    return total


def numpy_cofactor(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    out = np.empty_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            out[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


def qubit_quantizers_by_cofactors(u_ops) -> np.ndarray:
    """Qubit quantizers written out entry by entry from the cofactors of A.

    ``D^(k)_11 = C[k,1]/det A``, ``D^(k)_12 = C[k,2]/det A``,
    ``D^(k)_21 = C[k,3]/det A``, ``D^(k)_22 = C[k,4]/det A`` where A has rows
    ``(U11, U21, U12, U22)``.  Minors are 3x3 determinants by Laplace expansion.
    """
    u_ops = np.asarray(u_ops, dtype=complex)
    a = np.array([[u[0, 0], u[1, 0], u[0, 1], u[1, 1]] for u in u_ops])
    det_a = laplace_det(a)
    out = np.empty((4, 2, 2), dtype=complex)
    for k in range(4):
        cof = []
        for j in range(4):
            minor = np.delete(np.delete(a, k, axis=0), j, axis=1)
            cof.append((-1) ** (k + j) * laplace_det(minor))
        out[k] = np.array([[cof[0], cof[1]], [cof[2], cof[3]]]) / det_a
    return out


def gram(ops_a, ops_b=None) -> np.ndarray:
    """``Tr(a_k b_k')`` by explicit matrix products."""
    ops_b = ops_a if ops_b is None else ops_b
    return np.array([[np.trace(x @ y) for y in ops_b] for x in ops_a])


def max_dev(x, y) -> float:
    return float(np.max(np.abs(np.asarray(x) - np.asarray(y))))


def localized_residual(actual, expected, tol: float) -> str:
    """Name every entry (1-based) that misses its golden value, plus the full residual."""
    actual, expected = np.asarray(actual), np.asarray(expected)
    res = actual - expected
    bad = [
        f"({j + 1},{k + 1}): got {actual[j, k]:.15g}, expected {expected[j, k]:.15g}"
        for j, k in zip(*np.nonzero(np.abs(res) > tol))
    ]
    if not bad:
        return ""
    with np.printoptions(precision=3, linewidth=140):
        return "entries off: " + "; ".join(bad) + f"\nresidual:\n{res}"


# ---------------------------------------------------------------------------
# golden values as closed-form constants
# ---------------------------------------------------------------------------

def h(a, b, c, d):
    return np.array([[a, b - I * c], [b + I * c, d]])


GOLDEN_SETS = {
    "family1-paper": [
        h(1, 0, 0, 0),
        np.array([[0, 2 - I], [2 + I, -S6]]) / 4,
        np.array([[0, 2 + I], [2 - I, S6]]) / 4,
        np.array([[0, -I * S6], [I * S6, 2]]) / 4,
    ],
    "family2-paper": [
        h(1, 0, 0, 0),
        -1 / (2 * S2) * np.array([[0, S3 + I], [S3 - I, 0]]),
        1 / S6 * np.array([[0, (1 - I * S3) / 2], [(1 + I * S3) / 2, -2]]),
        1 / S3 * np.array([[0, (1 - I * S3) / 2], [(1 + I * S3) / 2, 1]]),
    ],
    "family3-paper": [
        h(1, 0, 0, 0),
        -0.5 * np.array([[0, 1 + I], [1 - I, 0]]),
        0.5 * np.array([[0, 1 - I], [1 + I, 0]]),
        h(0, 0, 0, 1),
    ],
    "wigner-aam": [
        np.array([[1, (1 - I) / 2], [(1 + I) / 2, 0]]) / S2,
        np.array([[1, (-1 + I) / 2], [(-1 - I) / 2, 0]]) / S2,
        np.array([[0, (1 + I) / 2], [(1 - I) / 2, 1]]) / S2,
        np.array([[0, (-1 - I) / 2], [(-1 + I) / 2, 1]]) / S2,
    ],
    "wigner-erl": [
        np.array([[0, 1 + I], [1 - I, 2]]) / 4,
        np.array([[2, 1 - I], [1 + I, 0]]) / 4,
        np.array([[0, -1 - I], [-1 + I, 2]]) / 4,
        np.array([[2, -1 + I], [-1 - I, 0]]) / 4,
    ],
}

GOLDEN_L = {
    ("wigner-aam", "family1-paper"): np.array([
        [4, 3, 1, S6],
        [4, -3, -1, -S6],
        [0, 1 - S6, S6 + 3, 2 - S6],
        [0, -S6 - 1, S6 - 3, S6 + 2],
    ]) / 2**2.5,
    ("wigner-aam", "family2-paper"): np.array([
        [2 * S6, S3 - 3, S3 + 1, S2 * (S3 + 1)],
        [2 * S6, 3 - S3, -S3 - 1, -S2 * (S3 + 1)],
        [0, -S3 - 3, -S3 - 3, S2 * (3 - S3)],
        [0, S3 + 3, S3 - 5, S2 * (S3 + 1)],
    ]) / (4 * S3),
    ("wigner-aam", "family3-paper"): np.array([
        [1, 0, 1, 0],
        [1, 0, -1, 0],
        [0, -1, 0, 1],
        [0, 1, 0, 1],
    ]) / S2,
    ("wigner-erl", "family3-paper"): np.array([
        [0, -1, 0, 1],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
        [1, 0, -1, 0],
    ]) / 2,
}


# ---------------------------------------------------------------------------
# random draws
# ---------------------------------------------------------------------------

def random_complex(rng, shape, radius=1.0):
    """Entries uniform in the disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(0, 1, shape))
    phi = rng.uniform(0, 2 * np.pi, shape)
    return r * np.exp(1j * phi)


def random_hermitian(rng, d=2, low=-1.0, high=1.0):
    re = rng.uniform(low, high, (d, d))
    im = rng.uniform(low, high, (d, d))
    m = np.triu(re) + 1j * np.triu(im, 1)
    m = m + np.triu(m, 1).conj().T
    return m


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


PAULI_ORTHONORMAL = np.array([
    np.eye(2),
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex) / S2


def random_orthonormal_hermitian_set(rng):
    """Real orthogonal mixing of the normalized Pauli basis."""
    o = random_orthogonal(rng, 4)
    return np.einsum("jk,kab->jab", o, PAULI_ORTHONORMAL)


def random_family1_values(rng):
    """Six off-diagonal parameters and the gamma sign of a family-1 set.

    For operators 2-4 the vectors ``(sqrt2 b, sqrt2 c, d)`` are orthonormal,
    so they are the rows of a 3x3 orthogonal matrix; a Haar-random one almost
    surely has every ``d`` nonzero.
    """
    o = random_orthogonal(rng, 3)
    b = o[:, 0] / S2
    c = o[:, 1] / S2
    d = o[:, 2]
    alpha2 = b[1] * b[2] + c[1] * c[2]
    gamma_sign = 1 if d[0] * alpha2 > 0 else -1
    values = dict(b2=b[0], c2=c[0], b3=b[1], c3=c[1], b4=b[2], c4=c[2])
    return values, gamma_sign, d
