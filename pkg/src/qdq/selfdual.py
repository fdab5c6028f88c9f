"""Self-dual Hermitian minimal sets for a qubit.

Every member has the form ``[[a, b - i c], [b + i c, d]]``.  With the first
operator fixed to ``diag(1, 0)`` the others have ``a = 0`` and the remaining
orthonormality equations split into three families according to how many of
the lower-right entries ``d_2, d_3, d_4`` vanish:

* family 1: ``d_2 d_3 d_4 != 0``
* family 2: ``d_2 = 0``, ``d_3 d_4 != 0``
* family 3: ``d_2 = d_3 = 0``, ``d_4 != 0``

Signs that the closed forms leave open (the ``+-`` branches) are explicit
inputs; :func:`sign_combinations` enumerates them for sweeps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from . import matkit
from .duality import OperatorSet, pairing_matrix
from .errors import InfeasibleParams, NoRealSolution, UnknownPreset
from .matkit import DEFAULT_TOL, Tolerance

__all__ = [
    "HermitianParam",
    "Family1Params",
    "Family2Params",
    "Family3Params",
    "SelfDualReport",
    "FAMILY1_NAMES",
    "PRESET_NAMES",
    "pairwise_form",
    "family1_build",
    "family1_residuals",
    "family1_solve",
    "family2_build",
    "family3_build",
    "preset",
    "validate_selfdual",
    "sign_combinations",
]

FAMILY1_NAMES = ("b2", "c2", "b3", "c3", "b4", "c4")

# normalization residual allowed when validating family-1 parameters
_NORM_EPS = 1e-10
# below this an alpha or denominator counts as zero
_ZERO = 1e-14
_BOUNDARY_ROUNDING = 4 * np.finfo(float).eps


class HermitianParam(NamedTuple):
    a: float
    b: float
    c: float
    d: float

    def matrix(self) -> np.ndarray:
        a, b, c, d = self
        return np.array([[a, b - 1j * c], [b + 1j * c, d]], dtype=complex)


def pairwise_form(p: HermitianParam, q: HermitianParam) -> float:
    """``a_p a_q + d_p d_q + 2 (b_p b_q + c_p c_q)``, i.e. ``Tr(P Q)`` for the two matrices."""
    return p.a * q.a + p.d * q.d + 2.0 * (p.b * q.b + p.c * q.c)


def sign_combinations(n: int = 3):
    """All ``2**n`` tuples of ``+1``/``-1``."""
    return list(itertools.product((1, -1), repeat=n))


def _check_sign(name: str, value) -> int:
    if value not in (1, -1):
        raise InfeasibleParams(f"{name} must be +1 or -1, got {value!r}", field=name)
    return int(value)


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise InfeasibleParams(f"{name} is not finite", field=name)


def _assemble(params: list[HermitianParam], label: str) -> OperatorSet:
    return OperatorSet.from_matrices([p.matrix() for p in params], label=label)


def _gram_deviation(u: OperatorSet) -> float:
    g = pairing_matrix(u, u)
    return float(np.max(np.abs(g - np.eye(len(u)))))


def _ensure_orthonormal(u: OperatorSet, eps: float, field: str) -> OperatorSet:
    dev = _gram_deviation(u)
    if not dev <= eps:
        raise InfeasibleParams(
            f"parameters are numerically degenerate (Gram deviation {dev:.3e})", field=field
        )
    return u


# ---------------------------------------------------------------------------
# family 1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family1Params:
    """Off-diagonal parameters of operators 2-4 for the all-``d``-nonzero family.

    The lower-right entries follow as ``d_k = sqrt(2) * gamma / alpha_k`` with
    ``gamma = gamma_sign * sqrt(-alpha_2 alpha_3 alpha_4)``.
    """

    b2: float
    c2: float
    b3: float
    c3: float
    b4: float
    c4: float
    gamma_sign: int = 1

    @property
    def alphas(self) -> tuple[float, float, float]:
        return (
            self.b3 * self.b4 + self.c3 * self.c4,
            self.b2 * self.b4 + self.c2 * self.c4,
            self.b2 * self.b3 + self.c2 * self.c3,
        )

    @property
    def gamma(self) -> float:
        a2, a3, a4 = self.alphas
        return self.gamma_sign * math.sqrt(max(-(a2 * a3 * a4), 0.0))

    @property
    def diagonals(self) -> tuple[float, float, float]:
        g = self.gamma
        return tuple(math.sqrt(2.0) * g / a for a in self.alphas)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FAMILY1_NAMES}

    def residuals(self) -> np.ndarray:
        return family1_residuals(self.as_dict())

    def validate(self, eps: float = _NORM_EPS) -> None:
        _check_finite(**self.as_dict())
        _check_sign("gamma_sign", self.gamma_sign)
        for k, a in zip((2, 3, 4), self.alphas):
            if abs(a) <= _ZERO:
                raise InfeasibleParams(f"alpha_{k} vanishes", field=f"alpha{k}")
        a2, a3, a4 = self.alphas
        if not a2 * a3 * a4 < 0:
            raise InfeasibleParams("alpha_2 alpha_3 alpha_4 must be negative", field="alpha")
        res = self.residuals()
        worst = int(np.argmax(np.abs(res)))
        if not abs(res[worst]) <= eps:
            raise InfeasibleParams(
                f"normalization of operator {worst + 2} violated by {abs(res[worst]):.3e}",
                field=f"norm{worst + 2}",
            )


def family1_residuals(p: Mapping[str, float]) -> np.ndarray:
    """Normalization residuals ``2 gamma^2 / alpha_k^2 + 2 b_k^2 + 2 c_k^2 - 1`` for ``k = 2, 3, 4``.

    ``gamma^2`` is written as ``-alpha_2 alpha_3 alpha_4`` so the residual is a
    rational function of the six parameters.
    """
    b = {k: p[f"b{k}"] for k in (2, 3, 4)}
    c = {k: p[f"c{k}"] for k in (2, 3, 4)}
    alpha = {
        2: b[3] * b[4] + c[3] * c[4],
        3: b[2] * b[4] + c[2] * c[4],
        4: b[2] * b[3] + c[2] * c[3],
    }
    out = []
    for k, (i, j) in ((2, (3, 4)), (3, (2, 4)), (4, (2, 3))):
        out.append(-2.0 * alpha[i] * alpha[j] / alpha[k] + 2.0 * (b[k] ** 2 + c[k] ** 2) - 1.0)
    return np.array(out)


def _family1_poly(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Denominator-free residuals ``alpha_k * r_k`` and their Jacobian.

    Multiplying each normalization residual by its ``alpha_k`` removes the
    poles, which keeps Newton from wandering off towards ``alpha_k = 0``.
    Spurious roots with a vanishing ``alpha`` are rejected by validation.
    """
    b2, c2, b3, c3, b4, c4 = x
    alpha = {2: b3 * b4 + c3 * c4, 3: b2 * b4 + c2 * c4, 4: b2 * b3 + c2 * c3}
    dalpha = {
        2: np.array([0, 0, b4, c4, b3, c3]),
        3: np.array([b4, c4, 0, 0, b2, c2]),
        4: np.array([b3, c3, b2, c2, 0, 0]),
    }
    res = np.zeros(3)
    jac = np.zeros((3, 6))
    for row, (k, (i, j)) in enumerate(((2, (3, 4)), (3, (2, 4)), (4, (2, 3)))):
        bi, ci = 2 * (k - 2), 2 * (k - 2) + 1
        norm = 2 * x[bi] ** 2 + 2 * x[ci] ** 2 - 1
        res[row] = -2 * alpha[i] * alpha[j] + alpha[k] * norm
        jac[row] = -2 * (dalpha[i] * alpha[j] + alpha[i] * dalpha[j]) + dalpha[k] * norm
        jac[row, bi] += 4 * alpha[k] * x[bi]
        jac[row, ci] += 4 * alpha[k] * x[ci]
    return res, jac


def family1_build(params: Family1Params, eps: float = _NORM_EPS) -> OperatorSet:
    params.validate(eps)
    d2, d3, d4 = params.diagonals
    p = params
    return _assemble(
        [
            HermitianParam(1.0, 0.0, 0.0, 0.0),
            HermitianParam(0.0, p.b2, p.c2, d2),
            HermitianParam(0.0, p.b3, p.c3, d3),
            HermitianParam(0.0, p.b4, p.c4, d4),
        ],
        label="family1",
    )


def _newton(x0, free_mask, x_fixed, max_iter=100, tol=1e-12):
    """Damped Newton on the unknown entries of ``x``; ``None`` if it stalls.

    The step is the minimum-norm least-squares solution of ``J dx = -r`` so a
    rank-deficient Jacobian (roots are often double) does not stop the
    iteration.  The step length is halved until ``|r|`` decreases.
    Convergence is judged on the original normalization residuals.
    """
    x = x_fixed.copy()
    x[~free_mask] = x0
    r, jac = _family1_poly(x)
    norm = np.linalg.norm(r)
    for _ in range(max_iter):
        with np.errstate(all="ignore"):
            true_res = family1_residuals(dict(zip(FAMILY1_NAMES, x)))
        if np.all(np.isfinite(true_res)) and np.max(np.abs(true_res)) < tol:
            return x
        step = np.linalg.lstsq(jac[:, ~free_mask], -r, rcond=1e-13)[0]
        lam = 1.0
        while lam > 1e-8:
            trial = x.copy()
            trial[~free_mask] += lam * step
            r_trial, jac_trial = _family1_poly(trial)
            n_trial = np.linalg.norm(r_trial)
            if n_trial < norm:
                x, r, jac, norm = trial, r_trial, jac_trial, n_trial
                break
            lam *= 0.5
        else:
            return None
    return None


def family1_solve(free: Mapping[str, float], gamma_sign: int = 1) -> Family1Params:
    """Solve the three family-1 normalization equations for the non-free parameters.

    ``free`` maps exactly three of ``b2, c2, b3, c3, b4, c4`` to values; the
    other three are found by damped Newton iteration started from the eight
    sign orthants ``(+-1/2, +-1/2, +-1/2)`` in a fixed order.  The first root
    that passes :meth:`Family1Params.validate` is returned.

    Raises
    ------
    NoRealSolution
        If no seed converges to a feasible root.
    """
    unknown = set(free) - set(FAMILY1_NAMES)
    if unknown:
        raise InfeasibleParams(f"unknown parameter(s) {sorted(unknown)}", field=sorted(unknown)[0])
    if len(free) != 3:
        raise InfeasibleParams("exactly three parameters must be given", field="free")
    _check_finite(**{k: float(v) for k, v in free.items()})
    _check_sign("gamma_sign", gamma_sign)

    for k in (2, 3, 4):
        bk, ck = free.get(f"b{k}"), free.get(f"c{k}")
        if bk is not None and ck is not None and 2 * bk**2 + 2 * ck**2 >= 1:
            raise NoRealSolution(
                f"2 b{k}^2 + 2 c{k}^2 >= 1 leaves no room for d{k}", field=f"b{k}"
            )

    free_mask = np.array([name in free for name in FAMILY1_NAMES])
    x_fixed = np.array([float(free.get(name, 0.0)) for name in FAMILY1_NAMES])
    for signs in itertools.product((1, -1), repeat=3):
        root = _newton(0.5 * np.array(signs, dtype=float), free_mask, x_fixed)
        if root is None:
            continue
        params = Family1Params(*map(float, root), gamma_sign=gamma_sign)
        try:
            params.validate(eps=1e-12)
        except InfeasibleParams:
            continue
        return params
    raise NoRealSolution("no feasible real root found from any seed", field="free")


# ---------------------------------------------------------------------------
# family 2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family2Params:
    c2: float
    c3: float
    sign_b4: int = 1
    sign_c4: int = 1
    sign_d4: int = 1

    def validate(self) -> None:
        _check_finite(c2=self.c2, c3=self.c3)
        for name in ("sign_b4", "sign_c4", "sign_d4"):
            _check_sign(name, getattr(self, name))
        if self.c2 == 0:
            raise InfeasibleParams("c2 must be nonzero", field="c2")
        if self.c3 == 0:
            raise InfeasibleParams("c3 must be nonzero", field="c3")
        if not 2 * self.c2**2 < 1:
            raise InfeasibleParams("2 c2^2 must be below 1", field="c2")
        if not 2 * self.c2**2 + 2 * self.c3**2 < 1:
            raise InfeasibleParams("2 c2^2 + 2 c3^2 must be below 1", field="c3")

    def derived(self) -> dict[str, float]:
        """All remaining entries: ``b2, b3, b4, c4, d3, d4``."""
        self.validate()
        c2, c3 = self.c2, self.c3
        rest = 1.0 - 2 * c2**2
        c4 = self.sign_c4 * math.sqrt((1.0 - 2 * c3**2 - 2 * c2**2) / 2.0)
        b4 = self.sign_b4 * c2 * math.sqrt((1.0 - 2 * c3**2 - 2 * c2**2) / rest)
        d4 = self.sign_d4 * math.sqrt(2.0) * c3 / math.sqrt(rest)
        if abs(b4) <= _ZERO or abs(c4) <= _ZERO:
            raise InfeasibleParams("b4 or c4 vanishes at these parameters", field="c3")
        b2 = -c2 * c4 / b4
        b3 = b4 * c3 / c4
        d3 = -2.0 * c3 / (c4 * d4) * (b4**2 + c4**2)
        return {"b2": b2, "b3": b3, "b4": b4, "c4": c4, "d3": d3, "d4": d4}


def family2_build(params: Family2Params, tol: Tolerance = DEFAULT_TOL) -> OperatorSet:
    v = params.derived()
    u = _assemble(
        [
            HermitianParam(1.0, 0.0, 0.0, 0.0),
            HermitianParam(0.0, v["b2"], params.c2, 0.0),
            HermitianParam(0.0, v["b3"], params.c3, v["d3"]),
            HermitianParam(0.0, v["b4"], v["c4"], v["d4"]),
        ],
        label="family2",
    )
    return _ensure_orthonormal(u, tol.abs_eps, field="c3")


# ---------------------------------------------------------------------------
# family 3
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family3Params:
    b3: float
    sign_c2: int = 1
    sign_c3: int = 1
    sign_d4: int = 1

    def validate(self) -> None:
        _check_finite(b3=self.b3)
        for name in ("sign_c2", "sign_c3", "sign_d4"):
            _check_sign(name, getattr(self, name))
        if self.b3 == 0:
            raise InfeasibleParams("b3 must be nonzero", field="b3")
        # the boundary |b3| = 1/sqrt(2) is allowed; allow for its rounding
        if 1.0 - 2 * self.b3**2 < -_BOUNDARY_ROUNDING:
            raise InfeasibleParams("|b3| must not exceed 1/sqrt(2)", field="b3")

    def derived(self) -> dict[str, float]:
        """``b2, c2, c3, d4``."""
        self.validate()
        b3 = self.b3
        c2 = self.sign_c2 * b3
        room = 1.0 - 2 * b3**2
        # inside the rounding band of the boundary the square root would turn
        # ~1e-16 of noise into ~1e-8 of c3
        if room <= _BOUNDARY_ROUNDING:
            room = 0.0
        c3 = self.sign_c3 * math.sqrt(room) / math.sqrt(2.0)
        return {"b2": -c2 * c3 / b3, "c2": c2, "c3": c3, "d4": float(self.sign_d4)}


def family3_build(params: Family3Params, tol: Tolerance = DEFAULT_TOL) -> OperatorSet:
    v = params.derived()
    u = _assemble(
        [
            HermitianParam(1.0, 0.0, 0.0, 0.0),
            HermitianParam(0.0, v["b2"], v["c2"], 0.0),
            HermitianParam(0.0, params.b3, v["c3"], 0.0),
            HermitianParam(0.0, 0.0, 0.0, v["d4"]),
        ],
        label="family3",
    )
    return _ensure_orthonormal(u, tol.abs_eps, field="b3")


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _family1_paper():
    s6 = math.sqrt(6.0)
    return [
        [[1, 0], [0, 0]],
        np.array([[0, 2 - 1j], [2 + 1j, -s6]]) / 4,
        np.array([[0, 2 + 1j], [2 - 1j, s6]]) / 4,
        np.array([[0, -1j * s6], [1j * s6, 2]]) / 4,
    ]


def _family2_paper():
    s2, s3, s6 = math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0)
    return [
        [[1, 0], [0, 0]],
        -1 / (2 * s2) * np.array([[0, s3 + 1j], [s3 - 1j, 0]]),
        1 / s6 * np.array([[0, (1 - 1j * s3) / 2], [(1 + 1j * s3) / 2, -2]]),
        1 / s3 * np.array([[0, (1 - 1j * s3) / 2], [(1 + 1j * s3) / 2, 1]]),
    ]


def _family3_paper():
    return [
        [[1, 0], [0, 0]],
        -0.5 * np.array([[0, 1 + 1j], [1 - 1j, 0]]),
        0.5 * np.array([[0, 1 - 1j], [1 + 1j, 0]]),
        [[0, 0], [0, 1]],
    ]


def _wigner_aam():
    r = 1 / math.sqrt(2.0)
    return [
        r * np.array([[1, (1 - 1j) / 2], [(1 + 1j) / 2, 0]]),
        r * np.array([[1, (-1 + 1j) / 2], [(-1 - 1j) / 2, 0]]),
        r * np.array([[0, (1 + 1j) / 2], [(1 - 1j) / 2, 1]]),
        r * np.array([[0, (-1 - 1j) / 2], [(-1 + 1j) / 2, 1]]),
    ]


def _wigner_erl():
    # listed as D_-+, D_++, D_--, D_+-
    return [
        np.array([[0, 1 + 1j], [1 - 1j, 2]]) / 4,
        np.array([[2, 1 - 1j], [1 + 1j, 0]]) / 4,
        np.array([[0, -1 - 1j], [-1 + 1j, 2]]) / 4,
        np.array([[2, -1 + 1j], [-1 - 1j, 0]]) / 4,
    ]


def _pauli_orthonormal():
    r = 1 / math.sqrt(2.0)
    return [
        r * np.eye(2),
        r * np.array([[0, 1], [1, 0]]),
        r * np.array([[0, -1j], [1j, 0]]),
        r * np.array([[1, 0], [0, -1]]),
    ]


def _matrix_units():
    return [
        [[1, 0], [0, 0]],
        [[0, 0], [0, 1]],
        [[0, 1], [0, 0]],
        [[0, 0], [1, 0]],
    ]


_PRESETS = {
    "family1-paper": _family1_paper,
    "family2-paper": _family2_paper,
    "family3-paper": _family3_paper,
    "wigner-aam": _wigner_aam,
    "wigner-erl": _wigner_erl,
    "pauli-orthonormal": _pauli_orthonormal,
    "matrix-units": _matrix_units,
}

PRESET_NAMES = tuple(_PRESETS)
PAPER_PRESETS = PRESET_NAMES[:5]


def preset(name: str) -> OperatorSet:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
    return OperatorSet.from_matrices(factory(), label=name)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SelfDualReport:
    gram: np.ndarray
    max_deviation: float
    hermitian: tuple[bool, ...]
    eps: float

    @property
    def orthonormal(self) -> bool:
        return self.max_deviation <= self.eps

    @property
    def passed(self) -> bool:
        return self.orthonormal and all(self.hermitian)


def validate_selfdual(u: OperatorSet, tol: Tolerance = DEFAULT_TOL) -> SelfDualReport:
    """Gram matrix of ``u`` under the trace pairing and a per-member Hermiticity check.

    Passes when the Gram matrix is the identity within ``tol.abs_eps`` and
    every member is Hermitian.
    """
    gram = pairing_matrix(u, u)
    dev = float(np.max(np.abs(gram - np.eye(len(u)))))
    herm = tuple(matkit.is_hermitian(op, tol.abs_eps) for op in u.ops)
    return SelfDualReport(gram, dev, herm, tol.abs_eps)
