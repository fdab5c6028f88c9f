"""End-to-end acceptance checks, one test per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import io
import json
import math
import sys

import numpy as np
import pytest

from qdq import cli
from qdq import documents as docs
from qdq.duality import (
    OperatorSet,
    check_minimal,
    flatten_dequantizers,
    flatten_quantizers,
    pairing_matrix,
    solve_quantizers,
)
from qdq.errors import InfeasibleParams, NoRealSolution
from qdq.matkit import Tolerance
from qdq.selfdual import (
    PAPER_PRESETS,
    PRESET_NAMES,
    Family1Params,
    Family2Params,
    Family3Params,
    family1_build,
    family1_solve,
    family2_build,
    family3_build,
    preset,
    sign_combinations,
    validate_selfdual,
)
from qdq.symbols import build_star_kernel, reconstruct, star_apply, star_direct, symbol_of
from qdq.tensorext import parameter_count, tensor_pair, tensor_sets
from qdq.transforms import TransformMatrix, apply_transform, find_transform

from helpers import (
    GOLDEN_L,
    GOLDEN_SETS,
    gram,
    localized_residual,
    max_dev,
    random_complex,
    random_family1_values,
    random_hermitian,
    random_orthonormal_hermitian_set,
)

DRAWS = 1000
TIGHT = Tolerance(abs_eps=1e-12)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.mark.criterion(1, "golden family sets and orthonormality")
@pytest.mark.parametrize("name", ["family1-paper", "family2-paper", "family3-paper"])
def test_golden_sets(name):
    built = {
        "family1-paper": lambda: family1_build(
            Family1Params(b2=0.5, c2=0.25, b3=0.5, c3=-0.25, b4=0.0, c4=math.sqrt(6) / 4)
        ),
        "family2-paper": lambda: family2_build(Family2Params(1 / (2 * math.sqrt(2)), 1 / (2 * math.sqrt(2)))),
        "family3-paper": lambda: family3_build(Family3Params(0.5)),
    }[name]()
    for u in (preset(name), built):
        msg = localized_residual(u.ops.reshape(4, 4), np.reshape(GOLDEN_SETS[name], (4, 4)), 1e-12)
        assert not msg, msg
        assert max_dev(gram(u.ops), np.eye(4)) < 1e-12


@pytest.mark.criterion(2, "golden transform matrices")
@pytest.mark.parametrize("key", sorted(GOLDEN_L))
def test_golden_transforms(key, rng):
    target, source = key
    v, u = preset(target), preset(source)
    L = find_transform(v, u)
    msg = localized_residual(L.L, GOLDEN_L[key], 1e-12)
    assert not msg, msg
    assert max_dev(apply_transform(TransformMatrix(2, GOLDEN_L[key]), u).ops, v.ops) < 1e-12
    assert max_dev(apply_transform(L, u).ops, v.ops) < 1e-10
    for _ in range(20):
        w = OperatorSet(2, random_complex(rng, (4, 2, 2)))
        assert max_dev(apply_transform(find_transform(w, u), u).ops, w.ops) < 1e-10


@pytest.mark.criterion(3, "duality solver on random Hermitian sets")
def test_duality_solver(rng):
    done = 0
    while done < DRAWS:
        u = OperatorSet.from_matrices([random_hermitian(rng) for _ in range(4)])
        a = flatten_dequantizers(u)
        det_a = np.linalg.det(a)
        if abs(det_a) <= 1e-6:
            continue
        done += 1
        pair = solve_quantizers(u)
        d = pair.quantizers
        assert max_dev(pairing_matrix(u, d), np.eye(4)) < 1e-10
        assert max(max_dev(q, q.conj().T) for q in d.ops) < 1e-10
        det_b = np.linalg.det(flatten_quantizers(d))
        assert abs(det_a * det_b - 1) < 1e-8
        via_cof = solve_quantizers(u, method="cofactor").quantizers
        assert max_dev(via_cof.ops, d.ops) < 1e-10


@pytest.mark.criterion(4, "orthonormal sets are self-dual")
def test_self_duality(rng):
    for _ in range(DRAWS):
        u = OperatorSet(2, random_orthonormal_hermitian_set(rng))
        assert max_dev(solve_quantizers(u).quantizers.ops, u.ops) < 1e-10


def _finite(u):
    return bool(np.all(np.isfinite(u.ops)))


@pytest.mark.criterion(5, "family property sweep")
def test_family_sweep(rng):
    # family 1: orthonormal (b, c, d) rows, both signs of gamma
    for _ in range(DRAWS):
        values, sign, _ = random_family1_values(rng)
        for s in (sign, -sign):
            u = family1_build(Family1Params(**values, gamma_sign=s))
            assert _finite(u) and validate_selfdual(u).passed

    signs = list(sign_combinations(3))
    count = 0
    while count < DRAWS:
        c2, c3 = rng.uniform(-1 / math.sqrt(2), 1 / math.sqrt(2), 2)
        if not 2 * c2**2 + 2 * c3**2 < 1 - 1e-6 or min(abs(c2), abs(c3)) < 1e-6:
            continue
        u = family2_build(Family2Params(c2, c3, *signs[count % 8]))
        assert _finite(u) and validate_selfdual(u).passed
        count += 1

    for k in range(DRAWS):
        b3 = rng.uniform(-1, 1) / math.sqrt(2)
        u = family3_build(Family3Params(b3, *signs[k % 8]))
        assert _finite(u) and validate_selfdual(u).passed
    for s in signs:
        assert validate_selfdual(family3_build(Family3Params(1 / math.sqrt(2), *s))).passed

    infeasible = [
        lambda: family1_build(Family1Params(0.5, 0.25, -0.25, 0.5, 0.1, 0.2)),
        lambda: family1_build(Family1Params(0.3, 0.1, 0.3, 0.1, 0.3, 0.1)),
        lambda: family1_build(Family1Params(0.51, 0.25, 0.5, -0.25, 0.0, math.sqrt(6) / 4)),
        lambda: family1_build(Family1Params(float("nan"), 0.25, 0.5, -0.25, 0.0, 0.6)),
        lambda: family1_solve({"b2": 0.6, "c2": 0.5, "b3": 0.1}),
        lambda: family2_build(Family2Params(0.5, 0.5)),
        lambda: family2_build(Family2Params(0.0, 0.3)),
        lambda: family2_build(Family2Params(0.3, 0.0)),
        lambda: family2_build(Family2Params(0.75, 0.1)),
        lambda: family3_build(Family3Params(0.8)),
        lambda: family3_build(Family3Params(0.0)),
        lambda: family3_build(Family3Params(0.5, sign_c2=0)),
    ]
    for make in infeasible:
        with pytest.raises(InfeasibleParams):
            make()
    for _ in range(200):
        c2, c3 = rng.uniform(-1, 1, 2)
        if 2 * c2**2 + 2 * c3**2 >= 1:
            with pytest.raises(InfeasibleParams):
                family2_build(Family2Params(c2, c3))
        b3 = rng.uniform(1 / math.sqrt(2) + 1e-9, 2) * rng.choice([-1, 1])
        with pytest.raises(InfeasibleParams):
            family3_build(Family3Params(b3))
    with pytest.raises(NoRealSolution):
        family1_solve({"b2": 0.5, "c2": 0.5, "c3": 0.0})


@pytest.mark.criterion(6, "symbol calculus")
def test_symbol_calculus(rng):
    for name in PRESET_NAMES:
        pair = solve_quantizers(preset(name))
        u, d = pair.dequantizers, pair.quantizers
        kernel = build_star_kernel(pair)
        for _ in range(50):
            a, b = random_complex(rng, (2, 2)), random_complex(rng, (2, 2))
            assert max_dev(reconstruct(symbol_of(a, u), d), a) < 1e-10
            via_kernel = star_apply(symbol_of(a, u), symbol_of(b, u), kernel)
            assert max_dev(via_kernel.values, star_direct(a, b, u).values) < 1e-10
    pair = solve_quantizers(preset("family1-paper"))
    kernel = build_star_kernel(pair)
    for _ in range(100):
        fa, fb, fc = (symbol_of(random_complex(rng, (2, 2)), pair.dequantizers) for _ in range(3))
        left = star_apply(star_apply(fa, fb, kernel), fc, kernel)
        right = star_apply(fa, star_apply(fb, fc, kernel), kernel)
        assert max_dev(left.values, right.values) < 1e-9


@pytest.mark.criterion(7, "tensor extension")
def test_tensor_extension(rng):
    f3 = preset("family3-paper")
    t = tensor_sets(f3, f3)
    assert len(t) == 16 and t.ops.shape == (16, 4, 4)
    assert validate_selfdual(t, TIGHT).passed
    assert check_minimal(t).is_minimal
    pair = tensor_pair(solve_quantizers(f3), solve_quantizers(preset("wigner-erl")))
    for _ in range(100):
        a = random_hermitian(rng, 4)
        assert max_dev(reconstruct(symbol_of(a, pair.dequantizers), pair.quantizers), a) < 1e-9
    assert parameter_count(2) == (16, 10)


def _cli(monkeypatch, capsys, *argv, stdin=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(list(argv))
    out, _ = capsys.readouterr()
    return code, out


@pytest.mark.criterion(8, "CLI pipeline and exit codes")
@pytest.mark.parametrize("name", PAPER_PRESETS)
def test_cli_pipeline(name, tmp_path, monkeypatch, capsys):
    rho = np.diag([0.7, 0.3])
    state = tmp_path / "rho.json"
    state.write_text(docs.dumps(docs.operator_document(rho)))
    pair_path = tmp_path / "pair.json"

    code, u_text = _cli(monkeypatch, capsys, "gen", "--preset", name)
    assert code == 0
    code, _ = _cli(monkeypatch, capsys, "solve", "--out", str(pair_path), stdin=u_text)
    assert code == 0
    code, report = _cli(monkeypatch, capsys, "verify", "--in", str(pair_path), "--mode", "duality")
    assert code == 0 and "result=PASS" in report
    code, f_text = _cli(monkeypatch, capsys, "symbol", "--set", str(pair_path), "--state", str(state))
    assert code == 0
    code, out = _cli(monkeypatch, capsys, "reconstruct", "--set", str(pair_path), stdin=f_text)
    assert code == 0
    assert max_dev(docs.parse_operator_document(json.loads(out)), rho) < 1e-9


@pytest.mark.criterion(8, "CLI pipeline and exit codes")
def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    dup = docs.set_document(preset("pauli-orthonormal"))
    dup["operators"][3] = dup["operators"][0]
    dup_path = tmp_path / "dup.json"
    dup_path.write_text(docs.dumps(dup))
    bad_path = tmp_path / "bad.json"
    bad_path.write_text('{"schema_version": "qdq/1", "kind": "dequantizers", "dim": 2, "operators": [1]}')
    big = tmp_path / "big.json"
    big.write_text(docs.dumps(docs.operator_document(np.eye(3))))

    cases = [
        (0, ["verify", "--in", "wigner-aam", "--mode", "orthonormal"]),
        (1, ["verify", "--in", "matrix-units", "--mode", "orthonormal"]),
        (2, ["gen", "--family", "3", "--b3", "0.9"]),
        (2, ["gen", "--family", "2", "--c2", "0.5", "--c3", "0.5"]),
        (3, ["solve", "--in", str(dup_path)]),
        (4, ["verify", "--in", str(bad_path)]),
        (4, ["gen", "--bogus"]),
        (5, ["symbol", "--set", "family1-paper", "--operator", str(big)]),
        (6, ["transform", "--from", "matrix-units", "--to", "wigner-aam"]),
    ]
    for expected, argv in cases:
        code, _ = _cli(monkeypatch, capsys, *argv)
        assert code == expected, argv
