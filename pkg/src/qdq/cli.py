"""Command-line front end.

Commands read documents from ``--in`` (default stdin) or from the named
options, write documents to ``--out`` (default stdout) and send status lines
to stderr.  Failures print one machine-readable line
``code=<CODE> field=<field> reason=<text>`` to stderr and exit with:

    0 success, 1 verification failed, 2 infeasible parameters,
    3 singular set or degenerate transform, 4 malformed input,
    5 dimension mismatch, 6 reference set not orthonormal

Wherever a set document is expected a preset name may be given instead.
``QDQ_EPS`` overrides the default absolute tolerance.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import documents as docs
from . import matkit
from .duality import DualPair, OperatorSet, check_minimal, solve_quantizers, verify_duality
from .errors import (
    CertificationFailed,
    DegenerateTransform,
    DimensionMismatch,
    InfeasibleParams,
    NotOrthonormalBase,
    Singular,
    UnknownPreset,
)
from .matkit import Tolerance
from .selfdual import (
    FAMILY1_NAMES,
    PRESET_NAMES,
    Family1Params,
    Family2Params,
    Family3Params,
    family1_build,
    family1_solve,
    family2_build,
    family3_build,
    preset,
    validate_selfdual,
)
from .symbols import Symbol, build_star_kernel, reconstruct, star_apply, star_direct, symbol_of
from .tensorext import tensor_pair, tensor_sets
from .transforms import find_transform, find_transform_general, quantizer_transform

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_SINGULAR = 3
EXIT_MALFORMED = 4
EXIT_DIM = 5
EXIT_NOT_ORTHONORMAL = 6


class CliError(Exception):
    def __init__(self, exit_code: int, code: str, reason: str, field: str = "-"):
        super().__init__(reason)
        self.exit_code = exit_code
        self.code = code
        self.reason = reason
        self.field = field


class _Parser(argparse.ArgumentParser):
    # usage errors are malformed input; exit 2 is reserved for infeasible parameters
    def error(self, message):
        raise CliError(EXIT_MALFORMED, "USAGE", message, field="argv")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _tolerance(eps: float | None = None) -> Tolerance:
    if eps is None:
        raw = os.environ.get("QDQ_EPS")
        if raw is None:
            return Tolerance()
        try:
            eps = float(raw)
        except ValueError:
            raise CliError(EXIT_MALFORMED, "MALFORMED", f"QDQ_EPS={raw!r} is not a number", "QDQ_EPS")
        field = "QDQ_EPS"
    else:
        field = "eps"
    try:
        return Tolerance(abs_eps=eps)
    except ValueError as exc:
        raise CliError(EXIT_MALFORMED, "MALFORMED", str(exc), field)


def _emit(doc: dict, out: str | None) -> None:
    text = docs.dumps(doc)
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_set(source: str):
    """Preset name, path, or ``-``; returns ``(kind, OperatorSet | DualPair, metadata)``."""
    if source in PRESET_NAMES:
        return "dequantizers", preset(source), {"label": source, "provenance": "preset"}
    return docs.parse_set_document(docs.read_json(source))


def _dequantizers(source: str) -> OperatorSet:
    kind, value, _ = _load_set(source)
    if kind == "pair":
        return value.dequantizers
    if kind == "quantizers":
        raise CliError(EXIT_MALFORMED, "MALFORMED", "expected dequantizers or a pair, got quantizers", "kind")
    return value


def _pair(source: str, tol: Tolerance) -> DualPair:
    kind, value, _ = _load_set(source)
    if kind == "pair":
        return value
    if kind == "quantizers":
        raise CliError(EXIT_MALFORMED, "MALFORMED", "expected dequantizers or a pair, got quantizers", "kind")
    return solve_quantizers(value, tol)


def _quantizers(source: str, tol: Tolerance) -> OperatorSet:
    kind, value, _ = _load_set(source)
    if kind == "quantizers":
        return value
    if kind == "pair":
        return value.quantizers
    return solve_quantizers(value, tol).quantizers


def _parse_signs(text: str, count: int) -> tuple[int, ...]:
    if len(text) != count or any(ch not in "+-" for ch in text):
        raise CliError(EXIT_INFEASIBLE, "INFEASIBLE", f"--signs needs {count} of '+'/'-', got {text!r}", "signs")
    return tuple(1 if ch == "+" else -1 for ch in text)


def _operand(source: str):
    """An operator or symbol document, told apart by its fields."""
    doc = docs.read_json(source)
    if isinstance(doc, dict) and "values" in doc:
        return docs.parse_symbol_document(doc)
    return docs.parse_operator_document(doc)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gen(args, tol: Tolerance) -> int:
    if args.preset:
        u = preset(args.preset)
        meta = {"label": args.preset, "provenance": {"preset": args.preset}}
        _emit(docs.set_document(u, metadata=meta), args.out)
        return EXIT_OK
    if args.family is None:
        raise CliError(EXIT_MALFORMED, "USAGE", "give --preset or --family", "family")

    if args.family == 1:
        (gamma_sign,) = _parse_signs(args.signs or "+", 1)
        given = {n: getattr(args, n) for n in FAMILY1_NAMES if getattr(args, n) is not None}
        if len(given) == 6:
            params = Family1Params(**given, gamma_sign=gamma_sign)
        elif len(given) == 3:
            params = family1_solve(given, gamma_sign=gamma_sign)
        else:
            raise InfeasibleParams("family 1 needs three or six of --b2 --c2 --b3 --c3 --b4 --c4", field="free")
        u = family1_build(params)
        prov = {"family": 1, **params.as_dict(), "gamma_sign": gamma_sign}
    elif args.family == 2:
        if args.c2 is None or args.c3 is None:
            raise InfeasibleParams("family 2 needs --c2 and --c3", field="c2" if args.c2 is None else "c3")
        sb4, sc4, sd4 = _parse_signs(args.signs or "+++", 3)
        params = Family2Params(args.c2, args.c3, sb4, sc4, sd4)
        u = family2_build(params, tol)
        prov = {"family": 2, "c2": args.c2, "c3": args.c3, "signs": args.signs or "+++"}
    else:
        if args.b3 is None:
            raise InfeasibleParams("family 3 needs --b3", field="b3")
        sc2, sc3, sd4 = _parse_signs(args.signs or "+++", 3)
        u = family3_build(Family3Params(args.b3, sc2, sc3, sd4), tol)
        prov = {"family": 3, "b3": args.b3, "signs": args.signs or "+++"}
    _emit(docs.set_document(u, metadata={"label": u.label, "provenance": prov}), args.out)
    return EXIT_OK


def cmd_solve(args, tol: Tolerance) -> int:
    u = _dequantizers(args.input)
    pair = solve_quantizers(u, tol, method=args.method)
    report = verify_duality(pair, tol)
    print(f"solved: max_deviation={report.max_deviation:.3e} det_product={report.det_product:.12g}", file=sys.stderr)
    _emit(docs.set_document(pair), args.out)
    return EXIT_OK


def cmd_verify(args, tol: Tolerance) -> int:
    kind, value, _ = _load_set(args.input)
    mode = args.mode or ("duality" if kind == "pair" else "orthonormal")
    u = value.dequantizers if kind == "pair" else value
    if mode == "duality":
        if kind != "pair":
            raise CliError(EXIT_MALFORMED, "MALFORMED", "duality mode needs a pair document", "kind")
        rep = verify_duality(value, tol)
        passed, dev = rep.passed, rep.max_deviation
        extra = f" det_product_deviation={rep.det_product_deviation:.3e}"
    elif mode == "orthonormal":
        rep = validate_selfdual(u, tol)
        passed, dev, extra = rep.orthonormal, rep.max_deviation, ""
    elif mode == "hermitian":
        devs = [matkit.max_abs(op - op.conj().T) for op in u.ops]
        dev = max(devs)
        passed, extra = dev <= tol.abs_eps, ""
        if kind == "pair":
            qdev = max(matkit.max_abs(op - op.conj().T) for op in value.quantizers.ops)
            dev = max(dev, qdev)
            passed = dev <= tol.abs_eps
    else:
        rep = check_minimal(u, tol)
        passed = rep.is_minimal
        dev = abs(rep.det_A)
        extra = f" condition_estimate={rep.condition_estimate:.3e}"
    verdict = "PASS" if passed else "FAIL"
    print(f"mode={mode} max_deviation={dev:.3e} eps={tol.abs_eps:g}{extra} result={verdict}")
    return EXIT_OK if passed else EXIT_FAIL


def _check_state(rho: np.ndarray, tol: Tolerance) -> None:
    if not matkit.is_hermitian(rho, tol.abs_eps):
        raise CliError(EXIT_MALFORMED, "MALFORMED", "state is not Hermitian", "state")
    if abs(matkit.trace(rho) - 1) > tol.abs_eps:
        raise CliError(EXIT_MALFORMED, "MALFORMED", "state does not have unit trace", "state")
    if np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) < -tol.abs_eps:
        raise CliError(EXIT_MALFORMED, "MALFORMED", "state is not positive semidefinite", "state")


def cmd_symbol(args, tol: Tolerance) -> int:
    u = _dequantizers(args.set)
    if args.state is not None:
        a = docs.parse_operator_document(docs.read_json(args.state))
        _check_state(a, tol)
    else:
        a = docs.parse_operator_document(docs.read_json(args.operator))
    _emit(docs.symbol_document(symbol_of(a, u)), args.out)
    return EXIT_OK


def cmd_reconstruct(args, tol: Tolerance) -> int:
    f = docs.parse_symbol_document(docs.read_json(args.symbol))
    d = _quantizers(args.set, tol)
    _emit(docs.operator_document(reconstruct(f, d)), args.out)
    return EXIT_OK


def cmd_star(args, tol: Tolerance) -> int:
    pair = _pair(args.pair, tol)
    a, b = _operand(args.a), _operand(args.b)
    if isinstance(a, np.ndarray) and isinstance(b, np.ndarray):
        out = star_direct(a, b, pair.dequantizers)
    else:
        u = pair.dequantizers
        fa = a if isinstance(a, Symbol) else symbol_of(a, u)
        fb = b if isinstance(b, Symbol) else symbol_of(b, u)
        out = star_apply(fa, fb, build_star_kernel(pair))
    _emit(docs.symbol_document(out), args.out)
    return EXIT_OK


def cmd_transform(args, tol: Tolerance) -> int:
    u = _dequantizers(args.source)
    v = _dequantizers(args.target)
    L = find_transform_general(v, u, tol) if args.general else find_transform(v, u, tol)
    M = quantizer_transform(L, tol).L if args.with_quantizer_transform else None
    meta = {"from": u.label, "to": v.label}
    _emit(docs.transform_document(L.L, M, dim=u.dim, metadata=meta), args.out)
    return EXIT_OK


def cmd_tensor(args, tol: Tolerance) -> int:
    ka, a, _ = _load_set(args.a)
    kb, b, _ = _load_set(args.b)
    if ka == kb == "pair":
        _emit(docs.set_document(tensor_pair(a, b)), args.out)
        return EXIT_OK
    if "quantizers" in (ka, kb):
        raise CliError(EXIT_MALFORMED, "MALFORMED", "tensor takes dequantizer sets or pairs", "kind")
    ua = a.dequantizers if ka == "pair" else a
    ub = b.dequantizers if kb == "pair" else b
    _emit(docs.set_document(tensor_sets(ua, ub)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdq", description="Minimal dequantizer/quantizer sets for finite-dimensional systems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a preset or a self-dual qubit family")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=PRESET_NAMES)
    group.add_argument("--family", type=int, choices=(1, 2, 3))
    for name in FAMILY1_NAMES:
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--signs", help="sign flags: one for family 1 (gamma), three for families 2 and 3")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="compute the quantizers dual to a dequantizer set")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--method", choices=("solve", "cofactor"), default="solve")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check duality, orthonormality, Hermiticity or minimality")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--mode", choices=("duality", "orthonormal", "hermitian", "minimal"))
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("symbol", help="symbol of an operator or state")
    p.add_argument("--set", required=True)
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--operator")
    target.add_argument("--state")
    p.add_argument("--out")
    p.set_defaults(func=cmd_symbol)

    p = sub.add_parser("reconstruct", help="operator from its symbol")
    p.add_argument("--set", required=True)
    p.add_argument("--symbol", "--in", dest="symbol", default="-")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("star", help="star product of two operators or symbols")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--pair", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("transform", help="basis change L with V = L U")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--with-quantizer-transform", action="store_true")
    p.add_argument("--general", action="store_true", help="allow a non-orthonormal --from set")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("tensor", help="tensor product of two sets or pairs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tensor)
    return parser


def _fail(err: CliError) -> int:
    reason = " ".join(err.reason.split())
    print(f"code={err.code} field={err.field} reason={reason}", file=sys.stderr)
    return err.exit_code


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        tol = _tolerance(getattr(args, "eps", None))
        return args.func(args, tol)
    except CliError as err:
        return _fail(err)
    except InfeasibleParams as exc:
        return _fail(CliError(EXIT_INFEASIBLE, "INFEASIBLE", str(exc), exc.field))
    except docs.MalformedDocument as exc:
        return _fail(CliError(EXIT_MALFORMED, "MALFORMED", str(exc), exc.field))
    except UnknownPreset as exc:
        return _fail(CliError(EXIT_MALFORMED, "MALFORMED", str(exc), "preset"))
    except DimensionMismatch as exc:
        return _fail(CliError(EXIT_DIM, "DIM_MISMATCH", str(exc), "dim"))
    except NotOrthonormalBase as exc:
        return _fail(CliError(EXIT_NOT_ORTHONORMAL, "NOT_ORTHONORMAL", str(exc), "from"))
    except (Singular, DegenerateTransform) as exc:
        return _fail(CliError(EXIT_SINGULAR, "SINGULAR", str(exc), "operators"))
    except CertificationFailed as exc:
        return _fail(CliError(EXIT_FAIL, "CERTIFICATION_FAILED", str(exc), "pair"))


if __name__ == "__main__":
    sys.exit(main())
