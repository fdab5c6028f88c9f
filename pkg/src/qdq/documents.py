"""JSON documents exchanged by the command-line tool.

Every complex number is written as a two-element list ``[re, im]`` and every
matrix as a list of rows.  Floats are written with Python's shortest
round-trip representation, so ``parse(emit(x))`` reproduces ``x`` bit for bit.

Set document::

    {"schema_version": "qdq/1", "kind": "dequantizers" | "quantizers",
     "dim": 2, "operators": [matrix, ...], "metadata": {...}}

    {"schema_version": "qdq/1", "kind": "pair", "dim": 2,
     "dequantizers": [matrix, ...], "quantizers": [matrix, ...],
     "metadata": {"certified_eps": 1e-10, ...}}

Symbol document::

    {"schema_version": "qdq/1", "dim": 2, "set_label": "...", "values": [[re, im], ...]}

Operator and transform documents carry ``"kind": "operator"`` with a
``"matrix"`` field, or ``"kind": "transform"`` with ``"L"`` and optionally ``"M"``.
"""

from __future__ import annotations

import json
import math
import sys
from typing import Any

import numpy as np

from .duality import DualPair, OperatorSet
from .errors import QdqError
from .symbols import Symbol

SCHEMA = "qdq/1"
SET_KINDS = ("dequantizers", "quantizers", "pair")


class MalformedDocument(QdqError, ValueError):
    def __init__(self, message: str, field: str = "document"):
        super().__init__(message)
        self.field = field


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(z) for z in row] for row in m]


def set_document(obj: OperatorSet | DualPair, kind: str | None = None, metadata: dict | None = None) -> dict:
    meta = dict(metadata or {})
    if isinstance(obj, DualPair):
        if obj.dequantizers.label and "label" not in meta:
            meta["label"] = obj.dequantizers.label
        meta.setdefault("certified_eps", obj.certified_eps)
        return {
            "schema_version": SCHEMA,
            "kind": "pair",
            "dim": obj.dim,
            "dequantizers": [encode_matrix(m) for m in obj.dequantizers.ops],
            "quantizers": [encode_matrix(m) for m in obj.quantizers.ops],
            "metadata": meta,
        }
    kind = kind or "dequantizers"
    if kind not in ("dequantizers", "quantizers"):
        raise ValueError(f"kind {kind!r} needs a DualPair")
    if obj.label and "label" not in meta:
        meta["label"] = obj.label
    return {
        "schema_version": SCHEMA,
        "kind": kind,
        "dim": obj.dim,
        "operators": [encode_matrix(m) for m in obj.ops],
        "metadata": meta,
    }


def symbol_document(f: Symbol) -> dict:
    return {
        "schema_version": SCHEMA,
        "dim": f.dim,
        "set_label": f.set_label or "",
        "values": [encode_complex(z) for z in f.values],
    }


def operator_document(m, metadata: dict | None = None) -> dict:
    m = np.asarray(m)
    return {
        "schema_version": SCHEMA,
        "kind": "operator",
        "dim": int(m.shape[0]),
        "matrix": encode_matrix(m),
        "metadata": dict(metadata or {}),
    }


def transform_document(L, M=None, dim: int | None = None, metadata: dict | None = None) -> dict:
    L = np.asarray(L)
    doc = {
        "schema_version": SCHEMA,
        "kind": "transform",
        "dim": dim if dim is not None else int(round(math.sqrt(L.shape[0]))),
        "L": encode_matrix(L),
    }
    if M is not None:
        doc["M"] = encode_matrix(M)
    doc["metadata"] = dict(metadata or {})
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MalformedDocument(f"{where}: expected a number, got {x!r}", field=where)
    if not math.isfinite(x):
        raise MalformedDocument(f"{where}: non-finite number", field=where)
    return float(x)


def parse_complex(entry, where: str = "entry") -> complex:
    if not isinstance(entry, list) or len(entry) != 2:
        raise MalformedDocument(f"{where}: expected [re, im], got {entry!r}", field=where)
    return complex(_number(entry[0], where), _number(entry[1], where))


def parse_matrix(rows, where: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MalformedDocument(f"{where}: expected a non-empty list of rows", field=where)
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise MalformedDocument(f"{where}: rows have unequal or zero length", field=where)
    return np.array(
        [[parse_complex(e, f"{where}[{i}][{j}]") for j, e in enumerate(r)] for i, r in enumerate(rows)],
        dtype=complex,
    )


def _header(doc) -> int:
    if not isinstance(doc, dict):
        raise MalformedDocument("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA:
        raise MalformedDocument(
            f"schema_version must be {SCHEMA!r}, got {doc.get('schema_version')!r}",
            field="schema_version",
        )
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MalformedDocument(f"dim must be a positive integer, got {dim!r}", field="dim")
    return dim


def _operator_list(items, dim: int, label: str | None, where: str) -> OperatorSet:
    if not isinstance(items, list):
        raise MalformedDocument(f"{where} must be a list", field=where)
    if len(items) != dim * dim:
        raise MalformedDocument(f"{where}: expected {dim * dim} operators, got {len(items)}", field=where)
    mats = [parse_matrix(m, f"{where}[{k}]") for k, m in enumerate(items)]
    for k, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise MalformedDocument(f"{where}[{k}] has shape {m.shape}, expected {dim}x{dim}", field=where)
    return OperatorSet(dim, np.array(mats), label)


def parse_set_document(doc) -> tuple[str, OperatorSet | DualPair, dict]:
    """Return ``(kind, value, metadata)``; ``value`` is a :class:`DualPair` for ``kind == "pair"``."""
    dim = _header(doc)
    kind = doc.get("kind")
    if kind not in SET_KINDS:
        raise MalformedDocument(f"kind must be one of {SET_KINDS}, got {kind!r}", field="kind")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise MalformedDocument("metadata must be an object", field="metadata")
    label = meta.get("label") if isinstance(meta.get("label"), str) else None
    if kind == "pair":
        u = _operator_list(doc.get("dequantizers"), dim, label, "dequantizers")
        d = _operator_list(doc.get("quantizers"), dim, label and f"dual({label})", "quantizers")
        eps = meta.get("certified_eps", 1e-10)
        eps = _number(eps, "metadata.certified_eps")
        return kind, DualPair(u, d, eps), meta
    return kind, _operator_list(doc.get("operators"), dim, label, "operators"), meta


def parse_symbol_document(doc) -> Symbol:
    dim = _header(doc)
    values = doc.get("values")
    if not isinstance(values, list) or len(values) != dim * dim:
        raise MalformedDocument(f"values must hold {dim * dim} entries", field="values")
    label = doc.get("set_label")
    if label is not None and not isinstance(label, str):
        raise MalformedDocument("set_label must be text", field="set_label")
    return Symbol(dim, [parse_complex(v, f"values[{k}]") for k, v in enumerate(values)], label or None)


def parse_operator_document(doc) -> np.ndarray:
    dim = _header(doc)
    if doc.get("kind", "operator") != "operator":
        raise MalformedDocument(f"expected an operator document, got kind {doc.get('kind')!r}", field="kind")
    m = parse_matrix(doc.get("matrix"), "matrix")
    if m.shape != (dim, dim):
        raise MalformedDocument(f"matrix has shape {m.shape}, expected {dim}x{dim}", field="matrix")
    return m


def parse_transform_document(doc) -> tuple[np.ndarray, np.ndarray | None]:
    _header(doc)
    if doc.get("kind") != "transform":
        raise MalformedDocument("expected a transform document", field="kind")
    L = parse_matrix(doc.get("L"), "L")
    M = parse_matrix(doc["M"], "M") if "M" in doc else None
    return L, M


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc


def read_json(path: str) -> Any:
    if path == "-":
        return loads(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise MalformedDocument(f"cannot read {path}: {exc.strerror}", field="path") from exc
