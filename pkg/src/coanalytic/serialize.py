"""JSON/CSV conversion for symbols, series and reports.

Complex numbers travel as ``[re, im]`` pairs and angles in radians.
"""

from __future__ import annotations

import ast
import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

from coanalytic.symbols import (
    CircleZeroPolynomial,
    RationalSymbol,
    SingularFactorFunction,
    as_series,
)


class InputError(ValueError):
    """Malformed user input (bad JSON, unknown schema, invalid angle list)."""


def complex_list(c) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(c, dtype=complex).ravel()]


def parse_complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise InputError(f"expected a number or an [re, im] pair, got {x!r}")


def parse_complex_list(items) -> np.ndarray:
    if not isinstance(items, (list, tuple)) or not items:
        raise InputError("expected a non-empty list of coefficients")
    return as_series([parse_complex(x) for x in items])


# -- angle lists ---------------------------------------------------------------

_NAMES = {"pi": math.pi, "π": math.pi}


def _eval_node(node) -> Any:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, (ast.List, ast.Tuple)):
        return [_eval_node(e) for e in node.elts]
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        lhs, rhs = _eval_node(node.left), _eval_node(node.right)
        if isinstance(node.op, ast.Add):
            return lhs + rhs
        if isinstance(node.op, ast.Sub):
            return lhs - rhs
        if isinstance(node.op, ast.Mult):
            return lhs * rhs
        return lhs / rhs
    raise InputError(f"unsupported expression in angle list: {ast.dump(node)}")


def parse_angle_list(text: str) -> CircleZeroPolynomial:
    """Parse ``'[(pi,1),(0,1)]'`` (``π`` allowed, arithmetic allowed) or a classA JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return class_a_from_json(_loads(text))
    try:
        tree = ast.parse(text.replace("π", "pi"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse angle list {text!r}: {exc.msg}") from None
    items = _eval_node(tree)
    if not isinstance(items, list):
        raise InputError("angle list must be a list of (theta, mult) pairs")
    zeros = []
    for item in items:
        if not isinstance(item, list) or len(item) != 2:
            raise InputError(f"expected (theta, mult), got {item!r}")
        theta, mult = item
        if float(mult) != int(mult) or int(mult) < 1:
            raise InputError(f"multiplicity must be a positive integer, got {mult!r}")
        zeros.append((float(theta), int(mult)))
    return CircleZeroPolynomial(tuple(zeros))


# -- symbols -------------------------------------------------------------------

def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def load_json_arg(text: str):
    """A JSON literal, or ``@path`` / a path to a JSON file."""
    text = text.strip()
    if text.startswith("@"):
        text = text[1:]
    elif text[:1] in "{[":
        return _loads(text)
    try:
        with open(text, encoding="utf-8") as fh:
            return _loads(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {text!r}: {exc.strerror}") from None


def class_a_to_json(a: CircleZeroPolynomial) -> dict:
    return {"classA": [{"theta": t, "mult": m} for t, m in a.zeros]}


def class_a_from_json(obj) -> CircleZeroPolynomial:
    if not isinstance(obj, dict) or "classA" not in obj:
        raise InputError("expected an object with key 'classA'")
    try:
        zeros = tuple((float(e["theta"]), int(e["mult"])) for e in obj["classA"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad classA entry: {exc}") from None
    if any(m < 1 for _, m in zeros):
        raise InputError("multiplicities must be positive")
    return CircleZeroPolynomial(zeros)


def rational_to_json(r: RationalSymbol) -> dict:
    return {"rational": {"num": complex_list(r.num), "den": complex_list(r.den)}}


def rational_from_json(obj) -> RationalSymbol:
    body = obj.get("rational", obj) if isinstance(obj, dict) else None
    if not isinstance(body, dict) or "num" not in body:
        raise InputError("expected {'rational': {'num': [...], 'den': [...]}}")
    num = parse_complex_list(body["num"])
    den = parse_complex_list(body.get("den", [[1.0, 0.0]]))
    try:
        return RationalSymbol(num, den)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def singular_to_json(phi: SingularFactorFunction) -> dict:
    return {"singular": {**rational_to_json(phi.rational),
                         "factors": [{"theta": t, "alpha": a} for t, a in phi.factors]}}


def singular_from_json(obj) -> SingularFactorFunction:
    """Accepts the singular, rational and classA schemas, or a bare coefficient list."""
    if isinstance(obj, list):
        return SingularFactorFunction.from_polynomial(parse_complex_list(obj))
    if not isinstance(obj, dict):
        raise InputError("function must be a JSON object or coefficient list")
    if "classA" in obj:
        return SingularFactorFunction.from_class_a(class_a_from_json(obj))
    if "rational" in obj:
        r = rational_from_json(obj)
        return SingularFactorFunction.from_rational(r.num, r.den)
    if "singular" not in obj:
        raise InputError("unknown function schema (expected singular, rational or classA)")
    body = obj["singular"]
    r = rational_from_json(body.get("rational", {"num": [[1.0, 0.0]]}))
    try:
        factors = tuple((float(e["theta"]), float(e["alpha"])) for e in body.get("factors", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad factor entry: {exc}") from None
    try:
        return SingularFactorFunction.from_rational(r.num, r.den, factors)
    except ValueError as exc:
        raise InputError(str(exc)) from None


# -- output ------------------------------------------------------------------

def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and complex numbers."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_list(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
