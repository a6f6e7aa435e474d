"""JSON serialization of results with exact numbers kept as strings."""

from __future__ import annotations

import dataclasses
import json

from gmpy2 import mpq

from ..core.numbers import GaussianRational
from ..core.polynomial import MultiPolynomial, VariableTable
from ..core.rational import RationalFunction
from ..engine.annihilator import Annihilator, NotFound

SCHEMA_VERSION = "1.0"


def polynomial_json(p: MultiPolynomial) -> dict:
    """Variables, term list and truncation order (null for exact polynomials)."""
    return {
        "variables": list(p.table.names),
        "terms": [{"coeff": str(c), "exps": list(e)} for e, c in p.sorted_terms()],
        "order": p.order,
        "text": p.to_expr(),
    }


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def to_jsonable(obj):
    """Recursively turn library results into JSON-ready values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        raise TypeError("floating point values have no place in an exact report")
    if isinstance(obj, GaussianRational):
        return str(obj)
    if type(obj) is type(mpq(0)):
        return str(obj)
    if isinstance(obj, MultiPolynomial):
        return polynomial_json(obj)
    if isinstance(obj, RationalFunction):
        return {"numerator": polynomial_json(obj.num), "denominator": polynomial_json(obj.den),
                "text": obj.to_expr()}
    if isinstance(obj, NotFound):
        return {"status": "not_found", "searched": to_jsonable(obj.searched), "reason": obj.reason}
    if isinstance(obj, Annihilator):
        return {
            "status": "found",
            "polynomial": polynomial_json(obj.poly),
            "symbol": obj.symbol,
            "variables": list(obj.variables),
            "order": obj.order,
            "degrees": list(obj.degrees),
            "pivot": list(obj.pivot),
            "kernel_dim": obj.kernel_dim,
            "searched": to_jsonable(obj.searched),
        }
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if dataclasses.is_dataclass(obj):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
               if not f.name.startswith("_")}
        return out
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(result, command: str | None = None, **extra) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, schema version."""
    doc = {"schema_version": SCHEMA_VERSION, "result": to_jsonable(result)}
    if command is not None:
        doc["command"] = command
    doc.update({k: to_jsonable(v) for k, v in extra.items()})
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def polynomial_from_json(doc: dict) -> MultiPolynomial:
    """Inverse of :func:`polynomial_json` for exact polynomials and series."""
    table = VariableTable.from_names(doc["variables"], with_partners=False)
    terms = {tuple(t["exps"]): GaussianRational.parse(t["coeff"]) for t in doc["terms"]}
    return MultiPolynomial(table, terms, doc.get("order"))
