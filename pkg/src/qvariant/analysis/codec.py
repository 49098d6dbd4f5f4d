"""
规范 JSON 形状: 有理数写作 "num/den"，复数写作 [re, im]，参数按符号名 h1 ... t3。
"""

from __future__ import annotations

from dataclasses import fields
from fractions import Fraction
from typing import Any

from qvariant.analysis.closedform import PochhammerSeries
from qvariant.analysis.constants import SERIES_SCHEMA
from qvariant.analysis.errors import InvalidParameterError
from qvariant.analysis.frobenius import PowerSeriesSolution
from qvariant.analysis.qcore import HalfInt, QContext, Scalar, coerce_exponent
from qvariant.analysis.qdiff import Params2, Params3, Poly, QDifferenceEquation


def scalar_to_json(value: Scalar | int) -> str | list[float]:
    if isinstance(value, (int, Fraction)):
        f = Fraction(value)
        return f"{f.numerator}/{f.denominator}"
    c = complex(value)
    return [c.real, c.imag]


def scalar_from_json(ctx: QContext, data: str | list[float]) -> Scalar:
    if isinstance(data, list):
        if len(data) != 2:
            raise InvalidParameterError("scalar", data, "复数必须是 [re, im]")
        return ctx.scalar(complex(data[0], data[1]))
    return ctx.scalar(Fraction(data) if ctx.is_exact else float(Fraction(data)))


def exponent_to_json(e: Any) -> str | float | list[float] | None:
    if e is None:
        return None
    if isinstance(e, HalfInt):
        return str(e)
    if isinstance(e, complex):
        return [e.real, e.imag]
    return float(e)


def poly_to_json(poly: Poly) -> list:
    return [scalar_to_json(c) for c in poly.coeffs]


def equation_to_json(eq: QDifferenceEquation) -> dict[str, Any]:
    return {
        "name": eq.name,
        "mode": eq.ctx.mode,
        "p": scalar_to_json(eq.ctx.p),
        "u": poly_to_json(eq.u),
        "v": poly_to_json(eq.v),
        "w": poly_to_json(eq.w),
    }


def params_to_json(params: Params2 | Params3) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in fields(params):
        value = getattr(params, f.name)
        if f.name.startswith("t"):
            out[f.name] = scalar_to_json(value)
        else:
            out[f.name] = exponent_to_json(value)
    return out


def coeffs_to_json(coeffs) -> list:
    return [scalar_to_json(c) for c in coeffs]


def series_to_json(series: PowerSeriesSolution | PochhammerSeries) -> dict[str, Any]:
    """局部级数或 Pochhammer 基级数的规范形状 (带 schema 标签)"""
    if isinstance(series, PochhammerSeries):
        return {
            "schema": SERIES_SCHEMA,
            "kind": "pochhammer",
            "label": series.label,
            "prefactor_exponent": exponent_to_json(series.prefactor_exponent),
            "node": scalar_to_json(series.node),
            "orientation": series.orientation,
            "coeffs": coeffs_to_json(series.coeffs),
        }
    return {
        "schema": SERIES_SCHEMA,
        "kind": "power",
        "anchor": series.anchor,
        "exponent": exponent_to_json(series.exponent),
        "root": scalar_to_json(series.root),
        "coeffs": coeffs_to_json(series.coeffs),
    }


def exponent_from_json(ctx: QContext, data: str | float | list[float] | None) -> Any:
    if data is None:
        return None
    if isinstance(data, list):
        return complex(data[0], data[1])
    return coerce_exponent(data, ctx.mode)


def series_from_json(ctx: QContext, data: dict[str, Any]) -> PowerSeriesSolution | PochhammerSeries:
    """series_to_json 的逆；schema 不符时报错"""
    if data.get("schema") != SERIES_SCHEMA:
        raise InvalidParameterError("schema", data.get("schema"), f"期望 {SERIES_SCHEMA}")
    coeffs = tuple(scalar_from_json(ctx, c) for c in data["coeffs"])
    exponent = exponent_from_json(ctx, data.get("prefactor_exponent", data.get("exponent")))
    if data["kind"] == "pochhammer":
        node = scalar_from_json(ctx, data["node"])
        return PochhammerSeries(exponent, node, data["orientation"], coeffs, data.get("label", ""))
    if data["kind"] == "power":
        root = scalar_from_json(ctx, data["root"])
        return PowerSeriesSolution(data["anchor"], exponent, root, coeffs)
    raise InvalidParameterError("kind", data["kind"], "只支持 pochhammer / power")
