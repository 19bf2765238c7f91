"""JSON and text renderings of a closure result.

Report layout::

    {
      "r": "2",                       # exactly as given
      "precision_bits": 128,
      "max_precision_bits": 4096,
      "j_prime": 5, "j0": 2, "ell": 3,
      "intervals": [
        {"lo": {"expr": "1", "closed_form": "1", "value_lo": "1", "value_hi": "1"},
         "hi": {"expr": "T_2", "closed_form": "2/3*zeta(2)", "value_lo": ..., "value_hi": ...},
         "density": {"num": 1, "den": 3}},
        ...
      ],
      "zeta": {"value_lo": ..., "value_hi": ...}
    }

``closed_form`` is present only for positive-integer r. Decimal values are
rounded outward to 40 significant digits, so ``value_lo <= true <= value_hi``.
"""

from __future__ import annotations

import decimal
import json
from fractions import Fraction
from typing import Any, Union

from .closure import ClosureResult
from .endpoints import (
    ClosedInterval,
    EndpointExpr,
    expr_eval,
    render_closed_form,
)
from .oracle import parse_endpoint
from .realnum import ExactReal, is_positive_integer, parse_real, zeta_enclosure

DIGITS = 40


def _round(x: Fraction, rounding: str, digits: int = DIGITS) -> str:
    if x == 0:
        return "0"
    ctx = decimal.Context(prec=digits, rounding=rounding)
    d = ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    return format(d.normalize(ctx), "f") if abs(d.adjusted()) < 30 else str(d.normalize(ctx))


def value_bounds(value: ExactReal, digits: int = DIGITS) -> tuple[str, str]:
    """Outward-rounded decimal strings bracketing ``value``."""
    if isinstance(value, Fraction):
        lo = hi = value
    else:
        lo, hi = value.bounds()
    return _round(lo, decimal.ROUND_FLOOR, digits), _round(hi, decimal.ROUND_CEILING, digits)


def _endpoint(e: EndpointExpr, r: Fraction, prec: int) -> dict[str, Any]:
    out: dict[str, Any] = {"expr": e.render()}
    if is_positive_integer(r):
        out["closed_form"] = render_closed_form(e, r)
    out["value_lo"], out["value_hi"] = value_bounds(expr_eval(e, r, prec))
    return out


def closure_report(result: ClosureResult, r_text: str | None = None) -> dict[str, Any]:
    r = result.r
    prec = result.precision.base
    intervals = []
    for interval, d in zip(result.intervals, result.densities):
        intervals.append({
            "lo": _endpoint(interval.lo, r, prec),
            "hi": _endpoint(interval.hi, r, prec),
            "density": {"num": d.numerator, "den": d.denominator},
        })
    z_lo, z_hi = value_bounds(zeta_enclosure(r, prec))
    return {
        "r": r_text if r_text is not None else str(r),
        "precision_bits": prec,
        "max_precision_bits": result.precision.max,
        "j_prime": result.j_prime,
        "j0": result.j0,
        "ell": result.ell,
        "intervals": intervals,
        "zeta": {"value_lo": z_lo, "value_hi": z_hi},
    }


def symbolic_report(result: ClosureResult, r_text: str | None = None) -> dict[str, Any]:
    """The precision-independent part of :func:`closure_report`."""
    full = closure_report(result, r_text)
    for item in full["intervals"]:
        for side in ("lo", "hi"):
            item[side].pop("value_lo")
            item[side].pop("value_hi")
    for key in ("precision_bits", "max_precision_bits", "zeta"):
        full.pop(key)
    return full


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def load_report(data: Union[str, dict]) -> tuple[Fraction, list, list[Fraction]]:
    """``(r, intervals, densities)`` from a report. Intervals are
    :class:`ClosedInterval` when both endpoints are expressions, otherwise
    ``(lo, hi)`` pairs."""
    if isinstance(data, str):
        data = json.loads(data)
    r = parse_real(data["r"])
    intervals: list = []
    densities = []
    for item in data["intervals"]:
        lo, hi = parse_endpoint(item["lo"]["expr"]), parse_endpoint(item["hi"]["expr"])
        if isinstance(lo, EndpointExpr) and isinstance(hi, EndpointExpr):
            intervals.append(ClosedInterval(lo, hi))
        else:
            intervals.append((lo, hi))
        dens = item.get("density")
        densities.append(Fraction(dens["num"], dens["den"]) if dens else None)
    return r, intervals, densities


def render_text(result: ClosureResult, r_text: str | None = None) -> str:
    report = closure_report(result, r_text)
    lines = [
        f"r = {report['r']}  j' = {report['j_prime']}  j0 = {report['j0']}  ell = {report['ell']}",
        f"zeta(r) in [{report['zeta']['value_lo']}, {report['zeta']['value_hi']}]",
    ]
    for k, item in enumerate(report["intervals"], 1):
        lo, hi = item["lo"], item["hi"]
        name_lo = lo.get("closed_form", lo["expr"])
        name_hi = hi.get("closed_form", hi["expr"])
        d = item["density"]
        lines.append(
            f"I_{k} = [{name_lo}, {name_hi}]  ~ [{lo['value_lo'][:12]}, {hi['value_hi'][:12]}]"
            f"  density {d['num']}/{d['den']}"
        )
        if "closed_form" in lo:
            lines.append(f"      [{lo['expr']}, {hi['expr']}]")
    return "\n".join(lines) + "\n"

