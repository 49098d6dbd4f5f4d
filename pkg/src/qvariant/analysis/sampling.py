"""
带种子的参数抽样。

半整数参数在 [-4, 4] 上以 1/2 为步长均匀抽取，t 取分子分母不超过 9 的小有理数。
每个抽样下标有独立的随机源，并行执行时结果与顺序无关。
"""

from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import Any, Callable, TypeVar

from qvariant.analysis.constants import HALF_INT_RANGE, MAX_DRAW_ATTEMPTS, T_MAX_NUMERATOR
from qvariant.analysis.errors import InvalidParameterError, QVariantError
from qvariant.analysis.qcore import HalfInt, QContext, Scalar, coerce_exponent
from qvariant.analysis.qdiff import HALF, Params2, Params3

logger = logging.getLogger(__name__)

P = TypeVar("P")


def rng_for(seed: int, index: int) -> random.Random:
    """第 index 次抽样的随机源"""
    return random.Random(seed * 1_000_003 + index)


def half_int(rng: random.Random) -> HalfInt:
    lo, hi = HALF_INT_RANGE
    return HalfInt(rng.randint(lo, hi))


def small_rational(rng: random.Random, signed: bool = True) -> Fraction:
    value = Fraction(rng.randint(1, T_MAX_NUMERATOR), rng.randint(1, T_MAX_NUMERATOR))
    if signed and rng.random() < 0.5:
        value = -value
    return value


def _distinct_ts(rng: random.Random, k: int) -> list[Fraction]:
    ts: list[Fraction] = []
    while len(ts) < k:
        t = small_rational(rng)
        if t not in ts:
            ts.append(t)
    return ts


def _convert(ctx: QContext, exps: dict[str, HalfInt], ts: dict[str, Fraction]) -> dict:
    out = {k: coerce_exponent(v, ctx.mode) for k, v in exps.items()}
    out.update({k: ctx.scalar(v) for k, v in ts.items()})
    return out


def draw_params2(rng: random.Random, ctx: QContext) -> Params2:
    names = ("h1", "h2", "l1", "l2", "alpha1", "alpha2")
    exps = {k: half_int(rng) for k in names}
    s = exps["h1"] + exps["h2"] - exps["l1"] - exps["l2"] - exps["alpha1"] - exps["alpha2"] + 1
    if not s.is_integer():
        # λ 为半整数要求 s 为整数
        exps["alpha2"] = exps["alpha2"] + HALF
    t1, t2 = _distinct_ts(rng, 2)
    return Params2(**_convert(ctx, exps, {"t1": t1, "t2": t2}))


def draw_params3(rng: random.Random, ctx: QContext) -> Params3:
    names = ("h1", "h2", "h3", "l1", "l2", "l3", "alpha")
    exps = {k: half_int(rng) for k in names}
    s = exps["h1"] + exps["h2"] + exps["h3"] - exps["l1"] - exps["l2"] - exps["l3"] + 1
    if not s.is_integer():
        exps["l3"] = exps["l3"] + HALF
    t1, t2, t3 = _distinct_ts(rng, 3)
    return Params3(**_convert(ctx, exps, {"t1": t1, "t2": t2, "t3": t3}))


def draw_restricted_params2(rng: random.Random, ctx: QContext) -> Params2:
    """t1 = 1, h1 = 1/2, h2 - l2 = alpha1 + alpha2 + l1 - 3/2"""
    a1, a2, l1, l2 = (half_int(rng) for _ in range(4))
    h2 = l2 + a1 + a2 + l1 - HalfInt(3)
    t2 = small_rational(rng)
    exps = {"h1": HALF, "h2": h2, "l1": l1, "l2": l2, "alpha1": a1, "alpha2": a2}
    return Params2(**_convert(ctx, exps, {"t1": Fraction(1), "t2": t2}))


def draw_scalars(rng: random.Random, ctx: QContext, k: int) -> list[Scalar]:
    return [ctx.scalar(small_rational(rng)) for _ in range(k)]


def draw_valid(
    draw: Callable[[random.Random], P],
    rng: random.Random,
    validate: Callable[[P], Any] | None = None,
    attempts: int = MAX_DRAW_ATTEMPTS,
) -> tuple[P, Any]:
    """
    重复抽样直到 validate 不抛出 QVariantError，返回 (参数, validate 的结果)。

    共振、分母为零、节点重合等退化抽样在这里被拒绝。
    """
    last: QVariantError | None = None
    for attempt in range(attempts):
        try:
            params = draw(rng)
            prepared = validate(params) if validate is not None else None
            return params, prepared
        except QVariantError as e:
            last = e
            logger.debug(f"拒绝第 {attempt} 次抽样: {e}")
    raise InvalidParameterError("draw", attempts, f"连续 {attempts} 次抽样均被拒绝: {last}")
