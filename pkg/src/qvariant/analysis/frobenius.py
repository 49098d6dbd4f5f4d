"""
x=0 与 x=inf 的局部分析: 特征方程、特征指数、可消去性 (apparency) 检验、
以及 Frobenius 型局部级数的递推构造。

本模块是所有闭式解的暴力对照 (oracle)。x=inf 处的一切都通过
QDifferenceEquation.reflect() 化归为 x=0 处的问题。
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Literal, Sequence

import numpy as np

from qvariant.analysis.constants import MAX_EXPONENT_TWICE, RESONANCE_RTOL
from qvariant.analysis.errors import (
    ExponentGapError,
    InvalidParameterError,
    IrrationalExponentError,
    LogarithmicCaseError,
    NotRegularSingularError,
)
from qvariant.analysis.qcore import Exponent, HalfInt, QContext, Scalar, qpow
from qvariant.analysis.qdiff import QDifferenceEquation

logger = logging.getLogger(__name__)

Anchor = Literal["zero", "infinity"]


@dataclass(frozen=True)
class ExponentPair:
    """特征方程的两个根 X = q^rho，以及 (可能时) 对应的半整数指数"""

    anchor: Anchor
    roots: tuple[Scalar, Scalar]
    exponents: tuple[HalfInt, HalfInt] | None = None


@dataclass(frozen=True)
class PowerSeriesSolution:
    """x^rho sum c_k x^k (zero) 或 x^{-rho} sum c_k x^{-k} (infinity)"""

    anchor: Anchor
    exponent: Exponent | None
    root: Scalar
    coeffs: tuple[Scalar, ...]
    # float 模式: 每个系数舍入误差的量级 (递推中各项模的累积)；exact 模式为空
    bounds: tuple[float, ...] = field(default=(), compare=False, repr=False)

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def partial_sum(self, x: Scalar) -> Scalar:
        """不含 x^rho 前因子的部分和"""
        z = x if self.anchor == "zero" else 1 / x
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


# ==================== 特征方程 ====================


def _solve_quadratic(ctx: QContext, a: Scalar, b: Scalar, c: Scalar) -> tuple[Scalar, Scalar]:
    """a X^2 + b X + c = 0"""
    if not ctx.is_exact:
        roots = np.roots([complex(a), complex(b), complex(c)])
        r1, r2 = (complex(r) for r in roots)
        return r1, r2
    disc = b * b - 4 * a * c
    if disc < 0:
        raise IrrationalExponentError(disc)
    rn, rd = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
    if rn * rn != disc.numerator or rd * rd != disc.denominator:
        raise IrrationalExponentError(disc)
    s = Fraction(rn, rd)
    return (-b - s) / (2 * a), (-b + s) / (2 * a)


def _log_abs(x: Fraction) -> float:
    return math.log(abs(x.numerator)) - math.log(x.denominator)


def exponent_of(ctx: QContext, X: Scalar) -> HalfInt | None:
    """若 X = p^m (|m| <= 4096) 返回 HalfInt(m)，否则 None"""
    if X == 0:
        return None
    if ctx.is_exact:
        p = ctx.p
        guess = round(_log_abs(X) / _log_abs(p))
        for m in (guess, guess - 1, guess + 1):
            if abs(m) <= MAX_EXPONENT_TWICE and p ** m == X:
                return HalfInt(m)
        return None
    ratio = cmath.log(complex(X)) / cmath.log(complex(ctx.p))
    m = round(ratio.real)
    if abs(m) <= MAX_EXPONENT_TWICE and abs(ratio - m) < RESONANCE_RTOL * max(1.0, abs(ratio)):
        return HalfInt(m)
    return None


def _pair_at_zero(eq: QDifferenceEquation, anchor: Anchor) -> ExponentPair:
    ctx = eq.ctx
    u0, v0, w0 = eq.u.coeff(0), eq.v.coeff(0), eq.w.coeff(0)
    if u0 == 0 or w0 == 0:
        raise NotRegularSingularError(anchor, "u_0 = 0 或 w_0 = 0")
    r1, r2 = _solve_quadratic(ctx, w0, v0, u0)
    e1, e2 = exponent_of(ctx, r1), exponent_of(ctx, r2)
    if e1 is None or e2 is None:
        return ExponentPair(anchor, (r1, r2), None)
    if e2 < e1:
        r1, r2, e1, e2 = r2, r1, e2, e1
    return ExponentPair(anchor, (r1, r2), (e1, e2))


def char_exponents_zero(eq: QDifferenceEquation) -> ExponentPair:
    """q^{-rho} u_0 + v_0 + q^{rho} w_0 = 0"""
    return _pair_at_zero(eq, "zero")


def _check_infinity(eq: QDifferenceEquation) -> None:
    d = eq.degree()
    if eq.u.degree() != d or eq.w.degree() != d:
        degrees = f"deg u={eq.u.degree()}, deg w={eq.w.degree()}, d={d}"
        raise NotRegularSingularError("infinity", degrees)


def char_exponents_infinity(eq: QDifferenceEquation) -> ExponentPair:
    """u_d X + v_d + w_d X^{-1} = 0，其中 g ~ x^{-rho}"""
    _check_infinity(eq)
    return _pair_at_zero(eq.reflect(), "infinity")


def characteristic_value(eq: QDifferenceEquation, X: Scalar) -> tuple[Scalar, float]:
    """返回 u0/X + v0 + w0 X 及其各项量级 (用于 float 容差)"""
    ctx = eq.ctx
    terms = (eq.u.coeff(0) / X, eq.v.coeff(0), eq.w.coeff(0) * X)
    return sum(terms), sum(ctx.magnitude(t) for t in terms)


def _is_resonant(ctx: QContext, value: Scalar, scale: float) -> bool:
    if ctx.is_exact:
        return value == 0
    return abs(value) <= RESONANCE_RTOL * max(scale, 1e-300)


# ==================== 递推 ====================


def _shift_parts(eq: QDifferenceEquation, j: int, Xk: Scalar) -> tuple[Scalar, float]:
    """q^{-rho-k} u_j + v_j + q^{rho+k} w_j 及三项模之和，Xk = X q^k"""
    parts = (eq.u.coeff(j) / Xk, eq.v.coeff(j), eq.w.coeff(j) * Xk)
    size = 0.0 if eq.ctx.is_exact else sum(eq.ctx.magnitude(t) for t in parts)
    return parts[0] + parts[1] + parts[2], size


def _shift_term(eq: QDifferenceEquation, j: int, Xk: Scalar) -> Scalar:
    return _shift_parts(eq, j, Xk)[0]


def _convolution(
    eq: QDifferenceEquation, coeffs, Xq, n: int, bounds: Sequence[float] = ()
) -> tuple[Scalar, float]:
    """sum_{k<n} (...)_{n-k} c_k 及参与求和的各项模之和 (float 模式)

    bounds 给出 c_k 自身的误差量级时一并计入。
    """
    ctx = eq.ctx
    d = eq.degree()
    total, scale = 0, 0.0
    for k in range(max(0, n - d), min(n, len(coeffs))):
        shift, size = _shift_parts(eq, n - k, Xq[k])
        total = total + shift * coeffs[k]
        if not ctx.is_exact:
            weight = max(ctx.magnitude(coeffs[k]), bounds[k] if k < len(bounds) else 0.0)
            scale += size * weight
    return total, scale


def _recurrence(
    eq: QDifferenceEquation, X: Scalar, N: int, label: Any
) -> tuple[list[Scalar], list[float]]:
    """返回 (系数, 误差量级)；exact 模式量级列表为空"""
    ctx = eq.ctx
    Xq = [X]
    for _ in range(N):
        Xq.append(Xq[-1] * ctx.q)
    coeffs: list[Scalar] = [ctx.one()]
    bounds: list[float] = [] if ctx.is_exact else [1.0]
    for n in range(1, N + 1):
        denom, dscale = characteristic_value(eq, Xq[n])
        conv, cscale = _convolution(eq, coeffs, Xq, n, bounds)
        if _is_resonant(ctx, denom, dscale):
            if ctx.is_zero(conv, cscale):
                logger.debug(f"exponent {label}: 共振阶 {n} 可消去，c_{n} 取 0")
                coeffs.append(ctx.zero())
                if not ctx.is_exact:
                    bounds.append(cscale)
                continue
            raise LogarithmicCaseError(label, n, conv)
        coeffs.append(ctx.check(-conv / denom))
        if not ctx.is_exact:
            size = abs(denom)
            bounds.append((cscale + ctx.magnitude(coeffs[-1]) * dscale) / size)
    return coeffs, bounds


def _root_for(eq: QDifferenceEquation, exponent: Exponent, anchor: Anchor) -> Scalar:
    X = qpow(eq.ctx, exponent)
    value, scale = characteristic_value(eq, X)
    if not eq.ctx.is_zero(value, scale):
        raise InvalidParameterError("exponent", exponent, f"不是 x={anchor} 处的特征指数")
    return X


def apparency_check(eq: QDifferenceEquation, lambda_low: Exponent, N: int) -> tuple[bool, Scalar]:
    """指数 lambda_low 与 lambda_low+N 的可消去性: 返回 (障碍项是否为零, 障碍项)"""
    if N < 1:
        raise InvalidParameterError("N", N, "指数间隔必须 >= 1")
    ctx = eq.ctx
    X = qpow(ctx, lambda_low)
    for Y in (X, X * ctx.q ** N):
        value, scale = characteristic_value(eq, Y)
        if not ctx.is_zero(value, scale):
            raise ExponentGapError(lambda_low, N)
    coeffs, bounds = _recurrence(eq, X, N - 1, lambda_low)
    Xq = [X * ctx.q ** k for k in range(N)]
    obstruction, scale = _convolution(eq, coeffs, Xq, N, bounds)
    return ctx.is_zero(obstruction, scale), obstruction


def apparency_check_infinity(
    eq: QDifferenceEquation, rho_low: Exponent, N: int
) -> tuple[bool, Scalar]:
    _check_infinity(eq)
    return apparency_check(eq.reflect(), rho_low, N)


def local_series_zero(eq: QDifferenceEquation, exponent: Exponent, N: int) -> PowerSeriesSolution:
    X = _root_for(eq, exponent, "zero")
    coeffs, bounds = _recurrence(eq, X, N, exponent)
    return PowerSeriesSolution("zero", exponent, X, tuple(coeffs), tuple(bounds))


def local_series_infinity(
    eq: QDifferenceEquation, exponent: Exponent, N: int
) -> PowerSeriesSolution:
    _check_infinity(eq)
    reflected = eq.reflect()
    X = _root_for(reflected, exponent, "infinity")
    coeffs, bounds = _recurrence(reflected, X, N, exponent)
    return PowerSeriesSolution("infinity", exponent, X, tuple(coeffs), tuple(bounds))


def residual_coefficients(eq: QDifferenceEquation, series: PowerSeriesSolution) -> list[Scalar]:
    """把截断级数代回方程，残差在 x^{rho+n} (或 x^{-rho-n}) 上的系数, n = 0..N+d"""
    target = eq if series.anchor == "zero" else eq.reflect()
    ctx = eq.ctx
    N, d = series.truncation, target.degree()
    Xq = [series.root]
    for _ in range(N + d):
        Xq.append(Xq[-1] * ctx.q)
    out = [_shift_term(target, 0, Xq[0]) * series.coeffs[0]]
    for n in range(1, N + d + 1):
        conv, _ = _convolution(target, series.coeffs, Xq, n)
        own = _shift_term(target, 0, Xq[n]) * series.coeffs[n] if n <= N else 0
        out.append(conv + own)
    return out


# ==================== 汇总 ====================


def _gap(ctx: QContext, pair: ExponentPair) -> tuple[int, Scalar] | None:
    """若两根之比为 q^N (N >= 1 整数)，返回 (N, 较低根)"""
    r1, r2 = pair.roots
    for lo, hi in ((r1, r2), (r2, r1)):
        e = exponent_of(ctx, hi / lo)
        if e is not None and e.is_integer() and e.twice > 0:
            return e.twice // 2, lo
    return None


def singularity_report(eq: QDifferenceEquation) -> dict[str, dict[str, Any]]:
    """两个锚点的指数与可消去性"""
    report: dict[str, dict[str, Any]] = {}
    for anchor, fn in (("zero", char_exponents_zero), ("infinity", char_exponents_infinity)):
        pair = fn(eq)
        target = eq if anchor == "zero" else eq.reflect()
        entry: dict[str, Any] = {"roots": pair.roots, "exponents": pair.exponents, "gap": None,
                                 "apparent": None, "obstruction": None}
        gap = _gap(eq.ctx, pair)
        if gap is not None:
            N, lo = gap
            low = exponent_of(eq.ctx, lo)
            if low is not None:
                ok, obstruction = apparency_check(target, low, N)
                entry.update(gap=N, apparent=ok, obstruction=obstruction)
        else:
            logger.info(f"{eq.name} x={anchor}: 指数差不是正整数，不做 apparency 判定")
        report[anchor] = entry
    return report
