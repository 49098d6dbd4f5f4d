"""
退化阶梯: 三次变体 --(t3 -> inf)--> 二次变体 --(t2 -> 0)--> q 超几何方程 --(q -> 1)--> Fuchs 型常微分方程。

exact 模式下参数极限通过 LaurentSeries 标量计算 (t3 = 1/s 或 t2 = s，取 s^0 项)；
float 模式下在一组 t3 = 10^k 上拟合收敛阶，仅作诊断。
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field
from typing import Any, Literal, Sequence

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial

from qvariant.analysis.closedform import (
    PochhammerSeries,
    conj3_series,
    g1_series,
    g2_series,
    g3_series,
    hahn_series,
    phi21_coeffs,
    qhyp_infinity_series,
    residual_report,
)
from qvariant.analysis.constants import (
    DEFAULT_EPSILONS,
    LAURENT_PRECISION,
    LIMIT_FLOOR_RATIO,
    ODE_GRID_POINTS,
    T3_POWERS,
)
from qvariant.analysis.errors import (
    InvalidParameterError,
    LimitDivergenceError,
    UnknownTargetError,
)
from qvariant.analysis.frobenius import PowerSeriesSolution, residual_coefficients
from qvariant.analysis.laurent import LaurentSeries
from qvariant.analysis.qcore import Exponent, HalfInt, QContext, Scalar, qpoch_table, qpow
from qvariant.analysis.qdiff import (
    HALF,
    Params2,
    Params3,
    Poly,
    QDifferenceEquation,
    make_qhypergeometric,
    make_variant_deg2,
    make_variant_deg3,
)

logger = logging.getLogger(__name__)


# ==================== 报告 ====================


@dataclass
class LimitReport:
    """一次极限检验: 参数序列上的差距与拟合阶"""

    parameter: str
    label: str
    values: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)
    slope: float | None = None
    exact_match: bool | None = None
    passed: bool = False
    details: dict[str, Any] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "label": [self.label] * len(self.values),
            self.parameter: self.values,
            "gap": self.gaps,
            "slope": [self.slope] * len(self.values),
        })


def fit_slope(values: Sequence[float], gaps: Sequence[float]) -> float | None:
    """log(gap) 对 log(value) 的最小二乘斜率；有效点少于 2 个时返回 None"""
    pts = [(v, g) for v, g in zip(values, gaps) if g > 0 and v > 0]
    if len(pts) < 2:
        return None
    xs = np.log([v for v, _ in pts])
    ys = np.log([g for _, g in pts])
    return float(np.polyfit(xs, ys, 1)[0])


def decaying_prefix(gaps: Sequence[float], ratio: float = LIMIT_FLOOR_RATIO) -> int:
    """gap 逐点至少缩小 ratio 倍的最长前缀长度"""
    if not gaps:
        return 0
    n = 1
    while n < len(gaps) and gaps[n] * ratio <= gaps[n - 1]:
        n += 1
    return n


def _limit_value(value: Scalar, parameter: str, order: int) -> Scalar:
    """s^0 项；出现负幂时极限发散"""
    if not isinstance(value, LaurentSeries):
        return value
    v = value.valuation()
    if v is not None and v < 0:
        raise LimitDivergenceError(parameter, order)
    return value.coefficient(0)


def _float_context(ctx: QContext) -> QContext:
    if not ctx.is_exact:
        return ctx
    return QContext.floating(complex(float(ctx.p)), tolerance=ctx.tolerance)


def _float_exp(e: Exponent) -> float | complex:
    return e if isinstance(e, complex) else float(e)


def float_params2(p2: Params2) -> Params2:
    return Params2(
        *(_float_exp(getattr(p2, k)) for k in ("h1", "h2", "l1", "l2", "alpha1", "alpha2")),
        complex(p2.t1), complex(p2.t2),
    )


def float_params3(p3: Params3) -> Params3:
    return Params3(
        *(_float_exp(getattr(p3, k)) for k in ("h1", "h2", "h3", "l1", "l2", "l3", "alpha")),
        complex(p3.t1), complex(p3.t2), complex(p3.t3),
    )


# ==================== t3 -> inf ====================


def degenerate_deg3_to_deg2(p3: Params3) -> Params2:
    """{alpha1, alpha2} = {alpha, alpha - h3 + l3}"""
    return Params2(p3.h1, p3.h2, p3.l1, p3.l2, p3.alpha, p3.alpha - p3.h3 + p3.l3, p3.t1, p3.t2)


def _poly_limit(poly: Poly, parameter: str) -> Poly:
    return Poly(tuple(_limit_value(c, parameter, k) for k, c in enumerate(poly.coeffs)))


def limit_operator_t3(
    ctx: QContext, p3: Params3, rel: int = LAURENT_PRECISION
) -> QDifferenceEquation:
    """三次变体除以 -q^{h3+1/2} t3 后的首项 (exact)"""
    if not ctx.is_exact:
        raise InvalidParameterError("mode", ctx.mode, "首项提取只在 exact 模式下进行")
    formal = p3.replace(t3=LaurentSeries.at_infinity(rel))
    eq = make_variant_deg3(ctx, formal)
    eq = eq.scaled(-1 / (qpow(ctx, p3.h3 + HALF) * formal.t3))
    return QDifferenceEquation(
        ctx,
        _poly_limit(eq.u, "t3"),
        _poly_limit(eq.v, "t3"),
        _poly_limit(eq.w, "t3"),
        "var3|t3->inf",
    )


def _operator_distance(a: QDifferenceEquation, b: QDifferenceEquation) -> float:
    gap = 0.0
    for pa, pb in zip(a.polys(), b.polys()):
        n = max(len(pa.coeffs), len(pb.coeffs))
        for k in range(n):
            gap = max(gap, abs(complex(pa.coeff(k)) - complex(pb.coeff(k))))
    return gap


def operator_gap_t3(ctx: QContext, p3: Params3, powers: Sequence[int] = T3_POWERS) -> LimitReport:
    """float 模式: t3 = 10^k 时归一化三次算子与二次变体的系数差距"""
    fctx = _float_context(ctx)
    base = float_params3(p3)
    target = make_variant_deg2(fctx, degenerate_deg3_to_deg2(base))
    report = LimitReport("t3", "operator")
    for k in powers:
        t3 = complex(10.0 ** k)
        params = base.replace(t3=t3)
        eq = make_variant_deg3(fctx, params).scaled(-1 / (qpow(fctx, params.h3 + 0.5) * t3))
        report.values.append(10.0 ** k)
        report.gaps.append(_operator_distance(eq, target))
    report.slope = fit_slope(report.values, report.gaps)
    report.passed = report.slope is not None and report.slope <= -0.9
    logger.debug(f"operator t3 gaps={report.gaps} slope={report.slope}")
    return report


def _conj_target(
    ctx: QContext, p3: Params3, family: str, perm: tuple[int, ...], N: int
) -> tuple[list[Scalar], str]:
    """印刷出的极限目标: 二次变体的某个解的系数"""
    p2 = degenerate_deg3_to_deg2(p3)
    if family == "I" and perm == (1, 2, 3):
        return list(g2_series(ctx, p2, 1, N).coeffs), "g2[1]"
    if family == "I" and perm == (2, 1, 3):
        return list(g2_series(ctx, p2, 2, N).coeffs), "g2[2]"
    if family == "II" and perm == (1, 2, 3):
        return list(g3_series(ctx, p2, 1, N).coeffs), "g3[1]"
    if family == "II" and perm == (2, 1, 3):
        return list(g3_series(ctx, p2, 2, N).coeffs), "g3[2]"
    if family == "II" and perm in ((3, 1, 2), (3, 2, 1)):
        return list(g1_series(ctx, p2, N).coeffs), "g1"
    known = ("I(1,2,3)", "I(2,1,3)", "II(1,2,3)", "II(2,1,3)", "II(3,1,2)", "II(3,2,1)")
    raise UnknownTargetError("limit", f"{family}{perm}", known)


def _collapsed(ctx: QContext, series: PochhammerSeries, collapse: bool) -> list[Scalar]:
    """节点随 t3 发散时，c_n (d/x;q)_n -> c_n (-d)^n q^{n(n-1)/2} x^{-n}"""
    if not collapse:
        return list(series.coeffs)
    out, factor, qk = [], ctx.one(), ctx.one()
    for c in series.coeffs:
        out.append(c * factor)
        factor = factor * (-series.node) * qk
        qk = qk * ctx.q
    return out


def limit_conj_coeffs(
    ctx: QContext,
    p3: Params3,
    family: Literal["I", "II"],
    perm: Sequence[int],
    N: int,
    powers: Sequence[int] = T3_POWERS,
) -> LimitReport:
    """猜想解系数在 t3 -> inf 下的极限，与二次变体的解比较"""
    perm = tuple(perm)
    collapse = perm[0] == 3
    _, label = _conj_target(ctx, p3, family, perm, 0)
    report = LimitReport("t3", f"conj{family}{perm}->{label}")

    if ctx.is_exact:
        formal = p3.replace(t3=LaurentSeries.at_infinity())
        series = conj3_series(ctx, formal, family, perm, N)
        limits = [_limit_value(c, "t3", n) for n, c in enumerate(_collapsed(ctx, series, collapse))]
        target, _ = _conj_target(ctx, p3, family, perm, N)
        report.exact_match = all(a == b for a, b in zip(limits, target))
        report.details["limit"] = limits
        if not report.exact_match:
            logger.error(f"{report.label}: 首项极限与目标不一致")

    fctx = _float_context(ctx)
    base = float_params3(p3)
    target_f, _ = _conj_target(fctx, base, family, perm, N)
    values: list[float] = []
    gaps: list[float] = []
    for k in powers:
        params = base.replace(t3=complex(10.0 ** k))
        coeffs = _collapsed(fctx, conj3_series(fctx, params, family, perm, N), collapse)
        values.append(10.0 ** k)
        gaps.append(max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(coeffs, target_f)))
    # 坍缩族的系数乘以 t3^n，大 t3 处 gap 停在舍入平台上，不参与拟合
    keep = decaying_prefix(gaps)
    if keep < len(gaps):
        report.details["noise_floor"] = {"values": values[keep:], "gaps": gaps[keep:]}
        logger.debug(f"{report.label}: t3 >= {values[keep]:.0e} 处 gap 不再下降，截去 {len(gaps) - keep} 点")
    report.values, report.gaps = values[:keep], gaps[:keep]
    report.slope = fit_slope(report.values, report.gaps)
    converged = all(g == 0 for g in report.gaps) if report.slope is None else report.slope <= -0.9
    report.passed = report.exact_match is not False and converged
    return report


# ==================== t2 -> 0 ====================


def limit_operator_equation(ctx: QContext, p2: Params2) -> QDifferenceEquation:
    """t2 -> 0 后约去公因子 x 的一阶算子 (按书面形式)"""
    u = Poly.from_roots([qpow(ctx, p2.h1 + HALF) * p2.t1])
    w = Poly.from_roots([qpow(ctx, p2.l1 - HALF) * p2.t1], lead=qpow(ctx, p2.alpha1 + p2.alpha2))
    P = qpow(ctx, p2.total / 2)
    v = Poly((
        P * (qpow(ctx, -p2.h2) + qpow(ctx, -p2.l2)) * p2.t1,
        -(qpow(ctx, p2.alpha1) + qpow(ctx, p2.alpha2)),
    ))
    return QDifferenceEquation(ctx, u, v, w, "var2|t2->0")


def limit_operator_t2(ctx: QContext, p2: Params2) -> QDifferenceEquation:
    """exact: 在 t2 = s 上构造二次变体，取 s^0 后整体除以 x"""
    if not ctx.is_exact:
        raise InvalidParameterError("mode", ctx.mode, "首项提取只在 exact 模式下进行")
    eq = make_variant_deg2(ctx, p2.replace(t2=LaurentSeries.at_zero()))
    polys = []
    for poly in eq.polys():
        lim = _poly_limit(poly, "t2")
        if lim.coeff(0) != 0:
            raise LimitDivergenceError("t2", 0)
        polys.append(Poly(lim.coeffs[1:]))
    return QDifferenceEquation(ctx, *polys, "var2|t2->0")


@dataclass(frozen=True)
class QHypLimit:
    equation: QDifferenceEquation
    lam: Exponent
    matches_printed: bool | None
    abc: tuple[Scalar, Scalar, Scalar] | None
    matches_qhyp: bool | None
    note: str = ""


def _same(ctx: QContext, a, b) -> bool:
    if isinstance(a, HalfInt) or isinstance(b, HalfInt):
        try:
            return HalfInt.of(a) == HalfInt.of(b)
        except InvalidParameterError:
            return abs(float(a) - float(b)) < ctx.tolerance
    if ctx.is_exact:
        return a == b
    return abs(complex(a) - complex(b)) <= ctx.tolerance


def restriction_holds(ctx: QContext, p2: Params2) -> bool:
    """t1 = 1, h1 = 1/2, h2 - l2 = alpha1 + alpha2 + l1 - 3/2"""
    return (
        _same(ctx, p2.t1, 1)
        and _same(ctx, p2.h1, HALF)
        and _same(ctx, p2.h2 - p2.l2, p2.alpha1 + p2.alpha2 + p2.l1 - HalfInt(3))
    )


def restriction_abc(ctx: QContext, p2: Params2) -> tuple[Scalar, Scalar, Scalar]:
    return (
        qpow(ctx, p2.alpha1),
        qpow(ctx, p2.alpha2),
        qpow(ctx, p2.alpha1 + p2.alpha2 + p2.l1 - HALF),
    )


def restricted_params(ctx: QContext, alpha1, alpha2, l1, l2) -> Params2:
    """满足限制映射的二次变体参数 (t2 任取，这里取 1)"""
    h1 = HALF if ctx.is_exact else 0.5
    h2 = l2 + alpha1 + alpha2 + l1 - (HalfInt(3) if ctx.is_exact else 1.5)
    return Params2(h1, h2, l1, l2, alpha1, alpha2, ctx.one(), ctx.one())


def degenerate_deg2_to_qhyp(ctx: QContext, p2: Params2) -> QHypLimit:
    eq = limit_operator_equation(ctx, p2)
    matches = limit_operator_t2(ctx, p2).same_as(eq) if ctx.is_exact else None
    if not restriction_holds(ctx, p2):
        note = "参数不满足限制映射 (t1=1, h1=1/2, h2-l2=alpha1+alpha2+l1-3/2)，跳过与 q 超几何方程的比较"
        logger.warning(note)
        return QHypLimit(eq, p2.lam, matches, None, None, note)
    a, b, c = restriction_abc(ctx, p2)
    qhyp = make_qhypergeometric(ctx, a, b, c)
    if ctx.is_exact:
        same = qhyp.same_as(eq)
    else:
        same = _operator_distance(qhyp, eq) <= ctx.tolerance
    return QHypLimit(eq, p2.lam, matches, (a, b, c), same)


# ---------- 解的 t2 -> 0 极限 ----------


def _g1_display(ctx: QContext, p2: Params2, N: int) -> list[Scalar]:
    lam = p2.lam
    A = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1), N)
    D = qpoch_table(ctx, qpow(ctx, p2.alpha1 - p2.alpha2 + 1), N)
    K = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1 - p2.h2 + p2.l2), N)
    Q = qpoch_table(ctx, ctx.q, N)
    z = qpow(ctx, p2.l1 + HALF) * p2.t1
    return [A[n] * K[n] / (D[n] * Q[n]) * z ** n for n in range(N + 1)]


def _g2_display(ctx: QContext, p2: Params2, i: int, N: int) -> list[Scalar]:
    lam = p2.lam
    A1 = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1), N)
    A2 = qpoch_table(ctx, qpow(ctx, lam + p2.alpha2), N)
    Q = qpoch_table(ctx, ctx.q, N)
    if i == 1:
        D = qpoch_table(ctx, qpow(ctx, p2.h1 - p2.l1 + 1), N)
        return [ctx.q ** n * A1[n] * A2[n] / (D[n] * Q[n]) for n in range(N + 1)]
    D = qpoch_table(ctx, qpow(ctx, p2.h2 - p2.l2 + 1), N)
    z = 1 / (qpow(ctx, p2.h1 - HALF) * p2.t1)
    return [A1[n] * A2[n] / (D[n] * Q[n]) * z ** n for n in range(N + 1)]


def _g3_display(ctx: QContext, p2: Params2, N: int) -> list[Scalar]:
    lam = p2.lam
    A1 = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1), N)
    K = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1 - p2.h2 + p2.l2), N)
    D = qpoch_table(ctx, qpow(ctx, p2.h1 - p2.l1 + 1), N)
    Q = qpoch_table(ctx, ctx.q, N)
    return [ctx.q ** n * A1[n] * K[n] / (D[n] * Q[n]) for n in range(N + 1)]


@dataclass(frozen=True)
class SolutionLimit:
    name: str
    coeffs: tuple[Scalar, ...]
    matches_display: bool
    solves_limit_operator: bool
    matches_qhyp: bool | None


def limit_deg2_solutions_t2(ctx: QContext, p2: Params2, N: int) -> dict[str, SolutionLimit]:
    """g1, g2[1], g2[2], g3[1] 在 t2 -> 0 下的精确极限"""
    if not ctx.is_exact:
        raise InvalidParameterError("mode", ctx.mode, "解的极限只在 exact 模式下提取")
    formal = p2.replace(t2=LaurentSeries.at_zero())
    eq = limit_operator_equation(ctx, p2)
    restricted = restriction_holds(ctx, p2)
    abc = restriction_abc(ctx, p2) if restricted else None
    out: dict[str, SolutionLimit] = {}

    def lim(values) -> tuple[Scalar, ...]:
        return tuple(_limit_value(c, "t2", n) for n, c in enumerate(values))

    # g1: t2 多项式，直接代入
    g1 = lim(g1_series(ctx, formal, N).coeffs)
    s1 = PowerSeriesSolution("infinity", p2.alpha1, qpow(ctx, p2.alpha1), g1)
    ok = all(r == 0 for r in residual_coefficients(eq, s1)[: N + 1])
    qh = None
    if abc is not None:
        qh = qhyp_infinity_series(ctx, *abc, N).coeffs == g1
    out["g1"] = SolutionLimit("g1", g1, list(g1) == _g1_display(ctx, p2, N), ok, qh)

    # g2[1]: 节点不含 t2
    g21 = lim(g2_series(ctx, formal, 1, N).coeffs)
    node = qpow(ctx, p2.l1 - HALF) * p2.t1
    series = PochhammerSeries(p2.lam, node, "ascending", g21, "g2[1]|t2->0")
    ok = residual_report(eq, series, N - 1).passed
    qh = None
    if abc is not None:
        hahn = hahn_series(ctx, *abc, N)
        qh = hahn.coeffs == g21 and hahn.node == series.node
    out["g2[1]"] = SolutionLimit("g2[1]", g21, list(g21) == _g2_display(ctx, p2, 1, N), ok, qh)

    # g2[2]: 节点 q^{l2-1/2} t2 -> 0，(x/d;q)_n -> (-x/d)^n q^{n(n-1)/2}
    s22 = g2_series(ctx, formal, 2, N)
    d = s22.node
    collapsed, factor, qk = [], ctx.one(), ctx.one()
    for c in s22.coeffs:
        collapsed.append(c * factor)
        factor = factor * (-qk) / d
        qk = qk * ctx.q
    g22 = lim(collapsed)
    s2 = PowerSeriesSolution("zero", p2.lam, qpow(ctx, p2.lam), g22)
    ok = all(r == 0 for r in residual_coefficients(eq, s2)[: N + 1])
    qh = None
    if abc is not None:
        qh = tuple(phi21_coeffs(ctx, *abc, N)) == g22
    out["g2[2]"] = SolutionLimit("g2[2]", g22, list(g22) == _g2_display(ctx, p2, 2, N), ok, qh)

    # g3[1]: 分母与内层和同阶发散，比值有限
    g31 = lim(g3_series(ctx, formal, 1, N).coeffs)
    node = qpow(ctx, p2.h1 + HALF) * p2.t1
    series = PochhammerSeries(-p2.alpha1, node, "descending", g31, "g3[1]|t2->0")
    ok = residual_report(eq, series, N - 1).passed
    qh = None
    if abc is not None:
        qh = residual_report(make_qhypergeometric(ctx, *abc), series, N - 1).passed
    out["g3[1]"] = SolutionLimit("g3[1]", g31, list(g31) == _g3_display(ctx, p2, N), ok, qh)

    for item in out.values():
        logger.debug(
            f"{item.name}: display={item.matches_display} solves={item.solves_limit_operator}"
        )
    return out


# ==================== q -> 1 ====================


@dataclass(frozen=True)
class OdeSpec:
    """second(x) y'' + first(x) y' + zeroth(x) y = 0"""

    name: str
    second: Polynomial
    first: Polynomial
    zeroth: Polynomial
    singular_points: tuple[Any, ...]
    riemann_scheme: dict[str, tuple[Exponent, Exponent]]
    gauss: tuple[Exponent, Exponent, Exponent] | None = None

    def apply(self, f: Polynomial, x: np.ndarray) -> np.ndarray:
        d1, d2 = f.deriv(1), f.deriv(2)
        return self.second(x) * d2(x) + self.first(x) * d1(x) + self.zeroth(x) * f(x)

    def fuchs_sum(self) -> Exponent:
        return sum((a + b for a, b in self.riemann_scheme.values()), 0)

    def fuchs_expected(self) -> int:
        """二阶 Fuchs 型方程: 全部指数之和 = 奇点个数 - 2"""
        return len(self.riemann_scheme) - 2

    def fuchs_holds(self) -> bool:
        total = self.fuchs_sum()
        if isinstance(total, HalfInt):
            return total == self.fuchs_expected()
        return abs(complex(total) - self.fuchs_expected()) < 1e-9


def _c(value) -> complex:
    if isinstance(value, HalfInt):
        return complex(float(value))
    return complex(value)


def _lin(root) -> Polynomial:
    """x - root"""
    return Polynomial([-_c(root), 1.0])


def continuum_ode_deg2(p2: Params2) -> OdeSpec:
    t1, t2 = _c(p2.t1), _c(p2.t2)
    if abs(t1 - t2) < 1e-14:
        raise InvalidParameterError("t2", p2.t2, "t1 = t2 的合流情形不支持")
    lam = p2.lam
    L = _c(lam)
    h1, h2, l1, l2 = (_c(getattr(p2, k)) for k in ("h1", "h2", "l1", "l2"))
    a1, a2 = _c(p2.alpha1), _c(p2.alpha2)
    x = Polynomial([0.0, 1.0])
    pi = _lin(t1) * _lin(t2)
    second = x * x * pi
    first = ((1 + h2 - l2) * x * _lin(t1) + (1 + h1 - l1) * x * _lin(t2) - 2 * L * pi) * x
    btilde = -L * (L - h2 + l2) * t1 - L * (L - h1 + l1) * t2
    zeroth = Polynomial([t1 * t2 * L * (L + 1), btilde, a1 * a2])
    zero = p2.l1 - p2.l1
    scheme = {
        "0": (lam, lam + 1),
        "t1": (zero, p2.l1 - p2.h1),
        "t2": (zero, p2.l2 - p2.h2),
        "inf": (p2.alpha1, p2.alpha2),
    }
    gauss = (lam + p2.alpha1, lam + p2.alpha2, p2.h1 - p2.l1 + 1)
    return OdeSpec("var2|q->1", second, first, zeroth, (0, p2.t1, p2.t2, "inf"), scheme, gauss)


def reduced_ode_deg2(p2: Params2) -> OdeSpec:
    """y = x^{-lambda} g 后 x=0 不再奇异"""
    t1, t2 = _c(p2.t1), _c(p2.t2)
    h1, h2, l1, l2 = (_c(getattr(p2, k)) for k in ("h1", "h2", "l1", "l2"))
    L, a1, a2 = _c(p2.lam), _c(p2.alpha1), _c(p2.alpha2)
    second = _lin(t1) * _lin(t2)
    first = (2 + h1 + h2 - l1 - l2) * _lin(t1) + (t1 - t2) * (h1 - l1 + 1)
    zeroth = Polynomial([(L + a1) * (L + a2)])
    zero = p2.l1 - p2.l1
    scheme = {
        "t1": (zero, p2.l1 - p2.h1),
        "t2": (zero, p2.l2 - p2.h2),
        "inf": (p2.lam + p2.alpha1, p2.lam + p2.alpha2),
    }
    gauss = (p2.lam + p2.alpha1, p2.lam + p2.alpha2, p2.h1 - p2.l1 + 1)
    return OdeSpec("var2|reduced", second, first, zeroth, (p2.t1, p2.t2, "inf"), scheme, gauss)


def gauss_ode(A: Exponent, B: Exponent, gamma: Exponent) -> OdeSpec:
    """z(1-z) y'' + {gamma - (A+B+1) z} y' - AB y = 0"""
    a, b, c = _c(A), _c(B), _c(gamma)
    z = Polynomial([0.0, 1.0])
    zero = A - A
    scheme = {"0": (zero, 1 - gamma), "1": (zero, gamma - A - B), "inf": (A, B)}
    return OdeSpec(
        "gauss", z * (1 - z), Polynomial([c, -(a + b + 1)]), Polynomial([-a * b]),
        (0, 1, "inf"), scheme, (A, B, gamma),
    )


def continuum_ode_deg3(p3: Params3) -> OdeSpec:
    ts = [_c(p3.t(i)) for i in (1, 2, 3)]
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(ts[i] - ts[j]) < 1e-14:
                raise InvalidParameterError(f"t{j + 1}", p3.t(j + 1), f"与 t{i + 1} 重合的合流情形不支持")
    nu, alpha = p3.nu, p3.alpha
    a = _c(nu) - _c(alpha)
    al = _c(alpha)
    hs = [_c(p3.h(i)) for i in (1, 2, 3)]
    ls = [_c(p3.l(i)) for i in (1, 2, 3)]
    x = Polynomial([0.0, 1.0])
    lins = [_lin(t) for t in ts]
    pi = lins[0] * lins[1] * lins[2]
    second = x * x * pi
    others = [lins[1] * lins[2], lins[0] * lins[2], lins[0] * lins[1]]
    weighted = sum(((hs[i] - ls[i] + 1) * others[i] for i in range(3)), Polynomial([0.0]))
    first = x * (x * weighted - 2 * a * pi)
    # t_i t_j 项的系数为 (nu-alpha)(nu-alpha-h_k+l_k)，k 为补下标
    btilde = a * (
        (a - hs[0] + ls[0]) * ts[1] * ts[2]
        + (a - hs[1] + ls[1]) * ts[2] * ts[0]
        + (a - hs[2] + ls[2]) * ts[0] * ts[1]
    )
    x2 = -al * sum((ls[i] - hs[i] + al) * ts[i] for i in range(3))
    zeroth = Polynomial([-ts[0] * ts[1] * ts[2] * a * (a + 1), btilde, x2, al * (al + 1)])
    zero = alpha - alpha
    scheme = {
        "0": (nu - alpha, nu - alpha + 1),
        "t1": (zero, p3.l1 - p3.h1),
        "t2": (zero, p3.l2 - p3.h2),
        "t3": (zero, p3.l3 - p3.h3),
        "inf": (alpha, alpha + 1),
    }
    gauss = (nu, nu - p3.h2 + p3.l2, p3.h1 - p3.l1 + 1)
    singular = (0, p3.t1, p3.t2, p3.t3, "inf")
    return OdeSpec("var3|q->1", second, first, zeroth, singular, scheme, gauss)


DEFAULT_TESTFN = Polynomial([1.0, -0.5, 0.3, 0.2, -0.1, 0.05, 0.01])


def continuum_residual_scaling(
    kind: Literal["deg2", "deg3"],
    params: Params2 | Params3,
    testfn: Polynomial | None = None,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    grid: np.ndarray | None = None,
) -> LimitReport:
    """q = 1+eps 时 eps^{-2}·(q 算子) 与 ODE 算子在网格上的差距，以及拟合斜率"""
    testfn = DEFAULT_TESTFN if testfn is None else testfn
    if testfn.degree() > 8:
        raise InvalidParameterError("testfn", testfn.degree(), "测试多项式次数不超过 8")
    if kind == "deg2":
        fparams = float_params2(params)  # type: ignore[arg-type]
        ode = continuum_ode_deg2(fparams)
        build = make_variant_deg2
    elif kind == "deg3":
        fparams = float_params3(params)  # type: ignore[arg-type]
        ode = continuum_ode_deg3(fparams)
        build = make_variant_deg3
    else:
        raise UnknownTargetError("ode", str(kind), ("deg2", "deg3"))
    xs = np.linspace(0.3, 2.7, ODE_GRID_POINTS) if grid is None else np.asarray(grid)
    expected = ode.apply(testfn, xs)
    report = LimitReport("epsilon", f"{kind}|q->1")
    for eps in epsilons:
        if not 0 < eps <= 0.1:
            raise InvalidParameterError("epsilon", eps, "必须在 (0, 0.1] 内")
        ctx = QContext.floating(cmath.sqrt(1 + eps))
        eq = build(ctx, fparams)
        q = ctx.q
        values = eq.u(xs) * testfn(xs / q) + eq.v(xs) * testfn(xs) + eq.w(xs) * testfn(q * xs)
        gap = float(np.max(np.abs(values / eps ** 2 - expected)))
        report.values.append(eps)
        report.gaps.append(gap)
    report.slope = fit_slope(report.values, report.gaps)
    report.passed = report.slope is not None and report.slope >= 0.9
    report.details["riemann_scheme"] = ode.riemann_scheme
    report.details["fuchs"] = ode.fuchs_holds()
    logger.info(f"{report.label}: gaps={report.gaps} slope={report.slope}")
    return report
