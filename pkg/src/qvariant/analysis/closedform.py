"""
显式解族。

- 2phi1 / Hahn 的 3phi2 解 / 无穷远处的 x^{-alpha} 2phi1 解 (q 超几何方程)
- 二次变体的 g1 (x=inf 幂级数), g2 (升 Pochhammer 基), g3 (降 Pochhammer 基)
- 三次变体的两族猜想解 (双重求和系数)
- 证明中的递推恒等式 Q 与 Q~
- Pochhammer 基级数的算子残差: 把算子作用后的多项式按同一组基重新展开
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Literal, Sequence

from qvariant.analysis.errors import (
    InvalidParameterError,
    NodeCoincidenceError,
    UnknownTargetError,
    VanishingDenominatorError,
)
from qvariant.analysis.frobenius import PowerSeriesSolution, exponent_of
from qvariant.analysis.qcore import (
    Exponent,
    HalfInt,
    QContext,
    Scalar,
    qpoch_table,
    qpow,
)
from qvariant.analysis.qdiff import (
    HALF,
    Params2,
    Params3,
    Poly,
    QDifferenceEquation,
    make_variant_deg3,
)

logger = logging.getLogger(__name__)

Orientation = Literal["ascending", "descending"]
Family = Literal["I", "II"]

PERMUTATIONS: tuple[tuple[int, int, int], ...] = (
    (1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1),
)


@dataclass(frozen=True)
class PochhammerSeries:
    """x^mu sum a_n B_n(x)，B_n = (x/d;q)_n (ascending) 或 (d/x;q)_n (descending)"""

    prefactor_exponent: Exponent
    node: Scalar
    orientation: Orientation
    coeffs: tuple[Scalar, ...]
    label: str = ""

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def with_coeffs(self, coeffs: Sequence[Scalar]) -> "PochhammerSeries":
        return replace(self, coeffs=tuple(coeffs))

    def partial_sum(self, ctx: QContext, x: Scalar) -> Scalar:
        """不含 x^mu 前因子"""
        z = x / self.node if self.orientation == "ascending" else self.node / x
        total, basis, qj = 0, ctx.one(), ctx.one()
        for a in self.coeffs:
            total = total + a * basis
            basis = basis * (1 - z * qj)
            qj = qj * ctx.q
        return total


@dataclass(frozen=True)
class ResidualReport:
    """按基展开后的残差"""

    residual: tuple[Scalar, ...]
    interior_orders: int
    max_interior: Scalar
    support: tuple[int, ...]
    passed: bool


# ==================== 工具函数 ====================


def _zero_exponent(ctx: QContext) -> Exponent:
    return HalfInt(0) if ctx.is_exact else 0.0


def _require_nonzero(ctx: QContext, values: Sequence[Scalar], factor: str) -> None:
    for n, value in enumerate(values):
        if ctx.is_zero(value):
            raise VanishingDenominatorError(factor, n)


def _q_table(ctx: QContext, N: int) -> list[Scalar]:
    return qpoch_table(ctx, ctx.q, N)


def _powers(ctx: QContext, base: Scalar, N: int) -> list[Scalar]:
    out = [ctx.one()]
    for _ in range(N):
        out.append(out[-1] * base)
    return out


def _triangular_q(ctx: QContext, N: int) -> list[Scalar]:
    """q^{k(k+1)/2}, k = 0..N"""
    out, step = [ctx.one()], ctx.one()
    for _ in range(N):
        step = step * ctx.q
        out.append(out[-1] * step)
    return out


# ==================== q 超几何方程 ====================


def phi21_coeffs(ctx: QContext, a: Scalar, b: Scalar, c: Scalar, N: int) -> list[Scalar]:
    """(a;q)_n (b;q)_n / ((c;q)_n (q;q)_n), n = 0..N"""
    A, B = qpoch_table(ctx, a, N), qpoch_table(ctx, b, N)
    C, Q = qpoch_table(ctx, c, N), _q_table(ctx, N)
    _require_nonzero(ctx, C, "(c;q)_n")
    _require_nonzero(ctx, Q, "(q;q)_n")
    return [ctx.check(A[n] * B[n] / (C[n] * Q[n])) for n in range(N + 1)]


def phi21(ctx: QContext, a: Scalar, b: Scalar, c: Scalar, x: Scalar, N: int) -> Scalar:
    """2phi1(a,b;c;q;x) 截断到 x^N"""
    total = 0
    for coeff in reversed(phi21_coeffs(ctx, a, b, c, N)):
        total = total * x + coeff
    return total


def hahn_series(ctx: QContext, a: Scalar, b: Scalar, c: Scalar, N: int) -> PochhammerSeries:
    """sum (abx/c;q)_n (a;q)_n (b;q)_n q^n / ((abq/c;q)_n (q;q)_n)"""
    A, B = qpoch_table(ctx, a, N), qpoch_table(ctx, b, N)
    D, Q = qpoch_table(ctx, a * b * ctx.q / c, N), _q_table(ctx, N)
    _require_nonzero(ctx, D, "(abq/c;q)_n")
    _require_nonzero(ctx, Q, "(q;q)_n")
    qn = _powers(ctx, ctx.q, N)
    coeffs = tuple(ctx.check(A[n] * B[n] * qn[n] / (D[n] * Q[n])) for n in range(N + 1))
    return PochhammerSeries(_zero_exponent(ctx), c / (a * b), "ascending", coeffs, "hahn")


def phi32_hahn(ctx: QContext, a: Scalar, b: Scalar, c: Scalar, x: Scalar, N: int) -> Scalar:
    return hahn_series(ctx, a, b, c, N).partial_sum(ctx, x)


def qhyp_infinity_series(
    ctx: QContext, a: Scalar, b: Scalar, c: Scalar, N: int, swap: bool = False
) -> PowerSeriesSolution:
    """x^{-alpha} 2phi1(a, aq/c; aq/b; cq/(abx))，a = q^alpha；swap=True 时 a,b 互换"""
    if swap:
        a, b = b, a
    q = ctx.q
    base = phi21_coeffs(ctx, a, a * q / c, a * q / b, N)
    z = c * q / (a * b)
    coeffs = tuple(ctx.check(cn * zn) for cn, zn in zip(base, _powers(ctx, z, N)))
    return PowerSeriesSolution("infinity", exponent_of(ctx, a) if ctx.is_exact else None, a, coeffs)


# ==================== 二次变体 ====================


def g1_series(ctx: QContext, p2: Params2, N: int) -> PowerSeriesSolution:
    """x^{-alpha1} sum c_n x^{-n}，系数含 q^{n/2}"""
    lam = p2.lam
    top = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1), N)
    den = qpoch_table(ctx, qpow(ctx, p2.alpha1 - p2.alpha2 + 1), N)
    _require_nonzero(ctx, den, "(q^{alpha1-alpha2+1};q)_n")
    A = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1 - p2.h2 + p2.l2), N)
    B = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1 - p2.h1 + p2.l1), N)
    Q = _q_table(ctx, N)
    T1 = _powers(ctx, qpow(ctx, p2.l1) * p2.t1, N)
    T2 = _powers(ctx, qpow(ctx, p2.l2) * p2.t2, N)
    pn = _powers(ctx, ctx.p, N)
    coeffs = []
    for n in range(N + 1):
        inner = sum(
            (A[k] * B[n - k] / (Q[k] * Q[n - k]) * T1[k] * T2[n - k] for k in range(n + 1)),
            ctx.zero(),
        )
        coeffs.append(ctx.check(pn[n] * top[n] / den[n] * inner))
    return PowerSeriesSolution("infinity", p2.alpha1, qpow(ctx, p2.alpha1), tuple(coeffs))


def _other(i: int) -> int:
    if i not in (1, 2):
        raise InvalidParameterError("i", i, "只能是 1 或 2")
    return 3 - i


def g2_series(ctx: QContext, p2: Params2, i: int, N: int) -> PochhammerSeries:
    """x^lambda sum a_n (x/(q^{l_i-1/2}t_i);q)_n"""
    j = _other(i)
    lam = p2.lam
    hi, li, ti = p2.h(i), p2.l(i), p2.t(i)
    A1 = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1), N)
    A2 = qpoch_table(ctx, qpow(ctx, lam + p2.alpha2), N)
    D1 = qpoch_table(ctx, qpow(ctx, hi - li + 1), N)
    D2 = qpoch_table(ctx, qpow(ctx, p2.h(j) - li + 1) * p2.t(j) / ti, N)
    Q = _q_table(ctx, N)
    _require_nonzero(ctx, D1, f"(q^{{h{i}-l{i}+1}};q)_n")
    _require_nonzero(ctx, D2, f"(q^{{h{j}-l{i}+1}}t{j}/t{i};q)_n")
    qn = _powers(ctx, ctx.q, N)
    coeffs = tuple(
        ctx.check(qn[n] * A1[n] * A2[n] / (D1[n] * D2[n] * Q[n])) for n in range(N + 1)
    )
    node = qpow(ctx, li - HALF) * ti
    return PochhammerSeries(lam, node, "ascending", coeffs, f"g2[{i}]")


def g3_series(ctx: QContext, p2: Params2, i: int, N: int) -> PochhammerSeries:
    """x^{-alpha1} sum c_n (q^{h_i+1/2}t_i/x;q)_n"""
    j = _other(i)
    lam = p2.lam
    hi, li, ti = p2.h(i), p2.l(i), p2.t(i)
    hj, lj, tj = p2.h(j), p2.l(j), p2.t(j)
    top = qpoch_table(ctx, qpow(ctx, lam + p2.alpha1), N)
    den = qpoch_table(ctx, qpow(ctx, hi - lj + 1) * ti / tj, N)
    _require_nonzero(ctx, den, f"(q^{{h{i}-l{j}+1}}t{i}/t{j};q)_n")
    K = qpoch_table(ctx, qpow(ctx, lam - hj + lj + p2.alpha1), N)
    D = qpoch_table(ctx, qpow(ctx, hi - li + 1), N)
    _require_nonzero(ctx, D, f"(q^{{h{i}-l{i}+1}};q)_k")
    Q = _q_table(ctx, N)
    tri = _triangular_q(ctx, N)
    Z = _powers(ctx, -qpow(ctx, hi - lj) * ti / tj, N)
    qn = _powers(ctx, ctx.q, N)
    weights = [K[k] * tri[k] * Z[k] / (D[k] * Q[k]) for k in range(N + 1)]
    coeffs = []
    for n in range(N + 1):
        inner = sum((weights[k] / Q[n - k] for k in range(n + 1)), ctx.zero())
        coeffs.append(ctx.check(qn[n] * top[n] / den[n] * inner))
    node = qpow(ctx, hi + HALF) * ti
    return PochhammerSeries(-p2.alpha1, node, "descending", tuple(coeffs), f"g3[{i}]")


# ==================== 三次变体的猜想解 ====================


def _check_perm(perm: Sequence[int]) -> tuple[int, int, int]:
    perm = tuple(perm)
    if sorted(perm) != [1, 2, 3]:
        raise InvalidParameterError("perm", perm, "必须是 (1,2,3) 的排列")
    return perm  # type: ignore[return-value]


def conj3_series(
    ctx: QContext, p3: Params3, family: Family, perm: Sequence[int], N: int
) -> PochhammerSeries:
    """三次变体的两族解 (I: 升基, 前因子 x^{nu-alpha}; II: 降基, 前因子 x^{-alpha})"""
    i, j, k = _check_perm(perm)
    if family not in ("I", "II"):
        raise UnknownTargetError("family", str(family), ("I", "II"))
    nu = p3.nu
    hi, li, ti = p3.h(i), p3.l(i), p3.t(i)
    if family == "I":
        d1 = qpow(ctx, p3.h(j) - li + 1) * p3.t(j) / ti
        d2 = qpow(ctx, p3.h(k) - li + 1) * p3.t(k) / ti
        x1 = -qpow(ctx, p3.h(j) - li) * p3.t(j) / ti
        x2 = -qpow(ctx, p3.h(k) - li) * p3.t(k) / ti
        names = (f"(q^{{h{j}-l{i}+1}}t{j}/t{i};q)_n", f"(q^{{h{k}-l{i}+1}}t{k}/t{i};q)_n")
    else:
        d1 = qpow(ctx, hi - p3.l(j) + 1) * ti / p3.t(j)
        d2 = qpow(ctx, hi - p3.l(k) + 1) * ti / p3.t(k)
        x1 = -qpow(ctx, hi - p3.l(j)) * ti / p3.t(j)
        x2 = -qpow(ctx, hi - p3.l(k)) * ti / p3.t(k)
        names = (f"(q^{{h{i}-l{j}+1}}t{i}/t{j};q)_n", f"(q^{{h{i}-l{k}+1}}t{i}/t{k};q)_n")

    top = qpoch_table(ctx, qpow(ctx, nu), N)
    D1, D2 = qpoch_table(ctx, d1, N), qpoch_table(ctx, d2, N)
    _require_nonzero(ctx, D1, names[0])
    _require_nonzero(ctx, D2, names[1])
    B1 = qpoch_table(ctx, qpow(ctx, nu - p3.h(j) + p3.l(j)), N)
    B2 = qpoch_table(ctx, qpow(ctx, nu - p3.h(k) + p3.l(k)), N)
    H = qpoch_table(ctx, qpow(ctx, hi - li + 1), N)
    _require_nonzero(ctx, H, f"(q^{{h{i}-l{i}+1}};q)_K")
    Q = _q_table(ctx, N)
    tri = _triangular_q(ctx, N)
    X1, X2 = _powers(ctx, x1, N), _powers(ctx, x2, N)
    qn = _powers(ctx, ctx.q, N)

    # 与 n 无关的部分: w[k1][k2] = q^{K(K+1)/2} (..)_{k1} (..)_{k2} X1^k1 X2^k2 / ((q)_k1 (q)_k2 (..)_K)
    weights = [
        [
            tri[a + b] * B1[a] * B2[b] * X1[a] * X2[b] / (Q[a] * Q[b] * H[a + b])
            for b in range(N + 1 - a)
        ]
        for a in range(N + 1)
    ]
    coeffs = []
    for n in range(N + 1):
        inner = ctx.zero()
        for a in range(n + 1):
            for b in range(n + 1 - a):
                inner = inner + weights[a][b] / Q[n - a - b]
        coeffs.append(ctx.check(qn[n] * top[n] / (D1[n] * D2[n]) * inner))

    if family == "I":
        return PochhammerSeries(nu - p3.alpha, qpow(ctx, li - HALF) * ti, "ascending",
                                tuple(coeffs), f"conjI{perm}")
    return PochhammerSeries(-p3.alpha, qpow(ctx, hi + HALF) * ti, "descending",
                            tuple(coeffs), f"conjII{perm}")


# ==================== 基变换与残差 ====================


def _ascending_view(ctx: QContext, series: PochhammerSeries) -> tuple[Scalar, Exponent]:
    """返回 (变量 z 中的节点, z 中的前因子指数)；降基在 z = 1/x 中是升基"""
    if series.node == 0:
        raise InvalidParameterError("node", series.node, "节点不能为 0")
    if series.orientation == "ascending":
        return series.node, series.prefactor_exponent
    return 1 / series.node, -series.prefactor_exponent


def _basis_expansion(ctx: QContext, node: Scalar, coeffs: Sequence[Scalar]) -> Poly:
    """sum a_n (z/node;q)_n 展开为 z 的多项式"""
    total = Poly()
    basis = Poly((ctx.one(),))
    qj = ctx.one()
    for a in coeffs:
        total = total + basis * a
        basis = basis * Poly((ctx.one(), -qj / node))
        qj = qj * ctx.q
    return total


def pochhammer_to_power(ctx: QContext, series: PochhammerSeries, N: int) -> PowerSeriesSolution:
    """展开为单项式并截断到 N 阶 (只使用前 N+1 个基元)"""
    node, mu = _ascending_view(ctx, series)
    poly = _basis_expansion(ctx, node, series.coeffs[: N + 1])
    coeffs = tuple(poly.coeff(k) if k <= poly.degree() else ctx.zero() for k in range(N + 1))
    anchor = "zero" if series.orientation == "ascending" else "infinity"
    exponent = mu if series.orientation == "ascending" else -mu
    root = qpow(ctx, mu)
    return PowerSeriesSolution(anchor, exponent, root, coeffs)


def newton_coefficients(ctx: QContext, poly: Poly, node: Scalar) -> list[Scalar]:
    """把 z 的多项式写成 sum b_n (z/node;q)_n；插值点 z_n = node q^{-n}"""
    D = poly.degree()
    if D < 0:
        return []
    q = ctx.q
    b: list[Scalar] = []
    for n in range(D + 1):
        zn = node * q ** (-n)
        acc = poly(zn)
        # phi_m(z_n) = prod_{i<m} (1 - q^{i-n})
        phi = ctx.one()
        for m in range(n):
            acc = acc - b[m] * phi
            phi = phi * (1 - q ** (m - n))
        b.append(ctx.check(acc / phi))
    return b


def pochhammer_residual(eq: QDifferenceEquation, series: PochhammerSeries) -> list[Scalar]:
    """算子作用于截断级数后，在同一组 Pochhammer 基下的系数 (0..N+d 阶)"""
    ctx = eq.ctx
    node, target = _residual_setup(eq, series)
    image = target.apply_poly(_basis_expansion(ctx, node, series.coeffs))
    out = newton_coefficients(ctx, image, node)
    width = series.truncation + target.degree() + 1
    return out + [ctx.zero()] * (width - len(out))


def _residual_setup(
    eq: QDifferenceEquation, series: PochhammerSeries
) -> tuple[Scalar, QDifferenceEquation]:
    node, mu = _ascending_view(eq.ctx, series)
    target = eq if series.orientation == "ascending" else eq.reflect()
    return node, target.gauge_root(qpow(eq.ctx, mu))


def _abs_poly(ctx: QContext, poly: Poly) -> Poly:
    return Poly(tuple(ctx.magnitude(c) for c in poly.coeffs))


def residual_term_scale(eq: QDifferenceEquation, series: PochhammerSeries) -> list[float]:
    """每阶残差所累积各项的模 (float 模式容差的基准)

    与 pochhammer_residual 走同一流程，但所有系数取模、减法换成加法。
    """
    ctx = eq.ctx
    node, target = _residual_setup(eq, series)
    q, d = abs(ctx.q), ctx.magnitude(node)
    one = Poly((1.0,))

    expansion, basis, qj = Poly(), one, 1.0
    for a in series.coeffs:
        expansion = expansion + basis * ctx.magnitude(a)
        basis = basis * Poly((1.0, qj / d))
        qj *= q
    u, v, w = (_abs_poly(ctx, p) for p in target.polys())
    image = u * expansion.dilate(1 / q) + v * expansion + w * expansion.dilate(q)

    # newton_coefficients 的模版本
    out: list[float] = []
    for n in range(image.degree() + 1):
        acc = image(d * q ** (-n))
        phi_abs, phi = 1.0, 1.0
        for m in range(n):
            acc += out[m] * phi_abs
            phi_abs *= 1 + q ** (m - n)
            phi *= abs(1 - ctx.q ** (m - n))
        out.append(acc / phi)
    width = series.truncation + target.degree() + 1
    return out + [0.0] * (width - len(out))


def residual_report(
    eq: QDifferenceEquation, series: PochhammerSeries, interior: int
) -> ResidualReport:
    """interior: 检查 0..interior 阶；float 模式下第 n 阶相对该阶各项的模判零"""
    ctx = eq.ctx
    residual = pochhammer_residual(eq, series)
    scales = [None] * len(residual) if ctx.is_exact else residual_term_scale(eq, series)
    zero = [ctx.is_zero(r, s) for r, s in zip(residual, scales)]
    support = tuple(n for n, z in enumerate(zero) if not z)
    head = residual[: interior + 1]
    worst = max(head, key=ctx.magnitude) if head else ctx.zero()
    passed = all(zero[: interior + 1])
    return ResidualReport(tuple(residual), len(head), worst, support, passed)


@dataclass(frozen=True)
class ConjectureReport:
    family: str
    perm: tuple[int, int, int]
    N: int
    max_interior_residual: Scalar
    orders_checked: int
    support: tuple[int, ...]
    passed: bool


def _check_nodes(ctx: QContext, p3: Params3, family: Family) -> None:
    if family == "I":
        nodes = [qpow(ctx, p3.l(i) - HALF) * p3.t(i) for i in (1, 2, 3)]
    else:
        nodes = [qpow(ctx, p3.h(i) + HALF) * p3.t(i) for i in (1, 2, 3)]
    for a in range(3):
        for b in range(a + 1, 3):
            if ctx.is_zero(nodes[a] - nodes[b]):
                raise NodeCoincidenceError((a + 1, b + 1, nodes[a]))


def verify_conjecture(
    ctx: QContext,
    p3: Params3,
    family: Family,
    perm: Sequence[int],
    N: int,
    series: PochhammerSeries | None = None,
) -> ConjectureReport:
    """把猜想解代入三次变体，检查 0..N-3 阶残差"""
    if N < 5:
        raise InvalidParameterError("N", N, "至少为 5")
    _check_nodes(ctx, p3, family)
    if series is None:
        series = conj3_series(ctx, p3, family, perm, N)
    report = residual_report(make_variant_deg3(ctx, p3), series, N - 3)
    if not report.passed:
        logger.error(f"conj{family}{tuple(perm)} N={N}: 内部残差非零 {report.max_interior}")
    return ConjectureReport(family, tuple(perm), N, report.max_interior, report.interior_orders,
                            report.support, report.passed)


# ==================== 证明中的递推恒等式 ====================


def _at(seq: Sequence[Scalar], n: int, zero: Scalar) -> Scalar:
    return seq[n] if 0 <= n < len(seq) else zero


def _summed(ctx: QContext, terms: Sequence[Scalar]) -> tuple[Scalar, float]:
    """(各项之和, 最大项的模)"""
    return sum(terms, ctx.zero()), max((ctx.magnitude(t) for t in terms), default=0.0)


def recurrence_residual_thm2(ctx: QContext, p2: Params2, n: int, i: int = 1) -> Scalar:
    return _summed(ctx, recurrence_terms_thm2(ctx, p2, n, i))[0]


def recurrence_check_thm2(ctx: QContext, p2: Params2, n: int, i: int = 1) -> tuple[Scalar, float]:
    return _summed(ctx, recurrence_terms_thm2(ctx, p2, n, i))


def recurrence_terms_thm2(ctx: QContext, p2: Params2, n: int, i: int = 1) -> tuple[Scalar, ...]:
    """六项递推 Q(a_{n+1}, a_n, a_{n-1}, a_{n-2}) 作用在 g2 系数上的各项"""
    params = p2 if i == 1 else p2.swapped_indices()
    _other(i)
    a = g2_series(ctx, params, 1, n + 1).coeffs
    zero = ctx.zero()
    q = ctx.q
    T = params.t2 / params.t1
    lam = params.lam
    y1 = qpow(ctx, params.h1 - params.l1)
    y2 = qpow(ctx, params.h2 - params.l1) * T
    z1, z2 = qpow(ctx, lam + params.alpha1), qpow(ctx, lam + params.alpha2)

    def A(m: int) -> Scalar:
        qm = q ** m
        return (1 - y1 * qm) * (1 - y2 * qm) * (1 - qm)

    def B(m: int) -> Scalar:
        qm = q ** m
        return (1 - z1 * qm) * (1 - z2 * qm)

    return (
        A(n + 1) * _at(a, n + 1, zero),
        -q * B(n) * _at(a, n, zero),
        -(q ** 3) * (1 + 1 / q) * A(n) * _at(a, n, zero),
        q ** 4 * (1 + 1 / q) * B(n - 1) * _at(a, n - 1, zero),
        q ** 5 * A(n - 1) * _at(a, n - 1, zero),
        -(q ** 6) * B(n - 2) * _at(a, n - 2, zero),
    )


def thm3_inner_coefficient(ctx: QContext, p2: Params2, n: int, k: int) -> Scalar:
    """c_{n,k} = q^{k(k+1)/2} (Y2Y3;q)_k / ((Y1 q;q)_k (q;q)_k (q;q)_{n-k})，越界为 0"""
    if k < 0 or n < 0 or k > n:
        return ctx.zero()
    y1 = qpow(ctx, p2.h1 - p2.l1)
    w = qpow(ctx, p2.lam + p2.alpha1 - p2.h2 + p2.l2)
    W = qpoch_table(ctx, w, k)[k]
    D = qpoch_table(ctx, y1 * ctx.q, k)[k]
    Q = _q_table(ctx, n)
    return qpow(ctx, HalfInt(k * (k + 1))) * W / (D * Q[k] * Q[n - k])


def recurrence_residual_thm3(ctx: QContext, p2: Params2, n: int, k: int, i: int = 1) -> Scalar:
    return _summed(ctx, recurrence_terms_thm3(ctx, p2, n, k, i))[0]


def recurrence_check_thm3(
    ctx: QContext, p2: Params2, n: int, k: int, i: int = 1
) -> tuple[Scalar, float]:
    return _summed(ctx, recurrence_terms_thm3(ctx, p2, n, k, i))


def recurrence_terms_thm3(ctx: QContext, p2: Params2, n: int, k: int, i: int = 1) -> list[Scalar]:
    """Q~(n,k) 按单项展开，Y1 = q^{h1-l1}, Y2 = q^{lambda+alpha1}, W = Y2*Y3 = q^{lambda+alpha1-h2+l2}"""
    params = p2 if i == 1 else p2.swapped_indices()
    _other(i)
    q = ctx.q
    Y1 = qpow(ctx, params.h1 - params.l1)
    Y2 = qpow(ctx, params.lam + params.alpha1)
    W = qpow(ctx, params.lam + params.alpha1 - params.h2 + params.l2)
    qn = q ** n

    def spread(parts: Sequence[Scalar], a: int, b: int) -> list[Scalar]:
        c = thm3_inner_coefficient(ctx, params, a, b)
        return [part * c for part in parts]

    last = (1 - Y1 * q * qn) * (1 - Y2 * qn) * (1 - 1 / (q * qn))
    return [
        *spread((q * qn,), n - 2, k - 2),
        *spread((q, q * q), n - 2, k - 1),
        *spread((q * q / qn,), n - 2, k),
        *spread((-q * qn, W * qn * qn), n - 1, k - 2),
        *spread((-2 * q, -1, -q * q, q * qn, q * Y1 * qn, Y2 * qn, W * qn), n - 1, k - 1),
        *spread((q, -q * q / qn, -q / qn, -1 / qn, q * Y1, Y2), n - 1, k),
        *spread(
            (1, q, -q * qn, -Y1 * q * qn, Y1 * q * qn * qn, -Y2 * qn, -W * qn, Y2 * W * qn * qn),
            n, k - 1,
        ),
        *spread(
            (-1, -q, 1 / (q * qn), 1 / qn, q / qn, -Y1, -Y1 * q, Y1 * q * qn,
             -Y2, -Y2 / q, Y2 * qn, Y1 * Y2 * qn),
            n, k,
        ),
        *spread((last,), n + 1, k),
    ]

