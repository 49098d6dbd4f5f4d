"""
q-Appell 函数 Phi^(1)(a; b, b'; c; q; x, y) 及其差分关系。

所有关系都按系数 (单项式槽位 (m, n)) 检验: 算子作用在截断双重级数上后，
m+n <= M-3 的槽位必须精确为 0，靠近截断边界的槽位单独报告。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

from qvariant.analysis.constants import APPELL_BOUNDARY_BAND
from qvariant.analysis.errors import (
    InvalidParameterError,
    TerminatingSeriesError,
    VanishingDenominatorError,
)
from qvariant.analysis.qcore import QContext, Scalar, qpoch_table, qpow
from qvariant.analysis.qdiff import HALF, Params2, Poly, QDifferenceEquation

logger = logging.getLogger(__name__)

Slot = tuple[int, int]
BiPoly = dict[Slot, Scalar]


# ==================== 二元算子 ====================


def _bipoly_mul(a: BiPoly, b: BiPoly) -> BiPoly:
    out: BiPoly = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class DoubleOperator:
    """sum_s P_s(x, y) f(q^{sx} x, q^{sy} y)，terms: shift -> 系数多项式"""

    ctx: QContext
    terms: dict[Slot, BiPoly] = field(default_factory=dict)
    name: str = ""

    @classmethod
    def build(
        cls, ctx: QContext, items: list[tuple[BiPoly, Slot]], name: str = ""
    ) -> "DoubleOperator":
        op = cls(ctx, {}, name)
        for poly, shift in items:
            op = op + cls(ctx, {shift: dict(poly)})
        return DoubleOperator(ctx, op.terms, name)

    def __add__(self, other: "DoubleOperator") -> "DoubleOperator":
        out = {s: dict(p) for s, p in self.terms.items()}
        for shift, poly in other.terms.items():
            target = out.setdefault(shift, {})
            for k, c in poly.items():
                target[k] = target.get(k, 0) + c
        return DoubleOperator(self.ctx, _prune(out), self.name)

    def __neg__(self) -> "DoubleOperator":
        return self.scaled(-1)

    def __sub__(self, other: "DoubleOperator") -> "DoubleOperator":
        return self + (-other)

    def scaled(self, c: Scalar) -> "DoubleOperator":
        return self.times({(0, 0): c})

    def times(self, poly: BiPoly) -> "DoubleOperator":
        """左乘多项式"""
        out = {s: _bipoly_mul(poly, p) for s, p in self.terms.items()}
        return DoubleOperator(self.ctx, _prune(out), self.name)

    def shifted(self, dx: int, dy: int) -> "DoubleOperator":
        """(x, y) -> (q^dx x, q^dy y) 代入整个方程"""
        q = self.ctx.q
        out: dict[Slot, BiPoly] = {}
        for (sx, sy), poly in self.terms.items():
            out[(sx + dx, sy + dy)] = {
                (i, j): c * q ** (dx * i + dy * j) for (i, j), c in poly.items()
            }
        return DoubleOperator(self.ctx, _prune(out), self.name)

    def is_zero(self) -> bool:
        return not self.terms

    def matches(self, other: "DoubleOperator") -> bool:
        """exact: 逐项相等；float: 同一平移下按该平移系数的最大模判零"""
        if self.ctx.is_exact:
            return (self - other).is_zero()
        ctx = self.ctx
        for shift in set(self.terms) | set(other.terms):
            mine, theirs = self.terms.get(shift, {}), other.terms.get(shift, {})
            scale = max(ctx.magnitude(c) for c in (*mine.values(), *theirs.values()))
            for k in set(mine) | set(theirs):
                if not ctx.is_zero(mine.get(k, 0) - theirs.get(k, 0), scale):
                    return False
        return True

    def degree(self) -> int:
        return max((i + j for poly in self.terms.values() for (i, j) in poly), default=0)

    def monomial_action(self, m: int, n: int) -> BiPoly:
        """作用在 x^m y^n 上，返回 {(i, j): 系数} 表示 x^{m+i} y^{n+j} 的系数"""
        q = self.ctx.q
        out: BiPoly = {}
        for (sx, sy), poly in self.terms.items():
            factor = q ** (sx * m + sy * n)
            for k, c in poly.items():
                out[k] = out.get(k, 0) + c * factor
        return {k: v for k, v in out.items() if v != 0}

    def _slot_terms(self, coeffs: "AppellCoefficients", m: int, n: int) -> Iterator[Scalar]:
        q = self.ctx.q
        for (sx, sy), poly in self.terms.items():
            for (i, j), c in poly.items():
                mm, nn = m - i, n - j
                F = coeffs.get(mm, nn)
                if F != 0:
                    yield c * F * q ** (sx * mm + sy * nn)

    def slot_residual(self, coeffs: "AppellCoefficients", m: int, n: int) -> Scalar:
        """算子作用于 sum F_{m,n} x^m y^n 后 x^m y^n 的系数"""
        return sum(self._slot_terms(coeffs, m, n), self.ctx.zero())

    def slot_scale(self, coeffs: "AppellCoefficients", m: int, n: int) -> float:
        """slot_residual 中各项的最大模"""
        return max((self.ctx.magnitude(t) for t in self._slot_terms(coeffs, m, n)), default=0.0)


def _prune(terms: dict[Slot, BiPoly]) -> dict[Slot, BiPoly]:
    out = {}
    for shift, poly in terms.items():
        kept = {k: v for k, v in poly.items() if v != 0}
        if kept:
            out[shift] = kept
    return out


# ==================== 级数系数 ====================


@dataclass(frozen=True)
class DoubleSeriesSpec:
    a: Scalar
    b: Scalar
    b_prime: Scalar
    c: Scalar
    M: int

    def __post_init__(self):
        if self.M < 0:
            raise InvalidParameterError("M", self.M, "截断阶不能为负")


@dataclass(frozen=True)
class AppellCoefficients:
    """F_{m,n}，m+n <= M；超出截断视为 0"""

    spec: DoubleSeriesSpec
    table: dict[Slot, Scalar]

    def get(self, m: int, n: int) -> Scalar:
        if m < 0 or n < 0 or m + n > self.spec.M:
            return 0
        return self.table[(m, n)]

    def slots(self) -> Iterator[Slot]:
        return iter(self.table)


def phi1_coefficients(ctx: QContext, spec: DoubleSeriesSpec) -> AppellCoefficients:
    M = spec.M
    A = qpoch_table(ctx, spec.a, M)
    B = qpoch_table(ctx, spec.b, M)
    Bp = qpoch_table(ctx, spec.b_prime, M)
    C = qpoch_table(ctx, spec.c, M)
    Q = qpoch_table(ctx, ctx.q, M)
    for k in range(M + 1):
        if ctx.is_zero(C[k]):
            raise VanishingDenominatorError("(c;q)_{m+n}", k)
        if ctx.is_zero(Q[k]):
            raise VanishingDenominatorError("(q;q)_m", k)
    table = {
        (m, n): ctx.check(A[m + n] * B[m] * Bp[n] / (C[m + n] * Q[m] * Q[n]))
        for m in range(M + 1)
        for n in range(M + 1 - m)
    }
    return AppellCoefficients(spec, table)


def require_nonterminating(ctx: QContext, spec: DoubleSeriesSpec) -> None:
    """a, b, b' 不能落在 q^{-j} (j < M) 上；a = 1 时 Phi^(1) 只剩常数项"""
    for name, value in (("a", spec.a), ("b", spec.b), ("b_prime", spec.b_prime)):
        for m, v in enumerate(qpoch_table(ctx, value, spec.M)):
            if ctx.is_zero(v):
                raise TerminatingSeriesError(name, value, m)


def phi1(ctx: QContext, a: Scalar, b: Scalar, b_prime: Scalar, c: Scalar,
         x1: Scalar, x2: Scalar, M: int) -> Scalar:
    """Phi^(1) 在 m+n <= M 上的部分和"""
    coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(a, b, b_prime, c, M))
    xp, yp = [ctx.one()], [ctx.one()]
    for _ in range(M):
        xp.append(xp[-1] * x1)
        yp.append(yp[-1] * x2)
    return sum((F * xp[m] * yp[n] for (m, n), F in coeffs.table.items()), ctx.zero())


@dataclass(frozen=True)
class AppellEval:
    spec: DoubleSeriesSpec
    x1: Scalar
    x2: Scalar
    value: Scalar


def evaluate_phi1(ctx: QContext, spec: DoubleSeriesSpec, x1: Scalar, x2: Scalar) -> AppellEval:
    value = phi1(ctx, spec.a, spec.b, spec.b_prime, spec.c, x1, x2, spec.M)
    return AppellEval(spec, x1, x2, value)


# ==================== 差分关系 ====================


def contiguous_operators(ctx: QContext, a, b, b_prime, c) -> tuple[DoubleOperator, DoubleOperator]:
    """两条一阶关系 (x 方向与 y 方向)"""
    cq = c / ctx.q
    first = DoubleOperator.build(ctx, [
        ({(1, 0): a * b, (0, 0): -cq}, (2, 1)),
        ({(1, 0): -b, (0, 0): 1}, (1, 0)),
        ({(1, 0): -a, (0, 0): cq}, (1, 1)),
        ({(1, 0): 1, (0, 0): -1}, (0, 0)),
    ], "contiguous-x")
    second = DoubleOperator.build(ctx, [
        ({(0, 1): a * b_prime, (0, 0): -cq}, (1, 2)),
        ({(0, 1): -b_prime, (0, 0): 1}, (0, 1)),
        ({(0, 1): -a, (0, 0): cq}, (1, 1)),
        ({(0, 1): 1, (0, 0): -1}, (0, 0)),
    ], "contiguous-y")
    return first, second


def elimination_operators(ctx: QContext, a, b, b_prime, c) -> dict[str, DoubleOperator]:
    """按书面形式逐项写出: y 方向关系的 x 平移、两条消元关系、三阶方程"""
    cq = c / ctx.q
    q = ctx.q
    shifted = DoubleOperator.build(ctx, [
        ({(0, 1): a * b_prime, (0, 0): -cq}, (2, 2)),
        ({(0, 1): -b_prime, (0, 0): 1}, (1, 1)),
        ({(0, 1): -a, (0, 0): cq}, (2, 1)),
        ({(0, 1): 1, (0, 0): -1}, (1, 0)),
    ], "shifted-y")

    ay = {(0, 1): a, (0, 0): -cq}
    ax = {(1, 0): a, (0, 0): -cq}
    abx = {(1, 0): a * b, (0, 0): -cq}
    abpy = {(0, 1): a * b_prime, (0, 0): -cq}
    bpy1 = {(0, 1): b_prime, (0, 0): -1}
    bx1 = {(1, 0): b, (0, 0): -1}
    x1 = {(1, 0): 1, (0, 0): -1}
    y1 = {(0, 1): 1, (0, 0): -1}
    bxy = {(1, 0): (a - cq) * b, (0, 1): -(a - cq)}

    def plus(*polys: BiPoly) -> BiPoly:
        out: BiPoly = {}
        for p in polys:
            for k, v in p.items():
                out[k] = out.get(k, 0) + v
        return out

    def neg(p: BiPoly) -> BiPoly:
        return {k: -v for k, v in p.items()}

    eliminate_y = DoubleOperator.build(ctx, [
        (bxy, (1, 0)),
        (neg(_bipoly_mul(ay, x1)), (0, 0)),
        (plus(_bipoly_mul(ay, ax), _bipoly_mul(abx, bpy1)), (1, 1)),
        (neg(_bipoly_mul(abx, abpy)), (2, 2)),
    ], "eliminate-f(qx,y)")
    eliminate_xy = DoubleOperator.build(ctx, [
        (neg(bxy), (2, 1)),
        (_bipoly_mul(bx1, abpy), (2, 2)),
        (neg(plus(_bipoly_mul(y1, ax), _bipoly_mul(bpy1, bx1))), (1, 1)),
        (_bipoly_mul(x1, y1), (0, 0)),
    ], "eliminate-f(q^2x,qy)")

    aqx = {(1, 0): a * q, (0, 0): -cq}
    aqy = {(0, 1): a * q, (0, 0): -cq}
    abqx = {(1, 0): a * b * q, (0, 0): -cq}
    abpqy = {(0, 1): a * b_prime * q, (0, 0): -cq}
    abpqy_c = {(0, 1): a * b_prime * q, (0, 0): -c}
    bpqy1 = {(0, 1): b_prime * q, (0, 0): -1}
    qx1 = {(1, 0): q, (0, 0): -1}
    aqx_c = {(1, 0): a * q, (0, 0): -c}
    third = DoubleOperator.build(ctx, [
        (_bipoly_mul(abqx, abpqy), (3, 3)),
        (
            neg(plus(_bipoly_mul(aqx, aqy), _bipoly_mul(abqx, bpqy1), _bipoly_mul(bx1, abpqy_c))),
            (2, 2),
        ),
        (plus(_bipoly_mul(qx1, aqy), _bipoly_mul(aqx_c, y1),
              {k: q * v for k, v in _bipoly_mul(bx1, bpy1).items()}), (1, 1)),
        ({k: -q * v for k, v in _bipoly_mul(x1, y1).items()}, (0, 0)),
    ], "third-order")
    return {
        "shifted": shifted, "eliminate_y": eliminate_y, "eliminate_xy": eliminate_xy, "third": third
    }


def second_order_operator(ctx: QContext, a, b, b_prime) -> DoubleOperator:
    """c = bb' 时的二阶关系"""
    q = ctx.q
    return DoubleOperator.build(ctx, [
        ({(1, 1): a * a * q * q, (1, 0): -a * b * q, (0, 1): -a * b_prime * q,
          (0, 0): b * b_prime}, (2, 2)),
        ({(1, 1): -a * q * (q + 1), (1, 0): q * (a + b), (0, 1): q * (a + b_prime),
          (0, 0): -(b * b_prime + q)}, (1, 1)),
        ({(1, 1): q, (1, 0): -q, (0, 1): -q, (0, 0): q}, (0, 0)),
    ], "second-order")


def elimination_pairs(
    ctx: QContext, a, b, b_prime, c
) -> dict[str, tuple[DoubleOperator, DoubleOperator]]:
    """(书面关系, 由一阶关系线性组合出的关系)"""
    first, second = contiguous_operators(ctx, a, b, b_prime, c)
    printed = elimination_operators(ctx, a, b, b_prime, c)
    cq = c / ctx.q
    shifted = second.shifted(1, 0)
    ay = {(0, 1): a, (0, 0): -cq}
    abx = {(1, 0): a * b, (0, 0): -cq}
    eliminate_y = -(first.times(ay) + shifted.times(abx))
    eliminate_xy = first.times({(0, 1): 1, (0, 0): -1}) + shifted.times({(1, 0): b, (0, 0): -1})
    third = -(eliminate_xy.scaled(ctx.q) + eliminate_y.shifted(1, 1))
    derived = {
        "shifted": shifted, "eliminate_y": eliminate_y, "eliminate_xy": eliminate_xy, "third": third
    }
    return {name: (printed[name], derived[name]) for name in derived}


def elimination_identities(ctx: QContext, a, b, b_prime, c) -> dict[str, DoubleOperator]:
    """书面关系减去组合出的关系；每一项都应是零算子"""
    return {name: p - d for name, (p, d) in elimination_pairs(ctx, a, b, b_prime, c).items()}


def monomial_action(ctx: QContext, a, b, b_prime, m: int, n: int) -> BiPoly:
    """二阶关系作用在 x^m y^n 上 (c = bb')"""
    return second_order_operator(ctx, a, b, b_prime).monomial_action(m, n)


# ==================== 残差 ====================


def contiguous_residuals(ctx: QContext, a, b, b_prime, c, m: int, n: int) -> tuple[Scalar, Scalar]:
    """两条一阶关系在槽位 (m, n) 上的系数残差"""
    coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(a, b, b_prime, c, m + n))
    first, second = contiguous_operators(ctx, a, b, b_prime, c)
    return first.slot_residual(coeffs, m, n), second.slot_residual(coeffs, m, n)


def elimination_residuals(ctx: QContext, a, b, b_prime, c, m: int, n: int) -> dict[str, Scalar]:
    coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(a, b, b_prime, c, m + n))
    ops = elimination_operators(ctx, a, b, b_prime, c)
    return {name: op.slot_residual(coeffs, m, n) for name, op in ops.items()}


@dataclass(frozen=True)
class AppellResidual:
    """截断级数上的残差: 内部槽位必须为 0，边界带单独列出"""

    operator: str
    M: int
    value: Scalar
    interior_value: Scalar
    max_interior: Scalar
    interior_slots: int
    boundary: dict[Slot, Scalar]
    passed: bool


def operator_residual(
    ctx: QContext, op: DoubleOperator, coeffs: AppellCoefficients, x: Scalar, y: Scalar
) -> AppellResidual:
    M = coeffs.spec.M
    top = M + op.degree()
    cut = M - APPELL_BOUNDARY_BAND
    value = interior_value = ctx.zero()
    worst = ctx.zero()
    boundary: dict[Slot, Scalar] = {}
    slots = 0
    passed = True
    for total in range(top + 1):
        for m in range(total + 1):
            n = total - m
            r = op.slot_residual(coeffs, m, n)
            scale = None if ctx.is_exact else op.slot_scale(coeffs, m, n)
            term = r * x ** m * y ** n
            value = value + term
            if total <= cut:
                slots += 1
                interior_value = interior_value + term
                if ctx.magnitude(r) > ctx.magnitude(worst):
                    worst = r
                passed = passed and ctx.is_zero(r, scale)
            elif not ctx.is_zero(r, scale):
                boundary[(m, n)] = r
    if not passed:
        logger.error(f"{op.name}: 内部槽位残差非零 {worst}")
    return AppellResidual(op.name, M, value, interior_value, worst, slots, boundary, passed)


def third_order_residual(
    ctx: QContext, a, b, b_prime, c, x: Scalar, y: Scalar, M: int
) -> AppellResidual:
    coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(a, b, b_prime, c, M))
    op = elimination_operators(ctx, a, b, b_prime, c)["third"]
    return operator_residual(ctx, op, coeffs, x, y)


def second_order_cbb_residual(
    ctx: QContext, a, b, b_prime, x: Scalar, y: Scalar, M: int, c: Scalar | None = None
) -> AppellResidual:
    """级数取参数 c (默认 bb')，算子固定为 c = bb' 的二阶关系"""
    c = b * b_prime if c is None else c
    coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(a, b, b_prime, c, M))
    return operator_residual(ctx, second_order_operator(ctx, a, b, b_prime), coeffs, x, y)


# ==================== 与二次变体的联系 ====================


@dataclass(frozen=True)
class AppellSpecialization:
    a: Scalar
    b: Scalar
    b_prime: Scalar
    d1: Scalar
    d2: Scalar
    d3: object  # 指数 alpha1

    @property
    def c(self) -> Scalar:
        return self.b * self.b_prime


def specialize_to_variant2(ctx: QContext, p2: Params2) -> AppellSpecialization:
    base = p2.lam + p2.alpha1
    return AppellSpecialization(
        a=qpow(ctx, base),
        b=qpow(ctx, base + p2.l2 - p2.h2),
        b_prime=qpow(ctx, base + p2.l1 - p2.h1),
        d1=qpow(ctx, p2.l1 - HALF) * p2.t1,
        d2=qpow(ctx, p2.l2 - HALF) * p2.t2,
        d3=p2.alpha1,
    )


def restricted_operator(ctx: QContext, spec: AppellSpecialization) -> QDifferenceEquation:
    """x1 = d1/x, x2 = d2/x, f(q x1, q x2) = x^{d3} g(x) 代入二阶关系得到的单变量方程"""
    q = ctx.q
    a, b, bp, d1, d2 = spec.a, spec.b, spec.b_prime, spec.d1, spec.d2
    bb = b * bp
    s = qpow(ctx, spec.d3)
    u = Poly.from_roots([a / bp * q * d1, a / b * q * d2])
    v = Poly((a * (q * q + q) * d1 * d2, -q * (a + b) * d1 - q * (a + bp) * d2, bb + q)) * (-s / bb)
    w = Poly.from_roots([d1, d2], lead=s * s * q / bb)
    return QDifferenceEquation(ctx, u, v, w, "appell-restricted")


def appell_g1_coefficients(ctx: QContext, p2: Params2, N: int) -> list[Scalar]:
    """x^{-alpha1} Phi^(1)(q d1/x, q d2/x) 按 x^{-n} 收集的系数"""
    spec = specialize_to_variant2(ctx, p2)
    coeffs = phi1_coefficients(ctx, DoubleSeriesSpec(spec.a, spec.b, spec.b_prime, spec.c, N))
    X1, X2 = ctx.q * spec.d1, ctx.q * spec.d2
    out = []
    for n in range(N + 1):
        terms = (coeffs.get(m, n - m) * X1 ** m * X2 ** (n - m) for m in range(n + 1))
        out.append(sum(terms, ctx.zero()))
    return out
