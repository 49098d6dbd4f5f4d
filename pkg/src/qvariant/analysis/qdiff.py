"""
三项 q 差分算子 u(x) g(x/q) + v(x) g(x) + w(x) g(qx) 及四个具名方程的构造。

构造器不约去公因子，系数按公式原样保存，便于与 golden 文件逐项比较。
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from qvariant.analysis.errors import InvalidParameterError
from qvariant.analysis.qcore import (
    Exponent,
    HalfInt,
    QContext,
    Scalar,
    coerce_exponent,
    qpow,
)

logger = logging.getLogger(__name__)

HALF = HalfInt(1)


@dataclass(frozen=True)
class Poly:
    """多项式，coeffs[k] 为 x^k 系数；末尾零项自动裁掉。"""

    coeffs: tuple = ()

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar], lead: Scalar = 1) -> "Poly":
        poly = cls((lead,))
        for r in roots:
            poly = poly * cls((-r, 1))
        return poly

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, x: Scalar) -> Scalar:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coeff(k) + other.coeff(k) for k in range(n)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            if not self.coeffs or not other.coeffs:
                return Poly()
            out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return Poly(tuple(out))
        return Poly(tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def dilate(self, c: Scalar) -> "Poly":
        """P(cx)"""
        out, ck = [], 1
        for a in self.coeffs:
            out.append(a * ck)
            ck = ck * c
        return Poly(tuple(out))

    def reflected(self, d: int) -> "Poly":
        """x^d P(1/x)"""
        return Poly(tuple(self.coeff(d - k) for k in range(d + 1)))

    def map(self, fn: Callable[[Scalar], Scalar]) -> "Poly":
        return Poly(tuple(fn(c) for c in self.coeffs))


@dataclass(frozen=True)
class QDifferenceEquation:
    """u(x) g(x/q) + v(x) g(x) + w(x) g(qx) = 0"""

    ctx: QContext
    u: Poly
    v: Poly
    w: Poly
    name: str = ""

    def degree(self) -> int:
        return max(self.u.degree(), self.v.degree(), self.w.degree())

    def polys(self) -> tuple[Poly, Poly, Poly]:
        return self.u, self.v, self.w

    def apply_poly(self, f: Poly) -> Poly:
        """算子作用在多项式上: u f(x/q) + v f + w f(qx)"""
        q = self.ctx.q
        return self.u * f.dilate(1 / q) + self.v * f + self.w * f.dilate(q)

    def reflect(self) -> "QDifferenceEquation":
        """y = 1/x 下的方程: (y^d w(1/y), y^d v(1/y), y^d u(1/y))"""
        d = self.degree()
        return QDifferenceEquation(
            self.ctx, self.w.reflected(d), self.v.reflected(d), self.u.reflected(d),
            f"{self.name}@inf" if self.name else "",
        )

    def gauge_root(self, X: Scalar) -> "QDifferenceEquation":
        """g = x^mu h，X = q^mu"""
        return dataclasses.replace(self, u=self.u * (1 / X), w=self.w * X)

    def scaled(self, c: Scalar) -> "QDifferenceEquation":
        return dataclasses.replace(self, u=self.u * c, v=self.v * c, w=self.w * c)

    def normalized(self) -> "QDifferenceEquation":
        """除以 u 的首项系数"""
        lead = self.u.coeff(self.u.degree())
        if lead == 0:
            raise InvalidParameterError("u", self.u.coeffs, "零多项式无法归一化")
        return self.scaled(1 / lead)

    def same_as(self, other: "QDifferenceEquation") -> bool:
        """exact: 系数逐项相等；float: 每个系数多项式内按其最大模判零"""
        if self.ctx.is_exact:
            return (self.u, self.v, self.w) == (other.u, other.v, other.w)
        ctx = self.ctx
        for mine, theirs in zip(self.polys(), other.polys()):
            width = max(len(mine.coeffs), len(theirs.coeffs))
            scale = max((ctx.magnitude(c) for c in (*mine.coeffs, *theirs.coeffs)), default=0.0)
            if not all(ctx.is_zero(mine.coeff(k) - theirs.coeff(k), scale) for k in range(width)):
                return False
        return True


# ==================== 参数包 ====================


def _check_t(name: str, t: Scalar) -> None:
    if t == 0:
        raise InvalidParameterError(name, t, "t 不能为 0")


@dataclass(frozen=True)
class Params2:
    """二次变体 (及 q-Heun) 的参数"""

    h1: Exponent
    h2: Exponent
    l1: Exponent
    l2: Exponent
    alpha1: Exponent
    alpha2: Exponent
    t1: Scalar
    t2: Scalar

    def __post_init__(self):
        _check_t("t1", self.t1)
        _check_t("t2", self.t2)
        _ = self.lam  # λ 必须是半整数

    @classmethod
    def create(cls, ctx: QContext, **values) -> "Params2":
        """按 ctx 模式转换参数 (exact 模式指数必须为半整数)"""
        names = ("h1", "h2", "l1", "l2", "alpha1", "alpha2")
        exps = {k: coerce_exponent(values[k], ctx.mode) for k in names}
        return cls(**exps, t1=ctx.scalar(values["t1"]), t2=ctx.scalar(values["t2"]))

    @property
    def lam(self) -> Exponent:
        """λ = (h1+h2-l1-l2-α1-α2+1)/2"""
        s = self.h1 + self.h2 - self.l1 - self.l2 - self.alpha1 - self.alpha2 + 1
        try:
            return s / 2
        except InvalidParameterError as e:
            raise InvalidParameterError("lambda", f"({s})/2", "λ 必须是半整数") from e

    @property
    def total(self) -> Exponent:
        """h1+h2+l1+l2+α1+α2"""
        return self.h1 + self.h2 + self.l1 + self.l2 + self.alpha1 + self.alpha2

    def swapped_indices(self) -> "Params2":
        return dataclasses.replace(
            self, h1=self.h2, h2=self.h1, l1=self.l2, l2=self.l1, t1=self.t2, t2=self.t1
        )

    def swapped_alphas(self) -> "Params2":
        return dataclasses.replace(self, alpha1=self.alpha2, alpha2=self.alpha1)

    def replace(self, **changes) -> "Params2":
        return dataclasses.replace(self, **changes)

    def h(self, i: int) -> Exponent:
        return (self.h1, self.h2)[i - 1]

    def l(self, i: int) -> Exponent:  # noqa: E743
        return (self.l1, self.l2)[i - 1]

    def t(self, i: int) -> Scalar:
        return (self.t1, self.t2)[i - 1]


@dataclass(frozen=True)
class Params3:
    """三次变体的参数"""

    h1: Exponent
    h2: Exponent
    h3: Exponent
    l1: Exponent
    l2: Exponent
    l3: Exponent
    alpha: Exponent
    t1: Scalar
    t2: Scalar
    t3: Scalar

    def __post_init__(self):
        for name in ("t1", "t2", "t3"):
            _check_t(name, getattr(self, name))
        _ = self.nu

    @classmethod
    def create(cls, ctx: QContext, **values) -> "Params3":
        names = ("h1", "h2", "h3", "l1", "l2", "l3", "alpha")
        exps = {k: coerce_exponent(values[k], ctx.mode) for k in names}
        ts = {k: ctx.scalar(values[k]) for k in ("t1", "t2", "t3")}
        return cls(**exps, **ts)

    @property
    def nu(self) -> Exponent:
        """ν = (h1+h2+h3-l1-l2-l3+1)/2"""
        s = self.h1 + self.h2 + self.h3 - self.l1 - self.l2 - self.l3 + 1
        try:
            return s / 2
        except InvalidParameterError as e:
            raise InvalidParameterError("nu", f"({s})/2", "ν 必须是半整数") from e

    def h(self, i: int) -> Exponent:
        return (self.h1, self.h2, self.h3)[i - 1]

    def l(self, i: int) -> Exponent:  # noqa: E743
        return (self.l1, self.l2, self.l3)[i - 1]

    def t(self, i: int) -> Scalar:
        return (self.t1, self.t2, self.t3)[i - 1]

    def permuted(self, perm: Sequence[int]) -> "Params3":
        """新下标 k 取旧下标 perm[k-1]"""
        i, j, k = perm
        return Params3(
            self.h(i), self.h(j), self.h(k), self.l(i), self.l(j), self.l(k),
            self.alpha, self.t(i), self.t(j), self.t(k),
        )

    def replace(self, **changes) -> "Params3":
        return dataclasses.replace(self, **changes)


# ==================== 构造器 ====================


def make_qhypergeometric(ctx: QContext, a: Scalar, b: Scalar, c: Scalar) -> QDifferenceEquation:
    """(x - q) g(x/q) - ((a+b)x - q - c) g(x) + (abx - c) g(qx) = 0"""
    for name, val in (("a", a), ("b", b), ("c", c)):
        if val == 0:
            raise InvalidParameterError(name, val, "不能为 0")
    q = ctx.q
    u = Poly((-q, 1))
    v = Poly((q + c, -(a + b)))
    w = Poly((-c, a * b))
    return QDifferenceEquation(ctx, u, v, w, "qhyp")


def make_qheun(ctx: QContext, p2: Params2, beta: Exponent, E: Scalar) -> QDifferenceEquation:
    """q-Heun 方程 (标准参数化)"""
    u = Poly.from_roots([qpow(ctx, p2.h1 + HALF) * p2.t1, qpow(ctx, p2.h2 + HALF) * p2.t2])
    w = Poly.from_roots(
        [qpow(ctx, p2.l1 - HALF) * p2.t1, qpow(ctx, p2.l2 - HALF) * p2.t2],
        lead=qpow(ctx, p2.alpha1 + p2.alpha2),
    )
    s = p2.total
    try:
        beta_part = qpow(ctx, (s + beta) / 2) + qpow(ctx, (s - beta) / 2)
    except InvalidParameterError as e:
        raise InvalidParameterError("beta", beta, "h1+h2+l1+l2+α1+α2±β 必须是整数") from e
    v = Poly((
        -beta_part * p2.t1 * p2.t2,
        -E,
        -(qpow(ctx, p2.alpha1) + qpow(ctx, p2.alpha2)),
    ))
    return QDifferenceEquation(ctx, u, v, w, "qheun")


def variant_deg2_energy(ctx: QContext, p2: Params2) -> Scalar:
    """使 x=0 可消去的 E = -P{(q^{-h2}+q^{-l2})t1 + (q^{-h1}+q^{-l1})t2}"""
    P = qpow(ctx, p2.total / 2)
    return -P * (
        (qpow(ctx, -p2.h2) + qpow(ctx, -p2.l2)) * p2.t1
        + (qpow(ctx, -p2.h1) + qpow(ctx, -p2.l1)) * p2.t2
    )


def make_variant_deg2(ctx: QContext, p2: Params2) -> QDifferenceEquation:
    eq = make_qheun(ctx, p2, HalfInt.of(1), variant_deg2_energy(ctx, p2))
    return dataclasses.replace(eq, name="var2")


def make_variant_deg3(ctx: QContext, p3: Params3) -> QDifferenceEquation:
    """三次变体；x=0 与 x=inf 均为可消去奇点"""
    idx = (1, 2, 3)
    q = ctx.q
    u = Poly.from_roots([qpow(ctx, p3.h(i) + HALF) * p3.t(i) for i in idx])
    w = Poly.from_roots(
        [qpow(ctx, p3.l(i) - HALF) * p3.t(i) for i in idx],
        lead=qpow(ctx, 2 * p3.alpha + 1),
    )
    hl = p3.h1 + p3.h2 + p3.h3 + p3.l1 + p3.l2 + p3.l3
    t1, t2, t3 = p3.t1, p3.t2, p3.t3

    def pair(i: int) -> Scalar:
        return qpow(ctx, -p3.h(i)) + qpow(ctx, -p3.l(i))

    c3 = -(q + 1)
    c2 = sum((qpow(ctx, p3.h(i) + HALF) + qpow(ctx, p3.l(i) + HALF)) * p3.t(i) for i in idx)
    c1 = -qpow(ctx, (hl + 1) / 2) * (pair(1) * t2 * t3 + pair(2) * t1 * t3 + pair(3) * t1 * t2)
    c0 = qpow(ctx, hl / 2) * (q + 1) * t1 * t2 * t3
    v = Poly((c0, c1, c2, c3)) * qpow(ctx, p3.alpha)
    return QDifferenceEquation(ctx, u, v, w, "var3")


def apply(eq: QDifferenceEquation, f: Callable[[Scalar], Scalar], x: Scalar) -> Scalar:
    """u(x) f(x/q) + v(x) f(x) + w(x) f(qx)"""
    if x == 0:
        raise InvalidParameterError("x", x, "x=0 不在定义域内")
    q = eq.ctx.q
    return eq.u(x) * f(x / q) + eq.v(x) * f(x) + eq.w(x) * f(q * x)


def gauge_power(eq: QDifferenceEquation, mu: Exponent) -> QDifferenceEquation:
    """g = x^mu h 时 h 满足 (u q^{-mu}, v, w q^{mu})"""
    return eq.gauge_root(qpow(eq.ctx, mu))
