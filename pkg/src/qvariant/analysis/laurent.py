"""
截断 Laurent 级数 (关于形式变量 s, 系数为有理数)。

用于在 exact 模式下求参数极限: 令 t3 = 1/s (t3 -> inf) 或 t2 = s (t2 -> 0)，
所有闭式系数的构造代码无需改动即可在该标量上运行，最后取 s^0 项。

精度模型与 p-adic 数相同: 每个值带绝对精度 prec (已知 s^k, k < prec)，
prec 为 None 表示精确的 Laurent 多项式。
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from qvariant.analysis.constants import LAURENT_PRECISION
from qvariant.analysis.errors import PrecisionLimitError

_Coercible = Union[int, Fraction, "LaurentSeries"]


def _min_prec(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    """Truncated Laurent series sum_k c_k s^k over Q."""

    __slots__ = ("coeffs", "prec", "rel")

    def __init__(
        self,
        coeffs: dict[int, Fraction] | None = None,
        prec: int | None = None,
        rel: int = LAURENT_PRECISION,
    ):
        kept: dict[int, Fraction] = {}
        for k, c in (coeffs or {}).items():
            if c != 0 and (prec is None or k < prec):
                kept[k] = Fraction(c)
        self.coeffs = kept
        self.prec = prec
        self.rel = rel

    # ---------- 构造 ----------

    @classmethod
    def monomial(
        cls, coeff: int | Fraction, power: int, rel: int = LAURENT_PRECISION
    ) -> "LaurentSeries":
        return cls({power: Fraction(coeff)}, None, rel)

    @classmethod
    def at_infinity(cls, rel: int = LAURENT_PRECISION) -> "LaurentSeries":
        """t = 1/s, 用于 t -> inf"""
        return cls.monomial(1, -1, rel)

    @classmethod
    def at_zero(cls, rel: int = LAURENT_PRECISION) -> "LaurentSeries":
        """t = s, 用于 t -> 0"""
        return cls.monomial(1, 1, rel)

    def _coerce(self, other: object) -> "LaurentSeries | None":
        if isinstance(other, LaurentSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentSeries({0: Fraction(other)}, None, self.rel)
        return None

    # ---------- 查询 ----------

    def valuation(self) -> int | None:
        """最低非零项次数; 若无已知非零项返回 None"""
        return min(self.coeffs) if self.coeffs else None

    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.prec is None

    def coefficient(self, k: int) -> Fraction:
        if self.prec is not None and k >= self.prec:
            raise PrecisionLimitError(k, self.prec, "Laurent 系数超出已知精度")
        return self.coeffs.get(k, Fraction(0))

    # ---------- 算术 ----------

    def __add__(self, other: object) -> "LaurentSeries":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        prec = _min_prec(self.prec, o.prec)
        out = dict(self.coeffs)
        for k, c in o.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return LaurentSeries(out, prec, min(self.rel, o.rel))

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries({k: -c for k, c in self.coeffs.items()}, self.prec, self.rel)

    def __pos__(self) -> "LaurentSeries":
        return self

    def __sub__(self, other: object) -> "LaurentSeries":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "LaurentSeries":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> "LaurentSeries":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_exact_zero() or o.is_exact_zero():
            return LaurentSeries({}, None, min(self.rel, o.rel))
        va, vb = self.valuation(), o.valuation()
        # prec = min(Pa + vb, Pb + va)，None 视为无穷
        cands = []
        if self.prec is not None:
            cands.append(self.prec + (vb if vb is not None else (o.prec or 0)))
        if o.prec is not None:
            cands.append(o.prec + (va if va is not None else (self.prec or 0)))
        prec = min(cands) if cands else None
        out: dict[int, Fraction] = {}
        for i, a in self.coeffs.items():
            for j, b in o.coeffs.items():
                k = i + j
                if prec is not None and k >= prec:
                    continue
                out[k] = out.get(k, Fraction(0)) + a * b
        return LaurentSeries(out, prec, min(self.rel, o.rel))

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        v = self.valuation()
        if v is None:
            raise PrecisionLimitError(0, self.prec or 0, "对未知首项的 Laurent 级数求逆")
        if self.prec is None and len(self.coeffs) == 1:
            return LaurentSeries({-v: 1 / self.coeffs[v]}, None, self.rel)
        terms = (self.prec - v) if self.prec is not None else self.rel
        c = [self.coeffs.get(v + j, Fraction(0)) for j in range(terms)]
        lead = c[0]
        d = [1 / lead]
        for k in range(1, terms):
            acc = sum((c[j] * d[k - j] for j in range(1, k + 1)), Fraction(0))
            d.append(-acc / lead)
        return LaurentSeries({k - v: dk for k, dk in enumerate(d)}, terms - v, self.rel)

    def __truediv__(self, other: object) -> "LaurentSeries":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> "LaurentSeries":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "LaurentSeries":
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = LaurentSeries({0: Fraction(1)}, None, self.rel)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_exact_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*s^{k}" for k, c in sorted(self.coeffs.items())) or "0"
        tail = "" if self.prec is None else f" + O(s^{self.prec})"
        return f"LaurentSeries({body}{tail})"
