"""
标量算术、q 幂记账与 q-Pochhammer 原语。

exact 模式: 标量为 fractions.Fraction，p = q^{1/2} 为有理数，所有 q 的半整数次幂
都是 p 的整数次幂，因此恒等式残差可以精确为 0。
float 模式: 标量为 complex，参数限制全部放开。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Union

from qvariant.analysis.constants import DEFAULT_BIT_LIMIT, DEFAULT_TOLERANCE
from qvariant.analysis.errors import (
    InvalidParameterError,
    ModeMismatchError,
    PrecisionLimitError,
)
from qvariant.analysis.laurent import LaurentSeries

logger = logging.getLogger(__name__)

Mode = Literal["exact", "float"]
Scalar = Union[Fraction, complex, LaurentSeries]


class HalfInt:
    """半整数 e，内部保存 twice = 2e。"""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        if not isinstance(twice, int) or isinstance(twice, bool):
            raise InvalidParameterError("twice", twice, "必须是整数")
        object.__setattr__(self, "twice", twice)

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    @classmethod
    def of(cls, value: "HalfInt | int | Fraction | float | str") -> "HalfInt":
        """从 int / Fraction / '3/2' / 1.5 构造，非半整数时报错"""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise InvalidParameterError("exponent", value, "不是半整数")
        if isinstance(value, int):
            return cls(2 * value)
        try:
            frac = Fraction(value)
            if isinstance(value, float):
                frac = frac.limit_denominator(2)
        except (ValueError, TypeError) as e:
            raise InvalidParameterError("exponent", value, f"无法解析: {e}") from e
        if isinstance(value, float) and float(frac) != value:
            raise InvalidParameterError("exponent", value, "不是半整数")
        doubled = 2 * frac
        if doubled.denominator != 1:
            raise InvalidParameterError("exponent", value, "不是半整数")
        return cls(doubled.numerator)

    # ---------- 算术 ----------

    def __add__(self, other):
        if isinstance(other, HalfInt):
            return HalfInt(self.twice + other.twice)
        if isinstance(other, int) and not isinstance(other, bool):
            return HalfInt(self.twice + 2 * other)
        if isinstance(other, (float, complex)):
            return float(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __sub__(self, other):
        if isinstance(other, (HalfInt, int, float, complex)) and not isinstance(other, bool):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return HalfInt(self.twice * other)
        if isinstance(other, (float, complex)):
            return float(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            if self.twice % other:
                raise InvalidParameterError("exponent", f"{self}/{other}", "结果不是半整数")
            return HalfInt(self.twice // other)
        if isinstance(other, float):
            return float(self) / other
        return NotImplemented

    # ---------- 比较 / 转换 ----------

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2

    def __eq__(self, other) -> bool:
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.as_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        return self.as_fraction() < HalfInt.of(other).as_fraction()

    def __le__(self, other) -> bool:
        return self.as_fraction() <= HalfInt.of(other).as_fraction()

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def __repr__(self) -> str:
        return f"HalfInt({self})"

    def __str__(self) -> str:
        return str(self.twice // 2) if self.is_integer() else f"{self.twice}/2"


Exponent = Union[HalfInt, float, complex]


def coerce_exponent(value, mode: Mode) -> Exponent:
    """exact 模式要求半整数；float 模式转为 float (复数保留)"""
    if mode == "exact":
        return HalfInt.of(value)
    if isinstance(value, HalfInt):
        return float(value)
    if isinstance(value, complex):
        return value
    try:
        return float(Fraction(value)) if isinstance(value, str) else float(value)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError("exponent", value, f"无法解析: {e}") from e


@dataclass(frozen=True)
class QContext:
    """固定 p = q^{1/2} 与算术模式。"""

    p: Scalar
    mode: Mode = "exact"
    bit_limit: int = DEFAULT_BIT_LIMIT
    tolerance: float = DEFAULT_TOLERANCE
    q: Scalar = field(init=False, repr=False)

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise InvalidParameterError("mode", self.mode, "只支持 exact 或 float")
        p = self._convert(self.p)
        if p == 0:
            raise InvalidParameterError("p", self.p, "p 不能为 0")
        if self.mode == "exact" and p in (1, -1):
            raise InvalidParameterError("p", self.p, "q = 1 不被支持")
        if self.mode == "float" and abs(abs(p) - 1.0) < 1e-15:
            raise InvalidParameterError("p", self.p, "q 在单位圆上不被支持")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", p * p)

    @classmethod
    def exact(cls, p: "int | Fraction | str", **kwargs) -> "QContext":
        return cls(p=p, mode="exact", **kwargs)

    @classmethod
    def floating(cls, p: "float | complex | str", **kwargs) -> "QContext":
        return cls(p=p, mode="float", **kwargs)

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    def _convert(self, value) -> Scalar:
        if self.mode == "exact":
            if isinstance(value, (float, complex)):
                raise ModeMismatchError("exact", value)
            if isinstance(value, LaurentSeries):
                return value
            try:
                return Fraction(value)
            except (TypeError, ValueError) as e:
                raise InvalidParameterError("scalar", value, f"不是有理数: {e}") from e
        if isinstance(value, LaurentSeries):
            raise ModeMismatchError("float", value)
        if isinstance(value, str):
            try:
                return complex(float(Fraction(value)))
            except ValueError:
                return complex(value.replace(" ", ""))
        return complex(value)

    def scalar(self, value) -> Scalar:
        """把用户输入转换为本模式的标量，混用模式时报错"""
        return self._convert(value)

    def number(self, e: Exponent) -> Scalar:
        """把指数本身当作标量使用 (连续极限中的系数)"""
        if isinstance(e, HalfInt):
            return e.as_fraction() if self.is_exact else complex(float(e))
        if self.is_exact:
            raise ModeMismatchError("exact", e)
        return complex(e)

    def one(self) -> Scalar:
        return Fraction(1) if self.is_exact else complex(1.0)

    def zero(self) -> Scalar:
        return Fraction(0) if self.is_exact else complex(0.0)

    def check(self, value: Scalar) -> Scalar:
        """有理数位数检查，超限硬失败"""
        if isinstance(value, Fraction):
            bits = value.numerator.bit_length() + value.denominator.bit_length()
            if bits > self.bit_limit:
                raise PrecisionLimitError(bits, self.bit_limit)
        return value

    def magnitude(self, value: Scalar) -> float:
        if isinstance(value, LaurentSeries):
            return 0.0 if value.is_exact_zero() else 1.0
        try:
            return abs(complex(value))
        except OverflowError:
            return float("inf")

    def is_zero(self, value: Scalar, scale: float | None = None) -> bool:
        """exact: 精确为 0；float: 相对 scale 不超过容差"""
        if self.is_exact:
            return value == 0
        bound = self.tolerance * (scale if scale is not None and scale > 0 else 1.0)
        return abs(value) <= bound


def qpow(ctx: QContext, e: "Exponent | int") -> Scalar:
    """q^e = p^{2e}"""
    if isinstance(e, int) and not isinstance(e, bool):
        e = HalfInt(2 * e)
    if isinstance(e, HalfInt):
        return ctx.check(ctx.p ** e.twice)
    if ctx.is_exact:
        raise ModeMismatchError("exact", e)
    return ctx.p ** (2 * e)


def qpoch(ctx: QContext, a: Scalar, n: int) -> Scalar:
    """(a;q)_n = prod_{j<n} (1 - a q^j)"""
    if n < 0:
        raise InvalidParameterError("n", n, "Pochhammer 下标不能为负")
    result = ctx.one()
    qj = ctx.one()
    for _ in range(n):
        result = result * (1 - a * qj)
        qj = qj * ctx.q
    return ctx.check(result)


def qpoch_ratio_step(ctx: QContext, a: Scalar, n: int) -> Scalar:
    """(a;q)_{n+1} / (a;q)_n = 1 - a q^n"""
    if n < 0:
        raise InvalidParameterError("n", n, "Pochhammer 下标不能为负")
    return 1 - a * ctx.q ** n


def qpoch_table(ctx: QContext, a: Scalar, n: int) -> list[Scalar]:
    """[(a;q)_0, ..., (a;q)_n]，逐项乘 ratio step"""
    table = [ctx.one()]
    qj = ctx.one()
    for _ in range(n):
        table.append(ctx.check(table[-1] * (1 - a * qj)))
        qj = qj * ctx.q
    return table
