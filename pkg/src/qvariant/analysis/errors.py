"""
自定义异常类型。

所有模块错误都继承自 QVariantError，CLI 与验证套件据此区分
"检查失败" 与 "代码异常"。
"""

from typing import Any


class QVariantError(Exception):
    """qvariant 基础异常类"""
    pass


class InvalidParameterError(QVariantError):
    """参数验证失败异常"""
    def __init__(self, param_name: str, param_value: Any, reason: str):
        self.param_name = param_name
        self.param_value = param_value
        self.reason = reason
        super().__init__(f"参数 {param_name}={param_value} 无效: {reason}")


class ModeMismatchError(QVariantError):
    """exact / float 标量混用"""
    def __init__(self, expected: str, got: Any):
        self.expected = expected
        self.got = got
        super().__init__(f"{expected} 模式下不接受 {type(got).__name__} 值: {got!r}")


class PrecisionLimitError(QVariantError):
    """有理数位数超过上限，或截断 Laurent 级数已无可用项"""
    def __init__(self, bits: int, limit: int, detail: str = ""):
        self.bits = bits
        self.limit = limit
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"精度上限: {bits} bits > {limit} bits{suffix}")


class NotRegularSingularError(QVariantError):
    """not a regular-singular anchor"""
    def __init__(self, anchor: str, reason: str):
        self.anchor = anchor
        self.reason = reason
        super().__init__(f"x={anchor} 不是正则奇点 (not a regular-singular anchor): {reason}")


class IrrationalExponentError(QVariantError):
    """exact 模式下特征根不在 Q 中"""
    def __init__(self, discriminant: Any):
        self.discriminant = discriminant
        super().__init__(
            f"特征方程判别式 {discriminant} 不是有理平方数，请改用 float 模式"
        )


class ExponentGapError(QVariantError):
    """指数对之差不是给定的整数 N"""
    def __init__(self, low: Any, gap: int):
        self.low = low
        self.gap = gap
        super().__init__(f"{low} 与 {low}+{gap} 不同时是特征指数")


class LogarithmicCaseError(QVariantError):
    """共振且不可消去: 需要对数项"""
    def __init__(self, exponent: Any, order: int, obstruction: Any):
        self.exponent = exponent
        self.order = order
        self.obstruction = obstruction
        super().__init__(
            f"指数 {exponent} 在阶 {order} 处共振, 障碍项 {obstruction} != 0 (logarithmic case)"
        )


class VanishingDenominatorError(QVariantError):
    """Pochhammer 分母为零"""
    def __init__(self, factor: str, n: int):
        self.factor = factor
        self.n = n
        super().__init__(f"分母 {factor} 在 n={n} 处为零")


class NodeCoincidenceError(QVariantError):
    """基函数节点重合"""
    def __init__(self, nodes: Any):
        self.nodes = nodes
        super().__init__(f"节点重合: {nodes}")


class UnknownTargetError(QVariantError):
    """未知的方程 / 级数 / 套件名称"""
    def __init__(self, kind: str, name: str, choices: list[str] | tuple[str, ...]):
        self.kind = kind
        self.name = name
        self.choices = tuple(choices)
        super().__init__(f"未知{kind}: {name} (可选: {', '.join(self.choices)})")


class LimitDivergenceError(QVariantError):
    """系数极限不存在"""
    def __init__(self, parameter: str, order: int):
        self.parameter = parameter
        self.order = order
        super().__init__(f"{parameter} 极限下第 {order} 个系数发散")


class TerminatingSeriesError(QVariantError):
    """分子参数使 (x;q)_m 在截断内为零，级数退化为多项式"""
    def __init__(self, name: str, value: Any, m: int):
        self.name = name
        self.value = value
        self.m = m
        super().__init__(f"参数 {name}={value}: (x;q)_{m} = 0，级数在 m={m} 处截断")
