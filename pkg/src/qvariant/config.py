"""
Configuration management for qvariant

优先级: 命令行参数 > --config JSON 文件 > QVARIANT_* 环境变量 (.env) > 默认值

算术模式:
- exact: p = q^{1/2} 为有理数，h/l/alpha 参数必须是半整数，恒等式残差精确为 0
- float: p 为复数或浮点数，参数不受限制，残差按相对容差判断
"""

import dataclasses
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from qvariant.analysis.constants import (
    DEFAULT_BIT_LIMIT,
    DEFAULT_EPSILONS,
    DEFAULT_MAX_WORKERS,
    DEFAULT_TOLERANCE,
    DEFAULT_TRUNCATION,
)
from qvariant.analysis.errors import InvalidParameterError
from qvariant.analysis.qcore import QContext, coerce_exponent
from qvariant.analysis.qdiff import Params2, Params3

load_dotenv()


Mode = Literal["exact", "float"]
OutputFormat = Literal["json", "csv"]

EXPONENT_KEYS = ("h1", "h2", "h3", "l1", "l2", "l3", "alpha", "alpha1", "alpha2", "beta")
SCALAR_KEYS = ("t1", "t2", "t3", "E")
PARAM_KEYS = EXPONENT_KEYS + SCALAR_KEYS

# 二次变体默认参数 (golden 抽样): lambda = 1/2
DEFAULT_PARAMS2 = {"h1": "1", "h2": "0", "l1": "0", "l2": "0", "alpha1": "0", "alpha2": "1",
                   "t1": "1", "t2": "2"}
# 三次变体默认参数: nu = 1
DEFAULT_PARAMS3 = {"h1": "1", "h2": "0", "h3": "0", "l1": "0", "l2": "0", "l3": "0", "alpha": "0",
                   "t1": "1", "t2": "2", "t3": "3"}


class ConfigFile(BaseModel):
    """--config 指定的 JSON 文件；未知字段直接拒绝"""

    model_config = ConfigDict(extra="forbid")

    mode: Mode | None = None
    p: str | float | None = None
    N: int | None = Field(default=None, ge=0)
    seed: int | None = None
    draws: int | None = Field(default=None, ge=1)
    output: OutputFormat | None = None
    tolerance: float | None = Field(default=None, gt=0)
    bit_limit: int | None = Field(default=None, gt=0)
    max_workers: int | None = Field(default=None, ge=1)
    epsilons: list[float] | None = None
    params: dict[str, str | int | float] = Field(default_factory=dict)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise InvalidParameterError(name, raw, "必须是整数") from e


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise InvalidParameterError(name, raw, "必须是数值") from e


@dataclass
class RunConfig:
    """一次运行的全部设置"""

    mode: Mode = "exact"
    # exact 模式为有理数字符串，float 模式可以是浮点或复数字面量
    p: str = "1/2"
    N: int = DEFAULT_TRUNCATION
    seed: int = 0
    draws: int = 20
    output: OutputFormat = "json"
    tolerance: float = DEFAULT_TOLERANCE
    bit_limit: int = DEFAULT_BIT_LIMIT
    max_workers: int = DEFAULT_MAX_WORKERS
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    # 按参数符号名: h1 ... t3, alpha, alpha1, alpha2, beta, E
    params: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_env(cls) -> "RunConfig":
        """Create config from environment variables"""
        mode = os.getenv("QVARIANT_MODE", "exact")
        output = os.getenv("QVARIANT_OUTPUT", "json")
        if mode not in ("exact", "float"):
            raise InvalidParameterError("QVARIANT_MODE", mode, "只支持 exact 或 float")
        if output not in ("json", "csv"):
            raise InvalidParameterError("QVARIANT_OUTPUT", output, "只支持 json 或 csv")
        return cls(
            mode=mode,  # type: ignore[arg-type]
            p=os.getenv("QVARIANT_P", "1/2"),
            N=_env_int("QVARIANT_N", DEFAULT_TRUNCATION),
            seed=_env_int("QVARIANT_SEED", 0),
            draws=_env_int("QVARIANT_DRAWS", 20),
            output=output,  # type: ignore[arg-type]
            tolerance=_env_float("QVARIANT_TOL", DEFAULT_TOLERANCE),
            bit_limit=_env_int("QVARIANT_BIT_LIMIT", DEFAULT_BIT_LIMIT),
            max_workers=_env_int("QVARIANT_MAX_WORKERS", DEFAULT_MAX_WORKERS),
        )

    def merged_with_file(self, path: str | Path) -> "RunConfig":
        """读取 JSON 配置文件并覆盖对应字段"""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            parsed = ConfigFile.model_validate(raw)
        except FileNotFoundError as e:
            raise InvalidParameterError("config", str(path), "文件不存在") from e
        except json.JSONDecodeError as e:
            raise InvalidParameterError("config", str(path), f"不是合法 JSON: {e}") from e
        except ValidationError as e:
            msg = e.errors()[0]["msg"]
            raise InvalidParameterError("config", str(path), f"字段校验失败: {msg}") from e

        changes: dict[str, Any] = {}
        scalars = ("mode", "N", "seed", "draws", "output", "tolerance", "bit_limit", "max_workers")
        for name in scalars:
            value = getattr(parsed, name)
            if value is not None:
                changes[name] = value
        if parsed.p is not None:
            changes["p"] = str(parsed.p)
        if parsed.epsilons is not None:
            changes["epsilons"] = tuple(parsed.epsilons)
        if parsed.params:
            changes["params"] = {**self.params, **{k: str(v) for k, v in parsed.params.items()}}
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        return cls().merged_with_file(path)

    def with_overrides(self, params: dict[str, Any] | None = None, **changes: Any) -> "RunConfig":
        """命令行参数覆盖；值为 None 的项忽略"""
        updates = {k: v for k, v in changes.items() if v is not None}
        if params:
            merged = dict(self.params)
            merged.update({k: str(v) for k, v in params.items() if v is not None})
            updates["params"] = merged
        return dataclasses.replace(self, **updates)

    # ---------- 校验与构造 ----------

    def validate(self) -> None:
        """exact 模式要求 p 为有理数、指数参数为半整数"""
        if self.mode not in ("exact", "float"):
            raise InvalidParameterError("mode", self.mode, "只支持 exact 或 float")
        if self.output not in ("json", "csv"):
            raise InvalidParameterError("output", self.output, "只支持 json 或 csv")
        if self.N < 0:
            raise InvalidParameterError("N", self.N, "不能为负")
        if self.draws < 1:
            raise InvalidParameterError("draws", self.draws, "至少为 1")
        unknown = set(self.params) - set(PARAM_KEYS)
        if unknown:
            allowed = ", ".join(PARAM_KEYS)
            raise InvalidParameterError("params", sorted(unknown), f"未知参数，可选: {allowed}")
        self.context()
        for key in EXPONENT_KEYS:
            if key in self.params:
                coerce_exponent(self.params[key], self.mode)

    def context(self) -> QContext:
        if self.mode == "exact":
            try:
                p = Fraction(self.p)
            except (ValueError, ZeroDivisionError) as e:
                raise InvalidParameterError("p", self.p, "exact 模式要求有理数 p") from e
            return QContext.exact(p, bit_limit=self.bit_limit, tolerance=self.tolerance)
        return QContext.floating(self.p, bit_limit=self.bit_limit, tolerance=self.tolerance)

    def exponent(self, key: str, default: str) -> Any:
        return coerce_exponent(self.params.get(key, default), self.mode)

    def scalar(self, ctx: QContext, key: str, default: str | None) -> Any:
        raw = self.params.get(key, default)
        return None if raw is None else ctx.scalar(raw)

    def params2(self, ctx: QContext) -> Params2:
        values = {k: self.params.get(k, v) for k, v in DEFAULT_PARAMS2.items()}
        return Params2.create(ctx, **values)

    def params3(self, ctx: QContext) -> Params3:
        values = {k: self.params.get(k, v) for k, v in DEFAULT_PARAMS3.items()}
        return Params3.create(ctx, **values)

    def to_dict(self) -> dict[str, Any]:
        """写入报告的配置快照 (确定性)"""
        return {
            "mode": self.mode,
            "p": self.p,
            "N": self.N,
            "seed": self.seed,
            "draws": self.draws,
            "tolerance": self.tolerance,
            "epsilons": list(self.epsilons),
            "params": dict(sorted(self.params.items())),
        }
