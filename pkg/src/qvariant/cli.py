"""
Command Line Interface for qvariant.

机器可读输出 (JSON / CSV) 写到 stdout，rich 表格与日志写到 stderr。
"""

import json
import logging
import sys
from pathlib import Path
from typing import Annotated, Any, NoReturn, Optional

import pandas as pd
import typer
from rich.console import Console
from rich.logging import RichHandler

from qvariant import __version__
from qvariant.analysis.codec import series_to_json
from qvariant.analysis.errors import InvalidParameterError, QVariantError
from qvariant.config import RunConfig
from qvariant.formatter import (
    format_appell,
    format_error,
    format_exponents,
    format_ledger,
    format_limits,
    format_series,
)
from qvariant.suites import (
    EQUATIONS,
    SERIES_KINDS,
    TARGETS,
    appell_report,
    build_series,
    exponent_table,
    limit_ladder,
    run_suite,
)

app = typer.Typer(
    name="qvariant",
    help=(
        "q-difference variants of the Heun equation: "
        "exponents, closed-form series and identity checks"
    ),
    add_completion=False,
)

# 表格与日志都走 stderr，stdout 只留给 JSON / CSV
console = Console(stderr=True)


# ==================== 共享选项 ====================

Mode = Annotated[Optional[str], typer.Option("--mode", help="exact | float")]
P = Annotated[Optional[str], typer.Option("--p", help="p = q^{1/2} (exact 模式为有理数)")]
Trunc = Annotated[Optional[int], typer.Option("--N", help="截断阶")]
Seed = Annotated[Optional[int], typer.Option("--seed", help="随机种子 (默认取 QVARIANT_SEED)")]
Draws = Annotated[Optional[int], typer.Option("--draws", help="抽样次数")]
Out = Annotated[Optional[str], typer.Option("--out", help="json | csv")]
Tol = Annotated[Optional[float], typer.Option("--tol", help="float 模式相对容差")]
Workers = Annotated[Optional[int], typer.Option("--workers", help="并行线程数")]
ConfigPath = Annotated[Optional[Path], typer.Option("--config", help="JSON 配置文件")]
Verbose = Annotated[bool, typer.Option("--verbose", "-v", help="输出 DEBUG 日志")]
Epsilons = Annotated[
    Optional[str], typer.Option("--epsilons", help="逗号分隔的 epsilon 网格，如 1e-1,1e-2,1e-3")
]


def _param(flag: str, help_text: str) -> Any:
    return Annotated[Optional[str], typer.Option(flag, help=help_text)]


H1 = _param("--h1", "h1")
H2 = _param("--h2", "h2")
H3 = _param("--h3", "h3")
L1 = _param("--l1", "l1")
L2 = _param("--l2", "l2")
L3 = _param("--l3", "l3")
T1 = _param("--t1", "t1")
T2 = _param("--t2", "t2")
T3 = _param("--t3", "t3")
Alpha = _param("--alpha", "alpha (三次变体)")
Alpha1 = _param("--alpha1", "alpha1")
Alpha2 = _param("--alpha2", "alpha2")
Beta = _param("--beta", "beta (q-Heun)")
Energy = _param("--E", "E (q-Heun 附加参数)")


def setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def _parse_epsilons(raw: str | None) -> tuple[float, ...] | None:
    if raw is None:
        return None
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError as e:
        raise InvalidParameterError("epsilons", raw, "必须是逗号分隔的数值") from e


def _parse_perm(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in raw.replace("(", "").replace(")", "").split(","))
    except ValueError as e:
        raise InvalidParameterError("perm", raw, "形如 1,2,3") from e


def load_config(
    config_path: Path | None = None,
    params: dict[str, Any] | None = None,
    **overrides: Any,
) -> RunConfig:
    """环境变量 -> --config 文件 -> 命令行参数，逐层覆盖"""
    cfg = RunConfig.from_env()
    if config_path is not None:
        cfg = cfg.merged_with_file(config_path)
    cfg = cfg.with_overrides(params=params, **overrides)
    cfg.validate()
    return cfg


def _emit_json(data: Any) -> None:
    typer.echo(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False))


def _emit_frame(frame: pd.DataFrame) -> None:
    frame.to_csv(sys.stdout, index=False)


def _fail(error: QVariantError) -> NoReturn:
    console.print(format_error(error))
    raise typer.Exit(1)


# ==================== 命令 ====================


@app.command()
def exponents(
    eq: Annotated[str, typer.Option("--eq", help=" | ".join(EQUATIONS))] = "var2",
    mode: Mode = None, p: P = None, out: Out = None, config: ConfigPath = None,
    verbose: Verbose = False,
    h1: H1 = None, h2: H2 = None, h3: H3 = None, l1: L1 = None, l2: L2 = None, l3: L3 = None,
    t1: T1 = None, t2: T2 = None, t3: T3 = None,
    alpha: Alpha = None, alpha1: Alpha1 = None, alpha2: Alpha2 = None,
    beta: Beta = None, E: Energy = None,
):
    """
    打印方程在 x=0 与 x=inf 处的特征指数与可消去性。

    示例:
        qvariant exponents --eq var2
        qvariant exponents --eq qheun --beta 2
    """
    setup_logging(verbose)
    params = dict(h1=h1, h2=h2, h3=h3, l1=l1, l2=l2, l3=l3, t1=t1, t2=t2, t3=t3,
                  alpha=alpha, alpha1=alpha1, alpha2=alpha2, beta=beta, E=E)
    try:
        cfg = load_config(config, params, mode=mode, p=p, output=out)
        report = exponent_table(cfg, eq)
    except QVariantError as e:
        _fail(e)

    console.print(format_exponents(report))
    if cfg.output == "csv":
        keys = ("exponents", "gap", "apparent", "obstruction")
        rows = [
            {"anchor": anchor, **{k: report[anchor][k] for k in keys}}
            for anchor in ("zero", "infinity")
        ]
        _emit_frame(pd.DataFrame(rows))
    else:
        _emit_json(report)


@app.command()
def series(
    which: Annotated[str, typer.Argument(help=" | ".join(SERIES_KINDS))],
    anchor: Annotated[str, typer.Option("--anchor", help="zero | infinity (frobenius)")] = "zero",
    exponent: Annotated[Optional[str], typer.Option("--exponent", help="局部指数 (frobenius)")] = None,
    i: Annotated[int, typer.Option("--i", help="g2 / g3 的下标 1 或 2")] = 1,
    perm: Annotated[str, typer.Option("--perm", help="conjI / conjII 的排列")] = "1,2,3",
    eq: Annotated[str, typer.Option("--eq", help="frobenius 使用的方程")] = "var2",
    mode: Mode = None, p: P = None, N: Trunc = None, out: Out = None, config: ConfigPath = None,
    verbose: Verbose = False,
    h1: H1 = None, h2: H2 = None, h3: H3 = None, l1: L1 = None, l2: L2 = None, l3: L3 = None,
    t1: T1 = None, t2: T2 = None, t3: T3 = None,
    alpha: Alpha = None, alpha1: Alpha1 = None, alpha2: Alpha2 = None,
    beta: Beta = None, E: Energy = None,
):
    """
    输出级数系数 (有理数字符串或 [re, im])，附前因子指数与基的描述。

    示例:
        qvariant series g2 --N 5
        qvariant series frobenius --anchor infinity --exponent 0
        qvariant series conjII --perm 3,1,2 --N 8
    """
    setup_logging(verbose)
    params = dict(h1=h1, h2=h2, h3=h3, l1=l1, l2=l2, l3=l3, t1=t1, t2=t2, t3=t3,
                  alpha=alpha, alpha1=alpha1, alpha2=alpha2, beta=beta, E=E)
    try:
        cfg = load_config(config, params, mode=mode, p=p, N=N, output=out)
        result = build_series(cfg, which, anchor=anchor, exponent=exponent, i=i,
                              perm=_parse_perm(perm), eq_name=eq)
    except QVariantError as e:
        _fail(e)

    data = series_to_json(result)
    console.print(format_series(data))
    if cfg.output == "csv":
        coeffs = [str(c) for c in data["coeffs"]]
        _emit_frame(pd.DataFrame({"n": range(len(coeffs)), "coeff": coeffs}))
    else:
        _emit_json(data)


@app.command()
def verify(
    target: Annotated[str, typer.Argument(help=" | ".join(TARGETS))],
    mode: Mode = None, p: P = None, N: Trunc = None, seed: Seed = None, draws: Draws = None,
    out: Out = None, tol: Tol = None, workers: Workers = None, epsilons: Epsilons = None,
    config: ConfigPath = None,
    save: Annotated[Optional[Path], typer.Option("--save", help="另存报告 (.json 或 .jsonl)")] = None,
    verbose: Verbose = False,
):
    """
    在带种子的随机参数上运行一组恒等式检验；全部通过时退出码为 0。

    示例:
        qvariant verify thm2 --draws 20 --N 50 --mode exact
        qvariant verify conj3 --draws 50 --N 12
        qvariant verify ode --epsilons 1e-1,1e-2,1e-3
    """
    setup_logging(verbose)
    try:
        cfg = load_config(
            config, None, mode=mode, p=p, N=N, seed=seed, draws=draws, output=out,
            tolerance=tol, max_workers=workers, epsilons=_parse_epsilons(epsilons),
        )
        ledger = run_suite(cfg, target)
    except QVariantError as e:
        _fail(e)

    console.print(format_ledger(ledger))
    if save is not None:
        if save.suffix == ".jsonl":
            ledger.write_jsonl(save)
        else:
            ledger.write_json(save)
    if cfg.output == "csv":
        _emit_frame(ledger.to_frame())
    else:
        typer.echo(ledger.to_json())
    if not ledger.all_passed:
        raise typer.Exit(1)


@app.command()
def limits(
    step: Annotated[str, typer.Option("--step", help="t3 | t2 | q | all")] = "all",
    mode: Mode = None, p: P = None, N: Trunc = None, out: Out = None, epsilons: Epsilons = None,
    config: ConfigPath = None, verbose: Verbose = False,
    h1: H1 = None, h2: H2 = None, h3: H3 = None, l1: L1 = None, l2: L2 = None, l3: L3 = None,
    t1: T1 = None, t2: T2 = None, t3: T3 = None,
    alpha: Alpha = None, alpha1: Alpha1 = None, alpha2: Alpha2 = None,
):
    """
    在给定参数上走一遍退化阶梯: t3->inf，t2->0，q->1。

    示例:
        qvariant limits --step q --epsilons 1e-1,1e-2,1e-3 --out csv
        qvariant limits --step t2 --h1 1/2 --h2 -1/2 --l1 0 --l2 0 --alpha1 0 --alpha2 1
    """
    setup_logging(verbose)
    params = dict(h1=h1, h2=h2, h3=h3, l1=l1, l2=l2, l3=l3, t1=t1, t2=t2, t3=t3,
                  alpha=alpha, alpha1=alpha1, alpha2=alpha2)
    steps = ("t3", "t2", "q") if step == "all" else (step,)
    try:
        cfg = load_config(
            config, params, mode=mode, p=p, N=N, output=out, epsilons=_parse_epsilons(epsilons)
        )
        reports, summary = limit_ladder(cfg, steps)
    except QVariantError as e:
        _fail(e)

    console.print(format_limits(reports, summary))
    if cfg.output == "csv":
        frames = [r.to_frame() for r in reports]
        _emit_frame(pd.concat(frames, ignore_index=True) if frames else pd.DataFrame())
    else:
        _emit_json({
            "reports": [
                {"label": r.label, "parameter": r.parameter, "values": r.values, "gaps": r.gaps,
                 "slope": r.slope, "exact_match": r.exact_match, "passed": r.passed}
                for r in reports
            ],
            "summary": summary,
        })
    if not summary["passed"]:
        raise typer.Exit(1)


@app.command()
def appell(
    a: Annotated[str, typer.Option("--a", help="a")] = "1/3",
    b: Annotated[str, typer.Option("--b", help="b")] = "2/5",
    b_prime: Annotated[str, typer.Option("--bp", help="b'")] = "3/7",
    c: Annotated[Optional[str], typer.Option("--c", help="c (默认 bb')")] = None,
    x: Annotated[str, typer.Option("--x", help="x")] = "1/10",
    y: Annotated[str, typer.Option("--y", help="y")] = "1/20",
    mode: Mode = None, p: P = None, N: Trunc = None, config: ConfigPath = None,
    verbose: Verbose = False,
):
    """
    计算 q-Appell 函数 Phi^(1) 的部分和以及各差分关系的残差。

    示例:
        qvariant appell --N 12
        qvariant appell --c 1/2 --N 12
    """
    setup_logging(verbose)
    try:
        cfg = load_config(config, None, mode=mode, p=p, N=N)
        report = appell_report(cfg, a, b, b_prime, c, x, y)
    except QVariantError as e:
        _fail(e)

    console.print(format_appell(report))
    _emit_json(report)
    if not report["passed"]:
        raise typer.Exit(1)


@app.command()
def version():
    """
    显示版本信息。
    """
    typer.echo(f"qvariant v{__version__}")


if __name__ == "__main__":
    app()
