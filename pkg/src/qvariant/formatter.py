"""
Output formatting utilities for the CLI tables (rendered to stderr).
"""

from typing import Any

from rich import box
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from qvariant.analysis.limits import LimitReport
from qvariant.ledger import VerificationLedger


_TARGET_DISPLAY_NAMES: dict[str, str] = {
    "exponents": "特征指数与可消去性",
    "thm1": "q 超几何方程的三类解",
    "thm2": "二次变体 g2 的六项递推",
    "thm3": "二次变体 g3 的双重递推",
    "prop31": "g1 与 Appell 函数特化",
    "conj3": "三次变体猜想解 (证据)",
    "appell-a2": "Appell 函数一阶关系与消元链",
    "appell-a6": "Appell 函数 c=bb' 二阶关系",
    "limits": "退化阶梯 t3->inf, t2->0",
    "ode": "q->1 连续极限",
}


def target_display_name(target: str) -> str:
    return _TARGET_DISPLAY_NAMES.get(target, target)


def _status(passed: bool | None) -> str:
    if passed is None:
        return "[dim]—[/dim]"
    return "[bold green]✓ 通过[/bold green]" if passed else "[bold red]✗ 失败[/bold red]"


def _short(value: Any, width: int = 48) -> str:
    text = str(value)
    return text if len(text) <= width else text[: width - 1] + "…"


def format_ledger(ledger: VerificationLedger, max_rows: int = 20) -> Panel:
    """verify 结果: 汇总 + 前 max_rows 条失败或全部记录"""
    table = Table(box=box.SIMPLE, border_style="cyan", padding=(0, 1))
    table.add_column("#", style="cyan", justify="right")
    table.add_column("状态")
    table.add_column("说明", style="white")

    failures = ledger.failures()
    rows = failures if failures else sorted(ledger.records, key=lambda r: r.index)
    for record in rows[:max_rows]:
        if record.error:
            detail = f"[red]{record.error_type}[/red]: {_short(record.error)}"
        elif not record.passed:
            detail = _short(record.params)
        else:
            metrics = ", ".join(f"{k}={v}" for k, v in sorted(record.metrics.items()))
            detail = f"[dim]{_short(metrics)}[/dim]"
        table.add_row(str(record.index), _status(record.passed), detail)
    if len(rows) > max_rows:
        table.add_row("…", "", f"[dim]另有 {len(rows) - max_rows} 条未显示[/dim]")

    summary = Text()
    style = "bold green" if ledger.all_passed else "bold red"
    summary.append(f"{ledger.passed_count}/{len(ledger.records)} 通过", style=style)
    if ledger.note:
        summary.append(f"\n{ledger.note}", style="italic yellow")

    title = f"🔬 {target_display_name(ledger.target)}"
    return Panel(
        _stack(summary, table),
        title=f"[bold blue]{title}[/bold blue]",
        border_style="green" if ledger.all_passed else "red",
        box=box.ROUNDED,
        padding=(1, 2),
    )


def _stack(*renderables: Any) -> Table:
    grid = Table.grid()
    for item in renderables:
        grid.add_row(item)
    return grid


def format_exponents(report: dict[str, Any]) -> Panel:
    """两个锚点的指数、间隔与障碍项"""
    table = Table(box=box.SIMPLE, border_style="cyan", padding=(0, 2))
    table.add_column("锚点", style="cyan bold")
    table.add_column("指数")
    table.add_column("间隔", justify="right")
    table.add_column("可消去")
    table.add_column("障碍项", style="dim")
    for anchor in ("zero", "infinity"):
        entry = report[anchor]
        exps = entry["exponents"]
        exps_text = ", ".join(str(e) for e in exps) if exps else "[yellow]非半整数[/yellow]"
        gap = "—" if entry["gap"] is None else str(entry["gap"])
        obstruction = "—" if entry["obstruction"] is None else str(entry["obstruction"])
        label = "x = 0" if anchor == "zero" else "x = ∞"
        table.add_row(label, exps_text, gap, _status(entry["apparent"]), obstruction)
    name = report["equation"]["name"]
    title = f"[bold blue]📐 特征指数：{name}[/bold blue]"
    return Panel(table, title=title, border_style="blue", box=box.ROUNDED)


def format_series(data: dict[str, Any], max_rows: int = 30) -> Panel:
    table = Table(box=box.SIMPLE, border_style="cyan", padding=(0, 2))
    table.add_column("n", style="cyan", justify="right")
    table.add_column("系数")
    coeffs = data["coeffs"]
    for n, c in enumerate(coeffs[:max_rows]):
        table.add_row(str(n), str(c))
    if len(coeffs) > max_rows:
        table.add_row("…", f"[dim]共 {len(coeffs)} 项[/dim]")

    if data["kind"] == "pochhammer":
        basis = "(x/d;q)_n" if data["orientation"] == "ascending" else "(d/x;q)_n"
        title = f"{data['label']}  x^{data['prefactor_exponent']} Σ a_n {basis}, d = {data['node']}"
    else:
        variable = "x^n" if data["anchor"] == "zero" else "x^-n"
        title = f"Frobenius@{data['anchor']}  x^ρ Σ c_n {variable}, ρ = {data['exponent']}"
    return Panel(
        table, title=f"[bold blue]📜 {title}[/bold blue]", border_style="blue", box=box.ROUNDED
    )


def format_limits(reports: list[LimitReport], summary: dict[str, Any]) -> Panel:
    table = Table(box=box.SIMPLE, border_style="cyan", padding=(0, 1))
    table.add_column("检验", style="cyan")
    table.add_column("参数")
    table.add_column("末项差距", justify="right")
    table.add_column("拟合斜率", justify="right")
    table.add_column("精确", justify="center")
    table.add_column("状态")
    for r in reports:
        last = f"{r.gaps[-1]:.3e}" if r.gaps else "—"
        slope = "—" if r.slope is None else f"{r.slope:.3f}"
        exact = "—" if r.exact_match is None else ("✓" if r.exact_match else "✗")
        table.add_row(r.label, r.parameter, last, slope, exact, _status(r.passed))
    lines = []
    if "t3_operator_exact" in summary:
        lines.append(f"t3->inf 算子首项 = 二次变体: {_status(summary['t3_operator_exact'])}")
    if "t2_operator" in summary:
        op = summary["t2_operator"]
        lines.append(
            f"t2->0 算子 = 书面形式: {_status(op['matches_printed'])}"
            f"  q 超几何: {_status(op['matches_qhyp'])}"
        )
        if op.get("note"):
            lines.append(f"[yellow]{op['note']}[/yellow]")
    return Panel(
        _stack(table, Text.from_markup("\n".join(lines))) if lines else table,
        title="[bold blue]📉 退化阶梯[/bold blue]",
        border_style="green" if summary.get("passed") else "red",
        box=box.ROUNDED,
    )


def format_appell(report: dict[str, Any]) -> Panel:
    table = Table(box=box.SIMPLE, border_style="cyan", padding=(0, 2))
    table.add_column("关系", style="cyan bold")
    table.add_column("内部槽位", justify="right")
    table.add_column("内部最大残差")
    table.add_column("边界非零", justify="right")
    table.add_column("状态")
    for name, r in report["residuals"].items():
        table.add_row(
            name,
            str(r["interior_slots"]),
            str(r["max_interior"]),
            str(r["boundary_slots"]),
            _status(r["passed"]),
        )
    header = Text()
    header.append("Φ(1) 部分和 = ", style="dim")
    header.append(str(report["value"]), style="bold yellow")
    header.append(f"  (m+n <= {report['M']})", style="dim")
    return Panel(_stack(header, table), title="[bold blue]🧮 q-Appell Φ(1)[/bold blue]",
                 border_style="blue", box=box.ROUNDED)


def format_error(error: Exception) -> Panel:
    """QVariantError 的红色面板"""
    return Panel(
        Text(str(error), style="white"),
        title=f"[bold red]✗ {type(error).__name__}[/bold red]",
        border_style="red",
        box=box.ROUNDED,
    )
