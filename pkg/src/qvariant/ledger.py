"""
Verification ledger: per-draw records and the versioned JSON report.

报告是确定性的: 记录按抽样下标排序，键排序输出，不含时间戳。
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from qvariant.analysis.constants import REPORT_SCHEMA


@dataclass
class DrawRecord:
    """Record of a single parameter draw"""

    index: int
    params: dict[str, Any]
    passed: bool
    metrics: dict[str, Any] = field(default_factory=dict)
    error: str | None = None
    error_type: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "params": self.params,
            "passed": self.passed,
            "metrics": self.metrics,
            "error": self.error,
            "error_type": self.error_type,
        }


@dataclass
class VerificationLedger:
    """
    一次 verify 运行的全部记录。

    - 每个抽样一条 DrawRecord，失败时附带参数快照以便复现
    - note 用于标注性质，例如猜想检验只是证据而不是证明
    """

    target: str
    config: dict[str, Any] = field(default_factory=dict)
    records: list[DrawRecord] = field(default_factory=list)
    note: str = ""

    def add(self, record: DrawRecord) -> None:
        self.records.append(record)

    @property
    def passed_count(self) -> int:
        return sum(1 for r in self.records if r.passed)

    @property
    def failed_count(self) -> int:
        return len(self.records) - self.passed_count

    @property
    def all_passed(self) -> bool:
        return bool(self.records) and self.failed_count == 0

    def failures(self) -> list[DrawRecord]:
        return [r for r in self.records if not r.passed]

    def to_report(self) -> dict[str, Any]:
        records = sorted(self.records, key=lambda r: r.index)
        return {
            "schema": REPORT_SCHEMA,
            "target": self.target,
            "note": self.note,
            "config": self.config,
            "summary": {
                "draws": len(records),
                "passed": self.passed_count,
                "failed": self.failed_count,
                "ok": self.all_passed,
            },
            "records": [r.to_dict() for r in records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_report(), sort_keys=True, indent=2, ensure_ascii=False)

    def to_frame(self) -> pd.DataFrame:
        """每个抽样一行，metrics 展开为列"""
        rows = []
        for r in sorted(self.records, key=lambda r: r.index):
            row = {"index": r.index, "passed": r.passed, "error": r.error}
            for key, value in r.metrics.items():
                if value is None or isinstance(value, (int, float, str, bool)):
                    row[key] = value
                else:
                    row[key] = json.dumps(value, sort_keys=True, ensure_ascii=False)
            rows.append(row)
        return pd.DataFrame(rows)

    def write_json(self, file_path: str | Path) -> None:
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")

    def write_jsonl(self, file_path: str | Path) -> None:
        """
        逐行写出: 第一行为 init (目标与配置)，随后每个抽样一行，最后一行为 summary。
        """
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        report = self.to_report()
        def line(entry: dict[str, Any]) -> str:
            return json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n"

        with path.open("w", encoding="utf-8") as f:
            init_entry = {"schema": REPORT_SCHEMA, "target": self.target, "config": self.config}
            f.write(line({"type": "init", **init_entry}))
            for entry in report["records"]:
                f.write(line({"type": "draw", **entry}))
            f.write(line({"type": "summary", **report["summary"]}))
