"""
Tests for the verification ledger and its report formats.
"""

import json

import pytest

from qvariant.ledger import DrawRecord, VerificationLedger


@pytest.fixture
def ledger():
    book = VerificationLedger("thm2", {"mode": "exact", "N": 4}, note="evidence only")
    # 乱序加入，报告里按下标排序
    book.add(
        DrawRecord(2, {"h1": "1"}, False, error="分母为零", error_type="VanishingDenominatorError")
    )
    book.add(DrawRecord(0, {"h1": "1/2"}, True, {"orders_checked": 3, "max_residual": "0"}))
    book.add(DrawRecord(1, {"h1": "-1"}, True, {"orders_checked": 3, "support": [4, 5]}))
    return book


class TestVerificationLedger:
    """Tests for VerificationLedger."""

    def test_counts(self, ledger):
        assert ledger.passed_count == 2
        assert ledger.failed_count == 1
        assert not ledger.all_passed
        assert [r.index for r in ledger.failures()] == [2]

    def test_empty_ledger_is_not_a_pass(self):
        assert not VerificationLedger("thm1").all_passed

    def test_report(self, ledger):
        report = ledger.to_report()
        assert report["schema"] == "qvariant.report/1"
        assert report["target"] == "thm2"
        assert report["note"] == "evidence only"
        assert report["summary"] == {"draws": 3, "passed": 2, "failed": 1, "ok": False}
        assert [r["index"] for r in report["records"]] == [0, 1, 2]
        assert report["records"][2]["error_type"] == "VanishingDenominatorError"

    def test_json_is_deterministic(self, ledger):
        text = ledger.to_json()
        assert text == ledger.to_json()
        assert json.loads(text)["summary"]["failed"] == 1

    def test_frame(self, ledger):
        frame = ledger.to_frame()
        assert list(frame["index"]) == [0, 1, 2]
        assert list(frame["passed"]) == [True, True, False]
        # 列表类型的 metrics 以 JSON 字符串保存
        assert frame.loc[1, "support"] == "[4, 5]"

    def test_write_json(self, ledger, tmp_path):
        path = tmp_path / "out" / "report.json"
        ledger.write_json(path)
        assert json.loads(path.read_text(encoding="utf-8")) == ledger.to_report()

    def test_write_jsonl(self, ledger, tmp_path):
        path = tmp_path / "report.jsonl"
        ledger.write_jsonl(path)
        lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert [line["type"] for line in lines] == ["init", "draw", "draw", "draw", "summary"]
        assert lines[0]["target"] == "thm2"
        assert lines[0]["config"] == {"mode": "exact", "N": 4}
        assert [line["index"] for line in lines[1:4]] == [0, 1, 2]
        assert lines[-1]["ok"] is False


class TestDrawRecord:
    def test_to_dict(self):
        record = DrawRecord(0, {"t1": "1"}, True)
        assert record.to_dict() == {
            "index": 0,
            "params": {"t1": "1"},
            "passed": True,
            "metrics": {},
            "error": None,
            "error_type": None,
        }
