import io
import json

import pytest

from kgdom.config import SolverConfig
from kgdom.construct import best_bound
from kgdom.errors import KnodelError
from kgdom.records import SCAN_SCHEMA, TABLE_COLUMNS, read_jsonl
from kgdom.scan import (
    ScanOptions, ScanRecord, Verdict, merge_records, read_records, scan_range, summarize,
    write_jsonl, write_table,
)
from kgdom.verify import BoundReport, BoundSource, UpperBound
from testcase.base_test import BaseTest

NO_ORACLE = ScanOptions(oracle_max=0)


def fake_record(n, gamma, lower, upper, slack=None):
    bounds = BoundReport(n, 5, lower, None, lower, (UpperBound(upper, BoundSource.HALF),), gamma_exact=gamma)
    return ScanRecord(n=n, degree=5, factorization="2", thm1_witnesses=[], thm2_witnesses=[],
                      bounds=bounds, gamma=gamma, conj3_slack=slack)


class TestScanRange(BaseTest):

    def test_record_count(self):
        records = list(scan_range(6, 64, NO_ORACLE))
        assert len(records) == 30
        assert [r.n for r in records] == list(range(6, 65, 2))
        assert all(r.error is None for r in records)

    def test_n20_record(self):
        records = list(scan_range(18, 22, ScanOptions(oracle_max=40)))
        rec = {r.n: r for r in records}[20]
        assert rec.thm1_witnesses == [5]
        assert rec.gamma == 4
        assert rec.gamma_status == "solved"
        assert rec.conj3_slack == 0
        assert rec.conj1 is Verdict.SUPPORTED
        assert rec.conj2 is Verdict.NOT_APPLICABLE
        assert rec.sandwich_ok

    def test_powers_of_two_have_no_witness(self):
        records = {r.n: r for r in scan_range(6, 64, NO_ORACLE)}
        for n in (8, 16, 32, 64):
            assert records[n].thm1_witnesses == []
            assert records[n].thm2_witnesses == []
            assert records[n].witness_label() == "-"

    def test_oracle_skipped_above_ceiling(self):
        records = list(scan_range(20, 24, ScanOptions(oracle_max=22, conjectures=False)))
        assert [r.gamma_status for r in records] == ["solved", "solved", "skipped"]
        assert records[2].gamma is None
        assert records[2].conj1 is Verdict.NOT_APPLICABLE

    def test_errors_are_recorded_inline(self):
        options = ScanOptions(oracle_max=10, config=SolverConfig(dense_max_n=0))
        records = list(scan_range(6, 12, options))
        assert len(records) == 4
        assert all(r.error for r in records if r.n <= 10)
        assert records[-1].error is None

    def test_deterministic(self):
        first = [r.table_row() for r in scan_range(6, 30, ScanOptions(oracle_max=30))]
        second = [r.table_row() for r in scan_range(6, 30, ScanOptions(oracle_max=30))]
        assert first == second

    def test_parallel_matches_serial(self):
        serial = [r.table_row() for r in scan_range(6, 40, ScanOptions(oracle_max=24))]
        parallel = [r.table_row() for r in scan_range(6, 40, ScanOptions(oracle_max=24, workers=2))]
        assert parallel == serial

    def test_bad_range(self):
        with pytest.raises(KnodelError):
            list(scan_range(4, 10))
        with pytest.raises(KnodelError):
            list(scan_range(20, 10))


class TestSummary(BaseTest):

    def test_small_range(self):
        records = list(scan_range(6, 40, ScanOptions(oracle_max=40)))
        summary = summarize(records)
        self.logger.info(f"summary: {summary.rows()}")
        assert summary.total == 18
        for r in records:
            for o in r.conj1_detail + r.conj2_detail:
                if o.verdict is Verdict.REFUTED:
                    assert o.evidence == "oracle" and r.gamma > o.target, f"n={r.n}"
                if o.evidence == "oracle":
                    assert (o.verdict is Verdict.SUPPORTED) == (r.gamma <= o.target), f"n={r.n}"
        refuted = {r.n for r in records if r.conj1 is Verdict.REFUTED}
        assert {22, 24, 26} <= refuted
        assert summary.sandwich_breaches == ()
        assert summary.solved == 18
        assert summary.max_slack is not None and summary.max_slack >= 0
        assert {r.n: r.conj3_slack for r in records}[20] == 0

    @pytest.mark.stress
    def test_full_oracle_to_128(self):
        records = list(scan_range(6, 128, ScanOptions(oracle_max=128, workers=self.config.effective_workers())))
        summary = summarize(records)
        for key, value in summary.rows():
            self.logger.info(f"{key}: {value}")
        assert summary.total == 62
        assert summary.errors == 0
        assert summary.inconclusive == 0, f"inconclusive n: {[r.n for r in records if r.gamma is None]}"
        assert summary.solved == 62
        assert summary.sandwich_breaches == ()
        for r in records:
            for o in r.conj1_detail + r.conj2_detail:
                if o.verdict is Verdict.REFUTED:
                    assert o.evidence == "oracle", f"n={r.n}"
                    assert r.gamma > o.target, f"n={r.n}"

    def test_witness_fraction(self):
        summary = summarize(scan_range(8, 8, NO_ORACLE))
        assert summary.witness_fraction == 0.0
        summary = summarize(scan_range(20, 20, NO_ORACLE))
        assert summary.witness_fraction == 1.0

    def test_reports_breaches_and_slack(self):
        records = [fake_record(64, 3, 10, 32), fake_record(66, 12, 10, 33, slack=7),
                   fake_record(68, 10, 10, 34, slack=0)]
        summary = summarize(records, slack_c=1.0)
        assert summary.sandwich_breaches == (64,)
        assert summary.slack_violations == (66,)
        assert summary.max_slack == 7
        assert summary.mean_slack == 3.5

    def test_empty_stream(self):
        with pytest.raises(KnodelError):
            summarize([])


class TestRecordIO(BaseTest):

    def test_jsonl_round_trip(self):
        records = list(scan_range(18, 24, ScanOptions(oracle_max=24)))
        buf = io.StringIO()
        assert write_jsonl(records, buf, NO_ORACLE) == len(records)
        first = json.loads(buf.getvalue().splitlines()[0])
        assert first["schema"] == SCAN_SCHEMA
        assert first["kind"] == "header"
        buf.seek(0)
        loaded = read_records(buf)
        assert [r.table_row() for r in loaded] == [r.table_row() for r in records]
        assert loaded[1].bounds == records[1].bounds

    def test_bound_report_round_trip(self):
        for n in (12, 20, 48, 72, 1152):
            report = best_bound(n).with_gamma(None)
            assert BoundReport.from_record(report.to_record()) == report, f"n={n}"

    def test_read_without_expected_schema(self):
        schema, recs = read_jsonl(io.StringIO('{"kind": "header", "schema": "other/1"}\n{"n": 6}\n'))
        assert schema == "other/1"
        assert recs == [{"n": 6}]

    def test_rejects_foreign_schema(self):
        buf = io.StringIO('{"kind": "header", "schema": "other/1"}\n')
        with pytest.raises(KnodelError):
            read_records(buf)

    def test_table(self):
        buf = io.StringIO()
        write_table(scan_range(20, 22, ScanOptions(oracle_max=22)), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "# schema: kgdom-table/1"
        assert tuple(lines[1].split("\t")) == TABLE_COLUMNS
        row = dict(zip(TABLE_COLUMNS, lines[2].split("\t")))
        assert row["n"] == "20"
        assert row["witness"] == "thm1:p=5"
        assert row["ub_best"] == "4"
        assert row["ub_src"] == "thm1(p=5)"
        assert row["gamma"] == "4"
        assert row["slack"] == "0"

    def test_merge_prefers_conclusive(self):
        old = list(scan_range(18, 22, ScanOptions(oracle_max=0, conjectures=False)))
        new = list(scan_range(20, 24, ScanOptions(oracle_max=24, conjectures=False)))
        merged = merge_records(old, new)
        assert [r.n for r in merged] == [18, 20, 22, 24]
        assert merged[0].gamma is None
        assert all(r.gamma is not None for r in merged[1:])
        # a less conclusive re-run does not replace a solved record
        again = merge_records(merged, old)
        assert again[1].gamma == 4
