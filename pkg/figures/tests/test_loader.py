import numpy as np
import pytest

from nvfigs import ContractError, input_checksum, load_columns, load_snapshot

from conftest import write_csv


class TestLoadColumns:
    def test_reads_numeric_columns(self, trace_csv):
        data = load_columns(trace_csv, ["s", "k", "gamma"])
        assert data["k"].dtype == float
        assert data["k"].size == 40

    def test_string_column_preserved(self, scan_csv):
        data = load_columns(scan_csv, ["k", "method"])
        assert data["method"][0] == "bidirectional"

    def test_missing_column_named(self, trace_csv):
        with pytest.raises(ContractError, match="residuall"):
            load_columns(trace_csv, ["s", "residuall"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ContractError, match="does not exist"):
            load_columns(tmp_path / "nope.csv", ["a"])

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ContractError, match="empty"):
            load_columns(path, ["a"])

    def test_header_only(self, tmp_path):
        path = write_csv(tmp_path / "h.csv", ["a", "b"], [])
        with pytest.raises(ContractError, match="no data rows"):
            load_columns(path, ["a"])


class TestLoadSnapshot:
    def test_roundtrip(self, snapshot_file):
        path, u, (Wx, Wy, t) = snapshot_file
        samples, rWx, rWy, rt = load_snapshot(path)
        assert (rWx, rWy, rt) == (Wx, Wy, t)
        np.testing.assert_array_equal(samples, u)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.nvg"
        path.write_bytes(b"NOTGRID0" + b"\0" * 64)
        with pytest.raises(ContractError, match="magic"):
            load_snapshot(path)

    def test_truncated_payload(self, snapshot_file):
        path, _, _ = snapshot_file
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(ContractError, match="expected"):
            load_snapshot(path)


class TestChecksum:
    def test_stable_and_per_file(self, trace_csv, band_txt):
        one = input_checksum([trace_csv])
        two = input_checksum([trace_csv, band_txt])
        assert two.startswith(one + ",")
        assert input_checksum([trace_csv]) == one

    def test_changes_with_content(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text("a")
        before = input_checksum([p])
        p.write_text("b")
        assert input_checksum([p]) != before
