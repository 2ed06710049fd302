import csv
import io
import subprocess
import sys

import pytest

from gle_memlab.cli import CSV_HEADER, _parse_blocks, main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestBlockParsing:
    def test_power_range(self):
        assert _parse_blocks("2^4..2^6") == (16, 32, 64)

    def test_comma_list(self):
        assert _parse_blocks("4,8,32") == (4, 8, 32)

    def test_rejects_descending(self):
        from gle_memlab.cli import ConfigError

        with pytest.raises(ConfigError):
            _parse_blocks("32,8")


class TestBlocksizeStudy:
    def test_rows_respect_bound_and_footer_has_fit(self, capsys):
        code, out = _run(
            capsys, "blocksize-study", "--blocks", "2^4..2^7", "--quad-nodes", "512"
        )
        assert code == 0
        rows = _rows(out)
        assert rows[0] == CSV_HEADER.split(",")
        data = [r for r in rows[1:] if r[0] == "blocksize-study"]
        assert len(data) == 4
        for r in data:
            assert 0.0 <= float(r[2]) <= float(r[3])
        footer = [r for r in rows[1:] if r[0] == "blocksize-study:fit-exponent"]
        assert len(footer) == 1
        assert -1.2 <= float(footer[0][2]) <= -0.8

    def test_output_is_deterministic(self, capsys):
        args = ("blocksize-study", "--blocks", "16,32", "--quad-nodes", "256")
        _, first = _run(capsys, *args)
        _, second = _run(capsys, *args)
        assert first == second

    def test_dense_rows_appear_when_atoms_given(self, capsys):
        code, out = _run(
            capsys,
            "blocksize-study",
            "--blocks",
            "4,8",
            "--atoms",
            "512",
            "--quad-nodes",
            "512",
        )
        assert code == 0
        methods = {r[4] for r in _rows(out)[1:] if r[0] == "blocksize-study"}
        assert methods == {"spectral", "dense"}
        by_m = {}
        for r in _rows(out)[1:]:
            if r[0] == "blocksize-study":
                by_m.setdefault(r[1], {})[r[4]] = float(r[2])
        for vals in by_m.values():
            assert vals["spectral"] == pytest.approx(vals["dense"], abs=1e-8)


class TestSpatialDecay:
    def test_origin_row_matches_blocksize_value(self, capsys):
        _, sp = _run(
            capsys, "spatial-decay", "-M", "16", "--jmax", "8", "--quad-nodes", "512"
        )
        _, bs = _run(
            capsys, "blocksize-study", "--blocks", "16", "--quad-nodes", "512"
        )
        origin = next(
            float(r[2]) for r in _rows(sp)[1:] if r[0] == "spatial-decay" and r[1] == "0"
        )
        diag = next(
            float(r[2]) for r in _rows(bs)[1:] if r[0] == "blocksize-study"
        )
        assert origin == pytest.approx(diag, rel=1e-12)

    def test_footer_reports_negative_rate(self, capsys):
        code, out = _run(
            capsys, "spatial-decay", "-M", "16", "--jmax", "10", "--quad-nodes", "512"
        )
        assert code == 0
        rate = next(
            float(r[2]) for r in _rows(out)[1:] if r[0] == "spatial-decay:loglinear-rate"
        )
        assert rate < 0.0

    def test_small_jmax_rejected(self, capsys):
        code, _ = _run(capsys, "spatial-decay", "--jmax", "3")
        assert code == 2


class TestTimeDecay:
    def test_report_and_footers(self, capsys, tmp_path):
        out_path = tmp_path / "td.csv"
        code = main(
            [
                "time-decay",
                "-M",
                "16",
                "--tmax",
                "40",
                "--tsteps",
                "401",
                "--quad-nodes",
                "256",
                "--out",
                str(out_path),
                "--gnuplot",
            ]
        )
        assert code == 0
        rows = _rows(out_path.read_text())
        assert rows[0] == CSV_HEADER.split(",")
        ids = {r[0] for r in rows[1:]}
        assert "time-decay" in ids
        assert "time-decay:envelope-exponent" in ids
        assert any(i.startswith("time-decay:sp-prefactor-branch-") for i in ids)
        script = (tmp_path / "td.csv.gp").read_text()
        assert str(out_path) in script

    def test_gnuplot_needs_file_output(self, capsys):
        code, _ = _run(capsys, "time-decay", "--gnuplot")
        assert code == 2


class TestConfigHandling:
    def test_config_file_with_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment line\nkappa1 = 1.0\nkappa2 = 0\nblocks = 4,8\nquad_nodes = 256\n"
        )
        _, out = _run(capsys, "blocksize-study", "--config", str(cfg))
        base_rows = [r for r in _rows(out)[1:] if r[0] == "blocksize-study"]
        assert [r[1] for r in base_rows] == ["4", "8"]
        # the flag wins over the file
        _, out = _run(
            capsys, "blocksize-study", "--config", str(cfg), "--blocks", "16"
        )
        over_rows = [r for r in _rows(out)[1:] if r[0] == "blocksize-study"]
        assert [r[1] for r in over_rows] == ["16"]

    def test_unknown_config_key_is_error(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("kapa1 = 1.0\n")
        code, _ = _run(capsys, "blocksize-study", "--config", str(cfg))
        assert code == 2

    def test_unstable_constants_exit_code(self, capsys):
        code, _ = _run(capsys, "blocksize-study", "--kappa1", "-2")
        assert code == 2

    def test_bad_thread_cap_exit_code(self, capsys, monkeypatch):
        monkeypatch.setenv("GLE_MEMLAB_THREADS", "many")
        code, _ = _run(capsys, "validate", "--fast")
        assert code == 2

    def test_thread_cap_honored(self, capsys, monkeypatch):
        monkeypatch.setenv("GLE_MEMLAB_THREADS", "1")
        code, _ = _run(
            capsys, "blocksize-study", "--blocks", "16", "--quad-nodes", "256"
        )
        assert code == 0


class TestValidate:
    def test_fast_suite_passes(self, capsys):
        code, out = _run(capsys, "validate", "--fast")
        assert code == 0
        assert "all suites passed" in out
        assert "FAIL" not in out


class TestConsoleScript:
    def test_entry_point_runs(self):
        proc = subprocess.run(
            [sys.executable, "-m", "gle_memlab.cli", "blocksize-study", "--blocks",
             "16", "--quad-nodes", "128"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith(CSV_HEADER)
