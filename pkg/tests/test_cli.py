import subprocess
import sys

import pytest

from qkdr.cli import main
from qkdr.ldpc import load_alist
from qkdr.polar import PolarCodeSpec


def _run(argv):
    return main(argv)


class TestConstruct:
    def test_polar_spec_file(self, tmp_path):
        out = tmp_path / "polar.txt"
        rc = _run(["construct", "polar", "--n", "8", "--rate", "0.7",
                   "--crc", "24", "--design-q", "0.03",
                   "--construction", "bhattacharyya", "-o", str(out)])
        assert rc == 0
        spec = PolarCodeSpec.from_text(out.read_text())
        assert spec.N == 256
        assert spec.K == round(0.7 * 256)
        assert spec.c == 24

    def test_ldpc_alist_file(self, tmp_path):
        out = tmp_path / "code.alist"
        rc = _run(["construct", "ldpc", "--n", "512", "--rate", "0.7",
                   "--degrees", "default-r07", "-o", str(out)])
        assert rc == 0
        code = load_alist(out.read_text())
        assert (code.N, code.M) == (512, round(0.3 * 512))

    def test_invalid_rate_exits_nonzero(self, tmp_path, capsys):
        rc = _run(["construct", "ldpc", "--n", "64", "--rate", "1.2",
                   "-o", str(tmp_path / "x.alist")])
        assert rc == 2
        assert "rate" in capsys.readouterr().err


class TestRunConfig:
    def test_sweep_from_config(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        out = tmp_path / "sweep.csv"
        cfg.write_text(
            "experiment=sweep\nprotocol=blind-ldpc\nframe=512\nrate=0.7\n"
            "alpha=0.1\ndelta=10\nq_grid=0.0,0.02\nblocks=4\nseed=7\n"
            f"output={out}\n")
        assert _run(["run", str(cfg)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "q,mean_f,mean_rounds,fer,blocks,frame_errors"
        assert len(lines) == 3

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        out_cfg = tmp_path / "a.csv"
        out_flag = tmp_path / "b.csv"
        cfg.write_text(
            "experiment=sweep\nprotocol=blind-ldpc\nframe=512\nrate=0.7\n"
            "alpha=0.1\ndelta=10\nq_grid=0.02\nblocks=3\nseed=7\n"
            f"output={out_cfg}\n")
        assert _run(["run", str(cfg), "-o", str(out_flag)]) == 0
        assert out_flag.exists() and not out_cfg.exists()

    def test_seed_repeatability_byte_identical(self, tmp_path):
        outs = []
        for name in ("r1.csv", "r2.csv"):
            out = tmp_path / name
            rc = _run(["sweep", "--protocol", "blind-ldpc", "--frame", "512",
                       "--rate", "0.7", "--alpha", "0.1", "--delta", "10",
                       "--q-grid", "0.02,0.03", "--blocks", "4",
                       "--seed", "7", "-o", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_missing_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("experiment=sweep\nprotocol=blind-ldpc\nseed=1\n"
                       "output=x.csv\n")
        assert _run(["run", str(cfg)]) == 2

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("experiment=sweep\nwibble=1\n")
        assert _run(["run", str(cfg)]) == 2

    def test_missing_trace_file(self, tmp_path):
        rc = _run(["tradeoff", "--protocol", "blind-ldpc", "--frame", "512",
                   "--rate", "0.7", "--alpha", "0.1", "--deltas", "10",
                   "--trace", str(tmp_path / "nope.txt"), "--seed", "1",
                   "--blocks", "2", "-o", str(tmp_path / "t.csv")])
        assert rc == 2

    def test_unwritable_output_is_io_error(self, tmp_path):
        rc = _run(["sweep", "--protocol", "blind-ldpc", "--frame", "512",
                   "--rate", "0.7", "--alpha", "0.1", "--delta", "10",
                   "--q-grid", "0.02", "--blocks", "2", "--seed", "1",
                   "-o", str(tmp_path / "no" / "such" / "dir.csv")])
        assert rc == 3

    def test_env_seed(self, tmp_path, monkeypatch):
        out = tmp_path / "env.csv"
        monkeypatch.setenv("QKDR_SEED", "12345")
        rc = _run(["sweep", "--protocol", "blind-ldpc", "--frame", "512",
                   "--rate", "0.7", "--alpha", "0.1", "--delta", "10",
                   "--q-grid", "0.02", "--blocks", "2", "-o", str(out)])
        assert rc == 0

    def test_auto_seed_logged(self, tmp_path, monkeypatch, capsys):
        monkeypatch.delenv("QKDR_SEED", raising=False)
        out = tmp_path / "auto.csv"
        rc = _run(["sweep", "--protocol", "blind-ldpc", "--frame", "512",
                   "--rate", "0.7", "--alpha", "0.1", "--delta", "10",
                   "--q-grid", "0.02", "--blocks", "2", "-o", str(out)])
        assert rc == 0
        assert "auto-seed:" in capsys.readouterr().err


class TestHelp:
    @pytest.mark.parametrize("sub", ["construct", "run", "sweep", "cdf",
                                     "tradeoff", "noninteractive"])
    def test_subcommand_help(self, sub):
        proc = subprocess.run(
            [sys.executable, "-m", "qkdr.cli", sub, "--help"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "usage" in proc.stdout.lower()
