import json
import subprocess
import sys

import pytest

from swldpc import (
    CorrelationModel,
    DecoderConfig,
    SimConfig,
    format_csv,
    gallager_construct,
    identity_matrix,
    load_alist,
    run_trials,
    sample_pair,
    save_alist,
    syndrome,
)
from swldpc.cli import main
from swldpc.ldpc import SparseParityMatrix

BOUNDS_LINE = (
    "admissible=true r1_slack=0.5310044064107189 "
    "r2_slack=0.031004406410718888 sum_slack=0.031004406410718888\n"
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParsing:
    def test_no_subcommand_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 1
        assert "error" in err

    def test_unknown_subcommand(self, capsys):
        assert run_cli(capsys, "transmogrify")[0] == 1

    def test_unknown_flag(self, capsys):
        assert run_cli(capsys, "bounds", "--p", "0.9", "--r1", "1", "--r2", "1", "--x")[0] == 1

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "swldpc", "bounds", "--p", "0.9", "--r1", "1.0", "--r2", "0.5"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == BOUNDS_LINE


class TestBounds:
    def test_admissible_point(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--p", "0.9", "--r1", "1.0", "--r2", "0.5")
        assert code == 0
        assert out == BOUNDS_LINE

    def test_inadmissible_point(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--p", "0.9", "--r1", "0.73", "--r2", "0.73")
        assert code == 0
        assert out.startswith("admissible=false ")
        assert "sum_slack=-0.008995593589281148" in out

    def test_invalid_p(self, capsys):
        assert run_cli(capsys, "bounds", "--p", "1.0", "--r1", "1", "--r2", "1")[0] == 1

    def test_negative_rate(self, capsys):
        assert run_cli(capsys, "bounds", "--p", "0.9", "--r1", "-1", "--r2", "1")[0] == 1


class TestMakecode:
    def test_writes_valid_deterministic_alist(self, capsys, tmp_path):
        out_file = tmp_path / "code.alist"
        code, out, err = run_cli(
            capsys, "makecode", "--n", "24", "--dv", "3", "--dc", "6",
            "--seed", "5", "--out", str(out_file),
        )
        assert code == 0
        assert out_file.read_text() == out
        assert "gf2_rank=" in err
        h = load_alist(out)
        assert h.n == 24 and h.m == 12
        assert h == gallager_construct(24, 3, 6, seed=5)

        code2, out2, _ = run_cli(
            capsys, "makecode", "--n", "24", "--dv", "3", "--dc", "6", "--seed", "5"
        )
        assert code2 == 0 and out2 == out

    def test_bad_degree_combination(self, capsys):
        code, _, err = run_cli(capsys, "makecode", "--n", "13", "--dv", "3", "--dc", "6", "--seed", "1")
        assert code == 1
        assert "divisible" in err

    def test_seed_required(self, capsys):
        assert run_cli(capsys, "makecode", "--n", "24", "--dv", "3", "--dc", "6")[0] == 1


class TestEncode:
    H = SparseParityMatrix.from_rows(3, ((0, 1), (1, 2)))

    def _write_code(self, tmp_path):
        path = tmp_path / "h.alist"
        path.write_text(save_alist(self.H))
        return str(path)

    def test_worked_example(self, capsys, tmp_path):
        code_path = self._write_code(tmp_path)
        bits = tmp_path / "bits.txt"
        bits.write_text("101\n011\n")
        code, out, _ = run_cli(capsys, "encode", str(bits), "--code1", code_path)
        assert code == 0
        assert out == "11\n10\n"

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        code_path = self._write_code(tmp_path)
        bits = tmp_path / "bits.txt"
        bits.write_text("111\n")
        target = tmp_path / "syn.txt"
        code, out, _ = run_cli(capsys, "encode", str(bits), "--code1", code_path, "--out", str(target))
        assert code == 0
        assert target.read_text() == out == "00\n"

    def test_wrong_block_length(self, capsys, tmp_path):
        code_path = self._write_code(tmp_path)
        bits = tmp_path / "bits.txt"
        bits.write_text("101\n01\n")
        code, _, err = run_cli(capsys, "encode", str(bits), "--code1", code_path)
        assert code == 2
        assert "line 2" in err and "bits.txt" in err

    def test_non_bit_character(self, capsys, tmp_path):
        code_path = self._write_code(tmp_path)
        bits = tmp_path / "bits.txt"
        bits.write_text("1x1\n")
        assert run_cli(capsys, "encode", str(bits), "--code1", code_path)[0] == 2

    def test_missing_files(self, capsys, tmp_path):
        code_path = self._write_code(tmp_path)
        assert run_cli(capsys, "encode", str(tmp_path / "nope"), "--code1", code_path)[0] == 2
        bits = tmp_path / "bits.txt"
        bits.write_text("101\n")
        assert run_cli(capsys, "encode", str(bits), "--code1", str(tmp_path / "nope"))[0] == 2

    def test_malformed_alist_names_file_and_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.alist"
        bad.write_text(save_alist(self.H).replace("2 3", "2 9"))
        bits = tmp_path / "bits.txt"
        bits.write_text("101\n")
        code, _, err = run_cli(capsys, "encode", str(bits), "--code1", str(bad))
        assert code == 2
        assert "bad.alist" in err and "line 9" in err

    def test_code_flag_required(self, capsys, tmp_path):
        bits = tmp_path / "bits.txt"
        bits.write_text("101\n")
        assert run_cli(capsys, "encode", str(bits))[0] == 1


@pytest.fixture
def coding_setup(tmp_path):
    """Identity H1 and a (3,6) H2 at n=16 plus three encoded frames."""
    n = 16
    h1 = identity_matrix(n)
    h2 = gallager_construct(n, 3, 6, seed=5)
    model = CorrelationModel(0.93)
    paths = {
        "c1": tmp_path / "c1.alist",
        "c2": tmp_path / "c2.alist",
        "u1": tmp_path / "u1.txt",
        "u2": tmp_path / "u2.txt",
        "s1": tmp_path / "s1.txt",
        "s2": tmp_path / "s2.txt",
    }
    paths["c1"].write_text(save_alist(h1))
    paths["c2"].write_text(save_alist(h2))
    frames = [sample_pair(model, n, seed=100 + t) for t in range(3)]
    to_line = lambda bits: "".join(str(int(b)) for b in bits)
    paths["u1"].write_text("".join(to_line(f.u1) + "\n" for f in frames))
    paths["u2"].write_text("".join(to_line(f.u2) + "\n" for f in frames))
    paths["s1"].write_text("".join(to_line(syndrome(h1, f.u1)) + "\n" for f in frames))
    paths["s2"].write_text("".join(to_line(syndrome(h2, f.u2)) + "\n" for f in frames))
    return paths, frames


class TestDecode:
    def _argv(self, paths, *extra):
        return [
            "decode",
            "--code1", str(paths["c1"]),
            "--code2", str(paths["c2"]),
            "--syn1", str(paths["s1"]),
            "--syn2", str(paths["s2"]),
            "--p", "0.93",
            *extra,
        ]

    def test_reconstructs_all_frames(self, capsys, coding_setup):
        paths, frames = coding_setup
        code, out, err = run_cli(capsys, *self._argv(paths))
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 6
        for t, frame in enumerate(frames):
            assert lines[2 * t] == "".join(str(int(b)) for b in frame.u1)
            assert lines[2 * t + 1] == "".join(str(int(b)) for b in frame.u2)

    def test_trace_goes_to_stderr(self, capsys, coding_setup):
        paths, _ = coding_setup
        code, out, err = run_cli(capsys, *self._argv(paths, "--trace"))
        assert code == 0
        assert "frame=0 iter=1 " in err
        assert "unsatisfied=" in err
        assert "frame=" not in out

    def test_exit_3_on_unconverged_frame(self, capsys, tmp_path):
        n = 64
        h1, h2 = identity_matrix(n), gallager_construct(n, 3, 6, seed=2)
        pair = sample_pair(CorrelationModel(0.8), n, seed=123)
        files = {}
        for name, content in (
            ("c1", save_alist(h1)),
            ("c2", save_alist(h2)),
            ("s1", "".join(str(int(b)) for b in syndrome(h1, pair.u1)) + "\n"),
            ("s2", "".join(str(int(b)) for b in syndrome(h2, pair.u2)) + "\n"),
        ):
            files[name] = tmp_path / name
            files[name].write_text(content)
        code, out, err = run_cli(
            capsys, "decode",
            "--code1", str(files["c1"]), "--code2", str(files["c2"]),
            "--syn1", str(files["s1"]), "--syn2", str(files["s2"]),
            "--p", "0.8", "--max-iters", "5",
        )
        assert code == 3
        assert "not converged" in err
        assert len(out.splitlines()) == 2  # best-effort output still written

    def test_frame_count_mismatch(self, capsys, coding_setup):
        paths, _ = coding_setup
        paths["s1"].write_text(paths["s1"].read_text().splitlines()[0] + "\n")
        assert run_cli(capsys, *self._argv(paths))[0] == 2

    def test_block_length_mismatch(self, capsys, coding_setup, tmp_path):
        paths, _ = coding_setup
        other = tmp_path / "other.alist"
        other.write_text(save_alist(identity_matrix(8)))
        paths["c1"] = other
        assert run_cli(capsys, *self._argv(paths))[0] == 2

    def test_out_file(self, capsys, coding_setup, tmp_path):
        paths, _ = coding_setup
        target = tmp_path / "decoded.txt"
        code, out, _ = run_cli(capsys, *self._argv(paths, "--out", str(target)))
        assert code == 0
        assert target.read_text() == out


class TestSimulate:
    FLAGS = ["simulate", "--p", "0.95", "--n", "64", "--dv", "3", "--dc", "6",
             "--trials", "6", "--seed", "3"]

    def test_matches_library_run(self, capsys):
        code, out, _ = run_cli(capsys, *self.FLAGS)
        assert code == 0
        config = SimConfig(
            model=CorrelationModel(0.95),
            h2=gallager_construct(64, 3, 6, seed=3),
            trials=6,
            master_seed=3,
            decoder=DecoderConfig(max_iterations=100, damping=0.0),
        )
        assert out == format_csv([run_trials(config)])

    def test_jobs_do_not_change_output(self, capsys):
        _, baseline, _ = run_cli(capsys, *self.FLAGS)
        code, out, _ = run_cli(capsys, *self.FLAGS, "--jobs", "3")
        assert code == 0
        assert out == baseline

    def test_sweep_emits_one_row_per_p(self, capsys):
        argv = ["simulate", "--sweep-p", "0.99,0.95", "--n", "64", "--dv", "3",
                "--dc", "6", "--trials", "4", "--seed", "3"]
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("p,n,r1,r2,trials,")
        assert len(lines) == 3
        assert lines[1].startswith("0.99,64,")
        assert lines[2].startswith("0.95,64,")

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "run.csv"
        code, out, _ = run_cli(capsys, *self.FLAGS, "--out", str(target))
        assert code == 0
        assert target.read_text() == out

    def test_usage_errors(self, capsys):
        assert run_cli(capsys, "simulate", "--p", "0.9", "--n", "64", "--dv", "3", "--dc", "6")[0] == 1
        assert run_cli(capsys, "simulate", "--seed", "1", "--n", "64", "--dv", "3", "--dc", "6")[0] == 1
        assert run_cli(capsys, "simulate", "--p", "0.9", "--sweep-p", "0.9", "--seed", "1",
                       "--n", "64", "--dv", "3", "--dc", "6")[0] == 1
        assert run_cli(capsys, "simulate", "--p", "0.9", "--seed", "1")[0] == 1
        assert run_cli(capsys, "simulate", "--p", "0.9", "--seed", "1", "--n", "64", "--dv", "3")[0] == 1
        assert run_cli(capsys, "simulate", "--p", "1.5", "--seed", "1", "--n", "64",
                       "--dv", "3", "--dc", "6")[0] == 1
        assert run_cli(capsys, "simulate", "--p", "0.9", "--seed", "1", "--n", "64",
                       "--dv", "3", "--dc", "6", "--trials", "0")[0] == 1

    def test_code_files(self, capsys, tmp_path):
        c2 = tmp_path / "c2.alist"
        c2.write_text(save_alist(gallager_construct(64, 3, 6, seed=3)))
        argv = ["simulate", "--p", "0.95", "--code2", str(c2), "--trials", "6", "--seed", "3"]
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        _, flags_out, _ = run_cli(capsys, *self.FLAGS)
        assert out == flags_out  # same code as inline construction with seed 3

    def test_symmetric_needs_both_code_files(self, capsys, tmp_path):
        c2 = tmp_path / "c2.alist"
        c2.write_text(save_alist(gallager_construct(64, 3, 6, seed=3)))
        argv = ["simulate", "--p", "0.99", "--code2", str(c2), "--trials", "2",
                "--seed", "3", "--mode", "symmetric"]
        assert run_cli(capsys, *argv)[0] == 1

    def test_symmetric_inline_construction(self, capsys):
        argv = ["simulate", "--p", "0.99", "--n", "48", "--dv", "3", "--dc", "6",
                "--trials", "2", "--seed", "3", "--mode", "symmetric"]
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        row = out.splitlines()[1].split(",")
        assert row[2] == "0.5" and row[3] == "0.5"  # r1 = r2 = m/n

    def test_config_file(self, capsys, tmp_path):
        config = {"p": 0.95, "n": 64, "dv": 3, "dc": 6, "trials": 6, "seed": 3}
        path = tmp_path / "sim.json"
        path.write_text(json.dumps(config))
        code, out, _ = run_cli(capsys, "simulate", str(path))
        assert code == 0
        _, flags_out, _ = run_cli(capsys, *self.FLAGS)
        assert out == flags_out

    def test_flags_override_config_file(self, capsys, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text(json.dumps({"p": 0.95, "n": 64, "dv": 3, "dc": 6, "trials": 6, "seed": 3}))
        code, out, _ = run_cli(capsys, "simulate", str(path), "--trials", "4")
        assert code == 0
        assert out.splitlines()[1].split(",")[4] == "4"

    def test_config_file_sweep_list(self, capsys, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text(json.dumps(
            {"sweep_p": [0.99, 0.95], "n": 64, "dv": 3, "dc": 6, "trials": 3, "seed": 3}
        ))
        code, out, _ = run_cli(capsys, "simulate", str(path))
        assert code == 0
        assert len(out.splitlines()) == 3

    def test_config_file_errors(self, capsys, tmp_path):
        bad_json = tmp_path / "bad.json"
        bad_json.write_text("{not json")
        assert run_cli(capsys, "simulate", str(bad_json))[0] == 2

        not_object = tmp_path / "arr.json"
        not_object.write_text("[1, 2]")
        assert run_cli(capsys, "simulate", str(not_object))[0] == 2

        unknown_key = tmp_path / "extra.json"
        unknown_key.write_text(json.dumps({"p": 0.9, "seed": 1, "n": 64, "dv": 3, "dc": 6, "foo": 1}))
        code, _, err = run_cli(capsys, "simulate", str(unknown_key))
        assert code == 2
        assert "foo" in err

        bad_type = tmp_path / "type.json"
        bad_type.write_text(json.dumps({"p": "high", "seed": 1, "n": 64, "dv": 3, "dc": 6}))
        assert run_cli(capsys, "simulate", str(bad_type))[0] == 2

        missing = tmp_path / "missing.json"
        assert run_cli(capsys, "simulate", str(missing))[0] == 2
