"""Tests for the command-line client (in-process dispatch)."""

import json

import numpy as np
import pytest

from symindex.cli import EXIT_DISAGREEMENT, EXIT_INPUT, EXIT_OK, main


def run_cli(capsys, argv, stdin_text=None, monkeypatch=None):
    if stdin_text is not None:
        import io
        import sys

        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rotation_doc(theta):
    return json.dumps(
        {
            "n": 1,
            "A": [[np.cos(theta)]],
            "B": [[-np.sin(theta)]],
            "C": [[np.sin(theta)]],
            "D": [[np.cos(theta)]],
        }
    )


class TestIndexCommand:
    def test_rotation_sequence(self, capsys, monkeypatch):
        code, out, _ = run_cli(
            capsys,
            ["index", "--k-max", "4"],
            stdin_text=rotation_doc(np.pi / 3),
            monkeypatch=monkeypatch,
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        doubled = [
            e["s"]["doubled"] if e["s"] else None for e in doc["results"]
        ]
        assert doubled == [1, 1, None, -1]
        assert doc["results"][2]["error"] == "IterateDegenerate"
        assert doc["v"] == 1

    def test_input_file(self, capsys, tmp_path):
        path = tmp_path / "blocks.json"
        path.write_text(rotation_doc(1.0))
        code, out, _ = run_cli(capsys, ["index", "--input", str(path)])
        assert code == EXIT_OK
        assert json.loads(out)["results"][0]["s"] == {"doubled": 1}

    def test_malformed_json(self, capsys, monkeypatch):
        code, _, err = run_cli(
            capsys, ["index"], stdin_text="{not json", monkeypatch=monkeypatch
        )
        assert code == EXIT_INPUT
        assert "line 1" in err

    def test_invalid_blocks(self, capsys, monkeypatch):
        bad = json.dumps({"n": 1, "A": [[2.0]], "B": [[1.0]], "C": [[1.0]], "D": [[2.0]]})
        code, _, err = run_cli(capsys, ["index"], stdin_text=bad, monkeypatch=monkeypatch)
        assert code == EXIT_INPUT
        assert "identities" in err

    def test_missing_field(self, capsys, monkeypatch):
        code, _, err = run_cli(
            capsys, ["index"], stdin_text='{"n": 1}', monkeypatch=monkeypatch
        )
        assert code == EXIT_INPUT


class TestChebCommand:
    def test_csv_table(self, capsys):
        code, out, _ = run_cli(capsys, ["cheb", "--k", "2", "--points", "3"])
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "k,x,T,U"
        # x = -1, 0, 1: T2 = 1, -1, 1
        values = [line.split(",") for line in lines[1:]]
        assert [float(v[2]) for v in values] == [1.0, -1.0, 1.0]
        assert [float(v[3]) for v in values] == [3.0, -1.0, 3.0]

    def test_bad_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["cheb"])  # --k is required
        assert exc.value.code == EXIT_INPUT


class TestVerifyCommand:
    def test_deterministic_bytes(self, capsys):
        argv = ["verify", "--n", "1", "--trials", "4", "--seed", "7", "--k-max", "2"]
        code1, out1, _ = run_cli(capsys, argv)
        code2, out2, _ = run_cli(capsys, argv)
        assert code1 == code2 == EXIT_OK
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["ok"] is True
        assert doc["agreements"] == doc["checked"] > 0
        assert {"seed": doc["seed"], "tol": doc["tol"]} == {"seed": 7, "tol": None}

    def test_formula_qform_only(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["verify", "--n", "2", "--trials", "5", "--seed", "1",
             "--k-max", "3", "--methods", "formula", "qform"],
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["methods"] == ["formula", "qform"]
        assert doc["ok"] is True

    def test_disagreement_exit_code(self, capsys, monkeypatch):
        # Force a disagreement by stubbing the batch runner.
        from symindex.verify import TrialOutcome, VerifyReport

        def fake_verification(**kwargs):
            outcome = TrialOutcome(trial=0, n=1)
            outcome.checked_k = [1]
            outcome.values = {1: {"formula": 1, "qform": -1}}
            outcome.agreed = False
            outcome.blocks_json = {"n": 1}
            report = VerifyReport(
                n=1, trials=1, k_max=1, seed=0, methods=("formula", "qform"),
                tol=None, scale=1.0, checked=1, agreements=0,
            )
            report.disagreements.append(outcome)
            return report

        monkeypatch.setattr(
            "symindex.service.handlers.run_verification",
            lambda **kwargs: fake_verification(**kwargs),
        )
        code, out, _ = run_cli(capsys, ["verify", "--n", "1", "--trials", "1"])
        assert code == EXIT_DISAGREEMENT
        doc = json.loads(out)
        assert doc["ok"] is False
        assert doc["disagreements"][0]["values"]["1"] == {"formula": 1, "qform": -1}


class TestOrbitCommand:
    def test_oscillator(self, capsys):
        w2 = repr(float(np.sqrt(2.0)))
        code, out, _ = run_cli(
            capsys,
            ["orbit", "--system", f"oscillator:1:{w2}",
             "--seed-point", "[1, 0, 0, 0]", "--k-max", "2"],
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["orbit"]["eta"] == pytest.approx(2 * np.pi, abs=1e-8)
        assert doc["indices"][0]["s"] == {"doubled": -1}

    def test_unknown_system(self, capsys):
        code, _, err = run_cli(
            capsys, ["orbit", "--system", "pendulum", "--seed-point", "[0,0,0,0]"]
        )
        assert code == EXIT_INPUT
        assert "unknown system" in err


class TestOutputFile:
    def test_write_to_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run_cli(
            capsys,
            ["verify", "--n", "1", "--trials", "2", "--seed", "5",
             "--k-max", "1", "--methods", "formula", "qform",
             "--output", str(target)],
        )
        assert code == EXIT_OK
        assert out == ""
        assert json.loads(target.read_text())["trials"] == 2
