"""End-to-end tests of the command-line interface."""

import json

import pytest

import pipeline_fixtures as fx
from hz.cli import EXIT_EMPTY, EXIT_ERROR, EXIT_OK, main
from hz.hecke import eigensystem_to_json
from hz.padic import PadicNumber
from hz.qexp import RATIONAL, EllipticQExp, to_json
from fractions import Fraction


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestHtTable:
    def test_weight_two(self, capsys):
        code, out, _ = run(capsys, ["ht-table", "--weight", "2", "--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["three_step"] == [[0], [-1, -1], [-2]]
        assert record["four_step"] == [[1], [0, 0, 0], [-1, -1, -1], [-2]]
        assert record["fil2_strictly_negative"]

    def test_table_format(self, capsys):
        code, out, _ = run(capsys, ["ht-table", "--weight", "4",
                                    "--format", "table"])
        assert code == EXIT_OK
        assert "three_step" in out and "[2, 0, 0]" in out

    def test_bad_weight(self, capsys):
        code, _, err = run(capsys, ["ht-table", "--weight", "0"])
        assert code == EXIT_ERROR
        assert "error:" in err


class TestAsai:
    def test_cycle_type(self, capsys):
        code, out, _ = run(capsys, ["asai", "--p", "2"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["cycle_type"] == [3, 2]
        assert record["trace"] == -1
        assert not record["distinct_mod_p"]

    def test_five_cycle(self, capsys):
        code, out, _ = run(capsys, ["asai", "--p", "7"])
        record = json.loads(out)
        if record["cycle_type"] == [5]:
            assert record["distinct_mod_p"]

    def test_ramified_prime(self, capsys):
        code, _, err = run(capsys, ["asai", "--p", "19"])
        assert code == EXIT_ERROR
        assert "discriminant" in err


class TestDiagRestrict:
    def test_weight_two_restriction(self, capsys):
        code, out, _ = run(capsys, ["diag-restrict", "--d", "5",
                                    "--eisenstein", "2",
                                    "--trace-bound", "20", "--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["normalization_constant"] == "4"
        coeffs = record["coefficients"]
        assert Fraction(coeffs["2"]) == 9 * Fraction(coeffs["1"])

    def test_odd_weight_rejected(self, capsys):
        code, _, err = run(capsys, ["diag-restrict", "--d", "5",
                                    "--eisenstein", "3",
                                    "--trace-bound", "10"])
        assert code == EXIT_ERROR


class TestEuler:
    ARGS = ["euler", "--alphas", "2,3,4,5", "--froots", "2,21", "-p", "7"]

    def test_valuations(self, capsys):
        code, out, _ = run(capsys, self.ARGS + ["--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["valuations"] == {"ordinary_factor": 0,
                                        "special_factor": -4,
                                        "depth_one_factor": -2}
        assert record["interpolation_at_point"]["gauss_token_exponent"] == -1
        assert "not machine-checkable" in record["localization_factor"][
            "note"]

    def test_precision_env_default(self, capsys, monkeypatch):
        monkeypatch.setenv("HZ_PRECISION_DEFAULT", "6")
        code, out, _ = run(capsys, self.ARGS)
        assert code == EXIT_OK
        assert json.loads(out)["m"] == 6

    def test_bad_env_value(self, capsys, monkeypatch):
        monkeypatch.setenv("HZ_PRECISION_DEFAULT", "soon")
        code, _, err = run(capsys, self.ARGS)
        assert code == EXIT_ERROR

    def test_input_shape_checked(self, capsys):
        code, _, err = run(capsys, ["euler", "--alphas", "2,3",
                                    "--froots", "2,21", "-p", "7"])
        assert code == EXIT_ERROR


class TestSieve:
    def test_small_run(self, capsys):
        code, out, err = run(capsys, ["sieve", "--pmax", "1000", "--verify"])
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["p"] == 853 and record["admissible"]
        assert "checked=" in err

    def test_no_admissible_prime(self, capsys):
        code, out, _ = run(capsys, ["sieve", "--pmax", "20"])
        assert code == EXIT_EMPTY
        assert out.strip() == ""

    def test_deterministic_output(self, capsys):
        _, first, _ = run(capsys, ["sieve", "--pmax", "1200"])
        _, second, _ = run(capsys, ["sieve", "--pmax", "1200"])
        assert first == second

    def test_unknown_curve(self, capsys):
        code, _, err = run(capsys, ["sieve", "--pmax", "100",
                                    "--curve", "997z"])
        assert code == EXIT_ERROR
        assert "997z" in err

    def test_weierstrass_needs_conductor(self, capsys):
        code, _, err = run(capsys, ["sieve", "--pmax", "100",
                                    "--weierstrass", "0,-1,1,-10,-20"])
        assert code == EXIT_ERROR

    def test_csv_summary(self, capsys, tmp_path):
        path = tmp_path / "summary.csv"
        code, _, _ = run(capsys, ["sieve", "--pmax", "1000",
                                  "--csv", str(path)])
        assert code == EXIT_OK
        lines = path.read_text().splitlines()
        assert lines[0].startswith("p,")
        assert lines[1].startswith("853,")


class TestLValue:
    def make_input(self, tmp_path, c_unit):
        ctx = fx.build_space()
        c = PadicNumber(fx.P, fx.M, c_unit, 0)
        g = fx.build_hilbert_input(c, ctx)
        record = {
            "d": 2, "h_plus": fx.FIELD.h_plus, "p": fx.P, "m": fx.M,
            "bound": fx.BOUND,
            "hilbert": to_json(g),
            "target": eigensystem_to_json(fx.TARGET_SYS),
            "others": [eigensystem_to_json(fx.OTHER_SYS)],
            "annihilation": [[2, str(fx.OTHER_SYS.ap[2])]],
        }
        path = tmp_path / "input.json"
        path.write_text(json.dumps(record))
        expected = c / (PadicNumber.one(fx.P, fx.M)
                        - ctx["betas"][0] / ctx["alphas"][0])
        return str(path), expected

    def test_pipeline_value(self, capsys, tmp_path):
        path, expected = self.make_input(tmp_path, 123)
        code, out, _ = run(capsys, ["lvalue", "--input", path, "--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["value"] == [expected.unit, expected.val]

    def test_missing_file(self, capsys, tmp_path):
        missing = str(tmp_path / "nope.json")
        code, _, err = run(capsys, ["lvalue", "--input", missing])
        assert code == EXIT_ERROR
        assert "nope.json" in err


class TestQExpOp:
    def store(self, tmp_path):
        coeffs = [Fraction(n * n + 1) for n in range(13)]
        f = EllipticQExp(2, 1, 12, coeffs, RATIONAL)
        path = tmp_path / "f.json"
        path.write_text(json.dumps(to_json(f)))
        return str(path), f

    def test_deplete(self, capsys, tmp_path):
        path, f = self.store(tmp_path)
        code, out, _ = run(capsys, ["qexp-op", "--input", path,
                                    "--op", "deplete", "-p", "3",
                                    "--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["coeffs"][3] == "0/1"
        assert record["coeffs"][2] == "5/1"

    def test_u_operator(self, capsys, tmp_path):
        path, f = self.store(tmp_path)
        code, out, _ = run(capsys, ["qexp-op", "--input", path,
                                    "--op", "u", "-p", "2", "--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert record["bound"] == 6
        assert Fraction(record["coeffs"][1]) == f[2]

    def test_derivative(self, capsys, tmp_path):
        path, f = self.store(tmp_path)
        code, out, _ = run(capsys, ["qexp-op", "--input", path,
                                    "--op", "derive", "--verify"])
        assert code == EXIT_OK
        record = json.loads(out)
        assert Fraction(record["coeffs"][4]) == 4 * f[4]

    def test_missing_prime_flag(self, capsys, tmp_path):
        path, _ = self.store(tmp_path)
        code, _, err = run(capsys, ["qexp-op", "--input", path,
                                    "--op", "u"])
        assert code == EXIT_ERROR
