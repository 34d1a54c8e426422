import csv
import json
import math

import pytest

from condana import cli


def run(argv):
    return cli.main(argv)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestAnalyze:
    def test_identity_unit_condition(self, tmp_path):
        out = tmp_path / "r.csv"
        code = run(["--command", "analyze", "--problem", "identity",
                    "--point", "1,1", "--samples", "2000", "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 2
        assert float(rows[0]["wnc"]) == pytest.approx(1.0)
        assert float(rows[0]["wcc_j"]) == pytest.approx(1.0)
        assert rows[0]["flag_norm_degenerate"] == "false"

    def test_product_carries_exact_value(self, tmp_path):
        out = tmp_path / "r.json"
        code = run(["--command", "analyze", "--problem", "product",
                    "--point", "1,1", "--samples", "2000",
                    "--format", "json", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        row = payload["rows"][0]
        assert row["wnc"] == pytest.approx(2.0)
        assert row["snc_exact"] == pytest.approx(8.0 / (3.0 * math.pi), rel=1e-12)
        assert payload["meta"]["seed"] == 42

    def test_degenerate_point_exits_two(self, tmp_path, capsys):
        code = run(["--command", "analyze", "--problem", "sum",
                    "--point", "1,-1", "--samples", "2000"])
        assert code == 2
        stdout = capsys.readouterr().out
        rows = list(csv.DictReader(stdout.splitlines()))
        assert rows[0]["flag_output_degenerate"] == "true"
        assert rows[0]["wcc_j"] == ""  # never IEEE infinity in a value column

    def test_random_point_is_reproducible(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run(["--command", "analyze", "--problem", "dot",
                        "--point", "random", "--samples", "2000",
                        "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_matrix_file_problem(self, tmp_path):
        mat = tmp_path / "mat.txt"
        mat.write_text("1 2\n3.0 4.0\n")
        out = tmp_path / "r.csv"
        code = run(["--command", "analyze", "--problem", str(mat),
                    "--point", "1,1", "--samples", "2000", "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        # f(x) = 3x1 + 4x2: wnc at (1,1) = sqrt(2)*5/7
        assert float(rows[0]["wnc"]) == pytest.approx(math.sqrt(2.0) * 5.0 / 7.0)

    def test_usage_errors(self):
        assert run(["--command", "analyze"]) == 1  # missing problem
        assert run(["--command", "analyze", "--problem", "nope",
                    "--point", "1"]) == 1
        assert run(["--command", "analyze", "--problem", "identity",
                    "--point", "1"]) == 1  # wrong arity
        assert run(["--command", "analyze", "--problem", "identity",
                    "--point", "x,y"]) == 1
        assert run(["--command", "analyze", "--problem", "identity",
                    "--point", "1,1", "--samples", "50"]) == 1
        assert run(["--command", "bogus"]) == 1


class TestVerifyCommand:
    def test_restricted_group_all_pass(self, tmp_path):
        out = tmp_path / "v.csv"
        code = run(["--command", "verify", "--checks", "corollary1",
                    "--samples", "2000", "--m-range", "1:10", "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        assert len(rows) >= 10
        assert all(r["passed"] == "true" for r in rows)
        assert all(r["name"].startswith("corollary1/") for r in rows)

    def test_seed_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["--command", "verify", "--checks", "lemma5,berry_esseen",
                "--samples", "2000", "--seed", "42"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_thread_count_keeps_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["--command", "verify", "--checks", "theorem2", "--m-range", "2:5",
                "--samples", "2000"]
        assert run(base + ["--threads", "1", "--out", str(a)]) == 0
        assert run(base + ["--threads", "8", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_env_seed_override(self, tmp_path, monkeypatch):
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        args = ["--command", "verify", "--checks", "corollary1", "--m-range", "1:3",
                "--samples", "2000", "--seed", "42"]
        assert run(args + ["--out", str(a)]) == 0
        monkeypatch.setenv("CONDANA_SEED", "7")
        assert run(args + ["--out", str(b)]) == 0
        monkeypatch.setenv("CONDANA_SEED", "42")
        assert run(args + ["--out", str(c)]) == 0
        assert a.read_bytes() != b.read_bytes()
        assert a.read_bytes() == c.read_bytes()

    def test_failed_checks_exit_two(self, monkeypatch):
        from condana.verify import BoundCheck, VerifySuiteReport

        fake = VerifySuiteReport(seed=42, checks=[
            BoundCheck("x/y", "m=1", 2.0, 1.0, "<=", -1.0, 0.0, False)])
        monkeypatch.setattr(cli, "run_suite", lambda cfg: fake)
        assert run(["--command", "verify"]) == 2

    def test_unknown_group_is_usage_error(self):
        assert run(["--command", "verify", "--checks", "nope"]) == 1


class TestSweep:
    def test_product_slope_near_one(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run(["--command", "sweep", "--problem", "product", "--point", "1,1",
                    "--samples", "2000",
                    "--deltas", "1e-2,1e-3,1e-4,1e-5,1e-6", "--out", str(out)])
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 5
        slope = float(rows[0]["slope_snc"])
        assert 0.8 <= slope <= 1.2

    def test_linear_problem_fd_equals_linearized(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run(["--command", "sweep", "--problem", "matvec",
                    "--point", "1,1,1", "--samples", "500",
                    "--deltas", "1e-1,1e-2,1e-3", "--out", str(out)])
        assert code == 0
        for row in read_csv(out):
            fd = float(row["snc_fd"])
            lin = float(row["snc_linearized"])
            assert fd == pytest.approx(lin, rel=1e-12)

    def test_underflow_flagged_exit_two(self, tmp_path):
        out = tmp_path / "s.csv"
        code = run(["--command", "sweep", "--problem", "matvec",
                    "--point", "1,1,1", "--samples", "300",
                    "--deltas", "1e-2,1e-300", "--out", str(out)])
        assert code == 2
        rows = read_csv(out)
        flagged = [r for r in rows if r["flag_underflow"] == "true"]
        assert flagged and all(r["snc_fd"] == "" for r in flagged)

    def test_needs_deltas(self):
        assert run(["--command", "sweep", "--problem", "product",
                    "--point", "1,1"]) == 1
        assert run(["--command", "sweep", "--problem", "product", "--point", "1,1",
                    "--deltas", "1e-3,1e-2"]) == 1  # not decreasing


class TestMoments:
    def test_m3_row_values(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run(["--command", "moments", "--m-range", "1:4",
                    "--out", str(out)]) == 0
        rows = {r["m"]: r for r in read_csv(out)}
        r3 = rows["3"]
        assert float(r3["e_norm"]) == 0.75
        assert float(r3["e_norm_sq"]) == pytest.approx(0.6)
        assert float(r3["e_log_norm"]) == pytest.approx(-1.0 / 3.0)
        assert float(r3["e_abs_cos"]) == 0.5
        assert float(r3["e_cos_sq"]) == pytest.approx(1.0 / 3.0)
        assert float(r3["e_log_abs_cos"]) == -1.0
        assert float(r3["snc_wnc_ratio"]) == pytest.approx(0.375)

    def test_m2_contains_even_ratio(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run(["--command", "moments", "--m-range", "2:2",
                    "--out", str(out)]) == 0
        row = read_csv(out)[0]
        assert float(row["snc_wnc_ratio"]) == pytest.approx(4.0 / (3.0 * math.pi))

    def test_m1_has_empty_cosine_columns(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run(["--command", "moments", "--m-range", "1:1",
                    "--out", str(out)]) == 0
        row = read_csv(out)[0]
        assert row["e_abs_cos"] == "" and row["e_log_abs_cos"] == ""
        assert row["epsilon_m"] == ""
        assert float(row["snc_wnc_ratio"]) == 0.5

    def test_requires_range(self):
        assert run(["--command", "moments"]) == 1
        assert run(["--command", "moments", "--m-range", "3:1"]) == 1


class TestSerialization:
    def test_seventeen_digit_round_trip(self, tmp_path):
        out = tmp_path / "m.csv"
        run(["--command", "moments", "--m-range", "7:7", "--out", str(out)])
        row = read_csv(out)[0]
        from condana.closed_forms import snc_wnc_exact
        exact, gap = snc_wnc_exact(7)
        assert float(row["snc_wnc_ratio"]) == exact  # bitwise round trip
        assert float(row["snlp_gap_bits"]) == gap

    def test_csv_and_json_agree(self, tmp_path):
        a, b = tmp_path / "m.csv", tmp_path / "m.json"
        run(["--command", "moments", "--m-range", "2:5", "--out", str(a)])
        run(["--command", "moments", "--m-range", "2:5", "--format", "json",
             "--out", str(b)])
        crows = read_csv(a)
        jrows = json.loads(b.read_text())["rows"]
        assert len(crows) == len(jrows)
        for cr, jr in zip(crows, jrows):
            for key, jval in jr.items():
                if isinstance(jval, float):
                    assert float(cr[key]) == jval
                elif jval is None:
                    assert cr[key] == ""

    def test_stdout_when_no_out(self, capsys):
        assert run(["--command", "moments", "--m-range", "1:1"]) == 0
        header = capsys.readouterr().out.splitlines()[0]
        assert header.startswith("m,e_norm,")
