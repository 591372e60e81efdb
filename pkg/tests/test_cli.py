"""Tests for the command-line surface and its exit codes."""

import json
import shutil
import subprocess
import sys

import pytest

from kcmt.bench import COLUMNS
from kcmt.cli import main

PHI1_SMT2 = (
    "(set-logic QF_LRA)\n"
    "(declare-const x Real)\n"
    "(assert (or (<= x 0) (= x 1)))\n"
)
PHI2_SMT2 = (
    "(set-logic QF_LRA)\n"
    "(declare-const x Real)\n"
    "(assert (= (not (<= x 0)) (= x 1)))\n"
)
UNSAT_SMT2 = (
    "(set-logic QF_LRA)\n"
    "(declare-const x Real)\n"
    "(assert (and (<= x 0) (>= x 1)))\n"
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    """Workspace with the worked-example inputs compiled every way."""
    root = tmp_path_factory.mktemp("cli")
    (root / "phi1.smt2").write_text(PHI1_SMT2)
    (root / "phi2.smt2").write_text(PHI2_SMT2)
    (root / "unsat.smt2").write_text(UNSAT_SMT2)
    jobs = [
        ("phi1", "tred", "ddnnf", "tred"),
        ("phi1", "text", "ddnnf", "text"),
        ("phi1", "tred", "obdd", "o1"),
        ("phi2", "tred", "obdd", "o2"),
        ("unsat", "tred", "ddnnf", "unsat"),
    ]
    for source, mode, target, stem in jobs:
        code = main([
            "compile", "--input", str(root / ("%s.smt2" % source)),
            "--mode", mode, "--target", target,
            "--out", str(root / ("%s.nnf" % stem)),
            "--map", str(root / ("%s.map" % stem)),
        ])
        assert code == 0
    return root


def art(ws, stem):
    return [str(ws / ("%s.nnf" % stem)), str(ws / ("%s.map" % stem))]


class TestCompile:
    def test_summary_and_files(self, tmp_path, capsys):
        src = tmp_path / "f.smt2"
        src.write_text(PHI1_SMT2)
        code, out, _ = run(
            capsys, "compile", "--input", str(src), "--mode", "tred",
            "--target", "ddnnf", "--out", str(tmp_path / "f.nnf"),
            "--map", str(tmp_path / "f.map"),
            "--lemmas-out", str(tmp_path / "f.lem"), "--smooth")
        assert code == 0
        assert "tReduced ddnnf: 2 atoms, 1 lemmas" in out
        lem = (tmp_path / "f.lem").read_text().splitlines()
        assert lem[1] == "p cnf 2 1"
        assert lem[2] == "-1 -2 0"
        map_lines = (tmp_path / "f.map").read_text().splitlines()
        assert map_lines[0] == "kcmt-map 1"

    def test_order_file_drives_obdd(self, tmp_path, capsys):
        src = tmp_path / "f.smt2"
        src.write_text(PHI1_SMT2)
        (tmp_path / "ord.txt").write_text("2 1\n")
        code, out, _ = run(
            capsys, "compile", "--input", str(src), "--mode", "tred",
            "--target", "obdd", "--order", str(tmp_path / "ord.txt"),
            "--out", str(tmp_path / "f.nnf"), "--map", str(tmp_path / "f.map"))
        assert code == 0
        assert "order 2 1" in (tmp_path / "f.map").read_text()

    def test_order_rejected_for_ddnnf(self, ws, tmp_path, capsys):
        (tmp_path / "ord.txt").write_text("1 2\n")
        code, _, err = run(
            capsys, "compile", "--input", str(ws / "phi1.smt2"),
            "--mode", "tred", "--target", "ddnnf",
            "--order", str(tmp_path / "ord.txt"),
            "--out", str(tmp_path / "x.nnf"), "--map", str(tmp_path / "x.map"))
        assert code == 2
        assert "--order applies to the obdd target" in err

    def test_smooth_rejected_for_obdd(self, ws, tmp_path, capsys):
        code, _, err = run(
            capsys, "compile", "--input", str(ws / "phi1.smt2"),
            "--mode", "tred", "--target", "obdd", "--smooth",
            "--out", str(tmp_path / "x.nnf"), "--map", str(tmp_path / "x.map"))
        assert code == 2
        assert "--smooth applies to the ddnnf target" in err

    def test_parse_error_reports_position(self, tmp_path, capsys):
        src = tmp_path / "bad.smt2"
        src.write_text("(assert (foo x))\n")
        code, _, err = run(
            capsys, "compile", "--input", str(src), "--mode", "tred",
            "--target", "ddnnf", "--out", str(tmp_path / "x.nnf"),
            "--map", str(tmp_path / "x.map"))
        assert code == 2
        assert "line 1, column" in err

    def test_missing_input_file(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "compile", "--input", str(tmp_path / "absent.smt2"),
            "--mode", "tred", "--target", "ddnnf",
            "--out", str(tmp_path / "x.nnf"), "--map", str(tmp_path / "x.map"))
        assert code == 2
        assert "absent.smt2" in err


class TestQuery:
    def test_co_true(self, ws, capsys):
        code, out, _ = run(capsys, "query", "co", *art(ws, "tred"))
        assert (code, out.strip()) == (0, "true")

    def test_co_false_exits_one(self, ws, capsys):
        code, out, _ = run(capsys, "query", "co", *art(ws, "unsat"))
        assert (code, out.strip()) == (1, "false")

    def test_ct(self, ws, capsys):
        code, out, _ = run(capsys, "query", "ct", *art(ws, "tred"))
        assert (code, out.strip()) == (0, "2")
        code, out, _ = run(capsys, "query", "ct", *art(ws, "unsat"))
        assert (code, out.strip()) == (0, "0")

    def test_ce_verdicts(self, ws, capsys):
        code, out, _ = run(capsys, "query", "ce",
                           "--clause", "!x <= 0,!x = 1", *art(ws, "tred"))
        assert (code, out.strip()) == (0, "true")
        code, out, _ = run(capsys, "query", "ce",
                           "--clause", "x = 1", *art(ws, "tred"))
        assert (code, out.strip()) == (1, "false")

    def test_im_on_textended(self, ws, capsys):
        code, out, _ = run(capsys, "query", "im",
                           "--cube", "x <= 0", *art(ws, "text"))
        assert (code, out.strip()) == (0, "true")

    def test_ct_assume(self, ws, capsys):
        code, out, _ = run(capsys, "query", "ct",
                           "--assume", "!x <= 0", *art(ws, "tred"))
        assert (code, out.strip()) == (0, "1")

    def test_me_lists_both_models(self, ws, capsys):
        code, out, _ = run(capsys, "query", "me", *art(ws, "tred"))
        assert code == 0
        assert set(out.splitlines()) == {"x <= 0,!x = 1", "!x <= 0,x = 1"}

    def test_unknown_atom_is_usage_error(self, ws, capsys):
        code, _, err = run(capsys, "query", "ce",
                           "--clause", "y <= 9", *art(ws, "tred"))
        assert code == 2
        assert "unknown atom" in err

    def test_duplicate_literal_is_usage_error(self, ws, capsys):
        code, _, err = run(capsys, "query", "ce",
                           "--clause", "x <= 0,!x <= 0", *art(ws, "tred"))
        assert code == 2

    def test_mode_violations_exit_three(self, ws, capsys):
        code, _, err = run(capsys, "query", "ct", *art(ws, "text"))
        assert code == 3
        assert "mode violation" in err
        code, _, _ = run(capsys, "query", "va", *art(ws, "tred"))
        assert code == 3
        code, _, _ = run(capsys, "query", "eq",
                         "--other", *art(ws, "tred"), *art(ws, "tred"))
        assert code == 3

    def test_eq_obdd_equivalent_pair(self, ws, capsys):
        code, out, _ = run(capsys, "query", "eq",
                           "--other", *art(ws, "o2"), *art(ws, "o1"))
        assert (code, out.strip()) == (0, "true")

    def test_se_both_directions(self, ws, capsys):
        code, out, _ = run(capsys, "query", "se",
                           "--other", *art(ws, "o2"), *art(ws, "o1"))
        assert (code, out.strip()) == (0, "true")
        code, out, _ = run(capsys, "query", "se",
                           "--other", *art(ws, "o1"), *art(ws, "o2"))
        assert (code, out.strip()) == (0, "true")

    def test_eq_order_mismatch_exits_three(self, ws, tmp_path, capsys):
        (tmp_path / "ord.txt").write_text("2 1\n")
        code = main([
            "compile", "--input", str(ws / "phi1.smt2"), "--mode", "tred",
            "--target", "obdd", "--order", str(tmp_path / "ord.txt"),
            "--out", str(tmp_path / "r.nnf"), "--map", str(tmp_path / "r.map")])
        assert code == 0
        capsys.readouterr()
        code, _, err = run(capsys, "query", "eq",
                           "--other", str(tmp_path / "r.nnf"),
                           str(tmp_path / "r.map"), *art(ws, "o1"))
        assert code == 3
        assert "variable order" in err


class TestOracle:
    def test_ct_pinned_to_map(self, ws, capsys):
        code, out, _ = run(capsys, "oracle", "ct",
                           "--input", str(ws / "phi1.smt2"),
                           "--alpha-from", str(ws / "tred.map"))
        assert (code, out.strip()) == (0, "2")

    def test_verdicts(self, ws, capsys):
        code, out, _ = run(capsys, "oracle", "co",
                           "--input", str(ws / "phi1.smt2"))
        assert (code, out.strip()) == (0, "true")
        code, out, _ = run(capsys, "oracle", "va",
                           "--input", str(ws / "phi1.smt2"))
        assert (code, out.strip()) == (1, "false")
        code, out, _ = run(capsys, "oracle", "co",
                           "--input", str(ws / "unsat.smt2"))
        assert (code, out.strip()) == (1, "false")

    def test_me_matches_query(self, ws, capsys):
        code, query_out, _ = run(capsys, "query", "me", *art(ws, "tred"))
        assert code == 0
        code, oracle_out, _ = run(capsys, "oracle", "me",
                                  "--input", str(ws / "phi1.smt2"),
                                  "--alpha-from", str(ws / "tred.map"))
        assert code == 0
        assert set(oracle_out.splitlines()) == set(query_out.splitlines())

    def test_clause_and_cube_verbs(self, ws, capsys):
        code, out, _ = run(capsys, "oracle", "ce",
                           "--clause", "!x <= 0,!x = 1",
                           "--input", str(ws / "phi1.smt2"))
        assert (code, out.strip()) == (0, "true")
        code, out, _ = run(capsys, "oracle", "im", "--cube", "x <= 0",
                           "--input", str(ws / "phi1.smt2"))
        assert (code, out.strip()) == (0, "true")
        code, out, _ = run(capsys, "oracle", "ct", "--assume", "!x <= 0",
                           "--input", str(ws / "phi1.smt2"))
        assert (code, out.strip()) == (0, "1")

    def test_eq_between_smt2_files(self, ws, capsys):
        code, out, _ = run(capsys, "oracle", "eq",
                           "--input", str(ws / "phi1.smt2"),
                           "--other", str(ws / "phi2.smt2"))
        assert (code, out.strip()) == (0, "true")
        code, out, _ = run(capsys, "oracle", "se",
                           "--input", str(ws / "unsat.smt2"),
                           "--other", str(ws / "phi1.smt2"))
        assert (code, out.strip()) == (0, "true")

    def test_alpha_from_must_cover_formula(self, ws, tmp_path, capsys):
        other = tmp_path / "y.smt2"
        other.write_text("(declare-const y Real)(assert (<= y 0))")
        code, _, err = run(capsys, "oracle", "co", "--input", str(other),
                           "--alpha-from", str(ws / "tred.map"))
        assert code == 2
        assert "not in the map" in err


class TestGenBench:
    def test_gen_is_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.smt2", tmp_path / "b.smt2"
        for path in (a, b):
            code, out, _ = run(capsys, "gen", "--seed", "5",
                               "--lra-atoms", "4", "--vars", "2",
                               "--out", str(path))
            assert code == 0
            assert "4 atoms" in out
        assert a.read_text() == b.read_text()

    def test_gen_rejects_bad_spec(self, tmp_path, capsys):
        code, _, err = run(capsys, "gen", "--lra-atoms", "2", "--vars", "0",
                           "--out", str(tmp_path / "x.smt2"))
        assert code == 2
        assert "rational variable" in err

    def test_bench_writes_report(self, tmp_path, capsys):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text(json.dumps({
            "instances": [
                {"name": "a", "seed": 1, "lraAtoms": 4, "vars": 2}],
            "clauses": 3,
        }))
        out_csv = tmp_path / "report.csv"
        code, out, _ = run(capsys, "bench", "--spec", str(cfg),
                           "--out", str(out_csv), "--jobs", "2")
        assert code == 0
        assert "rows -> %s" % out_csv in out
        lines = out_csv.read_text().splitlines()
        assert lines[0] == ",".join(COLUMNS)
        assert all(line.endswith("yes") for line in lines[1:])

    def test_bench_rejects_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "bench.cfg"
        cfg.write_text("{\"bogus\": 1}")
        code, _, err = run(capsys, "bench", "--spec", str(cfg),
                           "--out", str(tmp_path / "r.csv"))
        assert code == 2
        assert "unknown config keys" in err


class TestEntryPoints:
    def test_bare_invocation_prints_help(self, capsys):
        code, out, _ = run(capsys)
        assert code == 0
        assert "Usage" in out

    def test_help_flag(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == 0
        assert "compile" in out

    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 2

    def test_console_script(self, ws):
        exe = shutil.which("kcmt")
        assert exe is not None
        proc = subprocess.run([exe, "query", "ct", *art(ws, "tred")],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip() == "2"

    def test_module_invocation(self, ws):
        proc = subprocess.run(
            [sys.executable, "-m", "kcmt", "query", "co", *art(ws, "unsat")],
            capture_output=True, text=True)
        assert proc.returncode == 1
        assert proc.stdout.strip() == "false"
