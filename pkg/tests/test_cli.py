import json
import re
from fractions import Fraction
from pathlib import Path

import pytest

from transopt import BalanceError
from transopt.cli import (
    ParseError,
    format_rational,
    main,
    parse_instance,
    serialize_instance,
)

DATA = Path(__file__).parent / "data"
WORKED = DATA / "worked_example.txt"
TINY = DATA / "tiny.txt"
RATIONAL = DATA / "rational.txt"
HALVES = DATA / "halves.txt"
GOLDEN_TRACE = DATA / "worked_hungarian_trace.txt"
GOLDEN_JSON = DATA / "worked_hungarian.json"

RATIONAL_TOKEN = re.compile(r"^-?[0-9]+(/[0-9]+)?$")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestHelp:
    def test_help_lists_commands(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            main(["--help"])
        assert exit_info.value.code == 0
        out = capsys.readouterr().out
        for command in ("solve", "check-monge", "generate"):
            assert command in out

    def test_solve_help_lists_flags(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            main(["solve", "--help"])
        assert exit_info.value.code == 0
        out = capsys.readouterr().out
        for flag in ("--method", "--trace", "--json", "--certificate"):
            assert flag in out

    def test_missing_command_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exit_info:
            main([])
        assert exit_info.value.code == 2


class TestFormatRational:
    def test_integers_have_no_denominator(self):
        assert format_rational(Fraction(47)) == "47"
        assert format_rational(Fraction(-3)) == "-3"

    def test_fractions_render_as_p_over_q(self):
        assert format_rational(Fraction(1, 2)) == "1/2"
        assert format_rational(Fraction(-5, 4)) == "-5/4"


class TestParseInstance:
    def test_worked_example_file(self):
        inst = parse_instance(WORKED.read_text())
        assert (inst.m, inst.n) == (3, 4)
        assert inst.total == 15

    def test_minimal_text(self):
        inst = parse_instance("1 1\n0\n5\n5")
        assert inst.m == inst.n == 1
        assert inst.total == 5

    def test_fractions_and_comments(self):
        inst = parse_instance("# c\n2 2\n1/2 2/3\n3/4 1\n1 2\n# mid comment\n2 1\n")
        assert inst.cost[0][0] == Fraction(1, 2)

    def test_imbalance_reports_totals(self):
        with pytest.raises(BalanceError, match="2 != total demand 3"):
            parse_instance("2 2\n1 2\n3 4\n1 1\n1 2")

    def test_malformed_number_names_line_and_column(self):
        with pytest.raises(ParseError) as err:
            parse_instance("2 2\n1 2\n3 oops\n1 1\n1 1")
        assert err.value.line == 3
        assert err.value.column == 3

    def test_wrong_field_count(self):
        with pytest.raises(ParseError, match="cost row 1 has 3 fields, expected 2"):
            parse_instance("2 2\n1 2 9\n3 4\n1 1\n1 1")

    def test_missing_lines(self):
        with pytest.raises(ParseError, match="incomplete"):
            parse_instance("2 2\n1 2\n3 4\n1 1")

    def test_extra_lines(self):
        with pytest.raises(ParseError, match="extra data"):
            parse_instance("1 1\n0\n5\n5\n99")

    def test_empty_input(self):
        with pytest.raises(ParseError, match="empty"):
            parse_instance("# only a comment\n")

    def test_bad_dimension(self):
        with pytest.raises(ParseError, match="positive integer"):
            parse_instance("0 2\n1 1\n1 1")


class TestRoundTrip:
    @pytest.mark.parametrize("fixture", ["worked_example.txt", "tiny.txt", "rational.txt", "halves.txt"])
    def test_parse_serialize_fixed_point(self, fixture):
        text = (DATA / fixture).read_text()
        first = parse_instance(text)
        canonical = serialize_instance(first)
        second = parse_instance(canonical)
        assert second == first
        assert serialize_instance(second) == canonical

    def test_canonical_form_is_plain(self):
        canonical = serialize_instance(parse_instance(WORKED.read_text()))
        assert "#" not in canonical
        assert "  " not in canonical
        assert canonical.endswith("\n")


class TestSolveCommand:
    def test_nw_plan_and_cost(self, capsys):
        code, out, _ = run(capsys, "solve", str(WORKED), "--method", "nw")
        assert code == 0
        assert "total cost = 93" in out
        assert "(1, 1) = 3" in out

    def test_nw_certificate_flags_non_optimality(self, capsys):
        code, out, _ = run(
            capsys, "solve", str(WORKED), "--method", "nw", "--certificate"
        )
        assert code == 0
        assert "verified optimal: no" in out
        assert "first violation: dual at" in out
        assert "note: plan is not certified optimal" in out

    def test_hungarian_certificate_verifies(self, capsys):
        code, out, _ = run(
            capsys, "solve", str(WORKED), "--method", "hungarian", "--certificate"
        )
        assert code == 0
        assert "total cost = 47" in out
        assert "verified optimal: yes" in out

    def test_hungarian_golden_trace_bytes(self, capsys):
        code, out, _ = run(
            capsys, "solve", str(WORKED), "--method", "hungarian",
            "--trace", "--certificate",
        )
        assert code == 0
        assert out == GOLDEN_TRACE.read_text()

    def test_output_is_stable_across_runs(self, capsys):
        args = ("solve", str(WORKED), "--method", "hungarian", "--trace", "--json")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_hungarian_golden_json(self, capsys):
        code, out, _ = run(
            capsys, "solve", str(WORKED), "--method", "hungarian",
            "--trace", "--certificate", "--json",
        )
        assert code == 0
        assert out == GOLDEN_JSON.read_text()

    def test_json_schema_shape(self, capsys):
        code, out, _ = run(
            capsys, "solve", str(TINY), "--method", "oracle", "--json"
        )
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"method", "instance", "plan", "cost"}
        assert doc["method"] == "oracle"
        assert set(doc["instance"]) == {"m", "n", "total", "cost", "supply", "demand"}
        assert RATIONAL_TOKEN.match(doc["cost"])
        for entry in doc["plan"]:
            assert set(entry) == {"row", "col", "quantity"}
            assert entry["row"] >= 1 and entry["col"] >= 1
            assert RATIONAL_TOKEN.match(entry["quantity"])
        for row in doc["instance"]["cost"]:
            assert all(RATIONAL_TOKEN.match(v) for v in row)

    def test_json_trace_matches_schema_fixture(self, capsys):
        schema = json.loads((Path(__file__).parents[1] / "docs" / "result_schema.json").read_text())
        _, out, _ = run(
            capsys, "solve", str(WORKED), "--method", "hungarian",
            "--trace", "--certificate", "--json",
        )
        doc = json.loads(out)
        for key in schema["required"]:
            assert key in doc
        assert isinstance(doc["trace"], list) and doc["scale"] == 1
        iteration_required = schema["properties"]["trace"]["items"]["required"]
        for iteration in doc["trace"]:
            assert all(k in iteration for k in iteration_required)
        pattern = re.compile(schema["definitions"]["rational"]["pattern"])
        assert pattern.match(doc["cost"])

    def test_oracle_guard_gives_exit_3(self, capsys):
        code, _, err = run(capsys, "solve", str(WORKED), "--method", "oracle")
        assert code == 3
        assert "size guard" in err

    def test_hungarian_fractional_marginals_exit_3(self, capsys):
        code, _, err = run(capsys, "solve", str(HALVES), "--method", "hungarian")
        assert code == 3
        assert "integer supplies and demands" in err

    def test_nw_handles_fractional_marginals(self, capsys):
        code, out, _ = run(capsys, "solve", str(HALVES), "--method", "nw")
        assert code == 0
        assert "total cost = 0" in out

    def test_trace_flag_is_inert_for_non_iterative_methods(self, capsys):
        code, out, _ = run(capsys, "solve", str(WORKED), "--method", "nw", "--trace")
        assert code == 0
        assert "trace:" not in out
        code, out, _ = run(
            capsys, "solve", str(TINY), "--method", "oracle", "--trace", "--json"
        )
        assert code == 0
        assert "trace" not in json.loads(out)

    def test_missing_file_exit_2(self, capsys):
        code, _, err = run(capsys, "solve", "no-such-file.txt", "--method", "nw")
        assert code == 2
        assert "cannot read" in err

    def test_parse_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("2 2\n1 zz\n3 4\n1 1\n1 1\n")
        code, _, err = run(capsys, "solve", str(bad), "--method", "nw")
        assert code == 2
        assert "line 2" in err


class TestCheckMongeCommand:
    def test_worked_example_violated_exit_1(self, capsys):
        code, out, _ = run(capsys, "check-monge", str(WORKED))
        assert code == 1
        assert "MONGE: VIOLATED at (1, 1, 2, 2)" in out
        assert "= 16 > 8 =" in out

    def test_constant_costs_hold(self, tmp_path, capsys):
        path = tmp_path / "const.txt"
        path.write_text("2 2\n3 3\n3 3\n1 1\n1 1\n")
        code, out, _ = run(capsys, "check-monge", str(path))
        assert code == 0
        assert out == "MONGE: HOLDS\n"

    def test_adjacent_mode(self, capsys):
        code, _, _ = run(capsys, "check-monge", str(WORKED), "--mode", "adjacent")
        assert code == 1


class TestGenerateCommand:
    def test_survey_unit_marginals(self, capsys):
        code, out, _ = run(capsys, "generate", "survey", "3", "3")
        assert code == 0
        assert out == "3 3\n0 1 2\n1 0 1\n2 1 0\n1 1 1\n1 1 1\n"

    def test_survey_imbalanced_defaults_exit_2(self, capsys):
        code, _, err = run(capsys, "generate", "survey", "2", "3")
        assert code == 2
        assert "unbalanced" in err

    def test_sum_kind(self, capsys):
        code, out, _ = run(
            capsys, "generate", "sum", "--x", "1", "2", "--y", "10", "20",
            "--supply", "2", "3", "--demand", "1", "4",
        )
        assert code == 0
        assert out == "2 2\n11 21\n12 22\n2 3\n1 4\n"

    def test_problemp_kind_solves_to_zero(self, tmp_path, capsys):
        code, out, _ = run(
            capsys, "generate", "problemp", "--f", "square", "--x", "0", "1",
            "--y", "0", "1", "--p-row", "1/2", "1/2", "--p-col", "1/2", "1/2",
        )
        assert code == 0
        path = tmp_path / "p.txt"
        path.write_text(out)
        code, solved, _ = run(capsys, "solve", str(path), "--method", "nw")
        assert code == 0
        assert "total cost = 0" in solved

    def test_convexdiff_passes_monge(self, tmp_path, capsys):
        code, out, _ = run(
            capsys, "generate", "convexdiff", "--f", "abs", "--x", "1", "2", "4",
            "--y", "0", "2", "5", "--supply", "1", "2", "1", "--demand", "2", "1", "1",
        )
        assert code == 0
        path = tmp_path / "cd.txt"
        path.write_text(out)
        code, verdict, _ = run(capsys, "check-monge", str(path))
        assert code == 0
        assert verdict == "MONGE: HOLDS\n"

    def test_generated_files_agree_across_methods(self, tmp_path, capsys):
        recipes = [
            ("generate", "survey", "4", "4"),
            ("generate", "factored", "--x", "3", "2", "1", "--y", "1", "2", "3",
             "--supply", "2", "2", "1", "--demand", "1", "3", "1"),
            ("generate", "sum", "--x", "1", "5", "--y", "2", "0",
             "--supply", "3", "1", "--demand", "2", "2"),
            ("generate", "convexdiff", "--f", "square", "--x", "0", "1", "3",
             "--y", "1", "2", "2", "--supply", "1", "1", "2", "--demand", "2", "1", "1"),
        ]
        for k, recipe in enumerate(recipes):
            code, out, _ = run(capsys, *recipe)
            assert code == 0
            path = tmp_path / f"gen{k}.txt"
            path.write_text(out)
            costs = {}
            for method in ("nw", "hungarian"):
                code, solved, _ = run(capsys, "solve", str(path), "--method", method)
                assert code == 0
                costs[method] = solved.splitlines()[-1]
            assert costs["nw"] == costs["hungarian"]

    def test_missing_required_options_exit_2(self, capsys):
        code, _, err = run(capsys, "generate", "factored", "--x", "1")
        assert code == 2
        assert "requires" in err

    def test_malformed_value_exit_2(self, capsys):
        code, _, err = run(
            capsys, "generate", "sum", "--x", "one", "--y", "1",
            "--supply", "1", "--demand", "1",
        )
        assert code == 2
        assert "malformed number" in err

    def test_generated_output_round_trips(self, capsys):
        code, out, _ = run(capsys, "generate", "survey", "3", "3")
        assert code == 0
        assert serialize_instance(parse_instance(out)) == out
