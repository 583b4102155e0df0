"""
Tests for the command-line interface: records on stdout and exit codes.
"""
import pytest

from tests.conftest import corpus_cases, fixture_header, leak_cases


def _with_header(key):
    return [(name, path) for name, path in corpus_cases() if key in fixture_header(path)]


def _lines(result):
    return result.output.splitlines()


class TestTypecheckCommand:
    """Tests for `typecheck`."""

    @pytest.mark.parametrize("name,path", _with_header("type"))
    def test_corpus_types(self, cli_runner, name, path):
        result = cli_runner("typecheck", str(path))

        assert result.exit_code == 0, result.output
        assert f"type={fixture_header(path)['type']}" in _lines(result)

    def test_pc_option(self, cli_runner, write_program):
        path = write_program("(fg (new true))")

        result = cli_runner("typecheck", path, "--pc", "H")

        assert result.exit_code == 1
        assert "rule=FG-new" in _lines(result)

    @pytest.mark.parametrize("name,path", leak_cases())
    def test_leaks_exit_with_type_error(self, cli_runner, name, path):
        result = cli_runner("typecheck", str(path))
        expected = fixture_header(path)["expect"]

        # Some leaks typecheck and are only refused by the observer check.
        if expected.endswith("-sub"):
            assert result.exit_code == 0
        else:
            assert result.exit_code == 1
            assert "error=type" in _lines(result)
            assert f"rule={expected}" in _lines(result)

    def test_lang_mismatch(self, cli_runner, write_program):
        result = cli_runner("typecheck", write_program("(cg (ret true))"), "--lang", "fg")

        assert result.exit_code == 2

    def test_missing_file(self, cli_runner, tmp_path):
        result = cli_runner("typecheck", str(tmp_path / "nope.ifc"))

        assert result.exit_code == 2
        assert "error=file" in _lines(result)

    def test_undecodable_file(self, cli_runner, tmp_path):
        """Test that a file that is not utf-8 is a parse error, not a crash."""
        path = tmp_path / "bad.ifc"
        path.write_bytes(b"(fg \xff)")

        result = cli_runner("typecheck", str(path))

        assert result.exit_code == 2
        assert "error=parse" in _lines(result)

    def test_directory_instead_of_file(self, cli_runner, tmp_path):
        result = cli_runner("eval", str(tmp_path))

        assert result.exit_code == 2
        assert "error=file" in _lines(result)

    def test_parse_error(self, cli_runner, write_program):
        result = cli_runner("typecheck", write_program("(fg (app true)"))

        assert result.exit_code == 2
        assert "error=parse" in _lines(result)

    def test_lattice_override(self, cli_runner):
        path = str(dict(corpus_cases())["fg_powerset"])

        assert cli_runner("--lattice", "(powerset a b c)", "typecheck", path).exit_code == 0
        assert cli_runner("--lattice", "2pt", "typecheck", path).exit_code == 2


class TestEvalCommand:
    """Tests for `eval`."""

    @pytest.mark.parametrize("name,path", _with_header("value"))
    def test_corpus_values(self, cli_runner, name, path):
        result = cli_runner("eval", str(path))

        assert result.exit_code == 0, result.output
        assert f"value={fixture_header(path)['value']}" in _lines(result)

    @pytest.mark.parametrize("name,path", _with_header("forced"))
    def test_forced_values(self, cli_runner, name, path):
        result = cli_runner("eval", str(path), "--force")

        assert result.exit_code == 0, result.output
        assert f"value={fixture_header(path)['forced']}" in _lines(result)

    @pytest.mark.parametrize("name,path", _with_header("heap_size"))
    def test_heap_sizes(self, cli_runner, name, path):
        result = cli_runner("eval", str(path), "--force")

        assert f"heap_size={fixture_header(path)['heap_size']}" in _lines(result)

    def test_timeout(self, cli_runner):
        path = str(dict(corpus_cases())["fg_knot"])

        result = cli_runner("eval", path, "--fuel", "2000")

        assert result.exit_code == 3
        assert "error=timeout" in _lines(result)

    def test_ill_typed_program_is_not_run(self, cli_runner, write_program):
        result = cli_runner("eval", write_program("(cg (unlabel true))"))

        assert result.exit_code == 1
        assert "rule=CG-unlabel" in _lines(result)


class TestTranslateCommand:
    """Tests for `translate`."""

    @pytest.mark.parametrize("name,path", corpus_cases())
    def test_checked_translation(self, cli_runner, name, path):
        from app.ifc.surface.parser import parse

        result = cli_runner("translate", str(path), "--check")

        assert result.exit_code == 0, result.output
        assert "; check=ok" in _lines(result)
        target = parse(result.output)
        assert target.language == ("cg" if name.startswith("fg_") else "fg")

    def test_direction_must_match(self, cli_runner):
        path = str(dict(corpus_cases())["fg_identity"])

        result = cli_runner("translate", path, "--dir", "cg2fg")

        assert result.exit_code == 2

    def test_records(self, cli_runner):
        path = str(dict(corpus_cases())["cg_label"])

        lines = _lines(cli_runner("translate", path))

        assert "; direction=cg2fg" in lines
        assert "; source_type=(Labeled H bool)" in lines
        assert "; target_type=(bool@L + unit@L)@H" in lines


class TestNICheckCommand:
    """Tests for `ni-check`."""

    @pytest.mark.parametrize("name,path", [c for c in corpus_cases() if fixture_header(c[1]).get("ni") == "yes"])
    def test_secure_programs(self, cli_runner, name, path):
        result = cli_runner("ni-check", str(path), "--samples", "10")

        assert result.exit_code == 0, result.output
        assert "status=pass" in _lines(result)

    @pytest.mark.parametrize("name,path", leak_cases())
    def test_leaks(self, cli_runner, name, path):
        result = cli_runner("ni-check", str(path), "--samples", "5")

        assert result.exit_code == 1
        assert f"rule={fixture_header(path)['expect']}" in _lines(result)

    def test_precondition(self, cli_runner, write_program):
        result = cli_runner("ni-check", write_program("(fg (ctx (x bool@H)) true)"), "--secret-label", "L")

        assert result.exit_code == 1
        assert "error=precondition" in _lines(result)

    def test_counterexample_exit_code(self, cli_runner, write_program, monkeypatch):
        from app.ifc import service
        from app.ifc.harness.verdict import failed

        monkeypatch.setattr(
            service, "ni_check_fg",
            lambda e, cfg: failed("ni-fg", samples=1, v1="true", v2="false", result1="true", result2="false"),
        )

        result = cli_runner("ni-check", write_program("(fg (ctx (x bool@H)) true)"))

        assert result.exit_code == 5
        assert "summary=secrets true and false give true and false" in _lines(result)


class TestFuzzCommand:
    """Tests for `fuzz`."""

    def test_passing_run(self, cli_runner, tmp_path):
        result = cli_runner(
            "fuzz", "--lang", "cg", "--dir", "cg2fg", "--n", "3", "--size", "10",
            "--seed", "4", "--workers", "1", "--replay-dir", str(tmp_path),
        )

        assert result.exit_code == 0, result.output
        assert "failures=0" in _lines(result)

    def test_wrong_direction(self, cli_runner):
        result = cli_runner("fuzz", "--lang", "fg", "--dir", "cg2fg", "--n", "1")

        assert result.exit_code == 2

    def test_broken_translation_exits_with_counterexample(self, cli_runner, tmp_path, monkeypatch):
        from app.ifc.cg import syntax as cg
        from app.ifc.harness import oracles
        from app.ifc.translate.result import TransResult

        monkeypatch.setattr(
            oracles, "fg2cg_expr",
            lambda ctx, pc, e: TransResult(cg.UnitLit(), None, cg.TSlio(pc, pc.lattice.bottom, cg.TUnit())),
        )

        result = cli_runner(
            "fuzz", "--lang", "fg", "--dir", "fg2cg", "--n", "2", "--size", "10",
            "--workers", "1", "--replay-dir", str(tmp_path),
        )

        assert result.exit_code == 5
        assert any(line.startswith("replay=") for line in _lines(result))
