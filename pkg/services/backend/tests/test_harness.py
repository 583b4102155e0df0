"""
Tests for the generators, value sampling, oracles, replay storage and the fuzz driver.
"""
import logging
import random

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st
from pydantic import ValidationError

from app.ifc.cg import syntax as cg
from app.ifc.cg.checker import cg_typecheck
from app.ifc.cg.evaluator import LabeledV, RetThunk
from app.ifc.core.errors import GenerationError, PreconditionError, TypeCheckError
from app.ifc.core.heap import Heap, Loc
from app.ifc.core.lattice import parse_lattice
from app.ifc.core.values import BoolV, Closure, InlV, PairV, UnitV
from app.ifc.fg import syntax as fg
from app.ifc.fg.checker import fg_typecheck
from app.ifc.fg.subtyping import fg_subtype
from app.ifc.harness.generators import gen_cg_program, gen_fg_program
from app.ifc.harness.values import encode_cg_value, encoded_env, gen_value
from app.ifc.harness.verdict import NIConfig, Verdict, failed, passed
from app.ifc.service import ni_check_source
from app.ifc.surface.source import load_source
from tests.conftest import corpus_cases, fixture_header, leak_cases

SEEDS = st.integers(min_value=0, max_value=2**31 - 1)


class TestGenerators:
    """Tests for the type-directed program generators."""

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(seed=SEEDS, lattice_text=st.sampled_from(["2pt", "(powerset a b)"]))
    def test_fg_programs_meet_their_goal(self, seed, lattice_text):
        lattice = parse_lattice(lattice_text)
        goal = fg.FGType(fg.TBool(), lattice.bottom)
        ctx = {"x": fg.FGType(fg.TBool(), lattice.top)}
        try:
            e = gen_fg_program(15, ctx, lattice.bottom, seed, goal, lattice)
        except GenerationError:
            assume(False)

        assert fg_subtype(fg_typecheck(ctx, lattice.bottom, e), goal)

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(seed=SEEDS)
    def test_cg_programs_typecheck(self, seed):
        lattice = parse_lattice("2pt")
        ctx = {"x": cg.TLabeled(lattice.top, cg.TBool())}
        try:
            e = gen_cg_program(15, ctx, seed, lattice=lattice)
        except GenerationError:
            assume(False)

        cg_typecheck(ctx, e, lattice)

    def test_generation_is_deterministic(self, two_point):
        first = gen_fg_program(20, {}, two_point.bottom, 7, lattice=two_point)
        second = gen_fg_program(20, {}, two_point.bottom, 7, lattice=two_point)

        assert first == second

    def test_smallest_programs(self, two_point):
        """Test that a budget of one node yields a literal or a returned literal."""
        fg_program = gen_fg_program(1, {}, two_point.bottom, 3, fg.FGType(fg.TBool(), two_point.bottom), two_point)
        cg_program = gen_cg_program(1, {}, 3, cg.TSlio(two_point.top, two_point.bottom, cg.TBool()), two_point)

        assert isinstance(fg_program, fg.BoolLit)
        assert isinstance(cg_program, cg.Ret)
        assert isinstance(cg_program.expr, cg.BoolLit)

    def test_if_over_fresh_references_typechecks(self, two_point):
        """Test the case seed whose if-branches once allocated references at different payload labels."""
        rng = random.Random(185567035)
        goal = fg.FGType(fg.TBool(), rng.choice(two_point.elements()))

        e = gen_fg_program(40, {}, two_point.bottom, rng.randrange(2**31), goal, two_point)

        assert fg_subtype(fg_typecheck({}, two_point.bottom, e), goal)

    def test_unannotated_allocations_are_closed(self, two_point):
        """Test that ``new`` without an annotation only ever wraps a closed payload."""
        for seed in range(200):
            e = gen_fg_program(30, {}, two_point.bottom, seed, lattice=two_point)
            stack = [e]
            while stack:
                node = stack.pop()
                if isinstance(node, fg.New) and node.annotation is None:
                    assert not fg.free_vars(node.expr), seed
                stack.extend(fg.children(node))

    def test_size_must_be_positive(self, two_point):
        with pytest.raises(ValueError):
            gen_fg_program(0, lattice=two_point)
        with pytest.raises(ValueError):
            gen_cg_program(0, lattice=two_point)


@pytest.mark.slow
class TestGeneratorSoundness:
    """Sweeps checking that the generators never need the checker to reject an attempt."""

    @pytest.mark.parametrize("lattice_text", ["2pt", "(powerset a b)"])
    def test_fg_sweep(self, caplog, lattice_text):
        lattice = parse_lattice(lattice_text)
        caplog.set_level(logging.WARNING, logger="app.ifc.harness.generators")
        for seed in range(2000):
            rng = random.Random(seed)
            goal = fg.FGType(fg.TBool(), rng.choice(lattice.elements()))
            try:
                e = gen_fg_program(25, {}, lattice.bottom, rng.randrange(2**31), goal, lattice)
            except GenerationError:
                continue
            assert fg_subtype(fg_typecheck({}, lattice.bottom, e), goal), seed

        assert not [r for r in caplog.records if "GEN_REJECTED" in r.getMessage()]

    @pytest.mark.parametrize("lattice_text", ["2pt", "(powerset a b)"])
    def test_cg_sweep(self, caplog, lattice_text):
        lattice = parse_lattice(lattice_text)
        caplog.set_level(logging.WARNING, logger="app.ifc.harness.generators")
        for seed in range(2000):
            rng = random.Random(seed)
            goal = cg.TSlio(rng.choice(lattice.elements()), rng.choice(lattice.elements()), cg.TBool())
            try:
                e = gen_cg_program(25, {}, rng.randrange(2**31), goal, lattice)
            except GenerationError:
                continue
            cg_typecheck({}, e, lattice)

        assert not [r for r in caplog.records if "GEN_REJECTED" in r.getMessage()]


class TestValues:
    """Tests for inhabitant generation and the CG-to-FG value coding."""

    def test_base_and_structured_values(self, fg_type):
        assert isinstance(gen_value(fg_type("bool@H"), 1), BoolV)
        assert gen_value(fg_type("unit"), 1) == UnitV()
        assert isinstance(gen_value(fg_type("(bool * unit)"), 1), PairV)

    def test_references_need_a_heap(self, fg_type):
        with pytest.raises(GenerationError):
            gen_value(fg_type("(ref bool@L)"), 0)

        heap = Heap()
        loc = gen_value(fg_type("(ref bool@L)"), 0, heap)
        assert isinstance(loc, Loc)
        assert isinstance(heap.load(loc), BoolV)

    def test_cg_values(self, cg_type):
        assert isinstance(gen_value(cg_type("(Labeled H bool)"), 3), LabeledV)
        assert isinstance(gen_value(cg_type("(SLIO H L unit)"), 3), RetThunk)

    def test_encoding_turns_labels_into_inl(self):
        v = PairV(LabeledV(BoolV(True)), UnitV())

        assert encode_cg_value(v) == PairV(InlV(BoolV(True)), UnitV())

    def test_encoded_computation_is_a_thunk(self):
        encoded = encode_cg_value(RetThunk(LabeledV(UnitV())))

        assert isinstance(encoded, Closure)
        assert encoded.env["k"] == InlV(InlV(UnitV()))
        assert encoded.body == fg.Var("k")

    def test_encoded_env_recodes_cells(self, cg_type):
        heap, env = encoded_env({"r": cg_type("(ref H bool)"), "x": cg_type("(Labeled L unit)")}, seed=5)

        assert isinstance(heap.load(env["r"]), InlV)
        assert env["x"] == InlV(UnitV())


class TestVerdicts:
    """Tests for NIConfig validation and verdict records."""

    def test_secret_must_not_flow_to_observer(self, fg_type, low):
        with pytest.raises(ValidationError):
            NIConfig(secret_type=fg_type("bool"), secret_label=low, observer=low)

    def test_cg_secret_must_be_labeled(self, cg_type, low, high):
        with pytest.raises(ValidationError):
            NIConfig(secret_type=cg_type("bool"), secret_label=high, observer=low)

    def test_context_uses_secret_label(self, fg_type, low, high):
        cfg = NIConfig(secret_var="s", secret_type=fg_type("bool@L"), secret_label=high, observer=low, samples=3)

        assert cfg.context() == {"s": fg_type("bool@H")}
        assert cfg.samples == 3

    def test_records_omit_unset_fields(self):
        verdict = failed("ni-fg", samples=2, v1="true", v2="false")

        assert verdict.records() == ["status=counterexample", "oracle=ni-fg", "samples=2", "timeouts=0", "v1=true", "v2=false"]
        assert not verdict.ok
        assert passed("ni-fg").ok

    def test_round_trip_through_json(self):
        verdict = Verdict(status="inconclusive", oracle="equiv-fg2cg", timeouts=1)

        assert Verdict.model_validate_json(verdict.model_dump_json()) == verdict


class TestNoninterferenceOracles:
    """Tests for the NI oracles on the fixture programs."""

    @pytest.mark.parametrize("name,path", leak_cases())
    def test_leaks_are_rejected_by_rule(self, name, path):
        """Test that every leaking program is refused before it runs."""
        expected = fixture_header(path)["expect"]

        with pytest.raises(TypeCheckError) as exc:
            ni_check_source(load_source(str(path)), samples=5)

        assert exc.value.rule == expected

    @pytest.mark.parametrize("name,path", [c for c in corpus_cases() if fixture_header(c[1]).get("ni") == "yes"])
    def test_secure_programs_pass(self, name, path):
        verdict = ni_check_source(load_source(str(path)), samples=20, seed=3)

        assert verdict.status == "pass"
        assert verdict.samples + verdict.timeouts == 20

    def test_needs_exactly_one_secret(self):
        from app.ifc.surface.parser import parse

        with pytest.raises(PreconditionError):
            ni_check_source(parse("(fg true)"))

    def test_secret_label_must_be_above_observer(self):
        from app.ifc.surface.parser import parse

        src = parse("(fg (ctx (x bool@H)) true)")
        with pytest.raises(PreconditionError):
            ni_check_source(src, secret_label="L", observer="H")

    def test_transfer_through_translations(self, two_point):
        from app.ifc.harness.oracles import ni_transfer_cg2fg, ni_transfer_fg2cg

        fg_src = load_source(str(dict(corpus_cases())["fg_constant_secret"]))
        cg_src = load_source(str(dict(corpus_cases())["cg_tolabeled"]))
        (_, fg_secret), = fg_src.context.items()
        (_, cg_secret), = cg_src.context.items()

        fg_cfg = NIConfig(secret_type=fg_secret, secret_label=two_point.top, observer=two_point.bottom, samples=10)
        cg_cfg = NIConfig(secret_type=cg_secret, secret_label=two_point.top, observer=two_point.bottom, samples=10)

        assert ni_transfer_fg2cg(fg_src.body, fg_cfg).status == "pass"
        assert ni_transfer_cg2fg(cg_src.body, cg_cfg).status == "pass"


class TestShrink:
    """Tests for greedy subterm minimization."""

    def test_shrinks_to_smallest_failing_subterm(self, parse_fg):
        from app.ifc.harness.oracles import shrink_fg

        e = parse_fg("(if (deref r) (not (deref (fst p))) false)")

        small = shrink_fg(e, lambda c: isinstance(c, fg.Deref))

        assert small == parse_fg("(deref r)")

    def test_keeps_program_when_no_subterm_fails(self, parse_fg):
        from app.ifc.harness.oracles import shrink_fg

        e = parse_fg("(not true)")

        assert shrink_fg(e, lambda c: False) is e


class TestReplayStore:
    """Tests for replay persistence."""

    def test_save_writes_loadable_program(self, tmp_path):
        from app.ifc.harness.storage import ReplayStore, read_header
        from app.ifc.surface.parser import parse

        store = ReplayStore(str(tmp_path), stamp="run1")
        src = parse("(fg (ctx (x bool@H)) (if x true false))")
        verdict = failed("ni-fg", samples=1, program="(if x true false)", v1="true", v2="false", seed=9)

        path = store.save(0, src, verdict, {"lang": "fg"})

        assert path == tmp_path / "run1" / "0.ifc"
        header = read_header(str(path))
        assert header["case"] == "0"
        assert header["oracle"] == "ni-fg"
        assert header["seed"] == "9"
        assert "program" not in header
        assert load_source(str(path)).body == src.body
        assert store.saved == [path]


class TestFuzz:
    """Tests for the fuzz driver."""

    @pytest.mark.parametrize("lang,direction", [("fg", None), ("fg", "fg2cg"), ("cg", None), ("cg", "cg2fg")])
    def test_small_runs_pass(self, tmp_path, lang, direction):
        from app.ifc.harness.fuzz import run_fuzz

        summary = run_fuzz(lang, direction, n=4, size=12, seed=11, workers=1, replay_dir=str(tmp_path))

        assert summary.ok, summary.records()
        assert summary.cases + summary.skipped == 4
        assert summary.replays == []

    def test_same_seed_same_summary(self, tmp_path):
        from app.ifc.harness.fuzz import run_fuzz

        first = run_fuzz("cg", "cg2fg", n=3, size=10, seed=5, workers=1, replay_dir=str(tmp_path))
        second = run_fuzz("cg", "cg2fg", n=3, size=10, seed=5, workers=1, replay_dir=str(tmp_path))

        assert first.records() == second.records()

    def test_direction_must_match_language(self):
        from app.ifc.harness.fuzz import run_fuzz

        with pytest.raises(ValueError):
            run_fuzz("fg", "cg2fg", n=1)

    def test_broken_translation_is_caught(self, tmp_path, monkeypatch):
        """Test that a translator returning a constant is reported with replays."""
        from app.ifc.harness import oracles
        from app.ifc.harness.fuzz import run_fuzz
        from app.ifc.harness.storage import read_header
        from app.ifc.translate.result import TransResult

        def broken(ctx, pc, e):
            return TransResult(cg.UnitLit(), fg_typecheck(ctx, pc, e), cg.TSlio(pc, pc.lattice.bottom, cg.TUnit()))

        monkeypatch.setattr(oracles, "fg2cg_expr", broken)

        summary = run_fuzz("fg", "fg2cg", n=3, size=10, seed=2, workers=1, replay_dir=str(tmp_path))

        assert summary.failures > 0
        assert summary.oracles["typing-fg2cg"].get("counterexample", 0) == summary.cases
        header = read_header(summary.replays[0])
        assert header["status"] == "counterexample"
        assert header["lang"] == "fg"

    def test_parallel_run_matches_serial(self, tmp_path):
        """Test that a process pool gives the same summary as one worker."""
        from app.ifc.harness.fuzz import run_fuzz

        serial = run_fuzz("fg", "fg2cg", n=4, size=10, seed=8, workers=1, replay_dir=str(tmp_path))
        parallel = run_fuzz("fg", "fg2cg", n=4, size=10, seed=8, workers=2, replay_dir=str(tmp_path))

        assert parallel.records() == serial.records()

    def test_case_error_is_a_failure_not_a_crash(self, tmp_path, monkeypatch):
        """Test that a library error escaping a case is counted and the sweep goes on."""
        from app.ifc.core.errors import FGTypeError
        from app.ifc.harness import fuzz

        def broken(rng, lattice, depth):
            raise FGTypeError("FG-if", "branch types have no common supertype")

        monkeypatch.setattr(fuzz, "gen_fg_type", broken)

        summary = fuzz.run_fuzz("fg", None, n=3, size=8, seed=1, workers=1, replay_dir=str(tmp_path))

        assert summary.failures == summary.cases > 0
        assert summary.oracles["case-error"] == {"counterexample": summary.cases}
        assert summary.replays == []
        assert not summary.ok

    def test_timed_out_closed_program_is_regenerated(self):
        from app.ifc.core.errors import EvalTimeout
        from app.ifc.harness.fuzz import CaseTask, _terminating

        task = CaseTask(0, 1, "fg", "fg2cg", 10, "2pt")
        runs = iter([EvalTimeout(10), None])

        def run(e):
            outcome = next(runs)
            if outcome is not None:
                raise outcome

        assert _terminating(task, "first", lambda: "second", run) == ("second", True)

    def test_nonterminating_run_fails(self, tmp_path, monkeypatch):
        """Test that closed programs which never finish fail the run after bounded regeneration."""
        from app.ifc.core.config import HarnessConfig
        from app.ifc.core.errors import EvalTimeout
        from app.ifc.harness import fuzz

        calls = []

        def never_finishes(heap, e):
            calls.append(e)
            raise EvalTimeout(1)

        monkeypatch.setattr(fuzz, "fg_eval", never_finishes)

        summary = fuzz.run_fuzz("fg", "fg2cg", n=2, size=8, seed=3, workers=1, replay_dir=str(tmp_path))

        assert summary.closed == summary.cases > 0
        assert summary.terminated == 0
        assert f"terminated=0/{summary.closed}" in summary.records()
        assert len(calls) >= summary.cases * (HarnessConfig.TERMINATION_RETRIES + 1)
        assert not summary.ok

    def test_termination_threshold(self):
        from app.ifc.harness.fuzz import FuzzSummary

        low = FuzzSummary(lang="fg", direction="fg2cg", n=20, size=10, seed=0, cases=20, closed=20, terminated=18)
        enough = FuzzSummary(lang="fg", direction="fg2cg", n=20, size=10, seed=0, cases=20, closed=20, terminated=19)

        assert "terminated=18/20" in low.records()
        assert not low.ok
        assert enough.ok
        assert FuzzSummary(lang="cg", n=0, size=10, seed=0).ok
