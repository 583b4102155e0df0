"""
Tests for the exception hierarchy.
"""
import pickle

import pytest

from app.ifc.core.errors import CGTypeError, EvalTimeout, FGTypeError, ParseError


class TestErrorMessages:
    """Tests for rendered error messages."""

    def test_type_error_names_rule_and_position(self):
        assert str(FGTypeError("FG-if", "no common supertype", (1, 2))) == "[FG-if] at 1:2 no common supertype"
        assert str(CGTypeError("CG-bind", "taint too high")) == "[CG-bind] taint too high"

    def test_parse_error_position(self):
        assert str(ParseError("unclosed list", 3, 7)) == "3:7: unclosed list"

    def test_timeout_message(self):
        assert str(EvalTimeout(500)) == "evaluation timed out after 500 steps (fuel)"


class TestErrorsCrossProcesses:
    """Tests that errors survive the trip out of a worker process."""

    @pytest.mark.parametrize("exc", [
        FGTypeError("FG-if", "boom", (1, 2)),
        CGTypeError("CG-sub", "too low"),
        ParseError("unclosed list", 3, 7),
        EvalTimeout(12, "depth"),
    ])
    def test_pickle_keeps_fields(self, exc):
        restored = pickle.loads(pickle.dumps(exc))

        assert type(restored) is type(exc)
        assert str(restored) == str(exc)
        assert vars(restored) == vars(exc)
