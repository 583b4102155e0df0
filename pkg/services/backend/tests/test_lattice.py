"""
Tests for security lattices and label syntax.
"""
import pytest
from hypothesis import given, settings, strategies as st

from app.ifc.core.errors import LabelSyntaxError, LatticeMismatchError
from app.ifc.core.lattice import join, leq, meet, parse_lattice

LATTICES = ["2pt", "(powerset a b)", "(powerset a b c)", "(product 2pt (powerset a b))"]


def _labels(lattice):
    return st.sampled_from(lattice.elements())


class TestParseLattice:
    """Tests for lattice descriptions."""

    def test_two_point(self):
        """Test that 2pt has two ordered elements."""
        lattice = parse_lattice("2pt")

        assert [str(l) for l in lattice.elements()] == ["L", "H"]
        assert lattice.bottom.leq(lattice.top)
        assert not lattice.top.leq(lattice.bottom)

    def test_powerset_size(self):
        """Test that a powerset lattice has 2^n elements."""
        assert len(parse_lattice("(powerset a b c)").elements()) == 8

    def test_product_components(self, two_point):
        """Test that product labels are ordered componentwise."""
        lattice = parse_lattice("(product 2pt (powerset a b))")

        mixed = lattice.label("(H,{a})")
        other = lattice.label("(L,{a,b})")
        assert not mixed.leq(other)
        assert not other.leq(mixed)
        assert str(mixed.join(other)) == "(H,{a,b})"
        assert str(mixed.meet(other)) == "(L,{a})"

    @pytest.mark.parametrize("text", LATTICES)
    def test_describe_round_trips(self, text):
        """Test that describe() re-parses to an equal lattice."""
        lattice = parse_lattice(text)

        assert parse_lattice(lattice.describe()) == lattice

    @pytest.mark.parametrize("text", ["", "3pt", "(powerset a a)", "(powerset a", "(product 2pt)", "2pt 2pt"])
    def test_malformed_descriptions_rejected(self, text):
        """Test that malformed descriptions raise LabelSyntaxError."""
        with pytest.raises(LabelSyntaxError):
            parse_lattice(text)


class TestLabels:
    """Tests for label parsing and combination."""

    def test_bot_and_top_aliases(self, powerset_ab):
        """Test that bot/top name the extremes of any lattice."""
        assert powerset_ab.label("bot") == powerset_ab.bottom
        assert powerset_ab.label("top") == powerset_ab.label("{a,b}")
        assert str(powerset_ab.bottom) == "bot"

    def test_unknown_atom_rejected(self, powerset_ab):
        """Test that labels naming unknown atoms are rejected."""
        with pytest.raises(LabelSyntaxError):
            powerset_ab.label("{c}")

    def test_two_point_rejects_other_names(self, two_point):
        with pytest.raises(LabelSyntaxError):
            two_point.label("M")

    def test_mixing_lattices_raises(self, two_point, powerset_ab):
        """Test that labels of different lattices cannot be combined."""
        with pytest.raises(LatticeMismatchError):
            two_point.top.join(powerset_ab.top)
        with pytest.raises(LatticeMismatchError):
            leq(two_point.bottom, powerset_ab.bottom)

    def test_join_and_meet_free_functions(self, low, high):
        assert join(low, high) == high
        assert meet(low, high) == low
        assert leq(low, high)

    def test_join_all_of_nothing_is_bottom(self, powerset_ab):
        assert powerset_ab.join_all([]) == powerset_ab.bottom
        assert powerset_ab.meet_all([]) == powerset_ab.top


class TestLatticeLaws:
    """Property tests for the lattice laws on every supported instance."""

    @pytest.mark.parametrize("text", LATTICES)
    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_join_is_least_upper_bound(self, text, data):
        """Test that join is an upper bound below every other upper bound."""
        lattice = parse_lattice(text)
        a, b, c = (data.draw(_labels(lattice)) for _ in range(3))

        j = a.join(b)
        assert a.leq(j) and b.leq(j)
        if a.leq(c) and b.leq(c):
            assert j.leq(c)

    @pytest.mark.parametrize("text", LATTICES)
    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_meet_is_greatest_lower_bound(self, text, data):
        """Test that meet is a lower bound above every other lower bound."""
        lattice = parse_lattice(text)
        a, b, c = (data.draw(_labels(lattice)) for _ in range(3))

        m = a.meet(b)
        assert m.leq(a) and m.leq(b)
        if c.leq(a) and c.leq(b):
            assert c.leq(m)

    @pytest.mark.parametrize("text", LATTICES)
    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_order_is_antisymmetric_and_bounded(self, text, data):
        lattice = parse_lattice(text)
        a, b = data.draw(_labels(lattice)), data.draw(_labels(lattice))

        assert lattice.bottom.leq(a) and a.leq(lattice.top)
        if a.leq(b) and b.leq(a):
            assert a == b

    @pytest.mark.parametrize("text", LATTICES)
    def test_labels_print_and_reparse(self, text):
        """Test that every label's text parses back to the same label."""
        lattice = parse_lattice(text)

        for label in lattice.elements():
            assert lattice.label(str(label)) == label
