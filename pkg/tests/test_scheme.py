import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from kakutani import scheme as sch
from kakutani.errors import ConfigError, DegenerateBlock, MassNotOne
from kakutani.scheme import Atom, GeoTail, build_scheme

from oracles import symbol_table
from schemes import schemes


def test_bundled_masses_are_one():
    for name in sch.BUNDLED:
        s = sch.bundled(name)
        assert sum((b.mass for b in s.blocks), Fraction(0)) == 1


def test_mass_not_one_rejected():
    with pytest.raises(MassNotOne):
        build_scheme([Atom(Fraction(1, 2)), Atom(Fraction(1, 3))])


@pytest.mark.parametrize(
    "block",
    [
        lambda: Atom(Fraction(0)),
        lambda: Atom(Fraction(1)),
        lambda: GeoTail(Fraction(1, 2), Fraction(1)),
        lambda: GeoTail(Fraction(3, 4), Fraction(1, 2)),
    ],
)
def test_degenerate_blocks(block):
    with pytest.raises(DegenerateBlock):
        block()


def test_floats_refused():
    with pytest.raises(ConfigError):
        sch.as_fraction(0.5)


def test_tail_direction_validated():
    with pytest.raises(ConfigError):
        GeoTail(Fraction(1, 2), Fraction(1, 2), "sideways")


def test_fig3_tail_geometry():
    s = sch.bundled("fig3")
    # depth d has length 3^-(d+1) and starts at 1 - 3^-d / 2
    for d in range(6):
        assert s.alpha((1, d)) == Fraction(1, 3 ** (d + 1))
        assert s.left((1, d)) == 1 - Fraction(1, 2 * 3**d)


def test_descending_tail_shrinks_to_the_left():
    s = sch.bundled("binary-tail-desc")
    assert s.left((0, 0)) == Fraction(1, 2)
    assert s.left((0, 1)) == Fraction(1, 4)
    assert s.zero_symbol is None


@given(schemes())
@settings(max_examples=60, deadline=None)
def test_symbols_match_block_layout(s):
    lam = Fraction(1, 200)
    assert s.symbols_at_least(lam) == symbol_table(s, lam)


@given(schemes())
@settings(max_examples=60, deadline=None)
def test_json_round_trip(s):
    assert sch.loads(sch.dumps(s)) == s


def test_inline_parse():
    s = sch.parse_inline("1/2, geo(1/3,1/3)")
    assert s == sch.bundled("fig3")
    assert sch.parse_inline("1/2,1/3,1/6") == sch.bundled("sixths")
    assert sch.parse_inline("geo(1/2,1/2,desc)") == sch.bundled("binary-tail-desc")


@pytest.mark.parametrize("text", ["", "1/2,,1/2", "1/2;1/2", "geo(1/2)", "abc"])
def test_inline_parse_errors(text):
    with pytest.raises(ConfigError):
        sch.parse_inline(text)


def test_strict_fields():
    d = sch.scheme_to_dict(sch.bundled("dyadic"))
    d["colour"] = "red"
    with pytest.raises(ConfigError):
        sch.scheme_from_dict(d)
    d = sch.scheme_to_dict(sch.bundled("dyadic"))
    d["schema_version"] = 2
    with pytest.raises(ConfigError):
        sch.loads(json.dumps(d))
    with pytest.raises(ConfigError):
        sch.loads("{not json")


def test_resolve_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(sch.dumps(sch.bundled("eighths")))
    assert sch.resolve(str(p)) == sch.bundled("eighths")
    with pytest.raises(ConfigError):
        sch.bundled("nope")


def test_word_helpers():
    s = sch.bundled("third")
    w = ((1, 0), (1, 0), (0, 0))
    assert sch.word_alpha(s, w) == Fraction(4, 27)
    assert sch.word_left_endpoint(s, w) == Fraction(1, 3) + Fraction(2, 3) * Fraction(1, 3)
