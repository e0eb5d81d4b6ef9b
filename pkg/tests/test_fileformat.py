from importlib import resources

import pytest
from hypothesis import given

from strategies import transducers
from xtt.corpus import BUILTINS, builtin, builtin_source, fixture_document
from xtt.fileformat import FormatError, format_document, format_transducer, parse_document

FIXTURES = {"M1": "m1.xt", "M2": "m2.xt", "M3": "m3.xt", "MNS": "mns.xt", "EX4": "ex4.xt"}


def fixture_text(name):
    return resources.files("xtt").joinpath("fixtures", name).read_text()


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_files_are_canonical(name):
    text = fixture_text(FIXTURES[name])
    assert format_transducer(builtin(name)) == text
    assert builtin_source(name) == text
    assert parse_document(text).transducer() == builtin(name)


@pytest.mark.parametrize("name", ["homs.xt", "bimorphisms.xt"])
def test_other_fixtures_roundtrip(name):
    text = fixture_text(name)
    assert format_document(parse_document(text)) == text


def test_fixture_document():
    doc = fixture_document("homs.xt")
    assert sorted(doc.homs) == ["del_m2", "del_m3", "id_m2", "id_m3", "rel_m2", "rel_m3"]


@pytest.mark.parametrize(
    "text, line",
    [
        ("transducer T\ninput alpha/0\noutput alpha/0\nstates q\ninitial q\nrule alpha -[q] alpha\n", 6),
        ("transducer T\ninput alpha/0\noutput alpha/0\nstates q\ninitial q\nrule beta -[q]-> alpha\n", 6),
        ("transducer T\ninput alpha/0\nbogus line\n", 3),
        ("automaton A\nalphabet alpha/0\nstates u\nfinal v\ntrans alpha -> u\n", 4),
        ("transducer T\ninput alpha/0\noutput alpha/0\nstates q\ninitial q\nlookahead q = nothere\n", 6),
    ],
)
def test_format_errors_carry_line(text, line):
    with pytest.raises(FormatError) as info:
        parse_document(text)
    assert info.value.line == line


def test_grouped_rule_line_expands():
    M = parse_document(builtin_source("M3")).transducer()
    gamma_rules = [r for r in M.rules if r.lhs.label == "gamma"]
    assert sorted(r.state for r in gamma_rules) == ["id", "id1", "p"]


def test_comments_and_blank_lines():
    text = "# a comment\n\n" + builtin_source("MNS").replace("initial star\n", "initial star  # start\n")
    assert parse_document(text).transducer() == builtin("MNS")


@given(transducers())
def test_random_transducer_roundtrip(M):
    text = format_document(parse_document(format_transducer(M)))
    back = parse_document(text).transducer()
    assert back == M
    assert format_transducer(back) == format_transducer(M)
