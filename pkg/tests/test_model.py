import pytest
from hypothesis import given, strategies as st

from xtt.corpus import BUILTINS, builtin
from xtt.fileformat import parse_document
from xtt.model import FLAGS, ModelError, Rule, classify, rule_links, validate
from xtt.terms import parse_term, positions, var_positions, variables

EXPECTED = {
    "M1": {"eps_free", "delabeling", "top_down_la"},
    "M2": {"eps_free", "strict", "nondeleting", "la_trivial"},
    "M3": {"eps_free", "strict", "nondeleting", "la_trivial"},
    "MNS": {"eps_free", "nondeleting", "la_trivial"},
    "EX4": {"eps_free", "strict"},
}


def rule(text_l, q, text_r, states):
    return Rule(parse_term(text_l, states=states), q, parse_term(text_r, states=states))


def test_example_links():
    r1 = rule("sigma1(p,q)", "star", "sigma1(p,q)", ("p", "q"))
    r2 = rule("sigma(q1,q)", "q", "q", ("q1", "q"))
    assert rule_links(r1, (1,), (2, 1)) == {((1, 1), (2, 1, 1)), ((1, 2), (2, 1, 2))}
    assert rule_links(r2, (1,), (2, 1)) == {((1, 2), (2, 1))}


def test_rule_properties():
    r = rule("sigma(q1,q)", "q", "q", ("q1", "q"))
    assert r.deleted == {"q1"} and not r.is_strict and not r.is_epsilon
    assert rule("q", "p", "gamma(q)", ("q",)).is_epsilon


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_validate_and_classify(name):
    M = builtin(name)
    assert validate(M) == []
    assert classify(M) == EXPECTED[name]


BAD = """\
transducer B
input sigma/2 alpha/0
output sigma/2 alpha/0
states q p
initial q r
rule sigma(q,q) -[q]-> q
rule alpha -[p]-> sigma(p,alpha)
"""


def test_validate_reports_each_violation():
    M = parse_document(BAD).transducer()
    diags = validate(M)
    assert any("initial: r" in d for d in diags)
    assert any("linearity" in d for d in diags)
    assert any("var(r) not contained" in d for d in diags)
    with pytest.raises(ModelError):
        classify(M)


LA_DOC = """\
automaton parity
alphabet sigma/2 alpha/0
states even odd
final even odd
trans alpha -> odd
trans sigma(odd,odd) -> odd
trans sigma(odd,even) -> even
trans sigma(even,odd) -> even
trans sigma(even,even) -> odd

transducer T
input sigma/2 alpha/0
output alpha/0
states q p
initial q
rule sigma(p,q) -[q]-> q\nrule alpha -[q]-> alpha
lookahead p = parity
"""


def test_lookahead_trivial_by_enumeration():
    # not the universal builder, yet accepts everything: found by the bounded check
    doc = parse_document(LA_DOC)
    M = doc.transducer("T")
    assert "la_trivial" in classify(M)
    assert validate(M) == []


def test_lookahead_nontrivial():
    assert "la_trivial" not in classify(builtin("M1"))


@given(st.sampled_from(BUILTINS), st.randoms(use_true_random=False))
def test_classify_ignores_rule_order(name, rnd):
    M = builtin(name)
    rules = list(M.rules)
    rnd.shuffle(rules)
    assert classify(M.replace(rules=tuple(rules))) == classify(M)


@given(st.sampled_from([r for n in BUILTINS for r in builtin(n).rules]))
def test_rule_links_bijection(r):
    links = rule_links(r)
    lpos = var_positions(r.lhs)
    rpos = var_positions(r.rhs)
    assert {v for v, _ in links} == {lpos[p] for p in variables(r.rhs)}
    assert sorted(w for _, w in links) == sorted(rpos.values())
    assert len({v for v, _ in links}) == len(links) == len({w for _, w in links})


def test_flags_constant():
    assert FLAGS[0] == "eps_free" and len(set(FLAGS)) == len(FLAGS)
    assert positions(parse_term("alpha")) == {()}
