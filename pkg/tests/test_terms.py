import pytest
from hypothesis import given, strategies as st

from conftest import SIGMA, trees
from xtt.terms import (
    RankedAlphabet,
    TermSyntaxError,
    Tree,
    format_position,
    height,
    is_prefix,
    lca,
    parse_position,
    parse_term,
    positions,
    replace_at,
    sorted_trees,
    subtree_at,
    substitute,
    var_positions,
    variables,
)


def test_parse_and_print():
    t = parse_term("sigma(gamma(alpha), alpha)")
    assert str(t) == "sigma(gamma(alpha),alpha)"
    assert t.size == 4 and height(t) == 3
    assert height(Tree("alpha")) == 1


def test_parse_with_states():
    t = parse_term("sigma(q, alpha)", SIGMA, states=("q",))
    assert variables(t) == {"q"}
    assert var_positions(t) == {"q": (1,)}


@pytest.mark.parametrize("text", ["sigma(alpha)", "delta(alpha)", "sigma(alpha,", "", "sigma(alpha,alpha))"])
def test_parse_errors(text):
    with pytest.raises(TermSyntaxError):
        parse_term(text, SIGMA)


def test_alphabet_rejects_conflicting_rank():
    with pytest.raises(ValueError):
        RankedAlphabet([("a", 0), ("a", 1)])


def test_positions_and_lca():
    t = parse_term("sigma(gamma(alpha),alpha)")
    assert positions(t) == {(), (1,), (1, 1), (2,)}
    assert format_position(()) == "e" and format_position((2, 1)) == "2.1"
    assert parse_position("e") == () and parse_position("1.2") == (1, 2)
    assert lca((1, 2, 1), (1, 2, 3)) == (1, 2)
    assert is_prefix((1,), (1, 2)) and not is_prefix((2,), (1, 2))


def test_substitute_and_replace():
    t = parse_term("sigma(q,p)", states=("q", "p"))
    u = substitute(t, {"q": Tree("alpha")})
    assert str(u) == "sigma(alpha,p)"
    assert str(replace_at(u, (2,), parse_term("gamma(alpha)"))) == "sigma(alpha,gamma(alpha))"
    with pytest.raises(IndexError):
        subtree_at(u, (3,))


def test_sorted_trees_order():
    ts = [parse_term(x) for x in ("sigma(alpha,alpha)", "gamma(alpha)", "alpha")]
    assert [str(t) for t in sorted_trees(ts)] == ["alpha", "gamma(alpha)", "sigma(alpha,alpha)"]


@given(trees())
def test_print_parse_roundtrip(t):
    assert parse_term(str(t), SIGMA) == t


@given(trees())
def test_positions_prefix_closed(t):
    pos = positions(t)
    for w in pos:
        for n in range(len(w)):
            assert w[:n] in pos


@given(trees(), st.data())
def test_replace_then_read_back(t, data):
    w = data.draw(st.sampled_from(sorted(positions(t))))
    u = data.draw(trees(max_leaves=3))
    r = replace_at(t, w, u)
    assert subtree_at(r, w) == u
    assert replace_at(r, w, subtree_at(t, w)) == t


@given(trees(), st.data())
def test_lca_laws(t, data):
    pos = sorted(positions(t))
    a, b, c = (data.draw(st.sampled_from(pos)) for _ in range(3))
    assert lca(a, b) == lca(b, a)
    assert lca(lca(a, b), c) == lca(a, lca(b, c))
    assert is_prefix(lca(a, b), a) and is_prefix(lca(a, b), b)


@given(st.lists(st.integers(1, 4), max_size=5))
def test_position_format_roundtrip(w):
    assert parse_position(format_position(tuple(w))) == tuple(w)


@given(trees(max_leaves=25))
def test_positions_count_is_size(t):
    assert len(positions(t)) == t.size
