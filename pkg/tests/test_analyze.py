import pytest
from hypothesis import given, settings, strategies as st

from conftest import SA, trees
from xtt.analyze import (
    branch_path,
    branch_positions,
    check_level_drop,
    invert,
    is_hierarchical,
    is_input_hierarchical,
    is_output_hierarchical,
    min_bounded_distance,
    sp_levels,
)
from xtt.corpus import FIGURE_TREE
from xtt.terms import RankedAlphabet, is_prefix, parse_position, parse_term, subtree_at


def L(*pairs):
    return frozenset((parse_position(a), parse_position(b)) for a, b in pairs)


def test_hierarchical_examples():
    ok = L(("e", "e"), ("1", "2"), ("1.1", "2.1"))
    assert is_hierarchical(ok)
    crossing = L(("e", "e"), ("1", "2.1"), ("1.1", "2"))
    assert not is_input_hierarchical(crossing)
    # one input position linked to two incomparable outputs
    split = L(("e", "e"), ("1", "1"), ("1", "2"))
    assert not is_input_hierarchical(split) and is_output_hierarchical(split)
    assert invert(invert(split)) == split


def test_bounded_distance():
    D = L(("e", "e"), ("1.1", "1"), ("1.1.2.1", "1.1"))
    assert min_bounded_distance([D], "input") == 2
    assert min_bounded_distance([D], "output") == 1
    assert min_bounded_distance([], "input") == 0
    with pytest.raises(ValueError):
        min_bounded_distance([D], "middle")


def literal_distance_ok(D, k):
    src = {v for v, _ in D}
    for v in src:
        for x in src:
            if len(v) < len(x) and is_prefix(v, x):
                if not any(v + x[len(v):n] in src for n in range(len(v) + 1, min(len(x), len(v) + k) + 1)):
                    return False
    return True


link_sets = st.sets(
    st.tuples(st.lists(st.integers(1, 2), max_size=4).map(tuple), st.lists(st.integers(1, 2), max_size=3).map(tuple)),
    max_size=6,
)


@given(link_sets)
def test_min_distance_is_least(D):
    k = min_bounded_distance([D])
    assert literal_distance_ok(D, k)
    if k > 0:
        assert not literal_distance_ok(D, k - 1)


def test_branch_sets():
    t = parse_term("sigma(gamma(sigma(alpha,alpha)),alpha)")
    assert branch_positions(t) == {((), 1, 2), ((), 2, 1), ((1, 1), 1, 2), ((1, 1), 2, 1)}
    assert branch_path(t, (), (1, 1, 2)) == {(), (1, 1)}
    with pytest.raises(IndexError):
        branch_path(t, (), (3,))


def digits(*names):
    # compact spelling: "1121" is position 1.1.2.1
    return {tuple(int(c) for c in x) if x != "e" else () for x in names}


def test_figure_levels():
    rep = sp_levels(parse_term(FIGURE_TREE), 2, 2)
    assert rep.sp[0] == digits("e", "1", "11", "112", "1121", "11211", "12", "121", "2", "21", "211", "2111")
    assert rep.sp[1] == digits("e", "1")
    assert rep.sp[2] == set()


# --- literal evaluator, straight from the inductive definition, no sharing ---


def lit_branch(t):
    return branch_positions(t)


def lit_sp(t, ell, n):
    return frozenset(w for w, _, _ in lit_ssp(t, ell, n))


def lit_ssp(t, ell, n):
    br = lit_branch(t)
    if n == 0:
        return br
    here = lit_sp(t, ell, n - 1)
    branching = {w for w, _, _ in br}
    out = set()
    for w, i, j in br:
        good = []
        for c in (i, j):
            wc = w + (c,)
            sub = subtree_at(t, wc)
            found = False
            for w1 in lit_sp(sub, ell, n - 1):
                path = {wc + w1[:m] for m in range(len(w1) + 1)} & branching
                if len(path & here) >= ell**n:
                    found = True
                    break
            good.append(found)
        if all(good):
            out.add((w, i, j))
    return frozenset(out)


RANK3 = RankedAlphabet({"tau": 3, "sigma": 2, "gamma": 1, "alpha": 0})


@settings(max_examples=40, deadline=None)
@given(st.one_of(trees(SA, max_leaves=13), trees(RANK3, max_leaves=9)), st.integers(1, 3))
def test_sp_matches_literal_definition(t, ell):
    if t.size > 25:
        return
    rep = sp_levels(t, ell, 2)
    for n in range(3):
        assert rep.ssp[n] == lit_ssp(t, ell, n), n


@settings(max_examples=80, deadline=None)
@given(trees(SA, max_leaves=20), st.integers(1, 3))
def test_sp_monotone(t, ell):
    rep = sp_levels(t, ell, 3)
    for n in range(3):
        assert rep.ssp[n + 1] <= rep.ssp[n]
        assert rep.sp[n + 1] <= rep.sp[n]


def test_level_drop_identity_pairs():
    ts = [parse_term(FIGURE_TREE), parse_term("sigma(alpha,alpha)")]
    assert check_level_drop([(t, t) for t in ts], 2, 0) == frozenset()
    assert check_level_drop([(t, t) for t in ts], 2, 1) == frozenset()


def test_level_drop_detects_collapse():
    t = parse_term(FIGURE_TREE)
    bad = check_level_drop([(t, parse_term("alpha"))], 2, 0)
    assert bad == {(t, parse_term("alpha"))}


def test_report_format():
    rep = sp_levels(parse_term("sigma(alpha,alpha)"), 2, 1)
    assert rep.format() == "SP^2_0: {e}\nSP^2_1: {}"
    assert rep.to_json()["levels"][0]["ssp"] == [["e", 1, 2], ["e", 2, 1]]


@pytest.mark.parametrize("name, size", [("B1", 15), ("B2", 12)])
def test_level_drop_on_larger_centers(name, size):
    # at centers <= 8 no input reaches level 1, so check a range where some do
    from xtt.corpus import fixture_document
    from xtt.homs import evaluate_bimorphism
    from xtt.terms import height

    B = fixture_document("bimorphisms.xt").bimorphisms[name]
    ell = 1 + max(height(img) for img in B.input_hom.images.values())
    pairs = evaluate_bimorphism(B, size)
    assert any(sp_levels(t, ell, 1).sp[1] for t, _ in pairs)
    assert check_level_drop(pairs, ell, 0) == frozenset()


def test_example_links_distance_and_hierarchy():
    from xtt.corpus import EXAMPLE_INPUT, builtin
    from xtt.derive import translate

    M = builtin("M1")
    ((D, _),) = translate(M, parse_term(EXAMPLE_INPUT, M.input))
    assert is_hierarchical(D)
    # every nested source pair has an intermediate link one step below the upper one
    assert min_bounded_distance([D], "input") == 1
    assert min_bounded_distance([D], "output") == 1
