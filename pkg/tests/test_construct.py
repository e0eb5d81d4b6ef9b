import pytest
from hypothesis import HealthCheck, assume, given, settings

from conftest import make_hom
from strategies import IN, transducers
from xtt.automata import all_trees, enumerate_trees
from xtt.construct import (
    ConstructionError,
    EpsilonCycleError,
    decompose,
    eliminate_epsilon,
    front_state,
    left_compose_hom,
)
from xtt.corpus import builtin, fixture_document
from xtt.derive import StepCapExceeded, pipeline_translate, translate
from xtt.fileformat import parse_document
from xtt.homs import apply_hom
from xtt.model import classify
from xtt.terms import Tree

small = settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def pairs(M, inputs):
    return {(t, u) for t in inputs for _, u in translate(M, t)}


def outputs(M, t):
    return {u for _, u in translate(M, t)}


def chain_pairs(chain, inputs):
    return {(t, u) for t in inputs for u in pipeline_translate(chain, t)}


def test_front_state_names():
    assert front_state(3, ()) == "rho3_e"
    assert front_state(1, (2, 1)) == "rho1_2_1"


def test_ex4_front_rules():
    res = decompose(builtin("EX4"))
    rules = {str(r) for r in res.raw_front.rules if r.state.startswith("rho1_")}
    assert rules == {
        "sigma(rho1_1,rho1_2) -[rho1_e]-> rho1(rho1_2)",
        "sigma(rho1_2_1,rho1_2_2) -[rho1_2]-> at1(rho1_2_2)",
        "alpha -[rho1_2_1]-> at0",
        "rho2_e -[rho1_1]-> rho2_e",
        "rho1_e -[rho1_2_2]-> rho1_e",
    }
    la = res.raw_front.lookahead
    assert la["rho1_1"] == builtin("EX4").la("p")
    assert enumerate_trees(la["rho1_2_1"], 9) == [Tree("alpha")]


def test_decompose_rejects_epsilon_rules():
    M = parse_document("transducer T\ninput alpha/0\noutput alpha/0\nstates q p\ninitial q\nrule p -[q]-> p\nrule alpha -[p]-> alpha\n").transducer()
    with pytest.raises(ConstructionError):
        decompose(M)


STRICT = """\
transducer S
input sigma/2 gamma/1 alpha/0
output delta/2 gamma/1 alpha/0
states q p r
initial q
rule sigma(gamma(p),sigma(r,q)) -[q]-> delta(gamma(q),p)
rule sigma(p,q) -[q]-> delta(q,gamma(p))
rule gamma(r) -[p]-> gamma(gamma(r))
rule alpha -[q,p,r]-> alpha
rule sigma(r,alpha) -[r]-> gamma(r)
lookahead r = lacks sigma
"""


@pytest.mark.parametrize("name", ["MNS", "EX4", "M2", "M3"])
def test_decomposition_semantics_builtins(name):
    M = builtin(name)
    res = decompose(M)
    inputs = all_trees(M.input, 7)
    assert chain_pairs([res.front, res.back], inputs) == pairs(M, inputs)


def test_decomposition_rich_strict_fixture():
    M = parse_document(STRICT).transducer()
    res = decompose(M)
    inputs = all_trees(M.input, 8)
    assert chain_pairs([res.front, res.back], inputs) == pairs(M, inputs)
    assert {"eps_free", "delabeling", "top_down_la"} <= classify(res.front)
    assert {"eps_free", "strict", "nondeleting", "la_trivial"} <= classify(res.back)
    # strict input: the front never emits a bare state
    assert all(not r.rhs.is_var for r in res.front.rules)


@small
@given(transducers(eps=False))
def test_decomposition_random(M):
    res = decompose(M)
    inputs = all_trees(IN, 5)
    assert chain_pairs([res.front, res.back], inputs) == pairs(M, inputs)
    assert {"eps_free", "delabeling"} <= classify(res.front)
    assert {"eps_free", "strict", "nondeleting"} <= classify(res.back)


CYCLIC = """\
transducer C
input sigma/2 alpha/0
output sigma/2 alpha/0
states a b c
initial a
rule b -[a]-> b
rule c -[b]-> sigma(c,alpha)
rule a -[c]-> a
rule alpha -[a]-> alpha
"""


def test_cycle_is_named():
    M = parse_document(CYCLIC).transducer()
    with pytest.raises(EpsilonCycleError) as info:
        eliminate_epsilon(M)
    assert info.value.cycle == ["a", "b", "c", "a"]
    assert "a -> b -> c -> a" in str(info.value)


CHAIN = """\
transducer E
input sigma/2 gamma/1 alpha/0
output sigma/2 gamma/1 alpha/0
states a b c d
initial a
rule b -[a]-> gamma(b)
rule c -[b]-> c
rule d -[b]-> alpha
rule sigma(c,d) -[c]-> sigma(d,c)
rule alpha -[c,d]-> alpha
rule gamma(d) -[d]-> d
lookahead d = contains gamma
"""


def test_chained_elimination():
    M = parse_document(CHAIN).transducer()
    E = eliminate_epsilon(M)
    assert not any(r.is_epsilon for r in E.rules)
    inputs = all_trees(M.input, 7)
    assert pairs(E, inputs) == pairs(M, inputs)


@small
@given(transducers(eps=True))
def test_elimination_random(M):
    try:
        E = eliminate_epsilon(M)
    except EpsilonCycleError:
        assume(False)
    assert "eps_free" in classify(E)
    inputs = all_trees(IN, 5)
    try:
        expect = pairs(M, inputs)
    except StepCapExceeded:
        assume(False)
    assert pairs(E, inputs) == expect


HOMS = fixture_document("homs.xt").homs


@pytest.mark.parametrize("hom, name", [("id_m3", "M3"), ("rel_m3", "M3"), ("del_m3", "M3"), ("del_m2", "M2")])
def test_left_composition(hom, name):
    d, M = HOMS[hom], builtin(name)
    N = left_compose_hom(d, M)
    for s in all_trees(d.source, 7):
        assert outputs(N, s) == outputs(M, apply_hom(d, s))


def test_left_composition_preconditions():
    S = "sigma/2 gamma/1 alpha/0"
    erase = make_hom("e", S, S, sigma="sigma(x1,x2)", gamma="x1", alpha="alpha")
    with pytest.raises(ConstructionError):
        left_compose_hom(erase, builtin("M3"))
    with pytest.raises(ConstructionError):
        left_compose_hom(make_hom("i", "sigma/2 alpha/0", "sigma/2 alpha/0", sigma="sigma(x1,x2)", alpha="alpha"), builtin("MNS"))
    with pytest.raises(ConstructionError):
        left_compose_hom(HOMS["id_m2"], builtin("M3"))


@small
@given(transducers(eps=False))
def test_left_composition_random(M):
    assume("strict" in classify(M))
    S = "sigma/2 eta/2 gamma/1 alpha/0 beta/0"
    d = make_hom("d", S, "sigma/2 gamma/1 alpha/0", sigma="sigma(x2,x1)", eta="gamma(x1)", gamma="gamma(x1)", alpha="alpha", beta="alpha")
    N = left_compose_hom(d, M)
    for s in all_trees(d.source, 5):
        assert outputs(N, s) == outputs(M, apply_hom(d, s))
