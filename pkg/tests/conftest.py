import pytest
from hypothesis import settings, strategies as st

from xtt.terms import RankedAlphabet, Tree

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SIGMA = RankedAlphabet({"sigma": 2, "gamma": 1, "alpha": 0})
SA = RankedAlphabet({"sigma": 2, "alpha": 0})


def trees(alphabet: RankedAlphabet = SIGMA, max_leaves: int = 8):
    leaves = st.sampled_from(alphabet.of_rank(0)).map(Tree)
    inner = [(s, k) for s, k in alphabet.items() if k > 0]

    def extend(children):
        return st.one_of(
            *[st.tuples(*[children] * k).map(lambda cs, s=s: Tree(s, cs)) for s, k in inner]
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def positions_of(t: Tree):
    return st.sampled_from(sorted(w for w, _ in t.walk()))


@pytest.fixture
def sigma():
    return SIGMA


def make_hom(name: str, source: str, target: str, **images: str):
    """Build a homomorphism from its file-format text."""
    from xtt.fileformat import parse_document

    lines = [f"hom {name}", f"source {source}", f"target {target}"]
    lines += [f"map {sym} -> {img}" for sym, img in images.items()]
    return parse_document("\n".join(lines) + "\n").homs[name]
