"""Built-in transducers and the tree families used by the witnesses.

Name mapping to the usual notation: ``star`` is ⋆, ``q1`` is q′,
``id1`` is id′; ``sigma1``/``sigma2``/``gamma1``/``gamma2`` carry their
index as a suffix.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .fileformat import Document, parse_document
from .model import Transducer
from .terms import Tree

__all__ = [
    "BUILTINS",
    "builtin",
    "builtin_source",
    "fixture_document",
    "EXAMPLE_INPUT",
    "FIGURE_TREE",
    "generate_L",
    "is_member_L",
    "witness_tree",
    "WitnessCapExceeded",
    "WITNESS_NODE_CAP",
]

BUILTINS = ("M1", "M2", "M3", "MNS", "EX4")

# the input tree of the worked derivation with the 10-link dependency
EXAMPLE_INPUT = "sigma1(gamma1(sigma2(alpha,alpha)),gamma2(sigma(gamma(alpha),sigma2(alpha,alpha))))"

# all-binary tree whose branching nodes are the twelve printed level-0 positions
FIGURE_TREE = (
    "sigma(sigma(sigma(alpha,sigma(sigma(sigma(alpha,alpha),alpha),alpha)),"
    "sigma(sigma(alpha,alpha),alpha)),sigma(sigma(sigma(sigma(alpha,alpha),alpha),alpha),alpha))"
)

_SOURCES = {
    "M1": """\
transducer M1
input sigma/2 gamma1/1 gamma2/1 sigma1/2 sigma2/2 gamma/1 alpha/0
output sigma1/2 sigma2/2 gamma/1 alpha/0
states star p q q1 id id1
initial star
rule sigma1(p,q) -[star,p]-> sigma1(p,q)
rule sigma2(id,id1) -[p,q]-> sigma2(id,id1)
rule gamma1(p) -[p]-> p
rule sigma(q,id) -[q]-> q
rule sigma(q1,q) -[q]-> q
rule gamma2(q) -[q]-> q
rule gamma(id) -[id,id1]-> gamma(id)
rule alpha -[id,id1]-> alpha
lookahead q1 = lacks sigma2
""",
    "M2": """\
transducer M2
input sigma1/2 sigma2/2 gamma/1 alpha/0
output sigma/2 gamma/1 alpha/0
states star id id1
initial star
rule sigma1(star,sigma2(id,id1)) -[star]-> sigma(sigma(star,id),id1)
rule sigma2(id,id1) -[star]-> sigma(id,id1)
rule gamma(id) -[id,id1]-> gamma(id)
rule alpha -[id,id1]-> alpha
""",
    "M3": """\
transducer M3
input sigma/2 gamma/1 alpha/0
output sigma1/2 sigma2/2 gamma/1 alpha/0
states star p id id1
initial star
rule sigma(p,id) -[star]-> sigma1(p,id)
rule sigma(sigma(p,id),id1) -[p]-> sigma1(p,sigma2(id,id1))
rule gamma(id) -[id,id1,p]-> gamma(id)
rule alpha -[id,id1]-> alpha
""",
    "MNS": """\
transducer MNS
input sigma/2 alpha/0
output sigma/2 alpha/0
states star q
initial star
rule sigma(star,alpha) -[star,q]-> star
rule sigma(star,q) -[star,q]-> sigma(star,q)
rule alpha -[star]-> alpha
""",
    "EX4": """\
transducer EX4
input sigma/2 gamma/1 alpha/0
output sigma/2 alpha/0
states q p
initial q p
rule sigma(p,sigma(alpha,q)) -[q]-> sigma(alpha,sigma(q,alpha))
rule alpha -[p]-> alpha
lookahead p = contains gamma
""",
}


def builtin_source(name: str) -> str:
    try:
        return _SOURCES[name]
    except KeyError:
        raise KeyError(f"unknown built-in {name!r}; choose from {', '.join(BUILTINS)}") from None


@lru_cache(maxsize=None)
def builtin(name: str) -> Transducer:
    return parse_document(builtin_source(name)).transducer(name)


def fixture_document(filename: str) -> Document:
    """Parse one of the shipped fixture files (``m1.xt``, ``homs.xt``, ...)."""
    text = resources.files("xtt").joinpath("fixtures", filename).read_text()
    return parse_document(text)


# --- the L_i families ------------------------------------------------------

_ALPHA = Tree("alpha")


def is_member_L(i: int, t: Tree) -> bool:
    """Structural membership in L_i (left sigma-spines over L_{i-1})."""
    if i < 0:
        raise ValueError("i must be >= 0")
    if i == 0:
        return t == _ALPHA
    # walk the left spine: every right child in L_{i-1}, at least one node
    node = t
    depth = 0
    while not node.is_var and node.label == "sigma" and node.rank == 2:
        if not is_member_L(i - 1, node.children[1]):
            return False
        node = node.children[0]
        depth += 1
    return depth >= 1 and node == _ALPHA


def generate_L(i: int, max_size: int) -> frozenset:
    """All members of L_i up to max_size, by closing the contexts C_i."""
    if i < 0 or max_size < 1:
        raise ValueError("need i >= 0 and max_size >= 1")
    if i == 0:
        return frozenset({_ALPHA})
    below = generate_L(i - 1, max_size)
    # a context is kept as the sequence of right children along its spine;
    # plugging contexts into each other concatenates those sequences
    base = {(s,) for s in below if 1 + s.size <= max_size - 1}
    contexts = set(base)
    frontier = set(base)

    def csize(c) -> int:
        return sum(1 + s.size for s in c)

    while frontier:
        new = set()
        for c in frontier:
            for d in base | contexts:
                for e in (c + d, d + c):
                    if e not in contexts and csize(e) + 1 <= max_size:
                        new.add(e)
        contexts |= new
        frontier = new
    out = set()
    for c in contexts:
        t = _ALPHA
        for s in reversed(c):
            t = Tree("sigma", (t, s))
        out.add(t)
    return frozenset(out)


# --- witnesses -------------------------------------------------------------

WITNESS_NODE_CAP = 10**5


class WitnessCapExceeded(ValueError):
    pass


def _spine(right: Tree, length: int, bottom: Tree) -> Tree:
    t = bottom
    for _ in range(length):
        t = Tree("sigma", (t, right))
    return t


def witness_tree(ell: int, n: int, node_cap: int = WITNESS_NODE_CAP) -> Tree:
    """Tree of L_{n+1} with a nonempty level-n position set for distance ell."""
    if ell < 2 or n < 0:
        raise ValueError("need ell >= 2 and n >= 0")
    size = 2 * ell + 1
    for k in range(1, n + 1):
        size = (ell ** (k + 1) + 1) * (1 + size) + 1
        if size > node_cap:
            raise WitnessCapExceeded(f"witness for ell={ell}, n={n} exceeds {node_cap} nodes")
    if size > node_cap:
        raise WitnessCapExceeded(f"witness for ell={ell}, n={n} exceeds {node_cap} nodes")
    t = _spine(_ALPHA, ell, _ALPHA)
    for k in range(1, n + 1):
        c_alpha = Tree("sigma", (_ALPHA, t))
        t = _spine(t, ell ** (k + 1), c_alpha)
    return t
