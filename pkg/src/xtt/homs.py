"""Tree homomorphisms, their properties, preimages and bimorphisms."""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .terms import RankedAlphabet, Tree, substitute

__all__ = [
    "TreeHomomorphism",
    "Bimorphism",
    "HomError",
    "apply_hom",
    "classify_hom",
    "preimage_patterns",
    "evaluate_bimorphism",
    "identity_hom",
    "var_index",
]

_XVAR = re.compile(r"x([1-9][0-9]*)\Z")


class HomError(ValueError):
    pass


def var_index(name: str) -> int | None:
    m = _XVAR.match(name)
    return int(m.group(1)) if m else None


@dataclass(frozen=True)
class TreeHomomorphism:
    name: str
    source: RankedAlphabet
    target: RankedAlphabet
    images: Mapping[str, Tree]

    def __post_init__(self):
        images = dict(self.images)
        missing = [s for s in self.source if s not in images]
        if missing:
            raise HomError(f"homomorphism {self.name}: no image for {', '.join(missing)}")
        extra = [s for s in images if s not in self.source]
        if extra:
            raise HomError(f"homomorphism {self.name}: image for unknown symbol {', '.join(extra)}")
        for sym, image in images.items():
            k = self.source.rank(sym)
            for _, node in image.walk():
                if node.is_var:
                    i = var_index(node.label)
                    if i is None or i > k:
                        raise HomError(f"image of {sym} uses variable {node.label} beyond rank {k}")
                elif node.label not in self.target or self.target.rank(node.label) != node.rank:
                    raise HomError(f"image of {sym} uses {node.label}/{node.rank} outside the target alphabet")
        # keep source order for formatting
        object.__setattr__(self, "images", {s: images[s] for s in self.source})

    def __hash__(self):
        return hash((self.name, self.source, self.target, tuple(self.images.items())))


def identity_hom(alphabet: RankedAlphabet, name: str = "id") -> TreeHomomorphism:
    images = {
        s: Tree(s, [Tree.var(f"x{i}") for i in range(1, r + 1)]) for s, r in alphabet.items()
    }
    return TreeHomomorphism(name, alphabet, alphabet, images)


def apply_hom(h: TreeHomomorphism, t: Tree) -> Tree:
    """The induced mapping; variable (state) leaves are left unchanged."""
    if t.is_var:
        return t
    if t.label not in h.source or h.source.rank(t.label) != t.rank:
        raise HomError(f"symbol {t.label}/{t.rank} is not in the source alphabet of {h.name}")
    kids = [apply_hom(h, c) for c in t.children]
    return substitute(h.images[t.label], {f"x{i}": u for i, u in enumerate(kids, 1)})


def _var_counts(image: Tree) -> Counter:
    return Counter(n.label for _, n in image.walk() if n.is_var)


def classify_hom(h: TreeHomomorphism) -> frozenset:
    props = {"linear", "complete", "strict", "delabeling"}
    for sym, image in h.images.items():
        k = h.source.rank(sym)
        counts = _var_counts(image)
        if any(n > 1 for n in counts.values()):
            props.discard("linear")
        if any(counts[f"x{i}"] == 0 for i in range(1, k + 1)):
            props.discard("complete")
        if image.is_var:
            props.discard("strict")
        elif not all(c.is_var for c in image.children):
            props.discard("delabeling")
    return frozenset(props)


def preimage_patterns(d: TreeHomomorphism, pattern: Tree, fresh_budget: int) -> frozenset:
    """All l with d(l) = pattern and as many symbol nodes as pattern.

    Child slots that ``d`` deletes get fresh state leaves named "1", "2", …
    numbered left to right in pre-order.
    """
    props = classify_hom(d)
    if not {"linear", "strict", "delabeling"} <= props:
        raise HomError("preimage_patterns needs a linear, strict delabeling homomorphism")
    by_root: dict[str, list[tuple[str, tuple[int | None, ...]]]] = {}
    for sym, image in d.images.items():
        k = d.source.rank(sym)
        slot = [None] * k  # source child index -> pattern child index
        for j, c in enumerate(image.children):
            slot[var_index(c.label) - 1] = j
        by_root.setdefault(image.label, []).append((sym, tuple(slot)))

    hole = Tree.var("\0fresh")

    def pre(p: Tree) -> list[Tree]:
        if p.is_var:
            return [p]
        out = []
        kid_options = [pre(c) for c in p.children]
        for sym, slot in by_root.get(p.label, ()):
            pools = [kid_options[j] if j is not None else [hole] for j in slot]
            for kids in itertools.product(*pools):
                out.append(Tree(sym, kids))
        return out

    result = set()
    for cand in pre(pattern):
        counter = itertools.count(1)
        names: list[str] = []

        def number(t: Tree) -> Tree:
            if t is hole or (t.is_var and t.label == hole.label):
                name = str(next(counter))
                names.append(name)
                return Tree.var(name)
            if t.is_var or not t.children:
                return t
            return Tree(t.label, [number(c) for c in t.children])

        numbered = number(cand)
        if len(names) > fresh_budget:
            raise HomError(f"fresh state budget {fresh_budget} exhausted (needs {len(names)})")
        result.add(numbered)
    return frozenset(result)


@dataclass(frozen=True)
class Bimorphism:
    name: str
    center: "object"  # TreeAutomaton over the shared alphabet
    input_hom: TreeHomomorphism
    output_hom: TreeHomomorphism

    def __post_init__(self):
        if self.input_hom.source != self.center.alphabet or self.output_hom.source != self.center.alphabet:
            raise HomError(f"bimorphism {self.name}: homomorphisms must share the center alphabet")


def evaluate_bimorphism(B: Bimorphism, max_center_size: int) -> frozenset:
    from .automata import enumerate_trees

    return frozenset(
        (apply_hom(B.input_hom, s), apply_hom(B.output_hom, s))
        for s in enumerate_trees(B.center, max_center_size)
    )
