"""Bottom-up nondeterministic finite tree automata.

States are arbitrary hashable values; ``renumber`` turns them into short
strings for file output.  Automata are never determinized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Mapping

from .terms import RankedAlphabet, Tree, format_position, sorted_trees, tree_key

__all__ = [
    "TreeAutomaton",
    "AlphabetMismatch",
    "accepts",
    "run",
    "intersect",
    "is_empty",
    "inverse_hom_image",
    "substitute_regular",
    "enumerate_trees",
    "all_trees",
    "universal",
    "singleton",
    "contains_symbol",
    "lacks_symbol",
    "is_structurally_universal",
    "languages_agree",
    "trim",
]


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TreeAutomaton:
    alphabet: RankedAlphabet
    states: frozenset
    final: frozenset
    transitions: frozenset  # of (symbol, tuple of states, target)
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if not self.final <= self.states:
            raise ValueError("final states must be declared states")
        for sym, args, target in self.transitions:
            if sym not in self.alphabet:
                raise ValueError(f"transition on unknown symbol {sym!r}")
            if self.alphabet.rank(sym) != len(args):
                raise ValueError(f"transition {sym}{args} has wrong arity")
            if target not in self.states or any(a not in self.states for a in args):
                raise ValueError(f"transition {sym}{args}->{target} uses undeclared states")

    @cached_property
    def by_symbol(self) -> dict[str, tuple[tuple[tuple, Hashable], ...]]:
        idx: dict[str, list] = {}
        for sym, args, target in self.transitions:
            idx.setdefault(sym, []).append((args, target))
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def _run_cache(self) -> dict:
        return {}

    def __eq__(self, other):
        return (
            isinstance(other, TreeAutomaton)
            and self.alphabet == other.alphabet
            and self.states == other.states
            and self.final == other.final
            and self.transitions == other.transitions
        )

    def __hash__(self):
        return hash((self.alphabet, self.states, self.final, self.transitions))

    def renumber(self, prefix: str = "s") -> "TreeAutomaton":
        """Rename states to ``s0, s1, ...`` in a deterministic order."""
        order = sorted(self.states, key=lambda s: (str(type(s)), repr(s)))
        names = {s: f"{prefix}{i}" for i, s in enumerate(order)}
        return TreeAutomaton(
            self.alphabet,
            frozenset(names.values()),
            frozenset(names[s] for s in self.final),
            frozenset((sym, tuple(names[a] for a in args), names[t]) for sym, args, t in self.transitions),
            self.label,
        )


# --- membership ------------------------------------------------------------


def run(A: TreeAutomaton, t: Tree, env: Mapping[str, frozenset] | None = None) -> frozenset:
    """States reachable at the root of ``t``.

    Variable leaves are looked up in ``env``; without an env a variable
    leaf is an alphabet mismatch.
    """
    if env is None:
        cache = A._run_cache
        got = cache.get(t)
        if got is not None:
            return got
    if t.is_var:
        if env is None or t.label not in env:
            raise AlphabetMismatch(f"unbound variable leaf {t.label!r}")
        return frozenset(env[t.label])
    if t.label not in A.alphabet or A.alphabet.rank(t.label) != len(t.children):
        raise AlphabetMismatch(f"symbol {t.label!r}/{len(t.children)} not in automaton alphabet")
    kids = [run(A, c, env) for c in t.children]
    out = set()
    for args, target in A.by_symbol.get(t.label, ()):
        if all(a in k for a, k in zip(args, kids)):
            out.add(target)
    res = frozenset(out)
    if env is None:
        A._run_cache[t] = res
    return res


def accepts(A: TreeAutomaton, t: Tree) -> bool:
    return not run(A, t).isdisjoint(A.final)


# --- builders --------------------------------------------------------------


def universal(alphabet: RankedAlphabet) -> TreeAutomaton:
    trans = frozenset((s, ("u",) * r, "u") for s, r in alphabet.items())
    return TreeAutomaton(alphabet, frozenset({"u"}), frozenset({"u"}), trans, "any")


def is_structurally_universal(A: TreeAutomaton) -> bool:
    """Cheap sufficient test: some final state is closed under every symbol."""
    for f in A.final:
        if all((s, (f,) * r, f) in A.transitions for s, r in A.alphabet.items()):
            return True
    return False


def singleton(t: Tree, alphabet: RankedAlphabet) -> TreeAutomaton:
    states, trans = set(), set()
    for w, s in t.walk():
        if s.is_var:
            raise AlphabetMismatch("singleton needs a ground tree")
        name = format_position(w)
        states.add(name)
        trans.add((s.label, tuple(format_position(w + (i,)) for i in range(1, s.rank + 1)), name))
    return TreeAutomaton(alphabet, frozenset(states), frozenset({"e"}), frozenset(trans), f"only {t}")


def _symbol_scan(alphabet: RankedAlphabet, symbol: str) -> frozenset:
    if symbol not in alphabet:
        raise AlphabetMismatch(f"symbol {symbol!r} not in alphabet")
    trans = set()
    for s, r in alphabet.items():
        for args in itertools.product(("no", "yes"), repeat=r):
            hit = s == symbol or "yes" in args
            trans.add((s, args, "yes" if hit else "no"))
    return frozenset(trans)


def contains_symbol(alphabet: RankedAlphabet, symbol: str) -> TreeAutomaton:
    """Trees in which ``symbol`` occurs at least once."""
    return TreeAutomaton(
        alphabet, frozenset({"no", "yes"}), frozenset({"yes"}), _symbol_scan(alphabet, symbol), f"contains {symbol}"
    )


def lacks_symbol(alphabet: RankedAlphabet, symbol: str) -> TreeAutomaton:
    """Trees in which ``symbol`` does not occur."""
    return TreeAutomaton(
        alphabet, frozenset({"no", "yes"}), frozenset({"no"}), _symbol_scan(alphabet, symbol), f"lacks {symbol}"
    )


# --- closure operations ----------------------------------------------------


def _reachable(A: TreeAutomaton) -> frozenset:
    reach: set = set()
    changed = True
    while changed:
        changed = False
        for sym, args, target in A.transitions:
            if target not in reach and all(a in reach for a in args):
                reach.add(target)
                changed = True
    return frozenset(reach)


def trim(A: TreeAutomaton) -> TreeAutomaton:
    """Drop states no tree reaches (language unchanged)."""
    reach = _reachable(A)
    trans = frozenset(tr for tr in A.transitions if tr[2] in reach and all(a in reach for a in tr[1]))
    return TreeAutomaton(A.alphabet, reach, A.final & reach, trans, A.label)


def intersect(A: TreeAutomaton, B: TreeAutomaton) -> TreeAutomaton:
    if A.alphabet != B.alphabet:
        raise AlphabetMismatch("intersect needs a common alphabet")
    trans = set()
    for sym in A.alphabet:
        for (aa, at) in A.by_symbol.get(sym, ()):
            for (ba, bt) in B.by_symbol.get(sym, ()):
                trans.add((sym, tuple(zip(aa, ba)), (at, bt)))
    states = {tr[2] for tr in trans} | {p for tr in trans for p in tr[1]}
    final = {s for s in states if s[0] in A.final and s[1] in B.final}
    return trim(TreeAutomaton(A.alphabet, frozenset(states), frozenset(final), frozenset(trans)))


def _min_sizes(A: TreeAutomaton) -> dict:
    best: dict = {}
    changed = True
    while changed:
        changed = False
        for sym, args, target in A.transitions:
            if all(a in best for a in args):
                n = 1 + sum(best[a] for a in args)
                if n < best.get(target, n + 1):
                    best[target] = n
                    changed = True
    return best


def is_empty(A: TreeAutomaton) -> Tree | None:
    """None if L(A) is empty, else its canonically least smallest member."""
    best = _min_sizes(A)
    sizes = [best[f] for f in A.final if f in best]
    if not sizes:
        return None
    n = min(sizes)
    table = _size_table(A, n)
    cands = set()
    for f in A.final:
        cands |= table[n].get(f, set())
    return min(cands, key=tree_key)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _size_table(A: TreeAutomaton, max_size: int) -> list[dict]:
    """table[n][state] = set of trees of size exactly n reaching state."""
    table: list[dict] = [dict() for _ in range(max_size + 1)]
    for n in range(1, max_size + 1):
        row = table[n]
        for sym, args, target in A.transitions:
            k = len(args)
            if k == 0:
                if n == 1:
                    row.setdefault(target, set()).add(Tree(sym))
                continue
            for split in _compositions(n - 1, k):
                pools = [table[m].get(a) for m, a in zip(split, args)]
                if any(not p for p in pools):
                    continue
                bucket = row.setdefault(target, set())
                for kids in itertools.product(*pools):
                    bucket.add(Tree(sym, kids))
    return table


def enumerate_trees(A: TreeAutomaton, max_size: int) -> list[Tree]:
    """All members of L(A) of size <= max_size, in canonical order."""
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    table = _size_table(A, max_size)
    out = set()
    for n in range(1, max_size + 1):
        for f in A.final:
            out |= table[n].get(f, set())
    return sorted_trees(out)


def all_trees(alphabet: RankedAlphabet, max_size: int) -> list[Tree]:
    return enumerate_trees(universal(alphabet), max_size)


SINK = ("__sink__",)


def inverse_hom_image(A: TreeAutomaton, h) -> TreeAutomaton:
    """Automaton for h^{-1}(L(A)); ``h`` must be linear.

    Uses A's states plus one sink reached by every tree; the sink only
    fills argument slots whose variable the image deletes.
    """
    from .homs import classify_hom

    if h.target != A.alphabet and not h.target.issubset(A.alphabet):
        raise AlphabetMismatch("homomorphism target must be the automaton alphabet")
    if "linear" not in classify_hom(h):
        raise ValueError("inverse_hom_image needs a linear homomorphism")
    trans = set()
    need_sink = False
    for sym, k in h.source.items():
        image = h.images[sym]
        used = sorted({int(s.label[1:]) for _, s in image.walk() if s.is_var})
        if len(used) < k:
            need_sink = True
        for choice in itertools.product(sorted(A.states, key=repr), repeat=len(used)):
            env = {f"x{i}": frozenset({q}) for i, q in zip(used, choice)}
            targets = run(A, image, env)
            if not targets:
                continue
            assign = dict(zip(used, choice))
            args = tuple(assign.get(i, SINK) for i in range(1, k + 1))
            for tgt in targets:
                trans.add((sym, args, tgt))
    states = set(A.states)
    if need_sink:
        states.add(SINK)
        for sym, k in h.source.items():
            trans.add((sym, (SINK,) * k, SINK))
    return TreeAutomaton(h.source, frozenset(states), A.final, frozenset(trans))


def substitute_regular(t: Tree, theta: Mapping[str, TreeAutomaton]) -> TreeAutomaton:
    """Automaton for the language t·theta (variable leaves replaced by languages).

    Disjoint copy of each leaf's automaton, plus one fresh state per symbol
    node of ``t`` wired along its shape.
    """
    if t.is_var:
        if t.label not in theta:
            raise KeyError(f"no language bound to {t.label!r}")
        return theta[t.label]
    alphabet = None
    states: set = set()
    trans: set = set()
    finals_at: dict = {}
    for w, s in t.walk():
        if s.is_var:
            if s.label not in theta:
                raise KeyError(f"no language bound to {s.label!r}")
            comp = theta[s.label]
            if alphabet is None:
                alphabet = comp.alphabet
            elif comp.alphabet != alphabet:
                raise AlphabetMismatch("bound languages use different alphabets")
            tag = lambda q, w=w: ("c", w, q)
            states |= {tag(q) for q in comp.states}
            trans |= {(sym, tuple(tag(a) for a in args), tag(tg)) for sym, args, tg in comp.transitions}
            finals_at[w] = [tag(q) for q in sorted(comp.final, key=repr)]
        else:
            finals_at[w] = [("n", w)]
    if alphabet is None:
        raise ValueError("substitute_regular on a ground tree needs an alphabet; use singleton")
    for w, s in t.walk():
        if s.is_var:
            continue
        if s.label not in alphabet or alphabet.rank(s.label) != s.rank:
            raise AlphabetMismatch(f"symbol {s.label!r} not in alphabet")
        node = ("n", w)
        states.add(node)
        pools = [finals_at[w + (i,)] for i in range(1, s.rank + 1)]
        for args in itertools.product(*pools):
            trans.add((s.label, tuple(args), node))
    return TreeAutomaton(alphabet, frozenset(states), frozenset({("n", ())}), frozenset(trans))


def languages_agree(A: TreeAutomaton, B: TreeAutomaton, max_size: int) -> bool:
    """Bounded language equality: same members up to ``max_size``."""
    return enumerate_trees(A, max_size) == enumerate_trees(B, max_size)
