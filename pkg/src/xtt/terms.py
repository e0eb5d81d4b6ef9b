"""Ranked alphabets, trees and positions.

Trees are immutable.  A leaf may be a *variable* (``is_var=True``): this is
how states inside rule sides and sentential forms, and the ``x1 .. xk``
placeholders inside homomorphism images, are represented.  Variable leaves
have height 0; a nullary alphabet symbol has height 1.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping

Position = tuple  # tuple[int, ...]; () is the root

NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")

__all__ = [
    "RankedAlphabet",
    "Tree",
    "Position",
    "TermSyntaxError",
    "parse_term",
    "format_term",
    "parse_position",
    "format_position",
    "positions",
    "subtree_at",
    "replace_at",
    "label_at",
    "lca",
    "is_prefix",
    "height",
    "size",
    "substitute",
    "variables",
    "var_positions",
    "tree_key",
    "sorted_trees",
]


class TermSyntaxError(ValueError):
    """Raised for malformed terms; ``offset`` is the character index."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class RankedAlphabet:
    """Finite symbol set with a rank per symbol.

    Declaration order is kept for formatting; equality ignores it.
    """

    __slots__ = ("_items", "_ranks")

    def __init__(self, symbols: Mapping[str, int] | Iterable[tuple[str, int]]):
        items = tuple(symbols.items()) if isinstance(symbols, Mapping) else tuple(symbols)
        if not items:
            raise ValueError("ranked alphabet must be nonempty")
        ranks: dict[str, int] = {}
        for name, rank in items:
            if not isinstance(name, str) or not NAME_RE.match(name):
                raise ValueError(f"invalid symbol name {name!r}")
            if not isinstance(rank, int) or rank < 0:
                raise ValueError(f"invalid rank {rank!r} for symbol {name}")
            if name in ranks and ranks[name] != rank:
                raise ValueError(f"symbol {name} declared with two ranks")
            ranks[name] = rank
        self._ranks = ranks
        self._items = tuple(ranks.items())

    @classmethod
    def parse(cls, text: str) -> "RankedAlphabet":
        """Parse ``"sigma/2 gamma/1 alpha/0"``."""
        items = []
        for tok in text.split():
            name, sep, rank = tok.rpartition("/")
            if not sep or not rank.isdigit():
                raise ValueError(f"expected sym/rank, got {tok!r}")
            items.append((name, int(rank)))
        return cls(items)

    def rank(self, symbol: str) -> int:
        return self._ranks[symbol]

    def symbols(self) -> tuple[str, ...]:
        return tuple(self._ranks)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def of_rank(self, k: int) -> tuple[str, ...]:
        return tuple(s for s, r in self._items if r == k)

    def max_rank(self) -> int:
        return max(r for _, r in self._items)

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        return RankedAlphabet(self._items + tuple(i for i in other._items if i[0] not in self._ranks))

    def issubset(self, other: "RankedAlphabet") -> bool:
        return all(other._ranks.get(s) == r for s, r in self._items)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._ranks

    def __iter__(self) -> Iterator[str]:
        return iter(self._ranks)

    def __len__(self) -> int:
        return len(self._ranks)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RankedAlphabet) and self._ranks == other._ranks

    def __hash__(self) -> int:
        return hash(frozenset(self._items))

    def __str__(self) -> str:
        return " ".join(f"{s}/{r}" for s, r in self._items)

    def __repr__(self) -> str:
        return f"RankedAlphabet({str(self)!r})"


class Tree:
    """Immutable ordered tree; ``str(t)`` is the canonical term text."""

    __slots__ = ("label", "children", "is_var", "_hash", "_str", "_size")

    def __init__(self, label: str, children: Iterable["Tree"] = (), is_var: bool = False):
        children = tuple(children)
        if is_var and children:
            raise ValueError(f"variable leaf {label} cannot have children")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "is_var", is_var)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_str", None)
        object.__setattr__(self, "_size", None)

    def __setattr__(self, name, value):
        raise AttributeError("Tree is immutable")

    @classmethod
    def var(cls, name: str) -> "Tree":
        return cls(name, (), True)

    @property
    def rank(self) -> int:
        return len(self.children)

    @property
    def size(self) -> int:
        if self._size is None:
            object.__setattr__(self, "_size", 1 + sum(c.size for c in self.children))
        return self._size

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        return (
            hash(self) == hash(other)
            and self.label == other.label
            and self.is_var == other.is_var
            and self.children == other.children
        )

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.label, self.is_var, self.children)))
        return self._hash

    def __str__(self) -> str:
        if self._str is None:
            if self.children:
                s = f"{self.label}({','.join(str(c) for c in self.children)})"
            else:
                s = self.label
            object.__setattr__(self, "_str", s)
        return self._str

    def __repr__(self) -> str:
        return f"Tree({str(self)!r})"

    def __lt__(self, other: "Tree") -> bool:
        return tree_key(self) < tree_key(other)

    def walk(self, prefix: Position = ()) -> Iterator[tuple[Position, "Tree"]]:
        """Pre-order (lexicographic position order) traversal."""
        yield prefix, self
        for i, c in enumerate(self.children, 1):
            yield from c.walk(prefix + (i,))


def tree_key(t: Tree) -> tuple[int, str]:
    """Canonical order: size first, then formatted term."""
    return (t.size, str(t))


def sorted_trees(trees: Iterable[Tree]) -> list[Tree]:
    return sorted(trees, key=tree_key)


# --- term text -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(#[^\n]*)|([A-Za-z0-9_]+)|(.))", re.S)


def _tokens(text: str):
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        if m.group(1) is not None:
            continue
        if m.group(2) is not None:
            yield ("name", m.group(2), m.start(2))
        elif m.group(3) is not None:
            if m.group(3).isspace():
                continue
            yield ("punct", m.group(3), m.start(3))
    yield ("end", "", n)


def parse_term(
    text: str,
    alphabet: RankedAlphabet | None = None,
    states: Iterable[str] = (),
) -> Tree:
    """Parse ``name | name(term, ..., term)``.

    Leaves named in ``states`` become variable leaves.  With an alphabet,
    unknown symbols and arity mismatches are errors; without one, any name
    is accepted with the arity it is written with.
    """
    states = frozenset(states)
    if alphabet is not None:
        clash = states & set(alphabet)
        if clash:
            raise TermSyntaxError(f"names declared both as state and symbol: {sorted(clash)}")
    toks = list(_tokens(text))
    i = 0

    def expect(value: str):
        nonlocal i
        kind, val, off = toks[i]
        if val != value or kind != "punct":
            raise TermSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", off)
        i += 1

    def term() -> Tree:
        nonlocal i
        kind, name, off = toks[i]
        if kind != "name":
            raise TermSyntaxError(f"expected a name, found {name or 'end of input'!r}", off)
        i += 1
        children: list[Tree] = []
        if toks[i][0] == "punct" and toks[i][1] == "(":
            i += 1
            children.append(term())
            while toks[i][0] == "punct" and toks[i][1] == ",":
                i += 1
                children.append(term())
            expect(")")
        if name in states:
            if children:
                raise TermSyntaxError(f"state {name} cannot have children", off)
            return Tree.var(name)
        if alphabet is not None:
            if name not in alphabet:
                raise TermSyntaxError(f"unknown symbol {name!r}", off)
            if alphabet.rank(name) != len(children):
                raise TermSyntaxError(
                    f"symbol {name} has rank {alphabet.rank(name)} but {len(children)} children", off
                )
        return Tree(name, children)

    t = term()
    if toks[i][0] != "end":
        raise TermSyntaxError(f"trailing input {toks[i][1]!r}", toks[i][2])
    return t


def format_term(t: Tree) -> str:
    return str(t)


def format_position(w: Position) -> str:
    return ".".join(str(i) for i in w) if w else "e"


def parse_position(text: str) -> Position:
    text = text.strip()
    if text in ("e", "ε", ""):
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise ValueError(f"invalid position {text!r}") from None
    if any(p < 1 for p in parts):
        raise ValueError(f"invalid position {text!r}")
    return parts


# --- structure -------------------------------------------------------------


def positions(t: Tree, labels: Iterable[str] | None = None) -> frozenset:
    """pos(t), or pos_U(t) when a label filter U is given."""
    if labels is None:
        return frozenset(w for w, _ in t.walk())
    labels = frozenset(labels)
    return frozenset(w for w, s in t.walk() if s.label in labels)


def var_positions(t: Tree) -> dict[str, Position]:
    """Map each variable label to its (first) position."""
    out: dict[str, Position] = {}
    for w, s in t.walk():
        if s.is_var and s.label not in out:
            out[s.label] = w
    return out


def variables(t: Tree) -> frozenset:
    return frozenset(s.label for _, s in t.walk() if s.is_var)


def subtree_at(t: Tree, w: Position) -> Tree:
    for i in w:
        if not 1 <= i <= len(t.children):
            raise IndexError(f"invalid position {format_position(tuple(w))}")
        t = t.children[i - 1]
    return t


def label_at(t: Tree, w: Position) -> str:
    return subtree_at(t, w).label


def replace_at(t: Tree, w: Position, u: Tree) -> Tree:
    if not w:
        return u
    i = w[0]
    if not 1 <= i <= len(t.children):
        raise IndexError(f"invalid position {format_position(tuple(w))}")
    kids = list(t.children)
    kids[i - 1] = replace_at(kids[i - 1], w[1:], u)
    return Tree(t.label, kids, t.is_var)


def lca(v: Position, w: Position) -> Position:
    n = 0
    for a, b in zip(v, w):
        if a != b:
            break
        n += 1
    return tuple(v[:n])


def is_prefix(v: Position, w: Position) -> bool:
    """v ⪯ w in the prefix order."""
    return len(v) <= len(w) and tuple(w[: len(v)]) == tuple(v)


def height(t: Tree) -> int:
    if t.is_var:
        return 0
    return 1 + max((height(c) for c in t.children), default=0)


def size(t: Tree) -> int:
    return t.size


def substitute(t: Tree, binding: Mapping[str, Tree]) -> Tree:
    """Simultaneous first-order substitution of variable leaves."""
    if t.is_var:
        return binding.get(t.label, t)
    if not t.children:
        return t
    kids = tuple(substitute(c, binding) for c in t.children)
    if all(a is b for a, b in zip(kids, t.children)):
        return t
    return Tree(t.label, kids)
