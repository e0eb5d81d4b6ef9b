"""Linear extended top-down tree transducers with regular look-ahead."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .automata import TreeAutomaton, accepts, is_structurally_universal, universal
from .terms import RankedAlphabet, Tree, height, var_positions, variables

__all__ = [
    "Rule",
    "Transducer",
    "ModelError",
    "validate",
    "classify",
    "rule_links",
    "FLAGS",
    "LA_CHECK_SIZE",
]

FLAGS = ("eps_free", "strict", "nondeleting", "delabeling", "top_down", "top_down_la", "qr", "la_trivial")

# bounded size for the enumeration fallback of the la_trivial flag
LA_CHECK_SIZE = 8


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Tree
    state: str
    rhs: Tree

    @cached_property
    def lhs_vars(self) -> dict:
        return var_positions(self.lhs)

    @cached_property
    def rhs_vars(self) -> dict:
        return var_positions(self.rhs)

    @property
    def is_epsilon(self) -> bool:
        return self.lhs.is_var

    @property
    def is_strict(self) -> bool:
        return not self.rhs.is_var

    @property
    def deleted(self) -> frozenset:
        return frozenset(self.lhs_vars) - frozenset(self.rhs_vars)

    def __str__(self) -> str:
        return f"{self.lhs} -[{self.state}]-> {self.rhs}"


@dataclass(frozen=True, eq=False)
class Transducer:
    name: str
    states: tuple
    input: RankedAlphabet
    output: RankedAlphabet
    initial: frozenset
    rules: tuple
    lookahead: Mapping[str, TreeAutomaton] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "rules", tuple(self.rules))
        # one-state universal look-ahead is the default; drop it so equality is by meaning
        la = {
            q: A
            for q, A in self.lookahead.items()
            if not (A.alphabet == self.input and len(A.states) == 1 and is_structurally_universal(A))
        }
        object.__setattr__(self, "lookahead", la)

    @cached_property
    def _universal(self) -> TreeAutomaton:
        return universal(self.input)

    def la(self, q: str) -> TreeAutomaton:
        return self.lookahead.get(q) or self._universal

    @cached_property
    def _by_state(self) -> dict:
        idx: dict = {}
        for rule in self.rules:
            idx.setdefault(rule.state, []).append(rule)
        return {k: tuple(v) for k, v in idx.items()}

    def rules_for(self, q: str) -> tuple:
        return self._by_state.get(q, ())

    def max_lhs_height(self) -> int:
        return max((height(r.lhs) for r in self.rules), default=0)

    def max_rhs_height(self) -> int:
        return max((height(r.rhs) for r in self.rules), default=0)

    def max_rhs_size(self) -> int:
        return max((r.rhs.size for r in self.rules), default=0)

    def replace(self, **changes) -> "Transducer":
        fields = dict(
            name=self.name,
            states=self.states,
            input=self.input,
            output=self.output,
            initial=self.initial,
            rules=self.rules,
            lookahead=self.lookahead,
        )
        fields.update(changes)
        return Transducer(**fields)

    def __eq__(self, other):
        if not isinstance(other, Transducer):
            return NotImplemented
        return (
            self.name == other.name
            and self.states == other.states
            and self.input == other.input
            and self.output == other.output
            and self.initial == other.initial
            and self.rules == other.rules
            and self.lookahead == other.lookahead
        )

    def __hash__(self):
        return hash((self.name, self.states, self.rules))


def _check_side(tree: Tree, alphabet: RankedAlphabet, states: frozenset, where: str) -> list[str]:
    out = []
    for _, node in tree.walk():
        if node.is_var:
            if node.label not in states:
                out.append(f"{where}: leaf {node.label} is not a declared state")
        elif node.label not in alphabet:
            out.append(f"{where}: symbol {node.label} is not in the alphabet")
        elif alphabet.rank(node.label) != node.rank:
            out.append(f"{where}: symbol {node.label} has rank {alphabet.rank(node.label)}, used with {node.rank}")
    counts = Counter(n.label for _, n in tree.walk() if n.is_var)
    for q, n in sorted(counts.items()):
        if n > 1:
            out.append(f"{where}: state {q} occurs {n} times (linearity)")
    return out


def validate(M: Transducer) -> list[str]:
    """Diagnostics for every violated well-formedness condition."""
    diags: list[str] = []
    states = frozenset(M.states)
    if len(states) != len(M.states):
        diags.append("states: duplicate state names")
    clash = states & (set(M.input) | set(M.output))
    if clash:
        diags.append(f"states: names also used as symbols: {', '.join(sorted(clash))}")
    for q in sorted(M.initial - states):
        diags.append(f"initial: {q} is not a declared state")
    for i, rule in enumerate(M.rules, 1):
        where = f"rule {i} ({rule})"
        if rule.state not in states:
            diags.append(f"{where}: rule state {rule.state} is not declared")
        diags += _check_side(rule.lhs, M.input, states, f"{where} lhs")
        diags += _check_side(rule.rhs, M.output, states, f"{where} rhs")
        extra = variables(rule.rhs) - variables(rule.lhs)
        if extra:
            diags.append(f"{where}: var(r) not contained in var(l): {', '.join(sorted(extra))}")
    for q, A in sorted(M.lookahead.items()):
        if q not in states:
            diags.append(f"lookahead: {q} is not a declared state")
        if A.alphabet != M.input:
            diags.append(f"lookahead {q}: automaton alphabet differs from the input alphabet")
    return diags


def _iter_trees(alphabet: RankedAlphabet, max_size: int):
    """All trees up to max_size, smallest first (lazily per size)."""
    from .automata import _compositions

    table: list[list[Tree]] = [[] for _ in range(max_size + 1)]
    for n in range(1, max_size + 1):
        row = table[n]
        for sym, k in alphabet.items():
            if k == 0:
                if n == 1:
                    row.append(Tree(sym))
                continue
            for split in _compositions(n - 1, k):
                pools = [table[m] for m in split]
                if all(pools):
                    for kids in itertools.product(*pools):
                        row.append(Tree(sym, kids))
        yield from row


def is_la_universal(A: TreeAutomaton, max_size: int = LA_CHECK_SIZE) -> bool:
    """Structural fast path, otherwise bounded check of every tree up to max_size."""
    if is_structurally_universal(A):
        return True
    return all(accepts(A, t) for t in _iter_trees(A.alphabet, max_size))


def classify(M: Transducer) -> frozenset:
    diags = validate(M)
    if diags:
        raise ModelError(f"{M.name} is not valid: {diags[0]}")
    flags = set(FLAGS)
    for rule in M.rules:
        ell, r = rule.lhs, rule.rhs
        if ell.is_var:
            flags.discard("eps_free")
        if r.is_var:
            flags.discard("strict")
        lhs_shallow = not ell.is_var and all(c.is_var for c in ell.children)
        rhs_shallow = r.is_var or all(c.is_var for c in r.children)
        if not lhs_shallow:
            flags.discard("top_down_la")
        if not (lhs_shallow and rhs_shallow):
            flags.discard("delabeling")
        if variables(r) != variables(ell):
            flags.discard("nondeleting")
        if rule.lhs_vars != rule.rhs_vars:
            flags.discard("qr")
    if not all(is_la_universal(A) for A in M.lookahead.values()):
        flags.discard("la_trivial")
    if not {"la_trivial", "top_down_la"} <= flags:
        flags.discard("top_down")
    if not {"nondeleting", "strict", "delabeling", "top_down"} <= flags:
        flags.discard("qr")
    return frozenset(flags)


def rule_links(rule: Rule, v: tuple = (), w: tuple = ()) -> frozenset:
    """Explicit links of a rule applied at input position v and output position w."""
    lv = rule.lhs_vars
    return frozenset((tuple(v) + lv[p], tuple(w) + pw) for p, pw in rule.rhs_vars.items())
