"""Link-annotated derivations: single steps, translation and dep(M).

``translate`` evaluates one concrete input top-down.  Deleted subtrees
are concrete there, so look-ahead is decided by membership.
``enumerate_dep`` instead explores derivations from the start forms and
has to pick trees from the look-ahead languages; it takes those from a
size-capped enumeration, so its result is an under-approximation
controlled by ``la_size_cap``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .automata import AlphabetMismatch, accepts, enumerate_trees
from .model import Transducer, rule_links
from .terms import Tree, format_position, label_at, replace_at, sorted_trees, subtree_at, substitute, tree_key

__all__ = [
    "SententialForm",
    "DepTriple",
    "StepCapExceeded",
    "derive_step",
    "start_forms",
    "translate",
    "enumerate_dep",
    "enumerate_dep_bfs",
    "pipeline_translate",
    "format_links",
    "format_dep",
    "links_key",
    "default_step_cap",
]


class StepCapExceeded(RuntimeError):
    """A derivation needed more steps than allowed (distinct from 'no translation')."""


def links_key(D) -> tuple:
    return tuple(sorted(D))


def format_links(D) -> str:
    return ", ".join(f"({format_position(v)}, {format_position(w)})" for v, w in links_key(D))


@dataclass(frozen=True)
class SententialForm:
    xi: Tree
    links: frozenset
    zeta: Tree

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(self.links))

    def is_valid(self) -> bool:
        try:
            for v, w in self.links:
                subtree_at(self.xi, v)
                subtree_at(self.zeta, w)
        except IndexError:
            return False
        return True

    def is_final(self) -> bool:
        return not any(n.is_var for _, n in self.xi.walk()) and not any(n.is_var for _, n in self.zeta.walk())


@dataclass(frozen=True)
class DepTriple:
    input: Tree
    links: frozenset
    output: Tree

    def sort_key(self):
        return (tree_key(self.input), links_key(self.links), tree_key(self.output))

    def format(self) -> str:
        return f"{self.input}\n{format_links(self.links)}\n{self.output}"

    def to_json(self) -> dict:
        return {
            "input": str(self.input),
            "links": [[format_position(v), format_position(w)] for v, w in links_key(self.links)],
            "output": str(self.output),
        }


def format_dep(triples: Iterable[DepTriple]) -> str:
    return "\n\n".join(t.format() for t in sorted(triples, key=DepTriple.sort_key))


def start_forms(M: Transducer) -> list[SententialForm]:
    return [SententialForm(Tree.var(q), {((), ())}, Tree.var(q)) for q in sorted(M.initial)]


def _state_positions(t: Tree) -> list:
    return [w for w, n in t.walk() if n.is_var]


def _la_trees(M: Transducer, q: str, cap: int, cache: dict) -> list[Tree]:
    if q not in cache:
        cache[q] = enumerate_trees(M.la(q), cap) if cap >= 1 else []
    return cache[q]


def _active(sf: SententialForm, v) -> list:
    q = label_at(sf.xi, v)
    out = []
    for lv, lw in sf.links:
        if lv == v:
            node = subtree_at(sf.zeta, lw)
            if node.is_var:
                out.append((lw, node.label == q))
    return out


def _successors_at(M: Transducer, sf: SententialForm, v, la_cap: int, cache: dict) -> list[SententialForm]:
    node = subtree_at(sf.xi, v)
    q = node.label
    active = _active(sf, v)
    out = []
    if active:
        for w, same in active:
            if not same:
                continue
            for rule in M.rules_for(q):
                out.append(
                    SententialForm(
                        replace_at(sf.xi, v, rule.lhs),
                        sf.links | rule_links(rule, v, w),
                        replace_at(sf.zeta, w, rule.rhs),
                    )
                )
    else:
        for t in _la_trees(M, q, la_cap, cache):
            out.append(SententialForm(replace_at(sf.xi, v, t), sf.links, sf.zeta))
    return out


def derive_step(M: Transducer, sf: SententialForm, la_size_cap: int) -> frozenset:
    """Every one-step successor of ``sf``."""
    cache: dict = {}
    out = set()
    for v in _state_positions(sf.xi):
        out.update(_successors_at(M, sf, v, la_size_cap, cache))
    return frozenset(out)


def enumerate_dep_bfs(M: Transducer, max_steps: int, la_size_cap: int) -> list[DepTriple]:
    """Breadth-first reference implementation of ``enumerate_dep``.

    Steps at distinct state occurrences commute and each occurrence is
    consumed by exactly one step, so only the leftmost pending occurrence
    is expanded; this visits one representative per set of interleavings
    without losing any final form or changing its step count.
    """
    cache: dict = {}
    seen = set(start_forms(M))
    frontier = deque((sf, 0) for sf in start_forms(M))
    found = set()
    while frontier:
        sf, steps = frontier.popleft()
        pending = _state_positions(sf.xi)
        if not pending:
            if not any(n.is_var for _, n in sf.zeta.walk()):
                found.add(DepTriple(sf.xi, sf.links, sf.zeta))
            continue
        if steps >= max_steps:
            continue
        for nxt in _successors_at(M, sf, pending[0], la_size_cap, cache):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, steps + 1))
    return sorted(found, key=DepTriple.sort_key)


def enumerate_dep(M: Transducer, max_steps: int, la_size_cap: int) -> list[DepTriple]:
    """State-free triples reachable in at most ``max_steps`` steps.

    A derivation from a state splits into one rule application plus
    independent derivations for the states of its left-hand side (rule
    steps for kept states, one look-ahead step for deleted ones), so the
    triples are built bottom-up per (state, step budget) with memoization.
    The result equals ``enumerate_dep_bfs``.
    """
    la_cache: dict = {}
    memo: dict = {}

    def dep(q: str, k: int) -> dict:
        """(t, D, u) -> fewest steps (<= k) from <q, {(e,e)}, q>."""
        key = (q, k)
        if key in memo:
            return memo[key]
        out: dict = {}
        if k >= 1:
            for rule in M.rules_for(q):
                slots = list(rule.lhs_vars.items())
                if 1 + len(slots) > k:
                    continue
                options = []
                for p, lpos in slots:
                    if p in rule.rhs_vars:
                        wpos = rule.rhs_vars[p]
                        sub = dep(p, k - 1 - (len(slots) - 1))
                        opts = [(p, t, _shift(D, lpos, wpos), u, n) for (t, D, u), n in sub.items()]
                    else:
                        opts = [(p, t, frozenset(), None, 1) for t in _la_trees(M, p, la_size_cap, la_cache)]
                    if not opts:
                        break
                    opts.sort(key=lambda o: o[4])
                    options.append(opts)
                else:
                    def combine(i: int, used: int, parts: list):
                        if i == len(options):
                            tb = {o[0]: o[1] for o in parts}
                            ub = {o[0]: o[3] for o in parts if o[3] is not None}
                            D = frozenset({((), ())}).union(*(o[2] for o in parts))
                            triple = (substitute(rule.lhs, tb), D, substitute(rule.rhs, ub))
                            if used < out.get(triple, used + 1):
                                out[triple] = used
                            return
                        rest = len(options) - i - 1  # each later slot needs >= 1 step
                        for o in options[i]:
                            if used + o[4] + rest > k:
                                break
                            parts.append(o)
                            combine(i + 1, used + o[4], parts)
                            parts.pop()

                    combine(0, 1, [])
        memo[key] = out
        return out

    found = set()
    for q in sorted(M.initial):
        found.update(DepTriple(t, D, u) for (t, D, u) in dep(q, max_steps))
    return sorted(found, key=DepTriple.sort_key)


def default_step_cap(M: Transducer, t: Tree) -> int:
    return 2 * t.size * (1 + M.max_rhs_size())


def _match(pattern: Tree, t: Tree, at: tuple, binding: dict) -> bool:
    if pattern.is_var:
        binding[pattern.label] = at
        return True
    if pattern.label != t.label or len(pattern.children) != len(t.children):
        return False
    return all(_match(p, c, at + (i,), binding) for i, (p, c) in enumerate(zip(pattern.children, t.children), 1))


def _shift(D: frozenset, v: tuple, w: tuple) -> frozenset:
    return frozenset((v + a, w + b) for a, b in D)


def translate(M: Transducer, t: Tree, step_cap: int | None = None) -> frozenset:
    """All (D, u) with (t, D, u) in dep(M).

    Raises StepCapExceeded if some derivation would need more than
    ``step_cap`` steps, or if an ε-cycle makes derivations unbounded.
    """
    for _, n in t.walk():
        if n.is_var:
            raise ValueError("translate needs a tree without states")
        if n.label not in M.input or M.input.rank(n.label) != n.rank:
            raise AlphabetMismatch(f"symbol {n.label}/{n.rank} is not in the input alphabet of {M.name}")
    cap = default_step_cap(M, t) if step_cap is None else step_cap
    memo: dict = {}
    active: set = set()

    def go(q: str, pos: tuple) -> dict:
        """(relative links, output) -> fewest steps, for state q at pos."""
        key = (q, pos)
        if key in memo:
            return memo[key]
        if key in active:
            raise StepCapExceeded(f"epsilon cycle through state {q} at input position {format_position(pos)}")
        active.add(key)
        sub = subtree_at(t, pos)
        results: dict = {}
        for rule in M.rules_for(q):
            binding: dict = {}
            if not _match(rule.lhs, sub, (), binding):
                continue
            if any(not accepts(M.la(p), subtree_at(sub, binding[p])) for p in rule.deleted):
                continue
            base = 1 + len(rule.deleted)
            kept = list(rule.rhs_vars.items())
            options = []
            for p, wpos in kept:
                r = go(p, pos + binding[p])
                if not r:
                    break
                options.append([(_shift(D, binding[p], wpos), u, n, p) for (D, u), n in r.items()])
            else:
                for combo in itertools.product(*options):
                    D = frozenset({((), ())}).union(*(c[0] for c in combo))
                    u = substitute(rule.rhs, {c[3]: c[1] for c in combo})
                    n = base + sum(c[2] for c in combo)
                    if n < results.get((D, u), n + 1):
                        results[(D, u)] = n
        active.discard(key)
        memo[key] = results
        return results

    out = {}
    for q in sorted(M.initial):
        for res, n in go(q, ()).items():
            out[res] = min(n, out.get(res, n))
    worst = max(out.values(), default=0)
    if worst > cap:
        raise StepCapExceeded(f"translation of {t} needs {worst} steps, cap is {cap}")
    return frozenset(out)


def pipeline_translate(chain: Sequence[Transducer], t: Tree, step_cap: int | None = None) -> frozenset:
    """Image of {t} under the left-to-right relational composition of ``chain``."""
    if not chain:
        raise ValueError("pipeline needs at least one transducer")
    for a, b in zip(chain, chain[1:]):
        if not a.output.issubset(b.input):
            raise AlphabetMismatch(f"output alphabet of {a.name} does not fit the input of {b.name}")
    current = {t}
    for M in chain:
        nxt = set()
        for s in sorted_trees(current):
            nxt.update(u for _, u in translate(M, s, step_cap))
        current = nxt
    return frozenset(current)
