"""Transducer constructions: decomposition, ε-elimination, left composition.

Generated names (all plain identifiers so the results can be written out):

* ``rho<i>`` is the mid-alphabet symbol for the i-th rule (1-based),
* ``at<n>`` is the mid-alphabet symbol @_n of rank n,
* ``rho<i>_<w>`` is the front state for rule i at lhs position w, with the
  position written ``e`` for the root and with ``_`` between components,
* ``<p>_la<j>_<k>`` are the fresh states created when a deleting ε-rule
  is eliminated, and ``1 .. m`` the fresh states of left composition.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .automata import (
    TreeAutomaton,
    inverse_hom_image,
    is_structurally_universal,
    singleton,
    substitute_regular,
    universal,
)
from .homs import TreeHomomorphism, classify_hom, preimage_patterns
from .model import ModelError, Rule, Transducer, classify, validate
from .terms import RankedAlphabet, Tree, subtree_at, substitute, tree_key, variables

__all__ = [
    "ConstructionError",
    "EpsilonCycleError",
    "DecompositionResult",
    "decompose",
    "eliminate_epsilon",
    "left_compose_hom",
    "front_state",
]


class ConstructionError(ValueError):
    pass


class EpsilonCycleError(ConstructionError):
    def __init__(self, cycle: list):
        self.cycle = list(cycle)
        super().__init__("cyclic epsilon rules: " + " -> ".join(self.cycle))


@dataclass(frozen=True)
class DecompositionResult:
    raw_front: Transducer  # with ε-rules
    front: Transducer  # ε-rules eliminated
    back: Transducer
    mid_alphabet: RankedAlphabet


def front_state(i: int, w: tuple) -> str:
    return f"rho{i}_" + ("_".join(map(str, w)) if w else "e")


def _check_fresh(names, taken, what: str):
    clash = set(names) & set(taken)
    if clash:
        raise ConstructionError(f"generated {what} names collide with existing names: {', '.join(sorted(clash))}")


def _require_valid(M: Transducer):
    diags = validate(M)
    if diags:
        raise ModelError(f"{M.name} is not valid: {diags[0]}")


def _used(ell: Tree, w: tuple, keep: frozenset) -> list[int]:
    node = subtree_at(ell, w)
    return [j for j, c in enumerate(node.children, 1) if variables(c) & keep]


def _skeleton(rule: Rule, sym: str, i: int) -> Tree:
    """The mid-alphabet tree the front emits for ``rule``, with M's states at its leaves."""
    keep = variables(rule.rhs)

    def skel(w: tuple) -> Tree:
        node = subtree_at(rule.lhs, w)
        if node.is_var:
            return node
        kids = [skel(w + (j,)) for j in _used(rule.lhs, w, keep)]
        return Tree(sym if not w else f"at{len(kids)}", kids)

    return skel(())


def decompose(M: Transducer) -> DecompositionResult:
    """Split an ε-free M into a delabeling front and a strict nondeleting back."""
    _require_valid(M)
    if any(r.is_epsilon for r in M.rules):
        raise ConstructionError(f"{M.name} has epsilon rules; decomposition needs an epsilon-free transducer")
    rules = list(M.rules)
    m = max((len(variables(r.rhs)) for r in rules), default=0)
    rho = [f"rho{i}" for i in range(1, len(rules) + 1)]
    ats = [f"at{j}" for j in range(m + 1)]
    _check_fresh(rho + ats, M.input, "symbol")
    mid = RankedAlphabet(
        [(rho[i], len(_used(r.lhs, (), variables(r.rhs)))) for i, r in enumerate(rules)] + [(a, j) for j, a in enumerate(ats)]
    )

    states: list[str] = []
    lookahead: dict = {}
    front_rules: list[Rule] = []
    for i, rule in enumerate(rules, 1):
        ell, r = rule.lhs, rule.rhs
        keep = variables(r)
        for w, node in ell.walk():
            q1 = front_state(i, w)
            states.append(q1)
            part = subtree_at(ell, w)
            if variables(part):
                lookahead[q1] = substitute_regular(part, {p: M.la(p) for p in variables(part)})
            else:
                lookahead[q1] = singleton(part, M.input)
            if node.is_var:
                for i2, rule2 in enumerate(rules, 1):
                    if rule2.state == node.label:
                        s = Tree.var(front_state(i2, ()))
                        front_rules.append(Rule(s, q1, s))
                continue
            lhs = Tree(node.label, [Tree.var(front_state(i, w + (j,))) for j in range(1, node.rank + 1)])
            used = [Tree.var(front_state(i, w + (j,))) for j in _used(ell, w, keep)]
            if r.is_var:
                if not used:
                    continue  # off the path to the kept state: only ever deleted
                rhs = used[0]
            elif not w:
                rhs = Tree(rho[i - 1], used)
            else:
                rhs = Tree(ats[len(used)], used)
            front_rules.append(Rule(lhs, q1, rhs))
    _check_fresh(states, set(M.input) | set(mid), "state")
    initial = frozenset(front_state(i, ()) for i, r in enumerate(rules, 1) if r.state in M.initial)
    raw = Transducer(f"{M.name}_front", tuple(states), M.input, mid, initial, tuple(front_rules), lookahead)

    # back: strict rules only; a non-strict chain q -> ... -> p of M is
    # collapsed by the front, so p's strict rules must also serve q
    reach = {q: {q} for q in M.states}
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if not rule.is_strict:
                for q in M.states:
                    if rule.state in reach[q] and rule.rhs.label not in reach[q]:
                        reach[q].add(rule.rhs.label)
                        changed = True
    back_rules = []
    for i, rule in enumerate(rules, 1):
        if not rule.is_strict:
            continue
        lhs = _skeleton(rule, rho[i - 1], i)
        for q in M.states:
            if rule.state in reach[q]:
                back_rules.append(Rule(lhs, q, rule.rhs))
    back = Transducer(f"{M.name}_back", M.states, mid, M.output, M.initial, tuple(back_rules), {})
    return DecompositionResult(raw, eliminate_epsilon(raw), back, mid)


def _epsilon_order(M: Transducer) -> list[str]:
    """States ordered so that the targets of a state's ε-rules come first."""
    succ = {q: [] for q in M.states}
    for rule in M.rules:
        if rule.is_epsilon:
            succ.setdefault(rule.state, []).append(rule.lhs.label)
    order: list[str] = []
    mark: dict = {}
    stack: list[str] = []

    def visit(q: str):
        if mark.get(q) == "done":
            return
        if mark.get(q) == "open":
            raise EpsilonCycleError(stack[stack.index(q):] + [q])
        mark[q] = "open"
        stack.append(q)
        for p in succ.get(q, ()):
            visit(p)
        stack.pop()
        mark[q] = "done"
        order.append(q)

    for q in M.states:
        visit(q)
    return order


def eliminate_epsilon(M: Transducer) -> Transducer:
    """Fold every ε-rule into the rules of the state it moves to."""
    if not any(r.is_epsilon for r in M.rules):
        return M
    order = _epsilon_order(M)
    states = list(M.states)
    lookahead = dict(M.lookahead)
    resolved: dict[str, list[Rule]] = {}
    for q in order:
        out: list[Rule] = []
        for rule in M.rules_for(q):
            if not rule.is_epsilon:
                out.append(rule)
                continue
            p = rule.lhs.label
            if p in variables(rule.rhs):
                for r2 in resolved[p]:
                    out.append(Rule(r2.lhs, q, substitute(rule.rhs, {p: r2.rhs})))
            else:
                # a deleting ε-rule only asks for the look-ahead of p
                A = M.la(p)
                names = sorted(A.states, key=repr)
                for sym, args, target in sorted(A.transitions, key=repr):
                    if target not in A.final:
                        continue
                    kids = []
                    for j, s in enumerate(args, 1):
                        name = f"{p}_la{j}_{names.index(s)}"
                        if name not in lookahead:
                            _check_fresh([name], set(M.states) | set(M.input) | set(M.output), "state")
                            states.append(name)
                            lookahead[name] = TreeAutomaton(A.alphabet, A.states, {s}, A.transitions)
                        kids.append(Tree.var(name))
                    out.append(Rule(Tree(sym, kids), q, rule.rhs))
        seen = set()
        resolved[q] = [r for r in out if not (r in seen or seen.add(r))]
    new_rules = []
    seen = set()
    # keep the original order: expand each rule where it stood
    for rule in M.rules:
        if rule.state in seen:
            continue
        seen.add(rule.state)
        new_rules.extend(resolved[rule.state])
    return M.replace(states=tuple(states), rules=tuple(new_rules), lookahead=lookahead)


def left_compose_hom(d: TreeHomomorphism, M: Transducer, name: str | None = None) -> Transducer:
    """A transducer for d ; M, with d a linear strict delabeling."""
    props = classify_hom(d)
    missing = {"linear", "strict", "delabeling"} - props
    if missing:
        raise ConstructionError(f"homomorphism {d.name} is not {', '.join(sorted(missing))}")
    flags = classify(M)
    if not {"eps_free", "strict"} <= flags:
        raise ConstructionError(f"{M.name} must be epsilon-free and strict")
    if not d.target.issubset(M.input):
        raise ConstructionError(f"target of {d.name} does not match the input alphabet of {M.name}")
    patterns = [sorted(preimage_patterns(d, r.lhs, sys.maxsize), key=tree_key) for r in M.rules]
    m = max((t.size for ps in patterns for t in ps), default=0)
    fresh = [str(i) for i in range(1, m + 1)]
    _check_fresh(fresh, M.states, "state")
    rules = []
    for rule, ps in zip(M.rules, patterns):
        rules.extend(Rule(ell, rule.state, rule.rhs) for ell in ps)
    la: dict = {}
    for q in M.states:
        A = M.la(q)
        la[q] = universal(d.source) if is_structurally_universal(A) else inverse_hom_image(A, d)
    for i in fresh:
        la[i] = universal(d.source)
    return Transducer(
        name or f"{d.name}_{M.name}", tuple(M.states) + tuple(fresh), d.source, M.output, M.initial, tuple(rules), la
    )
