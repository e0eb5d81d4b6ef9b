"""Link-structure properties and level (SP) computations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .terms import Tree, format_position, is_prefix, subtree_at

__all__ = [
    "is_input_hierarchical",
    "is_output_hierarchical",
    "is_hierarchical",
    "invert",
    "min_bounded_distance",
    "branch_positions",
    "branch_path",
    "SpReport",
    "sp_levels",
    "check_level_drop",
]


def _strict_prefix(v, w) -> bool:
    return len(v) < len(w) and is_prefix(v, w)


def invert(D) -> frozenset:
    return frozenset((w, v) for v, w in D)


def is_input_hierarchical(D) -> bool:
    links = sorted(D)
    for v1, w1 in links:
        for v2, w2 in links:
            if _strict_prefix(v1, v2) and not is_prefix(w1, w2):
                return False
            if v1 == v2 and not (is_prefix(w1, w2) or is_prefix(w2, w1)):
                return False
    return True


def is_output_hierarchical(D) -> bool:
    return is_input_hierarchical(invert(D))


def is_hierarchical(D) -> bool:
    return is_input_hierarchical(D) and is_output_hierarchical(D)


def _distance_one(D) -> int:
    """Least k for one link structure, input side.

    For nested sources v ≺ vv'' the intermediate link must sit strictly
    below v (v' ≠ ε); with v' = ε allowed every k would do.
    """
    sources = sorted({v for v, _ in D})
    source_set = set(sources)
    k = 0
    for v in sources:
        for x in sources:
            if not _strict_prefix(v, x):
                continue
            # shortest nonempty prefix v' of x[len(v):] with v.v' a link source
            for n in range(len(v) + 1, len(x) + 1):
                if x[:n] in source_set:
                    k = max(k, n - len(v))
                    break
    return k


def min_bounded_distance(Ds: Iterable, side: str = "input") -> int:
    if side not in ("input", "output"):
        raise ValueError("side must be 'input' or 'output'")
    best = 0
    for D in Ds:
        best = max(best, _distance_one(D if side == "input" else invert(D)))
    return best


def branch_positions(t: Tree) -> frozenset:
    out = set()
    for w, node in t.walk():
        k = node.rank
        if k >= 2 and not node.is_var:
            out.update((w, i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j)
    return frozenset(out)


def _branching(t: Tree) -> frozenset:
    return frozenset(w for w, node in t.walk() if node.rank >= 2 and not node.is_var)


def branch_path(t: Tree, w: tuple, w2: tuple) -> frozenset:
    """Branching positions w.w' with w' a prefix of w2."""
    subtree_at(t, tuple(w) + tuple(w2))
    br = _branching(t)
    w, w2 = tuple(w), tuple(w2)
    return frozenset(w + w2[:n] for n in range(len(w2) + 1) if w + w2[:n] in br)


@dataclass
class SpReport:
    ell: int
    ssp: dict = field(default_factory=dict)  # n -> frozenset of (w, i, j)
    sp: dict = field(default_factory=dict)  # n -> frozenset of w

    def format(self) -> str:
        lines = []
        for n in sorted(self.sp):
            items = " ".join(format_position(w) for w in sorted(self.sp[n], key=lambda p: (len(p), p)))
            lines.append(f"SP^{self.ell}_{n}: {{{items}}}" if items else f"SP^{self.ell}_{n}: {{}}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "levels": [
                {
                    "n": n,
                    "sp": [format_position(w) for w in sorted(self.sp[n])],
                    "ssp": [[format_position(w), i, j] for w, i, j in sorted(self.ssp[n])],
                }
                for n in sorted(self.sp)
            ],
        }


def sp_levels(t: Tree, ell: int, n_max: int) -> SpReport:
    """SSP/SP sets for levels 0 .. n_max.

    The level sets of a subtree t|u are exactly the level sets of t below u
    shifted by u (by induction on n, every condition only looks downward),
    so one pass per level over t suffices.  At level n+1 a branching node
    qualifies through child i when some path from wi down to a level-n
    position of the subtree carries at least ell^(n+1) level-n positions.
    """
    if ell < 1 or n_max < 0:
        raise ValueError("need ell >= 1 and n_max >= 0")
    report = SpReport(ell)
    nodes = list(t.walk())
    ssp = branch_positions(t)
    report.ssp[0] = ssp
    report.sp[0] = frozenset(w for w, _, _ in ssp)
    for n in range(n_max):
        level = report.sp[n]
        need = ell ** (n + 1)
        # best[w]: most level-n positions on a downward path starting at w
        best: dict = {}
        for w, node in reversed(nodes):
            below = max((best[w + (i,)] for i in range(1, node.rank + 1)), default=0)
            best[w] = below + (1 if w in level else 0)
        nxt = set()
        for w, i, j in ssp:
            if best[w + (i,)] >= need and best[w + (j,)] >= need:
                nxt.add((w, i, j))
        report.ssp[n + 1] = frozenset(nxt)
        report.sp[n + 1] = frozenset(w for w, _, _ in nxt)
    return report


def check_level_drop(pairs, ell: int, n: int) -> frozenset:
    """Pairs whose input has a level-(n+1) position while the output has no level-n one."""
    bad = set()
    for t, u in pairs:
        if sp_levels(t, ell, n + 1).sp[n + 1] and not sp_levels(u, ell, n).sp[n]:
            bad.add((t, u))
    return frozenset(bad)
