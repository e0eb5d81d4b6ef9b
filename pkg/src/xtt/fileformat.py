"""Reading and writing the line-based file format.

A document holds any number of blocks, each introduced by a keyword line:

    automaton NAME      alphabet / states / final / trans lines
    hom NAME            source / target / map lines
    transducer NAME     input / output / states / initial / rule / lookahead lines
    bimorphism NAME     center / input / output lines

``#`` starts a comment.  ``format_document`` emits the canonical form:
blocks separated by one blank line, automata used as look-ahead first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .automata import TreeAutomaton, contains_symbol, is_structurally_universal, lacks_symbol, universal
from .homs import Bimorphism, TreeHomomorphism
from .model import Rule, Transducer
from .terms import NAME_RE, RankedAlphabet, TermSyntaxError, Tree, parse_term

__all__ = [
    "Document",
    "FormatError",
    "parse_document",
    "load_document",
    "format_document",
    "format_transducer",
    "format_automaton",
    "format_hom",
]

_RULE = re.compile(r"^rule\s+(?P<lhs>.+?)\s*-\[(?P<states>[^\]]*)\]->\s*(?P<rhs>.+)$")
_TRANS = re.compile(r"^trans\s+(?P<lhs>.+?)\s*->\s*(?P<target>\S+)$")
_MAP = re.compile(r"^map\s+(?P<sym>\S+)\s*->\s*(?P<image>.+)$")
_BLOCKS = ("automaton", "hom", "transducer", "bimorphism")


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass
class Document:
    automata: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)
    transducers: dict = field(default_factory=dict)
    bimorphisms: dict = field(default_factory=dict)

    def transducer(self, name: str | None = None) -> Transducer:
        if name is None:
            if len(self.transducers) != 1:
                raise FormatError(f"expected exactly one transducer, found {len(self.transducers)}")
            return next(iter(self.transducers.values()))
        try:
            return self.transducers[name]
        except KeyError:
            raise FormatError(f"no transducer named {name}") from None


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _names(text: str, lineno: int) -> list[str]:
    out = text.split()
    for n in out:
        if not NAME_RE.match(n):
            raise FormatError(f"invalid name {n!r}", lineno)
    return out


def _split_blocks(text: str):
    blocks: list[tuple[str, str, int, list]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        key, _, rest = line.partition(" ")
        if key in _BLOCKS:
            name = rest.strip()
            if not NAME_RE.match(name):
                raise FormatError(f"{key} needs a name", lineno)
            blocks.append((key, name, lineno, []))
        elif not blocks:
            raise FormatError(f"expected a block header, found {key!r}", lineno)
        else:
            blocks[-1][3].append((lineno, key, rest.strip(), line))
    return blocks


def _alphabet(rest: str, lineno: int) -> RankedAlphabet:
    try:
        return RankedAlphabet.parse(rest)
    except ValueError as e:
        raise FormatError(str(e), lineno) from None


def _term(text: str, lineno: int, alphabet=None, states=()) -> Tree:
    try:
        return parse_term(text, alphabet, states)
    except TermSyntaxError as e:
        raise FormatError(str(e), lineno) from None


def _once(seen: dict, key: str, lineno: int):
    if key in seen:
        raise FormatError(f"duplicate {key} line", lineno)
    seen[key] = lineno


def _parse_automaton(name, header, lines) -> TreeAutomaton:
    seen: dict = {}
    alphabet = states = None
    final: list = []
    trans = []
    for lineno, key, rest, line in lines:
        if key == "alphabet":
            _once(seen, key, lineno)
            alphabet = _alphabet(rest, lineno)
        elif key == "states":
            _once(seen, key, lineno)
            states = _names(rest, lineno)
        elif key == "final":
            _once(seen, key, lineno)
            final = _names(rest, lineno)
            if states is not None and not set(final) <= set(states):
                raise FormatError(f"final states must be declared states: {', '.join(sorted(set(final) - set(states)))}", lineno)
        elif key == "trans":
            m = _TRANS.match(line)
            if not m or states is None or alphabet is None:
                raise FormatError("trans needs `sym(q1,...) -> q` after alphabet and states", lineno)
            lhs = _term(m.group("lhs"), lineno, states=states)
            if lhs.is_var or not all(c.is_var for c in lhs.children):
                raise FormatError("transition left side must be a symbol over states", lineno)
            trans.append((lhs.label, tuple(c.label for c in lhs.children), m.group("target")))
        else:
            raise FormatError(f"unexpected {key!r} in automaton block", lineno)
    if alphabet is None or states is None:
        raise FormatError(f"automaton {name} needs alphabet and states lines", header)
    try:
        return TreeAutomaton(alphabet, frozenset(states), frozenset(final), frozenset(trans), name)
    except ValueError as e:
        raise FormatError(f"automaton {name}: {e}", header) from None


def _parse_hom(name, header, lines) -> TreeHomomorphism:
    seen: dict = {}
    source = target = None
    images = {}
    for lineno, key, rest, line in lines:
        if key in ("source", "target"):
            _once(seen, key, lineno)
            if key == "source":
                source = _alphabet(rest, lineno)
            else:
                target = _alphabet(rest, lineno)
        elif key == "map":
            m = _MAP.match(line)
            if not m or source is None or target is None:
                raise FormatError("map needs `sym -> term` after source and target", lineno)
            sym = m.group("sym")
            if sym not in source:
                raise FormatError(f"map for unknown symbol {sym}", lineno)
            if sym in images:
                raise FormatError(f"duplicate map for {sym}", lineno)
            xs = [f"x{i}" for i in range(1, source.rank(sym) + 1)]
            images[sym] = _term(m.group("image"), lineno, target, xs)
        else:
            raise FormatError(f"unexpected {key!r} in hom block", lineno)
    if source is None or target is None:
        raise FormatError(f"hom {name} needs source and target lines", header)
    try:
        return TreeHomomorphism(name, source, target, images)
    except ValueError as e:
        raise FormatError(str(e), header) from None


def _parse_transducer(name, header, lines, automata) -> Transducer:
    seen: dict = {}
    sigma = delta = None
    states: list | None = None
    initial: list = []
    rules: list[Rule] = []
    la: dict = {}
    for lineno, key, rest, line in lines:
        if key in ("input", "output"):
            _once(seen, key, lineno)
            if key == "input":
                sigma = _alphabet(rest, lineno)
            else:
                delta = _alphabet(rest, lineno)
        elif key == "states":
            _once(seen, key, lineno)
            states = _names(rest, lineno)
        elif key == "initial":
            _once(seen, key, lineno)
            initial = _names(rest, lineno)
        elif key == "rule":
            if sigma is None or delta is None or states is None:
                raise FormatError("rule lines must follow input, output and states", lineno)
            m = _RULE.match(line)
            if not m:
                raise FormatError("rule needs `lhs -[q,...]-> rhs`", lineno)
            lhs = _term(m.group("lhs"), lineno, sigma, states)
            rhs = _term(m.group("rhs"), lineno, delta, states)
            heads = [s.strip() for s in m.group("states").split(",")]
            if not heads or any(not NAME_RE.match(h) for h in heads):
                raise FormatError("rule header needs one or more state names", lineno)
            rules.extend(Rule(lhs, h, rhs) for h in heads)
        elif key == "lookahead":
            if sigma is None:
                raise FormatError("lookahead lines must follow the input line", lineno)
            q, eq, la_text = rest.partition("=")
            q, la_text = q.strip(), la_text.split()
            if not eq or not la_text:
                raise FormatError("lookahead needs `q = any | contains sym | lacks sym | NAME`", lineno)
            if q in la:
                raise FormatError(f"duplicate lookahead for {q}", lineno)
            try:
                if la_text == ["any"]:
                    la[q] = universal(sigma)
                elif la_text[0] in ("contains", "lacks") and len(la_text) == 2:
                    build = contains_symbol if la_text[0] == "contains" else lacks_symbol
                    la[q] = build(sigma, la_text[1])
                elif len(la_text) == 1 and la_text[0] in automata:
                    la[q] = automata[la_text[0]]
                else:
                    raise FormatError(f"unknown look-ahead {' '.join(la_text)!r}", lineno)
            except ValueError as e:
                if isinstance(e, FormatError):
                    raise
                raise FormatError(str(e), lineno) from None
        else:
            raise FormatError(f"unexpected {key!r} in transducer block", lineno)
    if sigma is None or delta is None or states is None:
        raise FormatError(f"transducer {name} needs input, output and states lines", header)
    return Transducer(name, tuple(states), sigma, delta, frozenset(initial), tuple(rules), la)


def _parse_bimorphism(name, header, lines, doc: Document) -> Bimorphism:
    refs = {}
    for lineno, key, rest, line in lines:
        if key not in ("center", "input", "output"):
            raise FormatError(f"unexpected {key!r} in bimorphism block", lineno)
        _once(refs, key, lineno)
        refs[key] = (rest, lineno)
    if len(refs) != 3:
        raise FormatError(f"bimorphism {name} needs center, input and output lines", header)
    (cname, cl), (iname, il), (oname, ol) = refs["center"], refs["input"], refs["output"]
    if cname not in doc.automata:
        raise FormatError(f"unknown automaton {cname}", cl)
    for n, ln in ((iname, il), (oname, ol)):
        if n not in doc.homs:
            raise FormatError(f"unknown hom {n}", ln)
    try:
        return Bimorphism(name, doc.automata[cname], doc.homs[iname], doc.homs[oname])
    except ValueError as e:
        raise FormatError(str(e), header) from None


def parse_document(text: str) -> Document:
    doc = Document()
    blocks = _split_blocks(text)
    # automata and homs first, so later blocks may refer to them regardless of order
    for kind, name, header, lines in blocks:
        if kind == "automaton":
            target = doc.automata
            value = _parse_automaton(name, header, lines)
        elif kind == "hom":
            target = doc.homs
            value = _parse_hom(name, header, lines)
        else:
            continue
        if name in target:
            raise FormatError(f"duplicate {kind} {name}", header)
        target[name] = value
    for kind, name, header, lines in blocks:
        if kind == "transducer":
            target = doc.transducers
            value = _parse_transducer(name, header, lines, doc.automata)
        elif kind == "bimorphism":
            target = doc.bimorphisms
            value = _parse_bimorphism(name, header, lines, doc)
        else:
            continue
        if name in target:
            raise FormatError(f"duplicate {kind} {name}", header)
        target[name] = value
    return doc


def load_document(path) -> Document:
    return parse_document(Path(path).read_text())


# --- formatting ------------------------------------------------------------


def _state_order(A: TreeAutomaton) -> list:
    return sorted(A.states, key=lambda s: (str(type(s)), repr(s)))


def format_automaton(A: TreeAutomaton, name: str) -> str:
    if not all(isinstance(s, str) and NAME_RE.match(s) for s in A.states):
        A = A.renumber()
    order = sorted(A.states)
    lines = [f"automaton {name}", f"alphabet {A.alphabet}", f"states {' '.join(order)}"]
    lines.append(f"final {' '.join(sorted(A.final))}".rstrip())
    for sym, args, target in sorted(A.transitions, key=lambda tr: (tr[0], tr[1], tr[2])):
        lhs = f"{sym}({','.join(args)})" if args else sym
        lines.append(f"trans {lhs} -> {target}")
    return "\n".join(lines) + "\n"


def format_hom(h: TreeHomomorphism) -> str:
    lines = [f"hom {h.name}", f"source {h.source}", f"target {h.target}"]
    lines += [f"map {sym} -> {image}" for sym, image in h.images.items()]
    return "\n".join(lines) + "\n"


def _la_name(A: TreeAutomaton, sigma: RankedAlphabet) -> str | None:
    """Short spelling for builder-made look-ahead, or None."""
    if A == universal(sigma):
        return "any"
    for sym in sigma:
        if A == contains_symbol(sigma, sym):
            return f"contains {sym}"
        if A == lacks_symbol(sigma, sym):
            return f"lacks {sym}"
    return None


def _transducer_parts(M: Transducer, known: dict | None = None) -> tuple[list[str], str]:
    """(automaton blocks, transducer block) for one transducer.

    ``known`` maps names of automata already emitted to the automata.
    """
    known = known or {}
    lines = [
        f"transducer {M.name}",
        f"input {M.input}",
        f"output {M.output}",
        f"states {' '.join(M.states)}",
        f"initial {' '.join(q for q in M.states if q in M.initial)}".rstrip(),
    ]
    i = 0
    rules = M.rules
    while i < len(rules):
        j = i + 1
        while j < len(rules) and rules[j].lhs == rules[i].lhs and rules[j].rhs == rules[i].rhs:
            j += 1
        heads = ",".join(r.state for r in rules[i:j])
        lines.append(f"rule {rules[i].lhs} -[{heads}]-> {rules[i].rhs}")
        i = j
    extra: list[str] = []
    for q in M.states:
        A = M.lookahead.get(q)
        if A is None:
            continue
        la_name = _la_name(A, M.input)
        if la_name == "any":
            continue
        if la_name is None and is_structurally_universal(A) and len(A.states) == 1:
            continue
        if la_name is None:
            la_name = next((n for n, B in known.items() if B == A), None)
        if la_name is None:
            la_name = A.label if A.label and NAME_RE.match(A.label) else f"{M.name}_la_{q}"
            extra.append(format_automaton(A, la_name))
        lines.append(f"lookahead {q} = {la_name}")
    return extra, "\n".join(lines) + "\n"


def format_transducer(M: Transducer) -> str:
    extra, block = _transducer_parts(M)
    return "\n".join(extra + [block])


def format_document(doc: Document) -> str:
    blocks = [format_automaton(A, n) for n, A in doc.automata.items()]
    blocks += [format_hom(h) for h in doc.homs.values()]
    tblocks = []
    for M in doc.transducers.values():
        extra, block = _transducer_parts(M, doc.automata)
        blocks += extra
        tblocks.append(block)
    blocks += tblocks
    for n, B in doc.bimorphisms.items():
        center = next((k for k, A in doc.automata.items() if A == B.center), None)
        if center is None:
            center = f"{n}_center"
            blocks.insert(0, format_automaton(B.center, center))
        blocks.append(
            f"bimorphism {n}\ncenter {center}\ninput {B.input_hom.name}\noutput {B.output_hom.name}\n"
        )
    return "\n".join(blocks)
