"""Linear extended top-down tree transducers with regular look-ahead."""

from .terms import RankedAlphabet, Tree, parse_term, format_term
from .automata import TreeAutomaton
from .homs import TreeHomomorphism, Bimorphism
from .model import Rule, Transducer, classify, validate, rule_links
from .derive import translate, enumerate_dep, pipeline_translate
from .corpus import builtin

__version__ = "0.1.0"

__all__ = [
    "RankedAlphabet",
    "Tree",
    "parse_term",
    "format_term",
    "TreeAutomaton",
    "TreeHomomorphism",
    "Bimorphism",
    "Rule",
    "Transducer",
    "classify",
    "validate",
    "rule_links",
    "translate",
    "enumerate_dep",
    "pipeline_translate",
    "builtin",
]
