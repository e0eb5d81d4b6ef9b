"""Command-line interface: ``xtt <command> ...``.

Exit codes: 0 success, 1 domain error (invalid input, cap exceeded, a
failed check), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analyze, construct, corpus, derive
from .automata import AlphabetMismatch
from .fileformat import Document, FormatError, format_document, format_transducer, load_document, parse_document
from .homs import HomError, evaluate_bimorphism
from .model import FLAGS, ModelError, classify, validate
from .terms import TermSyntaxError, format_position, parse_term, sorted_trees, tree_key

DEFAULT_MAX_SIZE = 8
DEFAULT_MAX_STEPS = 10000
DEFAULT_DEP_STEPS = 12
DEFAULT_LA_CAP = 4


class DomainError(Exception):
    pass


# --- loading -------------------------------------------------------------


def _load_doc(source: str) -> Document:
    if source in corpus.BUILTINS and not Path(source).exists():
        return parse_document(corpus.builtin_source(source))
    try:
        return load_document(source)
    except FileNotFoundError:
        raise DomainError(f"no such file or built-in: {source}") from None


def _load_transducer(source: str, name: str | None = None):
    return _load_doc(source).transducer(name)


def _read_term(text: str, alphabet=None):
    if text == "-":
        text = sys.stdin.read()
    return parse_term(text.strip(), alphabet)


def _flag(name: str) -> str:
    return name.replace("_", "-")


def _emit(args, text: str, data):
    out = json.dumps(data, indent=2, sort_keys=True) if args.json else text
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)


# --- commands ------------------------------------------------------------


def cmd_validate(args):
    M = _load_transducer(args.file, args.name)
    diags = validate(M)
    _emit(args, "\n".join(diags) if diags else "ok", {"transducer": M.name, "diagnostics": diags})
    return 1 if diags else 0


def cmd_classify(args):
    M = _load_transducer(args.file, args.name)
    flags = classify(M)
    names = [_flag(f) for f in FLAGS if f in flags]
    _emit(args, " ".join(names), {"transducer": M.name, "flags": names})
    return 0


def _results_sorted(results):
    return sorted(results, key=lambda r: (tree_key(r[1]), derive.links_key(r[0])))


def cmd_translate(args):
    M = _load_transducer(args.file, args.name)
    t = _read_term(args.input, M.input)
    results = _results_sorted(derive.translate(M, t, args.max_steps))
    lines = []
    for D, u in results:
        if args.show_links:
            lines.append(f"links: {derive.format_links(D)}")
        lines.append(str(u))
    data = {
        "input": str(t),
        "results": [
            {"output": str(u), "links": [[format_position(v), format_position(w)] for v, w in derive.links_key(D)]}
            for D, u in results
        ],
    }
    _emit(args, "\n".join(lines) if lines else "(no translation)", data)
    return 0


def cmd_enumerate_dep(args):
    M = _load_transducer(args.file, args.name)
    triples = derive.enumerate_dep(M, args.max_steps, args.la_cap)
    _emit(args, derive.format_dep(triples) or "(none)", {"triples": [t.to_json() for t in triples]})
    return 0


def cmd_pipeline(args):
    chain = [_load_transducer(args.file)] + [_load_transducer(f) for f in args.then]
    t = _read_term(args.input, chain[0].input)
    outs = sorted_trees(derive.pipeline_translate(chain, t, args.max_steps))
    _emit(args, "\n".join(map(str, outs)) or "(no output)", {"input": str(t), "outputs": [str(u) for u in outs]})
    return 0


def _emit_transducers(args, machines):
    doc = Document(transducers={M.name: M for M in machines})
    text = format_document(doc).rstrip("\n")
    _emit(args, text, {"document": text + "\n", "transducers": [M.name for M in machines]})


def cmd_decompose(args):
    M = _load_transducer(args.file, args.name)
    res = construct.decompose(M)
    machines = ([res.raw_front] if args.raw else []) + [res.front, res.back]
    _emit_transducers(args, machines)
    return 0


def cmd_eliminate_eps(args):
    M = _load_transducer(args.file, args.name)
    _emit_transducers(args, [construct.eliminate_epsilon(M)])
    return 0


def cmd_left_compose(args):
    homdoc = _load_doc(args.homfile)
    if args.hom:
        if args.hom not in homdoc.homs:
            raise DomainError(f"no hom named {args.hom}")
        d = homdoc.homs[args.hom]
    elif len(homdoc.homs) == 1:
        d = next(iter(homdoc.homs.values()))
    else:
        raise DomainError("several homs in file; pick one with --hom")
    M = _load_transducer(args.file, args.name)
    _emit_transducers(args, [construct.left_compose_hom(d, M)])
    return 0


def _dep_links(args):
    M = _load_transducer(args.file, args.name)
    return M, derive.enumerate_dep(M, args.max_steps, args.la_cap)


def cmd_check_links(args):
    M, triples = _dep_links(args)
    bad = [t for t in triples if not analyze.is_hierarchical(t.links)]
    text = f"{len(triples)} link structures, {len(bad)} not hierarchical"
    if bad:
        text += "\n" + derive.format_dep(bad)
    _emit(args, text, {"count": len(triples), "violations": [t.to_json() for t in bad]})
    return 1 if bad else 0


def cmd_min_distance(args):
    M, triples = _dep_links(args)
    Ds = [t.links for t in triples]
    k_in = analyze.min_bounded_distance(Ds, "input")
    k_out = analyze.min_bounded_distance(Ds, "output")
    h_in, h_out = M.max_lhs_height(), M.max_rhs_height()
    if args.k is not None:
        h_in = h_out = args.k
    text = f"input {k_in} (bound {h_in})\noutput {k_out} (bound {h_out})"
    _emit(args, text, {"input": k_in, "output": k_out, "input_bound": h_in, "output_bound": h_out, "samples": len(Ds)})
    return 0 if (k_in <= h_in and k_out <= h_out) else 1


def cmd_sp_levels(args):
    t = _read_term(args.tree)
    report = analyze.sp_levels(t, args.ell, args.nmax)
    _emit(args, report.format(), report.to_json())
    return 0


def cmd_level_drop(args):
    doc = _load_doc(args.file)
    if args.name:
        if args.name not in doc.bimorphisms:
            raise DomainError(f"no bimorphism named {args.name}")
        B = doc.bimorphisms[args.name]
    elif len(doc.bimorphisms) == 1:
        B = next(iter(doc.bimorphisms.values()))
    else:
        raise DomainError("several bimorphisms in file; pick one with --name")
    pairs = evaluate_bimorphism(B, args.max_size)
    bad = sorted(analyze.check_level_drop(pairs, args.ell, args.n), key=lambda p: (tree_key(p[0]), tree_key(p[1])))
    text = f"{len(pairs)} pairs, {len(bad)} violations"
    for t, u in bad:
        text += f"\n{t} => {u}"
    _emit(args, text, {"pairs": len(pairs), "violations": [[str(t), str(u)] for t, u in bad]})
    return 1 if bad else 0


def cmd_gen_L(args):
    trees = sorted_trees(corpus.generate_L(args.i, args.max_size))
    _emit(args, "\n".join(map(str, trees)), {"i": args.i, "trees": [str(t) for t in trees]})
    return 0


def cmd_fixtures(args):
    if args.name is None:
        _emit(args, "\n".join(corpus.BUILTINS), {"builtins": list(corpus.BUILTINS)})
        return 0
    text = format_transducer(corpus.builtin(args.name)).rstrip("\n")
    _emit(args, text, {"name": args.name, "document": text + "\n"})
    return 0


# --- parser --------------------------------------------------------------


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("expected a nonnegative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--out", help="write output to this file")

    p = argparse.ArgumentParser(prog="xtt", description="Linear extended top-down tree transducer toolkit.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text, transducer=True):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if transducer:
            sp.add_argument("file", help="transducer file or built-in name (" + ", ".join(corpus.BUILTINS) + ")")
            sp.add_argument("--name", help="transducer to use when the file holds several")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check well-formedness")
    add("classify", cmd_classify, "print syntactic class flags")

    sp = add("translate", cmd_translate, "all outputs for one input tree")
    sp.add_argument("--input", required=True, help="input term, or - for stdin")
    sp.add_argument("--show-links", action="store_true", help="print link structures")
    sp.add_argument("--max-steps", type=_nonneg, default=DEFAULT_MAX_STEPS, help=f"derivation length cap (default {DEFAULT_MAX_STEPS})")

    for name, func, text in (
        ("enumerate-dep", cmd_enumerate_dep, "bounded enumeration of dependency triples"),
        ("check-links", cmd_check_links, "check that enumerated link structures are hierarchical"),
        ("min-distance", cmd_min_distance, "least bounded distance of enumerated link structures"),
    ):
        sp = add(name, func, text)
        sp.add_argument("--max-steps", type=_nonneg, default=DEFAULT_DEP_STEPS, help=f"derivation steps (default {DEFAULT_DEP_STEPS})")
        sp.add_argument("--la-cap", type=_nonneg, default=DEFAULT_LA_CAP, help=f"look-ahead tree size cap (default {DEFAULT_LA_CAP})")
        if name == "min-distance":
            sp.add_argument("--k", type=_nonneg, help="distance bound to check on both sides (default: max rule heights)")

    sp = add("pipeline", cmd_pipeline, "run transducers left to right", transducer=False)
    sp.add_argument("file", help="first transducer")
    sp.add_argument("--then", action="append", default=[], help="next transducer (repeatable)")
    sp.add_argument("--input", required=True, help="input term, or - for stdin")
    sp.add_argument("--max-steps", type=_nonneg, default=DEFAULT_MAX_STEPS, help=f"per-stage cap (default {DEFAULT_MAX_STEPS})")

    sp = add("decompose", cmd_decompose, "front/back decomposition of an epsilon-free transducer")
    sp.add_argument("--raw", action="store_true", help="also print the front before epsilon elimination")
    add("eliminate-eps", cmd_eliminate_eps, "remove epsilon rules")

    sp = add("left-compose", cmd_left_compose, "compose a strict delabeling homomorphism before a transducer", transducer=False)
    sp.add_argument("homfile", help="file with hom blocks")
    sp.add_argument("file", help="transducer file or built-in name")
    sp.add_argument("--hom", help="hom to use when the file holds several")
    sp.add_argument("--name", help="transducer to use when the file holds several")

    sp = add("sp-levels", cmd_sp_levels, "level sets of a tree", transducer=False)
    sp.add_argument("--tree", required=True, help="term, or - for stdin")
    sp.add_argument("--ell", type=_nonneg, default=2)
    sp.add_argument("--nmax", type=_nonneg, default=2)

    sp = add("level-drop", cmd_level_drop, "check the level drop bound on bimorphism pairs", transducer=False)
    sp.add_argument("file", help="file with a bimorphism block")
    sp.add_argument("--name", help="bimorphism to use")
    sp.add_argument("--ell", type=_nonneg, required=True)
    sp.add_argument("--n", type=_nonneg, default=0)
    sp.add_argument("--max-size", type=_nonneg, default=DEFAULT_MAX_SIZE, help="center tree size bound")

    sp = add("gen-L", cmd_gen_L, "members of L_i up to a size bound", transducer=False)
    sp.add_argument("--i", type=_nonneg, required=True)
    sp.add_argument("--max-size", type=_nonneg, default=DEFAULT_MAX_SIZE)

    sp = add("fixtures", cmd_fixtures, "list built-ins or print one in canonical form", transducer=False)
    sp.add_argument("name", nargs="?", choices=corpus.BUILTINS)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, FormatError, TermSyntaxError, ModelError, HomError, AlphabetMismatch,
            construct.ConstructionError, derive.StepCapExceeded, corpus.WitnessCapExceeded) as e:
        print(f"xtt: error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"xtt: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
