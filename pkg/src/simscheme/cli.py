"""Command line front end.  Every subcommand is a thin wrapper over one library call.

Exit status: 0 on success, 1 on a domain error (bad file, unknown point,
failed validation or audit), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Sequence, TextIO

from .address import (
    Verdict,
    format_address,
    gamma_contains,
    hat_related,
    parse_address,
    related,
    shadow,
)
from .audit import lemma_audit
from .fixedpoint import (
    Pair,
    apply_functor,
    injectivity_report,
    is_fixed_point,
    shift_injective,
    shift_map,
)
from .scheme import SchemeError, essential_part, is_discrete, random_scheme, validate
from .textio import export_graph, parse_pair, parse_scheme, serialize_pair, word_label
from .tower import Tower, TowerError, cell


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simscheme", description="Finite approximations of self-similar spaces.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name: str, help: str, *flags: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--scheme", metavar="FILE", required=name != "audit")
        for flag in flags:
            if flag in ("depth", "level", "max-level", "seed"):
                p.add_argument(f"--{flag}", type=_nonneg)
            elif flag == "format":
                p.add_argument("--format", choices=("dot", "structured"), default="dot")
            else:
                p.add_argument(f"--{flag}")
        return p

    add("validate", "check phi injective and pi surjective")
    add("build", "print level sizes", "depth")
    add("cell", "members of the cell of a word", "word")
    add("shadow", "truncated address tree of a point", "level", "point", "depth")
    add("member", "whether an address lands on a point", "level", "point", "addr")
    add("relate", "decide whether two addresses are identified", "addr", "addr2", "max-level")
    add("hat-relate", "one-step-unfolded relation", "addr", "addr2", "max-level")
    add("functor", "apply the scheme to a pair", "pair")
    add("fixed-point", "test whether a pair is fixed by the scheme", "pair")
    add("shift", "the shift map of a symbol on a level", "word", "level")
    add("report", "discreteness, gluing locus and injectivity", "depth")
    add("audit", "exhaustive structural checks of the tower", "depth", "seed")
    add("export", "approximation graph of a level", "level", "format")
    return parser


def _need(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise UsageError(f"{args.command}: --{name} is required")


def _load(args: argparse.Namespace):
    text = Path(args.scheme).read_text(encoding="utf-8")
    return parse_scheme(text)


def _verdict_line(scheme, tower: Tower, ev) -> str:
    if ev.verdict is Verdict.RELATED:
        if ev.witness is not None:
            n, x = ev.witness
            return f"RELATED witness level={n} point={tower.upto(n).label(n, x)}"
        if ev.glue is not None:
            x, x2 = ev.glue
            return f"RELATED glued x0={scheme.X0[x]} x0'={scheme.X0[x2]}"
        return f"RELATED {ev.reason}"
    if ev.verdict is Verdict.UNRELATED:
        return f"UNRELATED {ev.reason}"
    return f"UNKNOWN_UP_TO_BOUND max-level={ev.bound} ({ev.reason})"


def cmd_validate(args, out: TextIO) -> int:
    report = validate(_load(args))
    if report.ok:
        print("OK", file=out)
        return 0
    print("INVALID", file=out)
    for rule, msg in report.violations:
        print(f"{rule}: {msg}", file=out)
    return 1


def cmd_build(args, out: TextIO) -> int:
    depth = 4 if args.depth is None else args.depth
    tower = Tower.build(_load(args), depth)
    print("levels: " + " ".join(str(s) for s in tower.sizes()), file=out)
    return 0


def cmd_cell(args, out: TextIO) -> int:
    _need(args, "word")
    scheme = _load(args)
    word = scheme.parse_word(args.word)
    tower = Tower.build(scheme, len(word))
    c = cell(tower, word)
    names = " ".join(tower.label(len(word), x) for x in sorted(c.members))
    print(f"cell {word_label(scheme, word)} level={len(word)}: {names}", file=out)
    return 0


def cmd_shadow(args, out: TextIO) -> int:
    _need(args, "level", "point", "depth")
    scheme = _load(args)
    tower = Tower.build(scheme, args.level)
    x = tower.point(args.level, args.point)
    tree = shadow(tower, args.level, x, args.depth)
    leaves = tree.leaves()
    print(f"shadow level={args.level} point={tower.label(args.level, x)} depth={args.depth} leaves={len(leaves)}", file=out)
    for w in leaves:
        print(word_label(scheme, w), file=out)
    return 0


def cmd_member(args, out: TextIO) -> int:
    _need(args, "level", "point", "addr")
    scheme = _load(args)
    tower = Tower.build(scheme, args.level)
    x = tower.point(args.level, args.point)
    addr = parse_address(scheme, args.addr)
    inside = gamma_contains(tower, args.level, x, addr)
    print(f"{'MEMBER' if inside else 'NOT MEMBER'} {format_address(scheme, addr)}", file=out)
    return 0


def _relation(args, out: TextIO, decide: Callable) -> int:
    _need(args, "addr", "addr2")
    scheme = _load(args)
    maxlevel = 6 if args.max_level is None else args.max_level
    a1, a2 = parse_address(scheme, args.addr), parse_address(scheme, args.addr2)
    tower = Tower(scheme)
    ev = decide(tower, a1, a2, maxlevel)
    print(_verdict_line(scheme, tower, ev), file=out)
    return 0


def _pair(args, scheme) -> Pair:
    if args.pair is None:
        return Pair.identity(scheme)
    return parse_pair(Path(args.pair).read_text(encoding="utf-8"), scheme)


def cmd_functor(args, out: TextIO) -> int:
    scheme = _load(args)
    validate_or_raise(scheme)
    image = apply_functor(scheme, _pair(args, scheme))
    out.write(serialize_pair(scheme, image))
    return 0


def cmd_fixed_point(args, out: TextIO) -> int:
    _need(args, "pair")
    scheme = _load(args)
    validate_or_raise(scheme)
    pair = _pair(args, scheme)
    witness = is_fixed_point(scheme, pair)
    if witness is None:
        size = len(apply_functor(scheme, pair).Z)
        print(f"NOT A FIXED POINT (|Z|={len(pair.Z)}, image size {size})", file=out)
    else:
        print(f"FIXED POINT, iso: {witness.describe(pair, apply_functor(scheme, pair))}", file=out)
    return 0


def cmd_shift(args, out: TextIO) -> int:
    _need(args, "word", "level")
    scheme = _load(args)
    word = scheme.parse_word(args.word)
    if len(word) != 1:
        raise UsageError("shift: --word must be a single symbol")
    y, n = word[0], args.level
    tower = Tower.build(scheme, n + 1)
    images = shift_map(tower, y, n)
    for x, v in enumerate(images):
        print(f"{tower.label(n, x)} ↦ {tower.label(n + 1, v)}", file=out)
    print(f"injective: {'yes' if shift_injective(tower, y, n) else 'no'}", file=out)
    return 0


def cmd_report(args, out: TextIO) -> int:
    scheme = _load(args)
    depth = 4 if args.depth is None else args.depth
    tower = Tower(scheme)
    discrete, witness = is_discrete(scheme)
    print(f"discrete: {'yes' if discrete else 'no'}", file=out)
    if witness is not None:
        y, p, q = witness
        print(f"  cell of {y} meets phi(X0) in {p} and {q}", file=out)
    gluing = [x for x in scheme.X0 if x in essential_part(scheme)]
    print("essential part: " + (" ".join(gluing) if gluing else "∅"), file=out)
    report = injectivity_report(tower, depth)
    print(f"injectivity: {report.status.value} depth={report.depth}", file=out)
    if report.violation is not None:
        v = report.violation
        t = tower.upto(v.level)
        print(
            f"  level {v.level}: {t.label(v.level, v.x)} and {t.label(v.level, v.x2)}"
            f" share {format_address(scheme, v.address)}",
            file=out,
        )
    elif report.detail:
        print(f"  {report.detail}", file=out)
    return 0


def cmd_audit(args, out: TextIO) -> int:
    if args.seed is not None:
        scheme = random_scheme(args.seed)
    elif args.scheme is not None:
        scheme = _load(args)
    else:
        raise UsageError("audit: --scheme or --seed is required")
    depth = 4 if args.depth is None else args.depth
    report = lemma_audit(Tower(scheme), depth)
    for check, count in report.counts.items():
        status = "skipped" if check in report.skipped else str(count)
        print(f"{check}: {status}", file=out)
    for check, msg in report.counterexamples:
        print(f"COUNTEREXAMPLE {check}: {msg}", file=out)
    print("PASS" if report.ok else "FAIL", file=out)
    return 0 if report.ok else 1


def cmd_export(args, out: TextIO) -> int:
    _need(args, "level")
    tower = Tower.build(_load(args), args.level)
    out.write(export_graph(tower, args.level, args.format))
    return 0


def validate_or_raise(scheme) -> None:
    report = validate(scheme)
    if not report.ok:
        raise SchemeError("; ".join(msg for _, msg in report.violations))


COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate,
    "build": cmd_build,
    "cell": cmd_cell,
    "shadow": cmd_shadow,
    "member": cmd_member,
    "relate": lambda args, out: _relation(args, out, related),
    "hat-relate": lambda args, out: _relation(args, out, hat_related),
    "functor": cmd_functor,
    "fixed-point": cmd_fixed_point,
    "shift": cmd_shift,
    "report": cmd_report,
    "audit": cmd_audit,
    "export": cmd_export,
}


def run_cli(argv: Sequence[str], out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=err)
        print(f"error: {exc}", file=err)
        return 2
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 2
    except (SchemeError, TowerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
