"""Command-line surface: presentation parsing, queries, and the benchmark harness.

Exit codes: 0 decided/success, 2 parse or parameter error, 3 invalid
presentation, 4 conjugacy undecided.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from .fixtures import example_one_context, example_two_context
from .group import (
    AmalgamContext,
    CANONICAL,
    InvalidPresentationError,
    RepPolicy,
    build_context,
    classify,
    conjugacy_search,
    cyclic_form,
    normal_form,
    reduced_form,
    syllable_decompose,
)
from .words import Alphabet, Word, WordSyntaxError, format_word, parse_word

EXIT_OK = 0
EXIT_SYNTAX = 2
EXIT_INVALID = 3
EXIT_UNDECIDED = 4


class PresentationSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class PresentationFile:
    names_a: tuple[str, ...]
    names_b: tuple[str, ...]
    pair_texts: tuple[tuple[str, str], ...]

    def context(self) -> AmalgamContext:
        alphabet_a = Alphabet(self.names_a)
        alphabet_b = Alphabet(self.names_b)
        pairs = [
            (parse_word(u, alphabet_a), parse_word(v, alphabet_b))
            for u, v in self.pair_texts
        ]
        return build_context(alphabet_a, alphabet_b, pairs)


def parse_presentation(text: str) -> PresentationFile:
    """Line-oriented group file: one A: and B: line, one C: line per pair."""
    names_a: Optional[tuple[str, ...]] = None
    names_b: Optional[tuple[str, ...]] = None
    pair_texts: list[tuple[str, str]] = []
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise PresentationSyntaxError("expected 'A:', 'B:' or 'C:'", lineno)
        tag, rest = line.split(":", 1)
        tag = tag.strip()
        rest = rest.strip()
        if tag == "A" or tag == "B":
            if (tag == "A" and names_a is not None) or (
                tag == "B" and names_b is not None
            ):
                raise PresentationSyntaxError(f"duplicate {tag}: line", lineno)
            names = tuple(rest.split())
            if not names:
                raise PresentationSyntaxError(f"empty {tag}: line", lineno)
            if tag == "A":
                names_a = names
            else:
                names_b = names
        elif tag == "C":
            if "=" not in rest:
                raise PresentationSyntaxError("C: line needs 'word = word'", lineno)
            left, right = rest.split("=", 1)
            pair_texts.append((left.strip(), right.strip()))
        else:
            raise PresentationSyntaxError(f"unknown tag {tag!r}", lineno)
    if names_a is None:
        raise PresentationSyntaxError("missing A: line", 1)
    if names_b is None:
        raise PresentationSyntaxError("missing B: line", 1)
    if not pair_texts:
        raise PresentationSyntaxError("missing C: lines", 1)
    return PresentationFile(names_a, names_b, tuple(pair_texts))


def parse_group_word(text: str, ctx: AmalgamContext) -> Word:
    """Parse a word over the union alphabet of the presentation."""
    return parse_word(text, ctx.union_alphabet)


def _load_context(path: str) -> AmalgamContext:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PresentationSyntaxError(str(exc), 0)
    return parse_presentation(text).context()


def _parse_policy(text: str) -> RepPolicy:
    if text == "canonical":
        return CANONICAL
    if text.startswith("paper-ex1:"):
        try:
            p = int(text.split(":", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad policy {text!r}")
        return RepPolicy.paper_example_one(p)
    raise argparse.ArgumentTypeError(f"bad policy {text!r}")


# --- output helpers -----------------------------------------------------------


def _side_word(side: str, w: Word) -> dict:
    return {"side": side, "word": format_word(w)}


def _form_json(nf) -> list[dict]:
    return [_side_word(s.side, s.word) for s in nf.syllables]


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        base = {
            "verdict": None,
            "normal_form": None,
            "head": None,
            "conjugator": None,
            "trace": None,
            "reason": None,
        }
        base.update(payload)
        print(json.dumps(base, sort_keys=True))
    else:
        for line in lines:
            print(line)


# --- subcommands ----------------------------------------------------------------


def _cmd_validate(args) -> int:
    ctx = _load_context(args.group)
    lines = [
        "valid presentation",
        f"rank of C: {len(ctx.graph_ca.basis())}",
        f"malnormal in A: {ctx.malnormal_a}",
        f"malnormal in B: {ctx.malnormal_b}",
        f"double transversal sizes: A={len(ctx.transversal_a)} B={len(ctx.transversal_b)}",
    ]
    _emit(
        args,
        {
            "verdict": "valid",
            "reason": f"rank {len(ctx.graph_ca.basis())}, "
            f"malnormal A={ctx.malnormal_a} B={ctx.malnormal_b}",
        },
        lines,
    )
    return EXIT_OK


def _format_form(nf) -> str:
    head = format_word(nf.head) or "1"
    sylls = "  ".join(f"[{s.side}] {format_word(s.word)}" for s in nf.syllables)
    return f"head[{nf.head_side}] {head}" + (f"  {sylls}" if sylls else "")


def _cmd_nf(args) -> int:
    ctx = _load_context(args.group)
    w = parse_group_word(args.word, ctx)
    trace: list[int] = []
    nf = normal_form(ctx, w, args.policy, trace=trace)
    lines = [_format_form(nf), f"syllable length: {nf.syllable_length}"]
    if args.trace:
        lines.append("head lengths: " + " ".join(map(str, trace)))
    _emit(
        args,
        {
            "verdict": "ok",
            "normal_form": _form_json(nf),
            "head": _side_word(nf.head_side, nf.head),
            "trace": trace if args.trace else None,
        },
        lines,
    )
    return EXIT_OK


def _cmd_reduce(args) -> int:
    ctx = _load_context(args.group)
    w = parse_group_word(args.word, ctx)
    rf = reduced_form(ctx, syllable_decompose(ctx, w))
    lines = [_format_form(rf), f"syllable length: {rf.syllable_length}"]
    _emit(
        args,
        {
            "verdict": "ok",
            "normal_form": _form_json(rf),
            "head": _side_word(rf.head_side, rf.head),
        },
        lines,
    )
    return EXIT_OK


def _cmd_cyclic(args) -> int:
    ctx = _load_context(args.group)
    w = parse_group_word(args.word, ctx)
    cf = cyclic_form(ctx, w, args.policy)
    lines = [
        _format_form(cf.form),
        f"cyclic length: {cf.cyclic_length}",
        f"conjugator: {format_word(cf.conjugator) or '1'}",
    ]
    _emit(
        args,
        {
            "verdict": "ok",
            "normal_form": _form_json(cf.form),
            "head": _side_word(cf.form.head_side, cf.form.head),
            "conjugator": format_word(cf.conjugator),
        },
        lines,
    )
    return EXIT_OK


def _cmd_classify(args) -> int:
    ctx = _load_context(args.group)
    w = parse_group_word(args.word, ctx)
    report = classify(ctx, w, args.policy)
    lines = [report.verdict]
    if report.witness_kind:
        lines.append(f"witness ({report.witness_kind}):")
        lines.extend(
            f"  {name}[{side}] = {format_word(word) or '1'}"
            for name, side, word in report.witness
        )
    _emit(args, {"verdict": report.verdict, "reason": report.detail or None}, lines)
    return EXIT_OK


def _cmd_transversal(args) -> int:
    ctx = _load_context(args.group)
    lines = []
    for side, ts in (("A", ctx.transversal_a), ("B", ctx.transversal_b)):
        lines.append(
            f"N*_{side}(C): " + ", ".join(format_word(t) or "1" for t in ts)
        )
    _emit(
        args,
        {
            "verdict": "ok",
            "reason": json.dumps(
                {
                    "A": [format_word(t) for t in ctx.transversal_a],
                    "B": [format_word(t) for t in ctx.transversal_b],
                }
            ),
        },
        lines,
    )
    return EXIT_OK


def _cmd_conj(args) -> int:
    ctx = _load_context(args.group)
    u = parse_group_word(args.u, ctx)
    v = parse_group_word(args.v, ctx)
    out = conjugacy_search(ctx, u, v, args.policy)
    lines = [out.tag]
    if out.conjugator is not None:
        lines.append(f"conjugator: {format_word(out.conjugator) or '1'}")
    if out.reason:
        lines.append(f"reason: {out.reason}")
    _emit(
        args,
        {
            "verdict": out.tag,
            "conjugator": None
            if out.conjugator is None
            else format_word(out.conjugator),
            "reason": out.reason or None,
        },
        lines,
    )
    return EXIT_UNDECIDED if out.tag == "undecided" else EXIT_OK


# --- benchmarks -------------------------------------------------------------------


@dataclass
class BenchReport:
    subcase: str
    policy: str
    k: int
    head_lengths: list[int]
    growth: list[float]
    elapsed: float
    final_head_length: int
    notes: dict = field(default_factory=dict)

    def json(self) -> dict:
        return {
            "subcase": self.subcase,
            "policy": self.policy,
            "k": self.k,
            "head_lengths": self.head_lengths,
            "growth": self.growth,
            "elapsed": self.elapsed,
            "final_head_length": self.final_head_length,
            **self.notes,
        }


def _growth(trace: list[int]) -> list[float]:
    return [
        round(b / a, 4) if a else 0.0 for a, b in zip(trace, trace[1:])
    ]


def bench_paper_ex1(p: int, m: int) -> list[BenchReport]:
    """Run (z d)^m x through both policies, reporting per-step head lengths."""
    ctx = example_one_context(p)
    z = Word(ctx.union_alphabet, (6,))
    d = Word(ctx.union_alphabet, (3,))
    x = Word(ctx.union_alphabet, (4,))
    w = (z * d) ** m * x
    reports = []
    for policy in (RepPolicy.paper_example_one(p), CANONICAL):
        trace: list[int] = []
        start = time.perf_counter()
        nf = normal_form(ctx, w, policy, trace=trace)
        elapsed = time.perf_counter() - start
        reports.append(
            BenchReport(
                "paper-ex1",
                policy.kind,
                len(trace),
                trace,
                _growth(trace),
                elapsed,
                len(nf.head),
                {
                    "input_length": len(w),
                    "head_bound": len(w)
                    + 2 * max(ctx.graph_ca.graph.diameter(), ctx.graph_cb.graph.diameter()),
                },
            )
        )
    return reports


def bench_paper_ex2(p: int, n: int) -> BenchReport:
    """Verify (b y)^-n a (b y)^n has the same normal form as a^(p^n)."""
    ctx = example_two_context(p)
    b = Word(ctx.union_alphabet, (2,))
    y = Word(ctx.union_alphabet, (4,))
    a = Word(ctx.union_alphabet, (1,))
    conj = (b * y) ** n
    lhs = ~conj * a * conj
    rhs = a ** (p**n)
    trace: list[int] = []
    start = time.perf_counter()
    nf_l = normal_form(ctx, lhs, trace=trace)
    nf_r = normal_form(ctx, rhs)
    elapsed = time.perf_counter() - start
    return BenchReport(
        "paper-ex2",
        "canonical",
        len(trace),
        trace,
        _growth(trace),
        elapsed,
        len(nf_l.head),
        {"identity_holds": nf_l == nf_r, "power": p**n},
    )


def bench_random(length: int, count: int, seed: int) -> BenchReport:
    """Random reduced words through the canonical policy; max head length seen."""
    ctx = example_one_context(2)
    rng = random.Random(seed)
    nlet = len(ctx.union_alphabet)
    worst = 0
    longest_trace: list[int] = []
    start = time.perf_counter()
    for _ in range(count):
        letters: list[int] = []
        while len(letters) < length:
            lt = rng.choice([s * i for i in range(1, nlet + 1) for s in (1, -1)])
            if letters and letters[-1] == -lt:
                continue
            letters.append(lt)
        trace: list[int] = []
        normal_form(ctx, Word(ctx.union_alphabet, letters), trace=trace)
        peak = max(trace, default=0)
        if peak >= worst:
            worst = peak
            longest_trace = trace
    elapsed = time.perf_counter() - start
    return BenchReport(
        "random",
        "canonical",
        len(longest_trace),
        longest_trace,
        _growth(longest_trace),
        elapsed,
        worst,
        {"samples": count, "input_length": length},
    )


def _cmd_bench(args) -> int:
    if args.subcase == "paper-ex1":
        reports = bench_paper_ex1(args.p, args.m)
    elif args.subcase == "paper-ex2":
        reports = [bench_paper_ex2(args.p, args.n)]
    else:
        reports = [bench_random(args.length, args.count, args.seed)]
    if args.json:
        print(json.dumps([r.json() for r in reports], sort_keys=True))
    else:
        for r in reports:
            print(
                f"{r.subcase} policy={r.policy} steps={r.k} "
                f"final_head={r.final_head_length} time={r.elapsed:.4f}s"
            )
            print("  head lengths: " + " ".join(map(str, r.head_lengths)))
            if r.growth:
                print("  growth: " + " ".join(f"{g:g}" for g in r.growth))
            for key, value in r.notes.items():
                print(f"  {key}: {value}")
    return EXIT_OK


# --- entry point -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amalgam",
        description="normal forms and conjugacy search in amalgams of free groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, word=False, pair=False):
        sp.add_argument("-g", "--group", required=True, help="presentation file")
        if word:
            sp.add_argument("-w", "--word", required=True)
        if pair:
            sp.add_argument("-u", required=True)
            sp.add_argument("-v", required=True)
        sp.add_argument(
            "--policy", type=_parse_policy, default=CANONICAL,
            help="canonical or paper-ex1:P",
        )
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("validate")
    sp.add_argument("-g", "--group", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("nf")
    common(sp, word=True)
    sp.add_argument("--trace", action="store_true")
    sp.set_defaults(func=_cmd_nf)

    sp = sub.add_parser("reduce")
    common(sp, word=True)
    sp.set_defaults(func=_cmd_reduce)

    sp = sub.add_parser("cyclic")
    common(sp, word=True)
    sp.set_defaults(func=_cmd_cyclic)

    sp = sub.add_parser("classify")
    common(sp, word=True)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("transversal")
    sp.add_argument("-g", "--group", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_transversal)

    sp = sub.add_parser("conj")
    common(sp, pair=True)
    sp.set_defaults(func=_cmd_conj)

    sp = sub.add_parser("bench")
    sp.add_argument("subcase", choices=("paper-ex1", "paper-ex2", "random"))
    sp.add_argument("-p", type=int, default=2)
    sp.add_argument("-m", type=int, default=3)
    sp.add_argument("-n", type=int, default=3)
    sp.add_argument("--length", type=int, default=12)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SYNTAX if exc.code else EXIT_OK
    if getattr(args, "command", None) == "bench":
        if args.p < 2 or args.m < 1 or args.n < 1 or args.length < 1 or args.count < 1:
            print("bench parameters out of range", file=sys.stderr)
            return EXIT_SYNTAX
    try:
        return args.func(args)
    except (PresentationSyntaxError, WordSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except InvalidPresentationError as exc:
        print(f"invalid presentation: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX


if __name__ == "__main__":
    sys.exit(main())
