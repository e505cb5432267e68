"""Command-line front end: ``predict analyze|calibrate|convert|adversary``.

Exit codes: 0 success, 2 usage or precondition failure, 3 parse error,
4 evaluation budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from .constructions import adversarial_sequence
from .core import BudgetExceeded, Dyadic, all_strings, format_bits, parse_bits
from .predictors import (
    DefaultRule,
    Direction,
    StagedPredictor,
    bernoulli,
    dirac,
    log2_display,
    martingale_convert,
    mixture,
    table_predictor,
    uniform,
)
from .processes import (
    MonotoneProcess,
    digit_aligned_process,
    distribution_to_endless_process,
    endless_process_to_distribution,
    format_process_table,
    parse_process_table,
    predictor_to_process,
    reduced_encodings,
    solomonoff_eval,
)
from .randomness_tests import GrowthFunction, calibration_report, growth_profile

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_BUDGET = 0, 2, 3, 4


class ParseError(ValueError):
    pass


class UsageError(ValueError):
    pass


# Rendering


def render_ratio(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def render_value(v: Any) -> Any:
    if isinstance(v, Dyadic):
        return str(v)
    if isinstance(v, Fraction):
        return render_ratio(v)
    if isinstance(v, list):
        return [render_value(u) for u in v]
    if isinstance(v, dict):
        return {k: render_value(u) for k, u in v.items()}
    return v


class Report:
    """Header fields followed by an optional table, rendered as text or JSON."""

    def __init__(self, command: str):
        self.command = command
        self.fields: list[tuple[str, Any]] = []
        self.columns: list[str] = []
        self.rows: list[list[Any]] = []

    def add(self, key: str, value: Any) -> None:
        self.fields.append((key, value))

    def text(self) -> str:
        lines = [f"command: {self.command}"]
        for k, v in self.fields:
            v = render_value(v)
            lines.append(f"{k}: {' '.join(map(str, v)) if isinstance(v, list) else v}")
        if self.columns:
            lines.append("\t".join(self.columns))
            lines += ["\t".join(str(render_value(c)) for c in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def json(self) -> str:
        obj = {"command": self.command}
        obj.update({k: render_value(v) for k, v in self.fields})
        if self.columns:
            obj["rows"] = [dict(zip(self.columns, map(render_value, r))) for r in self.rows]
        return json.dumps(obj, sort_keys=False) + "\n"


# Parsing


def read_stream(path: str) -> str:
    """Bits from a text file; whitespace is ignored, anything else is an error."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read stream: {exc}") from None
    bits = []
    for lineno, line in enumerate(text.splitlines(), 1):
        for col, ch in enumerate(line, 1):
            if ch in "01":
                bits.append(ch)
            elif not ch.isspace():
                raise ParseError(f"{path}: line {lineno}, column {col}: unexpected {ch!r}")
    return "".join(bits)


def parse_ratio(text: str) -> Fraction:
    if not re.fullmatch(r"\d+(/\d+)?", text):
        raise ParseError(f"expected a rational NUM/DEN, got {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den or 1))


def read_value_table(path: str) -> dict[str, Fraction]:
    """``bits<TAB>num/den`` lines; ``.`` is the empty string, ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read table: {exc}") from None
    out: dict[str, Fraction] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"{path}: line {lineno}: expected bits<TAB>num/den")
        try:
            x = parse_bits(parts[0])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from None
        if x in out:
            raise ParseError(f"{path}: line {lineno}: duplicate entry {format_bits(x)}")
        try:
            out[x] = parse_ratio(parts[1].strip())
        except ParseError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from None
    return out


def read_process(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read process: {exc}") from None
    try:
        return parse_process_table(text)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None


_TOKEN = re.compile(r"\s*([\[\](),]|[^\s\[\](),]+)")


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"bad predictor spec near {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_predictor(spec: str) -> StagedPredictor:
    """Parse ``uniform | bernoulli N/D | table FILE | dirac BITS | mixture [(W, SPEC), ...]``."""
    toks = _tokens(spec)
    pos = 0

    def take(expect: str | None = None) -> str:
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"predictor spec ends early: {spec!r}")
        tok = toks[pos]
        if expect is not None and tok != expect:
            raise ParseError(f"expected {expect!r} in predictor spec, got {tok!r}")
        pos += 1
        return tok

    def one() -> StagedPredictor:
        name = take()
        if name == "uniform":
            return uniform()
        if name == "bernoulli":
            r = parse_ratio(take())
            if r > 1:
                raise UsageError(f"bernoulli parameter {render_ratio(r)} outside [0, 1]")
            return bernoulli(r)
        if name == "dirac":
            bits = take()
            if not re.fullmatch(r"[01]+", bits):
                raise ParseError(f"dirac needs a non-empty bit pattern, got {bits!r}")
            return dirac(bits)
        if name == "table":
            entries = read_value_table(take())
            rule = DefaultRule.ZERO_OUTSIDE
            if "" in entries and all(x[:-1] in entries for x in entries if x):
                rule = DefaultRule.CLOSED_UNDER_PREFIX
            try:
                return table_predictor(entries, rule)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        if name == "mixture":
            take("[")
            family = []
            while True:
                take("(")
                w = parse_ratio(take())
                take(",")
                family.append((w, one()))
                take(")")
                if take() == "]":
                    break
                if toks[pos - 1] != ",":
                    raise ParseError("expected ',' or ']' in mixture")
            try:
                return mixture(family)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        raise UsageError(f"unknown predictor {name!r}")

    p = one()
    if pos != len(toks):
        raise ParseError(f"trailing text in predictor spec: {' '.join(toks[pos:])!r}")
    return p


def parse_growth(spec: str) -> GrowthFunction:
    try:
        return GrowthFunction.parse(spec)
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        raise ParseError(f"bad growth spec {spec!r}: {exc}") from None


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name} is required for {args.command}")
    return value


# Commands


def cmd_analyze(args) -> Report:
    p = parse_predictor(_need(args, "predictor"))
    g = parse_growth(args.growth)
    z = read_stream(_need(args, "stream"))
    rep = Report("analyze")
    rep.add("predictor", p.name)
    rep.add("growth", str(g))
    rep.add("length", len(z))
    rep.columns = ["n", "ratio", "log2_ratio", "g", "log2_ratio_over_g"]
    for row in growth_profile(p, z, g, stage=None if p.has_limit else args.stages):
        rep.rows.append([row.n, row.ratio, log2_display(row.ratio), row.growth, row.rp_over_g()])
    return rep


def cmd_calibrate(args) -> Report:
    if args.window is None:
        raise UsageError("--window r s is required for calibrate")
    r, s = (parse_ratio(w) for w in args.window)
    if not (Fraction(1, 2) < r <= s < 1):
        raise UsageError("calibration window needs 1/2 < r <= s < 1")
    p = parse_predictor(_need(args, "predictor"))
    z = read_stream(_need(args, "stream"))
    rep_ = calibration_report(p, z, r, s)
    rep = Report("calibrate")
    rep.add("predictor", p.name)
    rep.add("window", [r, s])
    rep.add("length", len(z))
    rep.add("predictions", rep_.predictions)
    rep.add("confirmed", rep_.confirmed)
    rep.add("ratio", rep_.ratio if rep_.ratio is not None else "none")
    rep.add("verdict", rep_.verdict)
    return rep


def _verify_process(proc: MonotoneProcess, target, depth: int) -> str:
    for y in all_strings(depth):
        if solomonoff_eval(proc, y) != target(y):
            return f"mismatch at {format_bits(y)}"
    return "exact"


def cmd_convert(args) -> Report:
    target = args.to
    depth = args.depth
    rep = Report("convert")
    rep.add("target", target)
    rep.add("depth", depth)
    out_text = None
    if args.process is not None:
        if target != "distribution":
            raise UsageError("a process file converts only to a distribution")
        table = read_process(args.process)
        try:
            proc = MonotoneProcess(table, endless_declared=True, name=Path(args.process).name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rep.add("input", f"process {Path(args.process).name}")
        rep.columns = ["y", "p"]
        lines = []
        for y in all_strings(depth):
            v = endless_process_to_distribution(proc, y, args.budget)
            rep.rows.append([format_bits(y), v])
            lines.append(f"{format_bits(y)}\t{render_ratio(v.to_fraction())}\n")
        additive = all(
            solomonoff_eval(proc, y) == solomonoff_eval(proc, y + "0") + solomonoff_eval(proc, y + "1")
            for y in all_strings(depth - 1)
        )
        rep.add("verification", "exact" if additive else "not additive")
        out_text = "".join(lines)
    else:
        p = parse_predictor(_need(args, "predictor"))
        rep.add("input", p.name)
        if target == "martingale":
            try:
                m = martingale_convert(p, Direction.TO_MARTINGALE)
                values = {x: m(x) for x in all_strings(depth)}
            except ValueError as exc:
                raise UsageError(f"martingale target: {exc}") from None
            back = martingale_convert(m, Direction.TO_PREDICTOR)
            fair = all(m.is_fair_at(x) for x in all_strings(depth - 1))
            same = all(back(x) == p.value(x) for x in values)
            rep.add("verification", "exact" if fair and same else "failed")
            rep.columns = ["x", "f"]
            rep.rows = [[format_bits(x), v] for x, v in values.items()]
            out_text = "".join(f"{format_bits(x)}\t{render_ratio(v)}\n" for x, v in values.items())
        elif target in ("process", "digit_aligned"):
            try:
                if target == "digit_aligned":
                    proc = digit_aligned_process(p, depth)
                elif p.is_distribution and p.has_limit:
                    proc = distribution_to_endless_process(p, depth)
                else:
                    proc = predictor_to_process(p, args.stages, depth)
            except ValueError as exc:
                raise UsageError(f"{target} target: {exc}") from None
            ref = (lambda y: p.value(y)) if p.has_limit else (lambda y: p.approx(y, args.stages))
            rep.add("pairs", len(proc.table))
            rep.add("verification", _verify_process(proc, ref, depth))
            if target == "digit_aligned":
                ok = all(
                    sorted(len(x) for x in reduced_encodings(proc, y))
                    == (Dyadic.from_fraction(p.value(y)).digits() if p.value(y) else [])
                    for y in all_strings(depth)
                )
                rep.add("digit_alignment", "exact" if ok else "failed")
            rep.columns = ["y", "p_f"]
            rep.rows = [
                [format_bits(y), Dyadic.from_fraction(solomonoff_eval(proc, y))]
                for y in all_strings(depth)
            ]
            out_text = format_process_table(proc.table)
        else:
            raise UsageError("a predictor converts to process, digit_aligned or martingale")
    if args.out and out_text is not None:
        Path(args.out).write_text(out_text, encoding="utf-8")
        rep.add("written", Path(args.out).name)
    return rep


def cmd_adversary(args) -> Report:
    p = parse_predictor(_need(args, "predictor"))
    try:
        trace = adversarial_sequence(p, args.length)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = Report("adversary")
    rep.add("predictor", p.name)
    rep.add("length", args.length)
    rep.add("sequence", format_bits(trace.sequence))
    rep.add("verified", "yes" if trace.verify() else "no")
    rep.columns = ["n", "digit", "rounds", "log2_lhs", "log2_rhs", "pass"]
    for n in range(1, len(trace.steps) + 1):
        lhs, rhs = trace.certificate(n)
        st = trace.steps[n - 1]
        rep.rows.append(
            [n, st.digit, st.rounds, log2_display(lhs), log2_display(rhs), "yes" if lhs < rhs else "no"]
        )
    return rep


COMMANDS = {
    "analyze": cmd_analyze,
    "calibrate": cmd_calibrate,
    "convert": cmd_convert,
    "adversary": cmd_adversary,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predict", description="Exact-arithmetic sequence prediction and randomness tools."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--predictor", metavar="SPEC")
        sp.add_argument("--json", action="store_true", help="emit one JSON object")
        sp.add_argument("--out", metavar="FILE")
        sp.add_argument("--stages", type=int, default=8)
        sp.add_argument("--budget", type=int, default=100000)
        sp.add_argument("--depth", type=int, default=3)

    sp = sub.add_parser("analyze", help="redundancy and growth profile along a stream")
    common(sp)
    sp.add_argument("--stream", metavar="FILE")
    sp.add_argument("--growth", metavar="SPEC", default="linear 1")
    sp = sub.add_parser("calibrate", help="calibration of next-digit predictions")
    common(sp)
    sp.add_argument("--stream", metavar="FILE")
    sp.add_argument("--window", nargs=2, metavar=("R", "S"))
    sp = sub.add_parser("convert", help="convert between predictors, processes, martingales")
    common(sp)
    sp.add_argument("--process", metavar="FILE")
    sp.add_argument(
        "--to", choices=["process", "distribution", "martingale", "digit_aligned"], required=True
    )
    sp = sub.add_parser("adversary", help="sequence with bounded redundancy")
    common(sp)
    sp.add_argument("--length", type=int, default=16)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.json() if args.json else report.text()
    if args.out and args.command != "convert":
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
