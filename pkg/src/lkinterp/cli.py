"""Command-line interface.

Every subcommand prints one JSON document whose ``invocation`` field is a
canonical command line; re-running it reproduces the document byte for
byte.  Exit codes: 0 when a verdict was computed (``no`` and ``Infinite``
included), 1 for invalid input, 2 when the answer is inconclusive.

Defaults for any flag may be read from ``--config FILE`` holding plain
``key = value`` lines (``#`` starts a comment).
"""
from __future__ import annotations

import argparse
import json
import math
import re
import shlex
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import harness
from .asymcalc import Side, Tag, parse_side
from .functionals import KINDS, FunctionalSpec, evaluate
from .interpengine import (CASES, InterpolationQuery, decide, optimal_source, optimal_target,
                           rational)
from .lkspaces import LKSpaceSpec, StepFunction, SumSpaceSpec, rearrange
from .opsim import (InterpolationSegment, OperatorProfile, hilbert_rearrangement,
                    maximal_rearrangement, operator_profile, riesz_potential_profile)
from .svfunc import NotRepresentable, as_expr, log_eval, to_symbol, to_text

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2

OPERATORS = {"maximal": "M", "conjugate": "C", "hilbert": "H", "riesz-transform": "R"}


class CliError(ValueError):
    """Invalid command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2, which means inconclusive here
        raise CliError(message)


# (flag, help, is_switch) per subcommand, in canonical order
_OPT = Tuple[str, str, bool]

COMMANDS: Dict[str, Tuple[str, List[_OPT]]] = {
    "eval-sv": ("evaluate a slowly varying expression at t = exp(-+y)", [
        ("--expr", "expression in the l1/l2/... grammar", False),
        ("--y", "Y = |log t| >= 0", False),
        ("--side", "zero or inf", False),
    ]),
    "functional": ("decide finiteness of a characterizing functional", [
        ("--kind", "one of " + "|".join(KINDS), False),
        ("--r", "outer exponent r", False),
        ("--s", "inner exponent s", False),
        ("--a", "weight a", False),
        ("--b", "weight b", False),
        ("--interval", "0,1 | 1,inf | 0,inf", False),
        ("--mode", "symbolic | numeric | auto (default auto)", False),
        ("--value", "also compute the numeric value when Finite", True),
    ]),
    "decide": ("decide boundedness of an operator between LK spaces", [
        ("--operator", "maximal|conjugate|hilbert|riesz-transform|riesz-potential:GAMMA:N|"
                       "custom:P1,Q1,P2,Q2[,lb1][,lb2]", False),
        ("--case", "interior:THETA | left | right | sum | intersection", False),
        ("--source", "space SPEC: p,r,EXPR or (p1,r1)+(p2,r2),EXPR[;EXPR2]", False),
        ("--target", "space SPEC", False),
        ("--finite-measure", "spaces over (0,1) instead of (0,inf)", True),
        ("--mode", "symbolic | numeric | auto (default auto)", False),
    ]),
    "optimal": ("optimal target or source LK space", [
        ("--direction", "target | source", False),
        ("--operator", "as for decide (default hilbert)", False),
        ("--case", "interior[:THETA] | left | right", False),
        ("--space", "given space SPEC p,r,EXPR", False),
        ("--exponent", "second index of the sought space (default: that of the given one)",
         False),
        ("--finite-measure", "spaces over (0,1) instead of (0,inf)", True),
        ("--mode", "symbolic | numeric | auto (default auto)", False),
    ]),
    "verify-lemma": ("empirical check of a Hardy-type characterization", [
        ("--lemma", "|".join(harness.LEMMAS), False),
        ("--params", "k=v pairs joined by ';' (r, s, a, b, interval, mu, nu, kappa)", False),
        ("--seed", "master seed (default 0)", False),
        ("--sizes", "2^K1..2^K2 or a comma list of depths", False),
        ("--csv", "write the constant sequences to this CSV file", False),
        ("--mode", "symbolic | numeric | auto (default auto)", False),
    ]),
    "gap-witness": ("monotone restriction gap on (0,1)", [
        ("--r", "outer exponent (default 2)", False),
        ("--s", "inner exponent (default 3)", False),
        ("--theta", "l2 exponent of a (default -1)", False),
        ("--gamma", "extra l2 exponent of b (default 0.1)", False),
        ("--csv", "write both constant sequences to this CSV file", False),
    ]),
    "rearrange": ("decreasing rearrangement of a step function CSV", [
        ("--input", "CSV with rows height,measure[,start,end]", False),
        ("--output", "write the CSV here instead of stdout", False),
    ]),
    "simulate": ("sample and rearrange Hilbert or maximal transforms", [
        ("--operator", "hilbert | maximal", False),
        ("--input", "CSV step function", False),
        ("--grid-density", "sample points per decade (default 64)", False),
        ("--emit", "write (Tf)* as a step function CSV", False),
    ]),
}

_REQUIRED = {
    "eval-sv": ("expr", "y", "side"),
    "functional": ("kind", "r", "s", "a", "b", "interval"),
    "decide": ("operator", "case", "source", "target"),
    "optimal": ("direction", "case", "space"),
    "verify-lemma": ("lemma", "params"),
    "gap-witness": (),
    "rearrange": ("input",),
    "simulate": ("operator", "input"),
}


def _dest(flag: str) -> str:
    return flag.lstrip("-").replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lkinterp", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="file of default flags, one 'key = value' per line")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (helptext, opts) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext, description=helptext)
        p.add_argument("--config", help=argparse.SUPPRESS, dest="sub_config")
        for flag, h, switch in opts:
            if switch:
                p.add_argument(flag, action="store_true", default=None, help=h)
            else:
                p.add_argument(flag, help=h)
    return parser


# ---------------------------------------------------------------------------
# parsing helpers


def read_config(path: str) -> Dict[str, str]:
    """``key = value`` lines; keys are flag names without the dashes."""
    out = {}
    with open(path) as fh:
        for k, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{k}: expected 'key = value'")
            key, value = (x.strip() for x in line.split("=", 1))
            out[_dest(key)] = value.strip("\"'")
    return out


def _number(text, what: str) -> float:
    try:
        return float(rational(str(text)))
    except (ValueError, ZeroDivisionError):
        raise CliError(f"{what}: not a number: {text!r}") from None


def _interval(text: str) -> Tuple[float, float]:
    key = str(text).replace(" ", "").strip("()[]").lower()
    table = {"0,1": (0.0, 1.0), "1,inf": (1.0, math.inf), "0,inf": (0.0, math.inf)}
    if key not in table:
        raise CliError(f"interval must be 0,1 or 1,inf or 0,inf, got {text!r}")
    return table[key]


def _mode(args) -> str:
    mode = args.mode or "auto"
    if mode not in ("symbolic", "numeric", "auto"):
        raise CliError(f"mode must be symbolic, numeric or auto, got {mode!r}")
    return mode


def parse_operator(text: str) -> OperatorProfile:
    """Operator names of ``decide`` and ``optimal``."""
    key = text.strip().lower()
    if key in OPERATORS:
        return operator_profile(OPERATORS[key])
    if key.startswith("riesz-potential:"):
        parts = key.split(":")
        if len(parts) != 3:
            raise CliError("riesz-potential needs riesz-potential:GAMMA:N")
        try:
            n = int(parts[2])
        except ValueError:
            raise CliError(f"dimension must be an integer, got {parts[2]!r}") from None
        return riesz_potential_profile(n, _number(parts[1], "gamma"))
    if key.startswith("custom:"):
        fields = [x.strip() for x in key[len("custom:"):].split(",")]
        nums, flags = fields[:4], fields[4:]
        if len(nums) != 4 or any(f not in ("lb1", "lb2") for f in flags):
            raise CliError("custom operators are custom:P1,Q1,P2,Q2[,lb1][,lb2]")
        seg = InterpolationSegment(*(_number(x, "exponent") for x in nums))
        return OperatorProfile("custom", seg, "lb1" in flags, "lb2" in flags, False)
    raise CliError(f"unknown operator {text!r}")


_PAIR = r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)"
_SPLIT_SPEC = re.compile(rf"^\s*{_PAIR}\s*([+^])\s*{_PAIR}\s*(?:,(.*))?$")


def parse_space(text: str, finite_measure: bool = False):
    """``p,r,EXPR`` or ``(p1,r1)+(p2,r2),EXPR[;EXPR2]`` (``^`` for intersections)."""
    m = _SPLIT_SPEC.match(text)
    if m:
        p1, r1, op, p2, r2, rest = m.groups()
        exprs = (rest or "1").split(";")
        if len(exprs) > 2:
            raise CliError("at most two weights may follow a sum or intersection")
        a = as_expr(exprs[0].strip() or "1")
        a2 = as_expr(exprs[1].strip()) if len(exprs) == 2 else None
        mode = "sum" if op == "+" else "intersection"
        return SumSpaceSpec(_number(p1, "p1"), _number(r1, "r1"), _number(p2, "p2"),
                            _number(r2, "r2"), a, mode=mode, a2=a2)
    parts = text.split(",", 2)
    if len(parts) < 2:
        raise CliError(f"space must be p,r,EXPR, got {text!r}")
    expr = parts[2].strip() if len(parts) == 3 else "1"
    return LKSpaceSpec(_number(parts[0], "p"), _number(parts[1], "r"), as_expr(expr or "1"),
                       1.0 if finite_measure else math.inf)


def _case(text: str):
    key = text.strip().lower()
    if key.startswith("interior"):
        theta = key.partition(":")[2].strip()
        return "interior", (rational(theta) if theta else None)
    if key not in CASES:
        raise CliError(f"unknown case {text!r}")
    return key, None


def parse_params(text: str) -> dict:
    """``r=2;s=3;a=l1^-0.5;interval=0,1`` into harness parameters."""
    out = {}
    for item in filter(None, (x.strip() for x in text.split(";"))):
        key, eq, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not value:
            raise CliError(f"parameter {item!r} is not k=v")
        if key in ("a", "b"):
            out[key] = to_text(as_expr(value))
        elif key == "interval":
            out[key] = _interval(value)
        else:
            out[key] = _number(value, key)
    return out


def parse_sizes(text: Optional[str]) -> Optional[Tuple[float, ...]]:
    """``2^6..2^14`` (every power in between) or ``64,128,256``."""
    if text is None:
        return None
    m = re.fullmatch(r"\s*2\^(\d+)\s*\.\.\s*2\^(\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise CliError("sizes range is empty")
        return tuple(2.0 ** k for k in range(lo, hi + 1))
    vals = []
    for x in text.split(","):
        x = x.strip()
        if x.startswith("2^"):
            vals.append(2.0 ** _number(x[2:], "size"))
        else:
            vals.append(_number(x, "size"))
    return tuple(vals)


def _read_steps(path: str) -> StepFunction:
    try:
        with open(path, newline="") as fh:
            return StepFunction.from_csv(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# output


def _plain(x):
    """JSON-safe copy: non-finite floats become strings, tuples lists."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (Side, Tag)):
        return x.value
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def dumps(doc: dict) -> str:
    return json.dumps(_plain(doc), indent=2, sort_keys=True)


def canonical_invocation(args) -> str:
    """The command line with every effective flag spelled out."""
    words = ["lkinterp", args.command]
    for flag, _, switch in COMMANDS[args.command][1]:
        v = getattr(args, _dest(flag))
        if switch:
            if v:
                words.append(flag)
        elif v is not None:
            words += [flag, str(v)]
    return " ".join(shlex.quote(w) for w in words)


def _verdict_doc(inv: str, theorem, functional, tag: str, method, notes, **extra) -> dict:
    doc = {"invocation": inv, "theorem": theorem, "functional": functional, "tag": tag,
           "method": method, "notes": list(notes)}
    doc.update(extra)
    return doc


def _fin_fields(v) -> dict:
    d = v.to_dict()
    out = {"asymptotes": d["asymptotes"]}
    if v.tag is Tag.INFINITE:
        out["witness"] = d["witness"]
        out["divergence"] = d["divergence"]
    else:
        out["value"] = d["value"]
    if "components" in d:
        out["components"] = d["components"]
    return out


# ---------------------------------------------------------------------------
# subcommands


def _run_eval_sv(args, inv):
    expr = as_expr(args.expr)
    y = _number(args.y, "y")
    if not y >= 0:
        raise CliError("y must be non-negative")
    side = parse_side(args.side)
    lv = float(log_eval(expr, y, side))
    try:
        symbol = to_symbol(expr, side).to_text()
    except NotRepresentable:
        symbol = None
    doc = {"invocation": inv, "expr": to_text(expr), "side": side.value, "y": y,
           "log_value": lv, "value": math.exp(lv) if lv < 709.0 else math.inf,
           "symbol": symbol}
    return doc, EXIT_OK


def _run_functional(args, inv):
    kind = args.kind
    if kind not in KINDS:
        raise CliError(f"kind must be one of {'|'.join(KINDS)}")
    spec = FunctionalSpec(kind, _number(args.r, "r"), _number(args.s, "s"), as_expr(args.a),
                          as_expr(args.b), _interval(args.interval))
    v = evaluate(spec, _mode(args), value=bool(args.value))
    doc = _verdict_doc(inv, None, kind, v.tag.value, v.method, v.notes, **_fin_fields(v))
    return doc, EXIT_INCONCLUSIVE if v.tag is Tag.INCONCLUSIVE else EXIT_OK


def _run_decide(args, inv):
    profile = parse_operator(args.operator)
    case, theta = _case(args.case)
    fm = bool(args.finite_measure)
    q = InterpolationQuery(profile, case, parse_space(args.source, fm),
                           parse_space(args.target, fm), theta)
    v = decide(q, _mode(args))
    d = v.to_dict()
    method = "symbolic" if v.symbolic else "numeric"
    doc = _verdict_doc(inv, v.theorem, {k: f.to_dict() for k, f in v.functionals.items()},
                       v.bounded, method, v.notes, witness=d["certificate"],
                       conditions=d["conditions"], sufficiency_only=v.sufficiency_only,
                       operator=profile.name)
    return doc, EXIT_INCONCLUSIVE if v.bounded == "inconclusive" else EXIT_OK


def _run_optimal(args, inv):
    profile = parse_operator(args.operator or "hilbert")
    case, theta = _case(args.case)
    if case not in ("interior", "left", "right"):
        raise CliError("optimal spaces are defined for the interior, left and right cases")
    if theta is not None:
        raise CliError("the interior parameter is read off the given space; drop ':THETA'")
    space = parse_space(args.space, bool(args.finite_measure))
    if not isinstance(space, LKSpaceSpec):
        raise CliError("optimal needs a single LK space")
    exp = None if args.exponent is None else _number(args.exponent, "exponent")
    if args.direction == "target":
        res = optimal_target(case, space, profile, s=exp, method=_mode(args))
    elif args.direction == "source":
        res = optimal_source(case, space, profile, r=exp, method=_mode(args))
    else:
        raise CliError("direction must be target or source")
    d = res.to_dict()
    hyp = res.hypothesis
    doc = _verdict_doc(inv, res.theorem, None if hyp is None else hyp.kind, "optimal",
                       "symbolic" if res.symbol is not None else "numeric", res.notes,
                       space=d["space"], weight=d["weight"], symbol=d["symbol"],
                       sharpness=d["sharpness"], hypothesis=d["hypothesis"])
    return doc, EXIT_OK


def _run_verify(args, inv):
    if args.lemma not in harness.LEMMAS:
        raise CliError(f"lemma must be one of {'|'.join(harness.LEMMAS)}")
    seed = int(_number(args.seed or "0", "seed"))
    rep = harness.verify_equivalence(args.lemma, parse_params(args.params), seed=seed,
                                     sizes=parse_sizes(args.sizes), method=_mode(args))
    if args.csv:
        _write(args.csv, rep.to_csv())
    d = rep.to_dict()
    theorem = f"{args.lemma}: the inequality holds iff {args.lemma} is finite"
    if args.lemma == "Rinf":
        theorem += " (and on (1,inf) also ||t^(-1/r) a||_r = inf)"
    doc = _verdict_doc(inv, theorem, args.lemma, rep.expected, rep.functional.method,
                       rep.notes, agree=rep.agree, rows=d["rows"], params=d["params"],
                       seed=seed, value=d["functional"])
    if "divergence_condition" in d:
        doc["divergence_condition"] = d["divergence_condition"]
    return doc, EXIT_INCONCLUSIVE if rep.expected == "inconclusive" else EXIT_OK


def _run_gap(args, inv):
    kw = {}
    for key in ("r", "s", "theta", "gamma"):
        v = getattr(args, key)
        if v is not None:
            kw[key] = _number(v, key)
    w = harness.monotone_gap_witness(**kw)
    if args.csv:
        rows = ["family,size,log2_size,constant,log_constant,member"]
        for label, seq in (("monotone", w.monotone), ("general", w.general)):
            for rec in seq.rows():
                rows.append(",".join([label] + [repr(x) if isinstance(x, float) else str(x)
                                                for x in rec]))
        _write(args.csv, "\n".join(rows) + "\n")
    d = w.to_dict()
    d.pop("params")
    doc = _verdict_doc(inv, "R1, R2 finite and R infinite: the monotone inequality holds, "
                       "the general one fails", "R", "gap" if w.ok else "no-gap-observed",
                       "symbolic", w.notes, params=w.params,
                       **{k: v for k, v in d.items() if k != "notes"})
    return doc, EXIT_OK


def _run_rearrange(args, inv):
    text = rearrange(_read_steps(args.input)).to_csv()
    if args.output:
        _write(args.output, text)
        return {"invocation": inv, "output": args.output}, EXIT_OK
    return text, EXIT_OK


def _run_simulate(args, inv):
    f = _read_steps(args.input)
    density = int(_number(args.grid_density or "64", "grid-density"))
    if density < 1:
        raise CliError("grid density must be positive")
    op = args.operator.strip().lower()
    if op == "hilbert":
        if f.support is None:
            f = StepFunction.from_intervals(_laid_out(f))
        res = hilbert_rearrangement(f, per_decade=density)
    elif op == "maximal":
        res = maximal_rearrangement(f, per_decade=density)
    else:
        raise CliError("simulate supports hilbert and maximal")
    if args.emit:
        _write(args.emit, res.fstar.to_csv())
    fs = res.fstar
    doc = {"invocation": inv, "operator": op, "density": res.density, "span": list(res.span),
           "pieces": len(fs.pieces), "sup": float(fs.pieces[0][0]),
           "measure": float(sum(m for _, m in fs.pieces)), "emit": args.emit,
           "notes": list(res.notes)}
    return doc, EXIT_OK


def _laid_out(f: StepFunction):
    """Pieces placed side by side from 0."""
    x, out = Fraction(0), []
    for h, m in f.pieces:
        out.append((h, x, x + m))
        x += m
    return out


_RUNNERS = {"eval-sv": _run_eval_sv, "functional": _run_functional, "decide": _run_decide,
            "optimal": _run_optimal, "verify-lemma": _run_verify, "gap-witness": _run_gap,
            "rearrange": _run_rearrange, "simulate": _run_simulate}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the subcommand, print its output; return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliError("a subcommand is required")
        config = args.sub_config or args.config
        if config:
            known = {_dest(f) for f, _, _ in COMMANDS[args.command][1]}
            for key, value in read_config(config).items():
                if key not in known:
                    raise CliError(f"config key {key!r} is not a flag of {args.command}")
                if getattr(args, key) is None:
                    switch = any(_dest(f) == key and s for f, _, s in COMMANDS[args.command][1])
                    setattr(args, key, value.lower() in ("1", "true", "yes") if switch else value)
        missing = [k for k in _REQUIRED[args.command] if getattr(args, k) is None]
        if missing:
            raise CliError("missing " + ", ".join("--" + k.replace("_", "-") for k in missing))
        out, code = _RUNNERS[args.command](args, canonical_invocation(args))
    except (ValueError, TypeError, KeyError, OSError) as exc:
        stderr.write(dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return EXIT_INVALID
    stdout.write(out if isinstance(out, str) else dumps(out) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
