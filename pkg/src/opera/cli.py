"""Command-line driver.

Exit codes: 0 success, 1 a verification check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .grammar import ParseError, parse_expression
from .jetring import JetPolynomial, to_latex, to_text

FORMATS = ("text", "latex", "json")
COMMANDS = ("flows", "miura", "canonicalize", "qmiura", "limit", "baxter", "qchar", "verify")
WINDOW_ENV = "OPERA_DEFAULT_WINDOW"


class InputError(ValueError):
    """Bad configuration or unreadable input; maps to exit status 2."""


@dataclass
class RunConfig:
    command: str
    n: int = 2
    m: int = 3
    depth: int = 8
    window: int | None = None
    order: int = 20
    format: str = "text"
    input: str | None = None
    q_poly: str | None = None
    suite: str = "all"
    modified: bool = False

    def validate(self) -> None:
        if self.format not in FORMATS:
            raise InputError(f"format must be one of {FORMATS}")
        for name in ("n", "m", "depth", "order"):
            if getattr(self, name) <= 0:
                raise InputError(f"--{name} must be positive")
        if self.window is not None and self.window <= 0:
            raise InputError("--window must be positive")


def default_window() -> int:
    raw = os.environ.get(WINDOW_ENV)
    if raw is None or raw == "":
        return 12
    try:
        w = int(raw)
    except ValueError:
        raise InputError(f"{WINDOW_ENV} must be a positive integer, got {raw!r}") from None
    if w <= 0:
        raise InputError(f"{WINDOW_ENV} must be a positive integer, got {raw!r}")
    return w


# ---------------------------------------------------------------------------
# output helpers


@dataclass
class Equation:
    lhs: str
    rhs: str
    lhs_latex: str
    rhs_latex: str


def _emit(cfg: RunConfig, equations: list[Equation], notes: list[str] | None = None) -> str:
    notes = notes or []
    if cfg.format == "json":
        payload = {
            "command": cfg.command,
            "config": _config_dict(cfg),
            "equations": [{"lhs": e.lhs, "rhs": e.rhs} for e in equations],
        }
        if notes:
            payload["notes"] = notes
        return json.dumps(payload, indent=2)
    if cfg.format == "latex":
        lines = [f"{e.lhs_latex} = {e.rhs_latex}" for e in equations]
        if len(lines) > 1:
            body = " \\\\\n".join(lines)
            lines = ["\\begin{aligned}", body, "\\end{aligned}"]
        return "\n".join(lines + [f"% {n}" for n in notes])
    return "\n".join([f"{e.lhs} = {e.rhs}" for e in equations] + notes)


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("command")
    return d


def _v_names(i: int) -> str:
    return f"v{i}"


def _jet(lhs: str, lhs_latex: str, p: JetPolynomial, names=None) -> Equation:
    kw = {} if names is None else {"names": names}
    return Equation(lhs, to_text(p, **kw), lhs_latex, to_latex(p, **kw))


# ---------------------------------------------------------------------------
# input parsing


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _parse(text: str, where: str) -> JetPolynomial:
    try:
        return parse_expression(text)
    except ParseError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_input(path: str, kind: str = "oper"):
    """Load a MatrixOper (kind "oper") or a diagonal u-assignment (kind "miura") from JSON."""
    from .oper import MatrixOper, MiuraData, ShapeError, ConstraintError

    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if kind == "oper":
        entries = data.get("entries") if isinstance(data, dict) else None
        if not isinstance(entries, list) or not all(isinstance(r, list) for r in entries):
            raise InputError(f"{path}: expected {{\"entries\": [[...], ...]}}")
        if "n" in data and data["n"] != len(entries):
            raise InputError(f"{path}: n = {data['n']} does not match {len(entries)} rows")
        rows = [[_parse(str(x), f"{path} entry ({i + 1},{j + 1})") for j, x in enumerate(row)]
                for i, row in enumerate(entries)]
        try:
            return MatrixOper(rows)
        except ShapeError as exc:
            raise InputError(f"{path}: {exc}") from None
    if kind == "miura":
        u = data.get("u") if isinstance(data, dict) else None
        if not isinstance(u, list):
            raise InputError(f"{path}: expected {{\"u\": [...]}}")
        try:
            return MiuraData([_parse(str(x), f"{path} u[{i}]") for i, x in enumerate(u)])
        except ConstraintError as exc:
            raise InputError(f"{path}: {exc}") from None
    raise ValueError(f"unknown input kind {kind!r}")


def parse_q_poly(text: str):
    """Parse a Laurent polynomial in z with coefficients in q."""
    p = _parse(text, "--q-poly")
    if p.fields():
        raise InputError("--q-poly may only involve z and q")
    return p


# ---------------------------------------------------------------------------
# commands


def run_flows(cfg: RunConfig) -> str:
    from .hampoisson import modified_flow
    from .psdo import lax_rhs

    n, m = cfg.n, cfg.m
    if n < 2:
        raise InputError("--n must be at least 2")
    if m % n == 0:
        raise InputError(f"m = {m} is divisible by n = {n}; the flow is trivial")
    eqs = [_jet(f"d{_v_names(i)}/dt{m}", rf"\partial_{{t_{{{m}}}}} v_{{{i}}}", p, _v_names)
           for i, p in enumerate(lax_rhs(n, m), start=1)]
    if cfg.modified:
        eqs += [_jet(f"du{i}/dt{m}", rf"\partial_{{t_{{{m}}}}} u_{{{i}}}", p)
                for i, p in enumerate(modified_flow(n, m), start=1)]
    return _emit(cfg, eqs)


def run_miura(cfg: RunConfig) -> str:
    from .oper import miura_diagonal, miura_expand

    if cfg.input:
        diag = list(parse_input(cfg.input, "miura").u)
    else:
        if cfg.n < 2:
            raise InputError("--n must be at least 2")
        diag = miura_diagonal(cfg.n)
    v = miura_expand(diag)
    return _emit(cfg, [_jet(f"v{i}", f"v_{{{i}}}", p) for i, p in enumerate(v, start=1)])


def run_canonicalize(cfg: RunConfig) -> str:
    from .oper import ShapeError, canonicalize

    if not cfg.input:
        raise InputError("canonicalize needs --input FILE")
    M = parse_input(cfg.input, "oper")
    try:
        canon, _ = canonicalize(M)
    except ShapeError as exc:
        raise InputError(str(exc)) from None
    return _emit(cfg, [_jet(f"v{i}", f"v_{{{i}}}", p) for i, p in enumerate(canon.v, start=1)])


def run_qmiura(cfg: RunConfig) -> str:
    from .qlattice import q_miura_expand
    from .qlattice.shiftring import render

    t, const = q_miura_expand(cfg.n)
    eqs = [Equation(f"t{i}(z)", render(p), f"t_{{{i}}}(z)", render(p, latex=True))
           for i, p in enumerate(t, start=1)]
    eqs.append(Equation("constant term", render(const), r"\text{constant term}", render(const, latex=True)))
    return _emit(cfg, eqs)


def run_limit(cfg: RunConfig) -> str:
    from .qlattice import classical_limit
    from .qlattice.limits import DICTIONARY_NOTE

    order = cfg.order
    if order < 3:
        raise InputError("limit needs --order >= 3")
    s = classical_limit(order)
    eqs = []
    for k in range(order):
        p = JetPolynomial.lift(s[k])
        eqs.append(_jet(f"[h^{k}] t(z)", rf"[h^{{{k}}}]\, t(z)", p))
    return _emit(cfg, eqs, [f"note: {DICTIONARY_NOTE}"])


def run_baxter(cfg: RunConfig) -> str:
    from .qlattice import baxter_substitute

    if not cfg.q_poly:
        raise InputError("baxter needs --q-poly EXPR")
    Q = parse_q_poly(cfg.q_poly)
    try:
        r = baxter_substitute(Q)
    except (ZeroDivisionError, ValueError) as exc:
        raise InputError(str(exc)) from None
    eqs = [
        _jet("Q(z)", "Q(z)", Q),
        Equation("t(z)", str(r.t), "t(z)", _latex_coeff(r.t)),
        Equation("Lambda-form agrees", str(r.consistent).lower(), r"\text{via }\Lambda", str(r.consistent).lower()),
    ]
    return _emit(cfg, eqs)


def _latex_coeff(c) -> str:
    from .coeffcore import coeff_latex

    return coeff_latex(c)


def run_qchar(cfg: RunConfig) -> str:
    from .qchar import character_text, first_fundamental_character, forgetful, substitute_lambda
    from .qlattice import q_miura_expand

    n = cfg.n
    if n < 2:
        raise InputError("--n must be at least 2")
    t, _ = q_miura_expand(n, constrained=False)
    y = substitute_lambda(t[0], n)
    rank = 1 if n == 2 else None
    img = forgetful(y)
    eqs = [
        Equation("chi_q", y.to_text(rank=rank), r"\chi_q", y.to_text(latex=True, rank=rank)),
        Equation("forgetful image", character_text(img, rank=rank), r"\chi",
                 character_text(img, latex=True, rank=rank)),
    ]
    note = "matches first fundamental character" if img == first_fundamental_character(n) else \
        "does not match the first fundamental character"
    return _emit(cfg, eqs, [note])


def run_verify(cfg: RunConfig) -> tuple[str, int]:
    from .suites import SuiteConfig, UnknownSuite, run_suite

    sc = SuiteConfig(window=cfg.window, depth=cfg.depth, order=cfg.order, default_window=default_window())
    try:
        report = run_suite(cfg.suite, sc)
    except UnknownSuite as exc:
        raise InputError(str(exc)) from None
    return report.render(cfg.format), report.exit_status


HANDLERS = {
    "flows": run_flows,
    "miura": run_miura,
    "canonicalize": run_canonicalize,
    "qmiura": run_qmiura,
    "limit": run_limit,
    "baxter": run_baxter,
    "qchar": run_qchar,
}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opera", description="Exact opers, Miura maps, KdV flows and q-analogues.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        p.add_argument("--format", choices=FORMATS, default="text")
        for flag in flags:
            if flag == "n":
                p.add_argument("--n", type=int, default=2, help="rank n of sl_n")
            elif flag == "m":
                p.add_argument("--m", type=int, default=3, help="flow index")
            elif flag == "depth":
                p.add_argument("--depth", type=int, default=8, help="pseudodifferential truncation depth")
            elif flag == "window":
                p.add_argument("--window", type=int, default=None,
                               help=f"mode window (default: per suite, {WINDOW_ENV} or 12)")
            elif flag == "order":
                p.add_argument("--order", type=int, default=20, help="series order")
            elif flag == "input":
                p.add_argument("--input", default=None, help="JSON input file")
        return p

    common(sub.add_parser("flows", help="KdV-type Lax flows"), "n", "m").add_argument(
        "--modified", action="store_true", help="also print the modified (mKdV) flows")
    common(sub.add_parser("miura", help="Miura polynomials v_i(u)"), "n", "input")
    common(sub.add_parser("canonicalize", help="canonical form of an oper given as JSON"), "input")
    common(sub.add_parser("qmiura", help="q-Miura transformation"), "n")
    common(sub.add_parser("limit", help="classical limit q = e^h")).add_argument(
        "--order", type=int, default=4, help="number of h-orders to print")
    common(sub.add_parser("baxter", help="t(z) from a Baxter polynomial Q"), ).add_argument(
        "--q-poly", dest="q_poly", default=None, help='e.g. "1 - z"')
    common(sub.add_parser("qchar", help="q-character of t_1 and its forgetful image"), "n")
    common(sub.add_parser("verify", help="run verification suites"), "depth", "window", "order").add_argument(
        "--suite", default="all", help="poisson, lax, oper, qbracket, qlimit, wqt, qchar, wakimoto or all")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    cfg = RunConfig(**vars(args))
    try:
        cfg.validate()
        if cfg.command == "verify":
            text, status = run_verify(cfg)
        else:
            text, status = HANDLERS[cfg.command](cfg), 0
    except InputError as exc:
        print(f"opera {cfg.command}: error: {exc}", file=sys.stderr)
        return 2
    print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
