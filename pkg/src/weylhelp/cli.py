"""Command-line front end.

    weylhelp residue eq1 --bc dirichlet --lambda0 0 --alpha 1+1i
    weylhelp verdict eq2 --lambda0 16 --alpha 1
    weylhelp locate-poles eq3 --bc neumann --bracket 5 7

Exit status is 0 on success, 2 when the Taylor accuracy target was not met
and 1 on any error.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import ExprDomainError, ExprSyntaxError
from .odeint import IntegrationError, IntegratorSettings
from .problem import Problem, ProblemError, load_problem
from .riccati import DEFAULT_ALPHA, PoleProximityError, as_bc
from .laurent import LaurentBreakdownError
from .spectral import (PoleNotFoundError, ResidueReport, evaluate_m, help_verdict, locate_poles,
                       residue_report, sector_scan)
from .taylor import DEFAULT_TARGET
from .vandermonde import VandermondeError

EXIT_OK, EXIT_ERROR, EXIT_TARGET = 0, 1, 2
COMMANDS = ("eval-m", "locate-poles", "residue", "verdict", "sector-scan")

_COMPLEX_RE = re.compile(
    r"^\s*(?:(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"(?=[+-]|\s*$))?"
    r"(?:(?P<im>[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)[ij])?\s*$")


def parse_complex(text: str) -> complex:
    """``"1+1i"``, ``"1-2.5i"``, ``"3"``, ``"-i"``, ``"0.5j"``; also ``"re,im"``."""
    if "," in text:
        re_, im_ = text.split(",", 1)
        z = complex(float(re_), float(im_))
    else:
        m = _COMPLEX_RE.match(text)
        if not m or (m.group("re") is None and m.group("im") is None):
            raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")
        re_ = float(m.group("re")) if m.group("re") else 0.0
        im = m.group("im")
        if im is None:
            im_ = 0.0
        elif im in ("", "+", "-"):
            im_ = -1.0 if im == "-" else 1.0
        else:
            im_ = float(im)
        z = complex(re_, im_)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return z


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _positive(text: str) -> float:
    v = _finite(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


@dataclass
class RunConfig:
    problem: str
    command: str
    bc: str = "dirichlet"
    lam: complex | None = None
    bracket: tuple[float, float] | None = None
    alpha: complex = DEFAULT_ALPHA
    tol: float = 1e-9
    target_acc: float = DEFAULT_TARGET
    X: float | None = None
    output: str | None = None
    machine: bool = False
    rhos: tuple[float, ...] = (1e-2, 1e-3)
    thetas_deg: tuple[float, ...] = (80.0, 85.0)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; status 2 is reserved for an unmet accuracy target."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="weylhelp",
                 description="M-matrices, residues and HELP verdicts for "
                 "fourth-order Sturm-Liouville problems")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, bc=True):
        p.add_argument("problem", help="config file, or a bundled name (eq1, eq2, eq3)")
        if bc:
            p.add_argument("--bc", choices=("dirichlet", "neumann"), default="dirichlet")
        p.add_argument("--alpha", type=parse_complex, default=DEFAULT_ALPHA,
                       help="Psi-transform shift, e.g. 1+1i (default)")
        p.add_argument("--tol", type=_positive, default=1e-9, help="integration tolerance")
        p.add_argument("--X", dest="X", type=_positive, default=None,
                       help="override the truncation point")
        p.add_argument("--output", "-o", default=None, help="write the report here")
        p.add_argument("--machine", action="store_true", help="key=value output")

    p = sub.add_parser("eval-m", help="evaluate M_D or M_N at a complex lambda")
    common(p)
    p.add_argument("--lambda", dest="lam", type=parse_complex, required=True)

    p = sub.add_parser("locate-poles", help="find the poles of M_D or M_N in a real interval")
    common(p)
    p.add_argument("--bracket", nargs=2, type=_finite, required=True, metavar=("LO", "HI"))

    for name, helptext in (("residue", "residue of M_D or M_N at a real pole"),
                           ("verdict", "residues of both matrices and the rank criterion")):
        p = sub.add_parser(name, help=helptext)
        common(p, bc=name == "residue")
        p.add_argument("--lambda0", "--lambda", dest="lam", type=_finite, required=True)
        p.add_argument("--target-acc", type=_positive, default=DEFAULT_TARGET)

    p = sub.add_parser("sector-scan", help="sample Im(-+lam^2 M_N) about a Neumann pole")
    common(p, bc=False)
    p.add_argument("--lambda0", "--lambda", dest="lam", type=_finite, required=True)
    p.add_argument("--rho", nargs="+", type=_positive, default=[1e-2, 1e-3])
    p.add_argument("--theta", nargs="+", type=_finite, default=[80.0, 85.0],
                   help="angles in degrees")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(problem=ns.problem, command=ns.command, alpha=ns.alpha, tol=ns.tol, X=ns.X,
                    output=ns.output, machine=ns.machine)
    cfg.bc = getattr(ns, "bc", "dirichlet")
    lam = getattr(ns, "lam", None)
    cfg.lam = None if lam is None else complex(lam)
    if getattr(ns, "bracket", None) is not None:
        cfg.bracket = tuple(ns.bracket)
    cfg.target_acc = getattr(ns, "target_acc", DEFAULT_TARGET)
    if getattr(ns, "rho", None) is not None:
        cfg.rhos = tuple(ns.rho)
        cfg.thetas_deg = tuple(ns.theta)
    return cfg


# --- formatting ----------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.17g},{v.imag:.17g}"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


class Record:
    """Ordered key/value report; renders as machine lines or a readable block."""

    def __init__(self):
        self.items: list[tuple[str, object]] = []

    def add(self, key: str, value) -> None:
        self.items.append((key, value))

    def matrix(self, key: str, m) -> None:
        m = np.asarray(m)
        for i in range(2):
            for j in range(2):
                self.add(f"{key}.{i + 1}{j + 1}", complex(m[i, j]))

    def machine(self) -> str:
        return "".join(f"{k}={_num(v)}\n" for k, v in self.items)


def _fmt_mat(m, part: str) -> list[str]:
    a = getattr(np.asarray(m), part)
    return [f"    [{a[i, 0]: .10g}  {a[i, 1]: .10g}]" for i in range(2)]


def _residue_text(r: ResidueReport) -> list[str]:
    name = "M_D" if r.bc.value == "dirichlet" else "M_N"
    lines = [f"{name} residue at lambda0 = {r.lam0:.10g}"]
    if r.label:
        lines.append(f"  problem: {r.label}")
    lines.append(f"  alpha = {r.alpha.real:g}{r.alpha.imag:+g}i   X = {r.X:g}   "
                 f"integration tolerance = {r.tol:g}")
    if not r.has_pole:
        lines.append(f"  no pole: |1 - alpha tr Psi0 + alpha^2 det Psi0| = {abs(r.a0):.3g}")
    lines.append("  real part of residue matrix:")
    lines += _fmt_mat(r.residue, "real")
    lines.append("  imaginary part of residue matrix:")
    lines += _fmt_mat(r.residue, "imag")
    lines.append(f"  code error estimate (sup norm): {r.error_estimate:.3g}")
    d = r.det_residue
    lines.append(f"  determinant of residue matrix: {d.real:.10g}{d.imag:+.3g}i")
    lines.append(f"  value of |a1|: {r.abs_a1:.6g}")
    lines.append(f"  numerical rank: {r.numerical_rank}")
    lines.append(f"  Taylor fit: m = {r.m_final}, |mu| = {abs(r.mu_final):g}, "
                 f"status {r.taylor_status.value}")
    lines.append(f"  convention: {r.convention}")
    return lines


def _residue_record(rec: Record, r: ResidueReport, prefix: str = "") -> None:
    rec.add(prefix + "bc", r.bc.value)
    rec.add(prefix + "lambda0", r.lam0)
    rec.add(prefix + "alpha", r.alpha)
    rec.add(prefix + "X", r.X)
    rec.add(prefix + "tol", r.tol)
    rec.add(prefix + "has_pole", r.has_pole)
    rec.matrix(prefix + "residue", r.residue)
    rec.add(prefix + "error_estimate", r.error_estimate)
    rec.add(prefix + "realness_defect", r.realness_defect)
    rec.add(prefix + "det_residue", r.det_residue)
    rec.add(prefix + "abs_a1", r.abs_a1)
    rec.add(prefix + "numerical_rank", r.numerical_rank)
    rec.add(prefix + "scale_tol", r.scale_tol)
    rec.add(prefix + "branch", r.branch.value if r.branch else "none")
    rec.add(prefix + "m_final", r.m_final)
    rec.add(prefix + "mu_final", r.mu_final)
    rec.add(prefix + "taylor_status", r.taylor_status.value)


# --- commands ------------------------------------------------------------------

def _settings(cfg: RunConfig) -> IntegratorSettings:
    return IntegratorSettings(rel_tol=cfg.tol)


def _cmd_eval_m(cfg, prob, rec):
    m = evaluate_m(prob, cfg.bc, cfg.lam, cfg.alpha, _settings(cfg))
    rec.add("command", cfg.command)
    rec.add("bc", cfg.bc)
    rec.add("lambda", cfg.lam)
    rec.add("alpha", cfg.alpha)
    rec.add("X", prob.X)
    rec.add("tol", cfg.tol)
    rec.matrix("M", m)
    name = "M_D" if cfg.bc == "dirichlet" else "M_N"
    text = [f"{name}({cfg.lam.real:g}{cfg.lam.imag:+g}i), X = {prob.X:g}",
            "  real part:", *_fmt_mat(m, "real"), "  imaginary part:", *_fmt_mat(m, "imag")]
    return text, EXIT_OK


def _cmd_locate(cfg, prob, rec):
    poles = locate_poles(prob, cfg.bc, cfg.bracket, cfg.alpha, _settings(cfg))
    rec.add("command", cfg.command)
    rec.add("bc", cfg.bc)
    rec.add("bracket.lo", cfg.bracket[0])
    rec.add("bracket.hi", cfg.bracket[1])
    rec.add("X", prob.X)
    rec.add("count", len(poles))
    for i, lam in enumerate(poles):
        rec.add(f"pole.{i}", lam)
    name = "M_D" if cfg.bc == "dirichlet" else "M_N"
    text = [f"poles of {name} in [{cfg.bracket[0]:g}, {cfg.bracket[1]:g}] (X = {prob.X:g}):"]
    text += [f"  {lam:.10f}" for lam in poles] or ["  none"]
    return text, EXIT_OK


def _cmd_residue(cfg, prob, rec):
    r = residue_report(prob, cfg.bc, cfg.lam.real, cfg.alpha, _settings(cfg), cfg.target_acc)
    rec.add("command", cfg.command)
    _residue_record(rec, r)
    return _residue_text(r), EXIT_OK if r.target_reached else EXIT_TARGET


def _cmd_verdict(cfg, prob, rec):
    v, rd, rn = help_verdict(prob, cfg.lam.real, cfg.alpha, _settings(cfg), cfg.target_acc)
    rec.add("command", cfg.command)
    rec.add("outcome", v.outcome.value)
    rec.add("rank_D", v.rank_D)
    rec.add("rank_N", v.rank_N)
    _residue_record(rec, rd, "D.")
    _residue_record(rec, rn, "N.")
    text = [v.summary(), f"  {v.notes}", ""] + _residue_text(rd) + [""] + _residue_text(rn)
    ok = rd.target_reached and rn.target_reached
    return text, EXIT_OK if ok else EXIT_TARGET


def _cmd_sector(cfg, prob, rec):
    thetas = [math.radians(t) for t in cfg.thetas_deg]
    scan = sector_scan(prob, cfg.lam.real, cfg.rhos, thetas, cfg.alpha, _settings(cfg))
    rec.add("command", cfg.command)
    rec.add("lambda0", scan.lam0)
    rec.add("X", prob.X)
    rec.add("count", len(scan.samples))
    rec.add("all_positive", scan.all_positive)
    text = [f"sector scan of M_N about lambda0 = {scan.lam0:g} (X = {prob.X:g})",
            "  quadrant      rho   theta(deg)   min eigenvalue"]
    for i, s in enumerate(scan.samples):
        rec.add(f"sample.{i}.rho", s.rho)
        rec.add(f"sample.{i}.theta", s.theta)
        rec.add(f"sample.{i}.quadrant", s.quadrant)
        rec.add(f"sample.{i}.min_eig", s.min_eig)
        if s.error:
            rec.add(f"sample.{i}.error", s.error)
        text.append(f"  {s.quadrant:8d} {s.rho:8.2g} {math.degrees(s.theta):12.4g}   "
                    f"{s.min_eig: .6e}{'  ' + s.error if s.error else ''}")
    text.append("  all positive" if scan.all_positive else "  NOT all positive")
    return text, EXIT_OK


_HANDLERS = {"eval-m": _cmd_eval_m, "locate-poles": _cmd_locate, "residue": _cmd_residue,
             "verdict": _cmd_verdict, "sector-scan": _cmd_sector}


def _check_inputs(cfg: RunConfig) -> None:
    if cfg.command in ("eval-m",) and cfg.lam is None:
        raise ValueError("--lambda is required")
    if cfg.command == "locate-poles":
        if cfg.bracket is None or not cfg.bracket[1] > cfg.bracket[0]:
            raise ValueError("--bracket needs LO < HI")
    as_bc(cfg.bc)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        _check_inputs(cfg)
        prob: Problem = load_problem(cfg.problem, X=cfg.X)
        rec = Record()
        text, code = _HANDLERS[cfg.command](cfg, prob, rec)
    except (ProblemError, ExprSyntaxError, ExprDomainError, IntegrationError, PoleProximityError,
            PoleNotFoundError, LaurentBreakdownError, VandermondeError, ValueError,
            OSError) as exc:
        print(f"weylhelp: error: {exc}", file=stderr)
        return EXIT_ERROR
    body = rec.machine() if cfg.machine else "\n".join(text) + "\n"
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(body)
        except OSError as exc:
            print(f"weylhelp: error: {exc}", file=stderr)
            return EXIT_ERROR
    else:
        stdout.write(body)
    if code == EXIT_TARGET:
        print("weylhelp: warning: Taylor accuracy target not reached", file=stderr)
    return code


def parse_machine(text: str) -> dict[str, str]:
    """Inverse of the machine format, values left as strings."""
    out = {}
    for line in text.splitlines():
        if line:
            k, _, v = line.partition("=")
            out[k] = v
    return out


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
