"""Command-line interface: ``heqed <command> [options]``.

Data goes to stdout and is byte-identical between identical invocations.
The one line that carries wall-clock time is written to stderr and can be
silenced with ``--quiet``.
"""
from __future__ import annotations

import argparse
import io
import sys
import time
from dataclasses import dataclass, field

import mpmath as mp

from . import __version__
from . import qedzone as qz
from . import solver as sv
from . import verify
from . import wavefunction as wf
from .constants import REFERENCE, helium_constants
from .numerics import DIGITS_ENV, HeqedError, NonConvergenceError, PrecisionContext

__all__ = ["EXIT_FAILURE", "EXIT_NUMERIC", "EXIT_USAGE", "OutputRecord", "build_parser", "main", "run"]

EXIT_FAILURE = 1
EXIT_NUMERIC = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


# ---------------------------------------------------------------- output


def format_number(x, digits: int) -> str:
    """Fixed notation in [1e-5, 1e6), scientific outside; always a valid JSON number."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return mp.nstr(mp.mpmathify(x), digits, min_fixed=-5, max_fixed=6)


@dataclass
class OutputRecord:
    command: str
    digits: int
    params: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)  # name -> (value, unit)
    columns: list[tuple[str, str]] = field(default_factory=list)  # (name, unit) of a table
    rows: list[tuple] = field(default_factory=list)
    elapsed: float = 0.0
    checks: list | None = None

    def add(self, name, value, unit="1"):
        self.values[name] = (value, unit)

    def header_line(self) -> str:
        return f"# heqed {self.command} digits={self.digits} elapsed={self.elapsed:.3f}s"

    def to_json(self) -> str:
        parts = [f'"command": {_json_str(self.command)}', f'"digits": {self.digits}']
        if self.params:
            parts.append('"params": {' + ", ".join(f"{_json_str(k)}: {_json_value(v, self.digits)}" for k, v in self.params.items()) + "}")
        for name, (value, _) in self.values.items():
            parts.append(f"{_json_str(name)}: {_json_value(value, self.digits)}")
        if self.values:
            parts.append('"units": {' + ", ".join(f"{_json_str(k)}: {_json_str(u)}" for k, (_, u) in self.values.items()) + "}")
        if self.columns:
            parts.append('"columns": [' + ", ".join(_json_str(c) for c, _ in self.columns) + "]")
            parts.append('"column_units": [' + ", ".join(_json_str(u) for _, u in self.columns) + "]")
            body = ", ".join("[" + ", ".join(_json_value(v, self.digits) for v in row) + "]" for row in self.rows)
            parts.append(f'"rows": [{body}]')
        return "{" + ", ".join(parts) + "}\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        if self.columns:
            names = ",".join(c for c, _ in self.columns)
            units = ",".join(u for _, u in self.columns)
            out.write(f"# columns: {names} ; units: {units} ; digits: {self.digits}\n")
            for row in self.rows:
                out.write(",".join(_csv_value(v, self.digits) for v in row) + "\n")
        else:
            out.write(f"# columns: name,value,unit ; units: -,-,- ; digits: {self.digits}\n")
            for name, (value, unit) in self.values.items():
                out.write(f"{name},{_csv_value(value, self.digits)},{unit}\n")
        return out.getvalue()

    def to_text(self) -> str:
        if self.columns:
            return self.to_csv()
        lines = []
        for name, (value, unit) in self.values.items():
            shown = value if isinstance(value, str) else format_number(value, self.digits)
            lines.append(f"{name} = {shown}" + ("" if unit in ("1", "") else f" {unit}"))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "text": self.to_text}[fmt]()


def _json_str(s) -> str:
    s = str(s)
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _json_value(v, digits):
    if v is None:
        return "null"
    if isinstance(v, str):
        return _json_str(v)
    return format_number(v, digits)


def _csv_value(v, digits):
    return v if isinstance(v, str) else format_number(v, digits)


# ---------------------------------------------------------------- helpers


def _lam(value, dc):
    if value is None:
        return mp.mpf(verify.PUBLISHED["lambda_lit"])
    if value == "ab-initio":
        return qz.lambda_ab_initio(dc)
    return mp.mpf(value)


def _grid(lo, hi, points):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    if points < 2:
        raise UsageError("--points must be at least 2")
    step = (hi - lo) / (points - 1)
    return [lo + i * step for i in range(points)]


def _state(args, ctx, dc):
    """HeState for the wavefunction commands: solved, or at a given/literature energy."""
    lam = _lam(args.lam, dc)
    if args.energy is not None:
        E = dc.phys.to_J(args.energy)
    elif args.solve:
        E, _ = sv.solve_energy(args.n, lam, dc=dc, ctx=ctx)
    elif args.n == 1:
        E = REFERENCE.literature_frequency_form(dc.phys)
    else:
        E = REFERENCE.literature(args.n, dc.phys)
    return sv.solved_state(args.n, E, lam, dc, ctx)


# ---------------------------------------------------------------- commands


def cmd_constants(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    pc = dc.phys
    for name, unit in (("hbar", "J s"), ("c", "m/s"), ("e", "C"), ("m_e", "kg"), ("eps0", "F/m")):
        rec.add(name, getattr(pc, name), unit)
    rec.add("Z", pc.Z)
    rec.add("h", pc.h, "J s")
    rec.add("fine_structure", pc.fine_structure)
    rec.add("compton_wavelength", pc.compton_wavelength, "m")
    rec.add("bohr_radius", pc.bohr_radius(), "m")
    rec.add("bohr_radius_reduced", pc.bohr_radius(reduced=True), "m")
    rec.add("B", dc.B, "1/(J m^2)")
    rec.add("A", dc.A, "1/m")
    rec.add("C_C", dc.C_C, "1/m")
    rec.add("k_e", dc.k_e, "J m")
    rec.add("Lambda_WK", dc.Lambda_WK, "J m^5")
    rec.add("E_S", dc.E_S, "V/m")


def cmd_a_min(args, ctx, rec):
    a = qz.solve_a_min(ctx)
    rec.add("a_min", a)
    rec.add("residual", qz.stationarity_residual(a))


def cmd_lambda(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    if args.from_coupling is not None:
        rec.params.update(f_E=args.from_coupling, form=args.form)
        lam = qz.lambda_from_coupling(mp.mpf(args.from_coupling), qz.solve_a_min(ctx), dc, form=args.form)
        rec.add("lambda_from_coupling", lam, "m")
    elif args.from_cutoff is not None:
        ref = _lam(args.reference, dc)
        rec.params.update(l_cutoff=args.from_cutoff, reference=ref)
        q, steps = qz.mass_ratio_from_cutoff(mp.mpf(args.from_cutoff), dc.phys, ctx)
        rec.add("mass_ratio", q)
        rec.add("iterations", steps)
        rec.add("lambda_from_cutoff", qz.lambda_from_cutoff(mp.mpf(args.from_cutoff), ref, dc.phys, ctx), "m")
    else:
        rec.add("lambda_ab_initio", qz.lambda_ab_initio(dc), "m")


def cmd_coupling(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    lam = _lam(args.lam, dc)
    rec.params.update(lam=lam, form=args.form)
    if args.curve:
        rec.columns = [("a", "1"), ("f_E", "1")]
        rec.rows = [(a, qz.coupling_factor(a, lam, dc, form=args.form)) for a in _grid(args.a_lo, args.a_hi, args.points)]
        return
    a = qz.solve_a_min(ctx) if args.a is None else mp.mpf(args.a)
    rec.add("a", a)
    rec.add("f_E", qz.coupling_factor(a, lam, dc, form=args.form))


def cmd_zone_energy(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    lam = _lam(args.lam, dc)
    opts = {"form": args.form}
    if args.cutoff is not None:
        opts["cutoff"] = mp.mpf(args.cutoff) * lam
    rec.params.update(lam=lam, form=args.form, cutoff=args.cutoff)
    keV = dc.phys.e * 1000
    if args.curve:
        rec.columns = [("a", "1"), ("E", "keV")]
        rec.rows = [(a, E / keV) for a, E in qz.zone_energy_curve(_grid(args.a_lo, args.a_hi, args.points), lam, dc, ctx, **opts)]
        return
    a = qz.solve_a_min(ctx) if args.a is None else mp.mpf(args.a)
    rec.add("a", a)
    rec.add("E", qz.zone_energy(a * lam, lam, dc, ctx, **opts) / keV, "keV")


def cmd_wavefunction(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    state = _state(args, ctx, dc)
    k = state.k(dc)
    rec.params.update(n=args.n, lam=state.lam, E=dc.phys.to_eV(state.E), alpha0=state.alpha0, f_N=state.f_N)
    rec.columns = [("x", "1"), ("R", "1"), ("dR", "1"), ("d2R", "1"), ("density", "1")]
    for x in _grid(args.x_lo, args.x_hi, args.points):
        R, R1, R2 = wf.radial_terms(args.n, x, k)
        rec.rows.append((x, R, R1, R2, state.f_N * x * x * R * R))


def cmd_density(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    state = _state(args, ctx, dc)
    a0 = dc.phys.bohr_radius()
    rec.params.update(n=args.n, lam=state.lam, alpha0=state.alpha0, a0=a0)
    lo, hi = mp.mpf(args.r_lo), mp.mpf(args.r_hi)
    grid = _grid(lo, hi, args.points)
    he = lambda r: wf.radial_density_he(args.n, r, state, dc, ctx)
    if args.compare:
        rec.columns = [("r", "m"), ("helium", "1/m"), ("hydrogen", "1/m")]
        rec.rows = [(r, he(r), wf.radial_density_h(r, 1, a0, normalized=True)) for r in grid]
    else:
        rec.columns = [("r", "m"), ("helium", "1/m")]
        rec.rows = [(r, he(r)) for r in grid]


def cmd_cutoff(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    D = mp.mpf(verify.PUBLISHED["gap"] if args.gap is None else args.gap)
    rec.params.update(gap=D, mass_shift=args.mass_shift)
    model = qz.cutoff_chain(D, dc.phys, ctx, mass_shift=args.mass_shift)
    rec.add("m_b", model.m_b, "kg")
    rec.add("l_cutoff", model.l_cutoff, "m")
    rec.add("E_cutoff", model.E_cutoff, "eV")


def _write_trace(trace, path, unit, digits):
    if path:
        trace.write_csv(path, value_unit=unit, functional_unit="J", digits=digits)


def cmd_energy(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    lam = _lam(args.lam, dc)
    rec.params.update(state=args.state, lam=lam, signs=args.signs)
    try:
        E, trace = sv.solve_energy(args.state, lam, dc=dc, ctx=ctx, signs=args.signs)
    except NonConvergenceError as exc:
        if exc.trace is not None:
            _write_trace(exc.trace, args.trace, "J", ctx.digits)
        raise
    _write_trace(trace, args.trace, "J", ctx.digits)
    state = sv.solved_state(args.state, E, lam, dc, ctx)
    rec.add("E", dc.phys.to_eV(E), "eV")
    rec.add("E_J", E, "J")
    rec.add("iterations", trace.iterations)
    rec.add("alpha0", state.alpha0, "1/m")
    rec.add("f_N", state.f_N)
    rec.add("f_E", state.f_E)


def cmd_fit_lambda(args, ctx, rec):
    dc = helium_constants(ctx.digits)
    target = mp.mpf(verify.PUBLISHED["ground_target_eV"] if args.target is None else args.target)
    rec.params.update(target=target, signs=args.signs)
    try:
        lam, trace = sv.solve_lambda(dc.phys.to_J(target), dc=dc, ctx=ctx, signs=args.signs)
    except NonConvergenceError as exc:
        if exc.trace is not None:
            _write_trace(exc.trace, args.trace, "m", ctx.digits)
        raise
    _write_trace(trace, args.trace, "m", ctx.digits)
    rec.add("lambda", lam, "m")
    rec.add("iterations", trace.iterations)


def cmd_verify(args, ctx, rec):
    checks = verify.run(ctx, args.criteria, golden=not args.no_golden)
    rec.columns = [("status", "-"), ("criterion", "-"), ("check", "-"), ("observed", "-"), ("expected", "-"), ("tolerance", "-")]
    rec.rows = [("PASS" if c.passed else "FAIL", str(c.criterion), c.name, c.observed, c.expected, c.tolerance) for c in checks]
    rec.add("passed", sum(c.passed for c in checks))
    rec.add("failed", sum(not c.passed for c in checks))
    rec.checks = checks


# ---------------------------------------------------------------- parser


def _common(p):
    p.add_argument("--digits", type=int, default=None, help=f"significant digits (default ${DIGITS_ENV} or 50)")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--quiet", action="store_true", help="suppress the timing line on stderr")


def _state_opts(p):
    p.add_argument("--n", type=int, default=1, choices=(1, 2, 3))
    p.add_argument("--lambda", dest="lam", default=None, help="zone width in m, or 'ab-initio'")
    p.add_argument("--energy", default=None, help="energy in eV (default: literature value)")
    p.add_argument("--solve", action="store_true", help="converge the energy first")
    p.add_argument("--points", type=int, default=101)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heqed", description="Helium S states with a Gaussian QED interaction zone.")
    parser.add_argument("--version", action="version", version=f"heqed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="input and derived constants")
    _common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("a-min", help="stationary point of the zone energy in units of lambda")
    _common(p)
    p.set_defaults(func=cmd_a_min)

    p = sub.add_parser("lambda", help="interaction-zone width")
    _common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ab-initio", action="store_true", help="field-energy estimate (default)")
    g.add_argument("--from-coupling", metavar="F_E", default=None)
    g.add_argument("--from-cutoff", metavar="L", default=None)
    p.add_argument("--form", choices=("closed", "listing"), default="listing")
    p.add_argument("--reference", default=None, help="reference width for --from-cutoff")
    p.set_defaults(func=cmd_lambda)

    for name, func, help_ in (
        ("coupling", cmd_coupling, "coupling factor f_E"),
        ("zone-energy", cmd_zone_energy, "energy of the zone in the smeared potential (keV)"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.add_argument("--lambda", dest="lam", default=None, help="zone width in m, or 'ab-initio'")
        p.add_argument("--a", default=None, help="position in units of lambda (default a_min)")
        p.add_argument("--curve", action="store_true")
        p.add_argument("--a-lo", default="0.5")
        p.add_argument("--a-hi", default="2.0")
        p.add_argument("--points", type=int, default=31)
        if name == "coupling":
            p.add_argument("--form", choices=("closed", "listing"), default="closed")
        else:
            p.add_argument("--form", choices=("reduced", "direct"), default="reduced")
            p.add_argument("--cutoff", default=None, help="lower limit in units of lambda for --form direct")
        p.set_defaults(func=func)

    p = sub.add_parser("wavefunction", help="radial shape table in x = alpha0 z")
    _common(p)
    _state_opts(p)
    p.add_argument("--emit", choices=("csv", "json"), default=None, help="alias for --format")
    p.add_argument("--x-lo", default="0")
    p.add_argument("--x-hi", default="10")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("density", help="radial probability density per metre")
    _common(p)
    _state_opts(p)
    p.add_argument("--compare", action="store_true", help="add the hydrogen 1s density")
    p.add_argument("--r-lo", default="0")
    p.add_argument("--r-hi", default="2e-10")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("cutoff", help="self-energy cutoff from a relative zone-width gap")
    _common(p)
    p.add_argument("--gap", default=None)
    p.add_argument("--mass-shift", choices=("bare", "identity"), default="bare")
    p.set_defaults(func=cmd_cutoff)

    p = sub.add_parser("energy", help="converge the energy of an S state")
    _common(p)
    p.add_argument("--state", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--lambda", dest="lam", default=None, help="zone width in m, or 'ab-initio'")
    p.add_argument("--signs", choices=("listing", "variational"), default="listing")
    p.add_argument("--trace", default=None, metavar="CSV")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("fit-lambda", help="fit the zone width to a ground-state energy")
    _common(p)
    p.add_argument("--target", default=None, help="energy in eV")
    p.add_argument("--signs", choices=("listing", "variational"), default="listing")
    p.add_argument("--trace", default=None, metavar="CSV")
    p.set_defaults(func=cmd_fit_lambda)

    p = sub.add_parser("verify", help="run the acceptance checks and print a pass/fail table")
    _common(p)
    p.add_argument("--criteria", type=int, nargs="+", default=None, choices=sorted(verify.CRITERIA))
    p.add_argument("--no-golden", action="store_true", help="skip the golden-value comparison")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run the command, write its output and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    fmt = getattr(args, "emit", None) or args.format
    try:
        ctx = PrecisionContext(args.digits) if args.digits is not None else PrecisionContext.from_env()
        rec = OutputRecord(command=args.command, digits=ctx.digits)
        start = time.perf_counter()
        with ctx.activate():
            args.func(args, ctx, rec)
            text = rec.render(fmt)
        rec.elapsed = time.perf_counter() - start
    except UsageError as exc:
        stderr.write(f"heqed: error: {exc}\n")
        return EXIT_USAGE
    except HeqedError as exc:
        stderr.write(f"heqed {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    if not args.quiet:
        stderr.write(rec.header_line() + "\n")
    stdout.write(text)
    checks = getattr(rec, "checks", None)
    if checks is not None and not all(c.passed for c in checks):
        return EXIT_FAILURE
    return 0


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
