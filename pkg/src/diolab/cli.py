"""Command-line front end: `diolab <command> ...`.

Every run writes JSON Lines. The first line is a header naming the command,
version, seed and the checks the run exercised. Exact values are written as
"num/den" strings. Figures (SVG) and tables (CSV) go to the output directory,
which defaults to $DIOLAB_OUTPUT_DIR or the current directory.

Exit status: 0 on success, 1 on a domain error (with an error record), 2 on
a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from . import __version__
from .arith import CPoint, DomainError, GaussianInt, QuadraticSurd, format_number, parse_number

ENV_OUTDIR = "DIOLAB_OUTPUT_DIR"


# ---------------------------------------------------------------- output helpers


def _fs(x) -> str:
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"
    return format_number(x)


def _jsonable(x):
    if isinstance(x, (Fraction, QuadraticSurd)):
        return _fs(x)
    if isinstance(x, GaussianInt):
        return [x.re, x.im]
    if isinstance(x, CPoint):
        return [_fs(x.re), _fs(x.im)]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    return x


class Sink:
    """Collects records and writes them as JSON Lines."""

    def __init__(self, args, checks: list[str]):
        self.args = args
        self.lines: list[str] = []
        header = {
            "type": "header",
            "command": args.command,
            "version": __version__,
            "seed": args.seed,
            "checks": checks,
            # artifact paths are left out so identical runs give identical bytes
            "args": {
                k: (v is not None if k in ("svg", "csv") else v)
                for k, v in sorted(vars(args).items())
                if k not in ("func", "output", "outdir")
            },
        }
        self.emit(header)

    def emit(self, rec: dict) -> None:
        self.lines.append(json.dumps(_jsonable(rec)))

    def close(self) -> None:
        text = "\n".join(self.lines) + "\n"
        if self.args.output:
            Path(self.args.output).write_text(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()


def _outdir(args) -> Path:
    d = Path(args.outdir or os.environ.get(ENV_OUTDIR) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _artifact(args, flag_value, default_name: str) -> Path:
    if isinstance(flag_value, str) and flag_value:
        return Path(flag_value)
    return _outdir(args) / default_name


# ---------------------------------------------------------------- svg


def _svg(points: Iterable[tuple[float, float]] = (), marks: Iterable[tuple[float, float]] = (),
         circles: Iterable[tuple[float, float, float]] = (), view=(0.0, 0.0, 1.0), size: int = 512) -> str:
    """Square viewport mapping [x0, x0+w] x [y0, y0+w] to size x size (y up)."""
    x0, y0, w = view

    def X(x):
        return (x - x0) / w * size

    def Y(y):
        return size - (y - y0) / w * size

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>',
    ]
    for cx, cy, r in circles:
        out.append(f'<circle cx="{X(cx):.3f}" cy="{Y(cy):.3f}" r="{r / w * size:.3f}" fill="none" stroke="steelblue"/>')
    for x, y in points:
        out.append(f'<circle cx="{X(x):.3f}" cy="{Y(y):.3f}" r="1" fill="black"/>')
    for x, y in marks:
        out.append(f'<circle cx="{X(x):.3f}" cy="{Y(y):.3f}" r="1" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- parsing helpers


def _int_pair(s: str) -> GaussianInt:
    try:
        a, b = (int(t) for t in s.split(","))
    except ValueError as e:
        raise DomainError(f"expected 'a,b' integers, got {s!r}") from e
    return GaussianInt(a, b)


def _cpoint(s: str) -> CPoint:
    parts = s.split(",")
    try:
        if len(parts) == 1:
            return CPoint(Fraction(parts[0]), Fraction(0))
        if len(parts) == 2:
            return CPoint(Fraction(parts[0]), Fraction(parts[1]))
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"cannot parse point {s!r}") from e
    raise DomainError(f"expected 'x,y' with exact fractions, got {s!r}")


def _number(x):
    """Number from JSON: a string, an int, a 4-list (a,b,c,d), a 3-list a + b sqrt d, or a dict."""
    if isinstance(x, list) and len(x) == 3:
        a, b, d = Fraction(str(x[0])), Fraction(str(x[1])), int(x[2])
        c = a.denominator * b.denominator
        return parse_number([int(a * c), int(b * c), c, d])
    if isinstance(x, float):
        raise DomainError("floats are not exact; pass fractions as strings")
    return parse_number(str(x) if isinstance(x, int) else x)


def _load_input(s: str):
    if os.path.isfile(s):
        s = Path(s).read_text()
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        return s


# ---------------------------------------------------------------- commands


def cmd_cf(args) -> None:
    from .contfrac import certify_badly_approximable, cf_expand, convergents, diophantine_type_fit

    x = parse_number(args.x)
    e = cf_expand(x)
    sink = Sink(args, ["continued fraction expansion", "convergents"])
    conv = convergents(e, args.n)
    sink.emit({
        "type": "cf",
        "x": format_number(x) if not isinstance(x, QuadraticSurd) else str(x),
        "expansion": str(e),
        "preperiod": list(e.preperiod),
        "period": list(e.period),
        "convergents": [f"{p}/{q}" for p, q in conv],
    })
    if args.certify:
        N, K, note = certify_badly_approximable(x)
        sink.emit({"type": "certificate", "N": N, "K": K, "note": note})
    if args.fit:
        f = diophantine_type_fit(e, args.fit)
        sink.emit({"type": "type_fit", "K": f.K, "v": f.v, "residual": f.residual})
    sink.close()


def cmd_approx(args) -> None:
    from .dirichlet import complex_dirichlet, complex_dirichlet_multiples, hurwitz_stream, real_dirichlet, simultaneous_dirichlet

    sink = Sink(args, [f"{args.kind} Dirichlet bound"])
    if args.kind == "complex":
        z = _cpoint(args.x)
        a = complex_dirichlet(z, args.N)
        sink.emit(a.as_record())
        if args.multiples:
            for m in complex_dirichlet_multiples(z, args.N, a):
                sink.emit(m.as_record())
    elif args.kind == "simultaneous":
        xs = [parse_number(t) for t in args.x.split(",")]
        a = simultaneous_dirichlet(xs, args.N)
        sink.emit({"p": [[p, 0] for p in a.p], "q": [a.q, 0], "error": _fs(a.error), "bound": _fs(a.bound)})
    else:
        alpha = parse_number(args.x)
        sink.emit(real_dirichlet(alpha, args.N, method=args.method).as_record())
        if args.hurwitz:
            for p, q in hurwitz_stream(alpha, args.hurwitz):
                sink.emit({"type": "hurwitz", "p": [p, 0], "q": [q, 0]})
    sink.close()


def cmd_lattice(args) -> None:
    from .resonant import neighborhood_measure, resonant_set, small_denominator_measure, ubiquity_coverage

    checks = ["resonant count identity"]
    if args.coverage:
        checks.append("ubiquity coverage")
    if args.small:
        checks.append("small denominator measure")
    sink = Sink(args, checks)
    rs = resonant_set(_int_pair(args.q))
    sink.emit({"type": "resonant_set", "q": rs.q, "norm": rs.n, "count": len(rs)})
    pts = rs.points()
    if args.eps:
        mb = neighborhood_measure(rs.q, Fraction(args.eps), args.resolution)
        sink.emit({"type": "neighborhood_measure", "eps": Fraction(args.eps), **mb.as_record()})
    uncovered = []
    if args.coverage:
        rep = ubiquity_coverage(args.coverage, resolution=args.resolution, keep_uncovered=args.keep_uncovered)
        sink.emit({"type": "coverage", **rep.as_record()})
        uncovered = rep.uncovered
    if args.small:
        mb = small_denominator_measure(args.small, args.resolution)
        sink.emit({"type": "small_denominator_measure", "N": args.small, **mb.as_record()})
    if args.csv is not None:
        path = _artifact(args, args.csv, "lattice.csv")
        path.write_text("re,im\n" + "".join(f"{_fs(p.re)},{_fs(p.im)}\n" for p in pts))
        sink.emit({"type": "artifact", "csv": str(path)})
    if args.svg is not None:
        path = _artifact(args, args.svg, "lattice.svg")
        path.write_text(_svg([(float(p.re), float(p.im)) for p in pts], uncovered))
        sink.emit({"type": "artifact", "svg": str(path)})
    sink.close()


def _adversary(args):
    from .game import CenteringAdversary, InteractiveAdversary, RandomAdversary, TargetAdversary

    spec = args.adversary
    if spec == "random":
        return RandomAdversary(seed=args.seed, resonant_start=args.resonant_start)
    if spec == "centering":
        return CenteringAdversary(_cpoint(args.start) if args.start else CPoint(0, 0))
    if spec.startswith("target:"):
        return TargetAdversary(_cpoint(spec.split(":", 1)[1]))
    if spec == "interactive":
        def read(prompt: str) -> str:
            sys.stderr.write(prompt)
            sys.stderr.flush()
            line = sys.stdin.readline()
            return line if line else "q"

        return InteractiveAdversary(read, lambda s: print(s, file=sys.stderr))
    raise DomainError(f"unknown adversary {spec!r}")


def cmd_game(args) -> None:
    from .game import certify_trace, derive_constants, play_game

    params = derive_constants(Fraction(args.alpha), Fraction(args.beta), Fraction(args.rho1) if args.rho1 else None)
    sink = Sink(args, ["Schmidt game escape displacement", "badly approximable shells"])
    sink.emit({"type": "params", **params.as_record()})
    trace = play_game(params, _adversary(args), args.rounds)
    for i, d in enumerate(trace.discs):
        rec = {"type": "disc", "player": "B" if i % 2 == 0 else "A", "index": i // 2 + 1, **d.as_record()}
        sink.emit(rec)
    for r in trace.rounds:
        sink.emit({
            "type": "round", "k": r.k, "start": r.start, "case": r.case,
            "problematic": [r.problematic.num, r.problematic.den] if r.problematic else None,
            "q_norm": r.q_norm, "direction": r.direction,
        })
    for e in trace.escapes:
        sink.emit({"type": "escape", "start": e.start, "end": e.end, "displacement2": e.displacement2,
                   "required2": e.required2, "verified": e.verified})
    cert = certify_trace(trace)
    sink.emit({
        "type": "certificate",
        "aborted": trace.aborted,
        "certified_up_to_round": cert.rounds,
        "passed": cert.passed,
        "delta": cert.delta,
        "exact_checks": cert.exact_checks,
        "shells": [{"k": s.k, "denominators": s.denominators, "min_margin": s.min_margin,
                    "K_observed": s.K_observed, "passed": s.passed} for s in cert.shells],
    })
    if args.interactive_summary:
        print(f"certificate {'passed' if cert.passed else 'FAILED'} up to round {cert.rounds}", file=sys.stderr)
    if args.svg is not None:
        B1 = trace.discs[0]
        r = float(B1.radius)
        view = (float(B1.center.re) - 1.05 * r, float(B1.center.im) - 1.05 * r, 2.1 * r)
        circles = [(float(d.center.re), float(d.center.im), float(d.radius)) for d in trace.discs]
        targets = []
        for rd in trace.rounds:
            if rd.problematic is not None:
                z = rd.problematic.to_cpoint()
                targets.append((float(z.re), float(z.im)))
        path = _artifact(args, args.svg, "game.svg")
        path.write_text(_svg(marks=targets, circles=circles, view=view))
        sink.emit({"type": "artifact", "svg": str(path)})
    sink.close()


_DIM_KINDS = {
    "real": "real_Wv", "simultaneous": "simultaneous", "linear_forms": "linear_forms",
    "complex": "complex_Wv", "absolute": "absolute_Lhat", "multiplicative": "multiplicative_E",
}


def cmd_dim(args) -> None:
    from .dimlab import LimsupSetDescriptor, closed_form_dimension, cover_s_length, critical_exponent_estimate, Kind

    kind = Kind(_DIM_KINDS.get(args.kind, args.kind))
    d = LimsupSetDescriptor(kind, Fraction(args.v), args.n)
    cf = closed_form_dimension(d)
    sink = Sink(args, ["closed form dimension"] + (["critical exponent estimate"] if args.estimate else []))
    rec = {"type": "dim", "kind": kind.value, "params": {"v": d.v, "n": d.n}, "closed_form": cf,
           "estimate": None, "series": []}
    if args.estimate and kind in (Kind.REAL, Kind.COMPLEX, Kind.SIMULTANEOUS):
        est = critical_exponent_estimate(d, args.Qmax)
        ser = cover_s_length(d, float(cf), args.Qmax)
        rec["estimate"] = float(est)
        rec["series"] = [[int(q), float(s)] for q, s in zip(ser.Qs, ser.sums)]
    sink.emit(rec)
    sink.close()


_KH_KINDS = {"real": "real_kPsi", "plane": "plane_k2Psi2", "complex": "complex_k3Psi2"}


def cmd_khintchine(args) -> None:
    from .khintchine import ApproxFunction, measure_tail_real, measure_union_complex, measure_union_real, series_test, tail_sum_bound

    try:
        c, a, b = args.psi.split(",")
        psi = ApproxFunction.power(c, Fraction(a), Fraction(b))
    except ValueError as e:
        raise DomainError(f"--psi expects c,a,b, got {args.psi!r}") from e
    kind = _KH_KINDS[args.kind]
    sink = Sink(args, ["Khintchine series test", "union measure"])
    v = series_test(psi, kind)
    sink.emit({"type": "verdict", **v.as_record()})
    rows = []
    if args.kind == "complex":
        q = 1
        while q <= args.Q:
            mb = measure_union_complex(psi, q, args.resolution)
            rows.append({"Q": q, **mb.as_record()})
            q *= 2
    else:
        q = 1
        while q <= args.Q:
            rows.append({"Q": q, "measure": measure_union_real(psi, q)})
            q *= 10
        if rows[-1]["Q"] != args.Q:
            rows.append({"Q": args.Q, "measure": measure_union_real(psi, args.Q)})
        if args.N:
            m, bd = measure_tail_real(psi, args.N, args.Q), tail_sum_bound(psi, args.N, args.Q)
            sink.emit({"type": "tail", "N": args.N, "Q": args.Q, "measure": m, "bound": bd,
                       "measure_value": float(m), "bound_value": float(bd)})
    sink.emit({"type": "measure_table", "rows": rows})
    if args.csv is not None:
        path = _artifact(args, args.csv, "khintchine.csv")
        path.write_text("k,partial_sum\n" + "".join(f"{int(k)},{float(s)!r}\n" for k, s in v.evidence))
        sink.emit({"type": "artifact", "csv": str(path)})
    sink.close()


def _audit_input(kind: str, raw):
    if kind == "rotation":
        return _number(raw)
    if kind == "pde":
        if isinstance(raw, str):
            raw = raw.split(",")
        if not (isinstance(raw, list) and len(raw) == 2):
            raise DomainError("pde input is a pair [re, im]")
        return tuple(_number(x) for x in raw)
    if isinstance(raw, str):
        raw = raw.split(",")
    if not isinstance(raw, list):
        raise DomainError("input must be a JSON list")
    if kind == "siegel" and any(isinstance(x, list) and len(x) == 2 for x in raw):
        return [CPoint(Fraction(str(x[0])), Fraction(str(x[1]))) for x in raw]
    return [_number(x) for x in raw]


def cmd_audit(args) -> None:
    from .audit import (additive_type_audit, fit_exponent, kam_frequency_audit, multiplicative_type_audit,
                        pde_ratio_audit, rotation_audit)

    fns = {"pde": pde_ratio_audit, "rotation": rotation_audit, "siegel": multiplicative_type_audit,
           "additive": additive_type_audit, "kam": kam_frequency_audit}
    data = _audit_input(args.kind, _load_input(args.input))
    sink = Sink(args, [f"{args.kind} small divisor audit"])
    if args.fit:
        grid = [Fraction(g) for g in args.grid.split(",")]
        v, rows = fit_exponent(args.kind, data, args.J, grid, Fraction(args.threshold))
        sink.emit({"type": "fit", "threshold": Fraction(args.threshold), "v": v,
                   "rows": [[vv, K] for vv, K in rows]})
    else:
        rep = fns[args.kind](data, args.J, Fraction(args.v))
        sink.emit({"type": "audit", **rep.as_record()})
    sink.close()


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diolab", description="Exact Diophantine approximation experiments.")
    p.add_argument("--version", action="version", version=f"diolab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--seed", type=int, default=0, help="64-bit seed, recorded in the header")
        sp.add_argument("--output", "-o", help="JSON Lines file (default: stdout)")
        sp.add_argument("--outdir", help=f"directory for figures and tables (default: ${ENV_OUTDIR} or .)")
        sp.set_defaults(func=func)
        return sp

    sp = add("cf", cmd_cf, "continued fraction of a rational or quadratic surd")
    sp.add_argument("--x", required=True, help='e.g. "7/5", "phi", "(1+sqrt(5))/2"')
    sp.add_argument("--n", type=int, default=10, help="number of convergents")
    sp.add_argument("--certify", action="store_true", help="badly approximable certificate")
    sp.add_argument("--fit", type=int, default=0, metavar="DEPTH", help="fit (K, v) over DEPTH convergents")

    sp = add("approx", cmd_approx, "Dirichlet approximants")
    sp.add_argument("--kind", choices=["real", "simultaneous", "complex"], default="real")
    sp.add_argument("--x", required=True, help="alpha; comma list for simultaneous; 're,im' for complex")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--method", choices=["best", "pigeonhole"], default="best")
    sp.add_argument("--hurwitz", type=int, default=0, metavar="COUNT", help="also stream Hurwitz fractions")
    sp.add_argument("--multiples", action="store_true", help="list non-reduced multiples (complex)")

    sp = add("lattice", cmd_lattice, "resonant sets, neighbourhoods and ubiquity coverage")
    sp.add_argument("--q", required=True, help="Gaussian integer as 'a,b'")
    sp.add_argument("--eps", help="neighbourhood radius eps (exact)")
    sp.add_argument("--coverage", type=int, metavar="N", help="ubiquity coverage at N")
    sp.add_argument("--keep-uncovered", type=int, default=1000, help="uncovered samples kept for the SVG")
    sp.add_argument("--small", type=int, metavar="N", help="small denominator measure at N")
    sp.add_argument("--resolution", type=int, default=512)
    sp.add_argument("--svg", nargs="?", const="", default=None, help="write an SVG scatter")
    sp.add_argument("--csv", nargs="?", const="", default=None, help="write points as CSV")

    sp = add("game", cmd_game, "play and certify a Schmidt game")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--rho1", help="first radius (default: the largest admissible)")
    sp.add_argument("--rounds", type=int, default=4)
    sp.add_argument("--adversary", default="random", help="random | centering | target:<x,y> | interactive")
    sp.add_argument("--start", help="centering adversary start 'x,y'")
    sp.add_argument("--resonant-start", action="store_true", help="random adversary opens on a rational point")
    sp.add_argument("--svg", nargs="?", const="", default=None, help="draw the nested discs")
    sp.set_defaults(interactive_summary=False)

    sp = add("dim", cmd_dim, "Hausdorff dimension: closed form and cover sum estimate")
    sp.add_argument("--kind", required=True, choices=sorted(set(_DIM_KINDS) | set(_DIM_KINDS.values())))
    sp.add_argument("--v", required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--Qmax", type=int, default=10_000)
    sp.add_argument("--no-estimate", dest="estimate", action="store_false")

    sp = add("khintchine", cmd_khintchine, "Khintchine dichotomy: series verdict and measures")
    sp.add_argument("--psi", required=True, help="c,a,b for Psi(q) = c q^-a (log q)^-b")
    sp.add_argument("--kind", choices=sorted(_KH_KINDS), default="real")
    sp.add_argument("--Q", type=int, default=1000)
    sp.add_argument("--N", type=int, default=0, help="start of the tail measure")
    sp.add_argument("--resolution", type=int, default=256)
    sp.add_argument("--csv", nargs="?", const="", default=None, help="write the partial sums as CSV")

    sp = add("audit", cmd_audit, "small divisor audits")
    sp.add_argument("--kind", required=True, choices=["pde", "rotation", "siegel", "additive", "kam"])
    sp.add_argument("--input", required=True, help="JSON file or inline JSON / number")
    sp.add_argument("--J", type=int, default=1000)
    sp.add_argument("--v", default="1")
    sp.add_argument("--fit", action="store_true", help="sweep v over --grid")
    sp.add_argument("--grid", default="1/2,1,3/2,2,3")
    sp.add_argument("--threshold", default="1/100")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    if args.command == "game" and args.adversary == "interactive":
        args.interactive_summary = True
    try:
        args.func(args)
    except (DomainError, ValueError, ZeroDivisionError) as e:
        rec = {"type": "error", "command": args.command, "error": type(e).__name__, "message": str(e)}
        sys.stdout.write(json.dumps(rec) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
