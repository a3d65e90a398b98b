"""Command-line front end: simulate, equilibria, stability, scan.

Parameters come from flags or from a flat `key = value` config file (# starts a
comment; keys are the flag names); flags override the file. All output is
deterministic: identical invocations produce identical bytes.

Exit codes: 0 success, 2 usage, 3 integration blow-up, 4 degenerate
parameters, 5 no positive equilibrium.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import equilibria as eqmod
from . import spectral
from .dde import default_step, integrate
from .errors import (
    BlowUpError,
    BoundaryAbsentError,
    DegenerateParametersError,
    InvalidInputError,
    SitddeError,
)
from .linearization import delta_coefficients, expansion_coefficients
from .model import ModelParams, State
from .scan import ScanConfig, scan

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BLOWUP = 3
EXIT_DEGENERATE = 4
EXIT_NO_EQUILIBRIUM = 5

_PARAM_FLAGS = ("a", "b", "c", "r", "xi1", "xi2", "xi3", "tau")


class _UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="sitdde", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp):
        for name in _PARAM_FLAGS:
            sp.add_argument(f"--{name}", type=float, default=None)
        sp.add_argument("--config", default=None, help="key = value file; flags override")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "tsv"), default=None)
        sp.add_argument("--precision", type=int, default=None, help="significant digits (default 9)")

    sp = sub.add_parser("simulate", help="integrate and emit a t,w,g,s table")
    common(sp)
    sp.add_argument("--w0", type=float, default=None)
    sp.add_argument("--g0", type=float, default=None)
    sp.add_argument("--s0", type=float, default=None)
    sp.add_argument("--t-end", dest="t_end", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp.add_argument("--stride", type=int, default=None)

    sp = sub.add_parser("equilibria", help="locate and report all equilibria")
    common(sp)

    sp = sub.add_parser("stability", help="crossing/Hopf analysis at positive equilibria")
    common(sp)
    sp.add_argument("--j-max", dest="j_max", type=int, default=None)
    sp.add_argument("--boundary", action="store_true")

    sp = sub.add_parser("scan", help="one-parameter bifurcation scan")
    common(sp)
    sp.add_argument("--w0", type=float, default=None)
    sp.add_argument("--g0", type=float, default=None)
    sp.add_argument("--s0", type=float, default=None)
    sp.add_argument("--vary", choices=("tau", "a", "b", "c", "r", "xi1", "xi2", "xi3"), default=None)
    sp.add_argument("--lo", type=float, default=None)
    sp.add_argument("--hi", type=float, default=None)
    sp.add_argument("--n-points", dest="n_points", type=int, default=None)
    sp.add_argument("--transient", type=float, default=None)
    sp.add_argument("--sample-time", dest="sample_time", type=float, default=None)
    sp.add_argument("--observable", choices=("w", "g", "s"), default=None)
    sp.add_argument("--sampler", choices=("extrema", "strobe"), default=None)
    sp.add_argument("--strobe-period", dest="strobe_period", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    return top


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected key = value")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


# every value key any subcommand accepts; keys for another subcommand are
# ignored so one config file can serve all four commands, while typos still fail
_INT_KEYS = frozenset({"stride", "n_points", "j_max", "precision"})
_STR_KEYS = frozenset({"vary", "observable", "sampler", "format", "out"})
_FLOAT_KEYS = frozenset(
    {*_PARAM_FLAGS, "w0", "g0", "s0", "t_end", "step", "lo", "hi",
     "transient", "sample_time", "strobe_period"}
)
_ALL_KEYS = _INT_KEYS | _STR_KEYS | _FLOAT_KEYS


def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset flags from the config file; flags always win."""
    if not getattr(args, "config", None):
        return
    raw = _read_config(args.config)
    for key, val in raw.items():
        if key not in _ALL_KEYS:
            raise _UsageError(f"unknown config key {key!r}")
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        typ = int if key in _INT_KEYS else (str if key in _STR_KEYS else float)
        try:
            setattr(args, key, typ(val))
        except ValueError:
            raise _UsageError(f"config key {key!r}: cannot parse {val!r}")


def _require(args: argparse.Namespace, names: Sequence[str]) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise _UsageError(f"missing required flag(s): {flags}")


def _params(args: argparse.Namespace, skip: str | None = None) -> ModelParams:
    needed = [n for n in _PARAM_FLAGS if n != "tau" and n != skip]
    _require(args, needed)
    vals = {n: getattr(args, n) for n in _PARAM_FLAGS if getattr(args, n) is not None}
    if skip is not None:
        vals.pop(skip, None)
        vals[skip] = 1.0 if skip != "tau" else 0.0  # placeholder, replaced per grid value
    vals.setdefault("tau", 0.0)
    try:
        return ModelParams(**vals)
    except InvalidInputError as exc:
        raise _UsageError(str(exc))


class _Writer:
    def __init__(self, args: argparse.Namespace):
        self.precision = args.precision if args.precision is not None else 9
        self.delim = "\t" if args.format == "tsv" else ","
        self.path = args.out

    def fmt(self, x: float) -> str:
        return format(float(x), f".{self.precision}g")

    def write(self, text: str) -> None:
        if self.path:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _cmd_simulate(args: argparse.Namespace) -> int:
    p = _params(args)
    _require(args, ("w0", "g0", "s0", "t_end"))
    stride = args.stride if args.stride is not None else 1
    if stride < 1:
        raise _UsageError("--stride must be >= 1")
    h = args.step if args.step is not None else default_step(p)
    wr = _Writer(args)
    history = State(args.w0, args.g0, args.s0)

    blow_time = None
    try:
        traj = integrate(p, history, args.t_end, h)
    except BlowUpError as exc:
        traj = exc.trajectory
        blow_time = exc.time
    except InvalidInputError as exc:
        raise _UsageError(str(exc))

    lines = [wr.delim.join(("t", "w", "g", "s"))]
    n = len(traj)
    for i in range(0, n, stride):
        row = (wr.fmt(traj.ts[i]), wr.fmt(traj.ys[i, 0]), wr.fmt(traj.ys[i, 1]), wr.fmt(traj.ys[i, 2]))
        lines.append(wr.delim.join(row))
    if n > 0 and (n - 1) % stride != 0:
        i = n - 1
        row = (wr.fmt(traj.ts[i]), wr.fmt(traj.ys[i, 0]), wr.fmt(traj.ys[i, 1]), wr.fmt(traj.ys[i, 2]))
        lines.append(wr.delim.join(row))
    wr.write("\n".join(lines) + "\n")
    if blow_time is not None:
        print(f"sitdde: blow-up at t = {blow_time:.6g}; partial output written", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


def _h1_line(p: ModelParams) -> str:
    return "H1: satisfied" if p.xi3 > p.xi1 else "H1: violated"


def _cmd_equilibria(args: argparse.Namespace) -> int:
    p = _params(args)
    wr = _Writer(args)
    out = []
    out.append(_h1_line(p))
    out.append(f"r > xi3: {'satisfied' if p.r > p.xi3 else 'violated'}")
    triv = eqmod.trivial_equilibrium(p)
    out.append(f"trivial: E0 = (0, 0, 0) residual={wr.fmt(triv.residual)}")
    bnd = eqmod.boundary_equilibrium(p)
    if bnd is None:
        out.append("boundary: absent (requires r > xi3)")
    else:
        out.append(
            f"boundary: E = (0, 0, {wr.fmt(bnd.location.s)}) residual={wr.fmt(bnd.residual)}"
        )
    try:
        reports = eqmod.positive_equilibria(p)
    except DegenerateParametersError as exc:
        print(f"sitdde: degenerate parameters: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    out.append(f"positive equilibria: {len(reports)}")
    for i, rep in enumerate(reports, start=1):
        loc = rep.location
        out.append(
            f"  [{i}] N={wr.fmt(rep.N)} E*=({wr.fmt(loc.w)}, {wr.fmt(loc.g)}, {wr.fmt(loc.s)}) "
            f"residual={wr.fmt(rep.residual)}"
        )
    wr.write("\n".join(out) + "\n")
    return EXIT_OK


def _cmd_stability(args: argparse.Namespace) -> int:
    p = _params(args)
    j_max = args.j_max if args.j_max is not None else 5
    wr = _Writer(args)
    try:
        reports = eqmod.positive_equilibria(p)
    except DegenerateParametersError as exc:
        print(f"sitdde: degenerate parameters: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if not reports:
        print("sitdde: no positive equilibrium for these parameters", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM

    out = [_h1_line(p)]
    for i, rep in enumerate(reports, start=1):
        loc = rep.location
        d = delta_coefficients(expansion_coefficients(loc, p))
        sr = spectral.analyze(d, j_max=j_max)
        out.append(
            f"equilibrium [{i}]: N={wr.fmt(rep.N)} E*=({wr.fmt(loc.w)}, {wr.fmt(loc.g)}, {wr.fmt(loc.s)})"
        )
        out.append("  delta: " + " ".join(f"d{k}={wr.fmt(v)}" for k, v in zip(range(1, 8), d.as_tuple())))
        rh = sr.routh_hurwitz
        out.append(
            "  Routh-Hurwitz margins: "
            f"linear={wr.fmt(rh.linear)} quadratic={wr.fmt(rh.quadratic)} "
            f"constant={wr.fmt(rh.constant)} product={wr.fmt(rh.product)} "
            f"-> stable at tau=0: {'yes' if rh.stable else 'no'}"
        )
        out.append("  gamma: " + " ".join(f"g{k}={wr.fmt(v)}" for k, v in zip(range(1, 7), sr.gammas.as_tuple())))
        out.append(f"  lemma: {sr.lemmas.branch}")
        if not sr.crossings:
            out.append("  crossings: none")
        for k, cr in enumerate(sr.crossings, start=1):
            out.append(
                f"  crossing [{k}]: omega={wr.fmt(cr.omega)} m={wr.fmt(cr.m)} "
                f"transversality={cr.transversality:+d}"
            )
            for j, tau in cr.taus:
                res = spectral.quasipoly_residual(1j * cr.omega, tau, d)
                out.append(f"    j={j} tau={wr.fmt(tau)} residual={wr.fmt(res)}")
            for j, tau in cr.rejected:
                out.append(f"    j={j} tau={wr.fmt(tau)} rejected (residual above tolerance)")
        if sr.tau0 is not None:
            out.append(f"  tau0={wr.fmt(sr.tau0)}")
        out.append(f"  verdict: {sr.verdict}")

    if args.boundary:
        out.append("boundary spectrum:")
        try:
            bs = spectral.boundary_spectrum(p)
        except BoundaryAbsentError:
            out.append("  absent (requires r > xi3)")
        else:
            out.append(
                "  closed-form: "
                f"lambda1={wr.fmt(bs.lambda1)} lambda2={wr.fmt(bs.lambda2)} lambda3={wr.fmt(bs.lambda3)} "
                f"-> {bs.closed_form_classification}"
            )
            eigs = " ".join(
                f"({wr.fmt(z.real)}{'+' if z.imag >= 0 else '-'}{wr.fmt(abs(z.imag))}j)"
                for z in bs.numeric_eigenvalues
            )
            out.append(f"  numeric eigenvalues: {eigs} -> {bs.classification}")
            out.append(f"  sign mismatch: {'yes' if bs.sign_mismatch else 'no'}")
            out.append(
                f"  stated repellor condition: {bs.condition_source}; "
                f"stated sink condition: {bs.condition_sink}"
            )
    wr.write("\n".join(out) + "\n")
    return EXIT_OK


def _cmd_scan(args: argparse.Namespace) -> int:
    _require(args, ("vary", "lo", "hi", "w0", "g0", "s0", "out"))
    p = _params(args, skip=args.vary)
    try:
        cfg = ScanConfig(
            vary=args.vary,
            lo=args.lo,
            hi=args.hi,
            n_points=args.n_points if args.n_points is not None else 100,
            history=State(args.w0, args.g0, args.s0),
            t_transient=args.transient if args.transient is not None else 300.0,
            t_sample=args.sample_time if args.sample_time is not None else 200.0,
            observable=args.observable if args.observable is not None else "s",
            sampler=args.sampler if args.sampler is not None else "extrema",
            strobe_period=args.strobe_period,
            step=args.step,
        )
    except InvalidInputError as exc:
        raise _UsageError(str(exc))
    wr = _Writer(args)
    result = scan(p, cfg)

    lines = [wr.delim.join(("param", "value", "observable", "sample"))]
    for pt in result.points:
        if pt.failed:
            lines.append(wr.delim.join((cfg.vary, wr.fmt(pt.value), "", "NaN")))
            continue
        for v in pt.samples:
            lines.append(wr.delim.join((cfg.vary, wr.fmt(pt.value), cfg.observable, wr.fmt(v))))
    wr.write("\n".join(lines) + "\n")

    summary = [wr.delim.join(("value", "classification", "n_clusters", "min", "max"))]
    for pt in result.points:
        if pt.failed:
            summary.append(wr.delim.join((wr.fmt(pt.value), "failed", "0", "NaN", "NaN")))
        else:
            summary.append(
                wr.delim.join(
                    (wr.fmt(pt.value), pt.classification, str(pt.n_clusters), wr.fmt(pt.vmin), wr.fmt(pt.vmax))
                )
            )
    summary.append(f"warnings: {result.n_failures} failed grid point(s)")
    with open(args.out + ".summary", "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(summary) + "\n")
    return EXIT_OK


_DISPATCH = {
    "simulate": _cmd_simulate,
    "equilibria": _cmd_equilibria,
    "stability": _cmd_stability,
    "scan": _cmd_scan,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _merge_config(args)
        return _DISPATCH[args.command](args)
    except _UsageError as exc:
        print(f"sitdde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateParametersError as exc:
        print(f"sitdde: degenerate parameters: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SitddeError as exc:
        print(f"sitdde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
