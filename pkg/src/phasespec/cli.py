"""Command-line front end.

    phasespec spectrum --params 5,-0.1,3,-2,1.5
    phasespec locus --params X,3,-2,-5,1.5 --index 0 --from -200 --to 200 --steps 401
    phasespec bench --seed 0

Results go to stdout (JSON by default, CSV with --csv).  Any library error
exits with status 1 and a JSON object {"error", "message", ...} on stderr.
"""
from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import analysis, phase, spectrum
from .charpoly import charpoly_p, charpoly_r
from .errors import PhaseSpecError
from .params import Classification, ParameterSet, build_jn, validate_params

LOCUS_HEADER = ["alpha", "re", "im", "mult", "method", "residual"]
BENCH_SIZES = (10**2, 10**3, 10**4, 10**5)
BASELINE_N = 100


class Command(enum.Enum):
    SPECTRUM = "spectrum"
    CHARPOLY = "charpoly"
    PHASE_SOLVE = "phase-solve"
    LOCUS = "locus"
    SENSITIVITY = "sensitivity"
    BOUND = "bound"
    BENCH = "bench"
    ORACLE = "oracle"


class Output(enum.Enum):
    JSON = "json"
    CSV = "csv"


@dataclass(frozen=True)
class Sweep:
    index: int
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")


@dataclass(frozen=True)
class RunConfig:
    command: Command
    params: tuple[str, ...] = ()
    tol: float = 1e-12
    output: Output = Output.JSON
    sweep: Sweep | None = None
    k: int | None = None
    all_branches: bool = False
    eig: int | None = None
    seed: int = 0
    sizes: tuple[int, ...] = BENCH_SIZES

    def __post_init__(self):
        if (self.sweep is not None) != (self.command is Command.LOCUS):
            raise ValueError("a sweep is given exactly when the command is locus")


def parse_param_tokens(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def read_params_file(path: str) -> tuple[str, ...]:
    """JSON array, or one value per line (blank lines and # comments skipped)."""
    body = Path(path).read_text()
    stripped = body.strip()
    if stripped.startswith("["):
        return tuple(str(v) for v in json.loads(stripped))
    lines = (line.split("#", 1)[0].strip() for line in body.splitlines())
    return tuple(line for line in lines if line)


def _params(tokens: Sequence[str], placeholder_at: int | None = None) -> ParameterSet:
    values = []
    for i, tok in enumerate(tokens):
        if i == placeholder_at and tok.upper() == "X":
            values.append(0.0)
            continue
        try:
            values.append(float(tok))
        except ValueError:
            raise ValueError(f"cannot read parameter {i}: {tok!r}") from None
    return validate_params(values)


def _emit_json(obj, out: TextIO) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def _emit_csv(header: Sequence[str], rows, out: TextIO) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    out.write(buf.getvalue())


def _eig_row(e: spectrum.Eigenvalue) -> list:
    d = e.to_dict()
    return [repr(d["re"]), repr(d["im"]), d["mult"], d["method"], repr(d["residual"])]


def locus_grid(sweep: Sweep, others: Sequence[float]) -> np.ndarray:
    """Uniform sweep plus 10x refinement around every value that forms an exact pair.

    The pair points -a_j are included exactly; the refined neighbourhood is one
    uniform step on each side.
    """
    grid = np.linspace(sweep.start, sweep.stop, sweep.steps)
    step = (sweep.stop - sweep.start) / (sweep.steps - 1)
    extra = []
    lo, hi = min(sweep.start, sweep.stop), max(sweep.start, sweep.stop)
    for a in others:
        c = -a
        if lo <= c <= hi:
            fine = c + step * np.arange(-10, 11) / 10.0
            extra.append(fine[(fine >= lo) & (fine <= hi)])
            extra.append(np.array([c]))
    if extra:
        grid = np.concatenate([grid] + extra)
    return np.unique(grid)


def _run_locus(cfg: RunConfig, out: TextIO) -> None:
    sweep = cfg.sweep
    tokens = list(cfg.params)
    if not 0 <= sweep.index < len(tokens):
        raise ValueError(f"--index {sweep.index} is outside the parameter list")
    base = list(_params(tokens, placeholder_at=sweep.index).alphas)
    others = [a for i, a in enumerate(base) if i != sweep.index]
    rows = []
    for alpha in locus_grid(sweep, others):
        values = list(base)
        values[sweep.index] = float(alpha)
        report = spectrum.solve_spectrum(validate_params(values), cfg.tol)
        rows.extend([repr(float(alpha))] + _eig_row(e) for e in report.eigenvalues)
    if cfg.output is Output.JSON:
        _emit_json([dict(zip(LOCUS_HEADER, r)) for r in rows], out)
    else:
        _emit_csv(LOCUS_HEADER, rows, out)


def _run_bench(cfg: RunConfig, out: TextIO) -> None:
    from .roots import fallback_roots

    rng = np.random.default_rng(cfg.seed)
    alpha = float(rng.uniform(0.5, 3.0))
    rows = []
    for n in cfg.sizes:
        p = validate_params([alpha] * n)
        t0 = time.perf_counter()
        report = spectrum.solve_spectrum(p, cfg.tol)
        rows.append({"n": n, "method": "phase", "seconds": time.perf_counter() - t0,
                     "max_residual": report.max_residual})
    # reference: coefficient polynomial roots, only sensible at small n
    p = validate_params([alpha] * BASELINE_N)
    t0 = time.perf_counter()
    with np.errstate(all="ignore"):
        roots = np.array(fallback_roots(charpoly_r(p)))
    seconds = time.perf_counter() - t0
    exact = np.sort(spectrum.solve_spectrum(p, cfg.tol).values().real)
    err = float(np.max(np.abs(np.sort(roots.real) - exact) / np.maximum(1.0, exact)))
    rows.append({"n": BASELINE_N, "method": "coefficient-roots", "seconds": seconds,
                 "max_rel_error": err})
    if cfg.output is Output.JSON:
        _emit_json({"alpha": alpha, "runs": rows}, out)
    else:
        _emit_csv(["n", "method", "seconds", "max_residual", "max_rel_error"],
                  [[r["n"], r["method"], r["seconds"], r.get("max_residual", ""), r.get("max_rel_error", "")]
                   for r in rows], out)


def _run_oracle(p: ParameterSet, out: TextIO) -> None:
    from . import oracle

    result = {"interpolated": oracle.charpoly_by_interpolation(build_jn(p)).to_dict()}
    if p.n <= oracle.MAX_EXACT_N and all(a != 0 for a in p.alphas):
        exact = oracle.exact_charpoly_small(p)
        result["exact"] = [str(c) for c in exact.coeffs]
    _emit_json(result, out)


def run(cfg: RunConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        _dispatch(cfg, out)
    except PhaseSpecError as exc:
        err.write(json.dumps(exc.to_dict()) + "\n")
        return 1
    except (ValueError, OSError) as exc:
        err.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


def _dispatch(cfg: RunConfig, out: TextIO) -> None:
    cmd = cfg.command
    if cmd is Command.LOCUS:
        return _run_locus(cfg, out)
    if cmd is Command.BENCH:
        return _run_bench(cfg, out)
    p = _params(cfg.params)
    if cmd is Command.SPECTRUM:
        report = spectrum.solve_spectrum(p, cfg.tol)
        if cfg.output is Output.JSON:
            _emit_json(report.to_dict(), out)
        else:
            _emit_csv(LOCUS_HEADER[1:], [_eig_row(e) for e in report.eigenvalues], out)
    elif cmd is Command.CHARPOLY:
        cont, mono = charpoly_p(p), charpoly_r(p)
        if cfg.output is Output.JSON:
            _emit_json({"continuant": cont.to_dict(), "monic": mono.to_dict()}, out)
        else:
            _emit_csv(["power", "continuant", "monic"],
                      [[i, repr(a), repr(b)] for i, (a, b) in enumerate(zip(cont.coeffs, mono.coeffs))], out)
    elif cmd is Command.PHASE_SOLVE:
        if cfg.all_branches:
            sols = (phase.solve_all_positive(p, cfg.tol) if p.classification is Classification.ALL_POSITIVE
                    else phase.scan_crossings(p, cfg.tol))
        else:
            if cfg.k is None:
                raise ValueError("phase-solve needs --k or --all")
            sols = phase.solve_branch(phase.PhaseQuery(p, cfg.k, cfg.tol))
        if cfg.output is Output.JSON:
            _emit_json(sols[0].to_dict() if len(sols) == 1 and not cfg.all_branches
                       else [s.to_dict() for s in sols], out)
        else:
            _emit_csv(["k", "lambda", "residual", "iterations"],
                      [[s.k, repr(s.lam), repr(s.residual), s.iterations] for s in sols], out)
    elif cmd is Command.SENSITIVITY:
        if cfg.eig is None:
            raise ValueError("sensitivity needs --eig")
        report = spectrum.solve_spectrum(p, cfg.tol)
        if not 0 <= cfg.eig < len(report.eigenvalues):
            raise ValueError(f"--eig {cfg.eig} out of range (0..{len(report.eigenvalues) - 1})")
        e = report.eigenvalues[cfg.eig]
        if e.value.imag != 0 or e.multiplicity != 1:
            raise ValueError(f"eigenvalue {cfg.eig} is not a simple real eigenvalue")
        row = analysis.sensitivity(p, e.value.real)
        if cfg.output is Output.JSON:
            _emit_json(row.to_dict(), out)
        else:
            _emit_csv(["i", "partial"], [[i, repr(v)] for i, v in enumerate(row.partials)], out)
    elif cmd is Command.BOUND:
        bound = analysis.radius_lower_bound(p)
        if cfg.output is Output.JSON:
            _emit_json({"bound": bound}, out)
        else:
            _emit_csv(["bound"], [[repr(bound)]], out)
    elif cmd is Command.ORACLE:
        _run_oracle(p, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasespec", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, params=True):
        if params:
            src = sp.add_mutually_exclusive_group(required=True)
            src.add_argument("--params", help="comma-separated parameters, e.g. 5,-0.1,3")
            src.add_argument("--params-file", help="JSON array or one value per line")
        sp.add_argument("--tol", type=float, default=1e-12)
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="output", action="store_const", const=Output.JSON)
        fmt.add_argument("--csv", dest="output", action="store_const", const=Output.CSV)

    common(sub.add_parser("spectrum", help="all eigenvalues with multiplicities"))
    common(sub.add_parser("charpoly", help="continuant and monic characteristic polynomials"))
    sp = sub.add_parser("phase-solve", help="solve the phase equation on branch k")
    common(sp)
    branch = sp.add_mutually_exclusive_group(required=True)
    branch.add_argument("--k", type=int)
    branch.add_argument("--all", dest="all_branches", action="store_true")
    sp = sub.add_parser("locus", help="sweep one parameter, one CSV row per eigenvalue")
    common(sp)
    sp.add_argument("--index", type=int, required=True)
    sp.add_argument("--from", dest="start", type=float, required=True)
    sp.add_argument("--to", dest="stop", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp = sub.add_parser("sensitivity", help="d lambda / d alpha for one eigenvalue")
    common(sp)
    sp.add_argument("--eig", type=int, required=True, help="index into the spectrum listing")
    common(sub.add_parser("bound", help="spectral radius lower bound (positive parameters)"))
    sp = sub.add_parser("bench", help="timing on all-equal parameters, n = 1e2..1e5")
    common(sp, params=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sizes", help="comma-separated n values (default 100,1000,10000,100000)")
    common(sub.add_parser("oracle"))
    # debugging aid; keep it out of the help listing
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "oracle"]
    sub.metavar = "{" + ",".join(c.value for c in Command if c is not Command.ORACLE) + "}"
    return parser


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Let `--params -1,2` through: argparse would read -1,2 as an option."""
    out = list(argv)
    for i, tok in enumerate(out[:-1]):
        if tok in ("--params", "--from", "--to") and out[i + 1].startswith("-"):
            out[i] = f"{tok}={out[i + 1]}"
            out[i + 1] = ""
    return [tok for tok in out if tok != ""]


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    command = Command(ns.command)
    params: tuple[str, ...] = ()
    if getattr(ns, "params", None) is not None:
        params = parse_param_tokens(ns.params)
    elif getattr(ns, "params_file", None) is not None:
        params = read_params_file(ns.params_file)
    sweep = None
    if command is Command.LOCUS:
        sweep = Sweep(ns.index, ns.start, ns.stop, ns.steps)
    sizes = BENCH_SIZES
    if command is Command.BENCH and ns.sizes:
        sizes = tuple(int(v) for v in parse_param_tokens(ns.sizes))
    return RunConfig(
        command=command,
        params=params,
        tol=ns.tol,
        output=ns.output or (Output.CSV if command is Command.LOCUS else Output.JSON),
        sweep=sweep,
        k=getattr(ns, "k", None),
        all_branches=getattr(ns, "all_branches", False),
        eig=getattr(ns, "eig", None),
        seed=getattr(ns, "seed", 0),
        sizes=sizes,
    )


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    ns = build_parser().parse_args(_glue_negative_values(argv))
    try:
        cfg = config_from_args(ns)
    except (ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
